from typing import List

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator


class StationDescriptor(BaseModel):
    id: str = Field(min_length=1)
    berth_count: int = Field(default=4, gt=0)


class LinkDescriptor(BaseModel):
    """One-way track segment. Serialized with ``from``/``to`` keys."""

    source: str = Field(alias="from")
    target: str = Field(alias="to")
    length: float = Field(gt=0, description="meters")

    model_config = ConfigDict(populate_by_name=True)


class NetworkSpec(BaseModel):
    stations: List[StationDescriptor] = Field(min_length=2)
    links: List[LinkDescriptor] = Field(min_length=1)

    @model_validator(mode="after")
    def check_topology(self) -> "NetworkSpec":
        ids = [station.id for station in self.stations]
        seen = set()
        for station_id in ids:
            if station_id in seen:
                raise ValueError(f"duplicate station id {station_id!r}")
            seen.add(station_id)

        for index, link in enumerate(self.links):
            for end in (link.source, link.target):
                if end not in seen:
                    raise ValueError(
                        f"link {index} ({link.source}->{link.target}) references unknown station {end!r}"
                    )
            if link.source == link.target:
                raise ValueError(f"link {index} is a self-loop at {link.source!r}")

        graph = nx.DiGraph()
        graph.add_nodes_from(ids)
        graph.add_edges_from((link.source, link.target) for link in self.links)
        if not nx.is_strongly_connected(graph):
            components = sorted(
                (sorted(component) for component in nx.strongly_connected_components(graph)),
                key=lambda component: component[0],
            )
            raise ValueError(
                "network is not strongly connected; components: "
                + "; ".join(",".join(component) for component in components)
            )
        return self

    @property
    def station_ids(self) -> List[str]:
        return [station.id for station in self.stations]

    @property
    def total_berths(self) -> int:
        return sum(station.berth_count for station in self.stations)
