from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from app.schemas.management import format_horizon

CSV_COLUMNS = [
    "scenario",
    "horizon",
    "seed",
    "scope",
    "awt_s",
    "aql_groups",
    "maxql_groups",
    "rest_min",
    "rest_censored",
    "served",
    "generated",
    "dispatch_calls",
    "dispatch_expels",
    "dispatch_balance",
    "messages",
]


class MetricsReport(BaseModel):
    scenario: str
    horizon: Optional[float]
    seed: int
    scope: str
    awt_s: float
    aql_groups: float
    maxql_groups: int
    rest_min: Optional[float]
    rest_censored: bool
    served: int
    generated: int
    dispatch_calls: int = 0
    dispatch_expels: int = 0
    dispatch_balance: int = 0
    messages: int = 0
    duration_s: float = 0.0
    fleet_size: int = 0
    final_horizon: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    def csv_row(self) -> List[str]:
        """Render the fixed CSV columns; censored Rest leaves ``rest_min`` empty."""
        rest = "" if self.rest_censored or self.rest_min is None else f"{self.rest_min:.3f}"
        return [
            self.scenario,
            format_horizon(self.horizon),
            str(self.seed),
            self.scope,
            f"{self.awt_s:.3f}",
            f"{self.aql_groups:.4f}",
            str(self.maxql_groups),
            rest,
            "1" if self.rest_censored else "0",
            str(self.served),
            str(self.generated),
            str(self.dispatch_calls),
            str(self.dispatch_expels),
            str(self.dispatch_balance),
            str(self.messages),
        ]
