"""Invariant audits over the bundled scenarios."""

import numpy as np
import pytest

from app.experiments.loader import bundled_scenarios, load_scenario
from app.sim.engine import AT_BERTH, Simulation, VehicleState
from tests.factories import short_city

pytestmark = pytest.mark.scenarios

# Fresh seeds on every run; the assertion messages carry them for replay.
SEEDS = [int(seed) for seed in np.random.default_rng().integers(0, 2**31, size=2)]


def audited(scenario, horizon, seed):
    params = scenario.management.model_copy(update={"horizon": horizon})
    sim = Simulation(scenario, params, seed, audit=True)
    result = sim.run()
    return sim, result


def check_end_state(sim, result, context):
    assert len(sim.vehicles) == sim.scenario.fleet.size, context
    assert sum(len(station.idle) for station in sim.stations.values()) == sum(
        1 for vehicle in sim.vehicles if vehicle.state == VehicleState.IDLE
    ), context
    for station in sim.stations.values():
        at_berth = sum(1 for v in sim.vehicles if v.station == station.id and v.state in AT_BERTH)
        assert at_berth == station.occupied <= station.berth_count, context
    queued = sum(len(station.queue) for station in sim.stations.values())
    assert result.report.generated == result.report.served + queued, context
    assert result.report.generated == sim.delivered + queued + sum(
        1 for vehicle in sim.vehicles if vehicle.order is not None
    ), context


class TestBundledScenarios:
    """Test every bundled scenario under audit at its own settings."""

    @pytest.mark.parametrize("path", bundled_scenarios(), ids=lambda path: path.stem)
    def test_audit(self, path):
        """Test the invariants hold after every event."""
        scenario = load_scenario(path)
        sim, result = audited(scenario, scenario.management.horizon, scenario.run.seed)
        check_end_state(sim, result, path.stem)


class TestRandomSeeds:
    """Test shortened City scenarios under audit with fresh seeds."""

    @pytest.mark.parametrize("kind", ["uniform", "event_inbound", "event_outbound"])
    @pytest.mark.parametrize("horizon", [None, 1.0, 0.5])
    def test_audit(self, kind, horizon):
        """Test the invariants hold for random seeds and horizons."""
        scenario = short_city(kind)
        for seed in SEEDS:
            sim, result = audited(scenario, horizon, seed)
            check_end_state(sim, result, f"{kind} horizon={horizon} seed={seed}")
