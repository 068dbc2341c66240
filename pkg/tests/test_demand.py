"""Tests for order streams and the named demand scenarios."""

from collections import Counter

import numpy as np
import pytest
from scipy import stats

from app.core.errors import AllZeroWeights, NonPositiveMean, UnknownEventStation
from app.schemas.demand import DemandPhase, GroupSizeDistribution, ScenarioKind
from app.sim.demand import (
    BACKGROUND_MEAN_MIN,
    UNIFORM_MEAN_MIN,
    OrderStream,
    build_scenario,
    build_streams,
    sample_destination,
    sample_group_size,
    sample_interarrival,
    station_rate_per_hour,
    stream_rng,
)

pytestmark = pytest.mark.demand


class TestSampling:
    """Test the three primitive draws."""

    @pytest.mark.parametrize("mean_min, mean_s", [(UNIFORM_MEAN_MIN, 51.36), (BACKGROUND_MEAN_MIN, 900.0)])
    def test_interarrival_mean(self, mean_min, mean_s):
        """Test the empirical mean of 10^6 draws is within 1% of the configured mean."""
        rng = np.random.default_rng(11)
        draws = sample_interarrival(mean_min, rng, size=1_000_000)
        assert draws.mean() == pytest.approx(mean_s, rel=0.01)
        assert (draws >= 0).all()

    def test_interarrival_scalar(self):
        """Test a single draw is a plain float."""
        assert isinstance(sample_interarrival(1.0, np.random.default_rng(1)), float)

    @pytest.mark.parametrize("mean", [0.0, -1.0])
    def test_interarrival_rejects_nonpositive_mean(self, mean):
        """Test non-positive means are rejected."""
        with pytest.raises(NonPositiveMean):
            sample_interarrival(mean, np.random.default_rng(1))

    @pytest.mark.parametrize(
        "dist", [GroupSizeDistribution.event_inbound(), GroupSizeDistribution.event_outbound()]
    )
    def test_group_size_frequencies(self, dist):
        """Test group size frequencies are within 0.5% of the distribution."""
        sizes = sample_group_size(dist, np.random.default_rng(5), size=1_000_000)
        values, counts = np.unique(sizes, return_counts=True)
        assert set(values.tolist()) <= {1, 2, 3, 4}
        frequencies = dict(zip(values.tolist(), (counts / 1_000_000).tolist()))
        for size, p in enumerate(dist.probabilities, start=1):
            assert frequencies.get(size, 0.0) == pytest.approx(p, abs=0.005)

    def test_group_size_scalar(self):
        """Test a single draw is an int between 1 and 4."""
        size = sample_group_size(GroupSizeDistribution.uniform(), np.random.default_rng(3))
        assert isinstance(size, int)
        assert 1 <= size <= 4

    def test_destination_proportional(self):
        """Test destinations follow the weights and never equal the origin."""
        rng = np.random.default_rng(9)
        weights = {"A": 5.0, "B": 1.0, "C": 3.0}
        counts = Counter(sample_destination("A", weights, rng) for _ in range(40_000))
        assert "A" not in counts
        assert counts["C"] / 40_000 == pytest.approx(0.75, abs=0.01)
        assert counts["B"] / 40_000 == pytest.approx(0.25, abs=0.01)

    def test_destination_all_zero(self):
        """Test a row without any positive weight is rejected."""
        with pytest.raises(AllZeroWeights):
            sample_destination("A", {"A": 1.0, "B": 0.0}, np.random.default_rng(1))


class TestDistributions:
    """Test the group size presets."""

    def test_means(self):
        """Test the mean group sizes used by the event rates."""
        assert GroupSizeDistribution.uniform().mean == pytest.approx(2.5)
        assert GroupSizeDistribution.event_inbound().mean == pytest.approx(2.9)
        assert GroupSizeDistribution.event_outbound().mean == pytest.approx(3.45)

    def test_probabilities_must_sum_to_one(self):
        """Test an unnormalised distribution is rejected."""
        with pytest.raises(ValueError):
            GroupSizeDistribution(p1=0.5, p2=0.5, p3=0.5, p4=0.0)


class TestBuildScenario:
    """Test the three transport tasks on the City network."""

    def test_uniform(self, city):
        """Test uniform demand: every station at 0.856 min, then background."""
        heavy, background = build_scenario(ScenarioKind.UNIFORM, city)
        assert heavy.heavy and not background.heavy
        assert (heavy.start, heavy.end) == (0.0, 7200.0)
        assert (background.start, background.end) == (7200.0, 14400.0)
        assert set(heavy.mean_interarrival_min) == set(city.station_ids)
        assert all(mean == UNIFORM_MEAN_MIN for mean in heavy.mean_interarrival_min.values())
        assert heavy.destination_weights is None

    def test_event_inbound(self, city):
        """Test inbound demand: 11 feeders all heading to I."""
        heavy, background = build_scenario("event_inbound", city)
        assert set(heavy.mean_interarrival_min) == set(city.station_ids) - {"I"}
        expected = 60.0 / ((4219 / (2 * 11)) / 2.9)
        assert all(mean == pytest.approx(expected) for mean in heavy.mean_interarrival_min.values())
        assert all(row == {"I": 1.0} for row in heavy.destination_weights.values())
        assert heavy.group_sizes == GroupSizeDistribution.event_inbound()
        assert (background.start, background.end) == (0.0, 14400.0)
        assert all(mean == BACKGROUND_MEAN_MIN for mean in background.mean_interarrival_min.values())

    def test_event_outbound(self, city):
        """Test outbound demand: only I emits, uniformly to the rest."""
        heavy, _ = build_scenario("event_outbound", city)
        assert list(heavy.mean_interarrival_min) == ["I"]
        assert heavy.mean_interarrival_min["I"] == pytest.approx(60.0 / ((4219 / 2) / 3.45))
        assert heavy.destination_row("I", city.station_ids) == {
            station: 1.0 for station in city.station_ids if station != "I"
        }

    def test_event_rates_match_participants(self, city):
        """Test expected persons over the heavy phase equal the participant count."""
        for kind, dist in (
            ("event_inbound", GroupSizeDistribution.event_inbound()),
            ("event_outbound", GroupSizeDistribution.event_outbound()),
        ):
            heavy, _ = build_scenario(kind, city)
            groups_per_hour = sum(60.0 / mean for mean in heavy.mean_interarrival_min.values())
            assert groups_per_hour * 2 * dist.mean == pytest.approx(4219)

    def test_event_arithmetic(self, city):
        """Test the derived per-station rates and the combined inter-order time at I."""
        inbound, _ = build_scenario("event_inbound", city)
        assert 60.0 / inbound.mean_interarrival_min["A"] == pytest.approx(66.13, abs=0.02)
        outbound, _ = build_scenario("event_outbound", city)
        assert 60.0 / outbound.mean_interarrival_min["I"] == pytest.approx(611.4, abs=0.1)
        combined = station_rate_per_hour(build_scenario("event_outbound", city), "I", 0.0)
        assert 60.0 / combined == pytest.approx(0.0976, abs=0.0002)

    def test_unknown_event_station(self, two_station_loop):
        """Test event scenarios need the event station."""
        with pytest.raises(UnknownEventStation):
            build_scenario("event_inbound", two_station_loop, event_station="I")

    def test_custom_durations(self, city):
        """Test heavy and tail durations move the phase boundaries."""
        heavy, background = build_scenario("uniform", city, heavy_duration=1800, tail=600)
        assert heavy.end == 1800
        assert background.end == 2400

    def test_station_rate(self, city):
        """Test phase rates superpose at a station."""
        phases = build_scenario("event_outbound", city)
        assert station_rate_per_hour(phases, "I", 10.0) == pytest.approx(4219 / 2 / 3.45 + 4)
        assert station_rate_per_hour(phases, "A", 10.0) == pytest.approx(4.0)
        assert station_rate_per_hour(phases, "I", 8000.0) == pytest.approx(4.0)


class TestOrderStream:
    """Test per-(phase, station) streams."""

    @pytest.fixture
    def phase(self):
        return DemandPhase(name="rush", start=100.0, end=400.0, mean_interarrival_min={"A": 0.5, "B": 1.0})

    def test_arrivals_inside_window(self, phase):
        """Test every arrival lies in the phase window and the stream ends with None."""
        stream = OrderStream(phase, "A", ["A", "B", "C"], seed=3)
        times = []
        t = stream.first_arrival()
        while t is not None:
            times.append(t)
            t = stream.next_arrival(t)
        assert times
        assert all(100.0 <= t < 400.0 for t in times)
        assert times == sorted(times)

    def test_counts_are_poisson(self):
        """Test ten-minute arrival counts pass the index-of-dispersion chi-square at 1%."""
        bins, width = 1000, 600.0
        long_phase = DemandPhase(name="long", start=0.0, end=bins * width, mean_interarrival_min={"A": 0.5})
        stream = OrderStream(long_phase, "A", ["A", "B"], seed=13)
        times = []
        t = stream.first_arrival()
        while t is not None:
            times.append(t)
            t = stream.next_arrival(t)
        counts, _ = np.histogram(times, bins=bins, range=(0.0, bins * width))
        assert counts.mean() == pytest.approx(20.0, rel=0.02)
        dispersion = float(((counts - counts.mean()) ** 2).sum() / counts.mean())
        low, high = stats.chi2.ppf([0.005, 0.995], df=bins - 1)
        assert low < dispersion < high

    def test_draw(self, phase):
        """Test drawn orders leave from the stream station."""
        stream = OrderStream(phase, "A", ["A", "B", "C"], seed=3)
        order = stream.draw(order_id=4, now=150.0)
        assert order.origin == "A"
        assert order.destination in {"B", "C"}
        assert 1 <= order.size <= 4
        assert (order.id, order.created_at) == (4, 150.0)

    def test_reproducible(self, phase):
        """Test the same seed reproduces the stream."""
        first = OrderStream(phase, "A", ["A", "B"], seed=5)
        second = OrderStream(phase, "A", ["A", "B"], seed=5)
        assert [first.next_arrival(0.0) for _ in range(20)] == [second.next_arrival(0.0) for _ in range(20)]

    def test_streams_independent(self):
        """Test a stream's draws do not depend on which other streams exist."""
        alone = stream_rng(7, "rush", "A").random(10)
        with_others = [stream_rng(7, name, station) for name in ("rush", "quiet") for station in "AB"]
        for generator in with_others[1:]:
            generator.random(50)
        assert np.array_equal(with_others[0].random(10), alone)
        assert not np.array_equal(stream_rng(7, "rush", "B").random(10), alone)
        assert not np.array_equal(stream_rng(8, "rush", "A").random(10), alone)

    def test_build_streams(self, phase):
        """Test one stream per listed station."""
        streams = build_streams([phase], ["A", "B"], seed=1)
        assert [(s.phase.name, s.station) for s in streams] == [("rush", "A"), ("rush", "B")]
