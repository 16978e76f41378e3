import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.stats.proportion import proportion_confint

from cutbound.bound import tail_lower_bound
from cutbound.montecarlo import (
    EmpiricalCurve,
    SimulationConfig,
    compare_curves,
    instance_stream,
    run_simulation,
    sample_min_cuts,
    wilson_interval,
)
from cutbound.oracle import exact_statistics

from graphs import BELL_MU, params


class TestWilson:
    def test_half_successes(self):
        low, high = wilson_interval(50, 100)
        assert high - low == pytest.approx(0.19, abs=0.005)
        assert (low + high) / 2 == pytest.approx(0.5)

    def test_endpoints_exact(self):
        assert wilson_interval(0, 40)[0] == 0.0
        assert wilson_interval(40, 40)[1] == 1.0

    @given(st.integers(1, 5000), st.data())
    @settings(max_examples=100, deadline=None)
    def test_matches_statsmodels(self, trials, data):
        hits = data.draw(st.integers(0, trials))
        ours = wilson_interval(hits, trials)
        ref = proportion_confint(hits, trials, alpha=0.05, method="wilson")
        assert ours == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("hits,trials", [(-1, 10), (11, 10), (0, 0)])
    def test_invalid(self, hits, trials):
        with pytest.raises(ValueError):
            wilson_interval(hits, trials)


class TestSimulation:
    def test_triangle_forced(self):
        curve = run_simulation(SimulationConfig(params(3, 3), 100, 1, 10))
        assert curve.histogram == {2: 100}
        assert curve.tail(2)[0] == 1.0 and curve.tail(3)[0] == 0.0
        assert curve.delta_max == 3

    def test_single_edge(self):
        curve = run_simulation(SimulationConfig(params(2, 1), 10, 5, 10))
        assert curve.histogram == {1: 10}
        assert curve.estimate == [1.0, 1.0, 0.0]

    def test_delta_max_caps_range(self):
        curve = run_simulation(SimulationConfig(params(3, 3), 20, 1, 1))
        assert curve.delta_max == 1 and len(curve.estimate) == 2
        # values past the stored range still come from the histogram
        assert curve.tail(2)[0] == 1.0

    def test_streams_independent_of_order(self):
        a = instance_stream(7, 3).integers(0, 2**32, 4)
        instance_stream(7, 2).integers(0, 2**32, 4)
        b = instance_stream(7, 3).integers(0, 2**32, 4)
        assert (a == b).all()
        assert not (instance_stream(7, 4).integers(0, 2**32, 4) == a).all()

    def test_worker_count_does_not_matter(self):
        p = params(12, 20, BELL_MU)
        one = sample_min_cuts(SimulationConfig(p, 60, 42, 10, workers=1))
        two = sample_min_cuts(SimulationConfig(p, 60, 42, 10, workers=2))
        assert one == two

    def test_config_validation(self):
        for kwargs in [dict(instances=0), dict(delta_max=0), dict(workers=0)]:
            base = dict(params=params(3, 3), instances=5, master_seed=1, delta_max=3)
            base.update(kwargs)
            with pytest.raises(ValueError):
                SimulationConfig(**base)

    def test_non_increasing_and_ci_contains_estimate(self):
        curve = run_simulation(SimulationConfig(params(15, 30, BELL_MU), 300, 9, 50))
        est = curve.estimate
        assert est[0] == 1.0
        assert all(a >= b for a, b in zip(est, est[1:]))
        for d in curve.deltas:
            assert curve.ci_low[d] <= est[d] <= curve.ci_high[d]

    @pytest.mark.parametrize("k,n,mu", [(4, 4, BELL_MU), (5, 8, "1/2,1/2"), (5, 4, "1/3,0,2/3")])
    def test_estimates_match_exact_tail(self, k, n, mu):
        p = params(k, n, mu)
        exact = exact_statistics(p, cut_weights=False, detailed=False)
        N = 10_000
        curve = run_simulation(SimulationConfig(p, N, 2024, 60))
        for d in range(curve.delta_max + 2):
            truth = float(exact.tail(d))
            half = 1.96 * math.sqrt(max(truth * (1 - truth), 1e-9) / N)
            assert abs(curve.tail(d)[0] - truth) <= 5 * half + 1e-12


class TestCompare:
    def make_emp(self, p, histogram, instances):
        return EmpiricalCurve(p, instances, 0, histogram, max(histogram) + 1)

    def test_triangle_gaps(self):
        p = params(3, 3)
        report = compare_curves(tail_lower_bound(p, 3), self.make_emp(p, {2: 50}, 50))
        assert [r.gap for r in report.rows] == [0.0, 0.0, 0.0, 0.0]
        assert report.violations == []

    def test_violation_flagged(self):
        p = params(3, 3)
        # an impossible empirical curve: every lambda equals 1
        report = compare_curves(tail_lower_bound(p, 3), self.make_emp(p, {1: 1000}, 1000))
        assert report.violations == [2]
        assert report.rows[2].gap == -1.0

    def test_window_restricts_max_gap(self):
        p = params(4, 4)
        bound = tail_lower_bound(p, 6)
        emp = self.make_emp(p, {1: 30, 2: 70}, 100)
        full = compare_curves(bound, emp)
        windowed = compare_curves(bound, emp, window=(0, 0))
        assert windowed.max_gap == 0.0
        assert full.max_gap == max(r.gap for r in full.rows)

    def test_parameter_mismatch(self):
        emp = self.make_emp(params(3, 2), {1: 5}, 5)
        with pytest.raises(ValueError, match="n"):
            compare_curves(tail_lower_bound(params(3, 3), 3), emp)
