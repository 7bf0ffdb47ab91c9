import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import closed_form_time, replay_exploration_time
from multimodal_search import solver
from multimodal_search.analysis import (
    WitnessSequences,
    analytic_cr_limit,
    audit_min_growth,
    audit_odd_lower_bound,
    boundary_limits,
    cr_convergence_series,
    cumulative_time,
    empirical_cr,
    even_phase_series,
    extract_witness,
    golden_section_minimize,
    grid_targets,
    odd_recurrence_coefficients,
    recurrence_collapse,
    round_duration,
    worst_case_targets,
)
from multimodal_search.coverage import TrajectoryBuilder, exploration_times
from multimodal_search.errors import InsufficientHorizonError, InvalidArgumentError, InvalidTraceError
from multimodal_search.strategies import StrategyParams, Variant, build_trajectory, odd_search, practical_search


def doubling_params():
    return StrategyParams(1, Variant.ODD, 2.0)


class TestClosedForms:
    def test_round_durations(self):
        params = doubling_params()
        assert [round_duration(params, i) for i in range(4)] == [4, 8, 16, 32]
        assert [cumulative_time(params, i) for i in range(-1, 4)] == [0, 4, 12, 28, 60]

    def test_doubling_limit(self):
        assert analytic_cr_limit(doubling_params()) == 9.0
        assert cr_convergence_series(doubling_params(), 4) == [5, 7, 8, 8.5]

    @pytest.mark.parametrize("p", [1, 3, 5])
    def test_optimal_odd_limit(self, p):
        assert analytic_cr_limit(StrategyParams.optimal(p)) == pytest.approx(solver.optimal_cr(p), rel=1e-12)

    def test_even_split_extremes(self):
        a = 2.0
        only_cell = StrategyParams(2, Variant.EVEN, a, 0.0)
        only_sweep = StrategyParams(2, Variant.EVEN, a, 1.0)
        # r=0: single cell of width a^2-1 from a^{i-1}; r=1: thorough sweep
        assert analytic_cr_limit(only_cell) == pytest.approx(2 * 2 * 3 + 4 - 1)
        assert analytic_cr_limit(only_sweep) == pytest.approx(1 + 2 + 4 * 3)

    def test_practical_limit(self):
        params = StrategyParams.optimal(3, 0.1)
        assert analytic_cr_limit(params) == pytest.approx(solver.optimal_cr(3) + 0.1)

    def test_series_needs_rounds(self):
        with pytest.raises(InvalidArgumentError):
            cr_convergence_series(doubling_params(), 0)

    @pytest.mark.parametrize("p", [2, 4])
    def test_even_series_converges(self, p):
        params = StrategyParams.optimal(p)
        ph1, ph2 = even_phase_series(params, 60)
        c = solver.optimal_cr(p)
        assert ph1[-1] == pytest.approx(c, rel=1e-12)
        assert ph2[-1] == pytest.approx(c, rel=1e-12)
        assert all(u < v for u, v in zip(ph1[:20], ph1[1:20]))

    @pytest.mark.parametrize("p", [1, 3, 7])
    def test_golden_section(self, p):
        a = golden_section_minimize(lambda a: analytic_cr_limit(StrategyParams(p, Variant.ODD, a)), 1 + 1e-9, 4.0)
        assert a == pytest.approx(1 + math.sqrt(2 / (p + 1)), abs=1e-6)

    def test_golden_section_quadratic(self):
        assert golden_section_minimize(lambda x: (x - 0.3) ** 2, -2, 2) == pytest.approx(0.3, abs=1e-8)


class TestEmpirical:
    def test_doubling_critical_ratios(self, doubling):
        report = empirical_cr(doubling, worst_case_targets(doubling.params, 4, eta=1e-9))
        by_x = {round(t.x): t.cr for t in report.targets}
        assert by_x[2] == pytest.approx(7.0, abs=1e-7)
        assert by_x[-4] == pytest.approx(8.0, abs=1e-7)
        assert report.analytic_limit == 9.0

    def test_targets_skip_unit_interval(self):
        targets = worst_case_targets(doubling_params(), 3)
        assert all(abs(x) >= 1 for x in targets)
        assert targets[0] == pytest.approx(-1.0, abs=1e-8) or targets[0] == pytest.approx(1.0, abs=1e-8)

    def test_even_targets_include_split(self):
        params = StrategyParams.optimal(2)
        targets = worst_case_targets(params, 3)
        a, r = params.a, params.r
        m2 = a * (r * (a * a - 1) + 1)
        assert any(abs(x - m2) < 1e-6 for x in targets)

    def test_boundary_limits_are_exact(self, doubling):
        lims = boundary_limits(doubling, 4)
        assert [d["kind"] for d in lims] == ["start"] * 3
        assert [d["cr"] for d in lims] == pytest.approx([5, 7, 8])

    def test_horizon_too_short(self, doubling):
        with pytest.raises(InsufficientHorizonError):
            empirical_cr(doubling, [100.0])

    def test_grid_targets(self):
        xs = grid_targets(doubling_params(), 3, per_round=10)
        assert len(xs) == 7 + 10 + 10
        assert max(xs) == 8.0 and min(xs) == -4.0

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_sup_below_limit(self, p):
        params = StrategyParams.optimal(p)
        traj = build_trajectory(params, 12)
        report = empirical_cr(traj, worst_case_targets(params, 11) + grid_targets(params, 11, 200))
        assert report.empirical_sup < report.analytic_limit
        assert report.boundary_sup < report.analytic_limit

    @pytest.mark.parametrize("p", [1, 3, 2, 4])
    def test_matches_closed_form_time(self, p):
        params = StrategyParams.optimal(p)
        traj = build_trajectory(params, 9)
        xs = np.array(grid_targets(params, 8, 97, first_round=1))
        times = exploration_times(traj, xs)
        expected = np.array([closed_form_time(params, float(x)) for x in xs])
        np.testing.assert_allclose(times, expected, rtol=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([1, 2, 3, 4]), st.floats(1.3, 3.0), st.floats(0.0, 1.0), st.floats(-60, 60))
    def test_vectorized_matches_replay(self, p, a, r, x):
        params = StrategyParams(p, Variant.ODD, a) if p % 2 else StrategyParams(p, Variant.EVEN, a, r)
        traj = build_trajectory(params, 12)
        fast = exploration_times(traj, [x])[0]
        slow = replay_exploration_time(traj, x)
        if slow is None:
            assert math.isinf(fast)
        else:
            assert fast == pytest.approx(slow, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("p", [3, 4])
    @pytest.mark.parametrize("eps", [0.5, 0.05])
    def test_practical_within_margin(self, p, eps):
        params = StrategyParams.optimal(p, eps)
        traj = build_trajectory(params, 9)
        report = empirical_cr(traj, worst_case_targets(params, 8) + grid_targets(params, 8, 300))
        assert report.empirical_sup <= params.c + eps + 1e-9
        assert report.boundary_sup <= params.c + eps + 1e-9

    def test_report_dict(self, doubling):
        d = empirical_cr(doubling, [2.5]).to_dict()
        assert set(d) == {"p", "variant", "cr_analytic", "cr_empirical", "cr_boundary_limit", "rounds", "targets"}
        assert d["targets"] == [{"x": 2.5, "T": 14.5, "cr": 14.5 / 2.5}]


class TestWitness:
    def test_doubling(self, doubling):
        w = extract_witness(doubling)
        assert w.x_seq[:6] == [1, -1, 2, -4, 8, -16]
        assert w.t_seq[:4] == [1, 5, 14, 32]
        w.validate()

    def test_even_endpoints(self, even2):
        w = extract_witness(even2)
        a = even2.params.a
        for i in range(w.horizon):
            assert abs(w.x(i)) == pytest.approx(a ** (i + 1), rel=1e-12)

    def test_horizon_truncates(self, doubling):
        assert extract_witness(doubling, horizon_time=14).horizon == 2

    def test_never_reaches_one(self):
        b = TrajectoryBuilder(1)
        b.move_to(-3.0, 0)
        with pytest.raises(InvalidTraceError):
            extract_witness(b.build())

    def test_ambiguous_side(self):
        # the opposite side starts growing before the first side has grown at all
        b = TrajectoryBuilder(1)
        b.move_to(1.0)
        b.move_to(-3.0, 0)
        with pytest.raises(InvalidTraceError):
            extract_witness(b.build())

    def test_validate_rejects(self):
        with pytest.raises(InvalidArgumentError):
            WitnessSequences([1, -1, -2], [1, 2]).validate()
        with pytest.raises(InvalidArgumentError):
            WitnessSequences([1, -1, 2], [3, 2]).validate()


def sample_traces():
    out = []
    for p in (1, 3):
        for a in (1.5, 2.0, 3.0):
            out.append(odd_search(p, a, 10))
        out.append(build_trajectory(StrategyParams.optimal(p), 10))
        out.append(practical_search(p, 0.1, 8))
    return out


class TestAudits:
    @pytest.mark.parametrize("traj", sample_traces(), ids=lambda t: f"p{t.p}-{t.params.variant.value}-a{t.params.a:.3f}")
    def test_pass_on_generated(self, traj):
        w = extract_witness(traj)
        assert audit_odd_lower_bound(w, traj.p).passed
        assert audit_min_growth(w, analytic_cr_limit(traj.params)).passed

    def test_doubling_tight(self, doubling):
        report = audit_odd_lower_bound(extract_witness(doubling), 1)
        assert [m for *_, m in report.rows] == pytest.approx([1.0] * len(report.rows))
        short = audit_odd_lower_bound(extract_witness(doubling), 1, constant_terms=False)
        assert [m for *_, m in short.rows] == pytest.approx([0.0] * len(short.rows), abs=1e-9)

    def test_short_form_fails_for_three_modes(self):
        traj = build_trajectory(StrategyParams.optimal(3), 10)
        assert not audit_odd_lower_bound(extract_witness(traj), 3, constant_terms=False).passed

    @pytest.mark.parametrize("k", [3, 5, 9])
    def test_shrunk_time_rejected(self, k):
        traj = build_trajectory(StrategyParams.optimal(3), 10)
        w = extract_witness(traj)
        t = list(w.t_seq)
        t[k] *= 0.9
        bad = WitnessSequences(w.x_seq, t)
        report = audit_odd_lower_bound(bad, 3)
        assert report.first_violation == k - 2

    def test_all_times_shrunk_rejected(self):
        for p in (1, 3):
            w = extract_witness(build_trajectory(StrategyParams.optimal(p), 10))
            bad = WitnessSequences(w.x_seq, [0.9 * t for t in w.t_seq])
            report = audit_odd_lower_bound(bad, p)
            assert not report.passed
            i = report.first_violation
            assert report.rows[i][3] < 0

    def test_min_growth_threshold(self, doubling):
        w = extract_witness(doubling)
        assert audit_min_growth(w, 9.0).passed
        report = audit_min_growth(w, 3.0)
        assert report.first_violation == 3

    def test_min_growth_infinite_claim(self, doubling):
        assert audit_min_growth(extract_witness(doubling), math.inf).passed

    def test_min_growth_needs_ratio_above_two(self, doubling):
        with pytest.raises(InvalidArgumentError):
            audit_min_growth(extract_witness(doubling), 2.0)

    def test_odd_audit_rejects_even(self, doubling):
        with pytest.raises(InvalidArgumentError):
            audit_odd_lower_bound(extract_witness(doubling), 2)


class TestRecurrence:
    def test_examples(self):
        assert recurrence_collapse(3, 9, 1, 1) == 2
        assert recurrence_collapse(3, 2, 1, 2) is None

    def test_collapse_below_threshold(self):
        rng = random.Random(7)
        for p in (1, 3, 5):
            a, b = odd_recurrence_coefficients(2.7, p)
            assert a * a - 4 * b < 0
            for _ in range(20):
                assert recurrence_collapse(a, b, rng.uniform(0.01, 100), rng.uniform(0.01, 100)) is not None

    @pytest.mark.parametrize("p", [1, 3, 5])
    def test_no_collapse_above_threshold(self, p):
        a, b = odd_recurrence_coefficients(math.sqrt(8) + 0.01, p)
        assert a * a - 4 * b >= 0
        assert recurrence_collapse(a, b, 1.0, a) is None

    def test_large_growth_rescaled(self):
        assert recurrence_collapse(1e6, 1.0, 1.0, 1e6, max_steps=100) is None

    def test_seed_validation(self):
        with pytest.raises(InvalidArgumentError):
            recurrence_collapse(3, 2, 0, 1)
        with pytest.raises(InvalidArgumentError):
            recurrence_collapse(-3, 2, 1, 1)
