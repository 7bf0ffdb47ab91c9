import math

import pytest

from multimodal_search.coverage import ALL, NONE, Trajectory
from multimodal_search.strategies import StrategyParams, build_trajectory, odd_search


def replay_cover_time(traj: Trajectory, x: float, k: int) -> float | None:
    """Pure-Python oracle: first pass through ``x`` in mode ``k`` (or all modes)."""
    for seg in traj.segments:
        if seg.search == NONE or (seg.search != ALL and seg.search != k):
            continue
        lo, hi = min(seg.x_start, seg.x_end), max(seg.x_start, seg.x_end)
        if lo <= x <= hi:
            frac = (x - seg.x_start) / (seg.x_end - seg.x_start)
            return seg.t_start + frac * (seg.t_end - seg.t_start)
    return None


def replay_exploration_time(traj: Trajectory, x: float) -> float | None:
    if abs(x) < 1:
        return 0.0
    times = [replay_cover_time(traj, x, k) for k in range(traj.p)]
    return None if any(t is None for t in times) else max(times)


def closed_form_time(params: StrategyParams, x: float) -> float:
    """Hand-derived exploration time of ``x`` for the idealized round strategies.

    Odd: ``T_{i-1} + a^{i-1}(1 + p u)`` for ``|x| = a^{i-1}(1+u)``.
    Even phase 1: ``T_{i-1} + a^{i-1}(1 + (p+1) u)``; phase 2: ``T_i - |x|``.
    """
    p, a = params.p, params.a
    g = a * a - 1
    k = (p + 1) * g + 2 if params.variant.odd else 2 + (p + 2 * params.r) * g

    def T(i):
        return (a ** (i + 1) - 1) / (a * (a - 1)) * k

    ax = abs(x)
    # round exploring |x|: a^(i-1) < |x| <= a^(i+1) with parity matching the sign
    i = 0 if x > 0 else 1
    while not ax <= a ** (i + 1):
        i += 2
    base = a ** (i - 1)
    u = ax / base - 1
    if params.variant.odd:
        return T(i - 1) + base * (1 + p * u)
    m = base * (params.r * g + 1)
    if ax <= m:
        return T(i - 1) + base * (1 + (p + 1) * u)
    return T(i) - ax


@pytest.fixture(scope="session")
def doubling():
    """Classic doubling strategy: p = 1, a = 2, six rounds."""
    return odd_search(1, 2.0, 6)


@pytest.fixture(scope="session")
def even2():
    params = StrategyParams.optimal(2)
    return build_trajectory(params, 10)


def rel_close(a, b, rtol):
    return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS.values():
            terminalreporter.write_line(line)
