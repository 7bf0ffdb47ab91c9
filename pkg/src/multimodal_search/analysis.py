"""Competitive-ratio evaluation, witness extraction and lower-bound audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coverage import (
    Trajectory,
    coverage_islands,
    exploration_time_limit,
    exploration_times,
)
from .errors import InsufficientHorizonError, InvalidArgumentError, InvalidTraceError
from .strategies import StrategyParams, cell_edges, compliant_plan, round_boundaries

DEFAULT_ETA = 1e-9
# relative slack when comparing trace times against necessary-condition bounds
AUDIT_RTOL = 1e-9


# --- closed forms -------------------------------------------------------------

def _round_constant(params: StrategyParams) -> float:
    p, a = params.p, params.a
    if params.variant.odd:
        return (p + 1) * (a * a - 1) + 2
    return 2 + (p + 2 * params.r) * (a * a - 1)


def round_duration(params: StrategyParams, i: int) -> float:
    """Duration of round ``i`` (identical for the practical variants)."""
    return params.a ** (i - 1) * _round_constant(params)


def cumulative_time(params: StrategyParams, i: int) -> float:
    """Time at which round ``i`` completes; ``-1`` gives 0."""
    a = params.a
    return (a ** (i + 1) - 1) / (a * (a - 1)) * _round_constant(params)


def even_phase_limits(p: int, a: float, r: float) -> tuple[float, float]:
    """Limiting worst ratios of the thorough phase and the single-cell phase."""
    g = a * a - 1
    phase1 = 1 + 2 / (a - 1) + (p + 2 * r) * (a + 1)
    phase2 = (a / (a - 1)) * p * g / (r * g + 1) + 2 * a / (a - 1) - 1
    return phase1, phase2


def analytic_cr_limit(params: StrategyParams) -> float:
    """Competitive ratio of the strategy as the number of rounds grows.

    Practical variants report the guaranteed ``c + eps`` bound.
    """
    p, a = params.p, params.a
    if params.variant.practical:
        return params.c + params.eps
    if params.variant.odd:
        return 1 + ((p + 1) * (a * a - 1) + 2) / (a - 1)
    phase1, phase2 = even_phase_limits(p, a, params.r)
    if params.r == 0:
        return phase2
    if params.r == 1:
        return phase1
    return max(phase1, phase2)


def even_phase_series(params: StrategyParams, rounds: int) -> tuple[list[float], list[float]]:
    """Per-round limiting ratios (rounds 1..rounds) of both even-strategy phases."""
    phase1, phase2 = [], []
    for i in range(1, rounds + 1):
        start, mid, _ = round_boundaries(params, i)
        phase1.append(1 + cumulative_time(params, i - 1) / abs(start))
        phase2.append(cumulative_time(params, i) / abs(mid) - 1)
    return phase1, phase2


def cr_convergence_series(params: StrategyParams, rounds: int) -> list[float]:
    """Per-round worst limiting ratio for rounds ``1..rounds``."""
    if rounds < 1:
        raise InvalidArgumentError("rounds must be >= 1")
    if params.variant.odd:
        return [1 + cumulative_time(params, i - 1) / params.a ** (i - 1) for i in range(1, rounds + 1)]
    phase1, phase2 = even_phase_series(params, rounds)
    if params.r == 0:
        return phase2
    if params.r == 1:
        return phase1
    return [max(u, v) for u, v in zip(phase1, phase2)]


def golden_section_minimize(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


# --- empirical evaluation -------------------------------------------------------

@dataclass(frozen=True)
class TargetResult:
    x: float
    T: float
    cr: float


@dataclass
class CrReport:
    params: StrategyParams | None
    targets: list[TargetResult]
    empirical_sup: float
    analytic_limit: float
    rounds_used: int
    boundary_sup: float | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.params.p if self.params else None,
            "variant": self.params.variant.value if self.params else None,
            "cr_analytic": self.analytic_limit,
            "cr_empirical": self.empirical_sup,
            "cr_boundary_limit": self.boundary_sup,
            "rounds": self.rounds_used,
            "targets": [{"x": t.x, "T": t.T, "cr": t.cr} for t in self.targets],
        }


def _round_count(traj: Trajectory) -> int:
    return sum(1 for seg in traj.segments if seg.x_end == 0.0)


def worst_case_targets(params: StrategyParams, rounds: int, eta: float = DEFAULT_ETA) -> list[float]:
    """Coordinates just past every point where a ratio supremum is approached.

    Odd strategies peak just beyond the start of each round; even strategies
    also just beyond the phase split ``m_i``.  Practical strategies peak just
    beyond the origin-side edge of every cell.  Only ``|x| >= 1`` is kept.
    """
    if rounds < 1:
        raise InvalidArgumentError("rounds must be >= 1")
    targets: list[float] = []
    for i in range(rounds):
        start, mid, end = round_boundaries(params, i)
        sign = math.copysign(1.0, start)
        offset = eta * abs(start)
        edges = [start]
        if params.variant.practical and mid != start:
            plan = compliant_plan(start, abs(mid - start), params.p, params.c, params.eps)
            edges += cell_edges(start, mid, plan)[:-1]
        if mid != end:
            edges.append(mid)
        for edge in edges:
            x = float(edge) + sign * offset
            if abs(x) >= 1 and x not in targets:
                targets.append(x)
    return targets


def grid_targets(params: StrategyParams, rounds: int, per_round: int = 1000, first_round: int = 0) -> list[float]:
    """Uniform safety-net grid over the stretch explored by rounds ``first_round..rounds-1``."""
    out: list[float] = []
    for i in range(first_round, rounds):
        start, _, end = round_boundaries(params, i)
        lo, hi = abs(start), abs(end)
        sign = math.copysign(1.0, start)
        for u in np.linspace(lo, hi, per_round + 1)[1:]:
            if u >= 1:
                out.append(sign * float(u))
    return out


def boundary_limits(traj: Trajectory, rounds: int | None = None) -> list[dict]:
    """Exact ``eta -> 0`` ratios at every critical edge, read off the trajectory.

    Uses the one-sided exploration-time limit, so no offset is involved.
    """
    params = traj.params
    if params is None:
        raise InvalidArgumentError("trajectory carries no strategy parameters")
    rounds = _round_count(traj) if rounds is None else rounds
    out = []
    for i in range(rounds):
        start, mid, end = round_boundaries(params, i)
        sign = 1 if start > 0 else -1
        edges = [("start", start)]
        if params.variant.practical and mid != start:
            plan = compliant_plan(start, abs(mid - start), params.p, params.c, params.eps)
            edges += [("cell", e) for e in cell_edges(start, mid, plan)[:-1]]
        if mid != end and mid != start:
            edges.append(("mid", mid))
        for kind, edge in edges:
            if abs(edge) < 1:
                continue
            T = exploration_time_limit(traj, edge, sign)
            if T is None:
                raise InsufficientHorizonError(edge)
            out.append({"round": i, "kind": kind, "x": edge, "T": T, "cr": T / abs(edge)})
    return out


def empirical_cr(traj: Trajectory, targets: Sequence[float], rounds: int | None = None) -> CrReport:
    xs = np.asarray(sorted(float(x) for x in targets))
    times = exploration_times(traj, xs)
    missing = np.flatnonzero(np.isinf(times))
    if missing.size:
        raise InsufficientHorizonError(float(xs[missing[0]]))
    absx = np.abs(xs)
    crs = np.where(absx < 1, 0.0, times / np.where(absx < 1, 1.0, absx))
    results = [TargetResult(float(x), float(t), float(c)) for x, t, c in zip(xs, times, crs)]
    params = traj.params
    limit = analytic_cr_limit(params) if params is not None else math.nan
    boundary = None
    if params is not None:
        lims = boundary_limits(traj)
        boundary = max((d["cr"] for d in lims), default=None)
    return CrReport(
        params,
        results,
        float(crs.max()) if crs.size else 0.0,
        limit,
        _round_count(traj) if rounds is None else rounds,
        boundary,
    )


# --- witness sequences and audits -------------------------------------------------

@dataclass
class WitnessSequences:
    """Island endpoints ``x_{-2}, x_{-1}, x_0, ...`` and period boundaries ``t_0, t_1, ...``."""

    x_seq: list[float]
    t_seq: list[float]

    @property
    def horizon(self) -> int:
        """Number of complete periods (``x_0 .. x_{horizon-1}`` are known)."""
        return len(self.x_seq) - 2

    def x(self, i: int) -> float:
        return self.x_seq[i + 2]

    def t(self, i: int) -> float:
        return self.t_seq[i]

    def prefix_abs(self, i: int) -> float:
        """Sum of ``|x_j|`` for ``j = 0..i`` (0 when ``i < 0``)."""
        return float(sum(abs(v) for v in self.x_seq[2:i + 3]))

    def validate(self) -> None:
        if len(self.x_seq) < 2 or self.x_seq[0] != 1 or self.x_seq[1] != -1:
            raise InvalidArgumentError("witness must start with x_{-2} = 1, x_{-1} = -1")
        if len(self.t_seq) != self.horizon + 1:
            raise InvalidArgumentError(
                f"witness has {self.horizon} periods but {len(self.t_seq)} times (expected {self.horizon + 1})"
            )
        for i in range(self.horizon):
            xi = self.x(i)
            if (xi > 0) != (i % 2 == 0):
                raise InvalidArgumentError(f"x_{i} = {xi} has the wrong sign")
            if not abs(xi) > abs(self.x(i - 2)):
                raise InvalidArgumentError(f"|x_{i}| does not exceed |x_{i - 2}|")
        if any(b <= a for a, b in zip(self.t_seq, self.t_seq[1:])):
            raise InvalidArgumentError("period boundaries must be strictly increasing")


def _first_reach(traj: Trajectory, target: float) -> float:
    for seg in traj.segments:
        if seg.x_end >= target > seg.x_start or seg.x_start == target:
            if seg.x_start == target:
                return seg.t_start
            return seg.t_start + (target - seg.x_start) / (seg.x_end - seg.x_start) * seg.duration
    raise InvalidTraceError(f"trajectory never reaches x={target}")


def extract_witness(traj: Trajectory, horizon_time: float | None = None) -> WitnessSequences:
    """Extract the period sequences of a trajectory up to ``horizon_time``.

    Period ``i`` grows the central island in direction ``(-1)**i``; it ends
    when the opposite endpoint first moves.  That instant is the one-sided
    exploration-time limit at the opposite endpoint, so it is found exactly
    without a time search.  Only complete periods are emitted.
    """
    horizon = traj.t_end if horizon_time is None else horizon_time
    if not 0 <= horizon <= traj.t_end:
        raise InvalidArgumentError(f"horizon {horizon} outside trajectory span")
    t_seq = [_first_reach(traj, 1.0)]
    if t_seq[0] > horizon:
        raise InvalidTraceError("trajectory does not reach x=1 within the horizon")
    x_seq = [1.0, -1.0]
    i = 0
    while True:
        side = i + 1
        edge = coverage_islands(traj, t_seq[i]).end(side)
        t_next = exploration_time_limit(traj, edge, 1 if side % 2 == 0 else -1)
        if t_next is None or t_next > horizon:
            break
        if not t_next > t_seq[i]:
            raise InvalidTraceError(
                f"period {i}: opposite side already growing at t={t_seq[i]}; side attribution is ambiguous"
            )
        xi = coverage_islands(traj, t_next).end(i)
        if not abs(xi) > abs(x_seq[i]):
            raise InvalidTraceError(
                f"period {i}: island did not grow in direction {(-1) ** i:+d} before t={t_next}; "
                "side attribution is ambiguous"
            )
        t_seq.append(t_next)
        x_seq.append(xi)
        i += 1
    return WitnessSequences(x_seq, t_seq)


@dataclass
class AuditReport:
    name: str
    # (index, observed, required, margin) per checked index
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)
    violations: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first_violation(self) -> int | None:
        return self.violations[0] if self.violations else None

    def to_dict(self) -> dict:
        return {
            "audit": self.name,
            "passed": self.passed,
            "violations": self.violations,
            "rows": [{"i": i, "observed": o, "required": r, "margin": m} for i, o, r, m in self.rows],
        }


def _check(report: AuditReport, i: int, observed: float, required: float) -> None:
    margin = observed - required
    report.rows.append((i, observed, required, margin))
    if margin < -AUDIT_RTOL * max(abs(required), 1.0):
        report.violations.append(i)


def audit_odd_lower_bound(w: WitnessSequences, p: int, constant_terms: bool = True) -> AuditReport:
    """Necessary time bound on ``t_{i+2}`` for odd ``p``.

    Productive time is ``p`` per unit of island beyond the free interval
    ``(-1, 1)``; each period ``j`` adds at least ``|x_j| + |x_{j-1}|`` of
    retreading.  Summed over periods ``0..i+1``::

        t_{i+2} >= (p+1)(|x_{i+1}| + |x_i|) + |x_i| + 2*sum_{j<i}|x_j| + 1 - 2p

    ``constant_terms=False`` drops the trailing ``1 - 2p``; that shorter form
    is only asymptotically valid and fails on optimal traces once ``p >= 3``.
    """
    if p < 1 or p % 2 == 0:
        raise InvalidArgumentError(f"odd p required, got {p}")
    w.validate()
    offset = (abs(w.x(-1)) - 2 * p) if constant_terms else 0.0
    report = AuditReport("odd-lower-bound")
    for i in range(w.horizon - 1):
        required = (p + 1) * (abs(w.x(i + 1)) + abs(w.x(i))) + abs(w.x(i)) + 2 * w.prefix_abs(i - 1) + offset
        _check(report, i, w.t(i + 2), required)
    return report


def audit_min_growth(w: WitnessSequences, claimed_cr: float) -> AuditReport:
    """Necessary growth ``|x_i| >= (2/c) (c/(c-2))**i`` for a ratio of at most ``c``."""
    if not claimed_cr > 2:
        raise InvalidArgumentError(f"claimed ratio must exceed 2, got {claimed_cr}")
    w.validate()
    c = claimed_cr
    report = AuditReport("min-growth")
    for i in range(w.horizon):
        required = 0.0 if math.isinf(c) else (2 / c) * (c / (c - 2)) ** i
        _check(report, i, abs(w.x(i)), required)
    return report


def odd_recurrence_coefficients(c: float, p: int) -> tuple[float, float]:
    """Coefficients of the prefix-sum recurrence when the odd ratio is ``2p+3+c*sqrt(p+1)``."""
    s = math.sqrt(p + 1)
    return c / s + 2, 2 / (p + 1) + c / s + 1


def recurrence_collapse(a_coef: float, b_coef: float, y0: float, y1: float, max_steps: int = 10_000) -> int | None:
    """Index of the first nonpositive term of ``y_{i+2} = a*y_{i+1} - b*y_i``.

    Returns ``None`` if the sequence stays positive for ``max_steps`` steps.
    The pair is rescaled as it grows; positivity is scale-invariant.
    """
    if not (a_coef > 0 and b_coef > 0):
        raise InvalidArgumentError("recurrence coefficients must be positive")
    if not (y0 > 0 and y1 > 0):
        raise InvalidArgumentError("seeds must be positive")
    prev, cur = float(y0), float(y1)
    for k in range(2, max_steps + 2):
        prev, cur = cur, a_coef * cur - b_coef * prev
        if cur <= 0:
            return k
        if cur > 1e100:
            prev, cur = prev / cur, 1.0
    return None
