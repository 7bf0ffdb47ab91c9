"""Trajectory builders for the cell, thorough and round-based search strategies.

The primitive procedures (``cell_search``, ``discrete_thorough_search``,
``thorough_search``, ``compliant_thorough_search``) extend a
:class:`~multimodal_search.coverage.TrajectoryBuilder` in place, starting
from the builder's current position.  The round-based strategies are
infinite in principle; they are generated up to ``round_limit`` rounds.

Round ``i`` explores the stretch from ``a**(i-1)`` to ``a**(i+1)`` in
direction ``(-1)**i``.  Boundaries are computed once per round so that the
end of round ``i`` and the start of round ``i + 2`` are bit-identical, which
keeps explored intervals exactly contiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .coverage import ALL, Trajectory, TrajectoryBuilder, thorough_factor
from .errors import InvalidArgumentError
from . import solver

# a remainder below this fraction of the interval does not open a new cell
_CELL_RTOL = 1e-12


class Variant(str, Enum):
    ODD = "odd-optimal"
    EVEN = "even-optimal"
    PRACTICAL_ODD = "practical-odd"
    PRACTICAL_EVEN = "practical-even"

    @property
    def practical(self) -> bool:
        return self in (Variant.PRACTICAL_ODD, Variant.PRACTICAL_EVEN)

    @property
    def odd(self) -> bool:
        return self in (Variant.ODD, Variant.PRACTICAL_ODD)


@dataclass(frozen=True)
class StrategyParams:
    p: int
    variant: Variant
    a: float
    r: float | None = None
    eps: float | None = None
    c: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.p < 1:
            raise InvalidArgumentError(f"mode count must be positive, got {self.p}")
        if self.variant.odd != (self.p % 2 == 1):
            raise InvalidArgumentError(f"variant {self.variant.value} does not accept p={self.p}")
        if not self.a > 1:
            raise InvalidArgumentError(f"growth factor must exceed 1, got {self.a}")
        if not self.variant.odd:
            if self.r is None or not 0 <= self.r <= 1:
                raise InvalidArgumentError(f"split coefficient must lie in [0, 1], got {self.r}")
        if self.variant.practical:
            if self.eps is None or not self.eps > 0:
                raise InvalidArgumentError(f"eps must be positive, got {self.eps}")
            if self.c is None:
                raise InvalidArgumentError("practical variants need the target ratio c")

    @classmethod
    def optimal(cls, p: int, eps: float | None = None) -> StrategyParams:
        """Optimal parameters for ``p`` modes; practical variant when ``eps`` is given."""
        opt = solver.optimal(p)
        r = getattr(opt, "r", None)
        if eps is None:
            return cls(p, Variant.ODD if p % 2 else Variant.EVEN, opt.a, r)
        return cls(p, Variant.PRACTICAL_ODD if p % 2 else Variant.PRACTICAL_EVEN, opt.a, r, eps, opt.cr)

    def to_dict(self) -> dict:
        d = {"p": self.p, "variant": self.variant.value, "a": self.a}
        for key in ("r", "eps", "c"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> StrategyParams:
        return cls(int(d["p"]), Variant(d["variant"]), float(d["a"]), d.get("r"), d.get("eps"), d.get("c"))


@dataclass(frozen=True)
class CompliantPlan:
    x_init: float
    delta: float
    p_prime: int
    first_width: float
    ratio: float
    widths: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.widths)


def _sign(x: float) -> float:
    if x == 0:
        raise InvalidArgumentError("x_init must be nonzero (direction is taken from its sign)")
    return math.copysign(1.0, x)


def _check_start(builder: TrajectoryBuilder, x_init: float, delta: float) -> float:
    if not delta > 0:
        raise InvalidArgumentError(f"delta must be positive, got {delta}")
    if builder.position != x_init:
        raise InvalidArgumentError(f"searcher is at {builder.position}, not at x_init={x_init}")
    return _sign(x_init)


def _cell_to(builder: TrajectoryBuilder, far: float) -> None:
    near = builder.position
    for mode in range(builder.p):
        builder.move_to(far if mode % 2 == 0 else near, mode)


def _sweep_to(builder: TrajectoryBuilder, end: float) -> None:
    builder.move_to(end, ALL, slowdown=thorough_factor(builder.p))


def cell_search(builder: TrajectoryBuilder, x_init: float, delta: float) -> TrajectoryBuilder:
    """Explore ``delta`` beyond ``x_init`` with ``p`` alternating single-mode passes."""
    sign = _check_start(builder, x_init, delta)
    _cell_to(builder, x_init + delta * sign)
    return builder


def discrete_thorough_search(
    builder: TrajectoryBuilder, x_init: float, delta: float, s: float
) -> TrajectoryBuilder:
    """Explore ``delta`` beyond ``x_init`` as consecutive cells of width ``s``."""
    sign = _check_start(builder, x_init, delta)
    if not s > 0:
        raise InvalidArgumentError(f"cell size must be positive, got {s}")
    x = 0.0
    while x < delta:
        step = min(s, delta - x)
        far = builder.position + step * sign
        _cell_to(builder, far)
        if builder.p % 2 == 0:
            builder.move_to(far)
        x += step
    return builder


def thorough_search(builder: TrajectoryBuilder, x_init: float, delta: float) -> TrajectoryBuilder:
    """Idealized sweep of all modes at once at the reduced speed."""
    sign = _check_start(builder, x_init, delta)
    _sweep_to(builder, x_init + delta * sign)
    return builder


def compliant_plan(x_init: float, delta: float, p: int, c: float, eps: float) -> CompliantPlan:
    """Geometric cell partition used by the compliant sweep.

    Cell widths start at ``eps*|x_init|/(p'-1)`` and grow by
    ``(c+eps-1)/(p'-1)``; the last cell is clipped to the interval.  With
    ``p == 1`` a single cell spans the whole interval.
    """
    _sign(x_init)
    if not delta > 0 or not eps > 0:
        raise InvalidArgumentError("delta and eps must be positive")
    pp = thorough_factor(p)
    if pp == 1:
        return CompliantPlan(x_init, delta, pp, delta, math.inf, (delta,))
    if c + eps <= pp:
        raise InvalidArgumentError(f"c + eps = {c + eps} must exceed p' = {pp}")
    first = eps * abs(x_init) / (pp - 1)
    ratio = (c + eps - 1) / (pp - 1)
    widths = []
    x, s = 0.0, first
    while delta - x > _CELL_RTOL * delta:
        step = min(s, delta - x)
        widths.append(step)
        x += step
        s *= ratio
    return CompliantPlan(x_init, delta, pp, first, ratio, tuple(widths))


def cell_edges(start: float, end: float, plan: CompliantPlan) -> list[float]:
    """Far edge of every planned cell, walking from ``start`` toward ``end``."""
    sign = _sign(start)
    edges = []
    offset = 0.0
    for width in plan.widths[:-1]:
        offset += width
        edges.append(start + offset * sign)
    edges.append(end)
    return edges


def _compliant_to(builder: TrajectoryBuilder, end: float, c: float, eps: float) -> CompliantPlan:
    start = builder.position
    plan = compliant_plan(start, abs(end - start), builder.p, c, eps)
    for far in cell_edges(start, end, plan):
        _cell_to(builder, far)
        if builder.p % 2 == 0:
            builder.move_to(far)
    return plan


def compliant_thorough_search(
    builder: TrajectoryBuilder, x_init: float, delta: float, c: float, eps: float
) -> CompliantPlan:
    """Finite-cell replacement for :func:`thorough_search`; returns the plan it executed."""
    sign = _check_start(builder, x_init, delta)
    return _compliant_to(builder, x_init + delta * sign, c, eps)


RoundBody = Callable[[TrajectoryBuilder, int, float, float], None]


def _rounds(params: StrategyParams, round_limit: int, body: RoundBody) -> Trajectory:
    if round_limit < 1:
        raise InvalidArgumentError(f"round_limit must be >= 1, got {round_limit}")
    builder = TrajectoryBuilder(params.p)
    a = params.a
    for i in range(round_limit):
        sign = -1.0 if i % 2 else 1.0
        start = sign * a ** (i - 1)
        end = sign * a ** (i + 1)
        builder.move_to(start)
        body(builder, i, start, end)
        builder.move_to(0.0)
    return builder.build(params)


def _mid(params: StrategyParams, start: float, end: float) -> float:
    r = params.r
    return (1 - r) * start + r * end


def _even_body(params: StrategyParams, compliant: bool) -> RoundBody:
    def body(builder: TrajectoryBuilder, i: int, start: float, end: float) -> None:
        mid = _mid(params, start, end)
        if mid != start:
            if compliant:
                _compliant_to(builder, mid, params.c, params.eps)
            else:
                _sweep_to(builder, mid)
        if mid != end:
            _cell_to(builder, end)

    return body


def odd_search(p: int, a: float, round_limit: int) -> Trajectory:
    params = StrategyParams(p, Variant.ODD, a)
    return _rounds(params, round_limit, lambda b, i, start, end: _sweep_to(b, end))


def even_search(p: int, a: float, r: float, round_limit: int) -> Trajectory:
    params = StrategyParams(p, Variant.EVEN, a, r)
    return _rounds(params, round_limit, _even_body(params, compliant=False))


def practical_search(p: int, eps: float, round_limit: int) -> Trajectory:
    """Optimal strategy with every thorough sweep replaced by its compliant version."""
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps}")
    return build_trajectory(StrategyParams.optimal(p, eps), round_limit)


def build_trajectory(params: StrategyParams, round_limit: int) -> Trajectory:
    v = params.variant
    if v is Variant.ODD:
        return _rounds(params, round_limit, lambda b, i, start, end: _sweep_to(b, end))
    if v is Variant.EVEN:
        return _rounds(params, round_limit, _even_body(params, compliant=False))
    if v is Variant.PRACTICAL_ODD:
        return _rounds(params, round_limit, lambda b, i, start, end: _compliant_to(b, end, params.c, params.eps))
    return _rounds(params, round_limit, _even_body(params, compliant=True))


def round_boundaries(params: StrategyParams, i: int) -> tuple[float, float, float]:
    """Signed (start, mid, end) of round ``i``; ``mid == end`` for odd variants."""
    sign = -1.0 if i % 2 else 1.0
    start = sign * params.a ** (i - 1)
    end = sign * params.a ** (i + 1)
    mid = end if params.variant.odd else _mid(params, start, end)
    return start, mid, end


def practical_round_plans(params: StrategyParams, round_limit: int) -> list[CompliantPlan]:
    """The compliant plan executed in each round of a practical strategy."""
    if not params.variant.practical:
        raise InvalidArgumentError("plans exist only for practical variants")
    plans = []
    for i in range(round_limit):
        start, mid, _ = round_boundaries(params, i)
        if mid != start:
            plans.append(compliant_plan(start, abs(mid - start), params.p, params.c, params.eps))
    return plans
