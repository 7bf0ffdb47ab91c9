"""Optimal strategy parameters and the closed-form counts around them.

Odd mode counts have closed-form optima.  For even ``p`` the optimal ratio
``c*`` is the unique root of

    D_p(c) = (c - 1)^4 - 4 p (c + 1)^2 (c - p - 1)

above ``2p + 1 + sqrt(8p)``, which is bracketed by
``[2p + 3 + sqrt(8(p-1)), 2p + 3 + sqrt(8p)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .coverage import thorough_factor
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class OptimalOdd:
    p: int
    a: float
    cr: float


@dataclass(frozen=True)
class OptimalEven:
    p: int
    c_star: float
    a: float
    r: float
    bracket: tuple[float, float]

    @property
    def cr(self) -> float:
        return self.c_star


@dataclass
class SignChangeReport:
    p: int
    grid_step: float
    start: float
    stop: float
    # (c_left, c_right) pairs bracketing each sign change
    rising: list[tuple[float, float]] = field(default_factory=list)
    falling: list[tuple[float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.rising) == 1 and not self.falling

    @property
    def transition(self) -> float | None:
        if len(self.rising) != 1:
            return None
        lo, hi = self.rising[0]
        return 0.5 * (lo + hi)


def _require_even(p: int) -> None:
    if p < 2 or p % 2:
        raise InvalidArgumentError(f"even mode count >= 2 required, got p={p}")


def _require_odd(p: int) -> None:
    if p < 1 or p % 2 == 0:
        raise InvalidArgumentError(f"odd mode count >= 1 required, got p={p}")


def discriminant_poly(p, c):
    """Evaluate D_p(c) in factored form.  Integer inputs give exact integers."""
    return (c - 1) ** 4 - 4 * p * (c + 1) ** 2 * (c - p - 1)


def discriminant_poly_expanded(p, c):
    return (
        c**4
        - 4 * (p + 1) * c**3
        + (4 * p * (p - 1) + 6) * c**2
        + 4 * (2 * p - 1) * (p + 1) * c
        + (2 * p + 1) ** 2
    )


def even_bracket(p: int) -> tuple[float, float]:
    _require_even(p)
    return (2 * p + 3 + math.sqrt(8 * (p - 1)), 2 * p + 3 + math.sqrt(8 * p))


def lower_bound_floor(p: int) -> float:
    """Coarse floor on the achievable ratio: the odd optimum at ``p`` or ``p - 1`` modes."""
    if p < 1:
        raise InvalidArgumentError(f"mode count must be positive, got {p}")
    if p % 2:
        return 2 * p + 3 + math.sqrt(8 * (p + 1))
    return 2 * p + 1 + math.sqrt(8 * p)


def sign_change_audit(p: int, grid_step: float = 1e-3) -> SignChangeReport:
    """Scan D_p from the coarse floor past the upper bracket, counting sign changes."""
    _require_even(p)
    if grid_step <= 0:
        raise InvalidArgumentError("grid_step must be positive")
    start = lower_bound_floor(p)
    stop = even_bracket(p)[1] + 10.0
    report = SignChangeReport(p, grid_step, start, stop)
    n = int(math.ceil((stop - start) / grid_step))
    prev_c = start
    prev = discriminant_poly(p, start)
    for i in range(1, n + 1):
        c = min(start + i * grid_step, stop)
        val = discriminant_poly(p, c)
        if prev < 0 <= val:
            report.rising.append((prev_c, c))
        elif prev >= 0 > val:
            report.falling.append((prev_c, c))
        prev_c, prev = c, val
    return report


def odd_optimal(p: int) -> OptimalOdd:
    _require_odd(p)
    return OptimalOdd(p, 1 + math.sqrt(2 / (p + 1)), 2 * p + 3 + math.sqrt(8 * (p + 1)))


def even_split(p: int, a: float) -> float:
    """Split coefficient that equalizes the two phase ratios for growth factor ``a``.

    Positive root of ``2(a^2-1) r^2 + (p(a^2-1)+2) r + p(1-a) = 0``.
    """
    g = a * a - 1
    return (math.sqrt((p * g + 2) ** 2 + 8 * p * g * (a - 1)) - 2) / (4 * g) - p / 4


def even_growth(p: int, c: float) -> float:
    return (c - 1) ** 2 / (2 * p * (c + 1))


def _bisect_root(p: int, lo: float, hi: float, tol: float) -> float:
    f_lo = discriminant_poly(p, lo)
    if f_lo > 0 or discriminant_poly(p, hi) < 0:
        raise ArithmeticError(f"D_{p} does not change sign on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if discriminant_poly(p, mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def even_optimal(p: int, tol: float = 1e-12) -> OptimalEven:
    _require_even(p)
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    bracket = even_bracket(p)
    c = _bisect_root(p, *bracket, tol)
    a = even_growth(p, c)
    r = even_split(p, a)
    if not 0 <= r <= 1:
        raise ArithmeticError(f"split coefficient {r} outside [0, 1] for p={p}")
    return OptimalEven(p, c, a, r, bracket)


def optimal(p: int, tol: float = 1e-12) -> OptimalOdd | OptimalEven:
    return odd_optimal(p) if p % 2 else even_optimal(p, tol)


def optimal_cr(p: int) -> float:
    return optimal(p).cr


def round_half_away(value: float, places: int = 5) -> Decimal:
    quantum = Decimal(1).scaleb(-places)
    d = Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP)
    return d


def compliant_cell_count(p: int, c: float, eps: float, x_init_abs: float, delta: float) -> int:
    """Number of cells the compliant sweep uses, from the closed-form ceiling."""
    if eps <= 0 or delta <= 0 or x_init_abs <= 0:
        raise InvalidArgumentError("eps, delta and |x_init| must be positive")
    pp = thorough_factor(p)
    if pp == 1:
        return 1
    if c + eps <= pp:
        raise InvalidArgumentError(f"c + eps = {c + eps} must exceed p' = {pp}")
    growth = math.log((c + eps - 1) / (pp - 1))
    return max(1, math.ceil(math.log1p((c + eps - pp) * delta / (eps * x_init_abs)) / growth))


def odd_cells_bound(p: int, eps: float) -> int:
    """Per-round cell-count ceiling for the odd practical strategy (p >= 3)."""
    return math.ceil(math.log(4 + 18 * p / eps) / math.log(2))


def even_cells_bound(p: int, eps: float) -> int:
    return math.ceil(math.log(81 + 400 * p / eps) / math.log(2))
