"""Searcher trajectories and per-mode coverage of the line.

A trajectory is a time-ordered sequence of straight-line motion segments.
Each segment is annotated with what the searcher does while moving: search
in a single mode ``k``, search in all modes at once (the idealized thorough
sweep), or nothing (transit).  All coverage queries are answered with exact
segment arithmetic; there is no spatial grid.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence, Union

import numpy as np

from .errors import InvalidArgumentError, OutOfRangeError

ALL = "all"
NONE = "none"

Search = Union[int, str]

_ALL_CODE = -1
_NONE_CODE = -2

# relative slack for the speed checks on segments
_SPEED_RTOL = 1e-9


def thorough_factor(p: int) -> int:
    """Time spent per unit length when sweeping all modes at once.

    Odd ``p`` sweeps at speed ``1/p``; even ``p`` at ``1/(p+1)``.
    """
    return p if p % 2 == 1 else p + 1


def _ulp_slack(*values: float) -> float:
    # durations and spans are differences of stored endpoints; allow for their rounding
    return 4 * sum(math.ulp(v) for v in values)


def _search_code(search: Search) -> int:
    if search == ALL:
        return _ALL_CODE
    if search == NONE:
        return _NONE_CODE
    return int(search)


@dataclass(frozen=True)
class MotionSegment:
    t_start: float
    t_end: float
    x_start: float
    x_end: float
    search: Search

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise InvalidArgumentError(f"segment must have t_end > t_start, got [{self.t_start}, {self.t_end}]")
        if self.t_start < 0:
            raise InvalidArgumentError("segment starts before t=0")
        s = self.search
        if isinstance(s, str):
            if s not in (ALL, NONE):
                raise InvalidArgumentError(f"unknown search annotation {s!r}")
        elif isinstance(s, bool) or not isinstance(s, (int, np.integer)) or s < 0:
            raise InvalidArgumentError(f"search mode must be a non-negative integer, 'all' or 'none', got {s!r}")
        dx = abs(self.x_end - self.x_start)
        slack = _ulp_slack(self.t_end, self.x_start, self.x_end)
        if dx > self.duration * (1 + _SPEED_RTOL) + slack:
            raise InvalidArgumentError(f"segment exceeds unit speed: |dx|={dx}, dt={self.duration}")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def lo(self) -> float:
        return min(self.x_start, self.x_end)

    @property
    def hi(self) -> float:
        return max(self.x_start, self.x_end)

    def position_at(self, t: float) -> float:
        if t >= self.t_end:
            return self.x_end
        if t <= self.t_start:
            return self.x_start
        frac = (t - self.t_start) / self.duration
        return self.x_start + frac * (self.x_end - self.x_start)


@dataclass(frozen=True)
class Trajectory:
    """Immutable piecewise-linear searcher trajectory with ``p`` modes.

    ``params`` optionally records the strategy parameters the trajectory was
    built from; it takes no part in equality.
    """

    p: int
    segments: tuple[MotionSegment, ...]
    params: Any = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.p < 1:
            raise InvalidArgumentError(f"mode count must be positive, got {self.p}")
        if not self.segments:
            raise InvalidArgumentError("trajectory has no segments")
        object.__setattr__(self, "segments", tuple(self.segments))
        factor = thorough_factor(self.p)
        prev_t, prev_x = 0.0, 0.0
        for i, seg in enumerate(self.segments):
            if seg.t_start != prev_t or seg.x_start != prev_x:
                raise InvalidArgumentError(
                    f"segment {i} is not contiguous: starts at (t={seg.t_start}, x={seg.x_start}), "
                    f"expected (t={prev_t}, x={prev_x})"
                )
            dx = abs(seg.x_end - seg.x_start)
            expected = dx * factor if seg.search == ALL else dx
            slack = _ulp_slack(seg.t_end) + (factor if seg.search == ALL else 1) * _ulp_slack(seg.x_start, seg.x_end)
            if not math.isclose(seg.duration, expected, rel_tol=_SPEED_RTOL, abs_tol=slack + 1e-12):
                raise InvalidArgumentError(
                    f"segment {i} ({seg.search}) has duration {seg.duration}, expected {expected}"
                )
            if not isinstance(seg.search, str) and seg.search >= self.p:
                raise InvalidArgumentError(f"segment {i} uses mode {seg.search} but p={self.p}")
            prev_t, prev_x = seg.t_end, seg.x_end

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def __len__(self) -> int:
        return len(self.segments)

    @cached_property
    def _arrays(self) -> dict[str, np.ndarray]:
        t0 = np.array([s.t_start for s in self.segments])
        t1 = np.array([s.t_end for s in self.segments])
        x0 = np.array([s.x_start for s in self.segments])
        x1 = np.array([s.x_end for s in self.segments])
        code = np.array([_search_code(s.search) for s in self.segments])
        return {"t0": t0, "t1": t1, "x0": x0, "x1": x1, "code": code}

    @cached_property
    def _ends(self) -> list[float]:
        return [s.t_end for s in self.segments]

    def _mode_arrays(self, k: int) -> tuple[np.ndarray, ...]:
        cache = self.__dict__.setdefault("_mode_cache", {})
        if k not in cache:
            arr = self._arrays
            sel = (arr["code"] == k) | (arr["code"] == _ALL_CODE)
            t0, t1, x0, x1 = arr["t0"][sel], arr["t1"][sel], arr["x0"][sel], arr["x1"][sel]
            lo, hi = np.minimum(x0, x1), np.maximum(x0, x1)
            # every covering segment moves, so x1 != x0
            rate = (t1 - t0) / (x1 - x0)
            cache[k] = (lo, hi, t0, x0, rate)
        return cache[k]


class TrajectoryBuilder:
    """Mutable accumulator used by the strategy builders."""

    def __init__(self, p: int) -> None:
        if p < 1:
            raise InvalidArgumentError(f"mode count must be positive, got {p}")
        self.p = p
        self.time = 0.0
        self.position = 0.0
        self._segments: list[MotionSegment] = []

    def move_to(self, x: float, search: Search = NONE, slowdown: float = 1.0) -> None:
        """Move to ``x``, spending ``slowdown`` time per unit length."""
        dx = abs(x - self.position)
        if dx == 0:
            return
        t_end = self.time + dx * slowdown
        self._segments.append(MotionSegment(self.time, t_end, self.position, x, search))
        self.time = t_end
        self.position = x

    @property
    def segments(self) -> list[MotionSegment]:
        return list(self._segments)

    def __len__(self) -> int:
        return len(self._segments)

    def build(self, params: Any = None) -> Trajectory:
        return Trajectory(self.p, tuple(self._segments), params)


@dataclass(frozen=True)
class IslandSnapshot:
    t: float
    neg_end: float
    pos_end: float
    islands: tuple[tuple[float, float], ...]

    @property
    def central(self) -> tuple[float, float]:
        return (self.neg_end, self.pos_end)

    def end(self, side: int) -> float:
        """Signed island endpoint on side ``side`` (even: positive, odd: negative)."""
        return self.pos_end if side % 2 == 0 else self.neg_end


def _check_time(traj: Trajectory, t: float) -> None:
    if not 0 <= t <= traj.t_end:
        raise OutOfRangeError(f"t={t} outside trajectory span [0, {traj.t_end}]")


def position_at(traj: Trajectory, t: float) -> float:
    _check_time(traj, t)
    i = bisect.bisect_left(traj._ends, t)
    return traj.segments[min(i, len(traj.segments) - 1)].position_at(t)


def _check_mode(traj: Trajectory, k: int) -> None:
    if not 0 <= k < traj.p:
        raise InvalidArgumentError(f"mode {k} outside 0..{traj.p - 1}")


def _first_cover(traj: Trajectory, xs: np.ndarray, k: int, chunk: int = 512) -> np.ndarray:
    lo, hi, t0, x0, rate = traj._mode_arrays(k)
    out = np.full(xs.shape, np.inf)
    if lo.size == 0:
        return out
    for start in range(0, xs.size, chunk):
        x = xs[start:start + chunk, None]
        inside = (lo <= x) & (x <= hi)
        times = np.where(inside, t0 + (x - x0) * rate, np.inf)
        out[start:start + chunk] = times.min(axis=1)
    return out


def mode_cover_time(traj: Trajectory, x: float, k: int) -> float | None:
    """Earliest time mode ``k`` (or an all-modes sweep) passes through ``x``."""
    _check_mode(traj, k)
    t = float(_first_cover(traj, np.array([float(x)]), k)[0])
    return None if math.isinf(t) else t


def exploration_times(traj: Trajectory, xs: Iterable[float]) -> np.ndarray:
    """Vectorized exploration time; ``inf`` marks targets never explored."""
    xs = np.asarray(list(xs) if not isinstance(xs, np.ndarray) else xs, dtype=float)
    result = np.zeros(xs.shape)
    for k in range(traj.p):
        result = np.maximum(result, _first_cover(traj, xs, k))
    result[np.abs(xs) < 1] = 0.0
    return result


def exploration_time(traj: Trajectory, x: float) -> float | None:
    if abs(x) < 1:
        return 0.0
    t = float(exploration_times(traj, np.array([float(x)]))[0])
    return None if math.isinf(t) else t


def exploration_time_limit(traj: Trajectory, x: float, direction: int) -> float | None:
    """One-sided limit of the exploration time as targets approach ``x``.

    ``direction=+1`` approaches from above, ``-1`` from below.  This is the
    time the searcher finishes points arbitrarily close to ``x`` on that side,
    i.e. the value a critical target ``x + direction*eta`` tends to as
    ``eta -> 0``.
    """
    if direction not in (1, -1):
        raise InvalidArgumentError("direction must be +1 or -1")
    if (direction == 1 and -1 <= x < 1) or (direction == -1 and -1 < x <= 1):
        return 0.0
    worst = 0.0
    for k in range(traj.p):
        lo, hi, t0, x0, rate = traj._mode_arrays(k)
        sel = (lo <= x) & (x < hi) if direction == 1 else (lo < x) & (x <= hi)
        if not sel.any():
            return None
        worst = max(worst, float(np.min(t0[sel] + (x - x0[sel]) * rate[sel])))
    return worst


def _merge(intervals: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def _intersect(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def coverage_islands(traj: Trajectory, t: float) -> IslandSnapshot:
    """All maximal fully-explored intervals at time ``t``.

    Intervals are reported closed; ``(-1, 1)`` counts as explored.
    """
    _check_time(traj, t)
    per_mode: list[list[tuple[float, float]]] = [[] for _ in range(traj.p)]
    for seg in traj.segments:
        if seg.t_start > t:
            break
        if seg.search == NONE:
            continue
        end = seg.position_at(t)
        span = (min(seg.x_start, end), max(seg.x_start, end))
        if seg.search == ALL:
            for spans in per_mode:
                spans.append(span)
        else:
            per_mode[seg.search].append(span)
    explored = _merge(per_mode[0])
    for spans in per_mode[1:]:
        explored = _intersect(explored, _merge(spans))
    islands = _merge(explored + [(-1.0, 1.0)])
    central = next(iv for iv in islands if iv[0] <= 0 <= iv[1])
    return IslandSnapshot(t, central[0], central[1], tuple(islands))
