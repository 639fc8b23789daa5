"""Threshold schedules, critical intervals, and certified contraction maps.

The geometric picture: each Gaussian component owns, per dimension, the
interval where its (optionally peak-normalized) density clears a threshold
alpha. Raising alpha shrinks the interval; intersecting consecutive
intervals yields an affine contraction whose ratio K is the length
quotient, and iterating that contraction converges to a unique fixed
point (Banach), which the driver reports as the cluster center coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DisjointIntervals, NotAContraction, BanachNonConvergence, ScheduleExhausted

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Minimum interval length for a ball to fit inside (interior condition).
INTERIOR_TOL = 1e-12

ALPHA_MODES = ("density", "normalized")
HMAP_MODES = ("paper_literal", "anchored")
SCHEDULE_MODES = ("additive", "geometric")


@dataclass(frozen=True)
class AlphaSchedule:
    """Strictly increasing threshold sequence bounded by ``cap``.

    ``additive`` steps by a fixed delta and signals exhaustion at the cap;
    ``geometric`` closes a fixed fraction delta of the remaining gap each
    step, so it increases strictly, never reaches the cap, and converges to
    it — the three clauses the threshold sequence must satisfy.
    """

    mode: str
    delta: float
    cap: float
    current: float = 0.0
    step_index: int = 0

    def __post_init__(self):
        if self.mode not in SCHEDULE_MODES:
            raise ValueError(f"mode must be one of {SCHEDULE_MODES}")
        if not self.delta > 0.0:
            raise ValueError("delta must be > 0")
        if self.mode == "geometric" and not self.delta < 1.0:
            raise ValueError("geometric mode needs delta in (0, 1)")
        if not self.cap > 0.0:
            raise ValueError("cap must be > 0")
        if not 0.0 <= self.current < self.cap:
            raise ValueError("current must lie in [0, cap)")
        if self.step_index == 0 and self.current != 0.0:
            raise ValueError("sequence must start at 0")

    def retarget_cap(self, new_cap: float) -> "AlphaSchedule":
        """Move the bound (density mode recomputes it as peaks evolve).

        Raises ScheduleExhausted when the current value already meets the
        new bound, since no further strict increase below it is possible.
        """
        if self.current >= new_cap:
            raise ScheduleExhausted(
                f"current alpha {self.current!r} already at or above new cap {new_cap!r}")
        return replace(self, cap=new_cap)


def next_alpha(schedule: AlphaSchedule) -> AlphaSchedule:
    """Advance the schedule one step.

    Additive mode raises ScheduleExhausted rather than clamping when the
    next value would reach the cap (clamping would break strict increase).
    """
    if schedule.mode == "additive":
        nxt = schedule.current + schedule.delta
        if nxt >= schedule.cap:
            raise ScheduleExhausted(
                f"additive step to {nxt!r} would reach cap {schedule.cap!r}")
    else:
        nxt = schedule.cap - (schedule.cap - schedule.current) * (1.0 - schedule.delta)
        if not nxt > schedule.current:
            # Remaining gap below float resolution; cannot increase strictly.
            raise ScheduleExhausted("geometric step no longer increases alpha")
    return replace(schedule, current=nxt, step_index=schedule.step_index + 1)


@dataclass(frozen=True)
class CriticalInterval:
    """Superlevel interval of one component in one dimension at one alpha."""

    lower: float
    upper: float
    component: int = 0
    dimension: int = 0
    alpha: float = 0.0
    empty: bool = False

    def __post_init__(self):
        if not self.empty and not self.lower <= self.upper:
            raise ValueError(f"lower {self.lower!r} must not exceed upper {self.upper!r}")

    @classmethod
    def empty_at(cls, component: int, dimension: int, alpha: float) -> "CriticalInterval":
        return cls(math.nan, math.nan, component, dimension, alpha, empty=True)

    @property
    def length(self) -> float:
        return 0.0 if self.empty else self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return (not self.empty) and (self.lower - tol <= x <= self.upper + tol)


def intersect(a: CriticalInterval, b: CriticalInterval) -> CriticalInterval:
    """Intersection, tagged with the newer interval's component/dim/alpha."""
    if a.empty or b.empty:
        return CriticalInterval.empty_at(b.component, b.dimension, b.alpha)
    lower = max(a.lower, b.lower)
    upper = min(a.upper, b.upper)
    if lower > upper:
        return CriticalInterval.empty_at(b.component, b.dimension, b.alpha)
    return CriticalInterval(lower, upper, b.component, b.dimension, b.alpha)


def critical_interval(mu: float, sigma: float, alpha: float, mode: str = "normalized",
                      component: int = 0, dimension: int = 0) -> CriticalInterval:
    """Interval where a 1D Gaussian clears the threshold alpha.

    ``density`` mode thresholds the raw density: half-width
    sigma * sqrt(-2 ln(sqrt(2 pi) alpha sigma)), defined while
    sqrt(2 pi) alpha sigma <= 1 (alpha at the peak density gives a
    degenerate point). ``normalized`` mode thresholds the peak-normalized
    density, half-width sigma * sqrt(-2 ln alpha), defined for alpha <= 1.
    An alpha beyond the valid range yields an interval flagged empty — a
    convergence signal, not an error.
    """
    if mode not in ALPHA_MODES:
        raise ValueError(f"mode must be one of {ALPHA_MODES}")
    if not sigma > 0.0:
        raise ValueError("sigma must be > 0")
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0")
    arg = SQRT_2PI * alpha * sigma if mode == "density" else alpha
    if arg > 1.0:
        return CriticalInterval.empty_at(component, dimension, alpha)
    half = sigma * math.sqrt(-2.0 * math.log(arg))
    return CriticalInterval(mu - half, mu + half, component, dimension, alpha)


def interval_shrink_rate(sigma: float, alpha: float, length: float) -> float:
    """Rate of change of interval length in alpha: -4 sigma^2 / (alpha * length).

    Always negative — the interval shrinks as the threshold rises.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be > 0")
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0")
    if not length > 0.0:
        raise ValueError("length must be > 0 (degenerate interval has no finite rate)")
    return -4.0 * sigma * sigma / (alpha * length)


@dataclass(frozen=True)
class CriticalBox:
    """Axis-aligned product of per-dimension critical intervals of one component."""

    component: int
    intervals: tuple[CriticalInterval, ...]

    def __post_init__(self):
        ivs = tuple(self.intervals)
        if not ivs:
            raise ValueError("a box needs at least one interval")
        for iv in ivs:
            if iv.component != self.component:
                raise ValueError("all intervals must belong to the box's component")
        object.__setattr__(self, "intervals", ivs)

    @property
    def empty(self) -> bool:
        return any(iv.empty for iv in self.intervals)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(iv.length for iv in self.intervals)

    @property
    def midpoint(self) -> tuple[float, ...]:
        return tuple(iv.midpoint for iv in self.intervals)


def critical_box(component, alpha: float, mode: str = "normalized",
                 component_index: int = 0) -> CriticalBox:
    """Per-dimension critical intervals from the component's marginal sigmas."""
    sigmas = component.marginal_sigmas
    intervals = tuple(
        critical_interval(float(component.mean[e]), float(sigmas[e]), alpha, mode,
                          component=component_index, dimension=e)
        for e in range(component.dims)
    )
    return CriticalBox(component_index, intervals)


def has_interior(box: CriticalBox) -> bool:
    """Whether an open ball fits inside the box (all side lengths non-degenerate)."""
    return (not box.empty) and all(l > INTERIOR_TOL for l in box.lengths)


def contraction_ratio(prev: CriticalInterval, nxt: CriticalInterval) -> float:
    """Length of prev ∩ nxt over length of prev.

    Raises DisjointIntervals when the two intervals do not meet (the ratio
    is only defined on a non-empty intersection).
    """
    if prev.empty or nxt.empty:
        raise ValueError("contraction ratio needs non-empty intervals")
    if not prev.length > 0.0:
        raise ValueError("source interval must have positive length")
    overlap = intersect(prev, nxt)
    if overlap.empty:
        raise DisjointIntervals(
            f"[{prev.lower!r}, {prev.upper!r}] and [{nxt.lower!r}, {nxt.upper!r}] are disjoint")
    return overlap.length / prev.length


@dataclass(frozen=True)
class HMap:
    """Affine contraction carrying one interval onto the next.

    ``paper_literal`` is y = K (x - inf source); ``anchored`` shifts the
    image onto the intersection, y = inf(I) + K (x - inf source), making
    the map a self-map of the shrinking region so its fixed point lies
    inside the target. Both share the Lipschitz constant K.
    """

    component: int
    dimension: int
    K: float
    source: CriticalInterval
    target_intersection: CriticalInterval
    mode: str = "anchored"

    def __post_init__(self):
        if self.mode not in HMAP_MODES:
            raise ValueError(f"mode must be one of {HMAP_MODES}")
        if not 0.0 <= self.K:
            raise ValueError("K must be non-negative")

    def __call__(self, x):
        y = self.K * (x - self.source.lower)
        if self.mode == "anchored":
            y = self.target_intersection.lower + y
        return y


def build_h_map(prev: CriticalInterval, nxt: CriticalInterval,
                mode: str = "anchored") -> HMap:
    """Construct the contraction from prev onto prev ∩ nxt.

    Raises NotAContraction when the intersection does not strictly shrink
    (K >= 1) and propagates DisjointIntervals from the ratio.
    """
    if mode not in HMAP_MODES:
        raise ValueError(f"mode must be one of {HMAP_MODES}")
    k = contraction_ratio(prev, nxt)
    if k >= 1.0:
        raise NotAContraction(f"ratio K={k!r} is not < 1")
    return HMap(nxt.component, nxt.dimension, k, prev, intersect(prev, nxt), mode)


@dataclass(frozen=True)
class BanachResult:
    """Outcome of iterating one contraction to its fixed point.

    ``certified`` means every observed per-step contraction stayed within
    K + 1e-12 of the declared ratio. ``step_sizes`` holds |x_{n+1} - x_n|
    for each step taken, so callers can audit the geometric decay.
    """

    location: float
    iterations: int
    certified: bool
    max_step_ratio: float
    step_sizes: tuple[float, ...]


def banach_fixed_point(hmap: HMap, start: float, tol: float = 1e-12,
                       max_iter: int = 10_000) -> BanachResult:
    """Iterate x <- H(x) until the step falls below tol.

    Raises BanachNonConvergence if max_iter is hit first, which for a valid
    K < 1 indicates the budget was too small for the requested tolerance.
    """
    if hmap.K >= 1.0:
        raise NotAContraction(f"map has K={hmap.K!r} >= 1")
    if not tol > 0.0:
        raise ValueError("tol must be > 0")
    x = float(start)
    steps: list[float] = []
    max_ratio = 0.0
    for n in range(1, max_iter + 1):
        nxt = hmap(x)
        step = abs(nxt - x)
        if steps and steps[-1] > 0.0:
            max_ratio = max(max_ratio, step / steps[-1])
        steps.append(step)
        x = nxt
        if step < tol:
            certified = max_ratio <= hmap.K + 1e-12
            return BanachResult(x, n, certified, max_ratio, tuple(steps))
    raise BanachNonConvergence(
        f"no convergence to tol={tol!r} within {max_iter} iterations (K={hmap.K!r})")
