"""Interval-valued potentials evaluated on finite words.

A potential assigns a real to each point of a two-sided shift space. On a
finite word only part of a point is visible, so evaluation returns an
interval guaranteed to contain the value at every point consistent with
the visible symbols. Widening the visible block never widens the interval.

Kinds provided:

* zero - the constant 0 potential;
* locally constant - value read from a table on the radius-r central block;
* reciprocal run - value 1/h(k) where k is the radius of the maximal
  constant central run (0 on constant points);
* run levels - value a_k at run radius k with limit value a_inf on
  constant points.

Interval arithmetic rounds outward only when a float operation is inexact
(detected with an error-free transformation), so sums of exactly
representable values keep zero width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ConstructionError, IdentityCheckError, InputError
from .subshifts import DEFAULT_NODE_BUDGET, SubshiftSpec, iter_language
from .words import Word, check_symbols

_INF = math.inf


def _add_down(a: float, b: float) -> float:
    s = a + b
    t = s - a
    err = (a - (s - t)) + (b - t)
    if err < 0.0:
        return math.nextafter(s, -_INF)
    return s


def _add_up(a: float, b: float) -> float:
    s = a + b
    t = s - a
    err = (a - (s - t)) + (b - t)
    if err > 0.0:
        return math.nextafter(s, _INF)
    return s


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] of floats."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise InputError(f"invalid interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def hull(values: Iterable[float]) -> "Interval":
        vals = list(values)
        if not vals:
            raise InputError("hull of no values")
        return Interval(min(vals), max(vals))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_add_down(self.lo, other.lo), _add_up(self.hi, other.hi))

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def encloses(self, other: "Interval", slack: float = 0.0) -> bool:
        return self.lo - slack <= other.lo and other.hi <= self.hi + slack


ZERO_INTERVAL = Interval(0.0, 0.0)


class Potential:
    """Interface: eval(word, center) -> Interval, plus global bounds."""

    kind: str = "abstract"
    bounds: Interval = ZERO_INTERVAL

    def eval(self, w: Word, center: int) -> Interval:
        raise NotImplementedError

    @property
    def is_constant_zero(self) -> bool:
        return self.bounds.lo == 0.0 and self.bounds.hi == 0.0

    def describe(self) -> dict:
        return {"kind": self.kind, "inf": self.bounds.lo, "sup": self.bounds.hi}


def _check_center(w: Word, center: int) -> None:
    if not w:
        raise InputError("cannot evaluate on the empty word")
    if not 0 <= center < len(w):
        raise InputError(f"center {center} outside word of length {len(w)}")


class ZeroPotential(Potential):
    kind = "zero"
    bounds = ZERO_INTERVAL

    def eval(self, w: Word, center: int) -> Interval:
        _check_center(w, center)
        return ZERO_INTERVAL


class LocallyConstantPotential(Potential):
    """Value determined by the central block of fixed radius.

    values maps (2r+1)-blocks to floats; blocks not listed take the
    default. With default=None the table must be total over the alphabet.
    When fewer than r symbols are visible on a side, the result is the
    hull over all completions of the visible pattern.
    """

    kind = "locally_constant"

    def __init__(
        self,
        radius: int,
        values: dict[Word, float],
        alphabet_size: int,
        default: float | None = 0.0,
    ):
        if radius < 0:
            raise ConstructionError("radius must be >= 0")
        if alphabet_size < 1:
            raise ConstructionError("alphabet_size must be >= 1")
        self.radius = radius
        self.alphabet_size = alphabet_size
        self.default = default
        width = 2 * radius + 1
        table: dict[Word, float] = {}
        for key, v in values.items():
            key = tuple(key)
            if len(key) != width:
                raise ConstructionError(
                    f"table key {key} must have length {width} for radius {radius}"
                )
            check_symbols(key, alphabet_size)
            table[key] = float(v)
        if default is None and len(table) < alphabet_size ** width:
            raise ConstructionError(
                "table is not total and no default value was given"
            )
        self.values = table
        pool = list(table.values())
        if default is not None and (not pool or len(table) < alphabet_size ** width):
            pool.append(float(default))
        if not pool:
            raise ConstructionError("potential has no values")
        self.bounds = Interval(min(pool), max(pool))

    def _lookup(self, key: Word) -> float:
        v = self.values.get(key)
        if v is None:
            if self.default is None:
                raise InputError(f"no table entry for block {key}")
            return float(self.default)
        return v

    def eval(self, w: Word, center: int) -> Interval:
        _check_center(w, center)
        r = self.radius
        left = center
        right = len(w) - 1 - center
        if left >= r and right >= r:
            return Interval.point(self._lookup(w[center - r : center + r + 1]))
        # hull over every completion of the visible pattern
        lo_vis = max(0, center - r)
        visible = w[lo_vis : min(len(w), center + r + 1)]
        pad_left = r - (center - lo_vis)
        pad_right = 2 * r + 1 - pad_left - len(visible)
        lo = _INF
        hi = -_INF
        matched = 0
        for key, v in self.values.items():
            if key[pad_left : pad_left + len(visible)] == visible:
                matched += 1
                lo = min(lo, v)
                hi = max(hi, v)
        total = self.alphabet_size ** (pad_left + pad_right)
        if matched < total:
            d = float(self.default)  # totality was enforced otherwise
            lo = min(lo, d)
            hi = max(hi, d)
        return Interval(lo, hi)


def _visible_break(w: Word, center: int) -> tuple[int, int, int | None]:
    """Radius bookkeeping for run-based potentials.

    Returns (min one-sided visibility, max one-sided visibility, d) where d
    is the least distance at which a visible symbol differs from the
    center symbol, or None if everything visible matches it.
    """
    sym = w[center]
    left = center
    right = len(w) - 1 - center
    far = max(left, right)
    for d in range(1, far + 1):
        if d <= left and w[center - d] != sym:
            return min(left, right), far, d
        if d <= right and w[center + d] != sym:
            return min(left, right), far, d
    return min(left, right), far, None


class ReciprocalRunPotential(Potential):
    """phi(x) = 1/h(k) at run radius k; 0 on constant points.

    k is the largest radius with x(-k) = ... = x(k). h must be positive
    and non-decreasing; values are tabulated up to k_cap and evaluation
    beyond that raises. The divergence flag records whether the partial
    sums of 1/h(n) look divergent at the summability horizon (dyadic
    increment heuristic; the sums themselves are kept for inspection).
    """

    kind = "reciprocal_run"

    def __init__(
        self,
        h: Callable[[int], float] | Sequence[float],
        *,
        k_cap: int = 1024,
        summability_horizon: int = 1 << 16,
    ):
        if callable(h):
            table = [float(h(k)) for k in range(k_cap + 1)]
            tail = h
        else:
            table = [float(v) for v in h]
            if not table:
                raise ConstructionError("height sequence must be non-empty")
            tail = None
            k_cap = len(table) - 1
        prev = 0.0
        for k, v in enumerate(table):
            if not v > 0.0:
                raise ConstructionError(f"h({k}) must be positive")
            if v < prev:
                raise ConstructionError(f"h must be non-decreasing; h({k}) drops")
            prev = v
        self.h_table = table
        self.k_cap = k_cap
        self.bounds = Interval(0.0, 1.0 / table[0])
        sums = []
        acc = 0.0
        j = 1
        horizon = summability_horizon if tail is not None else k_cap
        for k in range(horizon + 1):
            hv = table[k] if k <= k_cap else float(tail(k))
            if not hv > 0.0:
                raise ConstructionError(f"h({k}) must be positive")
            acc += 1.0 / hv
            if k + 1 == 1 << j:
                sums.append(acc)
                j += 1
        self.reciprocal_partial_sums = sums
        self.sum_diverges = _looks_divergent(sums)

    def _inv(self, k: int) -> float:
        if k > self.k_cap:
            raise InputError(
                f"run radius {k} beyond tabulated horizon {self.k_cap}"
            )
        return 1.0 / self.h_table[k]

    def eval(self, w: Word, center: int) -> Interval:
        _check_center(w, center)
        rv, _far, d = _visible_break(w, center)
        if d is not None and d <= rv + 1:
            return Interval.point(self._inv(d - 1))
        if d is not None:
            # run radius is between rv and d-1; h non-decreasing
            return Interval(self._inv(d - 1), self._inv(rv))
        return Interval(0.0, self._inv(rv))


def _looks_divergent(dyadic_partial_sums: Sequence[float]) -> bool:
    # increments between successive dyadic horizons; a summable series has
    # geometrically shrinking increments, a divergent one does not
    s = list(dyadic_partial_sums)
    if len(s) < 4:
        raise ConstructionError("summability horizon too small to classify")
    incs = [s[i + 1] - s[i] for i in range(len(s) - 1)]
    tail = incs[-3:]
    if all(v <= 1e-12 for v in tail):
        return False
    ratios = [b / a for a, b in zip(tail, tail[1:]) if a > 0]
    if not ratios:
        return False
    return min(ratios) >= 0.66


class RunLevelPotential(Potential):
    """Value a_k at run radius k, a_inf on constant points.

    Levels beyond the table continue at a_inf. Tail minima and maxima are
    precomputed so undecided radii cost O(1).
    """

    kind = "run_levels"

    def __init__(self, a: Sequence[float], a_inf: float):
        vals = [float(v) for v in a]
        if not vals:
            raise ConstructionError("level table must be non-empty")
        self.a = vals
        self.a_inf = float(a_inf)
        n = len(vals)
        tmin = [0.0] * (n + 1)
        tmax = [0.0] * (n + 1)
        tmin[n] = tmax[n] = self.a_inf
        for i in range(n - 1, -1, -1):
            tmin[i] = min(vals[i], tmin[i + 1])
            tmax[i] = max(vals[i], tmax[i + 1])
        self._tail_min = tmin
        self._tail_max = tmax
        self.bounds = Interval(tmin[0], tmax[0])

    def _level(self, k: int) -> float:
        return self.a[k] if k < len(self.a) else self.a_inf

    def _range_hull(self, k_lo: int, k_hi: int | None) -> Interval:
        """Hull of a_k over k_lo <= k <= k_hi (k_hi None means unbounded,
        including the constant-point value)."""
        n = len(self.a)
        if k_hi is None:
            i = min(k_lo, n)
            return Interval(self._tail_min[i], self._tail_max[i])
        lo = _INF
        hi = -_INF
        if k_hi >= n:
            lo, hi = self.a_inf, self.a_inf
            k_hi = n - 1
        for k in range(min(k_lo, n), k_hi + 1):
            v = self.a[k]
            lo = min(lo, v)
            hi = max(hi, v)
        if k_lo >= n:
            lo = min(lo, self.a_inf)
            hi = max(hi, self.a_inf)
        return Interval(lo, hi)

    def eval(self, w: Word, center: int) -> Interval:
        _check_center(w, center)
        rv, _far, d = _visible_break(w, center)
        if d is not None and d <= rv + 1:
            return Interval.point(self._level(d - 1))
        if d is not None:
            return self._range_hull(rv, d - 1)
        return self._range_hull(rv, None)


def make_reciprocal_run(
    h: Callable[[int], float] | Sequence[float],
    *,
    k_cap: int = 1024,
    summability_horizon: int = 1 << 16,
) -> ReciprocalRunPotential:
    return ReciprocalRunPotential(h, k_cap=k_cap, summability_horizon=summability_horizon)


def make_run_levels(a: Sequence[float], a_inf: float) -> RunLevelPotential:
    return RunLevelPotential(a, a_inf)


def eval_potential(pot: Potential, w: Word, center: int) -> Interval:
    return pot.eval(tuple(w), center)


def partial_sum(pot: Potential, w: Word) -> Interval:
    """Interval enclosing sum_{i<n} phi(T^i x) over points x through w."""
    w = tuple(w)
    if not w:
        raise InputError("partial sum needs a non-empty word")
    acc = ZERO_INTERVAL
    for i in range(len(w)):
        acc = acc + pot.eval(w, i)
    return acc


@dataclass(frozen=True)
class VarProfile:
    """Measured variation widths var(n) and the induced gap table g(n).

    var[n] is the largest eval width at the center of any admissible
    (2n+1)-block; g[n] = 2 * sum_{i <= n//2} var[i] bounds the spread of
    length-n partial sums over points agreeing on n coordinates.
    """

    var: tuple[float, ...]
    g: tuple[float, ...]

    def g_at(self, n: int) -> float:
        if n < 0 or n >= len(self.g):
            raise InputError(f"g queried at n={n}, table covers 0..{len(self.g) - 1}")
        return self.g[n]


def variation_sum_bounds(var: Sequence[float]) -> tuple[float, ...]:
    """g(n) = 2 * sum of var(i) for i <= n//2, for n < 2*len(var)."""
    var = list(var)
    out = []
    for n in range(2 * len(var)):
        out.append(2.0 * math.fsum(var[: n // 2 + 1]))
    return tuple(out)


def variation_profile(
    pot: Potential,
    spec: SubshiftSpec,
    n_max: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> VarProfile:
    """Scan admissible (2n+1)-blocks and record the worst eval width."""
    if n_max < 0:
        raise InputError("n_max must be >= 0")
    var = []
    if pot.bounds.width == 0.0:
        var = [0.0] * (n_max + 1)
    else:
        for n in range(n_max + 1):
            worst = 0.0
            for w in iter_language(spec, 2 * n + 1, budget):
                width = pot.eval(w, n).width
                if width > worst:
                    worst = width
            var.append(worst)
    for i in range(len(var) - 1):
        if var[i + 1] > var[i] + 1e-15:
            raise IdentityCheckError(
                f"variation must be non-increasing; var({i + 1}) > var({i})"
            )
    return VarProfile(var=tuple(var), g=variation_sum_bounds(var))


@dataclass(frozen=True)
class GrowthReport:
    """Classification of a gap table g against logarithmic growth.

    klass is one of 'bounded', 'sublog', 'log_linear', 'superlog'; c is
    the fitted coefficient of ln n for log_linear. ratios holds
    g(n)/ln n at dyadic n for inspection.
    """

    klass: str
    c: float | None
    ratios: tuple[float, ...]
    increments: tuple[float, ...]


def growth_class(g: Sequence[float], horizon: int | None = None) -> GrowthReport:
    """Classify growth of g from dyadic increments.

    Geometric decay of g(2^j) - g(2^(j-1)) means a summable tail
    (bounded); increments near constant track C*ln n; growing increments
    are superlogarithmic; in between is sublogarithmic.
    """
    gs = list(g)
    if horizon is None:
        horizon = len(gs) - 1
    if horizon >= len(gs):
        raise InputError("horizon beyond table")
    if horizon < 16:
        raise InputError("growth classification needs horizon >= 16")
    dyads = []
    j = 2
    while (1 << j) <= horizon:
        dyads.append(1 << j)
        j += 1
    if dyads[-1] != horizon:
        dyads.append(horizon)
    ratios = tuple(gs[n] / math.log(n) for n in dyads)
    incs = [gs[b] - gs[a] for a, b in zip(dyads, dyads[1:])]
    tail = incs[-3:] if len(incs) >= 3 else incs
    scale = max(abs(gs[n]) for n in dyads) or 1.0
    if all(abs(v) <= 1e-9 * scale for v in tail):
        return GrowthReport("bounded", None, ratios, tuple(incs))
    pos = [(a, b) for a, b in zip(tail, tail[1:]) if a > 0]
    med_ratio = sorted(b / a for a, b in pos)[len(pos) // 2] if pos else 0.0
    if med_ratio <= 0.80:
        return GrowthReport("bounded", None, ratios, tuple(incs))
    if med_ratio > 1.10:
        return GrowthReport("superlog", None, ratios, tuple(incs))
    if med_ratio <= 0.95:
        return GrowthReport("sublog", None, ratios, tuple(incs))
    # least-squares slope of g against ln n over the dyadic tail
    pts = dyads[-min(len(dyads), 5):]
    xs = [math.log(n) for n in pts]
    ys = [gs[n] for n in pts]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    denom = sum((x - xbar) ** 2 for x in xs)
    c = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom
    return GrowthReport("log_linear", c, ratios, tuple(incs))
