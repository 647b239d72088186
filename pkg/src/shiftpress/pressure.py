"""Partition sums over languages and bracketing of topological pressure.

The partition value at length n is the sum of e^(S_n) over admissible
words, where S_n is the interval-valued partial sum of the potential along
the word. Log-sum-exp accumulation in a single streaming pass keeps the
computation stable; the returned lnZ is an interval whose endpoints come
from the per-word interval endpoints, inflated outward by a few ulps
whenever any word contributed genuine width.

Pressure brackets combine a submultiplicative upper bound
min_m lnZ_hi(m)/m with the gluing lower bound
(lnZ_lo(n) + inf(phi) * f(n) - g(n)) / (n + f(n)), valid when the declared
gap bounds f promise gluing at every gap >= f(n) and g bounds partial-sum
variation. Lower bounds are omitted for transitivity-mode bounds and for
oracles that only decide a locally admissible superset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InconsistentBracketError, InputError
from .potentials import Potential, VarProfile, partial_sum, variation_profile
from .subshifts import (
    DEFAULT_NODE_BUDGET,
    Exactness,
    SubshiftSpec,
    count_language,
    iter_language,
)
from .words import Word


class _LogSumExp:
    """Online log-sum-exp accumulator; order-deterministic."""

    __slots__ = ("m", "s")

    def __init__(self):
        self.m = -math.inf
        self.s = 0.0

    def add(self, x: float) -> None:
        if x <= self.m:
            self.s += math.exp(x - self.m)
        else:
            if self.m == -math.inf:
                self.s = 1.0
            else:
                self.s = self.s * math.exp(self.m - x) + 1.0
            self.m = x

    def value(self) -> float:
        if self.m == -math.inf:
            return -math.inf
        return self.m + math.log(self.s)


def _nudge(x: float, ulps: int, direction: float) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, direction)
    return x


@dataclass(frozen=True)
class PartitionRow:
    n: int
    count: int
    lnz_lo: float
    lnz_hi: float


def partition_function(
    spec: SubshiftSpec,
    pot: Potential,
    n: int,
    budget: int = DEFAULT_NODE_BUDGET,
    prefix: Word = (),
) -> PartitionRow:
    """One partition row: word count and enclosed lnZ at length n.

    For the zero potential the sum is exactly the word count, so the row
    is ln(count) with zero width (counts use the family's closed form
    where one exists). A non-empty prefix restricts the sum to words
    extending it.
    """
    if n < 1:
        raise InputError("partition length must be >= 1")
    if pot.is_constant_zero:
        if prefix:
            count = sum(1 for _ in iter_language(spec, n, budget, prefix))
        else:
            count = count_language(spec, n, budget)
        v = math.log(count) if count else -math.inf
        return PartitionRow(n=n, count=count, lnz_lo=v, lnz_hi=v)
    acc_lo = _LogSumExp()
    acc_hi = _LogSumExp()
    count = 0
    saw_width = False
    for w in iter_language(spec, n, budget, prefix):
        s = partial_sum(pot, w)
        if s.hi > s.lo:
            saw_width = True
        acc_lo.add(s.lo)
        acc_hi.add(s.hi)
        count += 1
    lo = acc_lo.value()
    hi = acc_hi.value()
    if count and saw_width:
        lo = _nudge(lo, 4, -math.inf)
        hi = _nudge(hi, 4, math.inf)
    elif count:
        # identical endpoint streams: keep the common rounding
        hi = max(lo, hi)
        lo = min(lo, hi)
    return PartitionRow(n=n, count=count, lnz_lo=lo, lnz_hi=hi)


@dataclass(frozen=True)
class PartitionTable:
    rows: tuple[PartitionRow, ...]
    upper_bound_only: bool

    def row(self, n: int) -> PartitionRow:
        if not 1 <= n <= len(self.rows):
            raise InputError(f"no partition row for n={n}")
        return self.rows[n - 1]

    @property
    def horizon(self) -> int:
        return len(self.rows)


def partition_table(
    spec: SubshiftSpec,
    pot: Potential,
    n_max: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> PartitionTable:
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    rows = tuple(partition_function(spec, pot, n, budget) for n in range(1, n_max + 1))
    return PartitionTable(
        rows=rows,
        upper_bound_only=spec.exactness is Exactness.LOCAL_SUPERSET,
    )


@dataclass(frozen=True)
class BracketRow:
    n: int
    lo: float
    hi: float


@dataclass(frozen=True)
class PressureBracket:
    rows: tuple[BracketRow, ...]
    best_lo: float
    best_hi: float
    upper_bound_only: bool

    @property
    def width(self) -> float:
        return self.best_hi - self.best_lo

    def check_consistent(self, tol: float = 1e-9) -> None:
        if self.best_lo > self.best_hi + tol:
            raise InconsistentBracketError(
                "pressure bracket crossed: lower bound "
                f"{self.best_lo} exceeds upper bound {self.best_hi}; "
                "the declared gap bounds are unsound for this instance",
                best_lo=self.best_lo,
                best_hi=self.best_hi,
            )


def pressure_bracket(
    spec: SubshiftSpec,
    pot: Potential,
    table: PartitionTable,
    *,
    f: Callable[[int], int] | None = None,
    g: Sequence[float] | VarProfile | None = None,
    tol: float = 1e-9,
) -> PressureBracket:
    """Bracket the pressure from a partition table.

    f defaults to the subshift's declared gap bounds; g to a variation
    profile for the potential (a raw g table works too). The lower
    bound needs specification-mode gluing and an exact-language oracle;
    otherwise rows carry -inf lower bounds and the bracket is flagged
    upper_bound_only.
    """
    n_max = table.horizon
    if f is None:
        f = spec.declared_gap
    g_at: Callable[[int], float]
    if g is None:
        g_profile = variation_profile(pot, spec, (n_max + 1) // 2)
        g_at = g_profile.g_at
    elif isinstance(g, VarProfile):
        g_at = g.g_at
    else:
        g_list = list(g)

        def g_at(n: int, _g=g_list) -> float:
            if n >= len(_g):
                raise InputError(f"g table too short for n={n}")
            return _g[n]

    lower_valid = (
        f is not None
        and spec.gap_mode == "specification"
        and spec.exactness is Exactness.EXACT_LANGUAGE
    )
    inf_phi = pot.bounds.lo
    rows = []
    best_hi = math.inf
    best_lo = -math.inf
    for row in table.rows:
        n = row.n
        hi_n = row.lnz_hi / n
        best_hi = min(best_hi, hi_n)
        if lower_valid:
            fn = f(n)
            lo_n = (row.lnz_lo + inf_phi * fn - g_at(n)) / (n + fn)
            best_lo = max(best_lo, lo_n)
        else:
            lo_n = -math.inf
        rows.append(BracketRow(n=n, lo=lo_n, hi=best_hi))
    bracket = PressureBracket(
        rows=tuple(rows),
        best_lo=best_lo,
        best_hi=best_hi,
        upper_bound_only=not lower_valid or table.upper_bound_only,
    )
    bracket.check_consistent(tol)
    return bracket


@dataclass(frozen=True)
class AnchorSequence:
    """Lengths where (f + g)/ln n has dropped below each target epsilon."""

    indices: tuple[int, ...]
    scores: tuple[float, ...]
    epsilons: tuple[float, ...]
    complete: bool


def anchor_sequence(
    f: Callable[[int], float],
    g: Callable[[int], float],
    horizon: int,
    epsilons: Sequence[float],
) -> AnchorSequence:
    """Greedy anchor selection: for each epsilon, in decreasing order, the
    smallest length past the previous pick with (f(n)+g(n))/ln n <= eps.

    Selection stops at the horizon; `complete` records whether every
    epsilon was satisfied.
    """
    eps = list(epsilons)
    if not eps:
        raise InputError("need at least one epsilon")
    if any(e <= 0 for e in eps):
        raise InputError("epsilons must be positive")
    if sorted(eps, reverse=True) != eps:
        raise InputError("epsilons must be non-increasing")
    if horizon < 3:
        raise InputError("horizon must be >= 3")
    picks: list[int] = []
    scores: list[float] = []
    start = 3
    for e in eps:
        found = None
        for n in range(start, horizon + 1):
            score = (f(n) + g(n)) / math.log(n)
            if score <= e:
                found = (n, score)
                break
        if found is None:
            break
        picks.append(found[0])
        scores.append(found[1])
        start = found[0] + 1
    return AnchorSequence(
        indices=tuple(picks),
        scores=tuple(scores),
        epsilons=tuple(eps),
        complete=len(picks) == len(eps),
    )
