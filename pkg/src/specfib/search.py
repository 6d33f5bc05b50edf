"""Deterministic enumeration of admissible spectral constructions.

Scans are exhaustive over finite parameter boxes; results are always
emitted in lexicographic tuple order regardless of how the grid was
evaluated, so repeated and parallel runs are byte-identical.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import EmptyRange, NonIntegralA
from .fiber_k3 import (
    AdmissibilityVerdict,
    FiberRestriction,
    FibrationGeometry,
    MukaiVector,
    fine_moduli_check,
    restrict_to_fiber,
)

Interval = tuple[int, int]

KNOWN_FILTERS = frozenset(
    {"fine_moduli", "degree_zero", "c1_zero_after_twist", "bogomolov_nonneg"}
)


def _values(rng: Interval, name: str) -> range:
    lo, hi = rng
    if hi < lo:
        raise EmptyRange(f"range for {name} is empty: [{lo}, {hi}]")
    return range(lo, hi + 1)


@dataclass(frozen=True)
class ScanRequest:
    fib: FibrationGeometry
    H: tuple[int, ...]
    L_ranges: tuple[Interval, ...] = ()
    r_range: Interval = (1, 1)
    s_range: Interval = (0, 0)
    n_range: Interval = (1, 1)
    d_range: Interval = (0, 0)
    g_range: Interval = (0, 0)
    filters: frozenset[str] = frozenset()
    max_results: Optional[int] = None

    def __post_init__(self):
        unknown = self.filters - KNOWN_FILTERS
        if unknown:
            raise EmptyRange(f"unknown filters: {sorted(unknown)}")


@dataclass(frozen=True)
class MukaiHit:
    """One admissible grid point of a Mukai-vector scan."""

    r: int
    L: tuple[int, ...]
    s: int
    restriction: FiberRestriction
    gcd_triple: tuple[int, int, int]
    square: Fraction

    def key(self):
        return (self.r, self.L, self.s)


@dataclass(frozen=True)
class RankOneHit:
    """A distinguished-degree entry of a rank-one scan."""

    n: int
    g: int
    d: int
    kind: str            # "degree_zero" or "c1_zero_after_twist"
    R: int
    ch1_fiber: int       # fiber coefficient of ch1 (before any twist)
    ch3: int             # ch3 of the distinguished character (after twist
                         # for the c1-zero entries)

    def key(self):
        return (self.n, self.g, self.d, self.kind)


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    truncated: bool = False


def evaluate_mukai_point(
    fib: FibrationGeometry, H: Sequence[int], r: int, L: Sequence[int], s: int
) -> Optional[MukaiHit]:
    """Single-point predicate: the hit, or None if the point fails."""
    rest = restrict_to_fiber(list(L), list(H), fib)
    v = MukaiVector(r=r, restriction=rest, s=s)
    try:
        verdict = fine_moduli_check(v)
    except NonIntegralA:
        return None
    if not verdict.passed:
        return None
    return MukaiHit(
        r=r,
        L=tuple(L),
        s=s,
        restriction=rest,
        gcd_triple=verdict.gcd_triple,
        square=verdict.square,
    )


def scan_mukai(req: ScanRequest, workers: int = 1) -> ScanResult:
    """Exhaustive admissibility scan over the (r, L, s) box.

    Every emitted tuple passes the fine-moduli check; every omitted
    tuple fails it.  ``workers > 1`` evaluates grid slices concurrently
    and merges into canonical order before emission.
    """
    ndiv = len(req.fib.ring.divisors)
    if len(req.L_ranges) != ndiv:
        raise EmptyRange(
            f"need {ndiv} coefficient ranges for L, got {len(req.L_ranges)}"
        )
    r_vals = _values(req.r_range, "r")
    s_vals = _values(req.s_range, "s")
    coeff_vals = [
        _values(rng, f"L[{i}]") for i, rng in enumerate(req.L_ranges)
    ]

    def eval_slice(r: int) -> list[MukaiHit]:
        hits = []
        for L in itertools.product(*coeff_vals):
            for s in s_vals:
                hit = evaluate_mukai_point(req.fib, req.H, r, L, s)
                if hit is not None:
                    hits.append(hit)
        return hits

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slices = list(pool.map(eval_slice, r_vals))
    else:
        slices = [eval_slice(r) for r in r_vals]
    rows = sorted((h for chunk in slices for h in chunk), key=MukaiHit.key)
    return _materialize(rows, req.max_results)


def rank_one_entries(n: int, g: int, g_B: int) -> list[RankOneHit]:
    """Distinguished degrees for a fixed (n, g): d = R/2 gives relative
    degree zero; d = n + R/2 gives c1 = 0 after the fiber-class twist."""
    R = 2 * g - 2 - n * (2 * g_B - 2)
    if R < 0 or R % 2:
        return []
    half = R // 2
    return [
        RankOneHit(
            n=n, g=g, d=half, kind="degree_zero", R=R,
            ch1_fiber=0, ch3=-n * (g_B - 1),
        ),
        RankOneHit(
            n=n, g=g, d=n + half, kind="c1_zero_after_twist", R=R,
            ch1_fiber=n, ch3=-n * (g_B - 3),
        ),
    ]


def scan_rank_one(req: ScanRequest, workers: int = 1) -> ScanResult:
    """Enumerate the distinguished rank-one spectral degrees over the
    (n, g) box, restricted to d_range and the requested filters."""
    n_vals = _values(req.n_range, "n")
    g_vals = _values(req.g_range, "g")
    d_lo, d_hi = req.d_range
    if d_hi < d_lo:
        raise EmptyRange(f"range for d is empty: [{d_lo}, {d_hi}]")
    kinds = req.filters & {"degree_zero", "c1_zero_after_twist"}

    def eval_slice(n: int) -> list[RankOneHit]:
        hits = []
        for g in g_vals:
            for hit in rank_one_entries(n, g, req.fib.base_genus):
                if not d_lo <= hit.d <= d_hi:
                    continue
                if kinds and hit.kind not in kinds:
                    continue
                hits.append(hit)
        return hits

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slices = list(pool.map(eval_slice, n_vals))
    else:
        slices = [eval_slice(n) for n in n_vals]
    rows = sorted((h for chunk in slices for h in chunk), key=RankOneHit.key)
    return _materialize(rows, req.max_results)


def _materialize(rows: list, cap: Optional[int]) -> ScanResult:
    if cap is not None and len(rows) > cap:
        return ScanResult(rows=tuple(rows[:cap]), truncated=True)
    return ScanResult(rows=tuple(rows))
