"""Chern-character formulas for transforms of spectral line bundles.

Covers the general kernel-contraction formulas, the rank-one (diagonal
ideal) case, the trivial-fibration case over an elliptic base, and a
pushforward oracle that recomputes every closed form by exact
pullback-multiply-pushforward arithmetic in a Kunneth product ring.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .chow import (
    CurveFactor,
    ProductElement,
    ProductRing,
    Rational,
    RingElement,
    SurfaceFactor,
    _frac,
    _vec,
    fibered_threefold,
    pullback,
    pushforward,
    to_threefold,
)
from .errors import (
    BaseNotElliptic,
    DimensionMismatch,
    InconsistentKernel,
    OddRamification,
    RingMismatch,
)
from .fiber_k3 import Divisor, FibrationGeometry


class RamificationWarning(UserWarning):
    """Ramification count is negative or odd: no such cover exists."""


def euler_characteristic(d: int, g: int) -> int:
    """chi of a degree-d line bundle on a genus-g curve: 1 - g + d."""
    if g < 0:
        raise DimensionMismatch("genus must be non-negative")
    return 1 - g + d


def ramification(g: int, n: int, g_B: int) -> int:
    """Hurwitz ramification R = 2g - 2 - n(2 g_B - 2) of an n-fold cover."""
    if n < 1 or g < 0 or g_B < 0:
        raise DimensionMismatch("need n >= 1, g >= 0, g_B >= 0")
    R = 2 * g - 2 - n * (2 * g_B - 2)
    if R < 0:
        warnings.warn(f"negative ramification R={R}", RamificationWarning, stacklevel=2)
    elif R % 2:
        warnings.warn(f"odd ramification R={R}", RamificationWarning, stacklevel=2)
    return R


@dataclass(frozen=True)
class SpectralDatum:
    """Numerical data of a spectral cover: its class, degree over the
    base, arithmetic genus, and the degree of the line bundle carried.

    ``cover_class`` is the degree-4 class of the curve, stored by its
    pairings against the divisor basis of the ambient ring; its pairing
    with the fiber class must be n.
    """

    cover_class: tuple[Fraction, ...]
    n: int
    g: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch("cover degree n must be at least 1")
        if self.g < 0:
            raise DimensionMismatch("arithmetic genus must be non-negative")
        object.__setattr__(
            self, "cover_class", tuple(_frac(x) for x in self.cover_class)
        )

    @property
    def chi(self) -> int:
        return euler_characteristic(self.d, self.g)

    def ramification(self, g_B: int) -> int:
        return ramification(self.g, self.n, g_B)

    def cover_element(self, fib: FibrationGeometry) -> RingElement:
        C = fib.ring.curve_class(self.cover_class)
        deg = fib.ring.integrate(C * fib.fiber_class())
        if deg != self.n:
            raise InconsistentKernel(
                f"cover class pairs to {deg} with the fiber, expected n={self.n}"
            )
        return C


@dataclass(frozen=True)
class KernelData:
    """Contractions of the universal-kernel character against the cover.

    G1 (a divisor class), G2 (a degree-4 pairing vector) and G3 (a
    rational) are the three pushed-down contractions; CQ is the pairing
    of the cover with the determinant-defect divisor Q.
    """

    r: int
    L: tuple[Fraction, ...]
    s: int
    G2: tuple[Fraction, ...]
    G3: Fraction
    CQ: Fraction
    G1: Optional[tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.r < 1:
            raise DimensionMismatch("kernel rank r must be at least 1")
        object.__setattr__(self, "L", tuple(_frac(x) for x in self.L))
        object.__setattr__(self, "G2", tuple(_frac(x) for x in self.G2))
        object.__setattr__(self, "G3", _frac(self.G3))
        object.__setattr__(self, "CQ", _frac(self.CQ))
        if self.G1 is not None:
            object.__setattr__(self, "G1", tuple(_frac(x) for x in self.G1))


def todd_relative(
    fib: FibrationGeometry,
    c2_over_12: Optional[Sequence[Rational]] = None,
    alpha: Optional[int] = None,
) -> RingElement:
    """Relative Todd class (1, -alpha f, c2/12, -2 alpha)."""
    ring = fib.ring
    if alpha is None:
        alpha = fib.alpha
    n = len(ring.divisors)
    kappa = _vec(c2_over_12, n) if c2_over_12 is not None else (Fraction(0),) * n
    return ring.element(
        deg0=1,
        deg2=tuple(-alpha * x for x in fib.fiber),
        deg4=kappa,
        deg6=-2 * alpha,
    )


def spectral_chern_general(
    fib: FibrationGeometry, sd: SpectralDatum, kd: KernelData
) -> RingElement:
    """Character of the transform of a spectral line bundle, from the
    kernel contractions.

    ch0 = r n, ch1 = n L + ((chi - alpha n) r - C.Q) f,
    ch2 = G2 + (chi - alpha n) L.f, ch3 = G3 + (chi - alpha n)(s - r).
    When G1 is supplied it is cross-checked against the Q-form of c1.
    """
    ring = fib.ring
    chi = sd.chi
    t = chi - fib.alpha * sd.n
    L = ring.element(deg2=kd.L)
    f = fib.fiber_class()
    ch1 = sd.n * L + (t * kd.r - kd.CQ) * f
    if kd.G1 is not None:
        g1_form = ring.element(deg2=kd.G1) + (t * kd.r) * f
        if g1_form.deg2 != ch1.deg2:
            raise InconsistentKernel(
                "G1-form of c1 disagrees with the Q-form: "
                f"{g1_form.deg2} vs {ch1.deg2}"
            )
    Lf = (L * f).deg4
    ch2 = tuple(g + t * lf for g, lf in zip(kd.G2, Lf))
    ch3 = kd.G3 + t * (kd.s - kd.r)
    return ring.element(deg0=kd.r * sd.n, deg2=ch1.deg2, deg4=ch2, deg6=ch3)


def spectral_chern_rank_one(fib: FibrationGeometry, sd: SpectralDatum) -> RingElement:
    """Rank-one (diagonal-ideal kernel) spectral character:
    (n, (d - R/2) f, -[C], d - R/2 - n(g_B - 1))."""
    R = 2 * sd.g - 2 - sd.n * (2 * fib.base_genus - 2)
    if R % 2:
        raise OddRamification(f"R={R} is odd; the character would be non-integral")
    C = sd.cover_element(fib)
    k = sd.d - R // 2
    ch1 = k * fib.fiber_class()
    return fib.ring.element(
        deg0=sd.n,
        deg2=ch1.deg2,
        deg4=tuple(-x for x in C.deg4),
        deg6=k - sd.n * (fib.base_genus - 1),
    )


def twist(ch: RingElement, D: Divisor) -> RingElement:
    """Multiply a character by exp(D) in its ring."""
    ring = ch.ring
    if not isinstance(D, RingElement):
        D = ring.divisor(D)
    elif D.ring != ring:
        raise RingMismatch("twisting divisor belongs to a different ring")
    return ch * ring.exp(D)


@dataclass(frozen=True)
class PartialCharacter:
    """Character known only through degree 2; higher degrees unspecified."""

    ch0: Fraction
    ch1_fiber: Fraction
    ch2: None = None
    ch3: None = None


def dual_rank_one_low_degree(sd: SpectralDatum, g_B: int = 0) -> PartialCharacter:
    """Low-degree character of the dual of a rank-one spectral sheaf:
    n + (R/2 - d) f.  Degrees 4 and 6 are not determined by the closed
    forms available and stay unspecified."""
    R = 2 * sd.g - 2 - sd.n * (2 * g_B - 2)
    if R % 2:
        raise OddRamification(f"R={R} is odd")
    return PartialCharacter(ch0=Fraction(sd.n), ch1_fiber=Fraction(R // 2 - sd.d))


# ---------------------------------------------------------------------------
# Trivial fibrations over an elliptic base
# ---------------------------------------------------------------------------

REFLEXIVE_GRAM = ((Fraction(2), Fraction(0)), (Fraction(0), Fraction(-12)))


@dataclass(frozen=True)
class ReflexiveK3Spec:
    """The fixed lattice data h^2 = 2, h.l = 0, l^2 = -12 with the
    distinguished non-effective class e = l + 2h."""

    gram: tuple[tuple[Fraction, ...], ...] = REFLEXIVE_GRAM
    e: tuple[Fraction, ...] = (Fraction(2), Fraction(1))  # coefficients over (h, l)

    def __post_init__(self):
        if self.gram != REFLEXIVE_GRAM or self.e != (Fraction(2), Fraction(1)):
            raise DimensionMismatch("reflexive K3 lattice data is fixed")

    def surface(self) -> SurfaceFactor:
        return SurfaceFactor(("h", "l"), self.gram)

    def threefold(self):
        """The product threefold S x B with divisor basis (h, l, f)."""
        return fibered_threefold(self.surface(), "f")

    def fibration(self) -> FibrationGeometry:
        return FibrationGeometry(self.threefold(), fiber=(0, 0, 1), base_genus=1)


def _cover_pairings(sd: SpectralDatum) -> tuple[Fraction, Fraction, Fraction]:
    if len(sd.cover_class) != 3:
        raise DimensionMismatch("cover class must pair against (h, l, f)")
    Ch, Cl, Cf = sd.cover_class
    if Cf != sd.n:
        raise InconsistentKernel(f"[C].f = {Cf} but n = {sd.n}")
    return Ch, Cl, Cf


def trivial_fibration_chern(
    sd: SpectralDatum,
    k3: ReflexiveK3Spec,
    CE: Optional[Rational] = None,
    HC: Optional[Rational] = None,
    base_genus: int = 1,
) -> RingElement:
    """Closed-form character on S x B (elliptic base):

    (2n, nL + k f, chi l - (C.E) h - 4n F - [C], -5 chi + H.[C])
    with k = 2 chi + C.E, where l and h in degree 4 denote the fiberwise
    curve classes l (x) pt and h (x) pt.
    """
    if base_genus != 1:
        raise BaseNotElliptic("the trivial-fibration formulas need g_B = 1")
    ring = k3.threefold()
    Ch, Cl, _ = _cover_pairings(sd)
    # C.E and H.C from the pairing vector: E = l + 2h, H = h.
    ce = _frac(CE) if CE is not None else Cl + 2 * Ch
    hc = _frac(HC) if HC is not None else Ch
    chi = sd.chi
    k = 2 * chi + ce
    # Degree-4 pairing vectors of h(x)pt, l(x)pt and F = pt(x)1.
    h_pt = (Fraction(2), Fraction(0), Fraction(0))
    l_pt = (Fraction(0), Fraction(-12), Fraction(0))
    F = (Fraction(0), Fraction(0), Fraction(1))
    ch2 = tuple(
        chi * lp - ce * hp - 4 * sd.n * fp - c
        for lp, hp, fp, c in zip(l_pt, h_pt, F, sd.cover_class)
    )
    return ring.element(
        deg0=2 * sd.n,
        deg2=(0, sd.n, k),  # n L + k f with L = l
        deg4=ch2,
        deg6=-5 * chi + hc,
    )


# ---------------------------------------------------------------------------
# Pushforward oracle
# ---------------------------------------------------------------------------

def _gram_inverse(gram) -> list[list[Fraction]]:
    n = len(gram)
    a = [[_frac(gram[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def diagonal_kernel(
    prod: ProductRing, surface_indices: tuple[int, int] = (0, 1)
) -> ProductElement:
    """Character of the structure sheaf of the relative diagonal of
    S x B inside S x S x B.

    Computed by pushing the inverse relative Todd class along the
    diagonal: [Delta_S] - 2 (pt x pt), with the middle component of
    [Delta_S] expanded over the tracked divisor lattice via the inverse
    Gram matrix.  Exact on every class lying in the tracked span.
    """
    i0, i1 = surface_indices
    S = prod.factors[i0]
    if not isinstance(S, SurfaceFactor) or prod.factors[i1] != S:
        raise RingMismatch("diagonal kernel needs two equal surface factors")
    ginv = _gram_inverse(S.gram)
    nfac = len(prod.factors)

    def key_at(l0: str, l1: str) -> tuple[str, ...]:
        key = ["1"] * nfac
        key[i0], key[i1] = l0, l1
        return tuple(key)

    terms: dict[tuple[str, ...], Fraction] = {
        key_at("1", "pt"): Fraction(1),
        key_at("pt", "1"): Fraction(1),
        key_at("pt", "pt"): Fraction(-2),
    }
    for a, da in enumerate(S.divisors):
        for b, db in enumerate(S.divisors):
            if ginv[a][b]:
                key = key_at(da, db)
                terms[key] = terms.get(key, Fraction(0)) + ginv[a][b]
    return ProductElement(prod, terms)


def trivial_fibration_product(k3: ReflexiveK3Spec) -> ProductRing:
    """The correspondence ring S x S x B (source S first, target S second)."""
    S = k3.surface()
    return ProductRing((S, S, CurveFactor()))


def _exp_E(k3: ReflexiveK3Spec, prod: ProductRing, surface_index: int) -> ProductElement:
    """exp(E) pulled to the product through one surface factor:
    1 + E - 2 F since E^2 = -4 on the surface."""
    nfac = len(prod.factors)

    def key_at(lbl: str) -> tuple[str, ...]:
        key = ["1"] * nfac
        key[surface_index] = lbl
        return tuple(key)

    eh, el = k3.e
    return ProductElement(
        prod,
        {
            ("1",) * nfac: Fraction(1),
            key_at("h"): eh,
            key_at("l"): el,
            key_at("pt"): Fraction(-2),
        },
    )


def reflexive_kernel(prod: ProductRing, k3: ReflexiveK3Spec) -> ProductElement:
    """Character of the extension kernel on S x S x B:
    pull(exp E, source) + (1 - ch O_Delta) . pull(exp E, target)."""
    unit = prod.unit()
    delta = diagonal_kernel(prod, (0, 1))
    return _exp_E(k3, prod, 0) + (unit - delta) * _exp_E(k3, prod, 1)


def grr_transform(
    chE: ProductElement,
    kernel: ProductElement,
    todd: ProductElement,
    prod: ProductRing,
    push_factor: int,
    source_factors: Sequence[int] = (0, 2),
) -> ProductElement:
    """Exact pullback-multiply-pushforward of a character through a
    correspondence kernel.

    ``chE`` and ``todd`` live on the source sub-product (selected by
    ``source_factors``) or directly on ``prod``; the kernel lives on
    ``prod``.  The result is an element of the product of the remaining
    factors.
    """
    if chE.ring != prod:
        chE = pullback(prod, chE, source_factors)
    if todd.ring != prod:
        todd = pullback(prod, todd, source_factors)
    if kernel.ring != prod:
        raise RingMismatch("kernel must live on the full product ring")
    return pushforward(prod, push_factor, chE * todd * kernel)


def spectral_source_character(
    sd: SpectralDatum, k3: ReflexiveK3Spec
) -> ProductElement:
    """ch(i_* L) = (0, 0, [C], chi) on the source S x B, with
    [C] = n (pt x 1) + a_C (x) pt recovered from the pairing vector."""
    Ch, Cl, _ = _cover_pairings(sd)
    x = Ch / 2       # h-coefficient of the surface part a_C
    y = Cl / -12     # l-coefficient
    src = ProductRing((k3.surface(), CurveFactor()))
    terms = {
        ("pt", "1"): Fraction(sd.n),
        ("h", "pt"): x,
        ("l", "pt"): y,
        ("pt", "pt"): Fraction(sd.chi),
    }
    return ProductElement(src, {k: v for k, v in terms.items() if v})


def source_todd(k3: ReflexiveK3Spec) -> ProductElement:
    """Td(S x B / B) = (1, 0, 2F, 0) on the source S x B."""
    src = ProductRing((k3.surface(), CurveFactor()))
    return ProductElement(src, {("1", "1"): Fraction(1), ("pt", "1"): Fraction(2)})


def oracle_spectral_chern(
    sd: SpectralDatum, k3: ReflexiveK3Spec, twisted: bool = True
) -> RingElement:
    """Recompute the trivial-fibration character through the pushforward
    oracle: transform by the extension kernel on S x S x B, convert to
    the threefold ring, and (by default) twist by -H.
    """
    prod = trivial_fibration_product(k3)
    kernel = reflexive_kernel(prod, k3)
    result = grr_transform(
        spectral_source_character(sd, k3),
        kernel,
        source_todd(k3),
        prod,
        push_factor=0,
        source_factors=(0, 2),
    )
    ring = k3.threefold()
    target = ProductRing((k3.surface(), CurveFactor()))
    ch = to_threefold(target, result, ring)
    if twisted:
        ch = twist(ch, -ring.divisor("h"))
    return ch


def untwisted_transform_chern(sd: SpectralDatum, k3: ReflexiveK3Spec) -> RingElement:
    """Closed form of the untwisted transform:
    (2n, nE + (2 chi + C.E) f, -2nF + chi E.f - [C], -3 chi - C.E)."""
    ring = k3.threefold()
    Ch, Cl, _ = _cover_pairings(sd)
    ce = Cl + 2 * Ch
    chi = sd.chi
    k = 2 * chi + ce
    # E.f = e (x) pt has pairings (e.h, e.l, 0) = (4, -12, 0).
    e_pt = (Fraction(4), Fraction(-12), Fraction(0))
    F = (Fraction(0), Fraction(0), Fraction(1))
    ch2 = tuple(
        -2 * sd.n * fp + chi * ep - c for fp, ep, c in zip(F, e_pt, sd.cover_class)
    )
    return ring.element(
        deg0=2 * sd.n,
        deg2=(2 * sd.n, sd.n, k),  # nE + k f with E = l + 2h
        deg4=ch2,
        deg6=-3 * chi - ce,
    )
