"""Fiberwise Mukai-vector arithmetic and the fine-moduli admissibility test."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence, Union

from .chow import IntersectionRing, RingElement, Rational, _frac
from .errors import DimensionMismatch, NonIntegralA, RingMismatch

Divisor = Union[RingElement, Sequence[Rational], str]


@dataclass(frozen=True)
class FibrationGeometry:
    """A fibered threefold: its ring, the fiber class and the base genus.

    alpha = 1 - g_B is the degree-one Todd coefficient of the base curve.
    The fiber class must square to zero against every divisor; this is
    checked at construction.
    """

    ring: IntersectionRing
    fiber: tuple[Fraction, ...]
    base_genus: int

    def __post_init__(self):
        if self.base_genus < 0:
            raise DimensionMismatch("base genus must be non-negative")
        f = self.fiber_class()
        f2 = f * f
        if any(f2.deg4) or f2.deg6:
            raise DimensionMismatch("fiber class does not square to zero")

    @property
    def alpha(self) -> int:
        return 1 - self.base_genus

    def fiber_class(self) -> RingElement:
        return self.ring.element(deg2=self.fiber)

    def divisor(self, d: Divisor) -> RingElement:
        if isinstance(d, RingElement):
            if d.ring != self.ring:
                raise RingMismatch("divisor belongs to a different ring")
            return d
        return self.ring.divisor(d)


@dataclass(frozen=True)
class FiberRestriction:
    """Pairings of (H, L) restricted to the generic fiber."""

    Ht2: Fraction
    LtHt: Fraction
    Lt2: Fraction

    def a(self, r: int) -> Fraction:
        """Linear Hilbert coefficient a = L_t.H_t - r H_t^2 / 2."""
        return self.LtHt - Fraction(r) * self.Ht2 / 2


@dataclass(frozen=True)
class MukaiVector:
    """Fiberwise invariants (r, restriction of L, s)."""

    r: int
    restriction: FiberRestriction
    s: int

    def __post_init__(self):
        if self.r <= 0:
            raise DimensionMismatch("rank r must be positive")


def restrict_to_fiber(L: Divisor, H: Divisor, fib: FibrationGeometry) -> FiberRestriction:
    """Compute (H^2.f, L.H.f, L^2.f) by exact ring arithmetic."""
    ring = fib.ring
    Le = fib.divisor(L)
    He = fib.divisor(H)
    f = fib.fiber_class()
    return FiberRestriction(
        Ht2=ring.integrate(He * He * f),
        LtHt=ring.integrate(Le * He * f),
        Lt2=ring.integrate(Le * Le * f),
    )


def mukai_square(v: MukaiVector) -> Fraction:
    """Self-pairing v^2 = L_t^2 - 2 r s."""
    return v.restriction.Lt2 - 2 * v.r * v.s


@dataclass(frozen=True)
class HilbertPolynomial:
    """P(m) = quadratic m^2 + linear m + constant, plus the binomial form
    leading * C(m+1, 2) + a * m + constant."""

    quadratic: Fraction
    linear: Fraction
    constant: Fraction
    leading: Fraction
    a: Fraction

    def __call__(self, m: Rational) -> Fraction:
        m = _frac(m)
        return self.quadratic * m * m + self.linear * m + self.constant


def hilbert_polynomial(v: MukaiVector) -> HilbertPolynomial:
    rest = v.restriction
    return HilbertPolynomial(
        quadratic=Fraction(v.r) * rest.Ht2 / 2,
        linear=rest.LtHt,
        constant=Fraction(v.r + v.s),
        leading=Fraction(v.r) * rest.Ht2,
        a=rest.a(v.r),
    )


@dataclass(frozen=True)
class AdmissibilityVerdict:
    gcd_triple: tuple[int, int, int]
    gcd_value: int
    gcd_ok: bool
    square: Fraction
    square_ok: bool

    @property
    def passed(self) -> bool:
        return self.gcd_ok and self.square_ok


def fine_moduli_check(v: MukaiVector) -> AdmissibilityVerdict:
    """Numerical admissibility for a fine relative moduli component.

    Requires gcd(r H_t^2, a, s + r) = 1 together with v^2 = 0.  The gcd is
    taken over the integers with gcd(0, x) = |x|, so a vanishing middle
    argument is allowed (the worked admissible example has a = 0).
    Raises :class:`NonIntegralA` when a is a half-integer.
    """
    rest = v.restriction
    a = rest.a(v.r)
    lead = Fraction(v.r) * rest.Ht2
    if a.denominator != 1 or lead.denominator != 1:
        raise NonIntegralA(f"a = {a} is not an integer for r={v.r}")
    triple = (int(lead), int(a), v.s + v.r)
    g = gcd(abs(triple[0]), abs(triple[1]), abs(triple[2]))
    square = mukai_square(v)
    return AdmissibilityVerdict(
        gcd_triple=triple,
        gcd_value=g,
        gcd_ok=(g == 1),
        square=square,
        square_ok=(square == 0),
    )
