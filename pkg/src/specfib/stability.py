"""Slope, discriminant and effective stability-bound arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .chow import RingElement
from .errors import HypothesisViolated, ZeroRank
from .fiber_k3 import Divisor, FibrationGeometry


def relative_degree(ch: RingElement, H: Divisor, fib: FibrationGeometry) -> Fraction:
    """d = c1 . H . f, the degree of the restriction to a generic fiber."""
    ring = fib.ring
    c1 = ring.element(deg2=ch.deg2)
    return ring.integrate(c1 * fib.divisor(H) * fib.fiber_class())


def relative_slope(ch: RingElement, H: Divisor, fib: FibrationGeometry) -> Fraction:
    if ch.deg0 == 0:
        raise ZeroRank("relative slope needs nonzero rank")
    return relative_degree(ch, H, fib) / ch.deg0


def chern_c2(ch: RingElement) -> tuple[Fraction, ...]:
    """c2 = c1^2 / 2 - ch2 as a degree-4 pairing vector."""
    ring = ch.ring
    c1 = ring.element(deg2=ch.deg2)
    c1sq = (c1 * c1).deg4
    return tuple(x / 2 - y for x, y in zip(c1sq, ch.deg4))


def discriminant(ch: RingElement) -> tuple[Fraction, ...]:
    """Bogomolov discriminant B = 2m c2 - (m - 1) c1^2 of a rank-m
    character, as a degree-4 pairing vector.

    Algebraically B = c1^2 - 2m ch2, which is how twist invariance is
    seen; both forms agree identically.
    """
    m = ch.deg0
    if m <= 0 or m.denominator != 1:
        raise ZeroRank(f"discriminant needs a positive integer rank, got {m}")
    ring = ch.ring
    c1 = ring.element(deg2=ch.deg2)
    c1sq = (c1 * c1).deg4
    c2 = chern_c2(ch)
    return tuple(2 * m * b - (m - 1) * a for a, b in zip(c1sq, c2))


@dataclass(frozen=True)
class StabilityReport:
    """Effective threshold report: the sheaf is mu-stable for the
    polarization H0 + M f whenever M >= M0 = (rank^2 / 8)(B.H0)(H0^2 f)."""

    rank: Fraction
    B: tuple[Fraction, ...]
    BH0: Fraction
    H02f: Fraction
    M0: Fraction
    bogomolov_violated: bool

    @property
    def M0_ceil(self) -> int:
        return -((-self.M0.numerator) // self.M0.denominator)


def stability_bound(
    ch: RingElement, H0: Divisor, fib: FibrationGeometry
) -> StabilityReport:
    ring = fib.ring
    H0e = fib.divisor(H0)
    B = discriminant(ch)
    Be = ring.element(deg4=B)
    BH0 = ring.integrate(Be * H0e)
    H02f = ring.integrate(H0e * H0e * fib.fiber_class())
    M0 = ch.deg0 * ch.deg0 / 8 * BH0 * H02f
    return StabilityReport(
        rank=ch.deg0,
        B=B,
        BH0=BH0,
        H02f=H02f,
        M0=M0,
        bogomolov_violated=BH0 < 0,
    )


def polarization_threshold(
    D: Divisor, k: int, H0: Divisor, fib: FibrationGeometry
) -> Fraction:
    """Threshold (k/2)(H0^2 f) valid for divisors with 0 > D^2 H0 >= -k."""
    if k <= 0:
        raise HypothesisViolated("k must be a positive integer")
    ring = fib.ring
    De = fib.divisor(D)
    H0e = fib.divisor(H0)
    d2h = ring.integrate(De * De * H0e)
    if not (-k <= d2h < 0):
        raise HypothesisViolated(f"need 0 > D^2 H0 >= -{k}, got D^2 H0 = {d2h}")
    return Fraction(k, 2) * ring.integrate(H0e * H0e * fib.fiber_class())


@dataclass(frozen=True)
class ExtensionVerdict:
    mu_E: Fraction
    mu_G: Fraction
    mu_F: Fraction
    bound_rhs: Fraction
    bound_ok: bool       # mu_H(G) < mu_H(E) + rk(F) / (rk(E) rk(G))
    slope_ok: bool       # mu_H(E) < mu_H(F)

    @property
    def passed(self) -> bool:
        return self.bound_ok and self.slope_ok


def _slope_h(ch: RingElement, H: RingElement) -> Fraction:
    if ch.deg0 == 0:
        raise ZeroRank("slope needs nonzero rank")
    ring = ch.ring
    c1 = ring.element(deg2=ch.deg2)
    return ring.integrate(c1 * H * H) / ch.deg0


def extension_check(
    chE: RingElement, chG: RingElement, H: Union[Divisor, RingElement]
) -> ExtensionVerdict:
    """Slope conditions for a non-split extension of E by G to be stable.

    The extension F has ch(F) = ch(E) + ch(G) (Whitney sum).  Slopes are
    mu_H = c1 . H^2 / rank; only slope differences enter the bound, so
    the normalization of H^2 is immaterial for the verdict.
    """
    ring = chE.ring
    He = H if isinstance(H, RingElement) else ring.divisor(H)
    chF = chE + chG
    mu_E = _slope_h(chE, He)
    mu_G = _slope_h(chG, He)
    mu_F = _slope_h(chF, He)
    rhs = mu_E + chF.deg0 / (chE.deg0 * chG.deg0)
    return ExtensionVerdict(
        mu_E=mu_E,
        mu_G=mu_G,
        mu_F=mu_F,
        bound_rhs=rhs,
        bound_ok=mu_G < rhs,
        slope_ok=mu_E < mu_F,
    )
