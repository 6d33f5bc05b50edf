"""Exact graded numerical intersection rings.

A threefold ring is presented by a divisor basis and its symmetric triple
intersection tensor.  Elements are graded vectors over exact rationals:

* degree 0 -- a scalar,
* degree 2 -- coefficients over the divisor basis,
* degree 4 -- a numerical class, stored by its intersection numbers
  against each basis divisor,
* degree 6 -- the coefficient of the fundamental class, normalized so
  that integration sends it to 1.

K3-surface and curve rings exist as factors of Kunneth product rings,
which provide the integration/pushforward machinery used by the
pushforward oracle.  All arithmetic is exact (``fractions.Fraction``);
nothing here touches floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    AsymmetricTensor,
    DimensionMismatch,
    IndexOutOfRange,
    RingMismatch,
    TruncationTooLarge,
)

Rational = Union[int, Fraction]


def _frac(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _vec(values: Optional[Sequence[Rational]], n: int) -> tuple[Fraction, ...]:
    if values is None:
        return (Fraction(0),) * n
    vals = tuple(_frac(v) for v in values)
    if len(vals) != n:
        raise DimensionMismatch(f"expected {n} components, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# Ring specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntersectionRingSpec:
    """Presentation data for a threefold (dim_top=3), K3 surface (2) or
    curve (1) ring.

    For threefolds ``triple[i][j][k]`` is the intersection number
    D_i.D_j.D_k; for surfaces ``gram[i][j]`` is D_i.D_j.  Curves carry no
    pairing data.
    """

    divisor_names: tuple[str, ...]
    triple: Optional[tuple[tuple[tuple[Rational, ...], ...], ...]] = None
    gram: Optional[tuple[tuple[Rational, ...], ...]] = None
    dim_top: int = 3


def ring_from_spec(spec: IntersectionRingSpec):
    """Validate a ring presentation and return a ring handle.

    Raises :class:`AsymmetricTensor` if the tensor (or Gram matrix) fails
    permutation symmetry and :class:`DimensionMismatch` if its shape does
    not match the divisor basis.
    """
    names = tuple(spec.divisor_names)
    if len(set(names)) != len(names):
        raise DimensionMismatch("duplicate divisor names")
    n = len(names)
    if spec.dim_top == 3:
        triple = spec.triple if spec.triple is not None else ()
        if len(triple) != n or any(
            len(row) != n or any(len(col) != n for col in row) for row in triple
        ):
            raise DimensionMismatch("triple tensor shape does not match basis")
        t = tuple(
            tuple(tuple(_frac(x) for x in row) for row in plane) for plane in triple
        )
        for i, j, k in itertools.product(range(n), repeat=3):
            for p, q, r in itertools.permutations((i, j, k)):
                if t[i][j][k] != t[p][q][r]:
                    raise AsymmetricTensor(
                        f"d[{names[i]},{names[j]},{names[k]}]={t[i][j][k]} "
                        f"!= d[{names[p]},{names[q]},{names[r]}]={t[p][q][r]}"
                    )
        return IntersectionRing(names, t)
    if spec.dim_top == 2:
        gram = spec.gram if spec.gram is not None else ()
        if len(gram) != n or any(len(row) != n for row in gram):
            raise DimensionMismatch("Gram matrix shape does not match basis")
        g = tuple(tuple(_frac(x) for x in row) for row in gram)
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise AsymmetricTensor(
                        f"gram[{names[i]},{names[j]}] != gram[{names[j]},{names[i]}]"
                    )
            if g[i][i] % 2 != 0:
                raise AsymmetricTensor(
                    f"odd self-intersection {g[i][i]} for {names[i]}: "
                    "the K3 lattice is even"
                )
        return SurfaceFactor(names, g)
    if spec.dim_top == 1:
        if n:
            raise DimensionMismatch("curve rings carry no divisor basis")
        return CurveFactor()
    raise DimensionMismatch(f"unsupported dim_top {spec.dim_top}")


# ---------------------------------------------------------------------------
# Threefold rings
# ---------------------------------------------------------------------------

class IntersectionRing:
    """Numerical intersection ring of a threefold.  Immutable."""

    def __init__(self, names: tuple[str, ...], triple):
        self._names = names
        self._triple = triple

    @property
    def divisors(self) -> tuple[str, ...]:
        return self._names

    def triple(self, i: int, j: int, k: int) -> Fraction:
        return self._triple[i][j][k]

    def __eq__(self, other):
        return (
            isinstance(other, IntersectionRing)
            and self._names == other._names
            and self._triple == other._triple
        )

    def __hash__(self):
        return hash((self._names, self._triple))

    def __repr__(self):
        return f"IntersectionRing({self._names})"

    # -- element constructors ------------------------------------------------

    def element(
        self,
        deg0: Rational = 0,
        deg2: Optional[Sequence[Rational]] = None,
        deg4: Optional[Sequence[Rational]] = None,
        deg6: Rational = 0,
    ) -> "RingElement":
        n = len(self._names)
        return RingElement(self, _frac(deg0), _vec(deg2, n), _vec(deg4, n), _frac(deg6))

    def zero(self) -> "RingElement":
        return self.element()

    def one(self) -> "RingElement":
        return self.element(deg0=1)

    def fundamental(self) -> "RingElement":
        return self.element(deg6=1)

    def divisor(self, coeffs: Union[str, Sequence[Rational]]) -> "RingElement":
        """Degree-2 element from a basis name or a coefficient vector."""
        if isinstance(coeffs, str):
            if coeffs not in self._names:
                raise DimensionMismatch(f"unknown divisor {coeffs!r}")
            coeffs = [1 if nm == coeffs else 0 for nm in self._names]
        return self.element(deg2=coeffs)

    def curve_class(self, pairings: Sequence[Rational]) -> "RingElement":
        """Degree-4 element from its pairings against the divisor basis."""
        return self.element(deg4=pairings)

    # -- arithmetic ----------------------------------------------------------

    def mul(self, a: "RingElement", b: "RingElement") -> "RingElement":
        if a.ring != self or b.ring != self:
            raise RingMismatch("operands do not belong to this ring")
        n = len(self._names)
        deg0 = a.deg0 * b.deg0
        deg2 = tuple(a.deg0 * b.deg2[i] + b.deg0 * a.deg2[i] for i in range(n))
        pair = [Fraction(0)] * n
        for i in range(n):
            if not a.deg2[i]:
                continue
            for j in range(n):
                if not b.deg2[j]:
                    continue
                c = a.deg2[i] * b.deg2[j]
                for k in range(n):
                    pair[k] += c * self._triple[i][j][k]
        deg4 = tuple(
            a.deg0 * b.deg4[k] + b.deg0 * a.deg4[k] + pair[k] for k in range(n)
        )
        deg6 = (
            a.deg0 * b.deg6
            + b.deg0 * a.deg6
            + sum((a.deg2[k] * b.deg4[k] for k in range(n)), Fraction(0))
            + sum((b.deg2[k] * a.deg4[k] for k in range(n)), Fraction(0))
        )
        return RingElement(self, deg0, deg2, deg4, deg6)

    def integrate(self, a: "RingElement") -> Fraction:
        if a.ring != self:
            raise RingMismatch("element does not belong to this ring")
        return a.deg6

    def exp(self, d: "RingElement") -> "RingElement":
        """exp(D) = 1 + D + D^2/2 + D^3/6 for a divisor class D."""
        if d.deg0 or any(d.deg4) or d.deg6:
            raise DimensionMismatch("exp is defined for pure divisor classes")
        d2 = self.mul(d, d)
        d3 = self.mul(d2, d)
        return self.one() + d + d2 * Fraction(1, 2) + d3 * Fraction(1, 6)


@dataclass(frozen=True)
class RingElement:
    """Graded numerical class of a threefold ring (degrees 0, 2, 4, 6)."""

    ring: IntersectionRing = field(compare=False)
    deg0: Fraction = Fraction(0)
    deg2: tuple[Fraction, ...] = ()
    deg4: tuple[Fraction, ...] = ()
    deg6: Fraction = Fraction(0)

    def __add__(self, other: "RingElement") -> "RingElement":
        if self.ring != other.ring:
            raise RingMismatch("cannot add elements of different rings")
        return RingElement(
            self.ring,
            self.deg0 + other.deg0,
            tuple(x + y for x, y in zip(self.deg2, other.deg2)),
            tuple(x + y for x, y in zip(self.deg4, other.deg4)),
            self.deg6 + other.deg6,
        )

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __neg__(self) -> "RingElement":
        return self * Fraction(-1)

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            return self.ring.mul(self, other)
        c = _frac(other)
        return RingElement(
            self.ring,
            self.deg0 * c,
            tuple(x * c for x in self.deg2),
            tuple(x * c for x in self.deg4),
            self.deg6 * c,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RingElement):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.deg0 == other.deg0
            and self.deg2 == other.deg2
            and self.deg4 == other.deg4
            and self.deg6 == other.deg6
        )

    def __hash__(self):
        return hash((self.deg0, self.deg2, self.deg4, self.deg6))


# ---------------------------------------------------------------------------
# Kunneth product rings
# ---------------------------------------------------------------------------

class SurfaceFactor:
    """K3-surface ring used as a product factor.

    Basis labels: "1" (degree 0), the divisor names (degree 2) and "pt"
    (degree 4, the point class, integral 1).
    """

    def __init__(self, names: tuple[str, ...], gram):
        self.divisors = tuple(names)
        self.gram = gram
        self.top_degree = 4
        self.top_label = "pt"

    def degree_of(self, label: str) -> int:
        if label == "1":
            return 0
        if label == self.top_label:
            return self.top_degree
        if label in self.divisors:
            return 2
        raise DimensionMismatch(f"unknown surface label {label!r}")

    def labels(self) -> tuple[str, ...]:
        return ("1",) + self.divisors + ("pt",)

    def pairing(self, a: str, b: str) -> Fraction:
        i = self.divisors.index(a)
        j = self.divisors.index(b)
        return self.gram[i][j]

    def mul_basis(self, a: str, b: str) -> dict[str, Fraction]:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        if a in self.divisors and b in self.divisors:
            g = self.pairing(a, b)
            return {"pt": g} if g else {}
        return {}

    def __eq__(self, other):
        return (
            isinstance(other, SurfaceFactor)
            and self.divisors == other.divisors
            and self.gram == other.gram
        )

    def __hash__(self):
        return hash((self.divisors, self.gram))


class CurveFactor:
    """Curve ring used as a product factor: basis "1" and "pt"."""

    def __init__(self):
        self.divisors = ()
        self.top_degree = 2
        self.top_label = "pt"

    def degree_of(self, label: str) -> int:
        if label == "1":
            return 0
        if label == "pt":
            return 2
        raise DimensionMismatch(f"unknown curve label {label!r}")

    def labels(self) -> tuple[str, ...]:
        return ("1", "pt")

    def mul_basis(self, a: str, b: str) -> dict[str, Fraction]:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        return {}

    def __eq__(self, other):
        return isinstance(other, CurveFactor)

    def __hash__(self):
        return hash("CurveFactor")


Factor = Union[SurfaceFactor, CurveFactor]
Key = tuple[str, ...]


class ProductRing:
    """Kunneth product of surface and curve rings, truncated in total degree.

    All classes are even-degree, so the Kunneth sign is +1 throughout.
    """

    def __init__(self, factors: Sequence[Factor], truncation: Optional[int] = None):
        self.factors = tuple(factors)
        full = sum(f.top_degree for f in self.factors)
        if truncation is None:
            truncation = full
        if truncation > full:
            raise TruncationTooLarge(
                f"truncation {truncation} exceeds total dimension {full}"
            )
        self.truncation = truncation

    def __eq__(self, other):
        return (
            isinstance(other, ProductRing)
            and self.factors == other.factors
            and self.truncation == other.truncation
        )

    def __hash__(self):
        return hash((self.factors, self.truncation))

    def key_degree(self, key: Key) -> int:
        return sum(f.degree_of(lbl) for f, lbl in zip(self.factors, key))

    def zero(self) -> "ProductElement":
        return ProductElement(self, {})

    def unit(self) -> "ProductElement":
        return self.basis(("1",) * len(self.factors))

    def top_key(self) -> Key:
        return tuple(f.top_label for f in self.factors)

    def basis(self, key: Key, coeff: Rational = 1) -> "ProductElement":
        key = tuple(key)
        if len(key) != len(self.factors):
            raise DimensionMismatch("key length does not match factor count")
        for f, lbl in zip(self.factors, key):
            f.degree_of(lbl)
        if self.key_degree(key) > self.truncation:
            return self.zero()
        return ProductElement(self, {key: _frac(coeff)})

    def element(self, terms: Mapping[Key, Rational]) -> "ProductElement":
        out = self.zero()
        for key, coeff in terms.items():
            out = out + self.basis(key, coeff)
        return out

    def mul(self, a: "ProductElement", b: "ProductElement") -> "ProductElement":
        if a.ring != self or b.ring != self:
            raise RingMismatch("operands do not belong to this product ring")
        terms: dict[Key, Fraction] = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                partials = [ca * cb]
                keys: list[Key] = [()]
                dead = False
                for f, la, lb in zip(self.factors, ka, kb):
                    prod = f.mul_basis(la, lb)
                    if not prod:
                        dead = True
                        break
                    new_keys = []
                    new_partials = []
                    for key, coeff in zip(keys, partials):
                        for lbl, c in prod.items():
                            new_keys.append(key + (lbl,))
                            new_partials.append(coeff * c)
                    keys, partials = new_keys, new_partials
                if dead:
                    continue
                for key, coeff in zip(keys, partials):
                    if self.key_degree(key) > self.truncation:
                        continue
                    terms[key] = terms.get(key, Fraction(0)) + coeff
        return ProductElement(self, {k: c for k, c in terms.items() if c})

    def integrate(self, a: "ProductElement") -> Fraction:
        """Integral over the whole product: product of factor integrals on
        the top Kunneth component."""
        if a.ring != self:
            raise RingMismatch("element does not belong to this product ring")
        return a.terms.get(self.top_key(), Fraction(0))


@dataclass
class ProductElement:
    ring: ProductRing
    terms: dict[Key, Fraction]

    def __add__(self, other: "ProductElement") -> "ProductElement":
        if self.ring != other.ring:
            raise RingMismatch("cannot add elements of different product rings")
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + coeff
        return ProductElement(self.ring, {k: c for k, c in out.items() if c})

    def __sub__(self, other: "ProductElement") -> "ProductElement":
        return self + (-other)

    def __neg__(self) -> "ProductElement":
        return self * Fraction(-1)

    def __mul__(self, other) -> "ProductElement":
        if isinstance(other, ProductElement):
            return self.ring.mul(self, other)
        c = _frac(other)
        return ProductElement(
            self.ring, {k: v * c for k, v in self.terms.items() if v * c}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ProductElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms


def tensor_product(
    specs: Sequence[Union[IntersectionRingSpec, Factor]],
    truncation: Optional[int] = None,
) -> ProductRing:
    """Kunneth product ring of validated surface/curve factors."""
    factors = []
    for spec in specs:
        if isinstance(spec, IntersectionRingSpec):
            factor = ring_from_spec(spec)
            if isinstance(factor, IntersectionRing):
                raise DimensionMismatch(
                    "threefold rings cannot be product factors"
                )
            factors.append(factor)
        else:
            factors.append(spec)
    return ProductRing(factors, truncation)


def pushforward(prod: ProductRing, factor_index: int, a: ProductElement):
    """Integrate out one Kunneth factor.

    Lowers total degree by the dimension of the factor: components that
    are top-degree in the selected factor survive with the factor label
    dropped; all others are annihilated.  Returns an element of the
    product of the remaining factors (or a scalar when none remain).
    """
    if a.ring != prod:
        raise RingMismatch("element does not belong to this product ring")
    if not 0 <= factor_index < len(prod.factors):
        raise IndexOutOfRange(f"no factor with index {factor_index}")
    top = prod.factors[factor_index].top_label
    remaining = prod.factors[:factor_index] + prod.factors[factor_index + 1 :]
    if not remaining:
        return a.terms.get((top,), Fraction(0))
    target = ProductRing(remaining)
    out: dict[Key, Fraction] = {}
    for key, coeff in a.terms.items():
        if key[factor_index] != top:
            continue
        new_key = key[:factor_index] + key[factor_index + 1 :]
        out[new_key] = out.get(new_key, Fraction(0)) + coeff
    return ProductElement(target, {k: c for k, c in out.items() if c})


def pullback(
    prod: ProductRing, a: ProductElement, factor_indices: Sequence[int]
) -> ProductElement:
    """Embed an element of a sub-product into ``prod`` by inserting the
    unit in every factor not listed in ``factor_indices``."""
    indices = tuple(factor_indices)
    if len(indices) != len(a.ring.factors):
        raise DimensionMismatch("factor_indices must match the source factors")
    for pos, idx in zip(indices, a.ring.factors):
        if not 0 <= pos < len(prod.factors):
            raise IndexOutOfRange(f"no factor with index {pos}")
        if prod.factors[pos] != idx:
            raise RingMismatch(f"factor {pos} of the product differs from the source")
    out: dict[Key, Fraction] = {}
    for key, coeff in a.terms.items():
        new_key = ["1"] * len(prod.factors)
        for pos, lbl in zip(indices, key):
            new_key[pos] = lbl
        out[tuple(new_key)] = coeff
    return ProductElement(prod, out)


# ---------------------------------------------------------------------------
# Surface x curve products as threefold rings
# ---------------------------------------------------------------------------

def fibered_threefold(surface: SurfaceFactor, fiber_name: str = "f") -> IntersectionRing:
    """Threefold ring of S x B with divisor basis (surface divisors, fiber).

    Triple numbers follow the Kunneth rule: D_i.D_j.f equals the surface
    pairing, every product involving f twice (or three surface divisors)
    vanishes.
    """
    names = surface.divisors + (fiber_name,)
    n = len(names)
    nf = n - 1
    triple = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(nf):
        for j in range(nf):
            g = surface.gram[i][j]
            triple[i][j][nf] = g
            triple[i][nf][j] = g
            triple[nf][i][j] = g
    spec = IntersectionRingSpec(
        names, tuple(tuple(tuple(row) for row in plane) for plane in triple)
    )
    return ring_from_spec(spec)


def to_threefold(
    prod: ProductRing, a: ProductElement, ring: IntersectionRing
) -> RingElement:
    """Convert an element of a surface x curve product to the associated
    threefold ring, with degree-4 classes passing to their numerical
    (pairing-vector) representation."""
    if len(prod.factors) != 2 or not isinstance(prod.factors[0], SurfaceFactor):
        raise DimensionMismatch("expected a surface x curve product")
    surface = prod.factors[0]
    if not isinstance(prod.factors[1], CurveFactor):
        raise DimensionMismatch("second factor must be a curve ring")
    names = ring.divisors
    if names[:-1] != surface.divisors:
        raise RingMismatch("threefold ring does not extend the surface basis")
    n = len(names)
    deg0 = Fraction(0)
    deg2 = [Fraction(0)] * n
    deg4 = [Fraction(0)] * n
    deg6 = Fraction(0)
    for (ls, lb), coeff in a.terms.items():
        ds = surface.degree_of(ls)
        db = prod.factors[1].degree_of(lb)
        total = ds + db
        if total == 0:
            deg0 += coeff
        elif total == 2:
            if ds == 2:
                deg2[surface.divisors.index(ls)] += coeff
            else:
                deg2[n - 1] += coeff  # the fiber class 1 (x) pt
        elif total == 4:
            if ds == 2:  # fiberwise curve class D (x) pt
                i = surface.divisors.index(ls)
                for k in range(n - 1):
                    deg4[k] += coeff * surface.gram[i][k]
            else:  # pt (x) 1: the section-direction fiber F, pairs only with f
                deg4[n - 1] += coeff
        else:
            deg6 += coeff
    return ring.element(deg0, deg2, deg4, deg6)
