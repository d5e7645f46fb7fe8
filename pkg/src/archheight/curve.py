"""Weierstrass models, their b-invariants and the x-coordinate duplication map."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from . import numeric
from .errors import DegeneratePoint, NumericBreakdown, SingularCurve


class Place(str, Enum):
    """Kind of archimedean place a model is considered at."""

    REAL = "real"
    COMPLEX = "complex"


def _exact(value):
    """Return ``value`` as a Fraction when it is real, else None."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a curve coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, tuple):
        re, im = (Fraction(v) for v in value)
        return re if im == 0 else None
    if isinstance(value, complex) and value.imag == 0:
        return Fraction(value.real)
    return None


def b_invariants(a1, a2, a3, a4, a6):
    """Standard b-invariants and discriminant, in whatever arithmetic the inputs use."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, disc


def delta_components(b2, b4, b6, b8, x1, x2):
    """(delta1, delta2) at (x1, x2); works on scalars and numpy arrays alike."""
    x1sq = x1 * x1
    x2sq = x2 * x2
    x1x2 = x1 * x2
    d1 = x1sq * x1sq - b4 * x1sq * x2sq - 2 * b6 * x1x2 * x2sq - b8 * x2sq * x2sq
    d2 = 4 * x1sq * x1x2 + b2 * x1sq * x2sq + 2 * b4 * x1x2 * x2sq + b6 * x2sq * x2sq
    return d1, d2


@dataclass(frozen=True)
class ProjectivePoint:
    """A representative (x1, x2) of a point of P^1; never (0, 0)."""

    x1: complex
    x2: complex

    def __post_init__(self):
        if self.x1 == 0 and self.x2 == 0:
            raise DegeneratePoint("(0, 0) does not represent a point of P^1")

    def sup_norm(self):
        return max(abs(self.x1), abs(self.x2))

    def normalized(self) -> "ProjectivePoint":
        s = self.sup_norm()
        return ProjectivePoint(self.x1 / s, self.x2 / s)

    def scaled(self, lam) -> "ProjectivePoint":
        return ProjectivePoint(lam * self.x1, lam * self.x2)

    def is_infinity(self) -> bool:
        return self.x2 == 0

    def cross(self, other: "ProjectivePoint"):
        """|x1 y2 - x2 y1| of sup-norm normalised representatives."""
        p, q = self.normalized(), other.normalized()
        return abs(p.x1 * q.x2 - p.x2 * q.x1)


INFINITY = ProjectivePoint(1, 0)


@dataclass(frozen=True)
class CurveModel:
    """
    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    ``a1..a6`` keep the caller's values (Fractions for rational input).  The
    derived ``b2..b8`` and ``disc`` are working-precision numbers: real when
    the model is real, complex otherwise.  For rational models ``exact``
    holds (b2, b4, b6, b8, disc) as Fractions.
    """

    a1: object
    a2: object
    a3: object
    a4: object
    a6: object
    b2: object
    b4: object
    b6: object
    b8: object
    disc: object
    exact: Optional[tuple] = None

    @property
    def a_invariants(self) -> tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def numeric_a(self) -> tuple:
        """a1..a6 as working-precision numbers."""
        if self.exact is not None:
            return tuple(numeric.to_real(a) for a in self.a_invariants)
        return self.a_invariants

    @property
    def is_real(self) -> bool:
        return self.exact is not None or all(b.imag == 0 for b in (self.b2, self.b4, self.b6, self.b8))

    @property
    def disc_sign(self) -> Optional[int]:
        """Sign of the discriminant for real models, None for non-real ones."""
        if self.exact is not None:
            d = self.exact[4]
            return (d > 0) - (d < 0)
        if not self.is_real:
            return None
        d = self.disc.real
        return (d > 0) - (d < 0)

    def kernel_coefficients(self):
        """(c2, c1, c0) of the monic cubic f = x^3 + c2 x^2 + c1 x + c0."""
        return self.b2 / 4, self.b4 / 2, self.b6 / 4


def check_place(c: CurveModel, place: Place) -> Place:
    place = Place(place)
    if place is Place.REAL and not c.is_real:
        raise ValueError("a real place needs a model with real coefficients")
    return place


def _singular_by_rounding(b2, b4, b6, b8, disc) -> bool:
    size = abs(b2 * b2 * b8) + 8 * abs(b4) ** 3 + 27 * abs(b6) ** 2 + 9 * abs(b2 * b4 * b6)
    return abs(disc) <= 1e-300 or abs(disc) <= 64 * numeric.eps() * size


def from_a_invariants(coeffs: Sequence) -> CurveModel:
    """
    Build a model from (a1, a2, a3, a4, a6).

    Real coefficients (ints, Fractions, decimal strings, floats) are handled
    exactly and rounded once at the end; anything with a nonzero imaginary
    part sends the whole model through floating arithmetic.  A complex
    coefficient may be given as ``complex`` or as a ``(re, im)`` pair of
    rationals.
    """
    coeffs = tuple(coeffs)
    if len(coeffs) != 5:
        raise ValueError(f"expected 5 coefficients a1, a2, a3, a4, a6, got {len(coeffs)}")
    exact = [_exact(a) for a in coeffs]
    if all(q is not None for q in exact):
        bs = b_invariants(*exact)
        if bs[4] == 0:
            raise SingularCurve("discriminant is zero")
        try:
            working = tuple(numeric.to_real(b) for b in bs)
        except OverflowError as exc:
            raise NumericBreakdown("b-invariants exceed the binary64 range; raise the working precision") from exc
        return CurveModel(*exact, *working, exact=bs)

    a = tuple(numeric.to_complex(c) for c in coeffs)
    bs = b_invariants(*a)
    if _singular_by_rounding(*bs):
        raise SingularCurve(f"discriminant {bs[4]} is zero to working precision")
    return CurveModel(*a, *bs)


def duplication(c: CurveModel, p: ProjectivePoint) -> ProjectivePoint:
    """kappa(2P) from a representative of kappa(P); homogeneous of degree 4."""
    d1, d2 = delta_components(c.b2, c.b4, c.b6, c.b8, p.x1, p.x2)
    if d1 == 0 and d2 == 0:
        raise DegeneratePoint(f"duplication of {p} vanished")
    return ProjectivePoint(d1, d2)


def kernel_poly(c: CurveModel, x):
    """Value and derivative of f = x^3 + b2/4 x^2 + b4/2 x + b6/4 at x (Horner)."""
    c2, c1, c0 = c.kernel_coefficients()
    f = ((x + c2) * x + c1) * x + c0
    df = (3 * x + 2 * c2) * x + c1
    return f, df
