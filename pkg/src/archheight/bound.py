"""
Upper bounds for the archimedean local height difference.

The map phi sends a pair of bounds (d1, d2) on |delta_1|, |delta_2| to
bounds on |x_1|, |x_2|.  It is homogeneous of degree 1/4, so its
log-domain form psi is a 1/4-contraction in the sup norm.  Iterating psi
from the origin gives b_N = log ||phi^N(1, 1)|| and the valid bounds
c_N = 4^N / (4^N - 1) * b_N, which decrease to the common limit of both
sequences.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional

from . import numeric
from .curve import CurveModel, Place, check_place
from .errors import NonMonotoneSequence
from .torsion import TorsionConstants, torsion_constants

MONOTONE_SLACK = 1e-9

# re-exported: the place kind is part of this module's public surface
PlaceSpec = Place


class Variant(str, Enum):
    AUTO = "auto"
    COMPLEX_FORMULA = "complex_formula"
    REAL_ONE_COMPONENT = "real_one_component"


@dataclass(frozen=True)
class BoundConfig:
    rel_tol: float = 1e-9
    max_iter: int = 60
    variant: Variant = Variant.AUTO
    safety_slack: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not self.safety_slack >= 0:
            raise ValueError(f"safety_slack must be nonnegative, got {self.safety_slack}")


@dataclass
class BoundResult:
    c_seq: List = field(default_factory=list)
    b_seq: List = field(default_factory=list)
    bound: float = 0.0
    iterations: int = 0
    variant_used: Variant = Variant.COMPLEX_FORMULA


class _Phi:
    """phi for fixed constants; the absolute values are taken once."""

    def __init__(self, tc: TorsionConstants, variant: Variant):
        variant = Variant(variant)
        if variant is Variant.AUTO:
            raise ValueError("resolve Variant.AUTO with select_variant() first")
        self.abs_a = [[abs(a) for a in row] for row in tc.amat]
        self.terms = []
        for j, (b1, b2) in enumerate(tc.bmat):
            if variant is Variant.REAL_ONE_COMPONENT and j > 0:
                # sup of |b1 d1' + b2 d2'| over real |d1'| <= d1, |d2'| <= d2
                self.terms.append((True, abs(b1), abs(b2.real), abs(b2.imag)))
            else:
                self.terms.append((False, abs(b1), abs(b2), None))

    def __call__(self, d1, d2):
        inner = []
        for refined, w1, w2, w3 in self.terms:
            if refined:
                s = numeric.hypot(w1 * d1 + w2 * d2, w3 * d2)
            else:
                s = w1 * d1 + w2 * d2
            inner.append(numeric.sqrt(s))
        return tuple(numeric.sqrt(sum(a * s for a, s in zip(row, inner))) for row in self.abs_a)

    def log_step(self, alpha):
        top = max(alpha)
        d = self(numeric.exp(alpha[0] - top), numeric.exp(alpha[1] - top))
        return (top / 4 + numeric.log(d[0]), top / 4 + numeric.log(d[1]))


def phi_step(tc: TorsionConstants, d1, d2, variant: Variant):
    """One application of phi to (d1, d2)."""
    if d1 < 0 or d2 < 0 or (d1 == 0 and d2 == 0):
        raise ValueError(f"phi needs nonnegative arguments, not both zero; got ({d1}, {d2})")
    return _Phi(tc, variant)(d1, d2)


def psi_log_step(tc: TorsionConstants, alpha, variant: Variant):
    """psi(alpha) = log phi(exp alpha); the common scale exp(max alpha) is factored out first."""
    return _Phi(tc, variant).log_step(tuple(alpha))


def select_variant(c: CurveModel, place: Place) -> Variant:
    place = check_place(c, place)
    if place is Place.REAL and c.disc_sign < 0:
        return Variant.REAL_ONE_COMPONENT
    return Variant.COMPLEX_FORMULA


def _geometric_factor(n: int):
    return numeric.to_real(Fraction(4 ** n, 4 ** n - 1))


def iterate_bound(tc: TorsionConstants, cfg: BoundConfig = BoundConfig(),
                  variant: Optional[Variant] = None) -> BoundResult:
    """
    Run the c_N iteration until it settles.

    Stops once successive c_N differ by at most ``rel_tol * max(1, |c_N|)``
    and c_N, b_N agree to the same tolerance, or after ``max_iter`` steps.
    Every c_N is a valid bound, so the result is sound at any stopping point.
    """
    variant = Variant(variant if variant is not None else cfg.variant)
    phi = _Phi(tc, variant)
    zero = numeric.to_real(0)
    alpha = (zero, zero)
    result = BoundResult(variant_used=variant)
    for n in range(1, cfg.max_iter + 1):
        alpha = phi.log_step(alpha)
        b = max(alpha)
        c = _geometric_factor(n) * b
        if result.c_seq:
            prev = result.c_seq[-1]
            if c > prev + MONOTONE_SLACK:
                raise NonMonotoneSequence(f"c_{n} = {c} exceeds c_{n - 1} = {prev}")
        result.c_seq.append(c)
        result.b_seq.append(b)
        if n >= 2:
            tol = cfg.rel_tol * max(1, abs(prev))
            if abs(c - prev) <= tol and c - b <= tol:
                break
    result.iterations = len(result.c_seq)
    result.bound = result.c_seq[-1] + cfg.safety_slack
    return result


def archimedean_bound(c: CurveModel, place: Place, cfg: BoundConfig = BoundConfig()) -> BoundResult:
    """Upper bound for max Psi at one archimedean place of the model."""
    place = check_place(c, place)
    variant = cfg.variant
    if variant is Variant.AUTO:
        variant = select_variant(c, place)
    elif variant is Variant.REAL_ONE_COMPONENT and place is Place.COMPLEX:
        raise ValueError("the real one-component variant only applies at a real place")
    return iterate_bound(torsion_constants(c, place), cfg, variant)
