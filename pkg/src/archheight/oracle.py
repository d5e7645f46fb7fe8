"""
Direct evaluation of Phi and Psi, point sampling, and an affine group law.

This is the checking side of the package: apart from phi(1, 1), used once to
bound the truncation error, it works from the curve alone and is used to
audit the bounds.
Vectorised routines run in binary64 regardless of the working precision.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import numeric
from .bound import Variant, phi_step
from .curve import CurveModel, Place, ProjectivePoint, check_place, delta_components
from .errors import NotOnCurve, SamplingExhausted
from .torsion import torsion_constants

DEFAULT_TERMS = 12
DEFAULT_SAMPLES = 10 ** 4
MAX_REJECTIONS = 10 ** 5


@dataclass(frozen=True)
class PsiEvaluation:
    value: float
    tail_bound: float
    terms_used: int


@dataclass(frozen=True)
class AffinePoint:
    x: complex = 0
    y: complex = 0
    at_infinity: bool = False

    @classmethod
    def infinity(cls) -> "AffinePoint":
        return cls(0, 0, True)

    def kappa(self) -> ProjectivePoint:
        return ProjectivePoint(1, 0) if self.at_infinity else ProjectivePoint(self.x, 1)


def phi_value(c: CurveModel, p: ProjectivePoint):
    """max(|delta_1|, |delta_2|) / max(|x_1|, |x_2|)^4, scale invariant."""
    q = p.normalized()
    d1, d2 = delta_components(c.b2, c.b4, c.b6, c.b8, q.x1, q.x2)
    return max(abs(d1), abs(d2))


@functools.lru_cache(maxsize=4096)
def log_phi_range(c: CurveModel) -> float:
    """
    L with |log Phi(P)| <= L for every P.

    log Phi is bounded above by the coefficient sums of delta on sup-norm-1
    representatives, and below by -4 log ||phi(1, 1)|| (complex formula).
    """
    b2, b4, b6, b8 = (abs(complex(b)) for b in (c.b2, c.b4, c.b6, c.b8))
    upper = math.log(1 + b4 + 2 * b6 + b8) + math.log(4 + b2 + 2 * b4 + b6)
    phi11 = phi_step(torsion_constants(c, Place.COMPLEX), 1.0, 1.0, Variant.COMPLEX_FORMULA)
    lower = 4 * math.log(float(max(phi11)))
    return max(upper, lower)


def tail_bound(c: CurveModel, terms: int) -> float:
    return log_phi_range(c) / (3 * 4.0 ** terms)


def psi_value(c: CurveModel, p: ProjectivePoint, terms: int = DEFAULT_TERMS) -> PsiEvaluation:
    """Partial sum -sum_{n < terms} 4^{-n-1} log Phi(2^n P), renormalising after every doubling."""
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    q = p.normalized()
    x1, x2 = q.x1, q.x2
    total = 0.0
    for n in range(terms):
        d1, d2 = delta_components(c.b2, c.b4, c.b6, c.b8, x1, x2)
        s = max(abs(d1), abs(d2))
        total -= float(numeric.log(s)) / 4 ** (n + 1)
        x1, x2 = d1 / s, d2 / s
    return PsiEvaluation(total, tail_bound(c, terms), terms)


def _numpy_b(c: CurveModel):
    return tuple(complex(b) for b in (c.b2, c.b4, c.b6, c.b8))


def psi_values(c: CurveModel, x1, x2, terms: int = DEFAULT_TERMS):
    """Vectorised psi_value over arrays of representatives; returns (values, tail_bound)."""
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    s = np.maximum(np.abs(x1), np.abs(x2))
    x1, x2 = x1 / s, x2 / s
    bs = _numpy_b(c)
    total = np.zeros(x1.shape)
    for n in range(terms):
        d1, d2 = delta_components(*bs, x1, x2)
        s = np.maximum(np.abs(d1), np.abs(d2))
        total -= np.log(s) / 4.0 ** (n + 1)
        x1, x2 = d1 / s, d2 / s
    return total, tail_bound(c, terms)


def _admissible_real(c: CurveModel, x1, x2):
    # delta_2(x1, x2) = x2^4 (4x^3 + b2 x^2 + 2 b4 x + b6): nonnegative iff y is real
    b2, b4, b6, b8 = (float(complex(b).real) for b in (c.b2, c.b4, c.b6, c.b8))
    _, d2 = delta_components(b2, b4, b6, b8, x1, x2)
    return d2 >= 0


def sample_points(c: CurveModel, place: Place, n: int, seed: int):
    """
    ``n`` points on the sup-norm unit sphere, as arrays (x1, x2).

    Complex place: uniform on {|x1| = 1, |x2| <= 1} u {|x2| = 1, |x1| <= 1}.
    Real place: uniform on the boundary of the square [-1, 1]^2, keeping
    only x-coordinates of real points of the curve.
    """
    place = check_place(c, place)
    rng = np.random.default_rng(seed)
    if place is Place.COMPLEX:
        side = rng.integers(0, 2, n).astype(bool)
        unit = np.exp(2j * np.pi * rng.random(n))
        other = np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
        return np.where(side, unit, other), np.where(side, other, unit)

    xs1, xs2 = [], []
    have = 0
    rejected = 0
    while have < n:
        m = max(2 * (n - have), 16)
        side = rng.integers(0, 2, m).astype(bool)
        unit = rng.choice([-1.0, 1.0], m)
        other = rng.uniform(-1.0, 1.0, m)
        x1 = np.where(side, unit, other)
        x2 = np.where(side, other, unit)
        ok = _admissible_real(c, x1, x2)
        k = int(ok.sum())
        if k == 0:
            rejected += m
            if rejected >= MAX_REJECTIONS:
                raise SamplingExhausted(f"{rejected} consecutive rejections; the real locus looks empty")
            continue
        rejected = 0
        xs1.append(x1[ok])
        xs2.append(x2[ok])
        have += k
    return np.concatenate(xs1)[:n], np.concatenate(xs2)[:n]


def sample_point(c: CurveModel, place: Place, seed: int) -> ProjectivePoint:
    x1, x2 = sample_points(c, place, 1, seed)
    return ProjectivePoint(complex(x1[0]), complex(x2[0]))


def empirical_max_psi(c: CurveModel, place: Place, n_samples: int = DEFAULT_SAMPLES,
                      terms: int = DEFAULT_TERMS, seed: int = 0) -> float:
    """Largest ``value + tail_bound`` of the truncated Psi over seeded samples."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    x1, x2 = sample_points(c, place, n_samples, seed)
    values, tail = psi_values(c, x1, x2, terms)
    return float(values.max() + tail)


# -- affine group law -------------------------------------------------------

def weierstrass_residual(c: CurveModel, p: AffinePoint):
    """(|lhs - rhs|, sum of term magnitudes) of the Weierstrass equation at p."""
    a1, a2, a3, a4, a6 = c.numeric_a()
    x, y = p.x, p.y
    lhs = (y * y, a1 * x * y, a3 * y)
    rhs = (x ** 3, a2 * x * x, a4 * x, a6)
    size = sum(abs(t) for t in lhs + rhs)
    return abs(sum(lhs) - sum(rhs)), size


def _check_on_curve(c: CurveModel, p: AffinePoint, rtol=1e-6):
    if p.at_infinity:
        return
    err, size = weierstrass_residual(c, p)
    if err > rtol * max(size, 1e-300):
        raise NotOnCurve(f"{p} misses the curve by {err} (scale {size})")


def lift_x(c: CurveModel, x, sign: int = 1) -> AffinePoint:
    """A point with the given x-coordinate; ``sign`` picks the root of the y-quadratic."""
    a1, a2, a3, a4, a6 = c.numeric_a()
    lin = a1 * x + a3
    disc = lin * lin + 4 * (((x + a2) * x + a4) * x + a6)
    y = (-lin + sign * numeric.csqrt(disc)) / 2
    return AffinePoint(x, y)


def _is_two_torsion_denominator(den, x) -> bool:
    return abs(den) <= 1e-12 * (1 + abs(x)) ** 1.5


def double_point(c: CurveModel, p: AffinePoint) -> AffinePoint:
    """2P by the tangent construction."""
    _check_on_curve(c, p)
    if p.at_infinity:
        return p
    a1, a2, a3, a4, _ = c.numeric_a()
    x, y = p.x, p.y
    den = 2 * y + a1 * x + a3
    if _is_two_torsion_denominator(den, x):
        return AffinePoint.infinity()
    lam = (3 * x * x + 2 * a2 * x + a4 - a1 * y) / den
    nu = y - lam * x
    x3 = lam * lam + a1 * lam - a2 - 2 * x
    return AffinePoint(x3, -(lam + a1) * x3 - nu - a3)


def add_points(c: CurveModel, p: AffinePoint, q: AffinePoint) -> AffinePoint:
    """P + Q by the chord construction."""
    _check_on_curve(c, p)
    _check_on_curve(c, q)
    if p.at_infinity:
        return q
    if q.at_infinity:
        return p
    a1, a2, a3, _, _ = c.numeric_a()
    if abs(p.x - q.x) <= 1e-12 * (1 + abs(p.x)):
        if _is_two_torsion_denominator(p.y + q.y + a1 * p.x + a3, p.x):
            return AffinePoint.infinity()
        return double_point(c, p)
    lam = (q.y - p.y) / (q.x - p.x)
    nu = p.y - lam * p.x
    x3 = lam * lam + a1 * lam - a2 - p.x - q.x
    return AffinePoint(x3, -(lam + a1) * x3 - nu - a3)
