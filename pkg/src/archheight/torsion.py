"""
Two-torsion data of a Weierstrass model.

The nontrivial 2-torsion points have x-coordinates at the roots of the kernel
cubic f.  From them come the constants (a_ij), (b_jk) expressing x_i^2 in the
quadratic eigenforms y_j and y_j^2 in the duplication polynomials, plus the
matrices M_T realising translation by T on x-coordinates.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import numeric
from .curve import CurveModel, Place, ProjectivePoint, check_place, kernel_poly
from .errors import NumericBreakdown, RootFindingFailure

MAX_NEWTON_STEPS = 100
DENOMINATOR_GUARD = 1e-300
MAX_EXTRA_BITS = 1024
SHARPEN_BITS = 20


@dataclass(frozen=True)
class TorsionConstants:
    xt: tuple
    amat: tuple  # 2 x 3
    bmat: tuple  # 3 x 2


@dataclass(frozen=True)
class TranslationMatrix:
    m: tuple  # 2 x 2, row major
    det: complex
    is_identity_class: bool = False

    @classmethod
    def identity(cls) -> "TranslationMatrix":
        return cls(((1, 0), (0, 1)), 1, True)

    def apply(self, p: ProjectivePoint) -> ProjectivePoint:
        (m11, m12), (m21, m22) = self.m
        return ProjectivePoint(m11 * p.x1 + m12 * p.x2, m21 * p.x1 + m22 * p.x2)


def _initial_roots(c2, c1, c0):
    if numeric.is_extended():
        prec = numeric.get_precision()
        return [mpmath.mpc(r) for r in mpmath.polyroots([1, c2, c1, c0], maxsteps=200, extraprec=prec)]
    coeffs = np.array([1, c2, c1, c0], dtype=complex)
    return [complex(r) for r in np.roots(coeffs)]


def _residual_tolerance(c: CurveModel):
    scale = max(1, *(abs(v) for v in c.kernel_coefficients()))
    tol = 1e-13 * numeric.eps() / 2.0 ** (1 - numeric.DOUBLE_BITS)
    return lambda x: tol * (1 + abs(x)) ** 3 * scale


def _polish(c: CurveModel, x):
    """Newton on f until the step no longer shrinks; keep the best iterate."""
    accept = _residual_tolerance(c)
    fx, dfx = kernel_poly(c, x)
    best, best_res = x, abs(fx)
    last_step = None
    for _ in range(MAX_NEWTON_STEPS):
        if fx == 0 or dfx == 0:
            break
        step = fx / dfx
        x = x - step
        fx, dfx = kernel_poly(c, x)
        if abs(fx) < best_res:
            best, best_res = x, abs(fx)
        size = abs(step)
        if size <= 4 * numeric.eps() * abs(x) or (last_step is not None and size >= last_step and best_res <= accept(best)):
            break
        last_step = size
    if best_res > accept(best):
        raise RootFindingFailure(f"Newton polishing stalled at {best} with residual {best_res}")
    return best


def _exact_kernel_coefficients(c: CurveModel):
    """Kernel cubic coefficients at the current mpmath precision, from exact data when available."""
    if c.exact is not None:
        b2, b4, b6 = c.exact[:3]
        return tuple(mpmath.mpf(mpmath.libmp.from_rational(q.numerator, q.denominator, mpmath.mp.prec, "n"))
                     for q in (b2 / 4, b4 / 2, b6 / 4))
    return mpmath.mpc(c.b2) / 4, mpmath.mpc(c.b4) / 2, mpmath.mpc(c.b6) / 4


def _sharpen(c: CurveModel, roots):
    """
    Re-polish clustered roots with the residual carried at higher precision.

    At working precision a root is only pinned down to about
    eps * S(x) / |f'(x)|, where S bounds the rounding in f(x).  The a_ij
    divide by the gaps between roots, so a root whose error is large against
    its nearest gap is refined again with enough extra bits to cancel the
    loss.  Losses up to SHARPEN_BITS are left alone: they stay well below
    the safety slack of the bound.
    """
    scale = [abs(v) for v in c.kernel_coefficients()]
    out = list(roots)
    done = {}
    for j, x in enumerate(roots):
        gaps = [abs(x - roots[k]) for k in range(3) if k != j]
        if min(gaps) == 0:
            continue
        ax = abs(x)
        size = ((ax + scale[0]) * ax + scale[1]) * ax + scale[2]
        cond = float(size / (gaps[0] * gaps[1] * min(gaps)))
        if cond <= 2.0 ** SHARPEN_BITS:
            continue
        mirror = done.get(complex(x).conjugate())
        if c.is_real and mirror is not None:
            out[j] = mirror.conjugate()
            continue
        out[j] = _newton_extended(c, x, numeric.get_precision() + min(math.ceil(math.log2(cond)), MAX_EXTRA_BITS) + 32)
        done[complex(x)] = out[j]
    return out


def _newton_extended(c: CurveModel, x, bits: int):
    with mpmath.workprec(bits):
        c2, c1, c0 = _exact_kernel_coefficients(c)
        tiny = mpmath.mpf(2) ** (8 - bits)
        z = mpmath.mpc(x)
        for _ in range(MAX_NEWTON_STEPS):
            f = ((z + c2) * z + c1) * z + c0
            df = (3 * z + 2 * c2) * z + c1
            if df == 0:
                break
            step = f / df
            z -= step
            if abs(step) <= tiny * (1 + abs(z)):
                break
    return +z if numeric.is_extended() else complex(z)


def _lexicographic(roots):
    scale = 1 + max(abs(r) for r in roots)

    def cmp(u, v):
        if abs(u.real - v.real) > 1e-12 * scale:
            return -1 if u.real < v.real else 1
        return (u.imag > v.imag) - (u.imag < v.imag)

    return sorted(roots, key=functools.cmp_to_key(cmp))


def two_torsion_x(c: CurveModel, place: Place) -> tuple:
    """
    The three roots of f, Newton-polished, in a fixed order.

    Real model with negative discriminant at a real place: the real root
    first, then the root with positive imaginary part, then its conjugate.
    Otherwise the roots are ordered lexicographically by (Re, Im).  For real
    models the conjugation symmetry is imposed exactly.
    """
    place = check_place(c, place)
    initial = _initial_roots(*c.kernel_coefficients())

    if c.is_real:
        if c.disc_sign < 0:
            initial.sort(key=lambda r: abs(r.imag))
            real_root = _polish(c, numeric.to_complex(initial[0].real).real)
            upper = max(initial[1:], key=lambda r: r.imag)
            upper = _polish(c, upper)
            if upper.imag < 0:
                upper = upper.conjugate()
            real_root, upper = _sharpen(c, [numeric.to_complex(real_root), upper, upper.conjugate()])[:2]
            real_root = numeric.to_complex(real_root.real)
            roots = [real_root, upper, upper.conjugate()]
            if place is Place.REAL:
                return tuple(roots)
        else:
            roots = _sharpen(c, [numeric.to_complex(_polish(c, r.real)) for r in initial])
            roots = [numeric.to_complex(r.real) for r in roots]
        return tuple(_lexicographic(roots))

    return tuple(_lexicographic(_sharpen(c, [_polish(c, r) for r in initial])))


def bound_constants(c: CurveModel, xt) -> TorsionConstants:
    """The matrices (a_ij) and (b_jk) for the given ordering of torsion x-coordinates."""
    xt = tuple(xt)
    half_b4 = c.b4 / 2
    a1, a2 = [], []
    for j in range(3):
        k, l = (i for i in range(3) if i != j)
        den = 2 * (xt[j] - xt[k]) * (xt[j] - xt[l])
        if abs(den) < DENOMINATOR_GUARD:
            raise NumericBreakdown(f"torsion x-coordinates {xt[j]} and its partners nearly coincide")
        a1.append((2 * xt[k] * xt[l] - half_b4) / den)
        a2.append(-1 / den)
    bmat = tuple((numeric.to_complex(1), -x) for x in xt)
    return TorsionConstants(xt, (tuple(a1), tuple(a2)), bmat)


def torsion_constants(c: CurveModel, place: Place) -> TorsionConstants:
    return bound_constants(c, two_torsion_x(c, place))


def eigenform_y(c: CurveModel, xT, p: ProjectivePoint):
    _, df = kernel_poly(c, xT)
    return p.x1 * p.x1 - 2 * xT * p.x1 * p.x2 - (df - xT * xT) * p.x2 * p.x2


def translation_matrix(c: CurveModel, xT) -> TranslationMatrix:
    _, df = kernel_poly(c, xT)
    top_right = df - xT * xT
    m = ((xT, top_right), (1, -xT))
    return TranslationMatrix(m, -xT * xT - top_right)
