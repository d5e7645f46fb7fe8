"""
Working-precision control.

At the default precision of 53 bits every floating quantity is a native
``float``/``complex``.  Raising the precision switches the scalar pipeline
(curve invariants, torsion constants, bound iteration) to mpmath numbers
carrying that many bits.  The sampling oracle is vectorised with numpy and
always runs in binary64.

The default can be overridden with the ``ARCHHEIGHT_PRECISION`` environment
variable.
"""
from __future__ import annotations

import cmath
import math
import os
from contextlib import contextmanager
from fractions import Fraction

import mpmath

DOUBLE_BITS = 53

_precision = DOUBLE_BITS


def get_precision() -> int:
    return _precision


def set_precision(bits: int) -> None:
    global _precision
    bits = int(bits)
    if bits < DOUBLE_BITS:
        raise ValueError(f"precision must be at least {DOUBLE_BITS} bits, got {bits}")
    _precision = bits
    mpmath.mp.prec = bits


@contextmanager
def working_precision(bits: int):
    old = _precision
    old_mp = mpmath.mp.prec
    set_precision(bits)
    try:
        yield
    finally:
        set_precision(old)
        mpmath.mp.prec = old_mp


def is_extended() -> bool:
    return _precision > DOUBLE_BITS


def eps() -> float:
    """Unit roundoff of the current working precision (as a float)."""
    return 2.0 ** (1 - _precision)


def to_real(q):
    """Correctly rounded conversion of an exact rational to the working type."""
    if isinstance(q, Fraction):
        if is_extended():
            return mpmath.mpf(mpmath.libmp.from_rational(q.numerator, q.denominator, _precision, "n"))
        return float(q)
    if is_extended():
        return mpmath.mpf(q)
    return float(q)


def to_complex(z):
    if isinstance(z, tuple):
        re, im = z
        if is_extended():
            return mpmath.mpc(to_real(re), to_real(im))
        return complex(to_real(re), to_real(im))
    if isinstance(z, Fraction):
        z = to_real(z)
    if is_extended():
        return mpmath.mpc(z)
    return complex(z)


def sqrt(x):
    return mpmath.sqrt(x) if is_extended() else math.sqrt(x)


def csqrt(z):
    return mpmath.sqrt(z) if is_extended() else cmath.sqrt(z)


def log(x):
    return mpmath.log(x) if is_extended() else math.log(x)


def exp(x):
    return mpmath.exp(x) if is_extended() else math.exp(x)


def hypot(x, y):
    return mpmath.hypot(x, y) if is_extended() else math.hypot(x, y)


_env = os.environ.get("ARCHHEIGHT_PRECISION")
if _env:
    set_precision(int(_env))
