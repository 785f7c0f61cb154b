"""Majorant series and rigorous truncation-tail bounds.

Coefficients of powers of the Dedekind zeta function are computed exactly up to
a cutoff ``Y``; beyond it the elementary estimate
``sum_{n<=x} d_K(n) <= x (1 + log x)**(K-1)`` and partial summation give

    sum_{n>Y} d_K(n) n**-w <= w e**(w-1) Gamma(K, (w-1)(1+log Y)) / (w-1)**K.
"""
from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

from .arith import ideal_count_local, primes_up_to, splitting_type
from .errors import ConvergenceDomain
from .field import FieldContext

DEFAULT_CUTOFF = 200_000


@lru_cache(maxsize=64)
def zeta_power_coeffs(K: FieldContext, power: int, Y: int) -> np.ndarray:
    """``c[n]`` = coefficient of ``n**-s`` in ``zeta_F(s)**power`` for ``n <= Y``."""
    c = np.ones(Y + 1, dtype=np.float64)
    c[0] = 0.0
    for p in primes_up_to(Y):
        kind = "rational" if K.degree == 1 else splitting_type(K, p)
        pk, k = p, 1
        while pk <= Y:
            idx = np.arange(pk, Y + 1, pk)
            idx = idx[(idx // pk) % p != 0]
            c[idx] *= ideal_count_local(kind, k, power)
            pk *= p
            k += 1
    c.setflags(write=False)
    return c


def crude_tail(Kdeg: int, w: float, Y: float) -> float:
    """Bound on ``sum_{n>Y} d_Kdeg(n) n**-w`` (requires ``w > 1``)."""
    if w <= 1:
        raise ConvergenceDomain(f"tail exponent {w} <= 1")
    u0 = 1 + math.log(Y)
    g = mpmath.gammainc(Kdeg, (w - 1) * u0)
    return float(w * mpmath.e ** (w - 1) * g / mpmath.mpf(w - 1) ** Kdeg)


def majorant_tail(K: FieldContext, power: int, w: float, start: float,
                  cutoff: int = DEFAULT_CUTOFF) -> float:
    """Bound on ``sum_{N(a) > start} c_power(N a) N(a)**-w`` over integral ideals."""
    if w <= 1:
        raise ConvergenceDomain(f"tail exponent {w} <= 1")
    start = int(math.floor(start))
    Y = max(cutoff, 4 * start)
    c = zeta_power_coeffs(K, power, Y)
    n = np.arange(start + 1, Y + 1, dtype=np.float64)
    exact = math.fsum(c[start + 1:] * n ** (-w))
    return exact + crude_tail(power * K.degree, w, Y)


def majorant_sum(K: FieldContext, power: int, w: float, cutoff: int = DEFAULT_CUTOFF) -> float:
    """Upper bound for the full series ``zeta_F(w)**power``."""
    return 1.0 + majorant_tail(K, power, w, 1, cutoff)
