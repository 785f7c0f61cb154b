"""The theta series of the ring of integers: coefficients, evaluation, transformation."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith import enumerate_reps
from .errors import NotInUpperHalfPlane
from .field import FieldContext, FieldInt
from .forms import CoeffTable, GrowthClass, WeightVector

TAIL_TOL = 1e-17


@dataclass
class ThetaSeries:
    field: FieldContext
    table: CoeffTable
    bound: int


def theta_count(x: FieldInt) -> int:
    """Number of ``v`` in the ring of integers with ``v*v == x``."""
    if x.is_zero():
        return 1
    return 2 if x.K.sqrt_exact(x) is not None else 0


def theta_coeffs(K: FieldContext, B: int) -> ThetaSeries:
    """Exact theta coefficients on every orbit of norm at most ``B``."""
    weight = WeightVector((0,) * K.degree, 1)
    entries = {}
    for rep in enumerate_reps(K, B):
        r = math.isqrt(rep.norm)
        if r * r != rep.norm:
            continue
        if K.sqrt_exact(rep.value) is not None:
            entries[rep.key] = 2 + 0j
    table = CoeffTable(K, weight, level=K.element(4), entries=entries, complete_up_to=B,
                       mode="a", constant=1.0, provenance="theta-derived",
                       growth=GrowthClass(2.0, 0.25, 1), reference=theta_count)
    return ThetaSeries(K, table, B)


def _as_vector(K: FieldContext, z) -> tuple:
    if isinstance(z, (int, float, complex)):
        z = (z,)
    z = tuple(complex(w) for w in z)
    if len(z) != K.degree:
        raise ValueError("z must have one component per real embedding")
    for w in z:
        if not w.imag > 0:
            raise NotInUpperHalfPlane(f"Im(z) = {w.imag} is not positive")
    return z


def _radius2(ymin: float, r: int) -> float:
    """``X`` with ``exp(-pi X) * (2 sqrt(X/ymin) + 1)**r < TAIL_TOL``."""
    X = 1.0
    for _ in range(60):
        Xn = (-math.log(TAIL_TOL) + r * math.log(2 * math.sqrt(X / ymin) + 3)) / math.pi
        if abs(Xn - X) < 1e-9:
            break
        X = Xn
    return X + 1.0


def theta_eval(K: FieldContext, z, scale: Sequence[float] | None = None) -> complex:
    """``sum_v exp(pi i sum_j s_j sigma_j(v)**2 z_j)`` with ``s = scale`` (default 1).

    Terms are kept while ``sum_j s_j sigma_j(v)**2 Im z_j`` stays under a radius
    chosen so the Gaussian tail is below 1e-17.
    """
    z = _as_vector(K, z)
    s = tuple(scale) if scale is not None else (1.0,) * K.degree
    ys = [si * w.imag for si, w in zip(s, z)]
    X = _radius2(min(1.0, *ys) if K.degree == 1 else min(ys), K.degree)
    if K.degree == 1:
        n = np.arange(1, int(math.sqrt(X / ys[0])) + 2, dtype=np.float64)
        terms = np.exp(1j * math.pi * s[0] * z[0] * n * n)
        return complex(1 + 2 * terms.sum())
    w1, w2 = K._w
    lim1, lim2 = math.sqrt(X / ys[0]), math.sqrt(X / ys[1])
    bmax = int((lim1 + lim2) / abs(w1 - w2)) + 1
    total = 0j
    c1, c2 = math.pi * 1j * s[0] * z[0], math.pi * 1j * s[1] * z[1]
    for b in range(-bmax, bmax + 1):
        lo = max(-lim1 - b * w1, -lim2 - b * w2)
        hi = min(lim1 - b * w1, lim2 - b * w2)
        if hi < lo:
            continue
        a = np.arange(math.floor(lo), math.ceil(hi) + 1, dtype=np.float64)
        s1 = a + b * w1
        s2 = a + b * w2
        total += complex(np.exp(c1 * s1 * s1 + c2 * s2 * s2).sum())
    return total


def theta_transform_check(K: FieldContext, z) -> float:
    """``|theta(z) - prod (-i z_j)**(-1/2) D_F**(-1/2) theta(-1/(delta**2 z))|``."""
    z = _as_vector(K, z)
    lhs = theta_eval(K, z)
    delta = K.embed(K.delta)
    zt = tuple(-1 / (dj * dj * w) for dj, w in zip(delta, z))
    pref = 1.0 / math.sqrt(K.discriminant)
    for w in z:
        pref *= cmath.exp(-0.5 * cmath.log(-1j * w))
    rhs = pref * theta_eval(K, zt)
    return abs(lhs - rhs)
