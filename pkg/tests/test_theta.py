import math

import mpmath
import numpy as np
import pytest

from halfint import make_field
from halfint.arith import enumerate_reps
from halfint.errors import NotInUpperHalfPlane
from halfint.theta import theta_coeffs, theta_count, theta_eval, theta_transform_check

# theta(i) over Q = pi^(1/4) / Gamma(3/4)
THETA_I = float(mpmath.pi ** 0.25 / mpmath.gamma(0.75))


def test_theta_at_i(QQ):
    assert THETA_I == pytest.approx(1.086434811213308, abs=1e-15)
    assert abs(theta_eval(QQ, 1j) - THETA_I) < 1e-15


def test_theta_q_against_jacobi(QQ):
    for z in [0.3 + 0.7j, -1.2 + 0.2j, 2 + 3j]:
        q = mpmath.exp(mpmath.pi * 1j * z)
        assert abs(theta_eval(QQ, z) - complex(mpmath.jtheta(3, 0, q))) < 1e-13


def test_q5_coefficients(K5):
    t = theta_coeffs(K5, 100).table
    assert sorted(abs(k[0] ** 2 + k[0] * k[1] - k[1] ** 2) for k in t.entries) == [1, 16, 25, 81]
    assert all(v == 2 for v in t.entries.values())
    assert t.constant == 1


@pytest.mark.parametrize("d", [2, 5, 13])
def test_coefficients_against_lattice_count(d):
    K = make_field(d)
    B = 400
    t = theta_coeffs(K, B).table
    R = int(math.isqrt(B)) + 2
    counts = {}
    for a in range(-3 * R, 3 * R + 1):
        for b in range(-3 * R, 3 * R + 1):
            v = K.element(a, b)
            x = v * v
            if 0 < x.norm() <= B:
                counts[x] = counts.get(x, 0) + 1
    for r in enumerate_reps(K, B):
        assert t.a(r.value) == counts.get(r.value, 0)
    assert theta_count(K.zero) == 1


def test_theta_eval_matches_series(K5):
    z = (0.1 + 0.8j, -0.3 + 0.5j)
    t = theta_coeffs(K5, 4000).table
    w1, w2 = K5.embed(K5.eps_plus)
    total = 1 + 0j
    for r in enumerate_reps(K5, 4000):
        v = t.stored(r.value, r.norm)
        if v == 0:
            continue
        s1, s2 = K5.embed(r.value)
        for j in range(-12, 13):
            y1, y2 = s1 * w1 ** j, s2 * w2 ** j
            total += v * np.exp(1j * np.pi * (y1 * z[0] + y2 * z[1]))
    assert abs(theta_eval(K5, z) - total) < 1e-12


@pytest.mark.parametrize("d", [None, 2, 5, 13, 17, 29])
def test_transformation(d):
    K = make_field(d if d else "Q")
    pts = [0.2 + 0.9j, -0.4 + 1.3j, 0.7 + 0.6j]
    for z in pts:
        zz = z if K.degree == 1 else (z, (0.5 + 1.1j))
        assert theta_transform_check(K, zz) < 1e-10


def test_upper_half_plane(QQ):
    with pytest.raises(NotInUpperHalfPlane):
        theta_eval(QQ, 1 - 1j)
