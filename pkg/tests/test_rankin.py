import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfint.arith import enumerate_reps
from halfint.errors import IncompleteTable
from halfint.forms import CoeffTable, WeightVector
from halfint.rankin import (PartialSumSeries, abscissa_bound_check, decomposition_check,
                            linear_growth_fit, nonvanishing_scan, rs_partial_sums)
from halfint.shimura import SqfreeSeed, lift_reconstruct
from halfint.theta import theta_coeffs

from conftest import synthetic


def _table(K, B, fn):
    t = CoeffTable(K, WeightVector((2,) * K.degree, 1), complete_up_to=B, mode="lambda")
    for r in enumerate_reps(K, B):
        t.set_rep(r.value, fn(r))
    return t


def test_zero_and_ones(QQ):
    z = CoeffTable(QQ, WeightVector((2,), 1), complete_up_to=1000, mode="lambda")
    assert rs_partial_sums(z, checkpoints=[10, 100, 1000]).values == [0, 0, 0]
    one = _table(QQ, 1000, lambda r: 1.0)
    ps = rs_partial_sums(one, checkpoints=[10.5, 100, 999.9])
    assert ps.values == [10, 100, 999]


def test_incomplete(QQ):
    one = _table(QQ, 100, lambda r: 1.0)
    with pytest.raises(IncompleteTable):
        rs_partial_sums(one, checkpoints=[200])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000))
def test_monotone_and_cauchy_schwarz(seed):
    f = synthetic("Q(sqrt{5})", seed % 7, 3000)[0]
    g = synthetic("Q(sqrt{5})", seed % 7 + 100, 3000)[0]
    cps = [100, 400, 900, 1600, 3000]
    ff = rs_partial_sums(f, checkpoints=cps).values
    gg = rs_partial_sums(g, checkpoints=cps).values
    fg = rs_partial_sums(f, g, checkpoints=cps).values
    assert all(isinstance(v, float) and v >= 0 for v in ff)
    assert ff == sorted(ff)
    for a, b, c in zip(ff, gg, fg):
        assert abs(c) ** 2 <= a * b


def test_linear_fit():
    exact = PartialSumSeries([1, 2, 4, 8], [1, 2, 4, 8])
    fit = linear_growth_fit(exact)
    assert fit.slope == 1 and fit.deviation == 0
    with pytest.raises(ValueError):
        linear_growth_fit(PartialSumSeries([1, 2, 3, 4], [1, 2, 3, 4]))


def test_theta_mean_square(QQ):
    th = theta_coeffs(QQ, 40000).table
    cps = [2500, 5000, 10000, 20000, 40000]
    # lambda(n^2) = 2 n^(1/2): S(T) = sum_{n <= sqrt T} 4 n, linear in T
    ps = rs_partial_sums(th, checkpoints=cps)
    for T, v in zip(cps, ps.values):
        m = math.isqrt(T)
        assert v == pytest.approx(2 * m * (m + 1), rel=1e-12)
    # raw coefficients: 4 per square, so S(T) = 4 sqrt(T), flagged as sublinear
    raw = rs_partial_sums(th, checkpoints=cps, raw=True)
    assert raw.values == [4 * math.isqrt(T) for T in cps]
    assert not linear_growth_fit(raw).linear


def test_synthetic_linear_growth():
    f = synthetic("Q(sqrt{5})", 5, 20000)[0]
    ps = rs_partial_sums(f, checkpoints=[2500, 5000, 10000, 20000], squarefree=True)
    fit = linear_growth_fit(ps)
    assert fit.linear and fit.deviation < 0.1
    assert all(1.85 < r < 2.15 for r in ps.ratios())
    assert all(0 < a <= b for a, b in zip(ps.squarefree, ps.values))


def test_abscissa(QQ):
    one = _table(QQ, 20000, lambda r: 1.0)
    rep = abscissa_bound_check(one, 1.5)
    assert not rep.flagged
    tail = rep.ratios[-4:]
    assert max(tail) / min(tail) < 1.05
    big = _table(QQ, 20000, lambda r: r.norm ** 0.8)
    assert abscissa_bound_check(big, 1.5).flagged
    z = CoeffTable(QQ, WeightVector((2,), 1), complete_up_to=100, mode="lambda")
    assert all(v == 0 for v in abscissa_bound_check(z, 1.5).ratios)


def test_scan_ones_and_random(K5):
    f, sys_, seed = synthetic("Q(sqrt{5})", 6, 5000)
    rep = nonvanishing_scan(f, np.linspace(500, 5000, 10))
    assert rep.holds and rep.consistent
    assert all(0.5 <= s <= 1 for s in rep.sups)
    unit_seed = SqfreeSeed(K5, {k: 1.0 for k in seed.values}, seed.bound)
    g = lift_reconstruct(unit_seed, sys_, 5000)
    assert nonvanishing_scan(g, [100, 1000, 5000]).sups == [1.0, 1.0, 1.0]


def test_scan_flags_inconsistent_table():
    f = synthetic("Q(sqrt{5})", 6, 2000)[0]
    from halfint.arith import is_squarefree
    g = f.restricted(lambda r: not is_squarefree(r.value))
    rep = nonvanishing_scan(g, [100, 1000, 2000])
    assert rep.sups == [0.0, 0.0, 0.0]
    assert not rep.consistent and not rep.holds


@pytest.mark.parametrize("field", ["Q", "Q(sqrt{5})", "Q(sqrt{2})"])
def test_decomposition_identity(field):
    f, sys_, _ = synthetic(field, 8, 10000)
    rep = decomposition_check(f, sys_, 10000)
    assert rep.passed and rep.terms > 100


def test_decomposition_detects_wrong_eigen():
    f, sys_, _ = synthetic("Q(sqrt{5})", 8, 10000)
    P0 = min(sys_.values, key=lambda P: P.norm)
    assert not decomposition_check(f, sys_.perturbed(P0, 0.05), 5000).passed
