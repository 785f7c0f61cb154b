import math
from fractions import Fraction

import numpy as np
import pytest

from halfint import make_field
from halfint.arith import enumerate_reps, is_squarefree, prime_ideals_up_to
from halfint.chars import chi
from halfint.errors import FormatError, IncompleteSeed, OutOfBound
from halfint.shimura import (EigenSystem, SqfreeSeed, eigen_from_omega, formal_identity_check,
                             global_identity_check, identity_check, lift_lambda,
                             lift_reconstruct, random_eigen, random_rational_omega)

from conftest import synthetic


def test_chebyshev_powers(K5):
    P = prime_ideals_up_to(K5, 11)[-1]
    th = 0.7
    sys_ = EigenSystem(K5, {P: 2 * math.cos(th)}, 11)
    for j in range(8):
        assert sys_.power(P, j) == pytest.approx(math.sin((j + 1) * th) / math.sin(th))


def test_out_of_bound(K5):
    sys_ = EigenSystem(K5, {}, 10)
    big = prime_ideals_up_to(K5, 40)[-1]
    assert sys_.prime(prime_ideals_up_to(K5, 9)[0]) == 0
    with pytest.raises(OutOfBound):
        sys_.prime(big)


def test_eigen_from_omega(K5):
    P = prime_ideals_up_to(K5, 11)[-1]
    sys_ = eigen_from_omega({P: 3.0})
    assert sys_.prime(P) == pytest.approx(3 / math.sqrt(11))


@pytest.mark.parametrize("field", ["Q", "Q(sqrt{5})", "Q(sqrt{2})"])
def test_eigen_file_roundtrip(field):
    K = make_field(field)
    sys_ = random_eigen(K, 200, np.random.default_rng(5))
    back = EigenSystem.loads(sys_.dumps())
    assert back.values == sys_.values and back.bound == sys_.bound
    omega = random_rational_omega(K, 50, np.random.default_rng(1))
    ex = EigenSystem(K, omega, 50)
    assert EigenSystem.loads(ex.dumps()).values == omega


def test_eigen_file_errors():
    with pytest.raises(FormatError):
        EigenSystem.loads("p 3 inert 0.5\n")
    with pytest.raises(FormatError):
        EigenSystem.loads("field Q(sqrt{5})\np 11 inert 0.5\n")


def test_reconstruction_keeps_seed():
    table, sys_, seed = synthetic("Q(sqrt{5})", 4, 3000)
    K = table.field
    for r in enumerate_reps(K, 3000):
        if is_squarefree(r.value):
            assert table.lam_rep(r) == seed.values[r.key]


def test_local_factor_by_hand(K5):
    table, sys_, seed = synthetic("Q(sqrt{5})", 4, 3000)
    tau = K5.element(3, 1)  # norm 11
    for P in prime_ideals_up_to(K5, 40):
        x = tau * P.generator ** 2
        if x.norm() > 3000:
            continue
        want = seed[tau] * (sys_.power(P, 1) - chi(tau, P) / math.sqrt(P.norm))
        assert table.lam(x) == pytest.approx(want, rel=1e-13)
        x3 = tau * P.generator ** 4
        if x3.norm() <= 3000:
            want = seed[tau] * (sys_.power(P, 2) - chi(tau, P) / math.sqrt(P.norm) * sys_.power(P, 1))
            assert table.lam(x3) == pytest.approx(want, rel=1e-13)


def test_incomplete_seed(K5):
    seed = SqfreeSeed(K5, {(1, 0): 1.0}, 10)
    with pytest.raises(IncompleteSeed):
        lift_reconstruct(seed, EigenSystem(K5, {}, 100), 50)
    with pytest.raises(IncompleteSeed):
        seed[K5.element(7)]
    with pytest.raises(ValueError):
        SqfreeSeed(K5, {(4, 0): 1.0}, 10)


@pytest.mark.parametrize("field", ["Q", "Q(sqrt{5})", "Q(sqrt{13})"])
def test_identity_check_and_fault(field):
    table, sys_, seed = synthetic(field, 9, 10000)
    K = table.field
    taus = [r.value for r in enumerate_reps(K, 30) if is_squarefree(r.value)][:3]
    for tau in taus:
        rep = identity_check(table, sys_, tau, 2.0)
        assert rep.passed, rep
        assert rep.residual < rep.tail_bound
    P0 = min(sys_.values, key=lambda P: P.norm)
    bad = lift_reconstruct(seed, sys_.perturbed(P0, 0.1), 10000)
    assert not identity_check(bad, sys_, K.one, 2.0).passed


def test_identity_check_complex_s():
    table, sys_, _ = synthetic("Q(sqrt{5})", 9, 10000)
    rep = identity_check(table, sys_, table.field.one, 2.5 + 3j)
    assert rep.passed


def test_global_identity():
    table, sys_, _ = synthetic("Q(sqrt{5})", 9, 10000)
    assert global_identity_check(table, sys_, 2.0, 4000).passed


@pytest.mark.parametrize("field", ["Q", "Q(sqrt{5})"])
def test_formal_identity_exact(field):
    K = make_field(field)
    omega = random_rational_omega(K, 300, np.random.default_rng(2))
    for tau in [K.one] + [r.value for r in enumerate_reps(K, 20)
                          if is_squarefree(r.value) and r.norm > 1][:2]:
        rep = formal_identity_check(K, omega, tau, 300, Fraction(3, 7))
        assert rep.passed and rep.checked > 100


def test_formal_identity_detects_broken_inversion(K5, monkeypatch):
    from halfint import shimura
    omega = random_rational_omega(K5, 120, np.random.default_rng(2))
    tau = K5.element(3, 1)
    orig = shimura._lift_factor
    # drop the character term: the local factor no longer inverts the convolution
    monkeypatch.setattr(shimura, "_lift_factor",
                        lambda fac, w, c: orig(fac, lambda P: 0 * w(P), c))
    assert not formal_identity_check(K5, omega, tau, 120).passed


def test_lift_lambda_direct(K5):
    table, sys_, seed = synthetic("Q(sqrt{5})", 4, 3000)
    for r in list(enumerate_reps(K5, 3000))[::97]:
        assert lift_lambda(seed, sys_, r.value) == table.lam_rep(r)
