"""Quadratic characters attached to F(sqrt tau)/F, evaluated on prime ideals."""
from __future__ import annotations

from .arith import (PrimeIdeal, canonical_rep, factor, is_squarefree, valuation)
from .errors import InvalidTau
from .field import FieldInt


class QuadChar:
    """The character of ``F(sqrt(tau))/F``: 1 at split, -1 at inert, 0 at ramified primes.

    ``tau`` must be totally positive and either squarefree or a perfect square
    (the trivial character).  Only the square class of ``tau`` matters, so it is
    replaced by its canonical representative.
    """

    def __init__(self, tau: FieldInt):
        K = tau.K
        if not K.is_totally_positive(tau):
            raise InvalidTau(f"tau={tau} is not totally positive")
        self.field = K
        self.tau = canonical_rep(tau).value
        self.trivial = K.sqrt_exact(self.tau) is not None
        if not self.trivial and not is_squarefree(self.tau):
            raise InvalidTau(f"tau={tau} is neither squarefree nor a square")
        self._memo: dict = {}

    def __repr__(self):
        return f"QuadChar(tau={self.tau})"

    def __call__(self, P: PrimeIdeal) -> int:
        v = self._memo.get(P)
        if v is None:
            v = self._memo[P] = self._compute(P)
        return v

    def _compute(self, P: PrimeIdeal) -> int:
        if self.trivial:
            return 1
        tau = self.tau
        if P.generator.divides(tau):
            return 0
        if P.p == 2:
            return _chi_even(tau, P)
        return _chi_odd(tau, P)

    def eval(self, eta: FieldInt) -> int:
        """Value on the ideal ``(eta)``, extended multiplicatively."""
        out = 1
        for P, k in factor(eta):
            c = self(P)
            if c == 0:
                return 0
            if k % 2:
                out *= c
        return out


def _chi_odd(tau: FieldInt, P: PrimeIdeal) -> int:
    p = P.p
    K = tau.K
    if K.degree == 1:
        return _legendre(tau.a, p)
    if P.f == 2:
        # residue field is O/p; Euler's criterion with exponent (p^2 - 1)/2
        r = _pow_mod(tau, (p * p - 1) // 2, p)
        if r == (1, 0):
            return 1
        if r == (p - 1, 0):
            return -1
        raise ArithmeticError(f"Euler criterion failed for {tau} at {P}")
    g = P.generator
    # O/P = Z/p with w -> root, where generator a + b*w -> 0
    root = (-g.a * pow(g.b, -1, p)) % p
    return _legendre(tau.a + tau.b * root, p)


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _pow_mod(x: FieldInt, k: int, p: int) -> tuple[int, int]:
    K = x.K
    base = FieldInt(K, x.a % p, x.b % p)
    res = K.one
    while k:
        if k & 1:
            res = res * base
            res = FieldInt(K, res.a % p, res.b % p)
        base = base * base
        base = FieldInt(K, base.a % p, base.b % p)
        k >>= 1
    return (res.a % p, res.b % p)


def _is_square_mod(tau: FieldInt, P: PrimeIdeal, k: int) -> bool:
    K = tau.K
    M = 2 ** (-(-k // P.e))  # 2^ceil(k/e) lies in P^k
    rng = range(M)
    for a in rng:
        for b in (rng if K.degree == 2 else (0,)):
            x = FieldInt(K, a, b)
            diff = x * x - tau
            if diff.is_zero() or valuation(diff, P) >= k:
                return True
    return False


def _chi_even(tau: FieldInt, P: PrimeIdeal) -> int:
    # tau a unit at P | 2 with e = v_P(2): square mod P^(2e+1) -> split,
    # square mod P^(2e) only -> unramified inert, otherwise ramified
    e = P.e
    if _is_square_mod(tau, P, 2 * e + 1):
        return 1
    if _is_square_mod(tau, P, 2 * e):
        return -1
    return 0


_CHAR_CACHE: dict = {}


def quad_char(tau: FieldInt) -> QuadChar:
    """Shared (memoized) character object for ``tau``."""
    key = (tau.K.d, canonical_rep(tau).key) if tau.K.is_totally_positive(tau) else None
    if key is None:
        raise InvalidTau(f"tau={tau} is not totally positive")
    ch = _CHAR_CACHE.get(key)
    if ch is None:
        ch = _CHAR_CACHE.setdefault(key, QuadChar(tau))
    return ch


def chi(tau: FieldInt, P: PrimeIdeal) -> int:
    return quad_char(tau)(P)


def chi_eval(tau: FieldInt, eta: FieldInt) -> int:
    return quad_char(tau).eval(eta)
