"""Totally positive integers modulo totally positive units, and prime-ideal factorization.

Every totally positive element is reduced to a canonical representative of its
orbit under the totally positive units.  For a real quadratic field the
representative ``x`` satisfies ``sigma_1(x) >= sigma_2(x)`` and
``sigma_1(x)/sigma_2(x) < sigma_1(e)/sigma_2(e)`` with ``e`` the totally positive
fundamental unit; both conditions are decided on integer coordinates.

Under narrow class number 1 these orbits are in bijection with the nonzero
integral ideals, so the same representatives index ideals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import NotTotallyPositive
from .field import FieldContext, FieldInt


@dataclass(frozen=True)
class CanonicalRep:
    value: FieldInt
    norm: int

    @property
    def key(self) -> tuple[int, int]:
        return (self.value.a, self.value.b)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    """A prime ideal tag: rational prime, residue degree, ramification index, generator."""

    sort_key: tuple = None  # (norm, p, a, b); first field so tags order by norm
    p: int = 0
    f: int = 1
    e: int = 1
    generator: FieldInt = None

    @property
    def norm(self) -> int:
        return self.p ** self.f

    @property
    def kind(self) -> str:
        if self.generator.K.degree == 1:
            return "rational"
        if self.e == 2:
            return "ramified"
        return "inert" if self.f == 2 else "split"

    def __str__(self):
        return f"({self.generator})"

    def __hash__(self):
        return hash(self.sort_key)

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and self.sort_key == other.sort_key


def _make_prime(p: int, f: int, e: int, gen: FieldInt) -> PrimeIdeal:
    return PrimeIdeal((p ** f, p, gen.a, gen.b), p, f, e, gen)


@dataclass(frozen=True)
class IdealFactorization:
    field: FieldContext
    factors: tuple  # tuple of (PrimeIdeal, exponent), sorted

    def norm(self) -> int:
        n = 1
        for P, k in self.factors:
            n *= P.norm ** k
        return n

    def generator(self) -> FieldInt:
        x = self.field.one
        for P, k in self.factors:
            x = x * P.generator ** k
        return x

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        if not self.factors:
            return "(1)"
        return " * ".join(f"{P}^{k}" if k > 1 else str(P) for P, k in self.factors)


# -- canonical representatives ------------------------------------------------

def _in_domain(x: FieldInt, eps_conj: FieldInt) -> bool:
    return x.b >= 0 and (x * eps_conj).b < 0


def canonical_rep(x: FieldInt) -> CanonicalRep:
    """Canonical representative of the orbit of ``x`` under totally positive units."""
    K = x.K
    if not K.is_totally_positive(x):
        raise NotTotallyPositive(f"{x} is not totally positive")
    if K.degree == 1:
        return CanonicalRep(x, x.a)
    return CanonicalRep(_reduce(x), x.norm())


def _reduce(x: FieldInt) -> FieldInt:
    return reduce_with_exponent(x)[0]


def reduce_with_exponent(x: FieldInt) -> tuple[FieldInt, int]:
    """Return ``(rep, j)`` with ``x == rep * eps_plus**j`` and ``rep`` canonical."""
    K = x.K
    if K.degree == 1:
        return x, 0
    ep, epc = K.eps_plus, K.eps_plus.conj()
    s1, s2 = K.embed(x)
    k = math.floor(math.log(s1 / s2) / (2 * K.log_eps_plus))
    j = 0
    if k > 0:
        x = x * epc ** k
        j += k
    elif k < 0:
        x = x * ep ** (-k)
        j += k
    while x.b < 0:
        x = x * ep
        j -= 1
    while (x * epc).b >= 0:
        x = x * epc
        j += 1
    return x, j


def is_canonical(x: FieldInt) -> bool:
    K = x.K
    if not K.is_totally_positive(x):
        return False
    return K.degree == 1 or _in_domain(x, K.eps_plus.conj())


def rep_sort_key(x: FieldInt) -> tuple:
    return (abs(x.norm()), x.trace(), x.a, x.b)


def enumerate_reps(K: FieldContext, norm_bound: int, norm_min: int = 1) -> Iterator[CanonicalRep]:
    """All canonical representatives with ``norm_min <= norm <= norm_bound``.

    Ordered by norm, ties broken by (trace, a, b).  Sub-ranges can be consumed
    independently by choosing ``norm_min``.
    """
    return iter(_enumerate_cached(K, int(norm_bound), int(max(1, norm_min))))


@lru_cache(maxsize=32)
def _enumerate_cached(K: FieldContext, T: int, lo: int) -> tuple:
    if T < lo:
        return ()
    if K.degree == 1:
        return tuple(CanonicalRep(FieldInt(K, n), n) for n in range(lo, T + 1))
    # sigma1 - sigma2 = b*sqrt(D) and sigma1 + sigma2 = trace, D the discriminant
    d = K.discriminant
    E = K.embed(K.eps_plus)[0] ** 2
    slope = math.sqrt(d) * (E + 1) / (E - 1)
    b_max = int(math.sqrt(T / (E * d)) * (E - 1)) + 2
    epc = K.eps_plus.conj()
    out = []
    for b in range(0, b_max + 1):
        t_hi = math.isqrt(4 * T + d * b * b)
        t_lo = max(1, int(b * slope) - 1)
        for t in range(t_lo, t_hi + 1):
            if K.half:
                if (t - b) & 1:
                    continue
                a = (t - b) // 2
            else:
                if t & 1:
                    continue
                a = t // 2
            n = (t * t - d * b * b) // 4
            if n < lo or n > T:
                continue
            x = FieldInt(K, a, b)
            if _in_domain(x, epc):
                out.append((n, t, a, b, x))
    out.sort(key=lambda r: r[:4])
    return tuple(CanonicalRep(r[4], r[0]) for r in out)


# -- rational factorization -----------------------------------------------------

class _Sieve:
    limit = 0
    spf = np.zeros(1, dtype=np.int64)

    @classmethod
    def ensure(cls, n: int) -> None:
        if n <= cls.limit:
            return
        lim = max(n, 2 * cls.limit, 1 << 16)
        spf = np.zeros(lim + 1, dtype=np.int64)
        for p in range(2, math.isqrt(lim) + 1):
            if spf[p] == 0:
                block = spf[p * p::p]
                block[block == 0] = p
        idx = np.nonzero(spf == 0)[0]
        spf[idx] = idx
        cls.spf, cls.limit = spf, lim


def factor_int(n: int) -> list[tuple[int, int]]:
    """Factor a positive rational integer into ``[(p, k), ...]``."""
    n = abs(int(n))
    out: list[tuple[int, int]] = []
    if n <= 1:
        return out
    if n <= 4_000_000:
        _Sieve.ensure(n)
        spf = _Sieve.spf
        while n > 1:
            p = int(spf[n])
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        return out
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    _Sieve.ensure(n)
    spf = _Sieve.spf[: n + 1]
    return [int(p) for p in np.nonzero(spf == np.arange(n + 1))[0] if p >= 2]


# -- splitting of rational primes --------------------------------------------------

def splitting_type(K: FieldContext, p: int) -> str:
    """'rational', 'split', 'inert' or 'ramified' for the rational prime ``p``."""
    if K.degree == 1:
        return "rational"
    d = K.d
    if K.discriminant % p == 0:
        return "ramified"
    if p == 2:
        return "split" if d % 8 == 1 else "inert"
    return "split" if pow(d % p, (p - 1) // 2, p) == 1 else "inert"


def _element_of_norm(K: FieldContext, p: int) -> FieldInt:
    d, c = K.d, K.c
    e1 = K.embed(K.eps)[0]
    b_max = int(2 * math.sqrt(p * abs(e1)) / math.sqrt(d)) + 3
    for b in range(0, b_max + 1):
        for target in (p, -p):
            if K.half:
                disc = b * b + 4 * (c * b * b + target)
                if disc < 0:
                    continue
                r = math.isqrt(disc)
                if r * r != disc:
                    continue
                for num in (-b + r, -b - r):
                    if num % 2 == 0:
                        return FieldInt(K, num // 2, b)
            else:
                sq = target + d * b * b
                if sq < 0:
                    continue
                r = math.isqrt(sq)
                if r * r == sq:
                    return FieldInt(K, r, b)
    raise ArithmeticError(f"no element of norm +-{p} in {K}")


def _totally_positive_associate(x: FieldInt) -> FieldInt:
    K = x.K
    if x.norm() < 0:
        x = x * K.negative_norm_unit
    if x.trace() < 0:
        x = -x
    return x


@lru_cache(maxsize=None)
def _primes_above_cached(K: FieldContext, p: int) -> tuple:
    kind = splitting_type(K, p)
    if kind == "rational":
        return (_make_prime(p, 1, 1, FieldInt(K, p)),)
    if kind == "inert":
        return (_make_prime(p, 2, 1, FieldInt(K, p)),)
    pi = _totally_positive_associate(_element_of_norm(K, p))
    pi = canonical_rep(pi).value
    if kind == "ramified":
        return (_make_prime(p, 1, 2, pi),)
    pi2 = canonical_rep(pi.conj()).value
    gens = sorted([pi, pi2], key=lambda g: (g.a, g.b))
    return tuple(_make_prime(p, 1, 1, g) for g in gens)


def primes_above(K: FieldContext, p: int) -> tuple:
    return _primes_above_cached(K, p)


def prime_ideals_up_to(K: FieldContext, norm_bound: int) -> list[PrimeIdeal]:
    """All prime ideals of norm at most ``norm_bound``, sorted by norm."""
    out = []
    for p in primes_up_to(norm_bound):
        for P in primes_above(K, p):
            if P.norm <= norm_bound:
                out.append(P)
    out.sort()
    return out


def valuation(x: FieldInt, P: PrimeIdeal) -> int:
    if x.is_zero():
        raise ValueError("valuation of zero")
    k = 0
    g = P.generator
    while True:
        y = x.exact_div(g)
        if y is None:
            return k
        x = y
        k += 1


def factor(x: FieldInt) -> IdealFactorization:
    """Prime-ideal factorization of the principal ideal ``(x)``."""
    K = x.K
    if x.is_zero():
        raise ValueError("cannot factor zero")
    facs = []
    for p, k in factor_int(abs(x.norm())):
        primes = primes_above(K, p)
        P0 = primes[0]
        if P0.f == 2:
            facs.append((P0, k // 2))
        elif len(primes) == 1:
            facs.append((P0, k))
        else:
            v = 0
            y = x
            g = P0.generator
            while v < k:
                z = y.exact_div(g)
                if z is None:
                    break
                y = z
                v += 1
            if v:
                facs.append((P0, v))
            if k - v:
                facs.append((primes[1], k - v))
    facs.sort(key=lambda t: t[0].sort_key)
    return IdealFactorization(K, tuple(facs))


def is_squarefree(x: FieldInt | IdealFactorization) -> bool:
    fac = x if isinstance(x, IdealFactorization) else factor(x)
    return all(k == 1 for _, k in fac)


def mobius(x: FieldInt | IdealFactorization) -> int:
    fac = x if isinstance(x, IdealFactorization) else factor(x)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def element_from_factors(K: FieldContext, factors: Sequence) -> FieldInt:
    x = K.one
    for P, k in factors:
        if k:
            x = x * P.generator ** k
    return x


def canonical_from_factors(K: FieldContext, factors: Sequence) -> CanonicalRep:
    x = element_from_factors(K, factors)
    return canonical_rep(_totally_positive_associate(x))


def divisor_pairs(x: FieldInt) -> Iterator[tuple[CanonicalRep, CanonicalRep]]:
    """Pairs ``(eta1, eta2)`` of canonical reps with ``eta1*eta2 = x`` up to units."""
    K = x.K
    if not K.is_totally_positive(x):
        raise NotTotallyPositive(f"{x} is not totally positive")
    fac = factor(x)
    primes = [P for P, _ in fac]
    exps = [k for _, k in fac]
    pairs = []
    for choice in product(*(range(k + 1) for k in exps)):
        e1 = canonical_from_factors(K, list(zip(primes, choice)))
        e2 = canonical_from_factors(K, [(P, k - j) for P, k, j in zip(primes, exps, choice)])
        pairs.append((e1, e2))
    pairs.sort(key=lambda pr: rep_sort_key(pr[0].value))
    return iter(pairs)


def squarefree_decomposition(fac: IdealFactorization) -> tuple[IdealFactorization, IdealFactorization]:
    """Split ``(x) = tau * xi^2`` with ``tau`` squarefree; returns both factorizations."""
    tau = tuple((P, 1) for P, k in fac if k % 2)
    xi = tuple((P, k // 2) for P, k in fac if k // 2)
    return IdealFactorization(fac.field, tau), IdealFactorization(fac.field, xi)


def ideal_count_local(kind: str, k: int, power: int = 1) -> int:
    """Coefficient at ``p**k`` of the local factor of ``zeta_F(s)**power``.

    ``kind`` is the splitting type of ``p``.
    """
    if kind in ("rational", "ramified"):
        return math.comb(k + power - 1, power - 1)
    if kind == "split":
        return math.comb(k + 2 * power - 1, 2 * power - 1)
    if k % 2:
        return 0
    return math.comb(k // 2 + power - 1, power - 1)
