"""Coefficient-level Shimura correspondence.

Conventions.  An eigen-system stores normalized prime values ``lambda(P)`` of
the integral-weight lift, extended to prime powers by the Chebyshev recursion
``lambda(P^(j+1)) = lambda(P) lambda(P^j) - lambda(P^(j-1))``.  With this
normalization the coefficients of a half-integral weight eigenform satisfy

    lambda_f(tau xi^2) = lambda_f(tau) * prod_{P^j || xi}
        [lambda(P^j) - chi_tau(P) N(P)^(-1/2) lambda(P^(j-1))].

The formal version with raw Hecke eigenvalues ``omega_P`` and character weight
``chi_tau(P)/N(P)`` is the same identity after substituting
``omega_P = lambda(P) N(P)^(1/2)`` and rescaling the formal variable; it is
exposed through :func:`formal_identity_check` in exact rational arithmetic.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .arith import (IdealFactorization, PrimeIdeal, canonical_from_factors,
                    canonical_rep, divisor_pairs, enumerate_reps, factor, is_squarefree, mobius,
                    prime_ideals_up_to, primes_above, squarefree_decomposition)
from .bounds import majorant_tail
from .chars import quad_char
from .errors import FormatError, IncompleteSeed, OutOfBound
from .field import FieldContext, FieldInt, make_field, multi_power, parse_element
from .forms import CoeffTable, GrowthClass, WeightVector

ROUNDING_SLACK = 1e-13


# -- eigen-systems ---------------------------------------------------------------

def prime_tag(P: PrimeIdeal) -> str:
    kind = P.kind
    if kind == "split":
        return f"split:{P.generator.K.format(P.generator)}"
    return kind


class EigenSystem:
    """Normalized Hecke eigenvalues of the lift, indexed by prime ideals.

    ``values`` maps prime ideals to numbers (floats, complex or Fractions);
    primes of norm at most ``bound`` that are absent from ``values`` are zero.
    """

    def __init__(self, field: FieldContext, values: dict, bound: int,
                 weight: WeightVector | None = None, level: FieldInt | None = None):
        self.field = field
        self.values = dict(values)
        self.bound = int(bound)
        self.weight = weight
        # level of the lift; carried only as metadata
        self.level = level
        self._powers: dict = {}

    def __repr__(self):
        return f"EigenSystem({self.field.descriptor}, {len(self.values)} primes, bound={self.bound})"

    def prime(self, P: PrimeIdeal):
        v = self.values.get(P)
        if v is not None:
            return v
        if P.norm > self.bound:
            raise OutOfBound(f"prime {P} of norm {P.norm} beyond eigen bound {self.bound}")
        return 0

    def power(self, P: PrimeIdeal, j: int):
        """``lambda(P^j)`` by the Chebyshev recursion."""
        if j == 0:
            return 1
        seq = self._powers.get(P)
        if seq is None:
            seq = self._powers[P] = [1, self.prime(P)]
        lp = seq[1]
        while len(seq) <= j:
            seq.append(lp * seq[-1] - seq[-2])
        return seq[j]

    def extend(self, ideal: IdealFactorization | FieldInt):
        """Value on an arbitrary integral ideal, by multiplicativity."""
        fac = ideal if isinstance(ideal, IdealFactorization) else factor(ideal)
        out = 1
        for P, j in fac:
            out = out * self.power(P, j)
        return out

    __call__ = extend

    def perturbed(self, P: PrimeIdeal, delta) -> "EigenSystem":
        vals = dict(self.values)
        vals[P] = self.prime(P) + delta
        return EigenSystem(self.field, vals, self.bound, self.weight, self.level)

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.values.values()), default=0.0)

    # -- file format ---------------------------------------------------------
    def dumps(self) -> str:
        K = self.field
        lines = [f"field {K.descriptor}", f"bound {self.bound}"]
        if self.weight is not None:
            lines.append(f"weight {self.weight}")
        for P in sorted(self.values):
            v = self.values[P]
            if isinstance(v, Fraction):
                txt = str(v)
            else:
                txt = format(float(v.real if isinstance(v, complex) else v), ".17g")
            lines.append(f"p {P.p} {prime_tag(P)} {txt}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, field: FieldContext | None = None) -> "EigenSystem":
        K = field
        bound = None
        weight = None
        vals = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "field":
                K = make_field(line.partition(" ")[2].strip())
                continue
            if parts[0] == "bound":
                bound = int(parts[1])
                continue
            if parts[0] == "weight":
                weight = WeightVector.parse(line.partition(" ")[2])
                continue
            if parts[0] != "p" or len(parts) != 4:
                raise FormatError(f"line {lineno}: expected 'p <prime> <tag> <lambda>'")
            if K is None:
                raise FormatError("eigen file needs a 'field' header before prime lines")
            p = int(parts[1])
            P = _match_prime(K, p, parts[2])
            txt = parts[3]
            vals[P] = Fraction(txt) if "/" in txt else float(txt)
        if K is None:
            raise FormatError("missing field")
        if bound is None:
            bound = max((P.norm for P in vals), default=0)
        return cls(K, vals, bound, weight)

    @classmethod
    def read(cls, path, field: FieldContext | None = None) -> "EigenSystem":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read(), field)


def _match_prime(K: FieldContext, p: int, tag: str) -> PrimeIdeal:
    cands = primes_above(K, p)
    kind, _, gen = tag.partition(":")
    for P in cands:
        if P.kind != kind:
            continue
        if kind == "split":
            g = parse_element(K, gen)
            if not (P.generator.divides(g) and g.divides(P.generator)):
                continue
        return P
    raise FormatError(f"no prime above {p} matches tag {tag!r}")


def eigen_from_omega(omega: dict, weight: WeightVector | None = None,
                     field: FieldContext | None = None, bound: int | None = None) -> EigenSystem:
    """``lambda(P) = omega_P * N(P)**(-1/2)``."""
    if field is None:
        field = next(iter(omega)).generator.K
    vals = {P: w / math.sqrt(P.norm) for P, w in omega.items()}
    if bound is None:
        bound = max((P.norm for P in omega), default=0)
    return EigenSystem(field, vals, bound, weight)


def extend_eigen(sys: EigenSystem, ideal: IdealFactorization | FieldInt):
    return sys.extend(ideal)


def random_eigen(K: FieldContext, bound: int, rng: np.random.Generator,
                 weight: WeightVector | None = None) -> EigenSystem:
    """``lambda(P) = 2 cos(theta_P)`` with ``theta_P`` uniform; Ramanujan-bounded."""
    vals = {}
    for P in prime_ideals_up_to(K, bound):
        vals[P] = 2.0 * math.cos(rng.uniform(0.0, math.pi))
    return EigenSystem(K, vals, bound, weight)


# -- seeds -------------------------------------------------------------------------

class SqfreeSeed:
    """Values ``lambda_f(tau)`` at squarefree canonical representatives."""

    def __init__(self, field: FieldContext, values: dict, bound: int):
        self.field = field
        self.bound = int(bound)
        self.values = {}
        for key, v in values.items():
            x = FieldInt(field, *key) if isinstance(key, tuple) else key
            if not is_squarefree(x):
                raise ValueError(f"seed key {x} is not squarefree")
            rep = canonical_rep(x)
            self.values[rep.key] = complex(v)

    def __getitem__(self, tau: FieldInt) -> complex:
        rep = canonical_rep(tau)
        v = self.values.get(rep.key)
        if v is not None:
            return v
        if rep.norm > self.bound:
            raise IncompleteSeed(f"seed has no value at {tau} (norm {rep.norm} > {self.bound})")
        return 0j

    def scaled(self, c) -> "SqfreeSeed":
        return SqfreeSeed(self.field, {k: c * v for k, v in self.values.items()}, self.bound)

    @classmethod
    def random(cls, K: FieldContext, bound: int, rng: np.random.Generator,
               low: float = 0.5, high: float = 1.0) -> "SqfreeSeed":
        vals = {}
        for rep in enumerate_reps(K, bound):
            if is_squarefree(rep.value):
                vals[rep.key] = rng.uniform(low, high)
        return cls(K, vals, bound)

    @classmethod
    def from_table(cls, table: CoeffTable, bound: int | None = None) -> "SqfreeSeed":
        B = table.complete_up_to if bound is None else bound
        vals = {}
        for rep in table.reps(B):
            if is_squarefree(rep.value):
                v = table.lam_rep(rep)
                if v != 0:
                    vals[rep.key] = v
        return cls(table.field, vals, B)


# -- reconstruction ----------------------------------------------------------------

def _lift_factor(xi_fac: Iterable, chi_weight: Callable[[PrimeIdeal], object],
                 coeff: Callable[[PrimeIdeal, int], object]):
    """``prod_{P^j || xi} [coeff(P, j) - chi_weight(P) coeff(P, j-1)]``.

    This is the Moebius-inverted convolution of a multiplicative coefficient
    function with ``mu * chi_weight`` evaluated one prime power at a time.
    """
    out = 1
    for P, j in xi_fac:
        out = out * (coeff(P, j) - chi_weight(P) * coeff(P, j - 1))
    return out


def _decompose(x: FieldInt) -> tuple[FieldInt, IdealFactorization]:
    fac = factor(x)
    tau_fac, xi_fac = squarefree_decomposition(fac)
    tau = canonical_from_factors(x.K, tau_fac.factors).value
    return tau, xi_fac


def lift_lambda(seed: SqfreeSeed, sys: EigenSystem, x: FieldInt) -> complex:
    """lambda_f at any totally positive ``x`` determined by the seed and the lift."""
    tau, xi_fac = _decompose(x)
    base = seed[tau]
    if base == 0 or not len(xi_fac):
        return base
    ch = quad_char(tau)
    return base * _lift_factor(xi_fac, lambda P: ch(P) / math.sqrt(P.norm), sys.power)


def lift_reconstruct(seed: SqfreeSeed, sys: EigenSystem, B: int,
                     weight: WeightVector | None = None, level: FieldInt | None = None) -> CoeffTable:
    """lambda-normalized table on every rep of norm at most ``B``."""
    K = seed.field
    if B > seed.bound:
        raise IncompleteSeed(f"seed covers norms up to {seed.bound} < {B}")
    weight = weight or sys.weight or WeightVector((2,) * K.degree, 1)
    entries = {}
    for rep in enumerate_reps(K, B):
        v = lift_lambda(seed, sys, rep.value)
        if v != 0:
            entries[rep.key] = complex(v)
    smax = max((abs(v) for v in seed.values.values()), default=0.0)
    # |lambda(P^j)| <= j+1 under the Ramanujan bound, so each local factor is at
    # most 2j+1 <= d_3(P^(2j))
    growth = GrowthClass(smax, 0.0, 3) if sys.max_abs() <= 2.0 else None

    def reference(x: FieldInt) -> complex:
        return lift_lambda(seed, sys, x) * multi_power(x, [-t for t in weight.lambda_exponent])

    return CoeffTable(K, weight, level=level, entries=entries, complete_up_to=B, mode="lambda",
                      provenance="lift-reconstructed", growth=growth, reference=reference)


# -- identity checks ---------------------------------------------------------------

@dataclass
class IdentityReport:
    lhs: complex
    rhs: complex
    residual: float
    tail_bound: float
    details: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tail_bound


class _Prefix:
    """Per-rep data up to norm X shared by every tau in a check."""

    def __init__(self, K: FieldContext, sys: EigenSystem, X: int):
        self.reps = list(enumerate_reps(K, X))
        self.facs = [factor(r.value) for r in self.reps]
        self.norms = np.array([r.norm for r in self.reps], dtype=np.float64)
        self.mu = np.array([mobius(f) for f in self.facs], dtype=np.int64)
        self.lift = np.array([complex(sys.extend(f)) for f in self.facs], dtype=np.complex128)
        self._q: dict = {}

    def count(self, X: int) -> int:
        return int(np.searchsorted(self.norms, X, side="right"))

    def Q(self, s: complex, X: int) -> complex:
        key = s
        cum = self._q.get(key)
        if cum is None:
            cum = self._q[key] = np.concatenate(([0j], np.cumsum(self.lift * self.norms ** (-2 * s))))
        return complex(cum[self.count(X)])

    def P(self, tau: FieldInt, s: complex, X: int) -> complex:
        ch = quad_char(tau)
        n = self.count(X)
        out = 0j
        w = -(2 * s + 0.5)
        for i in range(n):
            mu = self.mu[i]
            if not mu:
                continue
            c = 1
            for P, _ in self.facs[i]:
                c *= ch(P)
                if not c:
                    break
            if c:
                out += mu * c * self.norms[i] ** w
        return out


@lru_cache(maxsize=4096)
def _tails(K: FieldContext, sig: float, X: int) -> tuple[float, float, float]:
    return (majorant_tail(K, 1, 2 * sig + 0.5, X), majorant_tail(K, 2, 2 * sig, X),
            majorant_tail(K, 3, 2 * sig, X))


def _tau_tail(K, lam_tau: complex, tau_norm: int, s: complex, X: int, P_t, Q_t) -> float:
    tP, tQ, tR = _tails(K, float(s.real), int(X))
    scale = abs(lam_tau) * tau_norm ** (-s.real)
    return scale * (abs(P_t) * tQ + (abs(Q_t) + tQ) * tP + tR)


def identity_check(table: CoeffTable, sys: EigenSystem, tau: FieldInt, s: complex,
                   B: int | None = None) -> IdentityReport:
    """Residual of ``lambda(tau) N(tau)^-s L(2s, lift) / L(2s+1/2, chi_tau)``
    against ``sum_xi lambda(tau xi^2) N(tau xi^2)^-s`` over ``N(tau xi^2) <= B``.

    The tail bound assumes ``|lambda(P)| <= 2`` for the lift and the coefficient
    bound that follows from it for ``lambda_f(tau xi^2) / lambda_f(tau)``.
    """
    K = table.field
    s = complex(s)
    B = table.complete_up_to if B is None else B
    tau = canonical_rep(tau).value
    Nt = abs(tau.norm())
    lam_tau = table.lam(tau)
    X = math.isqrt(B // Nt) if Nt <= B else 0
    pre = _Prefix(K, sys, X)
    P_t, Q_t = pre.P(tau, s, X), pre.Q(s, X)
    lhs = lam_tau * Nt ** (-s) * P_t * Q_t
    rhs = 0j
    for rep in pre.reps:
        y = tau * rep.value * rep.value
        rhs += table.lam(y) * (Nt * rep.norm ** 2) ** (-s)
    tail = _tau_tail(K, lam_tau, Nt, s, X, P_t, Q_t)
    slack = ROUNDING_SLACK * (abs(lhs) + abs(rhs) + 1e-300)
    return IdentityReport(lhs, rhs, abs(lhs - rhs), tail + slack, {"X": X, "tau_norm": Nt})


def global_identity_check(table: CoeffTable, sys: EigenSystem, s: complex,
                          B: int | None = None) -> IdentityReport:
    """``L_B(s, f)`` against ``L(2s, lift) * sum_tau lambda(tau) N(tau)^-s / L(2s+1/2, chi_tau)``.

    Each squarefree ``tau`` uses the series truncated at ``N(xi) <= sqrt(B/N(tau))``
    so the left side partitions exactly; the bound sums the per-tau tails.
    """
    K = table.field
    s = complex(s)
    B = table.complete_up_to if B is None else B
    lhs = 0j
    for rep in enumerate_reps(K, B):
        v = table.lam_rep(rep)
        if v != 0:
            lhs += v * rep.norm ** (-s)
    Xmax = math.isqrt(B)
    pre = _Prefix(K, sys, Xmax)
    rhs = 0j
    tail = 0.0
    n_tau = 0
    for rep in enumerate_reps(K, B):
        if not is_squarefree(rep.value):
            continue
        lt = table.lam_rep(rep)
        if lt == 0:
            continue
        n_tau += 1
        X = math.isqrt(B // rep.norm)
        P_t, Q_t = pre.P(rep.value, s, X), pre.Q(s, X)
        rhs += lt * rep.norm ** (-s) * P_t * Q_t
        tail += _tau_tail(K, lt, rep.norm, s, X, P_t, Q_t)
    slack = ROUNDING_SLACK * (abs(lhs) + abs(rhs) + 1e-300) * max(1, n_tau) ** 0.5
    return IdentityReport(lhs, rhs, abs(lhs - rhs), tail + slack, {"taus": n_tau})


# -- exact formal identity ---------------------------------------------------------

@dataclass
class FormalReport:
    checked: int
    mismatches: list

    @property
    def passed(self) -> bool:
        return not self.mismatches


def formal_identity_check(K: FieldContext, omega: dict, tau: FieldInt, bound: int,
                          a_tau: Fraction = Fraction(1)) -> FormalReport:
    """Exact check of the formal Dirichlet-series identity for one squarefree ``tau``.

    With ``E`` the expansion of ``a(tau) prod_P (1 - omega_P M(P) + M(P)^2/N(P))^-1``,
    the coefficients ``A(xi)`` of ``a_f(tau xi^2) xi^-m`` are produced by prime-power
    Moebius inversion; the Dirichlet product of ``A`` with ``chi_tau(xi)/N(xi)`` is
    then compared with ``E`` on every ideal of norm at most ``bound``.
    """
    ch = quad_char(tau)
    cache: dict = {}

    def e(P, j):
        seq = cache.get(P)
        if seq is None:
            w = Fraction(omega.get(P, 0))
            seq = cache[P] = [Fraction(1), w]
        w, invN = seq[1], Fraction(1, P.norm)
        while len(seq) <= j:
            seq.append(w * seq[-1] - invN * seq[-2])
        return seq[j]

    def chi_over_norm(P):
        return Fraction(ch(P), P.norm)

    facs = {rep.key: factor(rep.value) for rep in enumerate_reps(K, bound)}
    A = {k: a_tau * _lift_factor(f, chi_over_norm, e) for k, f in facs.items()}
    mismatches = []
    for key, fac in facs.items():
        x = FieldInt(K, *key)
        E = a_tau
        for P, j in fac:
            E *= e(P, j)
        conv = Fraction(0)
        for eta1, eta2 in divisor_pairs(x):
            c = ch.eval(eta1.value)
            if c:
                conv += Fraction(c, eta1.norm) * A[eta2.key]
        if conv != E:
            mismatches.append((x, conv, E))
    return FormalReport(len(facs), mismatches)


def random_rational_omega(K: FieldContext, bound: int, rng: np.random.Generator,
                          denom: int = 12, span: int = 3) -> dict:
    """Random rational eigenvalues ``omega_P`` on every prime of norm <= bound."""
    out = {}
    for P in prime_ideals_up_to(K, bound):
        out[P] = Fraction(int(rng.integers(-span * denom, span * denom + 1)), denom)
    return out
