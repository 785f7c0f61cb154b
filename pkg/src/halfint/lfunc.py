"""Dirichlet series, completed L-functions and the determination diagnostics.

Normalization.  For a table of weight ``k`` with expansion
``f(z) = a0 + sum a(xi) exp(c i xi.z)``, ``c = (2 - delta) pi``, the Mellin
integral over the cone ``(R+)^r / U+``

    I(s) = int (f(iy) - a0) y^(s + (k-1)/2) dy/y

equals ``c^(-rs-kappa) prod Gamma(s + (k_j-1)/2) L(s, f)`` with
``kappa = sum (k_j-1)/2``, and the completed function is

    Lambda(s, f) = D_F^s N(n)^(s/2) (2 pi)^(-rs) prod Gamma(s + (k_j-1)/2) L(s, f)
                 = c^kappa beta^(-s) I(s),   beta = (2 pi / c)^r / (D_F sqrt N(n)).

The mirror table ``g`` is tied to ``f`` by
``f(iy) = prod nu_j^(k_j/2) y_j^(-k_j) g(i nu/y)`` with ``N(nu) = beta^2``.
Splitting the integral at ``N(y) = gamma`` and folding the lower piece onto the
mirror gives, for every complex ``s``,

    I(s) = I_f(s; gamma) - a0 Vol_<(s; gamma)
           + beta^(2s-1) [I_g(1-s; beta^2/gamma) + b0 Vol_>(1-s; beta^2/gamma)],

where ``I_h(s; g0)`` integrates over ``N(y) >= g0`` and the volume terms are
the analytic continuations of the cone integrals of ``y^(s+(k-1)/2)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import mpmath
import numpy as np

from .arith import enumerate_reps, is_squarefree
from .bounds import majorant_tail
from .errors import (AllZeroOnSqfree, ConvergenceDomain, IncompleteTable, MissingMirror,
                     PoleOnGrid, ZeroDenominator)
from .forms import CoeffTable, GrowthClass, growth_check, is_square_mod_4, plus_unit

DEFAULT_SPLIT = 1.5
DECAY = 60.0  # terms with exponent c*xi.y beyond this are dropped (e^-60 ~ 1e-26)


def _lam_growth(table: CoeffTable) -> tuple[GrowthClass, bool]:
    if table.growth is not None:
        return table.growth, False
    rep = growth_check(table, 0.5)
    return GrowthClass(rep.sup, 0.5, 1), True


@dataclass
class DirichletSum:
    value: complex
    tail: float
    bound: int
    empirical_growth: bool = False


def dirichlet_sum(table: CoeffTable, s: complex, B: int | None = None) -> DirichletSum:
    """``sum_{N(xi) <= B} lambda(xi) N(xi)^-s`` with a tail bound from the growth class.

    Tables without a declared growth class get an empirical Hecke-type class
    fitted from their own entries; the flag in the result says so.
    """
    s = complex(s)
    B = table.complete_up_to if B is None else B
    if B > table.complete_up_to:
        raise IncompleteTable(f"table complete to {table.complete_up_to} < {B}")
    growth, empirical = _lam_growth(table)
    w = s.real - growth.alpha
    if w <= 1:
        raise ConvergenceDomain(f"Re(s) = {s.real} is outside the region of absolute convergence "
                                f"(needs > {1 + growth.alpha})")
    norms, lam = table.lambda_array(B)
    terms = lam * np.exp(-s * np.log(norms)) if len(norms) else np.zeros(0, complex)
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    tail = 0.0 if growth.C == 0 else growth.C * majorant_tail(table.field, growth.k, w, B)
    return DirichletSum(value, tail, B, empirical)


# -- completed L-function -------------------------------------------------------------

class CompletedL:
    """A table together with the data of its completed L-function."""

    def __init__(self, table: CoeffTable, level_norm: int | None = None,
                 mirror: CoeffTable | None = None):
        self.table = table
        K = table.field
        self.field = K
        self.r = K.degree
        self.level_norm = int(level_norm if level_norm is not None else abs(table.level.norm()))
        self.shifts = tuple(float(x) for x in table.weight.gamma_shifts)
        self.kappa = sum(self.shifts)
        self.c = (2 - table.weight.delta) * math.pi
        self.beta = (2 * math.pi / self.c) ** self.r / (K.discriminant * math.sqrt(self.level_norm))
        self.mirror = mirror
        self._cone_cache: dict = {}

    def __repr__(self):
        return f"CompletedL({self.table!r}, N(n)={self.level_norm}, beta={self.beta:.6g})"

    def with_mirror(self, mirror: CoeffTable) -> "CompletedL":
        return CompletedL(self.table, self.level_norm, mirror)


def gamma_prefactor(cl: CompletedL, s: complex) -> complex:
    """``D_F^s N(n)^(s/2) (2 pi)^(-rs) prod Gamma(s + (k_j-1)/2)``."""
    with mpmath.workdps(30):
        s_ = mpmath.mpc(s)
        v = (mpmath.mpf(cl.field.discriminant) ** s_ * mpmath.mpf(cl.level_norm) ** (s_ / 2)
             * (2 * mpmath.pi) ** (-cl.r * s_))
        for h in cl.shifts:
            v *= mpmath.gamma(s_ + h)
        return complex(v)


def completed_lambda_series(cl: CompletedL, s: complex, B: int | None = None) -> tuple[complex, float]:
    """``Lambda`` via gamma prefactor times the Dirichlet series, with its error bound."""
    ds = dirichlet_sum(cl.table, s, B)
    pre = gamma_prefactor(cl, s)
    return pre * ds.value, abs(pre) * ds.tail


def _cone_volume(cl: CompletedL, a: Sequence[complex], g0: float, lower: bool) -> complex:
    abar = sum(a) / len(a)
    if abar == 0:
        return complex(math.inf)
    if cl.r == 1:
        V = 1.0
    else:
        R = cl.field.log_eps_plus
        diff = a[0] - a[1]
        V = R if diff == 0 else (cmath.exp(R * diff) - 1) / diff
    val = V * g0 ** abar / abar
    return val if lower else -val


def _upper_r1(table: CoeffTable, c: float, shift: float, s: complex, g0: float) -> complex:
    """``sum_n lambda(n) c^-a n^-s Gamma(a, c n g0)``, ``a = s + shift``."""
    nmax = int(DECAY / (c * g0)) + 2
    if nmax > table.complete_up_to:
        raise IncompleteTable(f"needs coefficients up to {nmax}, table complete to "
                              f"{table.complete_up_to}")
    with mpmath.workdps(25):
        a = mpmath.mpc(s) + shift
        tot = mpmath.mpc(0)
        for rep in enumerate_reps(table.field, nmax):
            lam = table.lam_rep(rep)
            if lam == 0:
                continue
            n = rep.norm
            tot += mpmath.mpc(lam) * mpmath.mpf(n) ** (-mpmath.mpc(s)) * mpmath.gammainc(a, c * n * g0)
        return complex(tot * mpmath.mpf(c) ** (-a))


def _upper_r1_quad(table: CoeffTable, c: float, shift: float, s: complex, g0: float) -> complex:
    """Same integral as :func:`_upper_r1`, by tanh-sinh quadrature of the truncated series."""
    nmax = int(DECAY / (c * g0)) + 2
    if nmax > table.complete_up_to:
        raise IncompleteTable(f"needs coefficients up to {nmax}")
    coeffs = []
    for rep in enumerate_reps(table.field, nmax):
        v = table.lam_rep(rep)
        if v != 0:
            coeffs.append((rep.norm, v * rep.norm ** shift))
    with mpmath.workdps(25):
        a = mpmath.mpc(s) + shift

        def integrand(y):
            tot = mpmath.mpf(0)
            for n, an in coeffs:
                x = c * n * y
                if x > 80:
                    break
                tot += mpmath.mpc(an) * mpmath.exp(-x)
            return tot * y ** (a - 1)

        return complex(mpmath.quad(integrand, [g0, 2 * g0, 8 * g0, mpmath.inf]))


class _Cone:
    """Quadrature nodes on ``N(y) >= g0`` for r = 2 and cached ``f(iy) - a0`` there.

    ``y = (t e^u, t e^-u)`` with ``u`` over one period ``[0, log eps+_1)`` (trapezoid
    rule, exact for the periodic integrand up to exponentially small error) and
    ``t`` on ``[sqrt g0, inf)`` by an exp-sinh rule.  The sums run in double
    precision, so the error is absolute (about 1e-15 against the size of the
    integrand); for large ``|Im s|`` the value itself decays like
    ``exp(-pi |Im s|)`` and relative accuracy is lost accordingly.
    """

    def __init__(self, table: CoeffTable, c: float, g0: float, nu: int = 64, h: float = 1 / 32):
        K = table.field
        self.R = K.log_eps_plus
        t0 = math.sqrt(g0)
        xs = np.arange(-6.0, 4.0 + h / 2, h)
        e = np.exp(0.5 * math.pi * np.sinh(xs))
        t = t0 + e
        wt = h * 0.5 * math.pi * np.cosh(xs) * e
        keep = t <= t0 + DECAY / (2 * c) + 1
        self.t, self.wt = t[keep], wt[keep]
        self.u = np.arange(nu) * (self.R / nu)
        self.wu = self.R / nu
        nmax = int((DECAY / (2 * c * t0)) ** 2) + 1
        if nmax > table.complete_up_to:
            raise IncompleteTable(f"cone quadrature needs coefficients up to norm {nmax}, "
                                  f"table complete to {table.complete_up_to}")
        s1, s2, amp = self._elements(table, c, t0, nmax)
        Y1 = np.outer(self.t, np.exp(self.u)).ravel()
        Y2 = np.outer(self.t, np.exp(-self.u)).ravel()
        F = np.zeros(Y1.shape, dtype=np.complex128)
        chunk = 512
        for i in range(0, len(s1), chunk):
            ex = np.exp(-c * (np.outer(s1[i:i + chunk], Y1) + np.outer(s2[i:i + chunk], Y2)))
            F += amp[i:i + chunk] @ ex
        self.F = F.reshape(len(self.t), len(self.u))

    def _elements(self, table, c, t0, nmax):
        K = table.field
        e1 = K.embed(K.eps_plus)[0]
        lim = DECAY / (c * t0)
        s1, s2, amp = [], [], []
        for rep in enumerate_reps(K, nmax):
            v = table.stored(rep.value, rep.norm)
            if v == 0:
                continue
            x1, x2 = K.embed(rep.value)
            jhi = math.floor(math.log(lim / x1) / self.R) + 1
            jlo = -math.floor(math.log(lim / x2) / self.R) - 2
            for j in range(jlo, jhi + 1):
                y1, y2 = x1 * e1 ** j, x2 * e1 ** (-j)
                if y1 > lim * 1.01 and y2 > lim * 1.01:
                    continue
                s1.append(y1)
                s2.append(y2)
                amp.append(table.a(rep.value * K.eps_plus ** j))
        return np.array(s1), np.array(s2), np.array(amp, dtype=np.complex128)

    def integrate(self, a1: complex, a2: complex) -> complex:
        tw = self.wt * self.t ** (a1 + a2 - 1) * 2.0
        uw = self.wu * np.exp(self.u * (a1 - a2))
        return complex(tw @ self.F @ uw)


def _upper(cl: CompletedL, table: CoeffTable, s: complex, g0: float, method: str) -> complex:
    if cl.r == 1:
        if method == "quad":
            return _upper_r1_quad(table, cl.c, cl.shifts[0], s, g0)
        return _upper_r1(table, cl.c, cl.shifts[0], s, g0)
    key = (id(table), round(g0, 15))
    cone = cl._cone_cache.get(key)
    if cone is None:
        cone = cl._cone_cache[key] = _Cone(table, cl.c, g0)
    return cone.integrate(s + cl.shifts[0], s + cl.shifts[1])


def completed_lambda(cl: CompletedL, s: complex, gamma: float | None = None,
                     method: str = "auto") -> complex:
    """``Lambda(s, f)`` from the split integral representation (valid for all s).

    ``gamma`` is the split point on ``N(y)``; it defaults to ``beta``.  ``method``
    selects, for r = 1, incomplete gamma functions (``"gamma"``) or tanh-sinh
    quadrature of the truncated series (``"quad"``).  For r = 2 the cone
    quadrature is always used.
    """
    if cl.mirror is None:
        raise MissingMirror("the lower half of the integral needs mirror coefficients")
    s = complex(s)
    beta = cl.beta
    g0 = beta if gamma is None else float(gamma)
    g1 = beta * beta / g0
    a_s = [s + h for h in cl.shifts]
    a_m = [1 - s + h for h in cl.shifts]
    I = _upper(cl, cl.table, s, g0, method)
    I -= cl.table.constant * _cone_volume(cl, a_s, g0, lower=True)
    J = _upper(cl, cl.mirror, 1 - s, g1, method)
    J += cl.mirror.constant * _cone_volume(cl, a_m, g1, lower=False)
    I += beta ** (2 * s - 1) * J
    return complex(cl.c ** cl.kappa * beta ** (-s) * I)


def functional_eq_residual(f: CompletedL, f_mirror: CompletedL, s: complex,
                           split: float = DEFAULT_SPLIT, method: str = "auto") -> float:
    """``|Lambda(s, f) - Lambda(1-s, mirror)|``.

    Both sides split their integral at ``split * beta`` rather than at dual points,
    so the two evaluations use different pieces of each series.
    """
    lf = f if f.mirror is f_mirror.table else f.with_mirror(f_mirror.table)
    lg = f_mirror if f_mirror.mirror is f.table else f_mirror.with_mirror(f.table)
    a = completed_lambda(lf, s, split * lf.beta, method)
    b = completed_lambda(lg, 1 - complex(s), split * lg.beta, method)
    return abs(a - b)


# -- C(s) ---------------------------------------------------------------------------

@dataclass
class CRatioReport:
    values: list
    mean: complex
    deviation: float
    constant: bool
    flagged: list = dc_field(default_factory=list)
    pathway: str = "series"


def _euler_lift(sys, s: complex) -> complex:
    """``L(s, lift)`` from the Euler product over the primes stored in ``sys``."""
    out = 1 + 0j
    for P, lp in sys.values.items():
        x = P.norm ** (-s)
        out /= (1 - complex(lp) * x + x * x)
    return out


def c_ratio(f: CompletedL, g: CompletedL, grid: Sequence[complex], tol: float = 1e-8,
            eigen_f=None, eigen_g=None, B: int | None = None) -> CRatioReport:
    """``C(s) = Lambda(s, f) / Lambda(s, g)`` on a grid with ``Re(s) >= 3/2``.

    With eigen-systems for both lifts and agreeing squarefree coefficients the
    ratio is evaluated as ``(N_f/N_g)^(s/2) L(2s, lift_f)/L(2s, lift_g)`` from Euler
    products; otherwise gamma prefactor times Dirichlet series on both sides.
    """
    grid = [complex(s) for s in grid]
    for s in grid:
        if s.real < 1.5:
            raise ConvergenceDomain(f"grid point {s} has Re(s) < 3/2")
    pathway = "series"
    if eigen_f is not None and eigen_g is not None:
        rep = determine(f.table, g.table, B)
        if rep.hypothesis and abs(rep.kappa - 1) < 1e-12 and f.table.weight == g.table.weight:
            pathway = "euler"
    vals, flagged = [], []
    for s in grid:
        if pathway == "euler":
            num = (f.level_norm / g.level_norm) ** (s / 2) * _euler_lift(eigen_f, 2 * s)
            den = _euler_lift(eigen_g, 2 * s)
        else:
            num = gamma_prefactor(f, s) * dirichlet_sum(f.table, s, B).value
            den = gamma_prefactor(g, s) * dirichlet_sum(g.table, s, B).value
        if den == 0:
            flagged.append(s)
            continue
        vals.append(num / den)
    if not vals:
        raise ZeroDenominator("Lambda(s, g) vanished at every grid point")
    mean = sum(vals) / len(vals)
    if mean == 0:
        dev = max(abs(v) for v in vals)
    else:
        dev = max(abs(v - mean) for v in vals) / abs(mean)
    return CRatioReport(vals, mean, dev, dev < tol, flagged, pathway)


# -- Gamma duplication --------------------------------------------------------------

@dataclass
class DuplicationReport:
    max_residual: float
    checked: list
    poles: list


def _is_pole(z) -> bool:
    return abs(z.imag) < 1e-300 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-12


def gamma_duplication_check(m: Sequence[int], n: Sequence[int], grid: Sequence[complex],
                            dps: int = 40) -> DuplicationReport:
    """Compare ``prod Gamma(s + m_i/2 - 1/4) / Gamma(s + n_i/2 - 1/4)`` with its
    duplication-formula rewrite

        2^(sum(n-m)) prod Gamma(s + n_i/2 + 1/4) / Gamma(s + m_i/2 + 1/4)
                     * Gamma(2s + m_i - 1/2) / Gamma(2s + n_i - 1/2).
    """
    if len(m) != len(n):
        raise ValueError("weight vectors differ in length")
    worst = 0.0
    checked, poles = [], []
    with mpmath.workdps(dps):
        q = mpmath.mpf(1) / 4
        for s in grid:
            s_ = mpmath.mpc(s)
            args = []
            for mi, ni in zip(m, n):
                args += [s_ + mpmath.mpf(mi) / 2 - q, s_ + mpmath.mpf(ni) / 2 - q,
                         s_ + mpmath.mpf(ni) / 2 + q, s_ + mpmath.mpf(mi) / 2 + q,
                         2 * s_ + mi - 2 * q, 2 * s_ + ni - 2 * q]
            if any(_is_pole(complex(z)) for z in args):
                poles.append(complex(s))
                continue
            lhs = mpmath.mpf(1)
            rhs = mpmath.mpf(2) ** (sum(n) - sum(m))
            for mi, ni in zip(m, n):
                lhs *= mpmath.gamma(s_ + mpmath.mpf(mi) / 2 - q) / mpmath.gamma(s_ + mpmath.mpf(ni) / 2 - q)
                rhs *= (mpmath.gamma(s_ + mpmath.mpf(ni) / 2 + q) / mpmath.gamma(s_ + mpmath.mpf(mi) / 2 + q)
                        * mpmath.gamma(2 * s_ + mi - 2 * q) / mpmath.gamma(2 * s_ + ni - 2 * q))
            res = float(abs(lhs - rhs) / max(abs(lhs), mpmath.mpf(10) ** (-dps)))
            worst = max(worst, res)
            checked.append(complex(s))
    if not checked:
        raise PoleOnGrid("every grid point hits a Gamma pole")
    return DuplicationReport(worst, checked, poles)


# -- determination ------------------------------------------------------------------

@dataclass
class DeterminationReport:
    kappa: complex
    hypothesis: bool
    conclusion: bool
    verdict: str
    checked_sqfree: int
    checked_full: int
    worst_sqfree: float
    worst_full: float
    first_mismatch: object = None


def _plus_ok(table: CoeffTable, rep) -> bool:
    if rep.norm % 2 == 0:
        return False
    u = plus_unit(table.field, table.weight)
    return is_square_mod_4(u * rep.value)


def determine(f: CoeffTable, g: CoeffTable, B: int | None = None, plus_space: bool = False,
              tol: float = 1e-12) -> DeterminationReport:
    """Find ``kappa`` with ``lambda_f = kappa lambda_g`` on squarefree reps, then test
    whether the full tables agree up to ``B``.

    In plus-space mode the squarefree comparison is restricted to odd reps ``tau``
    with ``u_m tau`` a square mod 4.
    """
    if f.field.d != g.field.d:
        raise ValueError("tables live over different fields")
    Bmax = min(f.complete_up_to, g.complete_up_to)
    B = Bmax if B is None else B
    if B > Bmax:
        raise IncompleteTable(f"tables complete only to {Bmax}")
    sq = []
    for rep in enumerate_reps(f.field, B):
        if not is_squarefree(rep.value):
            continue
        if plus_space and not (_plus_ok(f, rep) and _plus_ok(g, rep)):
            continue
        sq.append(rep)
    kappa = None
    for rep in sq:
        a, b = f.lam_rep(rep), g.lam_rep(rep)
        if a != 0 and b != 0:
            kappa = a / b
            break
    if kappa is None:
        raise AllZeroOnSqfree("no squarefree rep where both tables are nonzero")

    def rel(a, b):
        return abs(a - kappa * b) / max(1.0, abs(a))

    worst_sq, bad_sq = 0.0, None
    for rep in sq:
        e = rel(f.lam_rep(rep), g.lam_rep(rep))
        if e > worst_sq:
            worst_sq = e
        if e > tol and bad_sq is None:
            bad_sq = rep
    worst_full, bad_full, n_full = 0.0, None, 0
    for rep in enumerate_reps(f.field, B):
        n_full += 1
        e = rel(f.lam_rep(rep), g.lam_rep(rep))
        if e > worst_full:
            worst_full = e
        if e > tol and bad_full is None:
            bad_full = rep
    hyp = bad_sq is None
    concl = bad_full is None
    if hyp and concl:
        verdict = f"f = kappa*g up to norm {B}"
    elif hyp:
        verdict = (f"hypothesis met at bound {B} but conclusion fails; the tables are not both "
                   f"eigenforms consistent with their lifts")
    else:
        verdict = f"squarefree coefficients are not proportional (first mismatch at {bad_sq})"
    return DeterminationReport(complex(kappa), hyp, concl, verdict, len(sq), n_full, worst_sq,
                               worst_full, bad_full if hyp else bad_sq)
