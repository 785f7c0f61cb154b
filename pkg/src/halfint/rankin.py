"""Rankin-Selberg partial sums, growth diagnostics and the squarefree non-vanishing scan."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith import divisor_pairs, enumerate_reps, is_squarefree, mobius
from .chars import quad_char
from .errors import IncompleteTable
from .forms import CoeffTable
from .shimura import EigenSystem


@dataclass
class PartialSumSeries:
    checkpoints: list
    values: list
    squarefree: list | None = None

    def ratios(self) -> list:
        """``S(T_{j+1}) / S(T_j)`` for consecutive checkpoints."""
        return [b / a if a != 0 else math.inf for a, b in zip(self.values, self.values[1:])]


def _values(table: CoeffTable, reps, raw: bool) -> np.ndarray:
    get = (lambda r: table.a(r.value)) if raw else table.lam_rep
    return np.fromiter((get(r) for r in reps), dtype=np.complex128, count=len(reps))


def _sorted_lambda(table: CoeffTable, B: int, sqfree_only: bool = False, raw: bool = False):
    reps = [r for r in enumerate_reps(table.field, B) if not sqfree_only or is_squarefree(r.value)]
    norms = np.fromiter((r.norm for r in reps), dtype=np.int64, count=len(reps))
    lam = _values(table, reps, raw)
    order = np.argsort(norms, kind="stable")
    return norms[order], lam[order], [reps[i] for i in order]


def _cumulative(norms: np.ndarray, terms: np.ndarray, checkpoints: Sequence[float]) -> list:
    out = []
    for T in checkpoints:
        n = int(np.searchsorted(norms, math.floor(T), side="right"))
        chunk = terms[:n]
        if np.iscomplexobj(chunk):
            re, im = math.fsum(chunk.real), math.fsum(chunk.imag)
            out.append(complex(re, im) if im != 0 else re)
        else:
            out.append(math.fsum(chunk))
    return out


def rs_partial_sums(f: CoeffTable, g: CoeffTable | None = None,
                    checkpoints: Sequence[float] = (), squarefree: bool = False,
                    raw: bool = False) -> PartialSumSeries:
    """``S(T) = sum_{N(xi) <= T} lambda_f(xi) conj(lambda_g(xi))`` at each checkpoint.

    With ``g`` omitted this is the mean square ``sum |lambda_f|^2``.  The
    squarefree-restricted variant is added when ``squarefree`` is set; ``raw``
    sums the unnormalized coefficients ``a_f`` at the representatives instead.
    """
    g = f if g is None else g
    checkpoints = sorted(float(T) for T in checkpoints)
    if not checkpoints:
        return PartialSumSeries([], [], [] if squarefree else None)
    Tmax = int(math.floor(checkpoints[-1]))
    have = min(f.complete_up_to, g.complete_up_to)
    if Tmax > have:
        raise IncompleteTable(f"checkpoint {Tmax} beyond table completeness {have}")
    norms, lf, reps = _sorted_lambda(f, Tmax, raw=raw)
    lg = lf if g is f else _values(g, reps, raw)
    terms = (np.abs(lf) ** 2) if g is f else lf * np.conj(lg)
    values = _cumulative(norms, terms, checkpoints)
    sq = None
    if squarefree:
        mask = np.fromiter((is_squarefree(r.value) for r in reps), dtype=bool, count=len(reps))
        sq = _cumulative(norms[mask], terms[mask], checkpoints)
    return PartialSumSeries(checkpoints, values, sq)


@dataclass
class LinearFit:
    slope: float
    deviation: float
    linear: bool


def linear_growth_fit(series: PartialSumSeries, tol: float = 0.1) -> LinearFit:
    """Least-squares slope of ``S(T)`` through the origin and the worst relative
    deviation ``|S(T) / (slope T) - 1|`` over the checkpoints."""
    T = np.array(series.checkpoints, dtype=float)
    S = np.array([abs(v) for v in series.values], dtype=float)
    if len(T) < 4 or T[-1] < 8 * T[0]:
        raise ValueError("need at least 4 checkpoints spanning a factor of 8")
    slope = float(T @ S / (T @ T))
    if slope == 0:
        return LinearFit(0.0, 0.0 if not S.any() else math.inf, not S.any())
    dev = float(np.max(np.abs(S / (slope * T) - 1)))
    return LinearFit(slope, dev, dev < tol)


@dataclass
class AbscissaReport:
    sigma: float
    blocks: list
    ratios: list
    slope: float
    flagged: bool


def abscissa_bound_check(f: CoeffTable, sigma: float, T_max: float | None = None,
                         slope_tol: float = 0.15) -> AbscissaReport:
    """Dyadic sums ``sum_{T <= N < 2T} |lambda| N^-sigma`` against ``T^(1-sigma)``.

    The ratio should stay bounded; a log-log slope above ``slope_tol`` over the
    upper half of the blocks flags growth.
    """
    B = f.complete_up_to
    T_max = B / 2 if T_max is None else T_max
    if 2 * T_max > B:
        raise IncompleteTable(f"dyadic block up to {2 * T_max} beyond table completeness {B}")
    norms, lam, _ = _sorted_lambda(f, int(2 * T_max))
    w = np.abs(lam) * norms.astype(float) ** (-sigma)
    blocks, ratios = [], []
    T = 1
    while T <= T_max:
        lo = np.searchsorted(norms, T, side="left")
        hi = np.searchsorted(norms, 2 * T, side="left")
        blocks.append(T)
        ratios.append(math.fsum(w[lo:hi]) / T ** (1 - sigma))
        T *= 2
    pts = [(math.log(b), math.log(r)) for b, r in zip(blocks, ratios) if r > 0]
    upper = pts[len(pts) // 2:]
    slope = 0.0
    if len(upper) >= 3:
        slope = float(np.polyfit([p[0] for p in upper], [p[1] for p in upper], 1)[0])
    return AbscissaReport(sigma, blocks, ratios, slope, slope > slope_tol)


@dataclass
class ScanReport:
    grid: list
    sups: list
    argmax: list
    c0: float
    holds: bool
    consistent: bool
    note: str = ""


def nonvanishing_scan(f: CoeffTable, T_grid: Sequence[float]) -> ScanReport:
    """Per ``T``: ``sup |lambda_f(tau)|`` over squarefree ``tau`` with ``log T <= N(tau) <= T``.

    The floor ``c0`` is half the median of the sups.  A table that is nonzero
    somewhere but vanishes on every squarefree rep cannot be an eigenform and is
    reported as inconsistent.
    """
    grid = sorted(float(T) for T in T_grid)
    Tmax = int(math.floor(grid[-1]))
    if Tmax > f.complete_up_to:
        raise IncompleteTable(f"scan up to {Tmax} beyond table completeness {f.complete_up_to}")
    norms, lam, reps = _sorted_lambda(f, Tmax, sqfree_only=True)
    mags = np.abs(lam)
    sups, args = [], []
    for T in grid:
        lo = np.searchsorted(norms, math.log(T), side="left")
        hi = np.searchsorted(norms, math.floor(T), side="right")
        if hi <= lo:
            sups.append(0.0)
            args.append(None)
            continue
        i = lo + int(np.argmax(mags[lo:hi]))
        sups.append(float(mags[i]))
        args.append(reps[i])
    c0 = float(np.median(sups)) / 2
    holds = c0 > 0 and all(s >= c0 for s in sups)
    nonzero = any(v != 0 for v in f.entries.values())
    consistent = not (nonzero and not mags.any())
    note = "" if consistent else "table vanishes on every squarefree rep but is not identically zero"
    return ScanReport(grid, sups, args, c0, holds, consistent, note)


@dataclass
class DecompositionReport:
    lhs: float
    rhs: float
    relative: float
    terms: int

    @property
    def passed(self) -> bool:
        return self.relative < 1e-10


def decomposition_check(table: CoeffTable, sys: EigenSystem, T: int) -> DecompositionReport:
    """Compare ``sum_{N <= T} |lambda(x)|^2`` read from the table with

        sum_tau |lambda(tau)|^2 sum_xi |sum_{eta1 eta2 = xi} mu(eta1) chi_tau(eta1)
                                         N(eta1)^(-1/2) lambda(eta2)|^2

    over squarefree ``tau`` and ``N(tau xi^2) <= T``, the inner sum taken over
    all divisor pairs rather than prime by prime.
    """
    if T > table.complete_up_to:
        raise IncompleteTable(f"T = {T} beyond table completeness {table.complete_up_to}")
    K = table.field
    lhs = math.fsum(abs(table.lam_rep(r)) ** 2 for r in enumerate_reps(K, T))
    xis = {}
    for r in enumerate_reps(K, math.isqrt(T)):
        xis[r.key] = (r, list(divisor_pairs(r.value)))
    rhs_terms = []
    for tau in enumerate_reps(K, T):
        if not is_squarefree(tau.value):
            continue
        lt = table.lam_rep(tau)
        if lt == 0:
            continue
        ch = quad_char(tau.value)
        for r, pairs in xis.values():
            if tau.norm * r.norm * r.norm > T:
                continue
            inner = 0j
            for e1, e2 in pairs:
                mu = mobius(e1.value)
                if mu == 0:
                    continue
                c = ch.eval(e1.value)
                if c == 0:
                    continue
                inner += mu * c / math.sqrt(e1.norm) * complex(sys.extend(e2.value))
            rhs_terms.append(abs(lt) ** 2 * abs(inner) ** 2)
    rhs = math.fsum(rhs_terms)
    rel = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return DecompositionReport(lhs, rhs, rel, len(rhs_terms))
