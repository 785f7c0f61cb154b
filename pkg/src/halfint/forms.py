"""Fourier-coefficient tables of (half-)integral weight forms and checks on them.

A table stores one value per canonical representative of the totally positive
integers modulo totally positive units.  Values at other elements are obtained
by transport: if ``x = rep * u**2`` then ``a(x) = u**m * a(rep)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Iterator

import numpy as np

from .arith import (CanonicalRep, enumerate_reps, is_squarefree, reduce_with_exponent)
from .errors import (FormatError, MissingEntry, NoNegativeNormUnit, NotTotallyPositive,
                     SquareInput)
from .field import FieldContext, FieldInt, make_field, multi_power, parse_element

MODES = ("a", "lambda")


@dataclass(frozen=True)
class WeightVector:
    """Weight ``k = m + delta*(1/2, ..., 1/2)``."""

    m: tuple
    delta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")

    @property
    def r(self) -> int:
        return len(self.m)

    @property
    def k(self) -> tuple:
        return tuple(Fraction(x) + Fraction(self.delta, 2) for x in self.m)

    @property
    def lambda_exponent(self) -> tuple:
        """Exponent vector ``-(k - 1)/2`` used by the lambda normalization."""
        return tuple(-(kj - 1) / 2 for kj in self.k)

    @property
    def gamma_shifts(self) -> tuple:
        """The shifts ``(k_j - 1)/2`` in the Gamma factors of the completed L-function."""
        return tuple((kj - 1) / 2 for kj in self.k)

    @property
    def parity(self) -> int:
        """``(-1)**m`` as a single sign (product over components)."""
        return -1 if sum(self.m) % 2 else 1

    def __str__(self):
        return f"m=({','.join(str(x) for x in self.m)}) delta={self.delta}"

    @classmethod
    def parse(cls, text: str) -> "WeightVector":
        mm = re.fullmatch(r"\s*m=\(([-\d,\s]*)\)\s+delta=([01])\s*", text)
        if not mm:
            raise FormatError(f"bad weight line: {text!r}")
        m = tuple(int(x) for x in mm.group(1).split(",") if x.strip())
        return cls(m, int(mm.group(2)))


@dataclass(frozen=True)
class GrowthClass:
    """Declared bound ``|lambda(xi)| <= C * N(xi)**alpha * d_k(xi)``.

    ``d_k`` counts ordered factorizations into ``k`` integral ideals, the
    coefficients of the k-th power of the Dedekind zeta function.
    """

    C: float
    alpha: float
    k: int

    def __str__(self):
        return f"{self.C!r} {self.alpha!r} {self.k}"


def _unit_data(K: FieldContext, weight: WeightVector, j: int) -> tuple[float, int]:
    """For ``u = unit_root(j)`` return ``(u**m, sign(u)**m)``."""
    if j == 0 or K.degree == 1:
        return 1.0, 1
    u = K.unit_root(j)
    emb = K.embed(u)
    val = 1.0
    sign = 1
    for e, mi in zip(emb, weight.m):
        val *= e ** mi
        if e < 0 and mi % 2:
            sign = -sign
    return val, sign


class CoeffTable:
    """Coefficient table keyed by canonical representatives.

    ``mode`` says whether stored values are the raw coefficients ``a_f`` or the
    normalized ``lambda_f``.  Entries absent from the dictionary are zero inside
    the completeness bound and missing beyond it.
    """

    def __init__(self, field: FieldContext, weight: WeightVector, level: FieldInt | None = None,
                 entries: dict | None = None, complete_up_to: int = 0, mode: str = "a",
                 constant: complex = 0j, provenance: str = "synthetic",
                 growth: GrowthClass | None = None,
                 reference: Callable[[FieldInt], complex] | None = None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if len(weight.m) != field.degree:
            raise ValueError("weight vector length must equal the field degree")
        self.field = field
        self.weight = weight
        self.level = level if level is not None else field.element(4 if weight.delta else 1)
        self.entries: dict = dict(entries or {})
        self.complete_up_to = int(complete_up_to)
        self.mode = mode
        self.constant = complex(constant)
        self.provenance = provenance
        self.growth = growth
        # optional direct evaluator of a_f at any totally positive element
        self.reference = reference
        self._lam_cache: dict = {}

    # -- access ------------------------------------------------------------
    def __repr__(self):
        return (f"CoeffTable({self.field.descriptor}, {self.weight}, B={self.complete_up_to}, "
                f"mode={self.mode}, {len(self.entries)} nonzero)")

    def set_rep(self, x: FieldInt, value: complex) -> None:
        rep, j = reduce_with_exponent(x)
        if j:
            raise ValueError(f"{x} is not a canonical representative")
        self._lam_cache.clear()
        if value == 0:
            self.entries.pop(rep.coords, None)
        else:
            self.entries[rep.coords] = complex(value)

    def stored(self, rep: FieldInt, norm: int | None = None) -> complex:
        v = self.entries.get(rep.coords)
        if v is not None:
            return v
        n = abs(rep.norm()) if norm is None else norm
        if n > self.complete_up_to:
            raise MissingEntry(f"no entry at {rep} (norm {n} > {self.complete_up_to})")
        return 0j

    def _locate(self, x: FieldInt) -> tuple[FieldInt, int]:
        if not self.field.is_totally_positive(x):
            raise NotTotallyPositive(f"{x} is not totally positive")
        return reduce_with_exponent(x)

    def a(self, x: FieldInt) -> complex:
        """The coefficient ``a_f(x)`` at any totally positive ``x``."""
        rep, j = self._locate(x)
        v = self.stored(rep)
        if v == 0:
            return 0j
        if self.mode == "a":
            um, _ = _unit_data(self.field, self.weight, j)
            return um * v
        _, sg = _unit_data(self.field, self.weight, j)
        return sg * v * multi_power(x, [-t for t in self.weight.lambda_exponent])

    def lam(self, x: FieldInt) -> complex:
        """``lambda_f(x) = a_f(x) * x**(-(k-1)/2)``."""
        rep, j = self._locate(x)
        v = self.stored(rep)
        if v == 0:
            return 0j
        if self.mode == "lambda":
            _, sg = _unit_data(self.field, self.weight, j)
            return sg * v
        um, _ = _unit_data(self.field, self.weight, j)
        return um * v * multi_power(x, self.weight.lambda_exponent)

    def lam_rep(self, rep: CanonicalRep) -> complex:
        """lambda at a canonical representative (cached)."""
        key = rep.key
        v = self._lam_cache.get(key)
        if v is None:
            s = self.stored(rep.value, rep.norm)
            if s == 0 or self.mode == "lambda":
                v = s
            else:
                v = s * multi_power(rep.value, self.weight.lambda_exponent)
            self._lam_cache[key] = v
        return v

    def reps(self, bound: int | None = None, norm_min: int = 1) -> Iterator[CanonicalRep]:
        B = self.complete_up_to if bound is None else bound
        return enumerate_reps(self.field, B, norm_min)

    def lambda_array(self, bound: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Norms and lambda values of every rep up to ``bound``, in enumeration order."""
        reps = list(self.reps(bound))
        norms = np.fromiter((r.norm for r in reps), dtype=np.float64, count=len(reps))
        lam = np.fromiter((self.lam_rep(r) for r in reps), dtype=np.complex128, count=len(reps))
        return norms, lam

    # -- derived tables ------------------------------------------------------
    def copy(self, **changes) -> "CoeffTable":
        kw = dict(field=self.field, weight=self.weight, level=self.level, entries=self.entries,
                  complete_up_to=self.complete_up_to, mode=self.mode, constant=self.constant,
                  provenance=self.provenance, growth=self.growth, reference=self.reference)
        kw.update(changes)
        return CoeffTable(**kw)

    def scaled(self, c: complex) -> "CoeffTable":
        c = complex(c)
        ref = self.reference
        growth = self.growth
        if growth is not None:
            growth = GrowthClass(growth.C * abs(c), growth.alpha, growth.k)
        return self.copy(entries={k: c * v for k, v in self.entries.items() if c * v != 0},
                         constant=c * self.constant, growth=growth,
                         reference=None if ref is None else (lambda x: c * ref(x)))

    def restricted(self, keep: Callable[[CanonicalRep], bool]) -> "CoeffTable":
        """Copy keeping entries at reps where ``keep`` is true (others become zero)."""
        K = self.field
        out = {}
        for key, v in self.entries.items():
            x = FieldInt(K, *key)
            if keep(CanonicalRep(x, abs(x.norm()))):
                out[key] = v
        return self.copy(entries=out, reference=None)

    # -- file format -----------------------------------------------------------
    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        K = self.field
        lines = [f"field {K.descriptor}", f"weight {self.weight}"]
        lvl = self.level
        if self.weight.delta:
            inner = lvl.exact_div(K.element(4))
            lines.append(f"level 4*({K.format(inner)})" if inner is not None else f"level ({K.format(lvl)})")
        else:
            lines.append(f"level ({K.format(lvl)})")
        lines.append(f"complete-up-to {self.complete_up_to}")
        lines.append(f"normalization {self.mode}")
        lines.append(f"provenance {self.provenance}")
        if self.growth is not None:
            lines.append(f"growth {self.growth}")
        if self.constant != 0:
            lines.append(f"0 0 {_fmt(self.constant.real)} {_fmt(self.constant.imag)}")

        def order(item):
            x = FieldInt(K, *item[0])
            return (abs(x.norm()), x.trace(), x.a, x.b)

        for (a, b), v in sorted(self.entries.items(), key=order):
            lines.append(f"{a} {b} {_fmt(v.real)} {_fmt(v.imag)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def read(cls, path) -> "CoeffTable":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "CoeffTable":
        header: dict = {}
        raw = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head in ("field", "weight", "level", "complete-up-to", "normalization",
                        "provenance", "growth"):
                header[head] = rest.strip()
                continue
            parts = line.split()
            if len(parts) != 4:
                raise FormatError(f"line {lineno}: expected '<a> <b> <re> <im>', got {line!r}")
            try:
                raw.append((int(parts[0]), int(parts[1]), _num(parts[2]), _num(parts[3])))
            except ValueError:
                raise FormatError(f"line {lineno}: malformed entry {line!r}") from None
        for req in ("field", "weight"):
            if req not in header:
                raise FormatError(f"missing '{req}' header")
        K = make_field(header["field"])
        weight = WeightVector.parse(header["weight"])
        level = None
        if "level" in header:
            level = _parse_level(K, header["level"])
        growth = None
        if "growth" in header:
            g = header["growth"].split()
            growth = GrowthClass(float(g[0]), float(g[1]), int(g[2]))
        table = cls(K, weight, level=level, complete_up_to=int(header.get("complete-up-to", 0)),
                    mode=header.get("normalization", "a"),
                    provenance=header.get("provenance", "file"), growth=growth)
        for a, b, re_, im in raw:
            if K.degree == 1 and b:
                raise FormatError("rational field entries must have b = 0")
            val = complex(re_, im)
            if a == 0 and b == 0:
                table.constant = val
                continue
            x = FieldInt(K, a, b)
            if not K.is_totally_positive(x):
                raise FormatError(f"entry at {x} is not totally positive")
            rep, j = reduce_with_exponent(x)
            if j:
                raise FormatError(f"entry at {x} is not a canonical representative")
            if val != 0:
                table.entries[(a, b)] = val
        return table


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _num(text: str) -> float:
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def _parse_level(K: FieldContext, text: str) -> FieldInt:
    text = text.strip()
    mm = re.fullmatch(r"(?:(\d+)\*)?\((.*)\)", text)
    if mm:
        mult = int(mm.group(1) or 1)
        return K.element(mult) * parse_element(K, mm.group(2))
    return parse_element(K, text)


def lambda_(table: CoeffTable, xi: FieldInt) -> complex:
    return table.lam(xi)


# -- well-definedness ----------------------------------------------------------

@dataclass
class WelldefinedReport:
    max_violation: float
    worst: tuple | None
    pairs: int
    located: list = dc_field(default_factory=list)
    method: str = "reference"

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_violation < tol


def check_welldefined(table: CoeffTable, unit_powers: int = 2, pairs: int = 200,
                      reps: Iterable[FieldInt] | None = None, tol: float = 1e-12,
                      seed: int = 0) -> WelldefinedReport:
    """Compare transported values at ``xi * u**2`` against direct evaluation.

    With a reference evaluator the transported coefficient is checked against
    it.  Without one the only testable content is that lambda does not depend
    on the representative, which is what gets checked.
    """
    K = table.field
    if K.degree == 1:
        return WelldefinedReport(0.0, None, 0, method="vacuous")
    if reps is None:
        keys = sorted(table.entries, key=lambda k: (abs(FieldInt(K, *k).norm()), k))
        reps = [FieldInt(K, *k) for k in keys]
        # sparse tables: zero entries are checkable too (the reference must vanish there)
        need = -(-pairs // (2 * unit_powers))
        if len(reps) < need:
            have = set(keys)
            for r in table.reps():
                if len(reps) >= need:
                    break
                if r.key not in have:
                    reps.append(r.value)
    reps = list(reps)
    js = [j for p in range(1, unit_powers + 1) for j in (p, -p)]
    rng = np.random.default_rng(seed)
    n = len(reps)
    if n * len(js) <= pairs:
        work = [(x, j) for x in reps for j in js]
    elif n <= pairs:
        # every rep at least once, unit powers cycling
        work = [(reps[i % n], js[(i % n + i // n) % len(js)]) for i in range(pairs)]
    else:
        idx = rng.choice(n, size=pairs, replace=False)
        work = [(reps[i], js[t % len(js)]) for t, i in enumerate(sorted(idx))]
    method = "reference" if table.reference is not None else "lambda-invariance"
    worst, worst_at = 0.0, None
    located = []
    for x, j in work:
        y = x * K.eps_plus ** j
        if table.reference is not None:
            got, want = table.a(y), complex(table.reference(y))
        else:
            got, want = table.lam(y), table.lam(x)
        viol = abs(got - want) / max(1.0, abs(want))
        if viol > worst:
            worst, worst_at = viol, (x, j)
        if viol >= tol and x not in located:
            located.append(x)
    return WelldefinedReport(worst, worst_at, len(work), located, method)


# -- growth --------------------------------------------------------------------

@dataclass
class GrowthReport:
    sup: float
    argmax: CanonicalRep | None
    block_sups: list
    slope: float
    flagged: bool


def growth_check(table: CoeffTable, exponent: float, bound: int | None = None,
                 slope_tol: float = 0.15) -> GrowthReport:
    """Sup of ``|lambda(xi)| / N(xi)**exponent`` over the table.

    Block sups over dyadic norm ranges are fitted on a log-log scale over the
    upper half of the blocks; a slope above ``slope_tol`` flags a growth trend.
    """
    B = table.complete_up_to if bound is None else bound
    sup, arg = 0.0, None
    nblocks = max(1, int(math.log2(max(B, 1))) + 1)
    blocks = [0.0] * nblocks
    for rep in table.reps(B):
        v = abs(table.lam_rep(rep))
        if v == 0:
            continue
        q = v / rep.norm ** exponent
        b = int(math.log2(rep.norm))
        if q > blocks[b]:
            blocks[b] = q
        if q > sup:
            sup, arg = q, rep
    pts = [(i, math.log(s)) for i, s in enumerate(blocks) if s > 0]
    slope = 0.0
    upper = pts[len(pts) // 2:]
    if len(upper) >= 3:
        xs = np.array([p[0] * math.log(2) for p in upper])
        ys = np.array([p[1] for p in upper])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return GrowthReport(sup, arg, blocks, slope, slope > slope_tol)


# -- plus space and discriminants -----------------------------------------------

def squares_mod_4(K: FieldContext) -> frozenset:
    """Residues of squares modulo ``4 O_F``, as coordinate pairs mod 4."""
    out = set()
    bs = range(4) if K.degree == 2 else (0,)
    for a in range(4):
        for b in bs:
            y = FieldInt(K, a, b) * FieldInt(K, a, b)
            out.add((y.a % 4, y.b % 4))
    return frozenset(out)


def is_square_mod_4(x: FieldInt) -> bool:
    return (x.a % 4, x.b % 4) in squares_mod_4(x.K)


def plus_unit(K: FieldContext, weight: WeightVector) -> FieldInt:
    """``u_m``: 1 when ``(-1)**m = 1``, otherwise the fixed unit of norm -1."""
    if weight.parity == 1:
        return K.one
    v = K.negative_norm_unit
    if v is None:
        raise NoNegativeNormUnit(f"{K.descriptor} has no unit of norm -1")
    return v


@dataclass
class PlusSpaceReport:
    unit: FieldInt
    violations: list
    checked: int

    @property
    def passed(self) -> bool:
        return not self.violations


def plus_space_test(table: CoeffTable) -> PlusSpaceReport:
    """List reps with nonzero lambda where ``u_m * tau`` is not a square mod 4."""
    if table.weight.delta != 1:
        raise ValueError("the plus space condition applies to half-integral weight only")
    K = table.field
    u = plus_unit(K, table.weight)
    sq = squares_mod_4(K)
    bad = []
    n = 0
    for key, v in table.entries.items():
        if v == 0:
            continue
        n += 1
        y = u * FieldInt(K, *key)
        if (y.a % 4, y.b % 4) not in sq:
            bad.append(FieldInt(K, *key))
    bad.sort(key=lambda x: (abs(x.norm()), x.trace(), x.a, x.b))
    return PlusSpaceReport(u, bad, n)


@dataclass(frozen=True)
class DiscriminantCert:
    xi: FieldInt
    status: str  # fundamental | non-fundamental | out-of-scope


def is_fundamental_discriminant(xi: FieldInt) -> DiscriminantCert:
    """Restricted test for discriminants of the form ``(xi, 1)``.

    ``xi`` is fundamental when it is squarefree, coprime to 2 and a square
    modulo 4; even or non-square-mod-4 inputs are outside what the test decides.
    """
    K = xi.K
    if not K.is_totally_positive(xi):
        raise NotTotallyPositive(f"{xi} is not totally positive")
    if K.sqrt_exact(xi) is not None:
        raise SquareInput(f"{xi} is a square")
    if not is_squarefree(xi):
        return DiscriminantCert(xi, "non-fundamental")
    if xi.norm() % 2 == 0:
        return DiscriminantCert(xi, "out-of-scope")
    if not is_square_mod_4(xi):
        return DiscriminantCert(xi, "out-of-scope")
    return DiscriminantCert(xi, "fundamental")
