"""Exact arithmetic in Q and in real quadratic fields Q(sqrt d) of narrow class number 1.

Elements of the ring of integers are stored as integer coordinates ``(a, b)``
meaning ``a + b*w`` where ``w`` is the integral basis generator: ``sqrt(d)``
when ``d = 2, 3 mod 4`` and ``(1 + sqrt(d))/2`` when ``d = 1 mod 4``.  For Q
the second coordinate is always zero.
"""
from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath

from .errors import DomainError, FormatError, UnsupportedField

SUPPORTED_D = (2, 5, 13, 17, 29)
DEFAULT_PRECISION = 64


def _default_precision() -> int:
    env = os.environ.get("HALFINT_PRECISION")
    if env:
        try:
            return max(16, int(env))
        except ValueError:
            raise UnsupportedField(f"HALFINT_PRECISION={env!r} is not an integer") from None
    return DEFAULT_PRECISION


def _is_squarefree(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


class FieldInt:
    """An element ``a + b*w`` of the ring of integers of a supported field."""

    __slots__ = ("a", "b", "K")

    def __init__(self, K: "FieldContext", a: int, b: int = 0):
        if K.degree == 1 and b:
            raise ValueError("rational integers have no w-coordinate")
        self.K = K
        self.a = int(a)
        self.b = int(b)

    # -- ring operations -------------------------------------------------
    def _coerce(self, other) -> "FieldInt":
        if isinstance(other, FieldInt):
            if other.K is not self.K and other.K.d != self.K.d:
                raise ValueError("elements belong to different fields")
            return other
        if isinstance(other, int):
            return FieldInt(self.K, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldInt(self.K, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldInt(self.K, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return FieldInt(self.K, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        K = self.K
        if K.degree == 1:
            return FieldInt(K, a1 * a2)
        bb = b1 * b2
        if K.half:
            return FieldInt(K, a1 * a2 + K.c * bb, a1 * b2 + a2 * b1 + bb)
        return FieldInt(K, a1 * a2 + K.d * bb, a1 * b2 + a2 * b1)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise ValueError("negative power of a non-unit")
            return inv ** (-k)
        result = self.K.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if not isinstance(other, FieldInt):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.K.d == other.K.d

    def __hash__(self):
        return hash((self.a, self.b, self.K.d))

    def __repr__(self):
        return f"FieldInt({self.K.descriptor}, {self.K.format(self)})"

    def __str__(self):
        return self.K.format(self)

    @property
    def coords(self) -> tuple[int, int]:
        return (self.a, self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    # -- conjugation, norm, trace ---------------------------------------
    def conj(self) -> "FieldInt":
        K = self.K
        if K.degree == 1:
            return self
        if K.half:
            return FieldInt(K, self.a + self.b, -self.b)
        return FieldInt(K, self.a, -self.b)

    def norm(self) -> int:
        K, a, b = self.K, self.a, self.b
        if K.degree == 1:
            return a
        if K.half:
            return a * a + a * b - K.c * b * b
        return a * a - K.d * b * b

    def trace(self) -> int:
        K = self.K
        if K.degree == 1:
            return self.a
        return 2 * self.a + self.b if K.half else 2 * self.a

    def exact_div(self, other: "FieldInt") -> "FieldInt | None":
        """Return ``self / other`` if it lies in the ring of integers, else None."""
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        if self.K.degree == 1:
            return None if self.a % n else FieldInt(self.K, self.a // n)
        p = self * o.conj()
        if p.a % n or p.b % n:
            return None
        return FieldInt(self.K, p.a // n, p.b // n)

    def divides(self, other: "FieldInt") -> bool:
        return other.exact_div(self) is not None

    def inverse(self) -> "FieldInt | None":
        """Multiplicative inverse when ``self`` is a unit."""
        n = self.norm()
        if n not in (1, -1):
            return None
        if self.K.degree == 1:
            return self
        c = self.conj()
        return c if n == 1 else -c

    # -- real views -----------------------------------------------------
    def embed(self) -> tuple[float, ...]:
        return self.K.embed(self)

    def is_totally_positive(self) -> bool:
        return self.K.is_totally_positive(self)


class FieldContext:
    """A totally real field of degree 1 or 2 with narrow class number 1.

    Instances are built by :func:`make_field` and must be treated as immutable.
    """

    def __init__(self, d: int | None, precision: int | None = None):
        self.d = d
        self.degree = 1 if d is None else 2
        self.precision = precision if precision is not None else _default_precision()
        if d is None:
            self.half = False
            self.c = 0
            self.discriminant = 1
            self.descriptor = "Q"
        else:
            self.half = d % 4 == 1
            self.c = (d - 1) // 4 if self.half else 0
            self.discriminant = d if self.half else 4 * d
            self.descriptor = f"Q(sqrt{{{d}}})"
        self.zero = FieldInt(self, 0)
        self.one = FieldInt(self, 1)
        if d is None:
            self._sqrt_d = 0.0
            self._w = (1.0,)
            self.eps = FieldInt(self, -1)
            self.eps_plus = self.one
            self.negative_norm_unit = FieldInt(self, -1)
            self.delta = self.one
            self.log_eps_plus = 0.0
            return
        self._sqrt_d = math.sqrt(d)
        if self.half:
            self._w = ((1 + self._sqrt_d) / 2, (1 - self._sqrt_d) / 2)
        else:
            self._w = (self._sqrt_d, -self._sqrt_d)
        self.eps = self._fundamental_unit()
        self.eps_plus = self.eps if self.eps.norm() == 1 else self.eps * self.eps
        self.negative_norm_unit = self.eps if self.eps.norm() == -1 else None
        self.delta = self._different_generator()
        self.log_eps_plus = math.log(self.embed(self.eps_plus)[0])

    def __repr__(self):
        return f"FieldContext({self.descriptor})"

    @property
    def w_description(self) -> str:
        if self.degree == 1:
            return "none (rational field)"
        return f"(1+sqrt({self.d}))/2" if self.half else f"sqrt({self.d})"

    def element(self, a: int, b: int = 0) -> FieldInt:
        return FieldInt(self, a, b)

    def sqrt_d(self) -> FieldInt:
        """The element sqrt(d) in integral coordinates."""
        if self.degree == 1:
            raise DomainError("Q has no sqrt(d)")
        return FieldInt(self, -1, 2) if self.half else FieldInt(self, 0, 1)

    # -- units and the different ----------------------------------------
    def _fundamental_unit(self) -> FieldInt:
        # continued fraction of w = (P + sqrt d)/Q; convergents p/q give p - q*w small
        d = self.d
        P, Q = (1, 2) if self.half else (0, 1)
        r = math.isqrt(d)
        p_prev, p = 1, (P + r) // Q
        q_prev, q = 0, 1
        for _ in range(1000):
            cand = FieldInt(self, p, -q).conj()
            if cand.norm() in (1, -1) and self._big_embedding(cand) > 1:
                return cand
            a_n = (P + r) // Q
            P = a_n * Q - P
            Q = (d - P * P) // Q
            a_next = (P + r) // Q
            p_prev, p = p, a_next * p + p_prev
            q_prev, q = q, a_next * q + q_prev
        raise UnsupportedField(f"no unit found for d={d}")

    def _different_generator(self) -> FieldInt:
        g = self.sqrt_d() if self.half else FieldInt(self, 0, 2)
        best = None
        for k in range(-6, 7):
            for sign in (1, -1):
                cand = (g * self.eps ** k) * sign
                if cand.is_totally_positive():
                    key = (cand.trace(), cand.a, cand.b)
                    if best is None or key < best[0]:
                        best = (key, cand)
        if best is None:
            raise UnsupportedField("different has no totally positive generator")
        return best[1]

    def unit_root(self, k: int) -> FieldInt:
        """A unit ``u`` with ``u**2 == eps_plus**k`` and positive first embedding."""
        if self.degree == 1:
            return self.one
        if self.eps_plus == self.eps * self.eps:
            return self.eps ** k
        raise UnsupportedField("totally positive unit is not a square")

    # -- embeddings -------------------------------------------------------
    def _big_embedding(self, x: FieldInt) -> float:
        return x.a + x.b * self._w[0]

    def embed(self, x: FieldInt) -> tuple[float, ...]:
        """Real embeddings as floats; the smaller one is recovered through the norm."""
        if self.degree == 1:
            return (float(x.a),)
        s1 = x.a + x.b * self._w[0]
        s2 = x.a + x.b * self._w[1]
        n = x.norm()
        if abs(s1) >= abs(s2):
            if s1 != 0:
                s2 = n / s1
        else:
            s1 = n / s2
        return (s1, s2)

    def embed_mp(self, x: FieldInt, prec: int | None = None) -> tuple:
        """Embeddings as mpmath floats with ``prec`` fractional bits."""
        prec = prec or self.precision
        bits = prec + max(8, x.a.bit_length(), x.b.bit_length())
        with mpmath.workprec(bits):
            if self.degree == 1:
                return (mpmath.mpf(x.a),)
            sd = mpmath.sqrt(self.d)
            if self.half:
                w1, w2 = (1 + sd) / 2, (1 - sd) / 2
            else:
                w1, w2 = sd, -sd
            return (x.a + x.b * w1, x.a + x.b * w2)

    def is_totally_positive(self, x: FieldInt) -> bool:
        if self.degree == 1:
            return x.a > 0
        return x.trace() > 0 and x.norm() > 0

    # -- exact square roots -----------------------------------------------
    def sqrt_exact(self, x: FieldInt) -> FieldInt | None:
        """Return ``v`` with ``v*v == x`` (first embedding >= 0), or None."""
        if self.degree == 1:
            if x.a < 0:
                return None
            r = math.isqrt(x.a)
            return FieldInt(self, r) if r * r == x.a else None
        n = x.norm()
        if n < 0:
            return None
        if n == 0:
            return self.zero if x.is_zero() else None
        rn = math.isqrt(n)
        if rn * rn != n:
            return None
        # v = p + q w with N(v) = +-rn and Tr(v)^2 = Tr(x) + 2 N(v)
        for nv in (rn, -rn):
            t2 = x.trace() + 2 * nv
            if t2 < 0:
                continue
            t = math.isqrt(t2)
            if t * t != t2:
                continue
            for tr in (t, -t):
                # sigma1(v) - sigma2(v) = q sqrt(d), and (s1 - s2)^2 = tr^2 - 4 nv
                disc = tr * tr - 4 * nv
                dd = self.d if self.half else 4 * self.d
                if disc % dd:
                    continue
                qq = disc // dd
                q = math.isqrt(qq)
                if q * q != qq:
                    continue
                for qs in (q, -q):
                    if self.half:
                        if (tr - qs) % 2:
                            continue
                        v = FieldInt(self, (tr - qs) // 2, qs)
                    else:
                        if tr % 2:
                            continue
                        v = FieldInt(self, tr // 2, qs)
                    if v * v == x:
                        return v if self._big_embedding(v) >= 0 else -v
        return None

    # -- text forms -------------------------------------------------------
    def format(self, x: FieldInt) -> str:
        if self.degree == 1:
            return str(x.a)
        return f"{x.a}{x.b:+d}*w"

    def parse(self, text: str) -> FieldInt:
        return parse_element(self, text)


_ELT_RE = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*\*?\s*w)?\s*$")


def parse_element(K: FieldContext, text: str) -> FieldInt:
    """Parse ``"a+b*w"``, ``"a"``, ``"b*w"`` or ``"w"`` into a field element."""
    s = text.strip().replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if s in ("w", "+w", "-w") or re.fullmatch(r"[+-]?\d*\*?w", s):
        sign = -1 if s.startswith("-") else 1
        digits = re.sub(r"[^0-9]", "", s)
        b = sign * (int(digits) if digits else 1)
        if K.degree == 1:
            raise FormatError(f"Q has no w-coordinate: {text!r}")
        return FieldInt(K, 0, b)
    m = _ELT_RE.match(s)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise FormatError(f"cannot parse element {text!r}")
    a = int(m.group(1)) if m.group(1) else 0
    b = 0
    if m.group(2):
        b = int(m.group(3)) if m.group(3) else 1
        if m.group(2) == "-":
            b = -b
    if b and K.degree == 1:
        raise FormatError(f"Q has no w-coordinate: {text!r}")
    return FieldInt(K, a, b)


_DESC_RE = re.compile(r"^\s*Q\s*(?:\(\s*sqrt\s*[\{\(]?\s*(\d+)\s*[\}\)]?\s*\))?\s*$", re.I)


def parse_descriptor(desc: str | int | None) -> int | None:
    if desc is None:
        return None
    if isinstance(desc, int):
        return desc
    m = _DESC_RE.match(desc)
    if not m:
        raise UnsupportedField(f"unrecognized field descriptor {desc!r}")
    return int(m.group(1)) if m.group(1) else None


@lru_cache(maxsize=None)
def _make_field(d: int | None, precision: int | None) -> FieldContext:
    return FieldContext(d, precision)


def make_field(desc: str | int | None = "Q", precision: int | None = None) -> FieldContext:
    """Build the context for ``"Q"`` or ``"Q(sqrt{d})"`` (``d`` on the allow-list)."""
    d = parse_descriptor(desc)
    if d is not None:
        if d <= 1 or not _is_squarefree(d):
            raise UnsupportedField(f"d={d} is not a squarefree integer > 1")
        if d not in SUPPORTED_D:
            raise UnsupportedField(
                f"Q(sqrt{{{d}}}) is not on the narrow-class-number-1 allow-list {SUPPORTED_D}")
    return _make_field(d, precision if precision is not None else _default_precision())


# -- free functions mirroring the operation surface ---------------------------

def arith(x: FieldInt, y: FieldInt, op: str) -> FieldInt:
    if op == "+":
        return x + y
    if op in ("-", "−"):
        return x - y
    if op in ("*", "×"):
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def norm(x: FieldInt) -> int:
    return x.norm()


def trace(x: FieldInt) -> int:
    return x.trace()


def is_totally_positive(x: FieldInt) -> bool:
    return x.is_totally_positive()


def multi_power(x: FieldInt | Sequence[float], t: Iterable) -> complex:
    """Product of ``sigma_i(x) ** t_i`` using principal real powers."""
    emb = x.embed() if isinstance(x, FieldInt) else tuple(x)
    ts = tuple(t)
    if len(ts) != len(emb):
        raise ValueError("exponent vector length does not match the field degree")
    out = 1.0
    for s, e in zip(emb, ts):
        if s > 0:
            out *= s ** float(e)
            continue
        e_q = e if isinstance(e, Fraction) else Fraction(e).limit_denominator(1 << 20)
        if e_q.denominator == 1:
            out *= s ** int(e_q)
        else:
            raise DomainError(f"non-integral power {e} of non-positive embedding {s}")
    return complex(out)
