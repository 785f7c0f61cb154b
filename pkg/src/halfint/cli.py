"""Command-line front end: ``halfint <subcommand> ...``.

Exit codes: 0 when the requested check passes, 1 when it fails, 2 on usage or
input errors.  ``--quiet`` prints a single summary line and ``--report PATH``
writes the full report to a file.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import arith as ar
from .chars import chi_eval
from .errors import HalfintError
from .field import FieldContext, FieldInt, make_field, parse_element
from .forms import CoeffTable
from .lfunc import (CompletedL, completed_lambda, determine, dirichlet_sum,
                    functional_eq_residual, gamma_prefactor)
from .rankin import linear_growth_fit, nonvanishing_scan, rs_partial_sums
from .shimura import (EigenSystem, SqfreeSeed, global_identity_check, lift_reconstruct,
                      random_eigen)
from .theta import theta_coeffs


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Outcome:
    code: int
    lines: list
    summary: str


@dataclass
class RunConfig:
    field: str
    seed: int
    bound: int
    out_prefix: str


# -- helpers -------------------------------------------------------------------------

def _surd(K: FieldContext, x: FieldInt) -> str:
    """``x`` written with the square root of d, e.g. ``(3+sqrt5)/2``."""
    if K.degree == 1:
        return str(x.a)
    if K.half:
        p, q, den = 2 * x.a + x.b, x.b, 2
    else:
        p, q, den = x.a, x.b, 1
    if p % 2 == 0 and q % 2 == 0 and den == 2:
        p, q, den = p // 2, q // 2, 1
    body = f"{p}{'+' if q >= 0 else '-'}{'' if abs(q) == 1 else abs(q)}sqrt{K.d}"
    return body if den == 1 else f"({body})/{den}"


def _complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(text.replace("i", "j"))
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise UsageError(f"cannot parse complex number {text!r}; use RE,IM")


def _grid(desc: str) -> list:
    """``"0.3,0.5,0.7:0.5,2,5"`` is the product of real and imaginary parts;
    ``"a,b;c,d"`` is a list of RE,IM points."""
    if ":" in desc:
        re_part, im_part = desc.split(":", 1)
        res = [float(v) for v in re_part.split(",") if v]
        ims = [float(v) for v in im_part.split(",") if v]
        return [complex(r, i) for r in res for i in ims]
    return [_complex(p) for p in desc.split(";") if p]


def _floats(text: str) -> list:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _fmt_c(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


# -- subcommands ---------------------------------------------------------------------

def cmd_field_info(a) -> Outcome:
    K = make_field(a.field)
    lines = [f"field {K.descriptor}", f"degree {K.degree}", f"D_F={K.discriminant}"]
    if K.degree == 2:
        lines += [f"w: {K.w_description}",
                  f"eps={K.format(K.eps)} = {_surd(K, K.eps)} (norm {K.eps.norm()})",
                  f"eps+={K.format(K.eps_plus)} = {_surd(K, K.eps_plus)}",
                  f"delta={K.format(K.delta)} = {_surd(K, K.delta)}"]
    return Outcome(0, lines, f"{K.descriptor} D_F={K.discriminant}")


def cmd_enumerate(a) -> Outcome:
    K = make_field(a.field)
    reps = list(ar.enumerate_reps(K, a.bound))
    lines = [f"{r.norm}\t{K.format(r.value)}" for r in reps]
    return Outcome(0, lines, f"{len(reps)} orbits of norm <= {a.bound}")


def cmd_factor(a) -> Outcome:
    K = make_field(a.field)
    x = parse_element(K, a.elt)
    fac = ar.factor(x)
    lines = [f"{P}\t{P.kind}\tN={P.norm}\te={k}" for P, k in fac]
    return Outcome(0, lines, f"{K.format(x)} = {fac}")


def cmd_chi(a) -> Outcome:
    K = make_field(a.field)
    v = chi_eval(parse_element(K, a.tau), parse_element(K, a.eta))
    return Outcome(0, [str(v)], f"chi={v}")


def cmd_theta(a) -> Outcome:
    K = make_field(a.field)
    t = theta_coeffs(K, a.bound).table
    t.write(a.out)
    return Outcome(0, [f"wrote {a.out}: {len(t.entries)} nonzero entries up to norm {a.bound}"],
                   f"theta {K.descriptor} B={a.bound}")


def cmd_lift(a) -> Outcome:
    seed_tab = CoeffTable.read(a.seed)
    sys_ = EigenSystem.read(a.eigen, seed_tab.field)
    seed = SqfreeSeed.from_table(seed_tab)
    t = lift_reconstruct(seed, sys_, a.bound, weight=seed_tab.weight, level=seed_tab.level)
    t.write(a.out)
    return Outcome(0, [f"wrote {a.out}: {len(t.entries)} nonzero entries up to norm {a.bound}"],
                   f"lift B={a.bound}")


def cmd_lfun(a) -> Outcome:
    t = CoeffTable.read(a.table)
    s = _complex(a.s)
    B = a.bound if a.bound is not None else t.complete_up_to
    mirror = CoeffTable.read(a.mirror) if a.mirror else None
    cl = CompletedL(t, mirror=mirror)
    lines = [f"s\t{_fmt_c(s)}"]
    summary = ""
    if s.real - (t.growth.alpha if t.growth else 0.5) > 1:
        ds = dirichlet_sum(t, s, B)
        pre = gamma_prefactor(cl, s)
        lines += [f"L\t{_fmt_c(ds.value)}", f"tail\t{ds.tail:.3e}",
                  f"Lambda_series\t{_fmt_c(pre * ds.value)}"]
        summary = f"L={_fmt_c(ds.value)} tail={ds.tail:.2e}"
    if mirror is not None:
        v = completed_lambda(cl, s)
        lines.append(f"Lambda\t{_fmt_c(v)}")
        summary = (summary + " " if summary else "") + f"Lambda={_fmt_c(v)}"
    if not summary:
        raise UsageError("s is outside the convergence region; pass --mirror for the integral route")
    return Outcome(0, lines, summary)


def cmd_fe_check(a) -> Outcome:
    f = CoeffTable.read(a.table)
    g = CoeffTable.read(a.mirror)
    cf, cg = CompletedL(f, mirror=g), CompletedL(g, mirror=f)
    lines = ["s_re\ts_im\tLambda\tresidual"]
    worst = 0.0
    for s in _grid(a.grid):
        r = functional_eq_residual(cf, cg, s)
        worst = max(worst, r)
        lines.append(f"{s.real:g}\t{s.imag:g}\t{_fmt_c(completed_lambda(cf, s))}\t{r:.3e}")
    ok = worst < a.tol
    return Outcome(0 if ok else 1, lines,
                   f"fe-check max residual {worst:.3e} ({'pass' if ok else 'fail'} at tol {a.tol:g})")


def cmd_determine(a) -> Outcome:
    f = CoeffTable.read(a.f)
    g = CoeffTable.read(a.g)
    rep = determine(f, g, a.bound, plus_space=a.plus_space)
    k = rep.kappa
    ktxt = f"{k.real:.15g}" if k.imag == 0 else _fmt_c(k)
    lines = [f"kappa={ktxt}", f"squarefree reps checked: {rep.checked_sqfree} "
             f"(worst {rep.worst_sqfree:.2e})",
             f"all reps checked: {rep.checked_full} (worst {rep.worst_full:.2e})",
             f"verdict: {'equal' if rep.conclusion and rep.hypothesis else rep.verdict}"]
    ok = rep.hypothesis and rep.conclusion
    return Outcome(0 if ok else 1, lines, f"kappa={ktxt} {'equal' if ok else 'differ'}")


def cmd_rankin(a) -> Outcome:
    f = CoeffTable.read(a.f)
    g = CoeffTable.read(a.g) if a.g else None
    ps = rs_partial_sums(f, g, _floats(a.checkpoints))
    lines = ["T\tS(T)\tS(T)/T"]
    for T, v in zip(ps.checkpoints, ps.values):
        vv = v if isinstance(v, complex) else complex(v)
        val = f"{vv.real:.15g}" if vv.imag == 0 else _fmt_c(vv)
        lines.append(f"{T:g}\t{val}\t{abs(vv) / T:.6g}")
    summary = f"S({ps.checkpoints[-1]:g})={abs(complex(ps.values[-1])):.6g}"
    if len(ps.checkpoints) >= 4 and ps.checkpoints[-1] >= 8 * ps.checkpoints[0]:
        fit = linear_growth_fit(ps)
        lines.append(f"# slope {fit.slope:.6g} deviation {fit.deviation:.3g}")
        summary += f" slope={fit.slope:.6g} dev={fit.deviation:.3g}"
    return Outcome(0, lines, summary)


def cmd_scan(a) -> Outcome:
    t = CoeffTable.read(a.table)
    grid = [float(v) for v in np.geomspace(min(100.0, a.tmax), a.tmax, a.points)]
    rep = nonvanishing_scan(t, grid)
    lines = ["T\tsup\targmax"]
    for T, s, r in zip(rep.grid, rep.sups, rep.argmax):
        lines.append(f"{T:.6g}\t{s:.12g}\t{'-' if r is None else t.field.format(r.value)}")
    lines.append(f"# c0 {rep.c0:.6g}")
    if rep.note:
        lines.append(f"# {rep.note}")
    ok = rep.holds and rep.consistent
    return Outcome(0 if ok else 1, lines,
                   f"scan c0={rep.c0:.6g} {'holds' if ok else 'fails'}")


def synth_eigenform(cfg: RunConfig) -> tuple[Path, Path, Path]:
    """Write ``<prefix>.seed``, ``<prefix>.eigen`` and ``<prefix>.tbl``.

    The eigen-system has ``lambda(P) = 2 cos theta`` and the seed is uniform on
    ``[1/2, 1]``, both drawn from ``numpy.random.default_rng(cfg.seed)``.
    """
    K = make_field(cfg.field)
    rng = np.random.default_rng(cfg.seed)
    sys_ = random_eigen(K, cfg.bound, rng)
    seed = SqfreeSeed.random(K, cfg.bound, rng)
    table = lift_reconstruct(seed, sys_, cfg.bound)
    seed_table = table.restricted(lambda r: r.key in seed.values)
    seed_table.provenance = "synthetic-seed"
    paths = tuple(Path(cfg.out_prefix + ext) for ext in (".seed", ".eigen", ".tbl"))
    seed_table.write(paths[0])
    sys_.write(paths[1])
    table.write(paths[2])
    return paths


def cmd_synth(a) -> Outcome:
    cfg = RunConfig(a.field, a.seed, a.bound, a.out)
    paths = synth_eigenform(cfg)
    lines = [f"wrote {p}" for p in paths]
    code = 0
    if a.check:
        K = make_field(a.field)
        table = CoeffTable.read(paths[2])
        sys_ = EigenSystem.read(paths[1], K)
        rep = global_identity_check(table, sys_, 2.0, min(a.bound, 5000))
        lines.append(f"identity residual {rep.residual:.3e} bound {rep.tail_bound:.3e}")
        code = 0 if rep.passed else 1
    return Outcome(code, lines, f"synth seed={a.seed} B={a.bound}")


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="print a one-line summary only")
    common.add_argument("--report", metavar="PATH", help="also write the full report here")
    common.add_argument("--threads", type=int, default=0,
                        help="worker count (accepted for compatibility; evaluation is serial)")
    p = _Parser(prog="halfint", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("field-info", cmd_field_info, "field invariants")
    sp.add_argument("--field", required=True)
    sp = add("enumerate", cmd_enumerate, "canonical representatives up to a norm bound")
    sp.add_argument("--field", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp = add("factor", cmd_factor, "prime ideal factorization")
    sp.add_argument("--field", required=True)
    sp.add_argument("--elt", required=True)
    sp = add("chi", cmd_chi, "quadratic character chi_tau(eta)")
    sp.add_argument("--field", default="Q")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--eta", required=True)
    sp = add("theta", cmd_theta, "theta coefficient table")
    sp.add_argument("--field", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp = add("lift", cmd_lift, "reconstruct a table from a squarefree seed and an eigen-system")
    sp.add_argument("--seed", required=True)
    sp.add_argument("--eigen", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp = add("lfun", cmd_lfun, "Dirichlet series and completed L-value")
    sp.add_argument("--table", required=True)
    sp.add_argument("--s", required=True, help="RE,IM")
    sp.add_argument("--bound", type=int)
    sp.add_argument("--mirror")
    sp = add("fe-check", cmd_fe_check, "functional equation residuals on a grid")
    sp.add_argument("--table", required=True)
    sp.add_argument("--mirror", required=True)
    sp.add_argument("--grid", required=True, help="RE,RE,...:IM,IM,... or RE,IM;RE,IM")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp = add("determine", cmd_determine, "kappa and table agreement")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--bound", type=int)
    sp.add_argument("--plus-space", action="store_true")
    sp = add("rankin", cmd_rankin, "Rankin-Selberg partial sums")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g")
    sp.add_argument("--checkpoints", required=True)
    sp = add("scan", cmd_scan, "squarefree non-vanishing scan")
    sp.add_argument("--table", required=True)
    sp.add_argument("--tmax", type=float, required=True)
    sp.add_argument("--points", type=int, default=10)
    sp = add("synth", cmd_synth, "synthetic eigenform data")
    sp.add_argument("--field", required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--out", required=True, help="output path prefix")
    sp.add_argument("--check", action="store_true", help="run the global identity check at s = 2")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        out = args.fn(args)
    except UsageError as e:
        print(f"halfint: usage error: {e}", file=sys.stderr)
        return 2
    except (HalfintError, OSError, ValueError) as e:
        print(f"halfint: error: {e}", file=sys.stderr)
        return 2
    text = "\n".join(out.lines) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    print(out.summary if args.quiet else text, end="\n" if args.quiet else "")
    return out.code


if __name__ == "__main__":
    sys.exit(main())
