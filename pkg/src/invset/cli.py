"""Command-line runner.  Every action prints (or writes) one JSON or CSV document.

Exit status 0 on success, 1 when an input fails validation (a JSON error
record goes to stderr), 2 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import re
import shlex
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import algebra as alg
from . import fractal as frac
from . import lorenz as lz
from . import quantum as qm
from . import rationals as rat
from .serialize import SCHEMA_VERSION, dumps, rows_csv

OUTPUT_DIR_ENV = "INVSET_OUTPUT_DIR"


class ValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # let "-1/2" through as a value rather than an option
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+([eE][-+]?\d+)?$")

    def error(self, message):
        raise ValidationError(message)


def rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ValidationError(f"--{n.replace('_', '-')} is required for {args.command} {args.action}")


# --- algebra -------------------------------------------------------------------


def run_algebra(args):
    a = args.action
    if a == "relations":
        rows, payload = [], {}
        for size in args.sizes:
            checks = alg.chain_relations(size)
            payload[str(size)] = [{"relation": n, "holds": ok} for n, ok in checks]
            rows += [(size, n, ok) for n, ok in checks]
        if not all(r[2] for r in rows):
            raise frac.ConsistencyError("a basis relation failed")
        return payload, (["size", "relation", "holds"], rows)
    if a == "basis":
        ops = alg.quaternion_basis(args.size)
        subs = alg.basis_subscripts(args.size)
        payload = [{"subscript": s, "beta": alg.subscript_to_beta(s), "operator": e,
                    "matrix": alg.to_matrix(e)} for s, e in zip(subs, ops)]
        return payload, None
    if a == "sqrt":
        op = alg.blockwise_i(args.size) if args.beta is None else alg.basis_element(args.beta, args.size)
        root = alg.canonical_sqrt(op)
        return {"operator": op, "sqrt": root, "matrix": alg.to_matrix(root),
                "image_of_plain": str(root(alg.SymbolString.plain(args.size)))}, None
    if a == "power":
        _need(args, "alpha")
        beta = args.beta or Fraction(0)
        plain = alg.SymbolString.plain(args.size, args.symbol)
        if args.chain == "i":
            s = alg.root_power(alg.blockwise_i(args.size), args.alpha)(plain)
        else:
            s = alg.fractional_power(alg.OperatorLabel(beta, args.alpha, args.size))(plain)
        return {"chain": args.chain, "beta": beta, "alpha": args.alpha, "size": args.size, "string": s, "text": str(s),
                "frequency": alg.frequency(s)}, None
    if a == "frequencies":
        rows = []
        for beta in alg.beta_grid(args.size):
            for alpha in alg.alpha_grid(args.size):
                s = alg.fractional_power(alg.OperatorLabel(beta, alpha, args.size))(alg.SymbolString.plain(args.size))
                f = alg.frequency(s)
                if f != abs(1 - alpha / 2):
                    raise frac.ConsistencyError(f"frequency {f} at alpha={alpha}, beta={beta}")
                rows.append((beta, alpha, f))
        return [{"beta": b, "alpha": al, "frequency": f} for b, al, f in rows], (["beta", "alpha", "frequency"], rows)
    raise ValidationError(f"unknown algebra action {a!r}")


# --- cantor --------------------------------------------------------------------


def run_cantor(args):
    a = args.action
    if a == "approx":
        if args.variant == "middle-thirds":
            ap = frac.middle_thirds(args.k)
        else:
            ap = frac.cn_approx(args.N, args.k, args.variant, labelled=True)
        labels = ap.labels or [None] * len(ap)
        rows = [(iv.lo, iv.hi, "" if lab is None else ("¬a" if lab else "a")) for iv, lab in zip(ap.intervals, labels)]
        payload = {"family": ap.family, "N": ap.N, "k": ap.k, "variant": args.variant, "count": len(ap),
                   "measure": ap.measure(), "intervals": [{"lo": r[0], "hi": r[1], "label": r[2]} for r in rows]}
        return payload, (["lo", "hi", "label"], rows)
    if a == "stats":
        payload = {v: frac.grouping_stats(args.N, v) for v in ("t_i", "t_f")}
        rows = [(v, s.grouping_count, s.grouping_width, s.gap) for v, s in payload.items()]
        return payload, (["variant", "grouping_count", "grouping_width", "gap"], rows)
    if a == "labels":
        labs = frac.grouping_labels(args.N)
        rows = [(g, str(s), alg.frequency(s)) for g, s in enumerate(labs)]
        return [{"grouping": g, "label": t, "plain_fraction": f} for g, t, f in rows], \
            (["grouping", "label", "plain_fraction"], rows)
    if a == "map-d":
        m = frac.map_D(args.N, args.k)
        rows = list(enumerate(m))
        return {"N": args.N, "k": args.k, "map": list(m)}, (["t_i_index", "t_f_index"], rows)
    if a == "dimension":
        d = frac.similarity_dimension(args.N)
        return {"N": args.N, "copies": frac.copy_count(args.N), "scale": frac.copy_scale(args.N), "dimension": d}, None
    if a == "member":
        _need(args, "x")
        return {"x": args.x, "depth": args.depth, "membership": frac.ternary_member(args.x, args.depth)}, None
    raise ValidationError(f"unknown cantor action {a!r}")


# --- numbers -------------------------------------------------------------------


def cos_scan(max_den: int) -> list[tuple[Fraction, Fraction]]:
    """Every reduced angle ``m/n`` in [0, 1] with ``n <= max_den`` whose ``cos(pi m/n)`` is rational."""
    hits = {}
    for n in range(1, max_den + 1):
        for m in range(0, n + 1):
            r = Fraction(m, n)
            if r not in hits:
                c = rat.cos_pi_rational(r)
                if c is not None:
                    hits[r] = c
    return sorted(hits.items())


def run_numbers(args):
    a = args.action
    if a == "cos-scan":
        hits = cos_scan(args.max_den)
        return [{"angle_over_pi": r, "cos": c} for r, c in hits], (["angle_over_pi", "cos"], hits)
    if a == "third-cosine":
        _need(args, "cos_ab", "cos_ac", "beta")
        t = rat.spherical_third_cosine(args.cos_ab, args.cos_ac, args.beta, args.bits)
        return {"value": t.value, "exact": t.exact, "verdict": t.verdict, "certificate": t.certificate}, None
    if a == "triple":
        _need(args, "a", "b", "c")
        pts = [_point(v, args.bits) for v in (args.a, args.b, args.c)]
        rep = rat.triple_admissibility(*pts, bits=args.bits)
        names = ("ab", "ac", "bc")
        return {"pairwise": dict(zip(names, rep.pairwise)), "simultaneous": rep.simultaneous,
                "cosines": {n: {"exact": t.exact, "verdict": t.verdict, "certificate": t.certificate}
                            for n, t in zip(names, rep.cosines)}}, None
    if a == "dyadic":
        _need(args, "x")
        return {"x": args.x, "bits": args.bits, "dyadic": rat.is_dyadic(args.x),
                "describable": rat.is_dyadic_N_bits(args.x, args.bits)}, None
    raise ValidationError(f"unknown numbers action {a!r}")


def _point(pair, bits: int) -> qm.BlochPoint:
    return qm.BlochPoint(pair[0], pair[1], bits)


# --- bell ----------------------------------------------------------------------


def _record_rows(records):
    return [(r.lambda_space_id, r.cos_theta, r.sample_size, r.correlation) for r in records]


_RECORD_HEADER = ["lambda_space_id", "cos_theta", "sample_size", "correlation"]


def run_bell(args):
    a = args.action
    if a == "report":
        if args.a is not None:
            _need(args, "b", "c")
            pts = [_point(v, args.bits) for v in (args.a, args.b, args.c)]
            cp = _point(args.c_prime, args.bits) if args.c_prime is not None else None
            rep = qm.bell_experiment(*pts, c_prime=cp)
        else:
            _need(args, "cos_ab", "cos_ac", "cos_bc")
            rep = qm.bell_from_cosines(args.cos_ab, args.cos_ac, args.cos_bc, args.bits)
        if len({r.lambda_space_id for r in rep.records}) != 3 or rep.violated != (rep.lhs > rep.rhs):
            raise frac.ConsistencyError("bell report is internally inconsistent")
        return rep, (_RECORD_HEADER, _record_rows(rep.records))
    if a == "chsh":
        if args.chsh is None:
            raise ValidationError("--chsh COS_AB COS_AB' COS_A'B COS_A'B' is required for bell chsh")
        rep = qm.chsh_from_cosines(*args.chsh, bits=args.bits)
        return rep, (_RECORD_HEADER, _record_rows(rep.records))
    if a == "singlet":
        rows = []
        step = alg.alpha_step(2**args.bits)
        for k in range(int(2 / step) + 1):
            c = 1 - k * step
            if not rat.is_dyadic_N_bits(c, args.bits):
                continue
            r = qm.correlation_from_cosine(c, args.bits, f"Lambda_{k}")
            rows.append((c, r.sample_size, r.correlation, r.correlation == -c))
        if not all(r[3] for r in rows):
            raise frac.ConsistencyError("a correlation differs from -cos(theta)")
        return [{"cos_theta": c, "sample_size": n, "correlation": x, "equals_minus_cos": ok} for c, n, x, ok in rows], \
            (["cos_theta", "sample_size", "correlation", "equals_minus_cos"], rows)
    if a == "sg":
        if args.sg is None:
            raise ValidationError("--sg COS1 COS2 COS3 is required for bell sg")
        res = qm.sequential_sg(*args.sg, bits=args.bits)
        rows = [(k, res.counts[k], res.frequencies[k]) for k in "ABCD"]
        return res, (["detector", "count", "frequency"], rows)
    if a == "cauchy":
        target = _target(args.target)
        demo = qm.cauchy_divergence_demo(target, args.depth, 2**args.bits)
        rows = [(r.beta, r.next_beta, r.distance) for r in demo.rows]
        return demo, (["beta", "next_beta", "distance"], rows)
    if a == "tsirelson":
        s = qm.chsh_scan(args.bits)
        return {"bits": args.bits, "max_abs_S": s}, None
    raise ValidationError(f"unknown bell action {a!r}")


def _target(text: str):
    import mpmath

    consts = {"sqrt2": mpmath.sqrt(2), "pi/4": mpmath.pi / 4}
    if text in consts:
        return consts[text]
    return rational(text)


# --- lorenz --------------------------------------------------------------------


def run_lorenz(args):
    p = lz.LorenzParams(args.sigma, args.r, args.b)
    a = args.action
    if a == "integrate":
        tr = lz.integrate(args.state, p, args.dt, args.T)
        payload = {"params": vars_params(p), "dt": args.dt, "T": args.T, "final": tr.final,
                   "max_abs_X": float(np.abs(tr.states[:, 0]).max()), "max_Z": float(tr.states[:, 2].max())}
        rows = [(f"{t:.10g}", f"{x:.17g}", f"{y:.17g}", f"{z:.17g}")
                for t, (x, y, z) in zip(tr.t[::args.every], tr.states[::args.every])]
        return payload, (["t", "X", "Y", "Z"], rows)
    if a == "word":
        tr = lz.integrate(args.state, p, args.dt, args.T)
        w = lz.symbolic_word(tr)
        return {"word": w, "length": len(w)}, None
    if a == "matrix":
        _need(args, "word")
        m = lz.word_to_matrix(args.word)
        return {"word": args.word, "normal_form": lz.cyclic_normal_form(args.word), "matrix": m.to_list(),
                "trace": m.trace()}, None
    if a == "upo":
        words = set(args.words) if args.words else None
        cat = lz.find_upos(p, args.max_word, args.budget, args.seed, args.dt, words=words)
        rows = [(o.normal_form, o.word, f"{o.period:.12g}", *(f"{v:.15g}" for v in o.initial_point))
                for o in cat.orbits]
        return cat, (["normal_form", "word", "period", "X", "Y", "Z"], rows)
    if a == "contraction":
        res = lz.ellipsoid_contraction_check(p, args.T, args.dt, seed=args.seed)
        return {"measured": res.measured, "expected": res.expected, "relative_error": res.relative_error}, None
    if a == "lyapunov":
        lam = lz.lyapunov_max(p, args.T, args.renorm, args.dt, seed=args.seed)
        return {"lyapunov_max": lam, "T": args.T, "dt": args.dt}, None
    if a == "ensemble":
        init = lz.ring(args.state, args.radius, args.members)
        res = lz.evolve_ensemble(init, p, args.T, args.dt, args.snapshots)
        payload = {"members": len(res), "diverged": int(res.diverged.sum()), "spread_ratio": res.spread_ratio(),
                   "wing_fractions": list(res.wing_fractions()), "final": res.final}
        rows = [(f"{t:.10g}", m, *(f"{v:.17g}" for v in st))
                for t, snap in zip(res.times, res.snapshots) for m, st in enumerate(snap)]
        return payload, (["t", "member", "X", "Y", "Z"], rows)
    raise ValidationError(f"unknown lorenz action {a!r}")


def vars_params(p: lz.LorenzParams) -> dict:
    return {"sigma": p.sigma, "r": p.r, "b": p.b}


# --- parser --------------------------------------------------------------------

ACTIONS = {
    "algebra": ("relations", "basis", "sqrt", "power", "frequencies"),
    "cantor": ("approx", "stats", "labels", "map-d", "dimension", "member"),
    "numbers": ("cos-scan", "third-cosine", "triple", "dyadic"),
    "bell": ("report", "chsh", "singlet", "sg", "cauchy", "tsirelson"),
    "lorenz": ("integrate", "word", "matrix", "upo", "contraction", "lyapunov", "ensemble"),
}
RUNNERS = {"algebra": run_algebra, "cantor": run_cantor, "numbers": run_numbers, "bell": run_bell,
           "lorenz": run_lorenz}


def _common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="output file (relative paths go under $" + OUTPUT_DIR_ENV + ")")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="invset", description=__doc__.splitlines()[0])
    top.add_argument("--config", help="INI file whose [run] section mirrors the flags")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("algebra", help="operators, relations, strings")
    p.add_argument("action", nargs="?", default="relations", choices=ACTIONS["algebra"])
    p.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16])
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--alpha", type=rational)
    p.add_argument("--beta", type=rational)
    p.add_argument("--symbol", default="a")
    p.add_argument("--chain", choices=("E", "i"), default="E", help="basis element E_beta or blockwise i")
    _common(p)

    p = sub.add_parser("cantor", help="Cantor-set approximations")
    p.add_argument("action", nargs="?", default="stats", choices=ACTIONS["cantor"])
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--variant", choices=("t_i", "t_f", "middle-thirds"), default="t_i")
    p.add_argument("--x", type=rational)
    p.add_argument("--depth", type=int, default=64)
    _common(p)

    p = sub.add_parser("numbers", help="rational cosines and dyadic admissibility")
    p.add_argument("action", nargs="?", default="cos-scan", choices=ACTIONS["numbers"])
    p.add_argument("--max-den", type=int, default=64)
    p.add_argument("--cos-ab", type=rational)
    p.add_argument("--cos-ac", type=rational)
    p.add_argument("--beta", type=rational)
    p.add_argument("--bits", type=int, default=16)
    p.add_argument("--a", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--b", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--c", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--x", type=rational)
    _common(p)

    p = sub.add_parser("bell", help="singlet tables, Bell and CHSH reports, Stern-Gerlach")
    p.add_argument("action", nargs="?", default="report", choices=ACTIONS["bell"])
    p.add_argument("--bits", type=int, default=8)
    p.add_argument("--cos-ab", type=rational)
    p.add_argument("--cos-ac", type=rational)
    p.add_argument("--cos-bc", type=rational)
    p.add_argument("--a", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--b", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--c", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--c-prime", type=rational, nargs=2, metavar=("COS", "BETA"))
    p.add_argument("--chsh", type=rational, nargs=4)
    p.add_argument("--sg", type=rational, nargs=3)
    p.add_argument("--target", default="sqrt2")
    p.add_argument("--depth", type=int, default=8)
    _common(p)

    p = sub.add_parser("lorenz", help="Lorenz integration, words, orbits, exponents")
    p.add_argument("action", nargs="?", default="integrate", choices=ACTIONS["lorenz"])
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--r", type=float, default=28.0)
    p.add_argument("--b", type=float, default=8.0 / 3.0)
    p.add_argument("--state", type=float, nargs=3, default=[1.0, 1.0, 20.0])
    p.add_argument("--dt", type=float, default=lz.DEFAULT_DT)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--every", type=int, default=10)
    p.add_argument("--word")
    p.add_argument("--words", nargs="+")
    p.add_argument("--max-word", type=int, default=5)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--renorm", type=float, default=0.01)
    p.add_argument("--radius", type=float, default=1e-3)
    p.add_argument("--members", type=int, default=32)
    p.add_argument("--snapshots", type=int, default=5)
    _common(p)
    return top


def config_argv(path: str) -> list[str]:
    """Flags from an INI file: ``command``/``action`` keys plus one key per flag."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep --N and --T distinct from their lowercase cousins
    if not cp.read(path, encoding="utf-8"):
        raise ValidationError(f"cannot read config file {path}")
    if "run" not in cp:
        raise ValidationError("config file needs a [run] section")
    sec = dict(cp["run"])
    if "command" not in sec:
        raise ValidationError("config [run] section needs a 'command' key")
    argv = [sec.pop("command")]
    if "action" in sec:
        argv.append(sec.pop("action"))
    for key, val in sec.items():
        argv.append("--" + key.replace("_", "-"))
        argv += shlex.split(val)
    return argv


def _destination(args) -> Path | None:
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if args.output:
        path = Path(args.output)
        if not path.is_absolute() and out_dir:
            path = Path(out_dir) / path
        return path
    if out_dir:
        return Path(out_dir) / f"{args.command}-{args.action}.{args.format}"
    return None


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        pre = _Parser(add_help=False, allow_abbrev=False)
        pre.add_argument("--config")
        known, rest = pre.parse_known_args(argv)
        args = parser.parse_args(config_argv(known.config) + rest if known.config else argv)
        if args.command is None:
            raise ValidationError("a subcommand is required: " + ", ".join(ACTIONS))
        payload, table = RUNNERS[args.command](args)
        kind = f"{args.command}.{args.action}"
        if args.format == "csv":
            if table is None:
                raise ValidationError(f"{kind} has no tabular form; use --format json")
            text = rows_csv(*table)
        else:
            text = dumps(payload, kind)
        dest = _destination(args)
        if dest is None:
            sys.stdout.write(text)
        else:
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_text(text, encoding="utf-8")
        return 0
    except (frac.ConsistencyError, AssertionError) as exc:
        _error("internal-consistency", exc)
        return 2
    except (ValueError, argparse.ArgumentTypeError) as exc:
        _error("validation", exc)
        return 1


def _error(kind: str, exc: Exception):
    rec = {"schema_version": SCHEMA_VERSION, "error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
