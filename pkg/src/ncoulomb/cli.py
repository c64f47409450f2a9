"""Batch front end: verify, spectrum, wavecheck, erratum.

Exit codes: 0 all checks pass, 1 tool failure, 2 erratum found,
3 fall to center, 64 usage error.
"""
import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .spectrum import FallToCenterError, SpectrumDomainError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ERRATUM = 2
EXIT_FALL = 3
EXIT_USAGE = 64

BADGE_TOL = 1e-4
RESIDUAL_TOL = 1e-8
CSV_HEADER = ["n", "I", "E_formula", "E_parabolic", "E_algebraic", "E_numeric", "badge"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# config


def read_config(path):
    """key=value lines; '#' starts a comment; dashes in keys become underscores."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        cfg[k.replace("-", "_")] = v
    return cfg


def _apply_config(sub, cfg):
    known = {a.dest: a for a in sub._actions}
    out = {}
    for k, v in cfg.items():
        if k not in known:
            continue
        act = known[k]
        if isinstance(act, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            out[k] = v.lower() in ("1", "true", "yes", "on")
        else:
            out[k] = act.type(v) if act.type else v
    sub.set_defaults(**out)


# --------------------------------------------------------------------------
# parameters


def _coupling(s):
    if s is None or s == "symbolic":
        return None
    try:
        float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")
    return s


def _params(args, N):
    from .observables import ModelParams

    return ModelParams(N, args.c0, args.c1, args.c2, args.hbar)


def _numeric_params(args, N):
    from fractions import Fraction

    from .observables import ModelParams

    vals = []
    for name in ("c0", "c1", "c2", "hbar"):
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"--{name} must be numeric for this command")
        vals.append(Fraction(v))
    c0, c1, c2, hbar = vals
    return ModelParams(N, c0, c1, c2, hbar)


def _run_block(args, keys):
    out = {"command": args.command, "version": __version__, "seed": args.seed}
    for k in keys:
        v = getattr(args, k)
        out[k] = "symbolic" if v is None and k in ("c0", "c1", "c2", "hbar") else v
    return out


def _json(doc):
    return json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"


def _plain(o):
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, (np.floating, float)):
        f = float(o)
        return f if math.isfinite(f) else str(f)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    return o


def _emit(args, text, filename):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands


def cmd_verify(args):
    from .algebra_verify import run_suite
    from .observables import build_classical, build_quantum
    from .symbolic.diffop import CancelToken

    N = args.n
    if not 3 <= N <= 6:
        raise UsageError(f"--n must be between 3 and 6, got {N}")
    params = _params(args, N)
    build = build_classical if args.kind == "classical" else build_quantum
    obs = build(params, runge_lenz=args.runge_lenz)
    token = CancelToken.with_timeout(args.timeout) if args.timeout else None
    dump_dir = Path(args.out) / "dumps" if args.out else None
    forms = tuple(f for f in args.casimir.split(",") if f)
    reports = run_suite(obs, args.convention, dump_dir, token, casimir_forms=forms, fits=not args.no_fits, seed=args.seed)
    results = [{"id": r.id, "verdict": r.verdict, "data": r.data} for r in reports]
    errata = [r.id for r in reports if not r.passed or r.data.get("matches_printed") is False]
    doc = {
        "run": _run_block(args, ["kind", "n", "convention", "runge_lenz", "casimir", "c0", "c1", "c2", "hbar"]),
        "results": results,
        "errata": errata,
    }
    if args.format == "json":
        _emit(args, _json(doc), "report.json")
    else:
        lines = [f"{r.id:40s} {r.verdict:9s} {r.wall_time:8.3f}s" for r in reports]
        _emit(args, "\n".join(lines) + "\n", "report.txt")
    if args.out:
        # timings vary run to run, so they live outside the deterministic report
        (Path(args.out) / "timings.json").write_text(_json({r.id: r.wall_time for r in reports}))
    else:
        for r in reports:
            print(f"# {r.id}: {r.wall_time:.3f}s", file=sys.stderr)
    return EXIT_ERRATUM if errata else EXIT_OK


def cmd_spectrum(args):
    from .oracle import compare_spectrum

    if args.levels < 1:
        raise UsageError("--levels must be >= 1")
    if args.I < 0:
        raise UsageError("--I must be >= 0")
    params = _numeric_params(args, args.n)
    lines = compare_spectrum(
        params, args.I, args.levels, include_printed=args.convention == "as-printed", M=args.grid, A_source=args.angular
    )
    printed = args.convention == "as-printed"
    rows = []
    for ln in lines:
        row = {
            "n": ln.n,
            "I": ln.I,
            "E_formula": ln.E_formula,
            "E_parabolic": ln.E_parabolic,
            "E_algebraic": ln.E_algebraic,
            "E_numeric": ln.E_numeric,
            "badge": ln.badge,
        }
        if printed:
            row["E_parabolic_printed"] = ln.E_parabolic_printed
            row["printed_over_formula"] = ln.E_parabolic_printed / ln.E_formula
        rows.append(row)
    bad = [r["n"] for r in rows if not (r["badge"] < BADGE_TOL)]
    if args.format == "csv":
        buf = io.StringIO()
        header = CSV_HEADER + (["E_parabolic_printed"] if printed else [])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r[k] if isinstance(r[k], int) else repr(float(r[k])) for k in header])
        _emit(args, buf.getvalue(), "spectrum.csv")
    elif args.format == "json":
        doc = {
            "run": _run_block(args, ["n", "c0", "c1", "c2", "hbar", "levels", "I", "convention", "angular", "grid"]),
            "results": [{"id": f"spectrum.n{r['n']}", "verdict": "pass" if r["badge"] < BADGE_TOL else "residual", "data": r} for r in rows],
            "errata": [f"spectrum.n{n}" for n in bad],
        }
        _emit(args, _json(doc), "spectrum.json")
    else:
        txt = "".join(
            f"n={r['n']} I={r['I']} E={r['E_formula']:.12g} numeric={r['E_numeric']:.12g} badge={r['badge']:.2e}\n" for r in rows
        )
        _emit(args, txt, "spectrum.txt")
    return EXIT_ERRATUM if bad else EXIT_OK


def cmd_wavecheck(args):
    from .wavefunctions import QuantumNumberError, build_angular, build_parabolic, build_radial, norm_audit

    params = _numeric_params(args, args.n_dim)
    try:
        if args.which == "angular":
            l = args.l if args.l is not None else args.I
            sols = {"theta": build_angular(params, l, args.I, form=args.form)}
            scale = math.pi
            pts = np.linspace(0, scale, args.samples + 2)[1:-1]
        elif args.which == "radial":
            if args.n is None or args.l is None:
                raise UsageError("radial needs --n and --l")
            sols = {"R": build_radial(params, args.n, args.l, args.I)}
            scale = 1 / sols["R"].eps
            pts = scale * np.linspace(0.2, 10, args.samples)
        else:
            sol = build_parabolic(params, args.n1, args.n2, args.I)
            sols = {"f1": sol.f1, "f2": sol.f2}
            scale = 1 / sol.eps
            pts = scale * np.linspace(0.2, 10, args.samples)
    except (QuantumNumberError, SpectrumDomainError) as exc:
        raise UsageError(str(exc))
    results = []
    worst = 0.0
    for name, s in sols.items():
        res = s.residual(pts)
        worst = max(worst, float(np.max(res)))
        data = {"points": [float(p) for p in pts], "residuals": [float(v) for v in res], "max_residual": float(np.max(res))}
        if hasattr(s, "squared_norm"):
            data["norm_audit"] = norm_audit(s)
        results.append({"id": f"wavecheck.{args.which}.{name}", "verdict": "pass" if np.max(res) < RESIDUAL_TOL else "residual", "data": data})
    doc = {
        "run": _run_block(args, ["which", "n_dim", "n", "l", "I", "n1", "n2", "form", "samples", "c0", "c1", "c2", "hbar"]),
        "results": results,
        "errata": [r["id"] for r in results if r["verdict"] != "pass"],
    }
    if args.format == "json":
        _emit(args, _json(doc), "wavecheck.json")
    else:
        txt = "".join(f"{r['id']}: max residual {r['data']['max_residual']:.3e} ({r['verdict']})\n" for r in results)
        _emit(args, txt, "wavecheck.txt")
    return EXIT_OK if worst < RESIDUAL_TOL else EXIT_ERRATUM


def cmd_erratum(args):
    from .errata import build_ledger, errata_only

    Ns = tuple(int(v) for v in args.algebra_n.split(",") if v) if args.algebra_n else ()
    dump_dir = Path(args.out) / "evidence" if args.out else None
    ledger = build_ledger(seed=args.seed, algebra_N=Ns, include_algebra=bool(Ns) and not args.no_algebra, dump_dir=dump_dir)
    entries = ledger["entries"] if args.all else errata_only(ledger)
    doc = {
        "run": _run_block(args, ["all", "algebra_n", "no_algebra"]),
        "results": [
            {"id": e["key"], "verdict": "residual" if e["status"] == "erratum" else "pass", "data": {"status": e["status"]}}
            for e in ledger["entries"]
        ],
        "errata": entries,
        "dumps": ledger["dumps"],
    }
    if args.format == "json":
        _emit(args, _json(doc), "errata.json")
    else:
        txt = "".join(f"[{e['status']}] {e['key']}: {e['finding']}\n" for e in entries)
        _emit(args, txt, "errata.txt")
    return EXIT_OK


# --------------------------------------------------------------------------


def _common(sp):
    sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
    sp.add_argument("--out", default=None, help="directory for reports, dumps and evidence")
    sp.add_argument("--seed", type=int, default=42)


def _couplings(sp, numeric):
    d = "1" if numeric else None
    sp.add_argument("--c0", type=_coupling, default=d)
    sp.add_argument("--c1", type=_coupling, default="0" if numeric else None)
    sp.add_argument("--c2", type=_coupling, default="0" if numeric else None)
    sp.add_argument("--hbar", type=_coupling, default=d)


def build_parser():
    p = _Parser(prog="ncoulomb", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", default=None, help="key=value file; command-line flags take precedence")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="exact checks of the integrals of motion and their algebra")
    v.add_argument("--kind", choices=["classical", "quantum"], required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--convention", choices=["paper", "standard"], default="paper")
    v.add_argument("--runge-lenz", choices=["first", "second"], default="first")
    v.add_argument("--casimir", default="printed,derived", help="comma list of printed, derived")
    v.add_argument("--no-fits", action="store_true")
    v.add_argument("--timeout", type=float, default=None, help="seconds before the symbolic work is cancelled")
    _couplings(v, numeric=False)
    _common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="closed-form, parabolic, algebraic and oracle energies side by side")
    s.add_argument("--n", type=int, required=True, help="dimension N")
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--I", type=int, default=0)
    s.add_argument("--convention", choices=["reconciled", "as-printed"], default="reconciled")
    s.add_argument("--angular", choices=["formula", "oracle"], default="formula")
    s.add_argument("--grid", type=int, default=4000)
    _couplings(s, numeric=True)
    _common(s)
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("wavecheck", help="ODE residuals and normalization audit of the eigenfunctions")
    w.add_argument("--which", choices=["angular", "radial", "parabolic"], required=True)
    w.add_argument("--n-dim", type=int, default=3)
    w.add_argument("--n", type=int, default=None, help="principal quantum number")
    w.add_argument("--l", type=int, default=None)
    w.add_argument("--I", type=int, default=0)
    w.add_argument("--n1", type=int, default=0)
    w.add_argument("--n2", type=int, default=0)
    w.add_argument("--form", choices=["printed", "corrected"], default="printed")
    w.add_argument("--samples", type=int, default=9)
    _couplings(w, numeric=True)
    _common(w)
    w.set_defaults(func=cmd_wavecheck)

    e = sub.add_parser("erratum", help="consolidated ledger of displayed formulas that fail verification")
    e.add_argument("--all", action="store_true", help="include comparisons that passed")
    e.add_argument("--algebra-n", default="3,4", help="dimensions for the symbolic entries")
    e.add_argument("--no-algebra", action="store_true")
    _common(e)
    e.set_defaults(func=cmd_erratum)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            cfg = read_config(known.config)
            for sp in parser._subparsers._group_actions[0].choices.values():
                _apply_config(sp, cfg)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FallToCenterError as exc:
        print(f"fall to center: {exc}", file=sys.stderr)
        return EXIT_FALL
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
