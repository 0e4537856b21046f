"""``erdos-cover`` command line.

Exit status: 0 on success, 2 on domain errors, 1 on I/O errors.
Reports are ``key: value`` text by default and JSON with ``--json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import certificate as certs
from .analysis import delta_n, extract_separated_subset, fineness, n_delta, selection_table
from .bush import Rect, render_svg, verify_cover
from .construct_det import lemma3_construct, lemma10_stage, theorem4_witness
from .construct_rand import DEFAULT_TRIALS, thm14b_translation_cover, thm15_similarity_cover
from .errors import ErdosCoverError, ParseError, UnknownCommand
from .exactset import IntervalSet, as_rational, fmt_rational
from .mu import geometric_mu_probe, mu_lower, mu_upper, oracle_setcover
from .patterns import FAMILIES, Pattern, generate, parse_pattern_text, save_pattern
from .translation import thm14a_check

COMMANDS = ("pattern", "analyze", "construct", "verify", "translation", "mu", "plot", "stage")
PROG = "erdos-cover"


# ---------------------------------------------------------------------------
# input helpers


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except ErdosCoverError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _read_json_or_text(path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return text


def load_pattern_arg(path) -> Pattern:
    data = _read_json_or_text(path)
    if isinstance(data, str):
        return parse_pattern_text(data)
    if isinstance(data, dict) and "schema_version" in data:
        return Pattern.from_json(data["pattern"])
    return Pattern.from_json(data)


def load_set_arg(path) -> IntervalSet:
    """Interval set from a JSON list of pairs, a certificate, or text with one
    ``lo hi`` pair per line."""
    data = _read_json_or_text(path)
    if isinstance(data, str):
        pairs = []
        for lineno, line in enumerate(data.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.replace(",", " ").split()
            if len(fields) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'lo hi'")
            pairs.append((as_rational(fields[0]), as_rational(fields[1])))
        return IntervalSet(pairs)
    if isinstance(data, dict):
        for key in ("H", "G"):
            if key in data:
                return IntervalSet.from_json(data[key])
        raise ParseError(f"{path}: no 'H' or 'G' entry")
    return IntervalSet.from_json(data)


def _rect_arg(values: Optional[Sequence[Fraction]]) -> Rect:
    return Rect.canonical() if values is None else Rect(*values)


# ---------------------------------------------------------------------------
# output helpers


def _flatten(value: Any, prefix: str, out: List[str]) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(sub, f"{prefix}.{key}" if prefix else str(key), out)
    elif isinstance(value, (list, tuple)) and any(isinstance(v, (dict, list, tuple)) for v in value):
        if not value:
            out.append(f"{prefix}: []")
        for i, sub in enumerate(value):
            _flatten(sub, f"{prefix}[{i}]", out)
    elif isinstance(value, (list, tuple)):
        out.append(f"{prefix}: " + (", ".join(str(v) for v in value) if value else "[]"))
    else:
        out.append(f"{prefix}: {value}")


def emit(args, data: Dict[str, Any]) -> None:
    data = certs.as_plain(data)
    if getattr(args, "json", False):
        print(json.dumps(data, indent=2, sort_keys=True))
        return
    lines: List[str] = []
    _flatten(data, "", lines)
    print("\n".join(lines))


def _write_cert(cert: dict, path: Optional[str]) -> None:
    if path:
        certs.save(cert, path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pattern(args) -> int:
    if args.action == "show":
        P = load_pattern_arg(args.file)
        emit(args, P.to_json())
        return 0
    params: Dict[str, Any] = {}
    for name in ("ratio", "start", "alpha", "anchor_ratio", "base", "lo", "hi"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.n is not None:
        params["n"] = args.n
    if args.denominator_bound is not None:
        params["denominator_bound"] = args.denominator_bound
    if args.direction is not None:
        params["direction"] = args.direction
    for name in ("anchors", "gaps", "points"):
        value = getattr(args, name)
        if value is not None:
            params[name] = [as_rational(v) for v in value.split(",")]
    if args.family == "integers":
        for key in ("lo", "hi"):
            if key in params:
                if params[key].denominator != 1:
                    raise ParseError(f"--{key} must be an integer for the integers family")
                params[key] = int(params[key])
    P = generate(args.family, params, args.stage)
    if args.output:
        save_pattern(P, args.output)
    emit(args, {"k": len(P), "output": args.output or "-", "pattern": P.to_json()})
    return 0


def cmd_analyze(args) -> int:
    P = load_pattern_arg(args.pattern)
    out: Dict[str, Any] = {"fineness": fineness(P).to_json()}
    if args.eps is not None:
        ex = extract_separated_subset(P, args.eps)
        out["extraction"] = {
            "points": [fmt_rational(x) for x in ex.pattern.points],
            "max_gap_ratio": fmt_rational(ex.max_gap_ratio),
            "three_eps_fine": ex.three_eps_fine,
        }
    if args.delta is not None:
        out["n_delta"] = n_delta(P, args.delta)
    if args.n is not None:
        d, witness = delta_n(P, args.n)
        out["delta_n"] = {"n": args.n, "delta": fmt_rational(d), "witness": [fmt_rational(x) for x in witness.points]}
    if args.selection_eps is not None:
        rows = selection_table(P, args.selection_eps, stop_at_first=False)
        out["selection"] = [
            {"n": r.n, "delta": fmt_rational(r.delta), "lhs_approx": r.lhs, "satisfied": r.ok} for r in rows
        ]
    emit(args, out)
    return 0


def _det_certificate(args) -> dict:
    X = load_pattern_arg(args.pattern)
    if args.stages is None:
        R = _rect_arg(args.rect)
        plan = lemma3_construct(X, R)
        return certs.build(
            "lemma3", X, R, plan.G, plan.report,
            params={"rect": R.to_json()},
            extra=plan.to_json(),
        )
    if args.eps is None:
        raise ParseError("--stages needs --eps")
    G, stages = theorem4_witness(X, args.eps, args.stages)
    R = Rect.canonical()
    # each stage pattern is a subset of X, so G covers R for X as well
    report = verify_cover(X, G, R)
    return certs.build(
        "theorem4", X, R, G, report,
        params={"eps": fmt_rational(args.eps), "stages": args.stages},
        extra={"stages": [s.to_json() for s in stages]},
    )


def _rand_certificate(args) -> dict:
    X = load_pattern_arg(args.pattern)
    eps = args.eps if args.eps is not None else Fraction(1, 2)
    common = {"eps": fmt_rational(eps), "seed": args.seed, "max_trials": args.max_trials}
    if args.method == "thm15":
        P, plan, report = thm15_similarity_cover(
            X, eps, seed=args.seed, max_trials=args.max_trials, relaxed=args.relaxed_selection
        )
        params = dict(common, relaxed_selection=args.relaxed_selection, trial_index=plan.trial_index)
        params.update(P.to_json())
        return certs.build(
            "thm15", P.X_star, Rect.canonical(), plan.H, report,
            params=params, G=plan.G, S=plan.S, extra=plan.to_json(),
        )
    P, plan = thm14b_translation_cover(X, eps, seed=args.seed, max_trials=args.max_trials)
    # translations only: the target is the segment [0, 1] at scale 1
    target = Rect(0, 1, 1, 1)
    report = verify_cover(P.Y, plan.H, target)
    params = dict(common, trial_index=plan.trial_index)
    params.update(P.to_json())
    return certs.build(
        "thm14b", P.Y, target, plan.H, report,
        params=params, G=plan.G, S=plan.S, extra=plan.to_json(),
    )


def cmd_construct(args) -> int:
    cert = _det_certificate(args) if args.kind == "det" else _rand_certificate(args)
    _write_cert(cert, args.output)
    emit(args, {
        "method": cert["method"],
        "measures": cert["measures"],
        "verification": cert["verification"],
        "output": args.output or "-",
    })
    return 0


def cmd_verify(args) -> int:
    stored = None
    if args.cert:
        cert = certs.load(args.cert)
        Y, H, R = certs.parts(cert)
        stored = cert.get("verification")
    else:
        if not (args.pattern and args.g):
            raise ParseError("verify needs a certificate or both --pattern and --g")
        Y, H, R = load_pattern_arg(args.pattern), load_set_arg(args.g), _rect_arg(args.rect)
    if args.rect is not None:
        R = _rect_arg(args.rect)
    report = verify_cover(Y, H, R, method=args.method)
    out = report.to_json() if args.full else report.digest()
    out["measure"] = fmt_rational(H.measure())
    if stored is not None:
        out["digest_matches"] = stored == report.digest()
    if args.svg:
        render_svg(Y, H, R, args.svg, report=report)
        out["svg"] = args.svg
    emit(args, out)
    return 0


def cmd_translation(args) -> int:
    X = load_pattern_arg(args.pattern)
    G = load_set_arg(args.g)
    u, v = args.window
    emit(args, thm14a_check(X, G, u, v).to_json())
    return 0


def cmd_mu(args) -> int:
    out: Dict[str, Any] = {}
    if args.probe_ratio is not None:
        pairs = geometric_mu_probe(args.probe_ratio, args.stage, _rect_arg(args.rect), args.h, solver=args.oracle or "greedy")
        emit(args, {"probe": [p.to_json() for p in pairs]})
        return 0
    if not args.pattern:
        raise ParseError("mu needs --pattern (or --probe-ratio)")
    Y = load_pattern_arg(args.pattern)
    R = _rect_arg(args.rect)
    out["lower"] = fmt_rational(mu_lower(Y, R))
    if args.methods:
        methods = [m for m in args.methods.split(",") if m]
        out["upper"] = mu_upper(Y, R, methods, eps=args.eps, seed=args.seed).to_json()
    if args.oracle:
        res = oracle_setcover(Y, R, args.window, args.h, args.oracle)
        out["oracle"] = res.to_json()
    emit(args, out)
    return 0


def cmd_plot(args) -> int:
    from . import plotting

    cert = certs.load(args.cert)
    Y, H, R = certs.parts(cert)
    report = verify_cover(Y, H, R)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.stem or Path(args.cert).stem
    written = {}
    if R.height > 0:
        path = out_dir / f"{stem}-bush.{args.format}"
        plotting.figure_bush(Y.points, H, R, report.uncovered_cells, path)
        written["bush"] = str(path)
    profile = plotting.slice_profile(Y.points, H, R, args.samples)
    tsv = out_dir / f"{stem}-profile.tsv"
    plotting.write_profile_tsv(profile, tsv)
    written["profile_tsv"] = str(tsv)
    path = out_dir / f"{stem}-profile.{args.format}"
    plotting.figure_profile(profile, R, len(Y), H, path)
    written["profile"] = str(path)
    if args.svg:
        path = out_dir / f"{stem}-bush.svg"
        render_svg(Y, H, R, path, report=report)
        written["svg"] = str(path)
    emit(args, {"covered": report.covered, "files": written})
    return 0


def cmd_stage(args) -> int:
    X = load_pattern_arg(args.pattern)
    st = lemma10_stage(X, args.m, args.delta)
    out = st.to_json()
    out["ok"] = st.ok
    emit(args, out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog=PROG, description="Exact covering sets for bushes of finite patterns.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("pattern", help="generate or inspect patterns")
    pa = p.add_subparsers(dest="action", required=True)
    gen = pa.add_parser("gen", parents=[common], help="truncate a named family")
    gen.add_argument("--family", required=True, choices=FAMILIES)
    gen.add_argument("--stage", type=int, default=1)
    for name in ("ratio", "start", "alpha", "anchor-ratio", "base", "lo", "hi"):
        gen.add_argument(f"--{name}", type=_rational)
    gen.add_argument("--n", type=int, help="cluster size")
    gen.add_argument("--denominator-bound", type=int)
    gen.add_argument("--direction", choices=("up", "down"))
    gen.add_argument("--anchors", help="comma separated, decreasing")
    gen.add_argument("--gaps", help="comma separated, one per block")
    gen.add_argument("--points", help="comma separated (custom family)")
    gen.add_argument("-o", "--output")
    show = pa.add_parser("show", parents=[common], help="print a pattern file")
    show.add_argument("file")
    p.set_defaults(func=cmd_pattern)

    a = sub.add_parser("analyze", parents=[common], help="fineness and separation statistics")
    a.add_argument("pattern")
    a.add_argument("--eps", type=_rational, help="extract a separated subset at this threshold")
    a.add_argument("--delta", type=_rational, help="largest relatively delta-separated subset")
    a.add_argument("--n", type=int, help="best separation at size n")
    a.add_argument("--selection-eps", type=_rational, help="tabulate the subset selection inequality")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("construct", help="build a covering set and write a certificate")
    ck = c.add_subparsers(dest="kind", required=True)
    det = ck.add_parser("det", parents=[common], help="periodic layering, optionally staged")
    det.add_argument("--pattern", required=True)
    det.add_argument("--eps", type=_rational)
    det.add_argument("--stages", type=int)
    det.add_argument("--rect", nargs=4, type=_rational, metavar=("A_LO", "A_HI", "B_LO", "B_HI"))
    det.add_argument("-o", "--output")
    rnd = ck.add_parser("rand", parents=[common], help="randomized constructions")
    rnd.add_argument("--method", choices=("thm15", "thm14b"), default="thm15")
    rnd.add_argument("--pattern", required=True)
    rnd.add_argument("--eps", type=_rational)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--max-trials", type=int, default=DEFAULT_TRIALS)
    rnd.add_argument(
        "--relaxed-selection", action="store_true",
        help="use the whole truncation when no subset meets the selection inequality",
    )
    rnd.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="exact coverage check")
    v.add_argument("cert", nargs="?", help="certificate to re-verify")
    v.add_argument("--pattern")
    v.add_argument("--g")
    v.add_argument(
        "--rect", nargs=4, type=_rational, metavar=("A_LO", "A_HI", "B_LO", "B_HI"),
        help="target rectangle; b must be positive (for b < 0 verify -Y at |b|)",
    )
    v.add_argument("--method", choices=("slab", "sweep"), default="slab")
    v.add_argument("--full", action="store_true", help="include cells and critical heights")
    v.add_argument("--svg")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("translation", help="translation-only bounds")
    ta = t.add_subparsers(dest="action", required=True)
    chk = ta.add_parser("check", parents=[common])
    chk.add_argument("--pattern", required=True)
    chk.add_argument("--g", required=True)
    chk.add_argument("--window", nargs=2, type=_rational, required=True, metavar=("U", "V"))
    t.set_defaults(func=cmd_translation)

    m = sub.add_parser("mu", parents=[common], help="bounds on the least covering measure")
    m.add_argument("--pattern")
    m.add_argument("--rect", nargs=4, type=_rational, metavar=("A_LO", "A_HI", "B_LO", "B_HI"))
    m.add_argument("--methods", default="lemma3", help="comma separated: lemma3, thm15 (empty to skip)")
    m.add_argument("--eps", type=_rational)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--oracle", choices=("greedy", "exact"))
    m.add_argument("--h", type=_rational, default=Fraction(1, 8))
    m.add_argument("--window", nargs=2, type=_rational, metavar=("LO", "HI"))
    m.add_argument("--probe-ratio", type=_rational, help="run the geometric consistency probe")
    m.add_argument("--stage", type=int, default=3)
    m.set_defaults(func=cmd_mu)

    pl = sub.add_parser("plot", parents=[common], help="figures and slice profile for a certificate")
    pl.add_argument("cert")
    pl.add_argument("--out-dir", default=".")
    pl.add_argument("--stem")
    pl.add_argument("--format", choices=("png", "pdf", "svg"), default="png")
    pl.add_argument("--samples", type=int, default=200)
    pl.add_argument("--svg", action="store_true", help="also write the exact hand-drawn SVG")
    pl.set_defaults(func=cmd_plot)

    s = sub.add_parser("stage", parents=[common], help="dense separated stage")
    s.add_argument("--pattern", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--delta", type=_rational)
    s.set_defaults(func=cmd_stage)
    return parser


def _check_command(argv: Sequence[str]) -> None:
    for token in argv:
        if token in ("-h", "--help"):
            return
        if not token.startswith("-"):
            if token not in COMMANDS:
                raise UnknownCommand(f"unknown command {token!r}; expected one of {', '.join(COMMANDS)}")
            return


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        _check_command(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ErdosCoverError as exc:
        print(f"{PROG}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{PROG}: error: I/O: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
