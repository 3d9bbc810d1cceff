"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 unstable input,
3 verification failure (``verify`` only).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .decompose import decompose
from .duality import dual_chow_form, dual_constant, dual_constant_closed_form, hyperplane_height
from .chow import chow_form_of_points
from .heights import HeightOptions, global_height
from .serialize import (
    ConfigError,
    ConfigFile,
    decomposition_to_dict,
    dumps,
    estimate_to_dict,
    options_from_dict,
    rational_str,
    verdict_to_dict,
    witness_to_dict,
)
from .stability import Status, UnstableError, check_stability
from .suite import run_verify, summary_lines

EXIT_OK, EXIT_IO, EXIT_UNSTABLE, EXIT_FAIL = 0, 1, 2, 3
CLI_TOL = 1e-8


def _options(args, file_options: dict | None = None) -> HeightOptions:
    base = options_from_dict(file_options or None)
    if not file_options or "tol" not in file_options:
        base = replace(base, tol=CLI_TOL)
    overrides = {
        "mc_samples": getattr(args, "mc_samples", None),
        "seed": getattr(args, "seed", None),
        "tol": getattr(args, "tol", None),
        "search_depth": getattr(args, "depth", None),
    }
    return replace(base, **{k: v for k, v in overrides.items() if v is not None})


def _witness_line(w) -> str:
    basis = ", ".join("(" + ", ".join(rational_str(x) for x in v) + ")" for v in w.basis)
    return f"witness: dim {w.dim} subspace spanned by {basis} carries mass {rational_str(w.mass)}"


def _emit(out: list[str], args, payload: dict, text: list[str]) -> None:
    if args.json:
        out.append(dumps(payload))
    else:
        out.extend(text)


def _unstable(out, args, witness, seed) -> int:
    _emit(out, args, {"status": Status.UNSTABLE.value, "witness": witness_to_dict(witness), "seed": seed}, ["Unstable", _witness_line(witness)])
    return EXIT_UNSTABLE


def cmd_stability(args, out: list[str]) -> int:
    cf = ConfigFile.load(args.path)
    verdict = check_stability(cf.config)
    text = [verdict.status.value]
    if verdict.witness is not None:
        text.append(_witness_line(verdict.witness))
    _emit(out, args, verdict_to_dict(verdict) | {"seed": _options(args, cf.options).seed}, text)
    return EXIT_OK if verdict.semistable else EXIT_UNSTABLE


def _height_table(est) -> list[str]:
    rows = [f"{'place':>6}  {'lower':>14}  {'upper':>14}  certificate"]
    for p in est.per_place:
        cert = p.certificate.value + (f"({p.depth})" if p.depth is not None else "")
        rows.append(f"{str(p.place):>6}  {p.lower:>14.9f}  {p.upper:>14.9f}  {cert}")
    rows.append(f"{'total':>6}  {est.lower:>14.9f}  {est.upper:>14.9f}")
    rows.append("all other primes contribute 0 (Trivial)")
    return rows


def cmd_height(args, out: list[str]) -> int:
    cf = ConfigFile.load(args.path)
    options = _options(args, cf.options)
    try:
        est = global_height(cf.config, options)
    except UnstableError as exc:
        return _unstable(out, args, exc.witness, options.seed)
    text = [f"status: {est.status}", *_height_table(est)]
    if est.margin is not None:
        text.append(f"stable margin (witness split): {est.margin:.9g}")
    text.append(f"seed: {options.seed}")
    _emit(out, args, estimate_to_dict(est) | {"seed": options.seed}, text)
    return EXIT_OK


def cmd_decompose(args, out: list[str]) -> int:
    cf = ConfigFile.load(args.path)
    seed = _options(args, cf.options).seed
    try:
        dec = decompose(cf.config)
    except UnstableError as exc:
        return _unstable(out, args, exc.witness, seed)
    text = [f"{len(dec.terms)} basis term(s)"]
    for c, b in dec.terms:
        text.append(f"  {rational_str(c)} * {list(b)}")
    text.append(f"seed: {seed}")
    _emit(out, args, decomposition_to_dict(dec) | {"seed": seed}, text)
    return EXIT_OK


def cmd_dual(args, out: list[str]) -> int:
    cf = ConfigFile.load(args.path)
    options = _options(args, cf.options)
    config = cf.config
    try:
        est = hyperplane_height(config, options)
    except UnstableError as exc:
        return _unstable(out, args, exc.witness, options.seed)
    shift = dual_constant_closed_form(config.ambient)
    n_terms = None
    if all(m.denominator == 1 for m in config.multiplicities) and config.degree <= 6:
        n_terms = len(dual_chow_form(chow_form_of_points(config)).coefficients)
    text = [f"duality shift C'({config.ambient}) = {rational_str(shift)} ~ {float(shift):.9f}", *_height_table(est)]
    if n_terms is not None:
        text.append(f"dual Chow form: {n_terms} monomials")
    text.append(f"seed: {options.seed}")
    payload = estimate_to_dict(est) | {"shift": rational_str(shift), "dual_form_terms": n_terms, "seed": options.seed}
    _emit(out, args, payload, text)
    return EXIT_OK


def cmd_dual_constant(args, out: list[str]) -> int:
    options = _options(args)
    dc = dual_constant(args.n, options.mc_samples, options.seed)
    mc = dc.mc_check
    text = [
        f"C'({dc.n}) = {rational_str(dc.closed_form)} ~ {float(dc.closed_form):.9f}",
        f"Monte Carlo: {mc.mean:.6f} +/- {mc.stderr:.6f} ({mc.samples} samples, seed {mc.seed})",
        f"agreement within 3 stderr: {'yes' if dc.agrees else 'no'}",
    ]
    payload = {
        "N": dc.n,
        "closed_form": rational_str(dc.closed_form),
        "mc": {"mean": mc.mean, "stderr": mc.stderr, "samples": mc.samples, "seed": mc.seed, "resampled": mc.resampled},
        "agrees": dc.agrees,
        "seed": options.seed,
    }
    _emit(out, args, payload, text)
    return EXIT_OK if dc.agrees else EXIT_FAIL


def cmd_verify(args, out: list[str]) -> int:
    options = _options(args)
    report = run_verify(args.suite, options)
    text = summary_lines(report) + [f"seed: {options.seed}", f"seconds: {report['seconds']}"]
    _emit(out, args, report | {"seed": options.seed}, text)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="githeight", description="GIT heights of zero-cycles and hyperplane arrangements over Q.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo samples (default 1000000)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help=f"minimizer tolerance (default {CLI_TOL:g})")
    common.add_argument("--depth", type=int, default=None, help="p-adic search depth (default 3)")
    sub = parser.add_subparsers(dest="verb", required=True)
    for name, fn, helptext in (
        ("stability", cmd_stability, "semistability verdict with witness"),
        ("height", cmd_height, "global height interval with per-place table"),
        ("decompose", cmd_decompose, "rational basis decomposition"),
        ("dual", cmd_dual, "height of the dual hyperplane arrangement"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("path", help="configuration JSON file")
        p.set_defaults(func=fn)
    p = sub.add_parser("dual-constant", parents=[common], help="closed form and Monte Carlo check of C'(N)")
    p.add_argument("n", type=int, metavar="N")
    p.set_defaults(func=cmd_dual_constant)
    p = sub.add_parser("verify", parents=[common], help="run the theorem suite")
    p.add_argument("--suite", choices=("default", "extended"), default="default")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out: list[str] = []
    try:
        code = args.func(args, out)
    except ConfigError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    # buffered so a failure midway never leaves partial JSON on stdout
    sys.stdout.write("\n".join(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
