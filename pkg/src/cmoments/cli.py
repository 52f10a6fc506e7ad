"""Command-line interface.

    cmoments delta --input A.json --k 2 [--weak]
    cmoments dist --input A.json
    cmoments polynorm --k 3 --kind p
    cmoments verify --suite all
    cmoments plot --what poly --k 3 --kind p --out p3.svg

Every command prints one JSON document ``{command, config, results, version}``.
Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .discrete import strong_moment_discrete, weak_moment_discrete, weak_moment_hermitian
from .distance import min_scalar_distance
from .errors import MomentsError, NoConvergenceError, check_k
from .fileio import dumps, read_matrix, to_csv
from .harness import (DEFAULT_K_LIST, DEFAULT_SEED, DEFAULT_TRIALS, UNTESTABLE, resolve_suites, run_suite,
                      three_atom_observations)
from .linalg import MatrixClass, classify, eig_hermitian, eig_normal
from .matrix_opt import DEFAULT_RESTARTS, moment_matrix
from .polynomials import build, sup_norm
from .states import Mode

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NO_CONVERGENCE = 0, 1, 2, 3
DEFAULT_TOL = 1e-10


def document(command: str, config: dict, results: list, **extra) -> dict:
    doc = {"command": command, "config": config, "results": results, "version": __version__}
    doc.update(extra)
    return doc


def compute_delta(A, k: int, mode: Mode, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
                  budget: int = DEFAULT_RESTARTS) -> dict:
    """Dispatch on the matrix class and return one result entry."""
    k = check_k(k)
    cls = classify(A)
    entry = {"k": k, "mode": mode.value, "matrix_class": cls.value}
    if cls is MatrixClass.GENERAL:
        lower, upper = moment_matrix(A, k, mode, budget=budget, tol=tol, seed=seed)
        res = lower
        entry["value"] = lower.value
        entry["bracket"] = {"lower": lower.value, "upper": upper, "gap": upper - lower.value}
    else:
        if cls is MatrixClass.HERMITIAN:
            spec = eig_hermitian(A)
            res = weak_moment_hermitian(spec, k) if mode is Mode.WEAK else strong_moment_discrete(spec, k, tol=tol)
        else:
            spec = eig_normal(A)
            fn = weak_moment_discrete if mode is Mode.WEAK else strong_moment_discrete
            res = fn(spec, k, tol=tol)
        entry["value"] = res.value
    entry["mean"] = res.mean
    entry["certificate"] = res.certificate.value
    entry["witness"] = res.witness.to_dict()
    entry["info"] = res.info
    return entry


def cmd_delta(args) -> tuple[dict, int]:
    A = read_matrix(args.input)
    mode = Mode.WEAK if args.weak else Mode.STRONG
    config = {"command": "delta", "input": str(args.input), "k": args.k, "mode": mode.value, "tol": args.tol,
              "seed": args.seed, "budget": args.budget, "format": args.format, "out": args.out}
    start = time.perf_counter()
    entry = compute_delta(A, args.k, mode, args.tol, args.seed, args.budget)
    if args.timing:
        entry["wall_time"] = time.perf_counter() - start
    return document("delta", config, [entry]), EXIT_OK


def cmd_dist(args) -> tuple[dict, int]:
    A = read_matrix(args.input)
    config = {"command": "dist", "input": str(args.input), "tol": args.tol, "format": args.format, "out": args.out}
    res = min_scalar_distance(A, tol=args.tol)
    entry = {"lambda0": res.lambda0, "distance": res.distance, "method": res.method.value}
    return document("dist", config, [entry]), EXIT_OK


def cmd_polynorm(args) -> tuple[dict, int]:
    config = {"command": "polynorm", "k": args.k, "kind": args.kind, "format": args.format, "out": args.out}
    poly = build(check_k(args.k), args.kind)
    res = sup_norm(poly)
    entry = {"k": poly.k, "kind": poly.kind.value, "value": res.value, "argmax": res.argmax,
             "coefficients": [int(c) for c in poly.coefficients]}
    return document("polynorm", config, [entry]), EXIT_OK


def _k_list(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad k list {text!r}") from exc
    if not ks:
        raise argparse.ArgumentTypeError("k list must not be empty")
    for k in ks:
        check_k(k)
    return ks


def cmd_verify(args) -> tuple[dict, int]:
    suites = resolve_suites(args.suite)
    config = {"command": "verify", "suite": args.suite, "seed": args.seed, "trials": args.trials,
              "k_list": list(args.k_list), "format": args.format, "out": args.out}
    reports = []
    for name in suites:
        reports += run_suite(name, args.seed, args.trials, args.k_list)
    failed = sum(not r.passed for r in reports)
    summary = {"total": len(reports), "passed": len(reports) - failed, "failed": failed}
    extra = {"summary": summary, "untestable": UNTESTABLE}
    if "normal_strong" in suites:
        extra["three_atom_instances"] = three_atom_observations(args.seed, args.trials, args.k_list)
    doc = document("verify", config, [r.to_dict() for r in reports], **extra)
    return doc, EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_plot(args) -> tuple[dict, int]:
    from .plotting import plot_polynomial, plot_spectrum

    config = {"command": "plot", "what": args.what, "out": args.out}
    if args.out is None:
        raise argparse.ArgumentTypeError("plot needs --out")
    if args.what == "poly":
        if args.k is None:
            raise argparse.ArgumentTypeError("plot --what poly needs --k")
        config.update(k=args.k, kind=args.kind)
        entry = plot_polynomial(check_k(args.k), args.kind, args.out)
    else:
        if args.input is None:
            raise argparse.ArgumentTypeError("plot --what spectrum needs --input")
        config["input"] = str(args.input)
        A = read_matrix(args.input)
        entry = plot_spectrum(np.linalg.eigvals(A), args.out)
    return document("plot", config, [entry]), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmoments", description="Maximal central moments of matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p, default_format="json"):
        p.add_argument("--format", choices=["json", "csv"], default=default_format, help="Output format.")
        p.add_argument("--out", type=Path, default=None, help="Write the report here instead of stdout.")

    p = sub.add_parser("delta", help="Maximal strong (default) or weak k-th central moment.")
    p.add_argument("--input", type=Path, required=True, help="Matrix file (JSON).")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--weak", action="store_true", help="Weak moment |w((a - w(a))^k)| instead of the strong one.")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=DEFAULT_RESTARTS, help="Random restarts for non-normal input.")
    p.add_argument("--timing", action="store_true", help="Include wall time (makes output non-reproducible).")
    output_flags(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("dist", help="min over lambda of ||A - lambda I||.")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    output_flags(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("polynorm", help="Sup norm of p_k or q_k on [0, 1].")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kind", choices=["p", "q"], required=True)
    output_flags(p)
    p.set_defaults(func=cmd_polynorm)

    p = sub.add_parser("verify", help="Run verification suites.")
    p.add_argument("--suite", required=True,
                   help="hermitian_weak, hermitian_strong, normal_strong, direct_sum, nonnormal_weak, examples or all.")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--k-list", type=_k_list, default=DEFAULT_K_LIST, help="Comma-separated, e.g. 2,4,6.")
    output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="Write an SVG figure.")
    p.add_argument("--what", choices=["poly", "spectrum"], required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--kind", choices=["p", "q"], default="p")
    p.add_argument("--input", type=Path)
    output_flags(p)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, code = args.func(args)
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (MomentsError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = to_csv(doc) if args.format == "csv" else dumps(doc)
    if args.out is not None and args.command != "plot":
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
