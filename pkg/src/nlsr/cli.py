"""Command-line front end: ``nlsr run|list-methods|verify|cache``.

The CLI is a thin shell over the experiments module: it parses a YAML
config (flags override config keys), dispatches the study, and prints a
summary.  Exit codes: 0 success, 2 config error, 3 numerical failure,
4 cache error.
"""

import argparse
import os
import sys
from pathlib import Path

import yaml

from .errors import CacheError, ConfigurationError, NlsrError
from .experiments import (
    ExperimentConfig,
    InitialDataSpec,
    ReferenceSettings,
    run_study,
)
from .integrators import SolverOptions
from .methods import method_table
from .spectral import NonlinearityParams
from .verify import format_results, run_verification

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CACHE = 4

_TOP_KEYS = {"study", "methods", "K", "T", "tau_list", "error_norm_s", "data",
             "nonlinearity", "solver", "reference", "gamma_series_tau",
             "output_dir", "cache_dir", "threads"}


def _reject_unknown(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigurationError(
            f"unknown config key(s) {sorted(unknown)} in {where}")


def load_config(path, overrides=None) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path} must contain a mapping at top level")
    _reject_unknown(doc, _TOP_KEYS, str(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value

    data_doc = dict(doc.get("data", {"kind": "smooth"}))
    _reject_unknown(data_doc, {"kind", "theta", "seed"}, "data")
    nl_doc = dict(doc.get("nonlinearity", {}))
    _reject_unknown(nl_doc, {"lambda", "p"}, "nonlinearity")
    solver_doc = dict(doc.get("solver", {}))
    _reject_unknown(solver_doc, {"tolerance", "max_iterations"}, "solver")
    ref_doc = dict(doc.get("reference", {}))
    _reject_unknown(ref_doc, {"method", "tau_ref", "K_ref"}, "reference")

    cache_dir = os.environ.get("NLSR_CACHE_DIR") or doc.get("cache_dir", ".nlsr-cache")
    try:
        config = ExperimentConfig(
            study=doc.get("study", "convergence"),
            methods=tuple(doc.get("methods", ())),
            K=int(doc.get("K", 1024)),
            data=InitialDataSpec(
                kind=data_doc.get("kind", "smooth"),
                theta=float(data_doc.get("theta", 2.0)),
                seed=int(data_doc.get("seed", 12345))),
            T=float(doc.get("T", 1.0)),
            tau_list=tuple(float(t) for t in doc.get("tau_list", ())),
            error_norm_s=float(doc.get("error_norm_s", 1.0)),
            reference=ReferenceSettings(
                method=ref_doc.get("method", "LRI1"),
                tau_ref=float(ref_doc.get("tau_ref", 5e-5)),
                K_ref=int(ref_doc.get("K_ref", doc.get("K", 1024)))),
            params=NonlinearityParams(
                lam=float(nl_doc.get("lambda", 1.0)),
                p=int(nl_doc.get("p", 1))),
            solver=SolverOptions(
                tolerance=float(solver_doc.get("tolerance", 1e-14)),
                max_iterations=int(solver_doc.get("max_iterations", 100))),
            gamma_series_tau=float(doc.get("gamma_series_tau", 0.01)),
            output_dir=str(doc.get("output_dir", "out")),
            cache_dir=str(cache_dir),
            threads=int(doc.get("threads", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad value in {path}: {exc}") from exc
    return config


def _print_summary(result):
    print(f"study: {result.study}")
    print(f"rows: {len(result.rows)} -> {result.csv_path}")
    if result.summary_path:
        print(f"summary -> {result.summary_path}")
    if result.summary:
        cols = list(result.summary[0].keys())
        widths = {c: max(len(c), max(len(_cell(r.get(c))) for r in result.summary))
                  for c in cols}
        print("  ".join(c.ljust(widths[c]) for c in cols))
        for row in result.summary:
            print("  ".join(_cell(row.get(c)).ljust(widths[c]) for c in cols))
    if result.failures:
        print(f"{result.failures} cell(s) failed")


def _cell(x):
    if isinstance(x, float):
        return f"{x:.4g}"
    return str(x)


def cmd_run(args) -> int:
    overrides = {
        "output_dir": args.output_dir,
        "threads": args.threads,
        "K": args.K,
    }
    if args.tau:
        overrides["tau_list"] = [float(t) for t in args.tau.split(",")]
    if args.methods:
        overrides["methods"] = [m.strip() for m in args.methods.split(",")]
    config = load_config(args.config, overrides)
    if args.seed is not None:
        config = ExperimentConfig(**{**config.__dict__,
                                     "data": InitialDataSpec(config.data.kind,
                                                             config.data.theta,
                                                             args.seed)})
    result = run_study(config)
    _print_summary(result)
    return EXIT_NUMERICAL if result.failures else EXIT_OK


def cmd_list_methods(_args) -> int:
    print(f"{'method':10s} {'kernel':7s} {'relaxation':8s} {'solve':9s} note")
    for name, kid, relax, implicit, note in method_table():
        solve = "implicit" if implicit else "explicit"
        print(f"{name:10s} {kid:7s} {relax:8s} {solve:9s} {note}")
    return EXIT_OK


def cmd_verify(_args) -> int:
    results = run_verification()
    print(format_results(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def _cache_dir(args):
    return Path(os.environ.get("NLSR_CACHE_DIR") or args.dir)


def cmd_cache(args) -> int:
    cache = _cache_dir(args)
    if args.action == "info":
        files = sorted(cache.glob("*.nlsr")) if cache.exists() else []
        total = sum(f.stat().st_size for f in files)
        print(f"cache dir: {cache}")
        print(f"snapshots: {len(files)} ({total} bytes)")
        return EXIT_OK
    if args.action == "clear":
        if not cache.exists():
            print(f"cache dir {cache} does not exist; nothing to clear")
            return EXIT_OK
        try:
            n = 0
            for f in cache.glob("*.nlsr"):
                f.unlink()
                n += 1
        except OSError as exc:
            print(f"cache error: {exc}", file=sys.stderr)
            return EXIT_CACHE
        print(f"removed {n} snapshot(s) from {cache}")
        return EXIT_OK
    raise ConfigurationError(f"unknown cache action {args.action!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nlsr",
        description="Relaxation low-regularity NLS benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a study from a YAML config")
    p_run.add_argument("config", help="path to the YAML config")
    p_run.add_argument("--tau", help="comma list overriding tau_list")
    p_run.add_argument("--methods", help="comma list overriding methods")
    p_run.add_argument("--seed", type=int, help="override the data seed")
    p_run.add_argument("--output-dir", dest="output_dir")
    p_run.add_argument("--threads", type=int)
    p_run.add_argument("-K", type=int, dest="K", help="override grid size")
    p_run.set_defaults(fn=cmd_run)

    p_list = sub.add_parser("list-methods", help="print the method roster")
    p_list.set_defaults(fn=cmd_list_methods)

    p_verify = sub.add_parser("verify", help="run the fast property suite")
    p_verify.set_defaults(fn=cmd_verify)

    p_cache = sub.add_parser("cache", help="inspect or clear the snapshot cache")
    p_cache.add_argument("action", choices=("info", "clear"))
    p_cache.add_argument("--dir", default=".nlsr-cache")
    p_cache.set_defaults(fn=cmd_cache)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.fn(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        code = EXIT_CONFIG
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        code = EXIT_CACHE
    except NlsrError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        code = EXIT_NUMERICAL
    if argv is None:
        sys.exit(code)
    return code
