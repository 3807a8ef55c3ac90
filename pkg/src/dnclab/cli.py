"""Command-line surface: run verification suites, list them, and emit
deterministic JSON reports.

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.
Flags can also be set through environment variables with the DNCLAB_ prefix
(DNCLAB_SEED, DNCLAB_TRUNCATION, DNCLAB_DEPTH, DNCLAB_TOL, DNCLAB_SAMPLES,
DNCLAB_REPORT).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .errors import ConfigError, LabError, UnknownSuite
from .report import SuiteConfig, canonical_json
from .suites import list_suites, run_all, run_suite

ENV_PREFIX = "DNCLAB_"


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad {ENV_PREFIX}{name.upper()}={raw!r}") from exc


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=_env_default("seed", int, 42))
    p.add_argument("--truncation", type=int, default=_env_default("truncation", int, 24))
    p.add_argument("--depth", type=int, default=_env_default("depth", int, 4))
    p.add_argument("--tol", type=float, default=_env_default("tol", float, 1e-7))
    p.add_argument("--samples", type=int, default=_env_default("samples", int, 64))
    p.add_argument("--report", default=_env_default("report", str, None), help="write the JSON report here")


def _config_from(args, suite: str = "") -> SuiteConfig:
    return SuiteConfig(
        suite=suite,
        seed=args.seed,
        truncation=args.truncation,
        depth=args.depth,
        tol=args.tol,
        samples=args.samples,
        report_path=args.report,
    )


def _print_report(rep) -> None:
    for c in rep.checks:
        print(f"  [{c.status.upper():4s}] {c.name}  ({c.runtime_ms:.0f} ms)")
    print(f"{rep.suite}: {rep.overall} ({rep.runtime_ms:.0f} ms)")


def _write(path: str | None, payload) -> None:
    text = canonical_json(payload)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnclab",
        description="desk-scale verification laboratory for deformation spaces, "
        "tangent groupoids, flags and filtrations",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_verify = subs.add_parser("verify", help="run one named suite")
    p_verify.add_argument("--suite", required=True)
    _add_config_flags(p_verify)

    p_all = subs.add_parser("verify-all", help="run every suite and aggregate")
    _add_config_flags(p_all)

    subs.add_parser("list-suites", help="print the suite registry")

    p_demo = subs.add_parser("demo", help="build and verify a demonstration filtration")
    p_demo.add_argument("kind", choices=["sphere-filtration"])
    p_demo.add_argument("--delta", default="2,4,8", help="comma-separated dimension sequence")
    p_demo.add_argument("--depth", type=int, default=None)
    p_demo.add_argument("--report", default=None)
    p_demo.add_argument("--seed", type=int, default=42)
    p_demo.add_argument("--samples", type=int, default=32)

    try:
        args = parser.parse_args(argv)
        if args.command == "list-suites":
            for entry in list_suites():
                print(f"{entry['suite']}: {entry['claim']}")
            return 0

        if args.command == "verify":
            config = _config_from(args, args.suite)
            rep = run_suite(config)
            _print_report(rep)
            if config.report_path:
                _write(config.report_path, rep.to_json())
            return 0 if rep.passed else 1

        if args.command == "verify-all":
            config = _config_from(args)
            t0 = time.perf_counter()
            reports = run_all(config)
            total_ms = (time.perf_counter() - t0) * 1000
            for rep in reports:
                _print_report(rep)
            overall = all(r.passed for r in reports)
            print(f"overall: {'pass' if overall else 'fail'} ({len(reports)} suites, {total_ms:.0f} ms)")
            payload = {
                "config": config.to_json(),
                "suites": [r.to_json() for r in reports],
                "overall": "pass" if overall else "fail",
            }
            _write(config.report_path, payload)
            return 0 if overall else 1

        if args.command == "demo":
            from .filtration import filtration_from_spec, verify_filtration

            delta = [int(x) for x in args.delta.split(",") if x.strip()]
            depth = args.depth or len(delta)
            spec = {"kind": "sphere", "delta": delta, "depth": depth}
            filtr = filtration_from_spec(spec)
            report = verify_filtration(filtr, n_samples=args.samples, seed=args.seed)
            payload = {
                "demo": spec,
                "level_dimensions": list(filtr.delta),
                "report": report.to_json(),
            }
            _write(args.report, payload)
            for name, cond in report.conditions.items():
                print(f"  [{cond['status'].upper():12s}] {name}", file=sys.stderr)
            return 0 if report.passed else 1

        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, UnknownSuite) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
