"""Command-line interface.

One subcommand per scenario plus ``verify``.  A JSON config file supplies
or overrides the preset's parameters; the flags below override file keys.
Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, scenarios, verify as verify_mod
from .errors import ConfigError, IoError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_IO = 3


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file (flags override its keys)")
    sub.add_argument("--out-dir", dest="out_dir", help="output directory (default: out)")
    sub.add_argument("--workers", type=int, help="worker threads for grid sweeps")
    sub.add_argument("--tol", type=float, help="relative tolerance for quadrature")
    sub.add_argument("--preset", help="named parameter preset")
    sub.add_argument("--no-figures", action="store_true",
                     help="skip PNG rendering, emit CSVs only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="t2pair",
        description="two-qubit dephasing spectroscopy simulator",
    )
    parser.add_argument("--version", action="version", version=f"t2pair {__version__}")
    subs = parser.add_subparsers(dest="scenario", required=True)
    for name in scenarios.SCENARIOS:
        if name == "verify":
            continue
        sub = subs.add_parser(name, help=f"run the {name} scenario")
        _add_common(sub)
        if name in scenarios.PRESETS:
            sub.description = f"presets: {', '.join(sorted(scenarios.PRESETS[name]))}"
    ver = subs.add_parser("verify", help="run the verification suite")
    ver.add_argument("--suite", default="all",
                     help="'all', a group (e.g. identity), or a full check name")
    ver.add_argument("--out-dir", dest="out_dir", default="out")
    ver.add_argument("--tol", type=float, default=None,
                     help="override every check tolerance (diagnostic)")
    ver.add_argument("--list", action="store_true", help="list check groups and exit")
    return parser


def _run_verify(args) -> int:
    if args.list:
        for group in verify_mod.available_groups():
            print(group)
        return EXIT_OK
    results = verify_mod.run_suite(args.suite, tolerance_override=args.tol)
    if not results:
        print(f"no checks match suite {args.suite!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = verify_mod.write_report(results, Path(args.out_dir))
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  ({r.seconds:.2f}s)")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed; report: {report}")
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.scenario == "verify":
        return _run_verify(args)
    try:
        overrides = {
            "out_dir": args.out_dir,
            "workers": args.workers,
            "tol": args.tol,
        }
        if args.no_figures:
            overrides["figures"] = False
        file_config = scenarios.load_config_file(args.config) if args.config else {}
        preset = args.preset or file_config.get("preset")
        cli_overrides = {k: v for k, v in overrides.items() if v is not None}
        merged = scenarios.build_config(args.scenario, preset,
                                        {**file_config, **cli_overrides})
        manifest = scenarios.run_scenario(merged)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    outputs = ", ".join(o["path"] for o in manifest["outputs"])
    warn = manifest["convergence_warnings"]
    print(f"wrote {len(manifest['outputs'])} outputs to {merged['out_dir']}: {outputs}")
    if warn:
        print(f"convergence warnings: {warn}", file=sys.stderr)
    print(json.dumps({"manifest": str(Path(merged["out_dir"]) / 'manifest.json'),
                      "wall_time_s": round(manifest["wall_time_s"], 3)}))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
