"""Command-line entry point: ``handling-mpc run|compare|sweep``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, apply_overrides, builtin_scenario, load_config
from .io import write_run
from .runner import RunSummary, compare_controllers, run_scenario
from .scenario import CONTROLLERS, RunConfig


def _load(target: str | None) -> RunConfig:
    if target is None:
        return RunConfig()
    path = Path(target)
    if not path.exists():
        try:
            path = builtin_scenario(target)
        except FileNotFoundError:
            raise ConfigError(f"no scenario file or built-in scenario named {target!r}") from None
    return load_config(path)


def _row(label: str, s: RunSummary) -> str:
    imp = "-" if s.improvement_pct is None else f"{s.improvement_pct:+.2f}%"
    return (f"{label:<14} ay={s.max_abs_ay:.4f}g improvement={imp:>8} "
            f"violations={s.constraint_violations:<4d} oscillations={s.saturation_oscillations:<2d} "
            f"slack={s.peak_slack:.2e} unstable={s.unstable}")


def _cmd_run(args) -> int:
    cfg = _load(args.scenario)
    overrides = {}
    if args.controller:
        overrides["scenario.controller"] = args.controller
    if args.mu is not None:
        overrides["scenario.mu"] = repr(args.mu)
    if args.seed is not None:
        overrides["scenario.seed"] = str(args.seed)
    cfg = apply_overrides(cfg, overrides)
    result = run_scenario(cfg)
    stem = f"{cfg.scenario.name}_{cfg.scenario.controller}"
    csv_path, txt_path = write_run(args.out, stem, result.records, result.summary)
    print(_row(cfg.scenario.controller, result.summary))
    print(f"wrote {csv_path} and {txt_path}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _load(args.scenario)
    comp = compare_controllers(cfg)
    for name, run in comp.runs.items():
        if args.out:
            write_run(args.out, f"{cfg.scenario.name}_{name}", run.records, run.summary)
        print(_row(name, run.summary))
    return 0


def _cmd_sweep(args) -> int:
    base = _load(args.scenario)
    for value in args.values:
        cfg = apply_overrides(base, {args.param: value})
        result = run_scenario(cfg)
        if args.out:
            tag = value.replace("/", "_")
            write_run(args.out, f"{cfg.scenario.name}_{args.param}={tag}",
                      result.records, result.summary)
        print(_row(f"{args.param}={value}", result.summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="handling-mpc",
                                 description="Closed-loop yaw-moment control experiments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one scenario and write CSV + summary")
    run.add_argument("scenario", help="scenario file or built-in scenario name")
    run.add_argument("--out", default="runs")
    run.add_argument("--controller", choices=CONTROLLERS)
    run.add_argument("--mu", type=float)
    run.add_argument("--seed", type=int)
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="run none, mpc and conventional on one scenario")
    cmp_.add_argument("scenario")
    cmp_.add_argument("--out")
    cmp_.set_defaults(func=_cmd_compare)

    sw = sub.add_parser("sweep", help="vary one config key over several values")
    sw.add_argument("scenario", nargs="?")
    sw.add_argument("--param", required=True, help="namespaced key, e.g. sliding.lam")
    sw.add_argument("--values", nargs="+", required=True)
    sw.add_argument("--out")
    sw.set_defaults(func=_cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
