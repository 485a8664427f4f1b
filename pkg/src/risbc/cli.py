"""Command-line interface.

Subcommands:

* ``run``               one scenario from a JSON config file (+ overrides)
* ``sweep-nt``          sum-rate vs transmit antennas, per user count and link mode
* ``sweep-k``           sum-rate vs user count at a fixed antenna count
* ``check``             fast property checks on small instances
* ``export-instances``  desk-scale instances for external validation
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .errors import ScenarioRunError
from .export import export_covariance_instances, export_phase_instances
from .harness import MODES, ScenarioConfig, default_out_dir, run_scenario
from .selfcheck import run_checks


def _coerce(field_type, raw: str):
    if field_type is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if field_type is int:
        return int(raw)
    if field_type is float:
        return float(raw)
    if field_type is tuple:
        return tuple(int(x) for x in raw.split(",") if x)
    return raw


def apply_overrides(config_dict: dict, overrides) -> dict:
    types = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
    defaults = ScenarioConfig()
    for item in overrides or []:
        if "=" not in item:
            raise SystemExit(f"--override expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in types:
            raise SystemExit(f"unknown config key {key!r}")
        config_dict[key] = _coerce(type(getattr(defaults, key)), raw.strip())
    return config_dict


def _config_from_args(args) -> ScenarioConfig:
    d = {}
    if getattr(args, "config", None):
        d = json.loads(Path(args.config).read_text())
    apply_overrides(d, getattr(args, "override", None))
    for flag, key in (("seed", "master_seed"), ("realizations", "realizations"),
                      ("workers", "workers"), ("mode", "mode"), ("out", "out_dir")):
        val = getattr(args, flag, None)
        if val is not None:
            d[key] = val
    return ScenarioConfig.from_dict(d)


def _print_summary(summary: dict):
    for row in summary["results"]:
        print(f"  mode={row['mode']:<7s} K={row['K']:<2d} Nt={row['Nt']:<3d} "
              f"mean={row['mean_sum_rate_bits']:.4f} bits/s/Hz "
              f"(+-{row['stderr']:.4f}, n={row['n_ok']}, failed={row['n_failed']})")


def _cmd_run(args) -> int:
    config = _config_from_args(args)
    try:
        summary, _ = run_scenario(config)
    except ScenarioRunError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    _print_summary(summary)
    if "paths" in summary:
        print("records:", summary["paths"]["records"])
        print("summary:", summary["paths"]["summary"])
    return 0


def _sweep(args, k_list, nt_list, modes) -> int:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
    apply_overrides(base, getattr(args, "override", None))
    status = 0
    for mode in modes:
        for k in k_list:
            d = dict(base)
            d.update(mode=mode, k=k, nt_list=tuple(nt_list))
            for flag, key in (("seed", "master_seed"),
                              ("realizations", "realizations"),
                              ("workers", "workers"), ("out", "out_dir")):
                val = getattr(args, flag, None)
                if val is not None:
                    d[key] = val
            config = ScenarioConfig.from_dict(d)
            print(f"scenario: mode={mode} K={k} Nt in {list(nt_list)} "
                  f"realizations={config.realizations}")
            try:
                summary, _ = run_scenario(config)
            except ScenarioRunError as exc:
                print(f"run failed: {exc}", file=sys.stderr)
                status = 1
                continue
            _print_summary(summary)
    return status


def _cmd_sweep_nt(args) -> int:
    return _sweep(args, args.k_list, args.nt_list, args.modes)


def _cmd_sweep_k(args) -> int:
    return _sweep(args, args.k_list, [args.nt], args.modes)


def _cmd_check(args) -> int:
    return 0 if run_checks(seed=args.seed) else 1


def _cmd_export(args) -> int:
    out = Path(args.out) if args.out else default_out_dir() / "instances"
    if args.kind in ("covariance", "all"):
        paths = export_covariance_instances(out, count=args.count, seed=args.seed)
        print(f"wrote {len(paths)} covariance instances to {out}")
    if args.kind in ("phase", "all"):
        paths = export_phase_instances(out, count=args.count, seed=args.seed)
        print(f"wrote {len(paths)} phase instances to {out}")
    return 0


def _int_list(raw: str):
    return [int(x) for x in raw.split(",") if x]


def _mode_list(raw: str):
    modes = [m.strip() for m in raw.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise argparse.ArgumentTypeError(f"unknown mode {m!r}")
    return modes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risbc",
        description="Sum-rate optimizer and Monte Carlo harness for a "
                    "reflecting-surface-aided MIMO broadcast channel")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_mode=False):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--realizations", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out", help="output directory")
        if with_mode:
            p.add_argument("--mode", choices=MODES)

    p_run = sub.add_parser("run", help="run one scenario")
    add_common(p_run, with_mode=True)
    p_run.set_defaults(func=_cmd_run)

    p_nt = sub.add_parser("sweep-nt", help="sweep transmit antenna counts")
    add_common(p_nt)
    p_nt.add_argument("--k-list", type=_int_list, default=[2, 4, 6])
    p_nt.add_argument("--nt-list", type=_int_list, default=[2, 4, 8, 16])
    p_nt.add_argument("--modes", type=_mode_list, default=list(MODES))
    p_nt.set_defaults(func=_cmd_sweep_nt)

    p_k = sub.add_parser("sweep-k", help="sweep user counts at fixed Nt")
    add_common(p_k)
    p_k.add_argument("--k-list", type=_int_list, default=[1, 2, 3, 4, 5, 6])
    p_k.add_argument("--nt", type=int, default=8)
    p_k.add_argument("--modes", type=_mode_list, default=list(MODES))
    p_k.set_defaults(func=_cmd_sweep_k)

    p_check = sub.add_parser("check", help="fast property checks")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=_cmd_check)

    p_exp = sub.add_parser("export-instances",
                           help="write desk-scale validation instances")
    p_exp.add_argument("--out")
    p_exp.add_argument("--kind", choices=("covariance", "phase", "all"),
                       default="all")
    p_exp.add_argument("--count", type=int, default=50)
    p_exp.add_argument("--seed", type=int, default=1234)
    p_exp.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
