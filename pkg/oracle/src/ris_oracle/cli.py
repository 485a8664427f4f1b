"""Validation CLI.

``oracle check-covariance DIR``  re-solves every exported fixed-phase
instance with a convex solver and compares sum rates.

``oracle check-phase DIR``       grid-searches every exported phase probe
and compares against the closed-form update.

Exit status is nonzero if any instance violates its tolerance.
"""

from __future__ import annotations

import argparse
import sys

from .convex import check_covariance_instance
from .gridsearch import check_phase_instance
from .instances import find_instances, load_instance


def _cmd_check_covariance(args) -> int:
    failures = 0
    for path in find_instances(args.directory, "covariance"):
        result = check_covariance_instance(load_instance(path), solver=args.solver)
        ok = abs(result["difference_bits"]) <= args.tol_bits
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {result['file']}  "
              f"primary={result['primary_bits']:.6f}  "
              f"oracle={result['oracle_bits']:.6f}  "
              f"diff={result['difference_bits']:+.2e} bits")
    print(f"{'all instances agree' if not failures else f'{failures} disagreements'}"
          f" (tolerance {args.tol_bits:g} bits)")
    return 1 if failures else 0


def _cmd_check_phase(args) -> int:
    failures = 0
    for path in find_instances(args.directory, "phase"):
        result = check_phase_instance(load_instance(path),
                                      resolution=args.resolution)
        ok = result["shortfall_bits"] <= args.tol_bits
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {result['file']}  element "
              f"{result['element']:>3d}  closed-form="
              f"{result['closed_form_bits']:.6f}  grid best="
              f"{result['grid_best_bits']:.6f}  shortfall="
              f"{result['shortfall_bits']:+.2e} bits")
    print(f"{'closed form dominates the grid' if not failures else f'{failures} shortfalls'}"
          f" (tolerance {args.tol_bits:g} bits)")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oracle",
        description="Independent validation of exported solver instances")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cov = sub.add_parser("check-covariance",
                           help="convex re-solve of fixed-phase instances")
    p_cov.add_argument("directory")
    p_cov.add_argument("--tol-bits", type=float, default=1e-3)
    p_cov.add_argument("--solver", default="CLARABEL")
    p_cov.set_defaults(func=_cmd_check_covariance)

    p_ph = sub.add_parser("check-phase",
                          help="grid search over exported phase probes")
    p_ph.add_argument("directory")
    p_ph.add_argument("--tol-bits", type=float, default=1e-6)
    p_ph.add_argument("--resolution", type=int, default=3600)
    p_ph.set_defaults(func=_cmd_check_phase)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
