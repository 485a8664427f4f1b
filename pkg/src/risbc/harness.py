"""Monte Carlo orchestration: scenario configuration, random user
placement, per-realization solves, persistence, and aggregation.

Every realization is fully determined by ``(master_seed, realization
index)`` through named substreams, so results are identical no matter how
many workers execute them or in which order.  Per-realization records go
to CSV; aggregates (mean sum rate with standard error per sweep point) go
to a JSON summary.  Numerical failures are recorded and excluded from the
aggregates; a failure fraction above 1% fails the whole run.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ao import AoOptions, alternating_optimize
from .channel import ROLE_PLACEMENT, sample_channels, substream
from .errors import ScenarioRunError
from .geometry import SystemGeometry, UserPlacement

MODES = ("direct", "ris", "both")
_MODE_IDS = {m: i for i, m in enumerate(MODES)}

# User-coordinate grids: uniform draws on quantized ranges (meters).
D_GRID = (200.0, 2.0, 151)    # start, step, count  -> 200..500
L_GRID = (0.0, 1.0, 71)       # 0..70
H_GRID = (1.5, 0.01, 51)      # 1.5..2.0

CSV_HEADER = ["realization", "seed", "K", "Nt", "mode", "sum_rate_bits",
              "outer_iters", "L", "I", "wall_ms"]

MAX_FAILURE_FRACTION = 0.01


@dataclass
class ScenarioConfig:
    """One Monte Carlo scenario: fixed user count and link mode, swept
    over transmit-antenna counts."""

    # deployment (defaults match the reference simulation setup)
    wavelength: float = 0.15
    spacing_t: float = 0.075
    spacing_r: float = 0.075
    spacing_ris: float = 0.075
    l_t: float = 20.0
    h_t: float = 10.0
    d_ris: float = 30.0
    h_ris: float = 5.0
    ris_rows: int = 15
    ris_cols: int = 15
    alpha_dir: float = 3.0
    gain_t: float = 2.0
    gain_r: float = 2.0
    power: float = 1.0
    noise_db: float = -110.0
    # scenario
    k: int = 4
    nt_list: tuple = (2, 4, 8, 16)
    n_r: int = 2
    mode: str = "both"
    realizations: int = 1000
    master_seed: int = 0
    workers: int = 1
    independent_draws: bool = False   # decouple channel draws across modes
    # solver
    outer_tol: float = 1e-4
    max_outer: int = 50
    inner_tol: float = 1e-6
    init_phases: str = "ones"
    out_dir: str = ""

    def __post_init__(self):
        self.nt_list = tuple(int(n) for n in self.nt_list)
        if not self.nt_list:
            raise ValueError("nt_list must be non-empty")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def noise_power(self) -> float:
        return 10.0 ** (self.noise_db / 10.0)

    def geometry(self, n_t: int) -> SystemGeometry:
        return SystemGeometry(
            wavelength=self.wavelength, s_t=self.spacing_t, s_r=self.spacing_r,
            s_ris=self.spacing_ris, l_t=self.l_t, h_t=self.h_t,
            d_ris=self.d_ris, h_ris=self.h_ris, n_t=n_t,
            ris_shape=(self.ris_rows, self.ris_cols),
            alpha_dir=self.alpha_dir, g_t=self.gain_t, g_r=self.gain_r,
            p_total=self.power, n0=self.noise_power)

    def ao_options(self) -> AoOptions:
        return AoOptions(outer_tol=self.outer_tol, max_outer=self.max_outer,
                         inner_tol=self.inner_tol, init_phases=self.init_phases,
                         count_mults=False)

    def realization_seed(self, realization: int):
        """Entropy tuple keying all substreams of one realization."""
        if self.independent_draws:
            # +1 keeps the entropy tuple distinct from the matched-seed
            # scheme (SeedSequence collapses trailing zeros).
            return (self.master_seed, realization, _MODE_IDS[self.mode] + 1)
        return (self.master_seed, realization)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["nt_list"] = list(self.nt_list)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class RunRecord:
    """Outcome of one (realization, n_t) solve."""

    realization: int
    seed: int
    k: int
    nt: int
    mode: str
    sum_rate_bits: float
    outer_iters: int
    mean_bisection_steps: float
    mean_inner_cycles: float
    wall_ms: float
    ok: bool = True
    error: str = ""


def sample_user_positions(config: ScenarioConfig, seed) -> list:
    """Draw one placement per user from the quantized uniform grids.

    The y-coordinate is drawn last so that redraws of ``l == 0`` (required
    whenever the reflected link is active, where such a placement has
    infinite path loss) perturb nothing else.  Deterministic per seed.
    """
    redraw_zero_l = config.mode in ("ris", "both")
    placements = []
    for k in range(config.k):
        rng = substream(seed, ROLE_PLACEMENT, k)
        d0, dstep, dn = D_GRID
        h0, hstep, hn = H_GRID
        l0, lstep, ln = L_GRID
        d = d0 + dstep * int(rng.integers(0, dn))
        h = h0 + hstep * int(rng.integers(0, hn))
        l = l0 + lstep * int(rng.integers(0, ln))
        while redraw_zero_l and l == 0.0:
            l = l0 + lstep * int(rng.integers(0, ln))
        placements.append(UserPlacement(d=d, l=l, h=h, n_antennas=config.n_r))
    return placements


def solve_realization(config: ScenarioConfig, n_t: int, realization: int) -> RunRecord:
    """Sample one realization and run the optimizer on it."""
    seed = config.realization_seed(realization)
    seed_tag = int(np.random.SeedSequence(entropy=seed).generate_state(1)[0])
    t0 = time.perf_counter()
    try:
        geometry = config.geometry(n_t)
        placements = sample_user_positions(config, seed)
        channels = sample_channels(
            geometry, placements, seed,
            include_direct=config.mode in ("direct", "both"),
            include_ris=config.mode in ("ris", "both"))
        report = alternating_optimize(channels, geometry.p_total,
                                      options=config.ao_options())
        wall_ms = 1e3 * (time.perf_counter() - t0)
        return RunRecord(
            realization=realization, seed=seed_tag, k=config.k, nt=n_t,
            mode=config.mode, sum_rate_bits=report.sum_rate_bits,
            outer_iters=report.outer_iterations,
            mean_bisection_steps=report.mean_bisection_steps,
            mean_inner_cycles=report.mean_inner_cycles, wall_ms=wall_ms)
    except Exception as exc:  # failures are data, not crashes
        wall_ms = 1e3 * (time.perf_counter() - t0)
        return RunRecord(
            realization=realization, seed=seed_tag, k=config.k, nt=n_t,
            mode=config.mode, sum_rate_bits=float("nan"), outer_iters=-1,
            mean_bisection_steps=float("nan"), mean_inner_cycles=float("nan"),
            wall_ms=wall_ms, ok=False, error=f"{type(exc).__name__}: {exc}")


def _run_task(args):
    config, n_t, realization = args
    return solve_realization(config, n_t, realization)


def aggregate_records(records) -> list:
    """Deterministic fold of the records into per-(nt) aggregates."""
    by_nt = {}
    for rec in sorted(records, key=lambda r: (r.nt, r.realization)):
        by_nt.setdefault(rec.nt, []).append(rec)
    rows = []
    for nt, recs in sorted(by_nt.items()):
        ok = [r for r in recs if r.ok]
        rates = np.array([r.sum_rate_bits for r in ok])
        n = rates.size
        mean = float(np.mean(rates)) if n else float("nan")
        stderr = float(np.std(rates, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        rows.append({
            "mode": recs[0].mode, "K": recs[0].k, "Nt": nt,
            "mean_sum_rate_bits": mean, "stderr": stderr,
            "n_ok": n, "n_failed": len(recs) - n,
            "mean_outer_iters": float(np.mean([r.outer_iters for r in ok])) if n else float("nan"),
            "mean_L": float(np.mean([r.mean_bisection_steps for r in ok])) if n else float("nan"),
            "mean_I": float(np.mean([r.mean_inner_cycles for r in ok])) if n else float("nan"),
        })
    return rows


def _version_string() -> str:
    try:
        from importlib.metadata import version
        pkg = version("risbc")
    except Exception:
        pkg = "unknown"
    try:
        git = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10).stdout.strip()
    except Exception:
        git = ""
    return f"risbc {pkg}" + (f" ({git})" if git else "")


def default_out_dir() -> Path:
    return Path(os.environ.get("RISBC_OUT_DIR", "risbc_out"))


def write_records_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in sorted(records, key=lambda r: (r.nt, r.realization)):
            writer.writerow([
                r.realization, r.seed, r.k, r.nt, r.mode,
                repr(float(r.sum_rate_bits)), r.outer_iters,
                repr(float(r.mean_bisection_steps)),
                repr(float(r.mean_inner_cycles)), repr(float(r.wall_ms))])


def read_records_csv(path) -> list:
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(RunRecord(
                realization=int(row["realization"]), seed=int(row["seed"]),
                k=int(row["K"]), nt=int(row["Nt"]), mode=row["mode"],
                sum_rate_bits=float(row["sum_rate_bits"]),
                outer_iters=int(row["outer_iters"]),
                mean_bisection_steps=float(row["L"]),
                mean_inner_cycles=float(row["I"]),
                wall_ms=float(row["wall_ms"]),
                ok=np.isfinite(float(row["sum_rate_bits"]))))
    return records


def run_scenario(config: ScenarioConfig, out_dir=None, write_outputs: bool = True):
    """Execute a full scenario; returns ``(summary, records)``.

    Outputs are persisted under ``out_dir`` (default from
    ``RISBC_OUT_DIR``) as ``records_K{k}_{mode}.csv`` and
    ``summary_K{k}_{mode}.json``.  Raises :class:`ScenarioRunError` after
    persisting if more than 1% of realizations failed.
    """
    tasks = [(config, nt, r) for nt in config.nt_list
             for r in range(config.realizations)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunk = max(1, len(tasks) // (8 * config.workers))
            records = list(pool.map(_run_task, tasks, chunksize=chunk))
    else:
        records = [_run_task(t) for t in tasks]

    rows = aggregate_records(records)
    n_failed = sum(1 for r in records if not r.ok)
    failure_rate = n_failed / len(records)
    summary = {
        "config": config.to_dict(),
        "results": rows,
        "n_records": len(records),
        "n_failed": n_failed,
        "failure_rate": failure_rate,
        "failed": failure_rate > MAX_FAILURE_FRACTION,
        "errors": sorted({r.error for r in records if not r.ok}),
        "version": _version_string(),
    }

    if write_outputs:
        if out_dir is not None:
            out = Path(out_dir)
        elif config.out_dir:
            out = Path(config.out_dir)
        else:
            out = default_out_dir()
        out.mkdir(parents=True, exist_ok=True)
        tag = f"K{config.k}_{config.mode}"
        write_records_csv(out / f"records_{tag}.csv", records)
        (out / f"summary_{tag}.json").write_text(
            json.dumps(summary, sort_keys=True, indent=1) + "\n")
        summary["paths"] = {"records": str(out / f"records_{tag}.csv"),
                            "summary": str(out / f"summary_{tag}.json")}

    if summary["failed"]:
        raise ScenarioRunError(
            f"{n_failed}/{len(records)} realizations failed "
            f"({100 * failure_rate:.2f}% > {100 * MAX_FAILURE_FRACTION:.0f}%); "
            f"errors: {summary['errors'][:3]}")
    return summary, records
