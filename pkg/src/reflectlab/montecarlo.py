"""Reproducible passage-time experiments.

Replication ``i`` always draws from ``derive_stream(master_seed, i)`` and is
scanned once up to the largest cap; smaller caps are read off the same path,
so censoring flags are nonincreasing and capped passage times nondecreasing
in the cap.  Replications are split into contiguous index ranges for the
worker pool and reassembled in index order, which makes every aggregate a
pure function of the experiment spec.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .criteria import CriteriaReport, classify
from .distributions import StepDistribution, make_distribution
from .errors import DomainError
from .rng import RngStream, derive_stream
from .walker import passage_times, simulate_batch

__all__ = [
    "ExperimentSpec", "ExperimentResult", "ResultRow", "ScanResult", "derive_stream",
    "run_passage_experiment", "divergence_scan", "growth_exponent", "worker_count",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("dist", "kappa", "r", "cap", "reps", "seed", "n_censored", "censored_frac",
               "mean_tau_capped", "stderr_mean", "q50", "q90", "q99", "verdict", "fired_clause")

THREADS_ENV = "REFLECT_LAB_THREADS"

# divergence_scan thresholds, frozen from pilot runs (see tests/data/thresholds.json)
CONVERGING_GROWTH = 0.05      # per-decade relative growth of the capped mean
DIVERGING_GROWTH = 0.50
CONVERGING_CENSORED = 0.01
ESCAPE_CENSORED = 0.2
ESCAPE_STABILITY = 0.25       # relative change of censored_frac over the last decade


@dataclass(frozen=True)
class ExperimentSpec:
    dist_spec: str
    kappa: float
    r_values: tuple
    caps: tuple
    replications: int
    master_seed: int
    emit: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        if not self.r_values:
            raise DomainError("at least one r value is required")
        if not self.caps or any(c < 1 for c in self.caps):
            raise DomainError("caps must be positive")
        if any(b <= a for a, b in zip(self.caps, self.caps[1:])):
            raise DomainError("caps must be strictly ascending")
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_config(cls, cfg: dict) -> "ExperimentSpec":
        """Build from the JSON config shape ``{dist, kappa, r, caps, reps, seed}``."""
        missing = [k for k in ("dist", "kappa", "r", "caps", "reps", "seed") if k not in cfg]
        if missing:
            raise DomainError(f"config is missing {', '.join(missing)}")
        extra = sorted(set(cfg) - {"dist", "kappa", "r", "caps", "reps", "seed"})
        if extra:
            raise DomainError(f"unknown config fields: {', '.join(extra)}")
        r = cfg["r"] if isinstance(cfg["r"], list) else [cfg["r"]]
        return cls(str(cfg["dist"]), float(cfg["kappa"]), tuple(r), tuple(cfg["caps"]),
                   int(cfg["reps"]), int(cfg["seed"]))


@dataclass(frozen=True)
class ResultRow:
    dist: str
    kappa: float
    r: float
    cap: int
    reps: int
    seed: int
    n_censored: int
    censored_frac: float
    mean_tau_capped: float
    stderr_mean: float
    q50: float
    q90: float
    q99: float
    verdict: str
    fired_clause: str

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list
    classification: Optional[CriteriaReport]
    tau: Optional[np.ndarray] = None     # (reps, len(r)) passage indices at the top cap, 0 = censored

    def row(self, r: float, cap: int) -> ResultRow:
        for row in self.rows:
            if row.r == r and row.cap == cap:
                return row
        raise KeyError((r, cap))


def worker_count(requested: Optional[int] = None) -> int:
    """Workers to use: the request (or CPU count), capped by ``REFLECT_LAB_THREADS``."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be a positive integer") from None
        if cap < 1:
            raise DomainError(f"{THREADS_ENV} must be a positive integer")
        n = min(n, cap)
    return max(1, int(n))


def _run_range(dist_spec: str, kappa: float, rs: tuple, cap: int, seed: int,
               start: int, stop: int) -> np.ndarray:
    dist = make_distribution(dist_spec)
    out = np.zeros((stop - start, len(rs)), dtype=np.int64)
    for k, i in enumerate(range(start, stop)):
        out[k] = passage_times(dist, kappa, rs, cap, derive_stream(seed, i))
    return out


def _ranges(reps: int, parts: int):
    bounds = np.linspace(0, reps, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def simulate_passage_matrix(spec: ExperimentSpec, workers: Optional[int] = None) -> np.ndarray:
    """Passage indices for every replication and r at the top cap (0 = censored)."""
    make_distribution(spec.dist_spec)          # fail fast on a bad spec
    n = min(worker_count(workers), spec.replications)
    args = (spec.dist_spec, spec.kappa, spec.r_values, spec.caps[-1], spec.master_seed)
    if n == 1:
        return _run_range(*args, 0, spec.replications)
    # several ranges per worker keep the pool busy when paths differ in length
    ranges = _ranges(spec.replications, 4 * n)
    with ProcessPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(_run_range, *zip(*[(*args, a, b) for a, b in ranges])))
    return np.concatenate(parts, axis=0)


def _summaries(tau: np.ndarray, cap: int):
    censored = (tau == 0) | (tau > cap)
    capped = np.where(censored, cap, tau).astype(np.float64)
    reps = tau.size
    mean = float(np.sum(capped) / reps)
    stderr = float(np.std(capped, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    finite = tau[~censored].astype(np.float64)
    if finite.size:
        q50, q90, q99 = (float(v) for v in np.quantile(finite, [0.5, 0.9, 0.99]))
    else:
        q50 = q90 = q99 = math.nan
    return int(censored.sum()), mean, stderr, q50, q90, q99


def run_passage_experiment(spec: ExperimentSpec, workers: Optional[int] = None) -> ExperimentResult:
    """Passage statistics for each ``(r, cap)`` of the spec."""
    dist = make_distribution(spec.dist_spec)
    report = classify(dist, spec.kappa)
    tau = simulate_passage_matrix(spec, workers)
    rows = []
    for j, r in enumerate(spec.r_values):
        for cap in spec.caps:
            n_cens, mean, se, q50, q90, q99 = _summaries(tau[:, j], cap)
            rows.append(ResultRow(
                dist=dist.spec, kappa=spec.kappa, r=r, cap=cap, reps=spec.replications,
                seed=spec.master_seed, n_censored=n_cens, censored_frac=n_cens / spec.replications,
                mean_tau_capped=mean, stderr_mean=se, q50=q50, q90=q90, q99=q99,
                verdict=report.tau_all_r_as_finite.verdict.value, fired_clause=report.fired_clause))
    return ExperimentResult(spec, rows, report, tau)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class ScanResult:
    r: float
    label: str        # MeanConverging, MeanDiverging, PositiveEscape, Inconclusive
    caps: tuple
    censored_frac: tuple
    mean_tau_capped: tuple
    growth_per_decade: float


def _per_decade(a: float, b: float, c0: int, c1: int) -> float:
    if a <= 0:
        return math.inf if b > 0 else 0.0
    return (b / a) ** (1.0 / math.log10(c1 / c0)) - 1.0


def scan_label(caps, censored_frac, means) -> tuple[str, float]:
    """Dichotomy label from the trends of the capped mean and censored fraction."""
    g = _per_decade(means[-2], means[-1], caps[-2], caps[-1])
    cf0, cf1 = censored_frac[-2], censored_frac[-1]
    if cf1 > ESCAPE_CENSORED and abs(cf1 - cf0) <= ESCAPE_STABILITY * cf0:
        return "PositiveEscape", g
    if cf1 < CONVERGING_CENSORED and g < CONVERGING_GROWTH:
        return "MeanConverging", g
    if g > DIVERGING_GROWTH:
        return "MeanDiverging", g
    return "Inconclusive", g


def divergence_scan(spec: ExperimentSpec, workers: Optional[int] = None,
                    result: Optional[ExperimentResult] = None) -> list:
    """Label each r of a run over at least three geometric caps."""
    if len(spec.caps) < 3:
        raise DomainError("divergence_scan needs at least three caps")
    result = result or run_passage_experiment(spec, workers)
    out = []
    for r in spec.r_values:
        rows = [result.row(r, c) for c in spec.caps]
        cf = tuple(row.censored_frac for row in rows)
        mean = tuple(row.mean_tau_capped for row in rows)
        label, g = scan_label(spec.caps, cf, mean)
        out.append(ScanResult(r, label, spec.caps, cf, mean, g))
    return out


@dataclass(frozen=True)
class GrowthEstimate:
    slope: float                # median per-path slope of log max R against log n
    level: float                # median of max_{m<=n} R_m / n at the largest n
    slopes: np.ndarray


def growth_exponent(dist: StepDistribution, n_grid, reps: int, stream: RngStream) -> GrowthEstimate:
    """Median regression slope of ``log max_{m<=n} R_m`` on ``log n``.

    Paths whose running maximum is still 0 at some grid point use only the
    positive points; a path that never leaves 0 has slope 0.
    """
    n_grid = np.array(sorted(int(n) for n in n_grid))
    if n_grid[0] < 1:
        raise DomainError("grid points must be >= 1")
    if reps < 2:
        raise DomainError("reps must be >= 2")
    horizon = int(n_grid[-1])
    slopes, levels = [], []
    per = max(1, 2_000_000 // horizon)
    done = 0
    log_n = np.log(n_grid)
    while done < reps:
        m = min(per, reps - done)
        r = simulate_batch(dist, horizon, m, stream)["reflected"]
        peak = np.maximum.accumulate(r, axis=1)[:, n_grid - 1]
        for row in peak:
            pos = row > 0
            if pos.sum() >= 2:
                slopes.append(float(np.polyfit(log_n[pos], np.log(row[pos]), 1)[0]))
            else:
                slopes.append(0.0)
            levels.append(row[-1] / horizon)
        done += m
    slopes = np.array(slopes)
    return GrowthEstimate(float(np.median(slopes)), float(np.median(levels)), slopes)
