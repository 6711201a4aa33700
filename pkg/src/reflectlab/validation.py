"""Verification harness built on the martingale and distributional identities.

Deterministic checks compare closed forms with direct quadrature; statistical
checks simulate independent paths from explicit streams and report a test
statistic with a pass/fail decision at a fixed significance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .distributions import StepDistribution
from .errors import DomainError, PreconditionViolation
from .quadrature import integrate_1d
from .rng import RngStream
from .walker import (Boundary, ReflectedPath, ladder_decompose, ladder_depth_units,
                     simulate_batch, simulate_path)

KS_ALPHA = 0.001
# paths per simulated chunk; bounds memory for long horizons
CHUNK_CELLS = 2_000_000


@dataclass(frozen=True)
class MartingaleTrace:
    z_values: np.ndarray      # Z_0 .. Z_N
    phi_at: np.ndarray        # phi(R_{i-1}) for i = 1 .. N
    sigma2: float


@dataclass
class TestReport:
    name: str
    passed: bool
    statistic: float
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "statistic": float(self.statistic),
                **self.detail}


# ---------------------------------------------------------------------------
# phi and the conditional increment moments


def _need_second_plus(dist: StepDistribution):
    if not dist.metadata.pos_moment_order_sup > 2.0:
        raise PreconditionViolation("needs E(X+)^2 finite")


def _need_zero_mean_variance(dist: StepDistribution):
    md = dist.metadata
    if md.variance is None or md.mean != 0.0:
        raise PreconditionViolation("needs E X = 0 and finite variance")


def phi(dist: StepDistribution, x: float, method: str = "quadrature") -> float:
    """``phi(x) = 2 int_0^inf y P(X > x + y) dy``.

    ``method="quadrature"`` integrates that form directly; ``method="closed"``
    uses ``2 (int_x^inf y F̄ - x int_x^inf F̄)`` with closed-form moments.
    """
    if not x >= 0:
        raise DomainError("phi needs x >= 0")
    _need_second_plus(dist)
    if method == "closed":
        return float(phi_closed(dist, x))
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")
    jumps = [b - x for b in list(dist.breakpoints) + [a for a, _ in dist.atoms] if b - x > 0]
    return 2.0 * integrate_1d(lambda y: y * float(dist.tail(x + y)), 0.0, math.inf, jumps)


def phi_closed(dist: StepDistribution, x):
    """Vectorized closed form of ``phi``."""
    x = np.asarray(x, dtype=float)
    tail_int = dist.upper_moment(1, x) - x * dist.tail(x)
    out = 2.0 * (dist.integrated_weighted_tail(x) - x * tail_int)
    # cancellation can leave tiny negative values far in the tail
    return np.maximum(out, 0.0)


def conditional_increment_moments(dist: StepDistribution, x: float, method: str = "closed"):
    """``(E[Delta | R_prev = x], E[Delta^2 | R_prev = x])``.

    ``"closed"`` uses the tail-integral forms, ``"direct"`` integrates the
    split ``Delta = -X`` on ``{X <= x}`` and ``-x`` on ``{X > x}``.
    """
    if not x >= 0:
        raise DomainError("x must be >= 0")
    md = dist.metadata
    if not md.mean_abs_finite:
        raise PreconditionViolation("needs E|X| finite")
    have_m2 = md.second_moment is not None
    if method == "closed":
        tail_int = dist.integrated_tail(x, math.inf)
        m1 = -md.mean + tail_int
        m2 = md.second_moment - 2.0 * float(dist.integrated_weighted_tail(x)) if have_m2 else None
        return m1, m2
    if method != "direct":
        raise DomainError(f"unknown method {method!r}")
    tail_x = float(dist.tail(x))

    def lower(k):
        atoms = sum(a ** k * m for a, m in dist.atoms if a <= x)
        if dist.is_atomic:
            return atoms
        return atoms + integrate_1d(lambda y: y ** k * float(dist.pdf(y)), -math.inf, x,
                                    [b for b in dist.breakpoints if b < x])

    m1 = -lower(1) - x * tail_x
    m2 = lower(2) + x * x * tail_x if have_m2 else None
    return m1, m2


def martingale_drift(dist: StepDistribution, x: float) -> float:
    """``m2 + 2 x m1 - sigma^2 + phi`` from the direct moments and quadrature phi."""
    _need_zero_mean_variance(dist)
    m1, m2 = conditional_increment_moments(dist, x, method="direct")
    return m2 + 2.0 * x * m1 - dist.metadata.variance + phi(dist, x)


# ---------------------------------------------------------------------------
# Z process


def z_process(path: ReflectedPath, dist: StepDistribution) -> MartingaleTrace:
    """``Z_n = R_n^2 - n sigma^2 + sum_{i<=n} phi(R_{i-1})`` along a path."""
    _need_zero_mean_variance(dist)
    sigma2 = dist.metadata.variance
    r = np.concatenate([[0.0], path.reflected])
    ph = phi_closed(dist, r[:-1])
    n = np.arange(r.size)
    z = r ** 2 - n * sigma2 + np.concatenate([[0.0], np.cumsum(ph)])
    z[0] = 0.0
    return MartingaleTrace(z, ph, sigma2)


def _batches(reps: int, n_steps: int):
    per = max(1, CHUNK_CELLS // max(n_steps, 1))
    done = 0
    while done < reps:
        m = min(per, reps - done)
        yield m
        done += m


def _mean_se(values: np.ndarray):
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return mean, se


def z_mean_check(dist: StepDistribution, n: int, reps: int, stream: RngStream) -> TestReport:
    """Monte Carlo mean of ``Z_n`` against 0 at three standard errors."""
    _need_zero_mean_variance(dist)
    sigma2 = dist.metadata.variance
    zs = []
    for m in _batches(reps, n):
        r = simulate_batch(dist, n, m, stream)["reflected"]
        prev = np.concatenate([np.zeros((m, 1)), r[:, :-1]], axis=1)
        zs.append(r[:, -1] ** 2 - n * sigma2 + phi_closed(dist, prev).sum(axis=1))
    z = np.concatenate(zs)
    mean, se = _mean_se(z)
    return TestReport("z_mean", abs(mean) <= 3.0 * se, mean / se if se else 0.0,
                      {"n": n, "reps": reps, "mean": mean, "se": se})


def optional_stopping_check(dist: StepDistribution, boundary: Boundary, m_cap: int, reps: int,
                            stream: RngStream) -> TestReport:
    """``E Z`` at ``tau ^ m_cap`` for the square-root boundary, plus the rearranged identity.

    The identity compares ``sigma^2 E[tau ^ m]`` with ``E R^2 + E sum phi``
    evaluated at the stopped index; both sides come from the same paths.
    """
    _need_zero_mean_variance(dist)
    if boundary.kappa != 0.5:
        raise PreconditionViolation("optional stopping check uses kappa = 1/2")
    if m_cap < 0:
        raise DomainError("m_cap must be >= 0")
    sigma2 = dist.metadata.variance
    if m_cap == 0:
        return TestReport("optional_stopping", True, 0.0,
                          {"m_cap": 0, "reps": reps, "mean_z": 0.0, "se": 0.0})
    n_idx = np.arange(1, m_cap + 1)
    heights = boundary.values(n_idx)
    lhs, rhs = [], []
    for m in _batches(reps, m_cap):
        r = simulate_batch(dist, m_cap, m, stream)["reflected"]
        hit = r > heights
        t = np.where(hit.any(axis=1), np.argmax(hit, axis=1) + 1, m_cap)
        prev = np.concatenate([np.zeros((m, 1)), r[:, :-1]], axis=1)
        cum_phi = np.cumsum(phi_closed(dist, prev), axis=1)
        rows = np.arange(m)
        lhs.append(sigma2 * t)
        rhs.append(r[rows, t - 1] ** 2 + cum_phi[rows, t - 1])
    lhs, rhs = np.concatenate(lhs), np.concatenate(rhs)
    z = rhs - lhs
    mean, se = _mean_se(z)
    return TestReport("optional_stopping", abs(mean) <= 3.0 * se, mean / se if se else 0.0,
                      {"m_cap": m_cap, "reps": reps, "r": boundary.r, "mean_z": mean, "se": se,
                       "sigma2_mean_tau": float(np.mean(lhs)), "mean_r2_plus_phi": float(np.mean(rhs))})


# ---------------------------------------------------------------------------
# distributional identities


def _ks_report(name, a, b, detail):
    res = stats.ks_2samp(a, b, method="asymp")
    return TestReport(name, bool(res.pvalue >= KS_ALPHA), float(res.statistic),
                      {"pvalue": float(res.pvalue), "alpha": KS_ALPHA, **detail})


def mirror_identity_test(dist: StepDistribution, n: int, reps: int, stream: RngStream) -> TestReport:
    """Two-sample KS of ``R_n`` against ``-min_{j<=n} S_j`` from independent streams."""
    if n < 1:
        raise DomainError("n must be >= 1")
    r = simulate_batch(dist, n, reps, stream.child(0))["reflected"][:, -1]
    m = simulate_batch(dist, n, reps, stream.child(1))["neg_min"][:, -1]
    return _ks_report("mirror", r, m, {"n": n, "reps": reps})


def dual_identity_test(dist: StepDistribution, n: int, reps: int, stream: RngStream) -> TestReport:
    """Two-sample KS of ``R_n`` for steps ``-X`` against ``r_n`` for steps ``X``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    r_neg = simulate_batch(dist, n, reps, stream.child(0), negate=True)["reflected"][:, -1]
    dual = simulate_batch(dist, n, reps, stream.child(1))["dual"][:, -1]
    return _ks_report("dual", r_neg, dual, {"n": n, "reps": reps})


def exceedance_profile(dist: StepDistribution, x: float, n_grid, reps: int,
                       stream: RngStream) -> dict:
    """Empirical ``P(R_n > x)`` on ``n_grid`` from common paths.

    Under a non-degenerate law these stay bounded away from 0 as ``n`` grows.
    """
    n_grid = sorted(int(n) for n in n_grid)
    horizon = n_grid[-1]
    counts = np.zeros(len(n_grid), dtype=np.int64)
    idx = np.array(n_grid) - 1
    for m in _batches(reps, horizon):
        r = simulate_batch(dist, horizon, m, stream)["reflected"]
        counts += (r[:, idx] > x).sum(axis=0)
    probs = counts / reps
    return {"x": x, "n": n_grid, "prob": probs.tolist(), "min_prob": float(probs.min())}


def below_level_partial_sums(dist: StepDistribution, x: float, n_max: int, reps: int,
                             stream: RngStream) -> dict:
    """Partial sums of ``sum_n P(R_n <= x)``, estimated from common paths.

    Only a diagnostic: a finite horizon cannot decide whether the series
    converges.
    """
    total = np.zeros(n_max)
    for m in _batches(reps, n_max):
        r = simulate_batch(dist, n_max, m, stream)["reflected"]
        total += (r <= x).sum(axis=0)
    probs = total / reps
    marks = [n for n in (1, 10, 100, 1000, 10_000, 100_000) if n <= n_max]
    partial = np.cumsum(probs)
    return {"x": x, "n": marks, "partial_sum": [float(partial[n - 1]) for n in marks]}


# ---------------------------------------------------------------------------
# exact path checks


def recursion_check(dist: StepDistribution, n_steps: int, reps: int, stream: RngStream) -> TestReport:
    """Recursive and definitional ``R`` agree exactly; increments sum to ``R_n``."""
    bad_rec = bad_sum = 0
    for i in range(reps):
        p = simulate_path(dist, n_steps, stream.child(i))
        if not np.array_equal(p.recursion_units, p.reflected_units):
            bad_rec += 1
        if sum(p.delta_units.tolist()) != p.reflected_units.tolist()[-1]:
            bad_sum += 1
        if not np.array_equal(p.reflected_by_recursion, p.reflected):
            bad_rec += 1
    return TestReport("recursion", bad_rec == 0 and bad_sum == 0, float(bad_rec + bad_sum),
                      {"paths": reps, "n_steps": n_steps, "recursion_mismatches": bad_rec,
                       "increment_sum_mismatches": bad_sum})


def ladder_check_path(path: ReflectedPath) -> bool:
    """Depth identity and ``R = 0`` at every ladder epoch, exactly."""
    lad = ladder_decompose(path)
    r = [0] + path.reflected_units.tolist()
    depths = ladder_depth_units(path)
    prev = 0
    for t, d in zip(lad.ladder_times, depths):
        if r[t] != 0 or max(r[prev:t]) != d:
            return False
        prev = t
    return True


def ladder_check(dist: StepDistribution, n_steps: int, reps: int, stream: RngStream) -> TestReport:
    bad = sum(not ladder_check_path(simulate_path(dist, n_steps, stream.child(i))) for i in range(reps))
    return TestReport("ladder", bad == 0, float(bad), {"paths": reps, "n_steps": n_steps, "failures": bad})


def martingale_algebra(dist: StepDistribution, grid) -> TestReport:
    """Worst relative one-step drift of ``Z`` over a grid of ``x`` values."""
    _need_zero_mean_variance(dist)
    grid = [float(x) for x in grid]
    sigma2 = dist.metadata.variance
    worst = max(abs(martingale_drift(dist, x)) / sigma2 for x in grid)
    return TestReport("martingale_algebra", worst <= 1e-8, worst, {"grid_points": len(grid)})
