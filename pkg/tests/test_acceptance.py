"""Acceptance suite: one test group per criterion.

Each test carries a ``criterion`` mark; the terminal summary prints one
PASS/FAIL line per criterion (see conftest).  Monte Carlo thresholds are read
from ``tests/data/thresholds.json``, frozen after pilot runs.
"""

import csv
import math
import time

import numpy as np
import pytest

from reflectlab.criteria import a_plus, a_plus_ratio, classify, w_func
from reflectlab.distributions import make_distribution
from reflectlab.montecarlo import THREADS_ENV, ExperimentSpec, run_passage_experiment
from reflectlab.output import experiment_csv
from reflectlab.rng import RngStream
from reflectlab.validation import (dual_identity_test, ladder_check, martingale_algebra,
                                   mirror_identity_test, recursion_check, z_mean_check)

from conftest import DATA, FAMILY_SPECS

FINITE_POS_MEAN = [s for s in FAMILY_SPECS if not s.startswith("cauchy")]


def _report(number, message):
    print(f"criterion {number}: {message}")


class Timer:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False

    def check(self):
        assert self.elapsed < self.budget, f"took {self.elapsed:.1f}s, budget {self.budget}s"


# ---------------------------------------------------------------------------
# Monte Carlo runs shared between the dichotomy criteria and the reproducibility check

_RUNS: dict = {}


def _spec(cfg) -> ExperimentSpec:
    r = cfg["r"] if isinstance(cfg["r"], list) else [cfg["r"]]
    caps = cfg.get("caps") or sorted(set(cfg["n"]) | {cfg["mean_cap"]})
    return ExperimentSpec(cfg["dist"], cfg["kappa"], tuple(r), tuple(caps), cfg["reps"], cfg["seed"])


def _run(name, cfg, workers=1):
    key = (name, workers)
    if key not in _RUNS:
        t0 = time.perf_counter()
        res = run_passage_experiment(_spec(cfg), workers=workers)
        _RUNS[key] = (res, time.perf_counter() - t0)
    return _RUNS[key]


# ---------------------------------------------------------------------------
# 1. recursion / definition equivalence


@pytest.mark.criterion(1, "R by max-prefix equals R by recursion; increments sum to R_n")
def test_criterion_1_recursion():
    with Timer(10) as t:
        reports = [recursion_check(make_distribution(s), 1000, 1000, RngStream(101, i))
                   for i, s in enumerate(FAMILY_SPECS)]
    for spec, rep in zip(FAMILY_SPECS, reports):
        assert rep.passed, (spec, rep.to_dict())
        assert rep.detail["paths"] == 1000
    t.check()
    _report(1, f"{5 * 1000} paths exact in {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. ladder identity


@pytest.mark.criterion(2, "ladder depth identity and R = 0 at ladder epochs")
def test_criterion_2_ladder():
    with Timer(10) as t:
        reports = [ladder_check(make_distribution(s), 1000, 1000, RngStream(102, i))
                   for i, s in enumerate(FAMILY_SPECS)]
    for spec, rep in zip(FAMILY_SPECS, reports):
        assert rep.passed and rep.detail["failures"] == 0, spec
    t.check()
    _report(2, f"ladder identity exact on 1000 paths per family in {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 3. martingale algebra and the mean of Z_100


@pytest.mark.criterion(3, "one-step drift of Z vanishes; mean of Z_100 within 3 SE of 0")
def test_criterion_3_martingale():
    grid = np.concatenate([[0.0], np.geomspace(0.01, 10.0, 29)])
    with Timer(60) as t:
        for spec in ("normal(mu=0,sigma=1)", "shiftexp(rate=1,center=1)"):
            rep = martingale_algebra(make_distribution(spec), grid)
            assert rep.detail["grid_points"] == 30
            assert rep.statistic <= 1e-8, (spec, rep.statistic)
        z = z_mean_check(make_distribution("normal(mu=0,sigma=1)"), 100, 100_000, RngStream(103, 0))
    assert abs(z.detail["mean"]) <= 3 * z.detail["se"], z.to_dict()
    t.check()
    _report(3, f"E Z_100 = {z.detail['mean']:.3f} (SE {z.detail['se']:.3f}) in {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 4. W identity and A+ conventions


@pytest.mark.criterion(4, "two forms of W agree; A+(x)/x -> 1 - F(0); A+ <= E X+")
def test_criterion_4_w_and_a_plus():
    with Timer(10) as t:
        for spec in FINITE_POS_MEAN:
            d = make_distribution(spec)
            for y in np.geomspace(1e-3, 1e3, 50):
                closed, quad = w_func(d, y), w_func(d, y, form="quadrature")
                assert abs(closed - quad) <= 1e-6 * abs(quad), (spec, y)
            limit = 1.0 - float(d.cdf(0.0))
            assert abs(a_plus_ratio(d, 1e-7) - limit) <= 1e-6, spec
            ex_plus = float(d.upper_moment(1, 0.0))
            vals = [a_plus(d, x) for x in np.geomspace(1e-3, 1e4, 40)]
            assert np.all(np.diff(vals) >= -1e-12) and max(vals) <= ex_plus * (1 + 1e-9), spec
        c = make_distribution("cauchy(x0=0,gamma=1)")
        assert abs(a_plus_ratio(c, 1e-7) - 0.5) <= 1e-6
    t.check()
    _report(4, f"W and A+ checks for {len(FINITE_POS_MEAN)} families in {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 5. mirror identity and the dual process


@pytest.mark.criterion(5, "R_50 vs -min S and the dual process: KS at 0.001 with 10^4 reps")
@pytest.mark.parametrize("index, spec", list(enumerate(FAMILY_SPECS)))
def test_criterion_5_mirror(index, spec):
    d = make_distribution(spec)
    with Timer(60) as t:
        mirror = mirror_identity_test(d, 50, 10_000, RngStream(105, index))
        dual = dual_identity_test(d, 50, 10_000, RngStream(106, index))
    assert mirror.passed, mirror.to_dict()
    assert dual.passed, dual.to_dict()
    t.check()
    _report(5, f"{spec}: mirror p={mirror.detail['pvalue']:.3f}, dual p={dual.detail['pvalue']:.3f}")


# ---------------------------------------------------------------------------
# 6. classifier truth table


def _truth_rows():
    with open(DATA / "truth_table.csv", newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.criterion(6, "classifier reproduces the hand-derived truth table")
def test_criterion_6_truth_table():
    rows = _truth_rows()
    assert len(rows) >= 12
    covered = {r["fired_clause"] for r in rows} | {r["liminf_clause"] for r in rows}
    assert covered >= {"2.2", "2.8", "2.9", "2.10", "2.11", "2.12", "2.13", "T2.1a"}
    with Timer(10) as t:
        mismatches = []
        for row in rows:
            rep = classify(make_distribution(row["dist"]), float(row["kappa"]))
            got = (rep.tau_all_r_as_finite.verdict.value, rep.fired_clause,
                   rep.liminf_Sn_over_nk_neg_infinite.verdict.value, rep.liminf_clause)
            want = (row["tau_all_r_as_finite"], row["fired_clause"],
                    row["liminf_Sn_over_nk_neg_infinite"], row["liminf_clause"])
            if got != want:
                mismatches.append((row["dist"], row["kappa"], got, want))
    assert not mismatches
    t.check()
    _report(6, f"{len(rows)} rows reproduced in {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 7. square-root boundary dichotomy


@pytest.mark.criterion(7, "kappa = 1/2: finite capped mean at r = 0.5, growing at r = 1.5")
def test_criterion_7_sqrt_boundary(thresholds):
    cfg = thresholds["sqrt_boundary_dichotomy"]
    res, secs = _run("a", cfg)
    lo, hi = cfg["caps"]
    f_lo, f_hi = res.row(cfg["finite_mean_r"], lo), res.row(cfg["finite_mean_r"], hi)
    assert f_hi.censored_frac < cfg["max_censored_frac_top_cap"]
    drift = abs(f_hi.mean_tau_capped - f_lo.mean_tau_capped) / f_lo.mean_tau_capped
    assert drift < cfg["max_capped_mean_drift"]
    i_lo, i_hi = res.row(cfg["infinite_mean_r"], lo), res.row(cfg["infinite_mean_r"], hi)
    growth = i_hi.mean_tau_capped / i_lo.mean_tau_capped - 1.0
    assert growth > cfg["min_capped_mean_growth"]
    assert i_hi.censored_frac < i_lo.censored_frac
    assert f_hi.verdict == "Finite"
    assert secs < 300
    _report(7, f"r=0.5 drift {drift:.3%}, censored {f_hi.censored_frac}; "
               f"r=1.5 growth {growth:.0%}, censored {i_lo.censored_frac} -> {i_hi.censored_frac} "
               f"({secs:.1f}s)")


# ---------------------------------------------------------------------------
# 8. linear boundary under negative drift


@pytest.mark.criterion(8, "kappa = 1, E X = -1: passage below |E X|, positive escape above")
def test_criterion_8_linear_boundary(thresholds):
    cfg = thresholds["linear_boundary_dichotomy"]
    res, secs = _run("b", cfg)
    lo, hi = cfg["caps"]
    f_lo, f_hi = res.row(cfg["finite_r"], lo), res.row(cfg["finite_r"], hi)
    assert f_hi.censored_frac < cfg["max_censored_frac_top_cap"]
    drift = abs(f_hi.mean_tau_capped - f_lo.mean_tau_capped) / f_lo.mean_tau_capped
    assert drift < cfg["max_capped_mean_drift"]
    e_lo, e_hi = res.row(cfg["escape_r"], lo), res.row(cfg["escape_r"], hi)
    assert min(e_lo.censored_frac, e_hi.censored_frac) > cfg["min_escape_frac"]
    change = abs(e_hi.censored_frac - e_lo.censored_frac) / e_lo.censored_frac
    assert change <= cfg["max_escape_relative_change"]
    threshold = res.classification.kappa1_drift_threshold
    assert cfg["finite_r"] < threshold < cfg["escape_r"]
    assert secs < 180
    _report(8, f"r=0.5 censored {f_hi.censored_frac}, drift {drift:.3%}; "
               f"r=1.5 censored {e_lo.censored_frac} -> {e_hi.censored_frac} ({secs:.1f}s)")


# ---------------------------------------------------------------------------
# 9. flat boundary: geometric passage time


@pytest.mark.criterion(9, "kappa = 0 on lattice(1/2): P(tau > n) = 2^-n and mean 2")
def test_criterion_9_geometric(thresholds):
    cfg = thresholds["flat_boundary_geometric"]
    res, secs = _run("c", cfg)
    k = cfg["max_se_multiple"]
    for n in cfg["n"]:
        p = 0.5 ** n
        se = math.sqrt(p * (1 - p) / cfg["reps"])
        got = res.row(float(cfg["r"]), n).censored_frac
        assert abs(got - p) <= k * se, (n, got, p)
    top = res.row(float(cfg["r"]), cfg["mean_cap"])
    assert top.n_censored == 0
    assert abs(top.mean_tau_capped - cfg["exact_mean"]) <= k * top.stderr_mean
    assert secs < 10
    _report(9, f"mean {top.mean_tau_capped:.4f} +- {top.stderr_mean:.4f} ({secs:.1f}s)")


# ---------------------------------------------------------------------------
# 10. reproducibility across worker counts


@pytest.mark.criterion(10, "byte-identical CSV under 1, 4 and 8 workers")
def test_criterion_10_reproducible(thresholds, monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    runs = {"a": thresholds["sqrt_boundary_dichotomy"], "b": thresholds["linear_boundary_dichotomy"],
            "c": thresholds["flat_boundary_geometric"]}
    for name, cfg in runs.items():
        texts = {w: experiment_csv(_run(name, cfg, workers=w)[0].rows).encode() for w in (1, 4, 8)}
        assert texts[1] == texts[4] == texts[8], name
        tau = {w: _run(name, cfg, workers=w)[0].tau for w in (1, 4, 8)}
        assert np.array_equal(tau[1], tau[4]) and np.array_equal(tau[1], tau[8])
    _report(10, "CSV bytes identical for the three Monte Carlo runs")
