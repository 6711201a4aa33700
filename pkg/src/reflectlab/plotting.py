"""Figures rendered next to the CSV reports (non-interactive Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (7.0, 3.2),
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def experiment_figure(result, path):
    """Capped mean and censored fraction against the cap, one line per r."""
    spec = result.spec
    with plt.rc_context(STYLE):
        fig, (ax_mean, ax_cens) = plt.subplots(1, 2, constrained_layout=True)
        for r in spec.r_values:
            rows = [result.row(r, c) for c in spec.caps]
            mean = np.array([row.mean_tau_capped for row in rows])
            se = np.array([row.stderr_mean for row in rows])
            ax_mean.errorbar(spec.caps, mean, yerr=3 * se, marker="o", ms=3, capsize=2, label=f"r = {r:g}")
            ax_cens.plot(spec.caps, [row.censored_frac for row in rows], marker="o", ms=3, label=f"r = {r:g}")
        ax_mean.set(xscale="log", yscale="log", xlabel="cap", ylabel="mean of min(tau, cap)")
        ax_cens.set(xscale="log", xlabel="cap", ylabel="censored fraction", ylim=(-0.02, 1.02))
        ax_mean.legend(frameon=False)
        fig.suptitle(f"{result.rows[0].dist if result.rows else spec.dist_spec}, kappa = {spec.kappa:g}")
        fig.savefig(path)
        plt.close(fig)


def path_figure(path_obj, out, boundary=None):
    """Walk, running maximum and reflected process along one path."""
    n = np.arange(1, path_obj.n_steps + 1)
    with plt.rc_context(STYLE):
        fig, (ax_s, ax_r) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 4.2), constrained_layout=True)
        ax_s.plot(n, path_obj.s, lw=0.8, label="S")
        ax_s.plot(n, path_obj.s_star, lw=0.8, label="running max")
        ax_s.legend(frameon=False)
        ax_r.plot(n, path_obj.reflected, lw=0.8, color="C2", label="R")
        if boundary is not None:
            ax_r.plot(n, boundary.values(n), lw=0.8, ls="--", color="k", label="r n^kappa")
        ax_r.set(xlabel="n")
        ax_r.legend(frameon=False)
        fig.savefig(out)
        plt.close(fig)
