"""Figure rendering for sweep results.

Import is deferred and the Agg backend forced so headless runs (CI, remote
shells) never touch a display.  Files are written next to the data the CLI
emits; nothing here is needed for the library's numerical results.
"""

from __future__ import annotations

import numpy as np

from .scan import ConvergenceReport, ScanResult

__all__ = ["render_scan", "render_convergence"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def render_scan(result: ScanResult, path) -> None:
    """Threshold temperature (and bound when present) over the grid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = np.asarray(result.parameter_grid)
    t_star = np.asarray(result.t_star)
    ax.plot(x, t_star, "o-", color="0.5", label="threshold")
    if result.t_bound is not None:
        ax.plot(x, np.asarray(result.t_bound), "s-", color="0.0", label="bound")
    ax.set_xlabel(result.parameter)
    ax.set_ylabel("temperature")
    finite = t_star[np.isfinite(t_star)]
    if finite.size and np.min(finite) > 0:
        ax.set_yscale("log")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_convergence(report: ConvergenceReport, path) -> None:
    """One threshold curve per chain length on shared axes."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for n, res in zip(report.n_list, report.results):
        ax.plot(
            np.asarray(res.parameter_grid),
            np.asarray(res.t_star),
            "o-",
            label=f"n={n}",
        )
    ax.set_xlabel(report.results[0].parameter if report.results else "parameter")
    ax.set_ylabel("threshold temperature")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
