"""Matplotlib figure output for the CLI report paths.

Figures are a side channel next to the delimited output: the byte-exact
reproducibility contract covers CSV/JSON/PGM, not PNG.  The Agg backend is
forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analytic import T_C_ISING  # noqa: E402


def save_magnetization_curve(temperatures, magnetizations, path: str):
    """Spontaneous-magnetization curve with the critical point marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(temperatures, magnetizations, lw=1.8)
    ax.axvline(T_C_ISING, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("temperature")
    ax.set_ylabel("spontaneous magnetization")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows, path: str):
    """Estimates vs temperature, grouped by observable, with error bars."""
    by_obs: dict[str, list] = {}
    for row in rows:
        if row.estimate is not None:
            by_obs.setdefault(row.observable, []).append(row)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, obs_rows in by_obs.items():
        obs_rows.sort(key=lambda r: r.temperature)
        ts = [r.temperature for r in obs_rows]
        means = [r.estimate.mean for r in obs_rows]
        errs = [r.estimate.stderr for r in obs_rows]
        ax.errorbar(ts, means, yerr=errs, marker="o", ms=3, capsize=2, label=name)
    ax.set_xlabel("temperature")
    ax.set_ylabel("estimate")
    if by_obs:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
