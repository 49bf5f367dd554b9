"""Figure rendering for experiment reports (matplotlib, file output only)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .axis import ExperimentReport  # noqa: E402


def plot_experiment(report: ExperimentReport, figdir: str) -> list[str]:
    os.makedirs(figdir, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    rs = [r.radius for r in report.rows]
    ds = [r.diam for r in report.rows]
    ax.scatter(rs, ds, s=12, alpha=0.6, label="balls")
    if rs:
        order = sorted(range(len(rs)), key=lambda i: rs[i])
        window = max(3, len(rs) // 10)
        xs, ys = [], []
        for i in range(0, len(order), window):
            chunk = order[i:i + window]
            xs.append(sum(rs[j] for j in chunk) / len(chunk))
            ys.append(sum(ds[j] for j in chunk) / len(chunk))
        ax.plot(xs, ys, "r-", lw=1.5, label="binned mean")
    ax.set_xlabel("outward radius r")
    ax.set_ylabel("projected diameter")
    ax.set_title("projection of outward balls disjoint from the axis")
    ax.legend()
    fig.tight_layout()
    p = os.path.join(figdir, "projected_diameter.png")
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(report.sandwich_residuals, bins=40, color="steelblue")
    ax.set_xlabel("log residual against the floor-power estimate")
    ax.set_ylabel("count")
    ax.set_title(f"length sandwich residuals (fitted C = {report.sandwich_c:.3g})")
    fig.tight_layout()
    p = os.path.join(figdir, "sandwich_residuals.png")
    fig.savefig(p, dpi=150)
    plt.close(fig)
    paths.append(p)
    return paths
