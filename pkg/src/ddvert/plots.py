"""Render benchmark and solve reports as figures next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

BACKEND_STYLE = {
    "offline": dict(color="tab:blue", marker="o"),
    "box": dict(color="tab:orange", marker="s"),
    "cone": dict(color="tab:green", marker="^"),
}


def plot_ve_times(summary_rows, path, title=None):
    """Mean vertex-enumeration time per iteration, one curve per backend."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    backends = sorted({row["backend"] for row in summary_rows})
    for name in backends:
        pts = [
            (row["iteration"], row["mean_ve_time_s"])
            for row in summary_rows
            if row["backend"] == name and row["iteration"] > 0
        ]
        if not pts:
            continue
        xs, ys = zip(*sorted(pts))
        style = BACKEND_STYLE.get(name, {})
        ax.plot(xs, ys, label=name, markersize=3.5, linewidth=1.2, **style)
    ax.set_xlabel("iteration")
    ax.set_ylabel("mean VE time [s]")
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_artificial_share(table_rows, path, title=None):
    """Percentage of artificial (box) vertices per iteration."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if table_rows:
        xs = [row[0] for row in table_rows]
        ax.plot(xs, [row[3] for row in table_rows], color="tab:red", marker="o",
                markersize=3.5, linewidth=1.2, label="% artificial")
        ax.plot(xs, [100.0 * row[1] / (row[1] + row[2]) if row[1] + row[2] else 0.0
                     for row in table_rows],
                color="tab:gray", linestyle="--", linewidth=1.0, label="% actual")
    ax.set_xlabel("iteration")
    ax.set_ylabel("share of box vertices [%]")
    ax.set_ylim(0, 100)
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_alpha_decay(iteration_records, path, title=None):
    """Scalarization distance of the processed vertex per cut."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    pts = [
        (rec.iteration, rec.alpha)
        for rec in iteration_records
        if rec.cut is not None
    ]
    if pts:
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, color="tab:purple", marker="o", markersize=3.0, linewidth=1.0)
        ax.set_yscale("log")
    ax.set_xlabel("cut")
    ax.set_ylabel("alpha of the processed vertex")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
