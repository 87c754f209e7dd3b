"""Figure rendering for CLI reports; everything draws to files via Agg."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_DPI = 150


def fi_figure(rows: list[tuple[float, float]], path: str, title: str = "f-I curve") -> None:
    """Plots firing rate against injected current."""
    currents = [row[0] for row in rows]
    rates = [row[1] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(currents, rates, marker="o", markersize=3)
    ax.set_xlabel("input current")
    ax.set_ylabel("firing rate (Hz)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def progress_figure(means: list[float], sds: list[float], path: str) -> None:
    """Plots the mean best-fitness curve with a one-sd band."""
    generations = list(range(1, len(means) + 1))
    lower = [m - s for m, s in zip(means, sds)]
    upper = [m + s for m, s in zip(means, sds)]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(generations, means, color="tab:blue", label="mean best fitness")
    ax.fill_between(generations, lower, upper, color="tab:blue", alpha=0.2, label="±1 sd")
    ax.set_xlabel("generation")
    ax.set_ylabel("best fitness (steps)")
    ax.set_title("fitness progress")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def trajectory_figure(
    rows: list[tuple[int, float, float, float, float, float]], path: str
) -> None:
    """Plots cart position, pole angle and applied force over an episode."""
    steps = [row[0] for row in rows]
    xs = [row[1] for row in rows]
    thetas = [math.degrees(row[3]) for row in rows]
    forces = [row[5] for row in rows]
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    axes[0].plot(steps, xs, color="tab:blue")
    axes[0].set_ylabel("cart position (m)")
    axes[1].plot(steps, thetas, color="tab:orange")
    axes[1].set_ylabel("pole angle (deg)")
    axes[2].plot(steps, forces, color="tab:green", linewidth=0.7)
    axes[2].set_ylabel("force (N)")
    axes[2].set_xlabel("step")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


__all__ = ["fi_figure", "progress_figure", "trajectory_figure"]
