"""Figure rendering for benchmark output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import FrcCurve


def save_frc_plot(curve: FrcCurve, path, title: str | None = None,
                  ylim: tuple[float, float] | None = None) -> None:
    """Render an FRC curve to an image file (format from the extension)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(curve.freq, curve.corr, marker=".", lw=1.2)
    if np.any(curve.degenerate):
        ax.plot(curve.freq[curve.degenerate], curve.corr[curve.degenerate],
                "x", color="crimson", label="degenerate ring")
        ax.legend(loc="best")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("spatial frequency (cycles/pixel)")
    ax.set_ylabel("ring correlation")
    ax.set_xlim(0.0, 0.5)
    if ylim is not None:
        ax.set_ylim(*ylim)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_mse_bars(labels: list[str], values: list[float], path,
                  title: str | None = None,
                  reference: list[float] | None = None,
                  reference_label: str = "reference") -> None:
    """Bar chart comparing MSE across named runs (used by the sweep script).

    When ``reference`` is given (same length as ``values``), the two series
    are drawn side by side, e.g. measured results next to target numbers.
    """
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(labels) + 2.0), 4.0))
    x = np.arange(len(labels))
    if reference is None:
        ax.bar(x, values, width=0.6)
        for xi, v in zip(x, values):
            ax.annotate(f"{v:.1f}", (xi, v), ha="center", va="bottom", fontsize=8)
    else:
        if len(reference) != len(values):
            raise ValueError("reference series length must match values")
        ax.bar(x - 0.2, values, width=0.4, label="measured")
        ax.bar(x + 0.2, reference, width=0.4, label=reference_label)
        ax.legend(loc="best")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("MSE")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
