"""Figure rendering for sweep and reproduction runs.

CSV remains the authoritative artifact; these helpers draw the standard
views (rate vs SNR, optimal parameters vs SNR, rate vs beta) next to it.
All functions write PNG files and never open a window.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "render_sweep",
    "render_rate_vs_snr",
    "render_param_trend",
    "render_rate_vs_beta",
]

_RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 4,
}


def _axes(xlabel: str, ylabel: str, title: str = ""):
    fig, ax = plt.subplots()
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    return fig, ax


def _finish(fig, ax, path: str) -> str:
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def _rate_scale(bits: bool) -> tuple[float, str]:
    if bits:
        return 1.0 / math.log(2.0), "sum rate (bit/s/Hz)"
    return 1.0, "sum rate (nats)"


def render_sweep(rows, path: str, *, bits: bool = False) -> str:
    """Generic sweep view: sum-rate vs SNR, one line per (alpha, beta) cell."""
    with plt.rc_context(_RC):
        scale, ylabel = _rate_scale(bits)
        fig, ax = _axes("SNR (dB)", ylabel)
        cells = sorted({(row["alpha"], row["beta"]) for row in rows
                        if isinstance(row.get("alpha"), float)})
        for alpha, beta in cells:
            pts = [(row["snr_db"], row) for row in rows
                   if row.get("alpha") == alpha and row.get("beta") == beta]
            pts.sort()
            snrs = [p[0] for p in pts]
            de = [p[1]["de_sum_rate"] * scale for p in pts
                  if isinstance(p[1].get("de_sum_rate"), float)]
            label = f"a={alpha:g}, b={beta:g}"
            if len(de) == len(snrs):
                ax.plot(snrs, de, "-", label=f"{label} (analytical)")
            mc = [(p[0], p[1]["mc_sum_rate"] * scale) for p in pts
                  if isinstance(p[1].get("mc_sum_rate"), float)]
            if mc:
                ax.plot([m[0] for m in mc], [m[1] for m in mc], "o",
                        label=f"{label} (simulated)")
        return _finish(fig, ax, path)


def render_rate_vs_snr(curves, path: str, *, bits: bool = False, title: str = "") -> str:
    """curves: list of (label, snr list, rate list, style)."""
    with plt.rc_context(_RC):
        scale, ylabel = _rate_scale(bits)
        fig, ax = _axes("SNR (dB)", ylabel, title)
        for label, snrs, rates, style in curves:
            ax.plot(snrs, [r * scale for r in rates], style, label=label)
        return _finish(fig, ax, path)


def render_param_trend(curves, path: str, *, ylabel: str, logy: bool = False,
                       title: str = "") -> str:
    """curves: list of (label, snr list, value list, style)."""
    with plt.rc_context(_RC):
        fig, ax = _axes("SNR (dB)", ylabel, title)
        if logy:
            ax.set_yscale("log")
        for label, snrs, values, style in curves:
            ax.plot(snrs, values, style, label=label)
        return _finish(fig, ax, path)


def render_rate_vs_beta(curves, path: str, *, bits: bool = False, title: str = "") -> str:
    """curves: list of (label, beta list, rate list, style)."""
    with plt.rc_context(_RC):
        scale, ylabel = _rate_scale(bits)
        fig, ax = _axes("projection control beta", ylabel, title)
        for label, betas, rates, style in curves:
            ax.plot(betas, [r * scale for r in rates], style, label=label)
        return _finish(fig, ax, path)
