"""SVG figures for the CLI. Decoration only: nothing downstream reads them."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed hash salt keeps the SVG ids stable between runs
matplotlib.rcParams["svg.hashsalt"] = "pifilter"
matplotlib.rcParams["svg.fonttype"] = "none"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_s21(path, freqs, s21, label="S21"):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(np.asarray(freqs) / 1e9, 20 * np.log10(np.maximum(np.abs(s21), 1e-300)), lw=1, label=label)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("|S21| (dB)")
    ax.grid(alpha=0.3)
    _save(fig, path)


def plot_purcell(path, curves, threshold=None):
    """``curves``: iterable of :class:`~pifilter.purcell.PurcellCurve`."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for c in curves:
        ax.semilogy(c.frequency / 1e9, c.t_p, lw=1, label=c.node)
    if threshold:
        ax.axhline(threshold, color="k", ls=":", lw=0.8)
    ax.set_xlabel("qubit frequency (GHz)")
    ax.set_ylabel("T_P (s)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def plot_sweep(path, sweep):
    fig, ax = plt.subplots(figsize=(6, 4))
    f = sweep.frequency / 1e9
    if len(sweep.values) > 1:
        mesh = ax.pcolormesh(f, sweep.values, np.log10(sweep.t_p), shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="log10 T_P (s)")
        for seg in sweep.contours:
            ax.plot(seg[:, 1] / 1e9, seg[:, 0], color="w", lw=1)
        ax.set_ylabel(sweep.param)
    else:
        ax.semilogy(f, sweep.t_p[0], lw=1)
        ax.set_ylabel("T_P (s)")
    ax.set_xlabel("frequency (GHz)")
    _save(fig, path)


def plot_interference(path, freqs, ratio):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(np.asarray(freqs) / 1e9, ratio, lw=1)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("Gamma_P / Gamma_0")
    ax.grid(alpha=0.3)
    _save(fig, path)
