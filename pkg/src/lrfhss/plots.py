"""SVG figures for sweep results: mean lines with a shaded min/max band."""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .analytic import analytic_rows  # noqa: E402

__all__ = ["emit_plots"]


def _series(steps, P, metric, x="F"):
    rows = sorted((s for s in steps if s["P"] == P), key=lambda s: s["F"])
    xs = np.array([s["F"] * (P if x == "fragments" else 1) for s in rows], dtype=float)
    mean = np.array([s[metric] for s in rows], dtype=float)
    lo = np.array([s[f"{metric}_min"] for s in rows], dtype=float)
    hi = np.array([s[f"{metric}_max"] for s in rows], dtype=float)
    return xs, mean, lo, hi


def _band(ax, xs, mean, lo, hi, label, color, ls="-", marker=None):
    if len(xs) == 1:
        marker = marker or "o"
    ax.plot(xs, mean, ls, color=color, label=label, marker=marker)
    ax.fill_between(xs, lo, hi, color=color, alpha=0.25, linewidth=0)


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return os.fspath(path)


def emit_plots(records: Sequence, path_prefix: str | os.PathLike) -> list[str]:
    """Write ``<prefix>_analytic.svg``, ``_detection.svg``, ``_extraction.svg`` and ``_time.svg``."""
    from .harness import aggregate

    ok = [r for r in records if r.ok]
    if not ok:
        raise ValueError("no successful runs to plot")
    steps = aggregate(ok)
    Ps = sorted({s["P"] for s in steps})
    Fs = sorted({s["F"] for s in steps})
    C, T = ok[0].C, ok[0].T_slots
    cells = C * T
    colors = {P: plt.cm.viridis(i / max(1, len(Ps) - 1) * 0.9) for i, P in enumerate(Ps)}
    prefix = os.fspath(path_prefix)
    out = []

    # analytic header / payload / frame reception
    n_tx = np.unique(np.concatenate([[0], np.linspace(0, max(Fs) if max(Fs) > 0 else 1, 60).round()])).astype(int)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for ax, config in zip(axes, ("fast", "robust")):
        rows = analytic_rows(n_tx, Ps, (config,), C, T)
        for P in Ps:
            sel = [r for r in rows if r["P"] == P]
            x = [r["n_tx"] for r in sel]
            ax.plot(x, [r["p_hdr"] for r in sel], ":", color=colors[P])
            ax.plot(x, [r["p_pld"] for r in sel], "--", color=colors[P])
            ax.plot(x, [r["p_frame"] for r in sel], "-", color=colors[P], label=f"P={P}")
        ax.set_title(f"{config}: header (dotted), payload (dashed), frame (solid)", fontsize=9)
        ax.set_xlabel("frame transmissions")
        ax.set_ylim(-0.02, 1.02)
    axes[0].set_ylabel("reception probability")
    axes[1].legend(fontsize=8)
    out.append(_finish(fig, f"{prefix}_analytic.svg"))

    # detection: TP/FP/FN, F1, occupancy vs frames and vs fragments
    fig, axes = plt.subplots(3, 2, figsize=(11, 11))
    for col, x in enumerate(("F", "fragments")):
        for P in Ps:
            for metric, ls in (("tp", "-"), ("fp", "--"), ("fn", ":")):
                xs, m, lo, hi = _series(steps, P, metric, x)
                _band(axes[0, col], xs, m, lo, hi, f"{metric.upper()} P={P}", colors[P], ls)
            for row, metric in ((1, "f1"), (2, "occupancy")):
                xs, m, lo, hi = _series(steps, P, metric, x)
                _band(axes[row, col], xs, m, lo, hi, f"P={P}", colors[P])
            if col == 0:
                for ax in axes[:, 0]:
                    ax.axvline(cells / P, color=colors[P], lw=0.6, alpha=0.6)
        if col == 1:
            for ax in axes[:, 1]:
                ax.set_xscale("log")
                ax.axvline(cells, color="k", lw=0.8)
        xlabel = "frame transmissions" if x == "F" else "total fragment count"
        for ax in axes[:, col]:
            ax.set_xlabel(xlabel)
    axes[0, 0].set_ylabel("count")
    axes[0, 0].set_yscale("symlog")
    axes[0, 1].set_yscale("symlog")
    axes[1, 0].set_ylabel("F1")
    axes[2, 0].set_ylabel("occupancy of M")
    axes[0, 0].legend(fontsize=6, ncol=2)
    out.append(_finish(fig, f"{prefix}_detection.svg"))

    # extraction: headerless simulation vs headerfull model
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for ax, config in zip(axes, ("fast", "robust")):
        for P in Ps:
            xs, m, lo, hi = _series(steps, P, f"extraction_{config}")
            _band(ax, xs, m, lo, hi, f"headerless P={P}", colors[P])
            xs, m, _, _ = _series(steps, P, f"headerfull_{config}")
            ax.plot(xs, m, "--", color=colors[P], label=f"headerfull P={P}")
        ax.set_title(config)
        ax.set_xlabel("frame transmissions")
    axes[0].set_ylabel("extraction rate")
    axes[1].legend(fontsize=7)
    out.append(_finish(fig, f"{prefix}_extraction.svg"))

    # decode time
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    for col, x in enumerate(("F", "fragments")):
        for P in Ps:
            xs, m, lo, hi = _series(steps, P, "decode_time_s", x)
            _band(axes[col], xs, m, lo, hi, f"P={P}", colors[P])
        axes[col].set_xlabel("frame transmissions" if x == "F" else "total fragment count")
    axes[1].set_xscale("log")
    axes[0].set_ylabel(f"decode time (s), {ok[0].decoder}")
    axes[0].legend(fontsize=8)
    out.append(_finish(fig, f"{prefix}_time.svg"))
    return out
