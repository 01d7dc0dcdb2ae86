"""Static figures for CLI reports (matplotlib, non-interactive backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamp so that repeated runs write identical files
matplotlib.rcParams["svg.hashsalt"] = "holder"
matplotlib.rcParams["svg.fonttype"] = "none"

_META = {"svg": {"Date": None}, "png": {"Software": None}, "pdf": {"CreationDate": None}}


def _save(fig, path) -> None:
    suffix = str(path).rsplit(".", 1)[-1].lower()
    fig.savefig(path, metadata=_META.get(suffix))
    plt.close(fig)


def _positive(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    return x[keep], y[keep]


def plot_profiles(profiles: dict, path, title: str = "") -> None:
    """Log-log plot of named profiles, each a ``(scales, values)`` pair.

    Zero values cannot be shown on log axes and are dropped from the curves.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    drawn = False
    for name, (x, y) in profiles.items():
        x, y = _positive(x, y)
        if x.size:
            ax.loglog(x, y, marker="o", ms=3, label=name)
            drawn = True
    ax.set_xlabel("scale")
    ax.set_ylabel("weighted oscillation")
    if title:
        ax.set_title(title)
    if drawn:
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "all profile values are zero", ha="center", transform=ax.transAxes)
    fig.tight_layout()
    _save(fig, path)


def plot_convergence(rows, path, parameter: str = "parameter", title: str = "") -> None:
    """Seminorm and sup errors against the sweep parameter."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows:
        p = np.array([r[0] for r in rows], dtype=float)
        for col, name in ((1, "seminorm error"), (2, "sup error")):
            y = np.array([r[col] for r in rows], dtype=float)
            ax.plot(p, y, marker="o", ms=3, label=name)
        if np.all(p > 0):
            ax.set_xscale("log")
        ys = np.array([[r[1], r[2]] for r in rows], dtype=float)
        if np.all(ys > 0):
            ax.set_yscale("log")
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "empty sweep", ha="center", transform=ax.transAxes)
    ax.set_xlabel(parameter)
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
