"""Static SVG figures: a moment polynomial on [0, 1], or a spectrum with its smallest enclosing disc."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .distance import smallest_enclosing_disc  # noqa: E402
from .polynomials import build, sup_norm  # noqa: E402

# fixed ids and no timestamp, so identical inputs give identical files
plt.rcParams["svg.hashsalt"] = "cmoments"
_SAVE = {"format": "svg", "metadata": {"Date": None}}


def plot_polynomial(k: int, kind, path) -> dict:
    poly = build(k, kind)
    res = sup_norm(poly)
    x = np.linspace(0.0, 1.0, 801)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, poly(x), color="tab:blue", label=f"{poly.kind.value}_{k}")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot([res.argmax], [poly(res.argmax)], "o", color="tab:red",
            label=f"max |{poly.kind.value}_{k}| = {res.value:.6g} at x = {res.argmax:.6g}")
    ax.set_xlabel("x")
    ax.set_xlim(0, 1)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return {"path": str(path), "value": res.value, "argmax": res.argmax}


def plot_spectrum(eigenvalues, path) -> dict:
    ev = np.asarray(eigenvalues, dtype=complex)
    disc = smallest_enclosing_disc(ev)
    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0.0, 2 * np.pi, 361)
    c = disc.center
    ax.plot(c.real + disc.radius * np.cos(t), c.imag + disc.radius * np.sin(t), color="tab:blue",
            label=f"radius {disc.radius:.6g}")
    ax.plot(ev.real, ev.imag, "o", color="tab:red", label="eigenvalues")
    ax.plot([c.real], [c.imag], "+", color="k", ms=10, label="center")
    ax.set_aspect("equal")
    pad = 0.15 * max(disc.radius, 1e-3)
    ax.set_xlim(c.real - disc.radius - pad, c.real + disc.radius + pad)
    ax.set_ylim(c.imag - disc.radius - pad, c.imag + disc.radius + pad)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return {"path": str(path), "center": c, "radius": disc.radius}
