"""Figures written next to the CSV outputs (PNG, Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .classical import closed_form_branches  # noqa: E402
from .params import Regime  # noqa: E402

# Fixed metadata keeps repeated runs byte-identical.
_SAVE = dict(dpi=120, metadata={"Software": None})


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def trajectory_figures(traj, out_dir) -> list[Path]:
    """q(t) and p(t): the two raw closed-form branches (solid), undeformed motion (dashed)."""
    params = traj.params
    t = traj.times
    w = params.omega
    paths = []
    for name, values, free in (("q", traj.q, np.cos(w * t)), ("p", traj.p, -w * np.sin(w * t))):
        fig, ax = plt.subplots(figsize=(6, 4))
        if name == "q" and params.regime is Regime.OSCILLATORY:
            plus, minus = closed_form_branches(params, t)
            ax.plot(t, plus, "-", lw=1.0, color="C0", label="Snyder, + branch")
            ax.plot(t, minus, "-", lw=1.0, color="C1", label="Snyder, - branch")
        else:
            ax.plot(t, values, "-", lw=1.0, color="C0", label=f"Snyder {name}(t)")
            if params.regime is Regime.OSCILLATORY:
                ax.plot(t, -values, "-", lw=1.0, color="C1", label="Snyder, - branch")
        ax.plot(t, free, "--", lw=1.0, color="k", label="undeformed")
        ax.set_xlabel("t")
        ax.set_ylabel(name)
        ax.set_ylim(-1.6 * max(1.0, np.max(np.abs(values))), 1.6 * max(1.0, np.max(np.abs(values))))
        ax.legend(loc="upper right", fontsize=8)
        paths.append(_save(fig, Path(out_dir) / f"trajectory_{name}.png"))
    return paths


def harmonics_figure(spectrum, rows, out_path) -> Path:
    k = np.array([r.k for r in rows])
    measured = np.abs([r.measured for r in rows])
    predicted = np.abs([r.perturbative for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(k, np.where(measured > 0, measured, np.nan), "o", label="measured")
    ax.semilogy(k, np.where(predicted > 0, predicted, np.nan), "x", label="first-order series")
    ax.set_xlabel("harmonic k")
    ax.set_ylabel(f"|coefficient of {spectrum.component}|")
    ax.legend()
    return _save(fig, out_path)


def levels_figure(energies, reference, out_path, label="computed", ref_label="w~ (n + 1/2)") -> Path:
    n = np.arange(len(energies))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(n, energies, "o", label=label)
    ax.plot(n, reference, "x", label=ref_label)
    ax.set_xlabel("n")
    ax.set_ylabel("energy")
    ax.legend()
    return _save(fig, out_path)
