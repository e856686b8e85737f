"""Figure output for trajectories and reports.

Figures are rendered off-screen and written as SVG, so no display is needed.
A fixed hash salt and an empty date stamp keep the files byte-stable.
"""
from __future__ import annotations

from math import sqrt

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

inches_per_pt = 1.0 / 72.27
golden_mean = (sqrt(5.0) - 1.0) / 2.0
fig_width = 360.0 * inches_per_pt
fig_size = [fig_width, fig_width * golden_mean]

RC = {
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "font.family": "serif",
    "figure.figsize": fig_size,
    "lines.linewidth": 1.0,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "svg.hashsalt": "rkkynav",
    "svg.fonttype": "none",
}

MICROWAVE_BAND = (0.3e9, 300e9)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_trajectories(trajs, path, title=None):
    """Overlay ``C_E(t)`` series; time is shown in units of each run's T*."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(constrained_layout=True)
        for tr in trajs:
            scale = tr.meta.get("T") or 1.0
            style = "-" if (tr.epsilon or 0) >= 0 else "--"
            ax.plot(tr.t / scale, tr.c_e, style, label=f"{tr.label}, eps={tr.epsilon:+g}")
            if tr.frozen_time is not None:
                k = np.searchsorted(tr.t, tr.frozen_time)
                ax.plot(tr.frozen_time / scale, tr.c_e[min(k, len(tr.c_e) - 1)], "D", ms=4,
                        color=ax.lines[-1].get_color())
        ax.axhline(0.0, color="0.5", lw=0.6)
        ax.set_xlabel(r"$t / T$")
        ax.set_ylabel(r"$C_E$")
        if title:
            ax.set_title(title, fontsize=9)
        ax.legend(frameon=False, ncol=2)
        return _save(fig, path)


def plot_table(rows, path):
    """Computed against reference periods for the rows that have one.

    ``rows`` holds ``(label, kind, computed, reference)`` tuples.
    """
    pts = [r for r in rows if r[2] is not None and r[3] is not None]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(constrained_layout=True)
        for kind, marker in (("mixed", "o"), ("pure", "s")):
            sel = [r for r in pts if r[1] == kind]
            ax.plot([r[3] for r in sel], [r[2] for r in sel], marker, ls="none", ms=4,
                    mfc="none", label=kind)
        hi = max([r[3] for r in pts] + [1.0]) * 1.05
        ax.plot([0, hi], [0, hi], color="0.5", lw=0.6)
        ax.set_xlabel(r"reference $T^*$")
        ax.set_ylabel(r"computed $T^*$")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_frequency(tstar, path, j0_range_ev=(1e-7, 1e-2), marker=None):
    """``f = |J0| / (hbar T*)`` against ``|J0|`` with the microwave band shaded."""
    from .cli import frequency_hz

    j0 = np.logspace(np.log10(j0_range_ev[0]), np.log10(j0_range_ev[1]), 200)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(constrained_layout=True)
        ax.axhspan(*MICROWAVE_BAND, color="0.85", label="microwave")
        ax.loglog(j0, frequency_hz(j0, tstar), label=f"T* = {tstar:g}")
        if marker is not None:
            ax.loglog([marker[0]], [marker[1]], "o", ms=4)
        ax.set_xlabel(r"$|J_0|$ (eV)")
        ax.set_ylabel(r"$f$ (Hz)")
        ax.legend(frameon=False)
        return _save(fig, path)
