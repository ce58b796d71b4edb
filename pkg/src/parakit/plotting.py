"""Figure rendering for the command-line reports.

Every report subcommand can write a static figure next to its delimited
output.  All rendering goes through the Agg backend so runs are headless;
figures are presentation artifacts and carry no data not already present
in the CSV/JSON files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def spectrum_figure(eigenvalues, parity_labels, path):
    """Level diagram colored by parity sector."""
    fig, ax = plt.subplots(figsize=(5, 4))
    colors = ["tab:blue", "tab:orange", "tab:green"]
    seen = set()
    for idx, (e, p) in enumerate(zip(eigenvalues, parity_labels)):
        label = f"parity $\\omega^{p}$" if p not in seen else None
        seen.add(p)
        ax.hlines(e, idx - 0.35, idx + 0.35, color=colors[p % 3], label=label)
    ax.set_xlabel("level index")
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    return _save(fig, path)


def comparison_figure(rows, path):
    """Exact ground-triplet splittings (solid) against the closed forms (dotted)."""
    f = [r.f for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    colors = ["tab:blue", "tab:orange", "tab:green"]
    for level in range(3):
        ax.plot(f, [r.exact[level] for r in rows], color=colors[level],
                label=f"exact, parity $\\omega^{level}$")
        ax.plot(f, [r.perturbative[level] for r in rows], ":", color=colors[level])
    ax.set_xlabel("flip coupling f")
    ax.set_ylabel("splitting (centroid removed)")
    ax.legend(fontsize=8)
    return _save(fig, path)


def sample_figures(records, magnitude_path, phase_path):
    """Magnitude-simplex and phase-plane scatter plots colored by the score."""
    beta2 = np.array([r.beta**2 for r in records])
    gamma2 = np.array([r.gamma**2 for r in records])
    score = np.array([r.score_m for r in records])
    fig, ax = plt.subplots(figsize=(5, 4.4))
    sc = ax.scatter(beta2, gamma2, c=score, s=3, cmap="viridis", rasterized=True)
    ax.plot([0, 1], [1, 0], "k-", lw=0.8)
    ax.set_xlabel(r"$|\langle 1|\psi\rangle|^2$")
    ax.set_ylabel(r"$|\langle 2|\psi\rangle|^2$")
    fig.colorbar(sc, ax=ax, label="max phase-point expectation")
    mag = _save(fig, magnitude_path)

    d1 = np.array([r.delta1 for r in records])
    d2 = np.array([r.delta2 for r in records])
    fig, ax = plt.subplots(figsize=(5, 4.4))
    sc = ax.scatter(d1, d2, c=score, s=3, cmap="viridis", rasterized=True)
    ax.set_xlabel(r"$\delta_1$")
    ax.set_ylabel(r"$\delta_2$")
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(0, 2 * np.pi)
    fig.colorbar(sc, ax=ax, label="max phase-point expectation")
    ph = _save(fig, phase_path)
    return mag, ph


def near_strange_figure(records, strange_coords, path, dmax=0.2):
    """States within dmax trace distance of any strange state, plus the targets."""
    fig, ax = plt.subplots(figsize=(5, 4.4))
    close = [r for r in records if min(r.dist) <= dmax]
    if close:
        b2 = [r.beta**2 for r in close]
        g2 = [r.gamma**2 for r in close]
        score = [r.score_m for r in close]
        sc = ax.scatter(b2, g2, c=score, s=8, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="max phase-point expectation")
    for label, (b2, g2) in strange_coords.items():
        ax.plot(b2, g2, "r*", markersize=12)
        ax.annotate(label, (b2, g2), textcoords="offset points", xytext=(6, 4))
    ax.plot([0, 1], [1, 0], "k-", lw=0.8)
    ax.set_xlabel(r"$|\langle 1|\psi\rangle|^2$")
    ax.set_ylabel(r"$|\langle 2|\psi\rangle|^2$")
    ax.set_title(f"samples within trace distance {dmax}")
    return _save(fig, path)


def trajectory_figure(times, populations, path):
    """Level populations along a propagated evolution."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for level in range(populations.shape[1]):
        ax.plot(times, populations[:, level], label=f"$|{level}\\rangle$")
    ax.set_xlabel("time")
    ax.set_ylabel("population")
    ax.legend(fontsize=8)
    return _save(fig, path)


def berry_figure(report, path):
    """Numeric-versus-closed Berry phase across the duration ladder."""
    fig, ax = plt.subplots(figsize=(5, 4))
    durations = [entry["duration"] for entry in report["ladder"]]
    residuals = [entry["residual"] for entry in report["ladder"]]
    ax.loglog(durations, residuals, "o-")
    ax.set_xlabel("loop duration")
    ax.set_ylabel("|numeric - closed| (wrapped)")
    ax.set_title(f"closed form: {report['gamma_closed']:.6f} rad")
    return _save(fig, path)
