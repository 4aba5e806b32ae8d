"""Figure rendering for scan profiles and zeta sweeps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def scan_figure(path, lams, sigmas, enclosures=()):
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.semilogy(lams, np.maximum(sigmas, 1e-18), lw=0.9, color="tab:blue")
    for e in enclosures:
        ax.axvline(e.lam_point, color="tab:red", lw=0.6, alpha=0.6)
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\sigma_1(B_\lambda, C_\lambda)$")
    ax.set_title("smallest generalized singular value")
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def zeta_figure(path, s_vals, values):
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(s_vals, values, lw=1.2, color="tab:green")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("s")
    ax.set_ylabel(r"$\zeta_\Delta(s)$")
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
