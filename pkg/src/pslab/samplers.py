"""Smooth localized test data: Gaussian symbols and random Gaussian sums."""
from __future__ import annotations

import math

import numpy as np

from .grid import ComplexField1D, ComplexField2D, PhaseGrid

__all__ = ["gaussian_symbol", "random_symbol", "random_state", "flat_window", "coherent_mixture"]


def gaussian_symbol(grid: PhaseGrid, x0=0.0, p0=0.0, width=1.0, tilt=0.0) -> ComplexField2D:
    """``exp(-((x-x0)^2 + (p-p0)^2)/(2 w^2 hbar)) * (1 + i tilt x)``."""
    s2 = 2.0 * width ** 2 * grid.hbar
    return grid.sample(lambda X, P: np.exp(-((X - x0) ** 2 + (P - p0) ** 2) / s2) * (1 + 1j * tilt * X))


def random_symbol(grid: PhaseGrid, rng: np.random.Generator, terms: int = 3, real: bool = False,
                  spread: float = 0.15, nonneg: bool = False) -> ComplexField2D:
    """Sum of ``terms`` Gaussians with random centres, widths and coefficients.

    Centres lie within ``spread`` times the half widths and widths are of
    order ``sqrt(hbar)``, so the result is well resolved on the grid.
    """
    Lx = grid.x_axis.half_width
    Lp = grid.p_axis.half_width
    X, P = grid.mesh()
    out = np.zeros(X.shape, dtype=complex)
    h = math.sqrt(grid.hbar)
    for _ in range(terms):
        cx, cp = rng.uniform(-spread, spread) * Lx, rng.uniform(-spread, spread) * Lp
        wx, wp = rng.uniform(0.6, 1.0) * h, rng.uniform(0.6, 1.0) * h
        if nonneg:
            c = rng.uniform(0.2, 1.0)
        elif real:
            c = rng.normal()
        else:
            c = rng.normal() + 1j * rng.normal()
        out += c * np.exp(-0.5 * (((X - cx) / wx) ** 2 + ((P - cp) / wp) ** 2))
    return ComplexField2D(grid, out)


def random_state(grid: PhaseGrid, rng: np.random.Generator, terms: int = 3) -> ComplexField1D:
    """Unit-norm sum of random coherent-like packets near the origin."""
    x = grid.x
    h = math.sqrt(grid.hbar)
    v = np.zeros(grid.n, dtype=complex)
    for _ in range(terms):
        c = rng.normal() + 1j * rng.normal()
        x0 = rng.uniform(-1.5, 1.5) * h
        p0 = rng.uniform(-1.5, 1.5) * h
        v += c * np.exp(-0.5 * (x - x0) ** 2 / grid.hbar + 1j * p0 * x / grid.hbar)
    psi = ComplexField1D(grid.x_axis, v)
    return psi / psi.norm()


def flat_window(grid: PhaseGrid, frac: float = 0.8, power: int = 16) -> np.ndarray:
    """Super-Gaussian ``exp(-(r^2/w^2)^(power/2))`` with ``w = frac * L``.

    Equal to 1 within ~1e-7 over the central quarter of the grid and
    negligible at the edges, so polynomial symbols can be sampled without
    boundary wraparound.
    """
    X, P = grid.mesh()
    w = frac * min(grid.x_axis.half_width, grid.p_axis.half_width)
    return np.exp(-((X ** 2 + P ** 2) / w ** 2) ** (power // 2))


def coherent_mixture(grid: PhaseGrid, nbar: float = 3.0, spacing: float = 0.5, reach: float = 4.0):
    """Coherent states on a square lattice with Gaussian weights.

    The lattice step is ``spacing * sqrt(hbar)``; weights fall off with
    variance ``hbar * nbar`` out to ``reach`` standard deviations.  The
    resulting Wigner distribution is a smooth Gaussian of variance
    ``hbar (nbar + 1/2)`` per axis, like a thermal state, but every
    component is a displaced ground state.
    """
    from .density import MixtureSpec
    from .grid import PhysConfig
    from .wigner import hermite_state, hw_displace

    h0 = hermite_state(0, grid.x_axis, PhysConfig(grid.hbar))
    s = math.sqrt(grid.hbar * nbar)
    d = spacing * math.sqrt(grid.hbar)
    k = int(math.ceil(reach * s / d))
    centres = np.arange(-k, k + 1) * d
    comps = []
    for x0 in centres:
        for p0 in centres:
            w = math.exp(-(x0 * x0 + p0 * p0) / (2 * s * s))
            if w < math.exp(-0.5 * reach ** 2):
                continue
            psi = hw_displace((x0, p0), h0, grid.hbar)
            comps.append((w, psi / psi.norm()))
    total = sum(w for w, _ in comps)
    return MixtureSpec([(w / total, psi) for w, psi in comps])
