"""Mixed states: mixtures, density kernels, Wigner distributions and the Bopp restriction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ComplexField1D, ComplexField2D, GridError, PhaseGrid, PhysConfig, inner_product_2d
from .weyl import KernelMatrix, compose_weyl
from .wigner import _as_window, _check_axis, hermite_state, wavepacket_transform, wigner

__all__ = [
    "PSD_TOL", "MixtureSpec", "DensityMatrix", "density_from_mixture", "wigner_distribution",
    "eigendecompose", "density_bopp_apply", "bopp_density_restrict",
]

PSD_TOL = 1e-8


@dataclass(frozen=True)
class MixtureSpec:
    """Convex combination ``sum_j w_j |psi_j><psi_j|`` of unit-norm states."""

    components: tuple

    def __init__(self, components):
        comps = tuple((float(w), psi) for w, psi in components)
        if not comps:
            raise ValueError("a mixture needs at least one component")
        axis = comps[0][1].axis
        for w, psi in comps:
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError(f"mixture weights must be nonnegative, got {w}")
            if psi.axis != axis:
                raise GridError("mixture states live on different axes")
            if abs(psi.norm() - 1.0) > 1e-10:
                raise ValueError(f"mixture state has norm {psi.norm()!r}, expected 1")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"mixture weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @property
    def axis(self):
        return self.components[0][1].axis

    @property
    def weights(self) -> list[float]:
        return [w for w, _ in self.components]

    @property
    def states(self) -> list[ComplexField1D]:
        return [psi for _, psi in self.components]


@dataclass(frozen=True)
class DensityMatrix:
    kernel: KernelMatrix

    def __post_init__(self):
        K = self.kernel.entries
        dx = self.kernel.axis.delta
        if not self.kernel.is_hermitian(1e-10):
            raise ValueError("density kernel is not Hermitian")
        tr = np.trace(K).real * dx
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"density kernel has trace {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (K + K.conj().T) * dx)[0]
        if lo < -PSD_TOL:
            raise ValueError(f"density kernel is not positive semidefinite (min eigenvalue {lo:.3e})")

    @property
    def trace(self) -> float:
        return float(np.trace(self.kernel.entries).real * self.kernel.axis.delta)


def density_from_mixture(m: MixtureSpec) -> DensityMatrix:
    K = np.zeros((m.axis.n, m.axis.n), dtype=complex)
    for w, psi in m.components:
        K += w * np.outer(psi.values, psi.values.conj())
    return DensityMatrix(KernelMatrix(m.axis, K))


def wigner_distribution(m: MixtureSpec, grid: PhaseGrid) -> ComplexField2D:
    """``rho(z) = sum_j w_j W psi_j(z)``."""
    _check_axis(grid, *m.states)
    out = np.zeros((grid.n, grid.n))
    for w, psi in m.components:
        out += w * wigner(psi, grid).values.real
    return ComplexField2D(grid, out)


def eigendecompose(d: DensityMatrix):
    """Descending eigenvalues and unit-norm eigenstates of the density operator.

    Eigenvalues in ``[-PSD_TOL, 0)`` are reported as zero.
    """
    K = d.kernel.entries
    ax = d.kernel.axis
    if not d.kernel.is_hermitian(1e-10):
        raise ValueError("eigendecompose needs a Hermitian kernel")
    vals, vecs = np.linalg.eigh(0.5 * (K + K.conj().T) * ax.delta)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vals = np.where((vals < 0) & (vals >= -PSD_TOL), 0.0, vals)
    states = [ComplexField1D(ax, vecs[:, i] / math.sqrt(ax.delta)) for i in order]
    return [float(v) for v in vals], states


def density_bopp_apply(m: MixtureSpec, Psi: ComplexField2D) -> ComplexField2D:
    """``rho~ Psi = Op_Bopp(2 pi hbar rho) Psi``."""
    grid = Psi.grid
    rho = wigner_distribution(m, grid)
    return compose_weyl(rho * (2.0 * np.pi * grid.hbar), Psi)


def bopp_density_restrict(m: MixtureSpec, window, K: int, grid: PhaseGrid):
    """Matrix ``M[j, k] = (rho~ U h_j | U h_k)`` on the first ``K`` wavepacket Hermite states.

    Returns ``(M, eigenvalues)`` with eigenvalues in descending order.
    """
    window = _as_window(window)
    if int(K) != K or K < 1:
        raise ValueError(f"basis size must be a positive integer, got {K}")
    cfg = PhysConfig(grid.hbar)
    try:
        basis = [wavepacket_transform(hermite_state(j, grid.x_axis, cfg), window, grid) for j in range(K)]
    except ValueError as exc:
        raise ValueError(f"basis size {K} is too large for this grid: {exc}") from exc
    rho2 = wigner_distribution(m, grid) * (2.0 * np.pi * grid.hbar)
    images = [compose_weyl(rho2, e) for e in basis]
    M = np.array([[inner_product_2d(images[j], basis[k]) for k in range(K)] for j in range(K)])
    vals = np.linalg.eigvalsh(0.5 * (M + M.conj().T))[::-1]
    return M, [float(v) for v in vals]
