"""Cross-Wigner transform, wavepacket transforms and related phase-space maps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    Axis, ComplexField1D, ComplexField2D, GridError, PhaseGrid, PhysConfig,
    cdft, half_dft, icdft, inner_product_1d, interp_matrix, spectral_shift,
)

__all__ = [
    "Window", "hermite_state", "cross_wigner", "wigner", "wavepacket_transform",
    "wavepacket_adjoint", "marginal_position", "marginal_momentum",
    "momentum_density", "hw_displace", "stft", "stft_relation_check",
    "cross_wigner_at",
]

BOUNDARY_TOL = 1e-10


def hermite_state(k: int, axis: Axis, cfg: PhysConfig = PhysConfig()) -> ComplexField1D:
    """Normalized oscillator eigenfunction ``h_k`` for ``hbar = cfg.hbar``.

    Uses the three-term recurrence on normalized functions, which stays
    finite for large ``k`` where ``H_k`` itself overflows.

    Raises
    ------
    ValueError
        If ``k`` is negative or ``h_k`` is not negligible at the axis ends.
    """
    if int(k) != k or k < 0:
        raise ValueError(f"Hermite index must be a nonnegative integer, got {k}")
    hbar = cfg.hbar
    xi = axis.points / math.sqrt(hbar)
    prev = np.zeros_like(xi)
    cur = (math.pi * hbar) ** -0.25 * np.exp(-0.5 * xi ** 2)
    for j in range(k):
        prev, cur = cur, math.sqrt(2.0 / (j + 1)) * xi * cur - math.sqrt(j / (j + 1)) * prev
    edge = max(abs(cur[0]), abs(cur[-1]))
    if edge > BOUNDARY_TOL:
        raise ValueError(
            f"h_{k} does not decay on this axis (boundary value {edge:.2e} > {BOUNDARY_TOL:g})")
    return ComplexField1D(axis, cur.astype(complex))


@dataclass(frozen=True)
class Window:
    """Unit-norm window state defining a wavepacket transform."""

    phi: ComplexField1D

    def __post_init__(self):
        nrm = self.phi.norm()
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"window must have unit norm, got {nrm!r}")


def _lag_products(psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``f[j, m] = psi[j+s] * conj(phi[j-s])`` with ``s = m - n/2``; zero off-grid."""
    n = psi.shape[0]
    j = np.arange(n)[:, None]
    s = np.arange(n)[None, :] - n // 2
    a = j + s
    b = j - s
    ok = (a >= 0) & (a < n) & (b >= 0) & (b < n)
    f = np.zeros((n, n), dtype=complex)
    f[ok] = psi[a[ok]] * np.conj(phi[b[ok]])
    return f


def _check_axis(grid: PhaseGrid, *fields: ComplexField1D):
    for f in fields:
        if f.axis != grid.x_axis:
            raise GridError("state axis does not match the phase grid")


def cross_wigner(psi: ComplexField1D, phi: ComplexField1D, grid: PhaseGrid) -> ComplexField2D:
    """``W(psi, phi)(x, p) = (2 pi hbar)^-1 int exp(-i p y/hbar) psi(x+y/2) conj(phi(x-y/2)) dy``.

    The lag ``y`` runs over a ``2*dx`` grid so both arguments are grid nodes,
    and each x-row is one centered FFT.
    """
    _check_axis(grid, psi, phi)
    f = _lag_products(psi.values, phi.values)
    w = cdft(f, axis=1) * (2.0 * grid.dx / (2.0 * np.pi * grid.hbar))
    return ComplexField2D(grid, w)


def wigner(psi: ComplexField1D, grid: PhaseGrid) -> ComplexField2D:
    w = cross_wigner(psi, psi, grid)
    return ComplexField2D(grid, w.values.real.astype(complex))


def _as_window(window) -> Window:
    return window if isinstance(window, Window) else Window(window)


def wavepacket_transform(psi: ComplexField1D, window, grid: PhaseGrid) -> ComplexField2D:
    """``U_phi psi = sqrt(2 pi hbar) * W(psi, phi)``."""
    window = _as_window(window)
    return cross_wigner(psi, window.phi, grid) * math.sqrt(2.0 * np.pi * grid.hbar)


def wavepacket_adjoint(Psi: ComplexField2D, window, grid: PhaseGrid | None = None) -> ComplexField1D:
    """Adjoint of :func:`wavepacket_transform` for the discrete inner products."""
    window = _as_window(window)
    grid = Psi.grid if grid is None else grid
    if Psi.grid != grid:
        raise GridError("grid mismatch")
    _check_axis(grid, window.phi)
    n = grid.n
    c = math.sqrt(2.0 * np.pi * grid.hbar)
    beta = 2.0 * grid.dx / (2.0 * np.pi * grid.hbar)
    G = icdft(Psi.values, axis=1) * n
    j = np.arange(n)[:, None]
    s = np.arange(n)[None, :] - n // 2
    a = j + s
    b = j - s
    ok = (a >= 0) & (a < n) & (b >= 0) & (b < n)
    contrib = G[ok] * window.phi.values[b[ok]]
    out = np.bincount(a[ok], weights=contrib.real, minlength=n) \
        + 1j * np.bincount(a[ok], weights=contrib.imag, minlength=n)
    out *= c * beta * grid.cell / grid.dx
    return ComplexField1D(grid.x_axis, out)


def marginal_position(W: ComplexField2D) -> np.ndarray:
    """``int W(x, p) dp`` for each grid x."""
    return W.values.real.sum(axis=1) * W.grid.dp


def marginal_momentum(W: ComplexField2D) -> np.ndarray:
    """``int W(x, p) dx`` for each grid p."""
    return W.values.real.sum(axis=0) * W.grid.dx


def momentum_density(psi: ComplexField1D, grid: PhaseGrid) -> np.ndarray:
    """``|psi_hat(p)|^2`` on the grid momenta, by zero-padded FFT."""
    _check_axis(grid, psi)
    amp = half_dft(psi.values, sign=-1) * grid.dx / math.sqrt(2.0 * np.pi * grid.hbar)
    return np.abs(amp) ** 2


def hw_displace(z0, psi: ComplexField1D, hbar: float = 1.0) -> ComplexField1D:
    """Heisenberg-Weyl displacement ``exp(i(p0 x - p0 x0/2)/hbar) psi(x - x0)``."""
    x0, p0 = (float(v) for v in z0)
    ax = psi.axis
    shifted = spectral_shift(psi.values, ax.delta, x0)
    x = ax.points
    return ComplexField1D(ax, np.exp(1j * (p0 * x - 0.5 * p0 * x0) / hbar) * shifted)


def cross_wigner_at(psi: ComplexField1D, phi: ComplexField1D, grid: PhaseGrid, xs, ps) -> np.ndarray:
    """``W(psi, phi)`` on the tensor grid ``xs x ps`` by trigonometric interpolation."""
    W = cross_wigner(psi, phi, grid).values
    Mx = interp_matrix(grid.x_axis, xs)
    Mp = interp_matrix(grid.p_axis, ps)
    return Mx @ W @ Mp.T


def stft(psi: ComplexField1D, window, grid: PhaseGrid) -> ComplexField2D:
    """Gabor transform ``V_phi psi(x, p) = int exp(-2i pi p x') psi(x') conj(phi(x' - x)) dx'``."""
    window = _as_window(window)
    _check_axis(grid, psi, window.phi)
    n = grid.n
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    idx = m - j + n // 2
    ok = (idx >= 0) & (idx < n)
    g = np.zeros((n, n), dtype=complex)
    g[ok] = np.broadcast_to(psi.values[None, :], (n, n))[ok] * np.conj(window.phi.values[idx[ok]])
    E = np.exp(-2j * np.pi * np.outer(grid.x, grid.p))  # [m, k]
    return ComplexField2D(grid, (g @ E) * grid.dx)


def stft_relation_check(psi: ComplexField1D, window, grid: PhaseGrid) -> float:
    """Sup-norm residual of ``V_phi psi(z) = (1/2) exp(-i pi p x) W(psi, phi^-)(z/2)``.

    Only meaningful for ``hbar = 1/(2 pi)``.
    """
    if not math.isclose(grid.hbar, 1.0 / (2.0 * np.pi), rel_tol=1e-12):
        raise ValueError("the Gabor relation requires hbar = 1/(2 pi)")
    window = _as_window(window)
    lhs = stft(psi, window, grid).values
    phi_minus = ComplexField1D(grid.x_axis, _reflect(window.phi.values))
    X, P = grid.mesh()
    Whalf = cross_wigner_at(psi, phi_minus, grid, 0.5 * grid.x, 0.5 * grid.p)
    rhs = 0.5 * np.exp(-1j * np.pi * P * X) * Whalf
    return float(np.max(np.abs(lhs - rhs)))


def _reflect(values: np.ndarray) -> np.ndarray:
    """Samples of ``f(-x)``: index ``j`` maps to ``n - j`` (mod n)."""
    n = values.shape[0]
    return values[(-np.arange(n)) % n]


def state_norm(psi: ComplexField1D) -> float:
    return math.sqrt(inner_product_1d(psi, psi).real)
