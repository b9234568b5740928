"""Discretized Weyl calculus on the shared phase grid.

Kernel/symbol conventions
-------------------------
A :class:`KernelMatrix` acts by ``(K psi)(x_j) = sum_m K[j, m] psi(x_m) dx``.
Entries with ``j + m`` even sit on grid midpoints, so the symbol-to-kernel map
is an exact inverse DFT there.  Entries with ``j + m`` odd have half-grid
midpoints; they are filled by Lagrange interpolation (16-point stencil) of
the momentum-integrated symbol along the midpoint direction, which is exact
for symbols polynomial in ``x`` up to degree 15 and spectrally close for
smooth localized ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    Axis, ComplexField1D, ComplexField2D, GridError, PhaseGrid, cdft, icdft,
    interp_matrix, symplectic_fourier_dual,
)
from .wigner import _check_axis, _lag_products

__all__ = [
    "KernelMatrix", "kernel_from_symbol", "symbol_from_kernel", "apply_weyl",
    "apply_weyl_harmonic", "compose_weyl", "metaplectic_apply", "parse_generator",
    "symplectic_matrix", "weyl_covariance_residual", "STENCIL",
]

STENCIL = 16


@dataclass
class KernelMatrix:
    axis: Axis
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        n = self.axis.n
        if self.entries.shape != (n, n):
            raise GridError(f"kernel must be {n}x{n}, got {self.entries.shape}")
        if not np.all(np.isfinite(self.entries)):
            raise GridError("kernel contains non-finite entries")

    def apply(self, psi: ComplexField1D) -> ComplexField1D:
        if psi.axis != self.axis:
            raise GridError("axis mismatch")
        return ComplexField1D(self.axis, self.entries @ psi.values * self.axis.delta)

    def __matmul__(self, other: "KernelMatrix") -> "KernelMatrix":
        if other.axis != self.axis:
            raise GridError("axis mismatch")
        return KernelMatrix(self.axis, self.entries @ other.entries * self.axis.delta)

    def is_hermitian(self, tol=1e-10) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)


def _midpoint_weights(n: int, order: int = STENCIL):
    """Stencil starts and Lagrange weights interpolating row ``j`` data at ``j + 1/2``."""
    order = min(order, n)
    half = order // 2
    j = np.arange(n - 1)
    start = np.clip(j - half + 1, 0, n - order)
    nodes = np.arange(order)
    t = (j + 0.5 - start)[:, None]                       # target in stencil coordinates
    diff = t - nodes[None, :]
    w = np.empty((n - 1, order))
    for q in range(order):
        others = np.delete(nodes, q)
        w[:, q] = np.prod((t - others[None, :]) / (q - others[None, :]), axis=1)
    return start, w


_WEIGHT_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _weights(n):
    if n not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[n] = _midpoint_weights(n)
    return _WEIGHT_CACHE[n]


def _lag_table(a: ComplexField2D) -> np.ndarray:
    """``G[j, l + n] = (2 pi hbar)^-1 sum_k exp(i p_k l dx/hbar) a(x_j, p_k) dp`` for ``l = -n..n-1``."""
    n = a.grid.n
    c = n // 2
    padded = np.zeros((n, 2 * n), dtype=complex)
    padded[:, c:c + n] = a.values
    return icdft(padded, axis=1) * (2 * n) / (2.0 * n * a.grid.dx)


def kernel_from_symbol(a: ComplexField2D) -> KernelMatrix:
    """Weyl kernel ``K(x, y) = (2 pi hbar)^-1 int exp(i p (x-y)/hbar) a((x+y)/2, p) dp``."""
    grid = a.grid
    n = grid.n
    G = _lag_table(a)
    ia, ib = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    lag = ia - ib + n
    K = np.empty((n, n), dtype=complex)
    even = (ia + ib) % 2 == 0
    K[even] = G[(ia + ib)[even] // 2, lag[even]]
    odd = ~even
    start, w = _weights(n)
    j = (ia + ib)[odd] // 2                              # midpoint is j + 1/2
    cols = lag[odd]
    rows = start[j][:, None] + np.arange(w.shape[1])[None, :]
    K[odd] = np.einsum("iq,iq->i", w[j], G[rows, cols[:, None]])
    return KernelMatrix(grid.x_axis, K)


def symbol_from_kernel(K: KernelMatrix, grid: PhaseGrid) -> ComplexField2D:
    """``a(x, p) = int exp(-i p y/hbar) K(x + y/2, x - y/2) dy`` on the ``2*dx`` lag grid."""
    if K.axis != grid.x_axis:
        raise GridError("kernel axis does not match the phase grid")
    n = grid.n
    j = np.arange(n)[:, None]
    s = np.arange(n)[None, :] - n // 2
    ia = j + s
    ib = j - s
    ok = (ia >= 0) & (ia < n) & (ib >= 0) & (ib < n)
    f = np.zeros((n, n), dtype=complex)
    f[ok] = K.entries[ia[ok], ib[ok]]
    return ComplexField2D(grid, cdft(f, axis=1) * 2.0 * grid.dx)


def rank_one_kernel(psi: ComplexField1D, phi: ComplexField1D) -> KernelMatrix:
    """Kernel ``psi(x) conj(phi(y))``."""
    return KernelMatrix(psi.axis, np.outer(psi.values, phi.values.conj()))


def apply_weyl(a: ComplexField2D, psi: ComplexField1D) -> ComplexField1D:
    _check_axis(a.grid, psi)
    return kernel_from_symbol(a).apply(psi)


def apply_weyl_harmonic(a: ComplexField2D, psi: ComplexField1D) -> ComplexField1D:
    """``(2 pi hbar)^-1 int F_sigma a(z0) T(z0) psi dz0`` by quadrature.

    The ``z0`` nodes are the dual lattice ``(2 (m-c) dx, 2 (l-c) dp)`` with
    cell ``4 dx dp``.  There the ``x0`` shift is a whole number of grid steps
    and the momentum phases collapse to one inverse DFT per row.
    """
    grid = a.grid
    _check_axis(grid, psi)
    n = grid.n
    c = n // 2
    asig = symplectic_fourier_dual(a)
    i = np.arange(n)
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        src = i - 2 * (m - c)
        ok = (src >= 0) & (src < n)
        if not ok.any():
            continue
        row = icdft(asig[m]) * n            # sum_l asig[m, l] exp(2i pi (l-c)(q-c)/n)
        shifted = np.zeros(n, dtype=complex)
        shifted[ok] = psi.values[src[ok]]
        out += row[(i - m + c) % n] * shifted
    out *= 4.0 * grid.cell / (2.0 * np.pi * grid.hbar)
    return ComplexField1D(grid.x_axis, out)


def compose_weyl(a: ComplexField2D, b: ComplexField2D) -> ComplexField2D:
    """Weyl symbol of ``Op(a) Op(b)``; the reference star product."""
    if a.grid != b.grid:
        raise GridError("grid mismatch")
    K = kernel_from_symbol(a) @ kernel_from_symbol(b)
    return symbol_from_kernel(K, a.grid)


# -- symplectic generators --------------------------------------------------

def parse_generator(S):
    """Normalize a generator tag to ``("J", None)`` or ``("scale", lam)``.

    Accepts ``"J"``, ``("scale", lam)`` and ``"scale:lam"``.
    """
    if isinstance(S, str):
        if S == "J":
            return ("J", None)
        if S.startswith("scale:"):
            S = ("scale", float(S.split(":", 1)[1]))
        else:
            raise ValueError(f"unknown symplectic generator {S!r}")
    if isinstance(S, tuple) and len(S) == 2 and S[0] == "scale":
        lam = float(S[1])
        if not lam > 0:
            raise ValueError(f"scaling factor must be positive, got {lam}")
        return ("scale", lam)
    if isinstance(S, tuple) and S == ("J", None):
        return S
    raise ValueError(f"unknown symplectic generator {S!r}")


def symplectic_matrix(S) -> np.ndarray:
    kind, lam = parse_generator(S)
    if kind == "J":
        return np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.diag([lam, 1.0 / lam])


def metaplectic_apply(S, psi: ComplexField1D, hbar: float = 1.0, inverse: bool = False) -> ComplexField1D:
    """Metaplectic operator covering ``J`` (hbar-scaled Fourier transform) or ``diag(lam, 1/lam)``."""
    kind, lam = parse_generator(S)
    ax = psi.axis
    x = ax.points
    if kind == "J":
        sign = 1.0 if inverse else -1.0
        phase = np.exp(sign * 1j * np.pi / 4)
        M = np.exp(sign * 1j * np.outer(x, x) / hbar) * ax.delta / math.sqrt(2 * np.pi * hbar)
        return ComplexField1D(ax, phase * (M @ psi.values))
    if inverse:
        lam = 1.0 / lam
    vals = interp_matrix(ax, x / lam) @ psi.values / math.sqrt(lam)
    return ComplexField1D(ax, vals)


def weyl_covariance_residual(a_func, S, psi: ComplexField1D, grid: PhaseGrid) -> float:
    """Relative ``|| Op(a o S^-1) psi - S_hat Op(a) S_hat^-1 psi ||``.

    ``a_func(x, p)`` is a vectorized callable so that ``a o S^-1`` can be
    sampled exactly on the grid.
    """
    Sinv = np.linalg.inv(symplectic_matrix(S))
    a_rot = grid.sample(lambda X, P: a_func(Sinv[0, 0] * X + Sinv[0, 1] * P, Sinv[1, 0] * X + Sinv[1, 1] * P))
    lhs = apply_weyl(a_rot, psi)
    inner = metaplectic_apply(S, psi, grid.hbar, inverse=True)
    rhs = metaplectic_apply(S, apply_weyl(grid.sample(a_func), inner), grid.hbar)
    return (lhs - rhs).norm() / max(lhs.norm(), 1e-300)
