"""Bopp operators on phase-space functions.

``Op_Bopp(a) Psi = a * Psi`` with ``Psi`` treated as a symbol.  The
wavepacket transform ``U_phi`` intertwines these with the Weyl operators,
which is what most of the residual checks below measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    ComplexField1D, ComplexField2D, GridError, PhaseGrid, inner_product_2d, interp_matrix,
    spectral_derivative, spectral_shift, symplectic_fourier_dual,
)
from .kernels import bopp_harmonic_sum
from .moyal import check_cap
from .weyl import apply_weyl, compose_weyl, parse_generator, symplectic_matrix
from .wigner import _as_window, hw_displace, wavepacket_adjoint, wavepacket_transform

__all__ = [
    "bopp_apply", "bopp_apply_harmonic", "bopp_displace", "bopp_shift_x", "bopp_shift_p",
    "intertwining_residual", "intertwining_report", "LiftedSymbol", "lifted_symbol_eval",
    "lifted_trace_slice", "symplectic_resample", "bopp_covariance_residual",
]

EPS = 1e-300


def _same_grid(a: ComplexField2D, Psi: ComplexField2D):
    if a.grid != Psi.grid:
        raise GridError("grid mismatch")


def bopp_apply(a: ComplexField2D, Psi: ComplexField2D) -> ComplexField2D:
    _same_grid(a, Psi)
    return compose_weyl(a, Psi)


def bopp_apply_harmonic(a: ComplexField2D, Psi: ComplexField2D, cap: int | None = None) -> ComplexField2D:
    """``(2 pi hbar)^-1 int F_sigma a(z0) T~(z0) Psi dz0`` on the dual lattice ``(2 dx, 2 dp)``.

    On that lattice ``z0/2`` is a whole grid step, so every displaced copy
    of ``Psi`` is an index shift times a root-of-unity phase.
    """
    _same_grid(a, Psi)
    grid = a.grid
    check_cap(grid, cap)
    asig = symplectic_fourier_dual(a)
    R = bopp_harmonic_sum(asig, Psi.values)
    return ComplexField2D(grid, R * (4.0 * grid.cell / (2.0 * np.pi * grid.hbar)))


def bopp_displace(z0, Psi: ComplexField2D) -> ComplexField2D:
    """``T~(z0) Psi(z) = exp(-i sigma(z, z0)/hbar) Psi(z - z0/2)``, shifts done spectrally."""
    x0, p0 = (float(v) for v in z0)
    g = Psi.grid
    vals = spectral_shift(Psi.values, g.dx, 0.5 * x0, axis=0)
    vals = spectral_shift(vals, g.dp, 0.5 * p0, axis=1)
    X, P = g.mesh()
    return ComplexField2D(g, np.exp(-1j * (P * x0 - X * p0) / g.hbar) * vals)


def bopp_shift_x(Psi: ComplexField2D) -> ComplexField2D:
    """``x Psi + (i hbar/2) d_p Psi``."""
    g = Psi.grid
    X, _ = g.mesh()
    d = spectral_derivative(Psi.values, g.dp, axis=1)
    return ComplexField2D(g, X * Psi.values + 0.5j * g.hbar * d)


def bopp_shift_p(Psi: ComplexField2D) -> ComplexField2D:
    """``p Psi - (i hbar/2) d_x Psi``."""
    g = Psi.grid
    _, P = g.mesh()
    d = spectral_derivative(Psi.values, g.dx, axis=0)
    return ComplexField2D(g, P * Psi.values - 0.5j * g.hbar * d)


def _rel(diff, ref) -> float:
    return float(diff.norm() / max(ref.norm(), EPS))


def intertwining_report(a: ComplexField2D, psi: ComplexField1D, window, probe=None) -> dict[str, float]:
    """Relative residuals of the intertwining relations for one ``(a, psi, phi)``.

    ``forward``      ``A~ U psi`` vs ``U A psi``
    ``adjoint``      ``U* A~ Psi`` vs ``A U* Psi`` on a probe ``Psi`` outside the range of ``U``
    ``weyl_from_bopp``  ``A psi`` vs ``U* A~ U psi``
    ``bopp_on_range``   ``A~ (U U* Psi)`` vs ``U A U* Psi``
    """
    window = _as_window(window)
    grid = a.grid
    U = lambda f: wavepacket_transform(f, window, grid)
    Ustar = lambda F: wavepacket_adjoint(F, window, grid)
    Apsi = apply_weyl(a, psi)
    UApsi = U(Apsi)
    AUpsi = bopp_apply(a, U(psi))
    if probe is None:
        # a packet built from a displaced window: generic, not in the range of U
        other = hw_displace((0.4 * math.sqrt(grid.hbar), -0.3 * math.sqrt(grid.hbar)), window.phi, grid.hbar)
        probe = wavepacket_transform(psi, other / other.norm(), grid)
    adj_lhs = Ustar(bopp_apply(a, probe))
    adj_rhs = apply_weyl(a, Ustar(probe))
    back = Ustar(AUpsi)
    proj = U(Ustar(probe))
    rng_lhs = bopp_apply(a, proj)
    rng_rhs = U(apply_weyl(a, Ustar(probe)))
    return {
        "forward": _rel(AUpsi - UApsi, UApsi),
        "adjoint": _rel(adj_lhs - adj_rhs, adj_rhs),
        "weyl_from_bopp": _rel(back - Apsi, Apsi),
        "bopp_on_range": _rel(rng_lhs - rng_rhs, rng_rhs),
    }


def intertwining_residual(a: ComplexField2D, psi: ComplexField1D, window) -> float:
    """Largest residual from :func:`intertwining_report`."""
    return max(intertwining_report(a, psi, window).values())


@dataclass(frozen=True)
class LiftedSymbol:
    """``a~(x, p; zx, zp) = a(x - zp/2, p + zx/2)`` by bilinear interpolation of ``base``."""

    base: ComplexField2D

    def __call__(self, z, zeta) -> complex:
        return lifted_symbol_eval(self.base, z, zeta)


def _bilinear_coords(t, t0, delta, n):
    u = (np.asarray(t, dtype=float) - t0) / delta
    if np.any(u < 0) or np.any(u > n - 1):
        raise GridError("shifted argument leaves the grid support")
    i = np.minimum(np.floor(u).astype(int), n - 2)
    return i, u - i


def lifted_symbol_eval(a: ComplexField2D, z, zeta) -> complex:
    x, p = (float(v) for v in z)
    zx, zp = (float(v) for v in zeta)
    g = a.grid
    i, fx = _bilinear_coords(x - 0.5 * zp, g.x[0], g.dx, g.n)
    k, fp = _bilinear_coords(p + 0.5 * zx, g.p[0], g.dp, g.n)
    v = a.values
    return complex((1 - fx) * (1 - fp) * v[i, k] + fx * (1 - fp) * v[i + 1, k]
                   + (1 - fx) * fp * v[i, k + 1] + fx * fp * v[i + 1, k + 1])


def _shift_bilinear(values, shift_cells, axis):
    """``f(t - s)`` at nodes by linear interpolation, zero outside; shift in grid cells."""
    n = values.shape[axis]
    src = np.arange(n) - shift_cells
    i0 = np.floor(src).astype(int)
    f = src - i0
    out = np.zeros_like(values)
    for idx, w in ((i0, 1 - f), (i0 + 1, f)):
        ok = (idx >= 0) & (idx < n)
        shape = [1] * values.ndim
        shape[axis] = -1
        taken = np.take(values, np.clip(idx, 0, n - 1), axis=axis)
        out += taken * (w * ok).reshape(shape)
    return out


def lifted_trace_slice(a: ComplexField2D, zeta) -> complex:
    """``int a~(z, zeta) dz`` for a fixed ``zeta``; equals ``int a`` whenever the shift stays on the grid."""
    zx, zp = (float(v) for v in zeta)
    g = a.grid
    sx, sp = 0.5 * zp, -0.5 * zx           # a~(z) = a(x - sx, p - sp)
    if abs(sx) >= g.x_axis.half_width or abs(sp) >= g.p_axis.half_width:
        raise GridError("zeta shifts the symbol outside the grid support")
    vals = _shift_bilinear(a.values, sx / g.dx, axis=0)
    vals = _shift_bilinear(vals, sp / g.dp, axis=1)
    return complex(vals.sum() * g.cell)


def symplectic_resample(S, Psi: ComplexField2D, inverse: bool = False) -> ComplexField2D:
    """``Psi(S^-1 z)`` (or ``Psi(S z)`` with ``inverse``) by trigonometric interpolation.

    Only ``J`` and diagonal scalings occur, so the map factors into one
    interpolation per axis (plus a transpose for ``J``).
    """
    kind, lam = parse_generator(S)
    g = Psi.grid
    M = symplectic_matrix(S)
    T = M if inverse else np.linalg.inv(M)
    if kind == "J":
        # T = [[0, t01], [t10, 0]]: out[j, k] = Psi(t01 p_k, t10 x_j)
        Mx = interp_matrix(g.x_axis, T[0, 1] * g.p)      # [k, j']
        Mp = interp_matrix(g.p_axis, T[1, 0] * g.x)      # [j, k']
        return ComplexField2D(g, Mp @ Psi.values.T @ Mx.T)
    Mx = interp_matrix(g.x_axis, T[0, 0] * g.x)
    Mp = interp_matrix(g.p_axis, T[1, 1] * g.p)
    return ComplexField2D(g, Mx @ Psi.values @ Mp.T)


def bopp_covariance_residual(a_func, S, Psi: ComplexField2D) -> float:
    """Relative ``|| Op_Bopp(a o S^-1) Psi - S~ Op_Bopp(a) S~^-1 Psi ||`` with ``S~ Psi = Psi o S^-1``.

    ``a_func(x, p)`` is a vectorized callable so ``a o S^-1`` is sampled exactly.
    """
    g = Psi.grid
    Sinv = np.linalg.inv(symplectic_matrix(S))
    a = g.sample(a_func)
    a_rot = g.sample(lambda X, P: a_func(Sinv[0, 0] * X + Sinv[0, 1] * P, Sinv[1, 0] * X + Sinv[1, 1] * P))
    lhs = bopp_apply(a_rot, Psi)
    rhs = symplectic_resample(S, bopp_apply(a, symplectic_resample(S, Psi, inverse=True)))
    return _rel(lhs - rhs, lhs)
