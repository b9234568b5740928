"""Moyal star product by direct phase-space quadrature, and its identities.

The reference star product is :func:`pslab.weyl.compose_weyl`; the routines
here compute the same object independently of the kernel route.
"""
from __future__ import annotations

import math

import numpy as np

from .grid import ComplexField1D, ComplexField2D, GridError, PhaseGrid
from .kernels import star_integral_sum
from .weyl import compose_weyl
from .wigner import _check_axis, cross_wigner

__all__ = [
    "QuadratureCapError", "DEFAULT_CAP", "star_integral", "star_wigner_pair",
    "star_wigner_residual", "star_cyclicity_residual", "check_cap",
]

DEFAULT_CAP = 64


class QuadratureCapError(ValueError):
    """The grid is too large for a direct quadrature route."""


def check_cap(grid: PhaseGrid, cap: int | None):
    cap = DEFAULT_CAP if cap is None else cap
    if grid.n > cap:
        raise QuadratureCapError(
            f"{grid.n}x{grid.n} grid exceeds the quadrature cap of {cap}x{cap}")


def star_integral(a: ComplexField2D, b: ComplexField2D, cap: int | None = None) -> ComplexField2D:
    """``(a*b)(z) = (pi hbar)^-2 sum_{u,v} exp(-2i sigma(u-z, v-z)/hbar) a(u) b(v) du dv``.

    Every phase is a power of ``exp(2i pi/n)`` because grid coordinate
    products are multiples of ``pi hbar/n``.  The prefactor needs no
    calibration: with ``2 dx dp n/hbar = 2 pi`` the unit symbol is an exact
    left and right unit on the grid.
    """
    if a.grid != b.grid:
        raise GridError("grid mismatch")
    grid = a.grid
    check_cap(grid, cap)
    S = star_integral_sum(a.values, b.values)
    return ComplexField2D(grid, S * (grid.cell / (np.pi * grid.hbar)) ** 2)


def star_wigner_pair(psi, phi, psi2, phi2, grid: PhaseGrid, tol: float = 1e-7):
    """Return ``((psi2|phi)/(2 pi hbar), W(psi, phi2))``.

    Also checks that ``W(psi, phi) * W(psi2, phi2)`` computed by the compose
    route equals that product; raises ``ArithmeticError`` if the relative
    residual exceeds ``tol``.
    """
    scalar, field, resid = _wigwig(psi, phi, psi2, phi2, grid)
    if resid > tol:
        raise ArithmeticError(f"star of cross-Wigner transforms off by {resid:.3e} (> {tol:g})")
    return scalar, field


def star_wigner_residual(psi, phi, psi2, phi2, grid: PhaseGrid) -> float:
    """Sup-norm of ``W(psi,phi)*W(psi2,phi2) - scalar*W(psi,phi2)`` over ``sup|W(psi,phi)| sup|W(psi2,phi2)|``."""
    return _wigwig(psi, phi, psi2, phi2, grid)[2]


def _wigwig(psi, phi, psi2, phi2, grid):
    _check_axis(grid, psi, phi, psi2, phi2)
    w1 = cross_wigner(psi, phi, grid)
    w2 = cross_wigner(psi2, phi2, grid)
    scalar = np.vdot(phi.values, psi2.values) * grid.dx / (2.0 * np.pi * grid.hbar)
    field = cross_wigner(psi, phi2, grid)
    star = compose_weyl(w1, w2)
    scale = max(np.abs(w1.values).max() * np.abs(w2.values).max(), 1e-300)
    resid = float(np.abs(star.values - scalar * field.values).max() / scale)
    return complex(scalar), field, resid


def star_cyclicity_residual(a: ComplexField2D, b: ComplexField2D) -> float:
    """``|int a*b - int ab| + |int a*b - int b*a|`` with the compose route."""
    ab = compose_weyl(a, b).integral()
    ba = compose_weyl(b, a).integral()
    plain = (a * b).integral()
    return float(abs(ab - plain) + abs(ab - ba))
