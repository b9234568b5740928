"""Binary field files, CSV export and state/mixture spec parsing.

Layouts (all little-endian)::

    PSF1  u32 n_x, u32 n_p, f64 L_x, f64 L_p, f64 hbar, n_x*n_p (re, im) f64 pairs, row-major
    PSW1  u32 n,   f64 L,   f64 hbar,                   n (re, im) f64 pairs
    KMX1  u32 n,   f64 L,                               n*n (re, im) f64 pairs, row-major
"""
from __future__ import annotations

import csv
import json
import math
import re
import struct
from pathlib import Path

import numpy as np

from .grid import Axis, ComplexField1D, ComplexField2D, GridError, PhaseGrid, PhysConfig

__all__ = [
    "SpecError", "write_psf", "read_psf", "write_psw", "read_psw", "write_kmx",
    "read_kmx", "write_csv", "parse_state_spec", "load_mixture_json", "dump_mixture_json",
]

_PSF = struct.Struct("<4sIIddd")
_PSW = struct.Struct("<4sIdd")
_KMX = struct.Struct("<4sId")


class SpecError(ValueError):
    """A state, mixture or file specification could not be parsed."""


def _pairs(values: np.ndarray) -> bytes:
    flat = np.ascontiguousarray(values, dtype="<c16").ravel()
    return flat.tobytes()


def _unpairs(buf: bytes, count: int, path) -> np.ndarray:
    if len(buf) != 16 * count:
        raise SpecError(f"{path}: expected {count} complex values, found {len(buf) / 16:g}")
    return np.frombuffer(buf, dtype="<c16").astype(complex)


def _read_header(path, st: struct.Struct, magic: bytes):
    data = Path(path).read_bytes()
    if len(data) < st.size or data[:4] != magic:
        raise SpecError(f"{path}: not a {magic.decode()} file")
    return st.unpack_from(data), data[st.size:]


def write_psf(path, field: ComplexField2D) -> None:
    g = field.grid
    head = _PSF.pack(b"PSF1", g.n, g.n, g.x_axis.half_width, g.p_axis.half_width, g.hbar)
    Path(path).write_bytes(head + _pairs(field.values))


def read_psf(path) -> ComplexField2D:
    (_, nx, npts, lx, lp, hbar), body = _read_header(path, _PSF, b"PSF1")
    if nx != npts:
        raise GridError(f"{path}: n_x={nx} and n_p={npts} differ")
    grid = PhaseGrid(Axis(nx, lx), hbar)
    if not math.isclose(grid.p_axis.half_width, lp, rel_tol=1e-12):
        raise GridError(f"{path}: L_p={lp} inconsistent with L_x={lx}, hbar={hbar}")
    return ComplexField2D(grid, _unpairs(body, nx * nx, path).reshape(nx, nx))


def write_psw(path, psi: ComplexField1D, hbar: float = 1.0) -> None:
    ax = psi.axis
    Path(path).write_bytes(_PSW.pack(b"PSW1", ax.n, ax.half_width, hbar) + _pairs(psi.values))


def read_psw(path) -> tuple[ComplexField1D, float]:
    """Return the state and the hbar it was written with."""
    (_, n, L, hbar), body = _read_header(path, _PSW, b"PSW1")
    return ComplexField1D(Axis(n, L), _unpairs(body, n, path)), hbar


def write_kmx(path, K) -> None:
    ax = K.axis
    Path(path).write_bytes(_KMX.pack(b"KMX1", ax.n, ax.half_width) + _pairs(K.entries))


def read_kmx(path):
    from .weyl import KernelMatrix

    (_, n, L), body = _read_header(path, _KMX, b"KMX1")
    return KernelMatrix(Axis(n, L), _unpairs(body, n * n, path).reshape(n, n))


def write_csv(path, field) -> None:
    """Long-format CSV: ``x,p,re,im`` for phase-space fields, ``x,re,im`` for states."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(field, ComplexField2D):
            w.writerow(["x", "p", "re", "im"])
            g = field.grid
            for j, xj in enumerate(g.x):
                for k, pk in enumerate(g.p):
                    v = field.values[j, k]
                    w.writerow([repr(float(xj)), repr(float(pk)), repr(float(v.real)), repr(float(v.imag))])
        else:
            w.writerow(["x", "re", "im"])
            for xj, v in zip(field.axis.points, field.values):
                w.writerow([repr(float(xj)), repr(float(v.real)), repr(float(v.imag))])


_HERMITE = re.compile(r"hermite:(\d+)\Z")


def parse_state_spec(spec: str, axis: Axis, hbar: float, base: Path | None = None) -> ComplexField1D:
    """Resolve ``hermite:k`` or ``file:path.psw`` to a state on ``axis``."""
    from .wigner import hermite_state

    if not isinstance(spec, str):
        raise SpecError(f"state spec must be a string, got {spec!r}")
    m = _HERMITE.match(spec)
    if m:
        try:
            return hermite_state(int(m.group(1)), axis, PhysConfig(hbar))
        except ValueError as exc:
            raise GridError(str(exc)) from exc
    if spec.startswith("file:"):
        path = Path(spec[5:])
        if base is not None and not path.is_absolute():
            path = base / path
        if not path.is_file():
            raise SpecError(f"state file not found: {path}")
        psi, file_hbar = read_psw(path)
        if psi.axis != axis:
            raise GridError(f"{path}: axis (n={psi.axis.n}, L={psi.axis.half_width}) does not match the grid")
        if not math.isclose(file_hbar, hbar, rel_tol=1e-12):
            raise GridError(f"{path}: written with hbar={file_hbar}, grid uses {hbar}")
        return psi
    raise SpecError(f"cannot parse state spec {spec!r} (want hermite:k or file:path)")


def load_mixture_json(path, grid: PhaseGrid | None = None, n: int = 128, half_width=None):
    """Read a mixture file ``{"hbar": h, "components": [{"weight": w, "state": spec}, ...]}``.

    Without ``grid``, one is built from ``n``, ``half_width`` and the file's hbar.
    Returns ``(MixtureSpec, grid)``.
    """
    from .density import MixtureSpec

    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("components"), list):
        raise SpecError(f"{path}: expected an object with a 'components' list")
    hbar = doc.get("hbar", 1.0 if grid is None else grid.hbar)
    if not isinstance(hbar, (int, float)) or isinstance(hbar, bool):
        raise SpecError(f"{path}: hbar must be a number")
    if grid is None:
        grid = PhaseGrid.create(n, half_width, float(hbar))
    elif not math.isclose(grid.hbar, hbar, rel_tol=1e-12):
        raise GridError(f"{path}: hbar={hbar} does not match the grid's {grid.hbar}")
    comps = []
    for item in doc["components"]:
        if not isinstance(item, dict) or "weight" not in item or "state" not in item:
            raise SpecError(f"{path}: each component needs 'weight' and 'state'")
        weight = item["weight"]
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise SpecError(f"{path}: weight must be a number, got {weight!r}")
        comps.append((float(weight), parse_state_spec(item["state"], grid.x_axis, grid.hbar, path.parent)))
    return MixtureSpec(comps), grid


def dump_mixture_json(path, weights, state_specs, hbar: float) -> None:
    doc = {"hbar": hbar, "components": [{"weight": w, "state": s} for w, s in zip(weights, state_specs)]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
