"""Command-line entry point: ``pslab <subcommand> [options]``.

Exit codes: 0 success, 1 verification failure, 2 spec parse failure,
3 grid error, 4 quadrature cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import ComplexField2D, GridError, PhaseGrid
from .io import SpecError, load_mixture_json, parse_state_spec, read_psf, write_csv, write_kmx, write_psf
from .moyal import DEFAULT_CAP, QuadratureCapError

__all__ = ["RunConfig", "main", "build_parser"]

EXIT_OK, EXIT_VERIFY, EXIT_SPEC, EXIT_GRID, EXIT_CAP = 0, 1, 2, 3, 4
FORMATS = ("psf", "csv", "json")


@dataclass(frozen=True)
class RunConfig:
    hbar: float | None = None
    grid_n: int = 128
    grid_l: float | None = None
    tolerance: float | None = None
    truncation_order: int = 10
    out: str | None = None
    format: str = "psf"

    def __post_init__(self):
        if self.grid_n < 16 or self.grid_n % 2:
            raise SpecError(f"--grid-n must be even and >= 16, got {self.grid_n}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise SpecError(f"--tol must be positive, got {self.tolerance}")
        if self.hbar is not None and not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise SpecError(f"--hbar must be positive, got {self.hbar}")
        if self.grid_l is not None and not (self.grid_l > 0 and math.isfinite(self.grid_l)):
            raise SpecError(f"--grid-l must be positive, got {self.grid_l}")
        if self.truncation_order < 0:
            raise SpecError(f"--order must be nonnegative, got {self.truncation_order}")
        if self.format not in FORMATS:
            raise SpecError(f"--format must be one of {FORMATS}, got {self.format!r}")

    @property
    def hbar_or_default(self) -> float:
        return 1.0 if self.hbar is None else self.hbar

    def grid(self, hbar: float | None = None) -> PhaseGrid:
        return PhaseGrid.create(self.grid_n, self.grid_l, self.hbar_or_default if hbar is None else hbar)


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--hbar", type=float, default=d(None), help="reduced Planck constant (default 1)")
    parser.add_argument("--grid-n", type=int, default=d(128), help="points per axis, even, >= 16")
    parser.add_argument("--grid-l", type=float, default=d(None), help="half-width of the x axis")
    parser.add_argument("--tol", "--tolerance", dest="tol", type=float, default=d(None),
                        help="override upper bounds in verify; route tolerance for --check")
    parser.add_argument("--order", type=int, default=d(10), help="series truncation order")
    parser.add_argument("--out", default=d(None), help="output path")
    parser.add_argument("--format", choices=FORMATS, default=d("psf"), help="output format")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_SPEC)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pslab", description="Phase-space quantization toolkit")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("wigner", "Wigner or cross-Wigner transform of a state")
    p.add_argument("state", help="hermite:k or file:path.psw")
    p.add_argument("--window", help="second state for the cross-Wigner transform")

    p = add("star", "star product of two PSF1 symbols")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--route", default="compose", help="compose, integral or series:R")
    p.add_argument("--check", action="store_true", help="report disagreement between routes")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="grid size cap for the integral route")

    p = add("bopp-apply", "apply the Bopp operator of a symbol to a phase-space function")
    p.add_argument("a")
    p.add_argument("psi")
    p.add_argument("--route", choices=("compose", "harmonic"), default="compose")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="grid size cap for the harmonic route")

    p = add("density-build", "Wigner distribution of a mixture")
    p.add_argument("mixture", help="MixtureSpec JSON file")
    p.add_argument("--kernel-out", help="also write the density kernel as KMX1")

    p = add("density-restrict", "restriction of the Bopp density operator to a wavepacket basis")
    p.add_argument("mixture")
    p.add_argument("--window", required=True)
    p.add_argument("--basis", type=int, default=8)

    p = add("deform", "deformation series applied to a wavepacket")
    p.add_argument("mixture")
    p.add_argument("--state", required=True)
    p.add_argument("--window", required=True)
    p.add_argument("--check", action="store_true", help="compare with the Bopp route")

    p = add("verify", "run a verification suite")
    p.add_argument("suite", choices=("moyal", "bopp", "density", "deformation", "all"))
    return parser


def _config(ns) -> RunConfig:
    return RunConfig(hbar=ns.hbar, grid_n=ns.grid_n, grid_l=ns.grid_l, tolerance=ns.tol,
                     truncation_order=ns.order, out=ns.out, format=ns.format)


def _emit(obj) -> None:
    print(json.dumps(obj), flush=True)


def _write_field(field: ComplexField2D, cfg: RunConfig, default_stem: str) -> str:
    path = cfg.out or f"{default_stem}.{cfg.format}"
    if cfg.format == "psf":
        write_psf(path, field)
    elif cfg.format == "csv":
        write_csv(path, field)
    else:
        g = field.grid
        doc = {"n": g.n, "L_x": g.x_axis.half_width, "L_p": g.p_axis.half_width, "hbar": g.hbar,
               "re": field.values.real.tolist(), "im": field.values.imag.tolist()}
        Path(path).write_text(json.dumps(doc))
    return path


def _read_symbol(path, cfg: RunConfig) -> ComplexField2D:
    try:
        field = read_psf(path)
    except OSError as exc:
        raise SpecError(f"{path}: {exc}") from exc
    if cfg.hbar is not None and not math.isclose(field.grid.hbar, cfg.hbar, rel_tol=1e-12):
        raise GridError(f"{path}: hbar={field.grid.hbar} differs from --hbar {cfg.hbar}")
    return field


def _parse_route(route: str, cfg: RunConfig):
    if route in ("compose", "integral"):
        return route, None
    m = re.fullmatch(r"series(?::(\d+))?", route)
    if not m:
        raise SpecError(f"unknown route {route!r} (want compose, integral or series:R)")
    return "series", int(m.group(1)) if m.group(1) else cfg.truncation_order


def _star(route, R, a, b, cap):
    from .deformation import star_series_numeric
    from .moyal import star_integral
    from .weyl import compose_weyl

    if route == "compose":
        return compose_weyl(a, b)
    if route == "integral":
        return star_integral(a, b, cap=cap)
    try:
        return star_series_numeric(a, b, R)
    except ValueError as exc:
        if isinstance(exc, GridError):
            raise
        raise SpecError(str(exc)) from exc


def _relative_sup(u: np.ndarray, ref: np.ndarray) -> float:
    return float(np.max(np.abs(u - ref)) / max(np.max(np.abs(ref)), 1e-300))


def cmd_wigner(ns, cfg: RunConfig) -> int:
    from .wigner import cross_wigner, wigner

    grid = cfg.grid()
    psi = parse_state_spec(ns.state, grid.x_axis, grid.hbar)
    if ns.window:
        field = cross_wigner(psi, parse_state_spec(ns.window, grid.x_axis, grid.hbar), grid)
    else:
        field = wigner(psi, grid)
    path = _write_field(field, cfg, "wigner")
    _emit({"out": path, "max_re": float(field.values.real.max())})
    return EXIT_OK


def cmd_star(ns, cfg: RunConfig) -> int:
    a, b = _read_symbol(ns.a, cfg), _read_symbol(ns.b, cfg)
    if a.grid != b.grid:
        raise GridError(f"{ns.a} and {ns.b} live on different grids")
    route, R = _parse_route(ns.route, cfg)
    result = _star(route, R, a, b, ns.cap)
    path = _write_field(result, cfg, "star")
    report = {"out": path, "route": ns.route}
    if ns.check:
        ref = result.values if route == "compose" else _star("compose", None, a, b, ns.cap).values
        devs = {"compose": 0.0}
        if a.grid.n <= ns.cap:
            devs["integral"] = _relative_sup(_star("integral", None, a, b, ns.cap).values, ref)
        R_check = R if R is not None else cfg.truncation_order
        devs[f"series:{R_check}"] = _relative_sup(_star("series", R_check, a, b, ns.cap).values, ref)
        report["deviation_vs_compose"] = devs
        report["max_relative_deviation"] = max(devs.values())
        if cfg.tolerance is not None:
            report["pass"] = report["max_relative_deviation"] <= cfg.tolerance
    _emit(report)
    return EXIT_VERIFY if report.get("pass") is False else EXIT_OK


def cmd_bopp_apply(ns, cfg: RunConfig) -> int:
    from .bopp import bopp_apply, bopp_apply_harmonic

    a, Psi = _read_symbol(ns.a, cfg), _read_symbol(ns.psi, cfg)
    if a.grid != Psi.grid:
        raise GridError(f"{ns.a} and {ns.psi} live on different grids")
    out = bopp_apply(a, Psi) if ns.route == "compose" else bopp_apply_harmonic(a, Psi, cap=ns.cap)
    _emit({"out": _write_field(out, cfg, "bopp"), "route": ns.route})
    return EXIT_OK


def _mixture(ns, cfg: RunConfig):
    _, grid = _mixture_grid(ns.mixture, cfg)
    return load_mixture_json(ns.mixture, grid=grid)


def _mixture_grid(path, cfg: RunConfig):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"{path}: {exc}") from exc
    file_hbar = doc.get("hbar") if isinstance(doc, dict) else None
    if not isinstance(file_hbar, (int, float)) or isinstance(file_hbar, bool):
        file_hbar = None
    hbar = cfg.hbar if cfg.hbar is not None else (file_hbar if file_hbar is not None else 1.0)
    return doc, cfg.grid(float(hbar))


def _guard_value(exc: ValueError):
    """Map plain ValueErrors from model validation onto the spec-failure exit code."""
    if isinstance(exc, (GridError, QuadratureCapError, SpecError)):
        raise exc
    raise SpecError(str(exc)) from exc


def cmd_density_build(ns, cfg: RunConfig) -> int:
    from .density import density_from_mixture, eigendecompose, wigner_distribution

    try:
        m, grid = _mixture(ns, cfg)
        d = density_from_mixture(m)
    except ValueError as exc:
        _guard_value(exc)
    rho = wigner_distribution(m, grid)
    path = _write_field(rho, cfg, "density")
    vals, _ = eigendecompose(d)
    report = {"out": path, "trace": d.trace, "integral": float(rho.values.real.sum() * grid.cell),
              "eigenvalues": [v for v in vals if v > 1e-12]}
    if ns.kernel_out:
        write_kmx(ns.kernel_out, d.kernel)
        report["kernel_out"] = ns.kernel_out
    _emit(report)
    return EXIT_OK


def cmd_density_restrict(ns, cfg: RunConfig) -> int:
    from .density import bopp_density_restrict

    try:
        m, grid = _mixture(ns, cfg)
    except ValueError as exc:
        _guard_value(exc)
    window = parse_state_spec(ns.window, grid.x_axis, grid.hbar)
    try:
        M, vals = bopp_density_restrict(m, window, ns.basis, grid)
    except ValueError as exc:
        if "too large" in str(exc):
            raise GridError(str(exc)) from exc
        _guard_value(exc)
    doc = {"basis": ns.basis, "trace": float(np.trace(M).real),
           "matrix_re": M.real.tolist(), "matrix_im": M.imag.tolist(), "eigenvalues": vals}
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(doc) + "\n")
        _emit({"out": cfg.out, "trace": doc["trace"], "eigenvalues": vals})
    else:
        _emit(doc)
    return EXIT_OK


def cmd_deform(ns, cfg: RunConfig) -> int:
    from .deformation import deform_apply_numeric
    from .density import density_bopp_apply
    from .wigner import wavepacket_transform

    try:
        m, grid = _mixture(ns, cfg)
    except ValueError as exc:
        _guard_value(exc)
    psi = parse_state_spec(ns.state, grid.x_axis, grid.hbar)
    window = parse_state_spec(ns.window, grid.x_axis, grid.hbar)
    try:
        out = deform_apply_numeric(m, psi, window, cfg.truncation_order, grid)
    except ValueError as exc:
        _guard_value(exc)
    report = {"out": _write_field(out, cfg, "deform"), "order": cfg.truncation_order}
    if ns.check:
        ref = density_bopp_apply(m, wavepacket_transform(psi, window, grid))
        report["relative_deviation"] = float(np.linalg.norm(out.values - ref.values)
                                             / max(np.linalg.norm(ref.values), 1e-300))
        if cfg.tolerance is not None:
            report["pass"] = report["relative_deviation"] <= cfg.tolerance
    _emit(report)
    return EXIT_VERIFY if report.get("pass") is False else EXIT_OK


def cmd_verify(ns, cfg: RunConfig) -> int:
    from .verify import run_suite

    grid = cfg.grid()
    sink = open(cfg.out, "w") if cfg.out else None
    failed = False
    try:
        for rec in run_suite(ns.suite, grid, cfg.tolerance):
            line = json.dumps(rec)
            print(line, flush=True)
            if sink:
                sink.write(line + "\n")
            failed |= rec["pass"] is False
    finally:
        if sink:
            sink.close()
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "wigner": cmd_wigner, "star": cmd_star, "bopp-apply": cmd_bopp_apply,
    "density-build": cmd_density_build, "density-restrict": cmd_density_restrict,
    "deform": cmd_deform, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(ns)
        return COMMANDS[ns.command](ns, cfg)
    except QuadratureCapError as exc:
        print(f"pslab: {exc}", file=sys.stderr)
        return EXIT_CAP
    except GridError as exc:
        print(f"pslab: grid error: {exc}", file=sys.stderr)
        return EXIT_GRID
    except SpecError as exc:
        print(f"pslab: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
