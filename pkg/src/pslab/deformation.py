"""Exact polynomial star products and the numeric deformation series.

Symbols are polynomials in ``x``, ``p`` and a formal ``hbar`` with
Gaussian-rational coefficients, so every identity is checked by exact
equality.  The star product is the Groenewold series
``a * b = sum_r (1/r!) (i hbar/2)^r P^r(a, b)``.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from math import comb

import numpy as np

from .grid import ComplexField1D, ComplexField2D, PhaseGrid, spectral_derivative
from .wigner import _as_window, _check_axis, cross_wigner

__all__ = [
    "GaussRat", "PolySymbol", "FormalSeries", "POISSON_CAP", "SERIES_CAP",
    "poisson_bracket", "poisson_power", "star_formal", "bopp_shift_symbolic",
    "numeric_poisson_power", "star_series_numeric", "deform_apply_numeric",
]

POISSON_CAP = 32
SERIES_CAP = 16


class GaussRat:
    """Exact complex rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, v) -> "GaussRat":
        if isinstance(v, GaussRat):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(v)

    def __add__(self, o):
        o = GaussRat.coerce(o)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussRat.coerce(o))

    def __rsub__(self, o):
        return GaussRat.coerce(o) - self

    def __mul__(self, o):
        o = GaussRat.coerce(o)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussRat.coerce(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero")
        return self * GaussRat(o.re / d, -o.im / d)

    def __pow__(self, k: int):
        out = GaussRat(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        try:
            o = GaussRat.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def to_text(self) -> str:
        return f"({self.re.numerator}/{self.re.denominator},{self.im.numerator}/{self.im.denominator})"


I = GaussRat(0, 1)
HALF_I = GaussRat(0, Fraction(1, 2))


class PolySymbol:
    """Polynomial ``sum c * x^a p^b hbar^r`` keyed by ``(a, b, r)``; zero terms are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, c in (terms or {}).items():
            a, b, r = (key + (0,)) if len(key) == 2 else key
            if min(a, b, r) < 0:
                raise ValueError(f"negative exponent in {key}")
            c = GaussRat.coerce(c)
            k = (int(a), int(b), int(r))
            total = clean.get(k, GaussRat()) + c
            if total:
                clean[k] = total
            else:
                clean.pop(k, None)
        self.terms = clean

    # constructors
    @classmethod
    def const(cls, c=1) -> "PolySymbol":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c=1, r: int = 0) -> "PolySymbol":
        return cls({(a, b, r): c})

    @classmethod
    def x(cls) -> "PolySymbol":
        return cls.monomial(1, 0)

    @classmethod
    def p(cls) -> "PolySymbol":
        return cls.monomial(0, 1)

    @classmethod
    def hbar(cls) -> "PolySymbol":
        return cls.monomial(0, 0, 1, 1)

    # algebra
    @staticmethod
    def _lift(o) -> "PolySymbol":
        return o if isinstance(o, PolySymbol) else PolySymbol.const(o)

    def __add__(self, o):
        o = PolySymbol._lift(o)
        t = dict(self.terms)
        for k, c in o.terms.items():
            t[k] = t.get(k, GaussRat()) + c
        return PolySymbol(t)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol({k: -c for k, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-PolySymbol._lift(o))

    def __rsub__(self, o):
        return PolySymbol._lift(o) - self

    def __mul__(self, o):
        o = PolySymbol._lift(o)
        t: dict = {}
        for (a1, b1, r1), c1 in self.terms.items():
            for (a2, b2, r2), c2 in o.terms.items():
                k = (a1 + a2, b1 + b2, r1 + r2)
                t[k] = t.get(k, GaussRat()) + c1 * c2
        return PolySymbol(t)

    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, PolySymbol):
            try:
                o = PolySymbol._lift(o)
            except (TypeError, ValueError):
                return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"PolySymbol({self.to_text()!r})"

    def derivative(self, var: str, order: int = 1) -> "PolySymbol":
        """Partial derivative in ``x`` or ``p`` (``hbar`` is a constant)."""
        if var not in ("x", "p"):
            raise ValueError(f"can only differentiate in x or p, not {var!r}")
        out = self
        for _ in range(order):
            t = {}
            for (a, b, r), c in out.terms.items():
                e = a if var == "x" else b
                if e:
                    k = (a - 1, b, r) if var == "x" else (a, b - 1, r)
                    t[k] = c * e
            out = PolySymbol(t)
        return out

    def degree(self, var: str) -> int:
        idx = {"x": 0, "p": 1, "hbar": 2}[var]
        return max((k[idx] for k in self.terms), default=-1)

    @property
    def total_degree(self) -> int:
        return max((a + b for a, b, _ in self.terms), default=-1)

    def hbar_part(self, r: int) -> "PolySymbol":
        return PolySymbol({(a, b, 0): c for (a, b, rr), c in self.terms.items() if rr == r})

    def drop_hbar(self) -> "PolySymbol":
        """Classical limit: the ``hbar^0`` terms."""
        return self.hbar_part(0)

    def evaluate(self, x, p, hbar=1.0):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.zeros(np.broadcast(x, p).shape, dtype=complex)
        for (a, b, r), c in self.terms.items():
            out = out + complex(c) * (hbar ** r) * x ** a * p ** b
        return out

    # text format
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b, r) in sorted(self.terms):
            parts.append(f"{self.terms[(a, b, r)].to_text()} * x^{a} p^{b} * hbar^{r}")
        return " + ".join(parts)

    _TERM = re.compile(
        r"\s*\(\s*(-?\d+)\s*/\s*(\d+)\s*,\s*(-?\d+)\s*/\s*(\d+)\s*\)\s*\*\s*x\^(\d+)\s+p\^(\d+)\s*\*\s*hbar\^(\d+)\s*\Z")

    @classmethod
    def from_text(cls, text: str) -> "PolySymbol":
        text = text.strip()
        if text == "0":
            return cls()
        terms: dict = {}
        for chunk in re.split(r"\s\+\s", text):
            m = cls._TERM.match(chunk)
            if not m:
                raise ValueError(f"cannot parse symbol term {chunk.strip()!r}")
            rn, rd, im_n, im_d, a, b, r = m.groups()
            if int(rd) == 0 or int(im_d) == 0:
                raise ValueError(f"zero denominator in {chunk.strip()!r}")
            c = GaussRat(Fraction(int(rn), int(rd)), Fraction(int(im_n), int(im_d)))
            k = (int(a), int(b), int(r))
            terms[k] = terms.get(k, GaussRat()) + c
        return cls(terms)


class FormalSeries:
    """``sum_r hbar^r c_r`` with ``hbar``-free polynomial coefficients ``c_r``."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        coeffs = list(coefficients)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        for c in coeffs:
            if c.degree("hbar") > 0:
                raise ValueError("series coefficients must not contain hbar")
        self.coefficients = coeffs

    @classmethod
    def from_poly(cls, a: PolySymbol) -> "FormalSeries":
        top = max(a.degree("hbar"), 0)
        return cls([a.hbar_part(r) for r in range(top + 1)])

    def to_poly(self) -> PolySymbol:
        t = {}
        for r, c in enumerate(self.coefficients):
            for (a, b, _), v in c.terms.items():
                t[(a, b, r)] = v
        return PolySymbol(t)

    def __getitem__(self, r) -> PolySymbol:
        return self.coefficients[r] if r < len(self.coefficients) else PolySymbol()

    def __len__(self):
        return len(self.coefficients)

    def __add__(self, o):
        return FormalSeries.from_poly(self.to_poly() + _poly(o))

    def __sub__(self, o):
        return FormalSeries.from_poly(self.to_poly() - _poly(o))

    def __eq__(self, o):
        if isinstance(o, (FormalSeries, PolySymbol)):
            return self.to_poly() == _poly(o)
        return NotImplemented

    def __repr__(self):
        return f"FormalSeries({self.to_poly().to_text()!r})"

    def evaluate(self, x, p, hbar):
        return self.to_poly().evaluate(x, p, hbar)


def _poly(o) -> PolySymbol:
    if isinstance(o, FormalSeries):
        return o.to_poly()
    return PolySymbol._lift(o)


def poisson_bracket(a: PolySymbol, b: PolySymbol) -> PolySymbol:
    """``{a, b} = d_x a d_p b - d_p a d_x b``."""
    a, b = _poly(a), _poly(b)
    return a.derivative("x") * b.derivative("p") - a.derivative("p") * b.derivative("x")


def poisson_power(r: int, a: PolySymbol, b: PolySymbol, cap: int = POISSON_CAP) -> PolySymbol:
    """``P^r(a, b) = sum_k C(r,k) (-1)^k (d_x^(r-k) d_p^k a)(d_p^(r-k) d_x^k b)``."""
    if int(r) != r or r < 0:
        raise ValueError(f"order must be a nonnegative integer, got {r}")
    if r > cap:
        raise ValueError(f"order {r} exceeds the cap {cap}")
    a, b = _poly(a), _poly(b)
    out = PolySymbol()
    for k in range(r + 1):
        da = a.derivative("x", r - k).derivative("p", k)
        if not da:
            continue
        db = b.derivative("p", r - k).derivative("x", k)
        out = out + da * db * (comb(r, k) * (-1) ** k)
    return out


def star_formal(a, b) -> FormalSeries:
    """Groenewold series ``sum_r (1/r!) (i hbar/2)^r P^r(a, b)``; finite for polynomials."""
    a, b = _poly(a), _poly(b)
    top = min(a.total_degree, b.total_degree)
    out = PolySymbol()
    for r in range(max(top, 0) + 1):
        coef = HALF_I ** r / math.factorial(r)
        out = out + poisson_power(r, a, b, cap=max(POISSON_CAP, r)) * PolySymbol.monomial(0, 0, coef, r)
    return FormalSeries.from_poly(out)


def bopp_shift_symbolic(which: str, Psi) -> FormalSeries:
    """``(x + (i hbar/2) d_p) Psi`` or ``(p - (i hbar/2) d_x) Psi``."""
    Psi = _poly(Psi)
    h = PolySymbol.monomial(0, 0, HALF_I, 1)
    if which == "x":
        return FormalSeries.from_poly(PolySymbol.x() * Psi + h * Psi.derivative("p"))
    if which == "p":
        return FormalSeries.from_poly(PolySymbol.p() * Psi - h * Psi.derivative("x"))
    raise ValueError(f"Bopp shift must be 'x' or 'p', got {which!r}")


# -- numeric series ----------------------------------------------------------

class _Derivs:
    def __init__(self, field: ComplexField2D):
        self.v = field.values
        self.g = field.grid
        self.cache = {}

    def __call__(self, i: int, j: int) -> np.ndarray:
        """``d_x^i d_p^j`` by spectral differentiation."""
        if (i, j) not in self.cache:
            d = spectral_derivative(self.v, self.g.dx, i, axis=0)
            self.cache[(i, j)] = spectral_derivative(d, self.g.dp, j, axis=1)
        return self.cache[(i, j)]


def numeric_poisson_power(r: int, a: ComplexField2D, b: ComplexField2D, _da=None, _db=None) -> np.ndarray:
    da = _da or _Derivs(a)
    db = _db or _Derivs(b)
    out = np.zeros((a.grid.n, a.grid.n), dtype=complex)
    for k in range(r + 1):
        out += comb(r, k) * (-1) ** k * da(r - k, k) * db(k, r - k)
    return out


def star_series_numeric(a: ComplexField2D, b: ComplexField2D, R: int) -> ComplexField2D:
    """Truncated Groenewold series ``sum_{r<=R} (1/r!) (i hbar/2)^r P^r(a, b)`` on the grid."""
    if a.grid != b.grid:
        from .grid import GridError
        raise GridError("grid mismatch")
    if int(R) != R or R < 0 or R > SERIES_CAP:
        raise ValueError(f"truncation order must be in 0..{SERIES_CAP}, got {R}")
    g = a.grid
    da, db = _Derivs(a), _Derivs(b)
    acc = np.zeros((g.n, g.n), dtype=complex)
    for r in range(R + 1):
        acc = acc + (0.5j * g.hbar) ** r / math.factorial(r) * numeric_poisson_power(r, a, b, da, db)
    return ComplexField2D(g, acc)


def deform_apply_numeric(m, psi: ComplexField1D, window, R: int, grid: PhaseGrid,
                         partial_sums: bool = False):
    """``(2 pi hbar)^(3/2) sum_{r<=R} (1/r!) (i hbar/2)^r P^r(rho, W(psi, phi))``.

    ``P^r`` is bilinear, so summing the mixture's Wigner functions first
    gives the same series as summing ``w_j P^r(W psi_j, W(psi, phi))``.
    With ``partial_sums`` the list of fields for ``R' = 0..R`` is returned.
    """
    from .density import wigner_distribution

    if int(R) != R or R < 0:
        raise ValueError(f"truncation order must be a nonnegative integer, got {R}")
    if R > SERIES_CAP:
        raise ValueError(f"truncation order {R} exceeds the cap {SERIES_CAP}")
    window = _as_window(window)
    _check_axis(grid, psi, window.phi, *m.states)
    rho = wigner_distribution(m, grid)
    W = cross_wigner(psi, window.phi, grid)
    da, db = _Derivs(rho), _Derivs(W)
    pref = (2.0 * np.pi * grid.hbar) ** 1.5
    acc = np.zeros((grid.n, grid.n), dtype=complex)
    sums = []
    for r in range(R + 1):
        c = (0.5j * grid.hbar) ** r / math.factorial(r)
        acc = acc + c * numeric_poisson_power(r, rho, W, da, db)
        sums.append(ComplexField2D(grid, pref * acc))
    return sums if partial_sums else sums[-1]
