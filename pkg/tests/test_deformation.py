import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pslab.deformation import (
    POISSON_CAP, SERIES_CAP, FormalSeries, GaussRat, PolySymbol, bopp_shift_symbolic,
    deform_apply_numeric, numeric_poisson_power, poisson_bracket, poisson_power, star_formal,
    star_series_numeric,
)
from pslab.density import MixtureSpec, wigner_distribution
from pslab.samplers import flat_window
from pslab.weyl import compose_weyl
from pslab.wigner import Window, cross_wigner

from conftest import sup

X, P, HB = PolySymbol.x(), PolySymbol.p(), PolySymbol.hbar()
HALF_I_HBAR = PolySymbol.monomial(0, 0, GaussRat(0, Fraction(1, 2)), 1)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
coeffs = st.builds(GaussRat, rationals, rationals)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)), coeffs,
                        max_size=4).map(PolySymbol)
hbar_free = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=4).map(PolySymbol)


def literal_poisson_power(r, a, b):
    """Apply ``D = d_x1 d_p2 - d_p1 d_x2`` to ``a(z1) b(z2)`` ``r`` times, then set ``z1 = z2``.

    Products are kept as lists of ``(coef, a-factor, b-factor)`` so no binomial formula is used.
    """
    terms = [(GaussRat(1), a, b)]
    for _ in range(r):
        nxt = []
        for c, fa, fb in terms:
            nxt.append((c, fa.derivative("x"), fb.derivative("p")))
            nxt.append((-c, fa.derivative("p"), fb.derivative("x")))
        terms = [(c, fa, fb) for c, fa, fb in nxt if fa and fb]
    out = PolySymbol()
    for c, fa, fb in terms:
        out = out + fa * fb * c
    return out


def test_gaussrat_arithmetic():
    a = GaussRat(Fraction(1, 2), 3)
    assert a * GaussRat(0, 1) == GaussRat(-3, Fraction(1, 2))
    assert (a / a) == GaussRat(1)
    assert a ** 2 == a * a
    assert complex(a) == 0.5 + 3j
    with pytest.raises(ZeroDivisionError):
        a / GaussRat()


def test_polysymbol_drops_zero_terms_and_rejects_negative_exponents():
    p = PolySymbol({(1, 0, 0): 1, (0, 1, 0): 0}) + PolySymbol({(1, 0, 0): -1})
    assert p.terms == {}
    with pytest.raises(ValueError):
        PolySymbol({(-1, 0, 0): 1})


@given(polys)
def test_text_format_round_trip(a):
    assert PolySymbol.from_text(a.to_text()) == a


def test_text_format_rejects_garbage():
    for bad in ["x^2", "(1/2, 0/1) * x^1 p^0", "(1/0, 0/1) * x^1 p^0 * hbar^0"]:
        with pytest.raises(ValueError):
            PolySymbol.from_text(bad)
    assert PolySymbol.from_text("0") == PolySymbol()


def test_poisson_bracket_examples():
    assert poisson_bracket(X, P) == PolySymbol.const(1)
    assert poisson_bracket(X * X, P) == X * 2
    a = X * X * P + P * 3
    assert poisson_bracket(a, a) == PolySymbol()


def test_poisson_power_examples():
    assert poisson_power(0, X, P) == X * P
    assert poisson_power(1, X, P) == PolySymbol.const(1)
    # d_x^2 x^2 * d_p^2 p^2 = 2 * 2; the cross terms vanish
    assert poisson_power(2, X * X, P * P) == PolySymbol.const(4)
    assert literal_poisson_power(2, X * X, P * P) == PolySymbol.const(4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), hbar_free, hbar_free)
def test_poisson_power_matches_literal_expansion(r, a, b):
    assert poisson_power(r, a, b) == literal_poisson_power(r, a, b)


def test_poisson_power_caps_order():
    with pytest.raises(ValueError):
        poisson_power(POISSON_CAP + 1, X, P)
    with pytest.raises(ValueError):
        poisson_power(-1, X, P)


def test_star_formal_canonical_pair():
    assert star_formal(X, P) == X * P + HALF_I_HBAR
    assert star_formal(P, X) == X * P - HALF_I_HBAR
    comm = star_formal(X, P) - star_formal(P, X)
    assert comm == PolySymbol.monomial(0, 0, GaussRat(0, 1), 1)


@given(polys)
def test_star_formal_unit(b):
    assert star_formal(PolySymbol.const(1), b) == b
    assert star_formal(b, PolySymbol.const(1)) == b


@settings(max_examples=25, deadline=None)
@given(hbar_free, hbar_free, hbar_free)
def test_star_formal_is_associative(a, b, c):
    assert star_formal(star_formal(a, b), c) == star_formal(a, star_formal(b, c))


@settings(max_examples=40, deadline=None)
@given(hbar_free, hbar_free)
def test_star_formal_first_order_is_poisson_bracket(a, b):
    s = star_formal(a, b)
    assert s[0] == a * b
    assert s[1] == poisson_bracket(a, b) * GaussRat(0, Fraction(1, 2))


def test_star_formal_coefficients_are_hbar_free():
    with pytest.raises(ValueError):
        FormalSeries([HB])


def test_bopp_shift_symbolic_examples():
    assert bopp_shift_symbolic("x", PolySymbol.const(1)) == X
    assert bopp_shift_symbolic("x", P) == star_formal(X, P)
    assert bopp_shift_symbolic("p", X) == star_formal(P, X)
    with pytest.raises(ValueError):
        bopp_shift_symbolic("q", X)


@settings(max_examples=30, deadline=None)
@given(hbar_free)
def test_bopp_shifts_are_star_multiplication(psi):
    assert bopp_shift_symbolic("x", psi) == star_formal(X, psi)
    assert bopp_shift_symbolic("p", psi) == star_formal(P, psi)


def test_formal_series_evaluate_matches_polynomial():
    s = star_formal(X * X, P * P)
    x, p = np.array([0.3, -1.2]), np.array([0.7, 2.0])
    # x^2 * p^2 = x^2 p^2 + 2 i hbar x p - hbar^2 / 2
    expected = x ** 2 * p ** 2 + 2j * 0.5 * x * p - 0.25 / 2
    assert np.allclose(s.evaluate(x, p, 0.5), expected, atol=1e-14)


@pytest.fixture(scope="module")
def windowed(grid):
    win = flat_window(grid)
    XX, PP = grid.mesh()
    inner = (np.abs(XX) <= grid.x_axis.half_width / 4) & (np.abs(PP) <= grid.p_axis.half_width / 4)

    def sym(poly):
        return grid.sample(lambda A, B: poly.evaluate(A, B, grid.hbar) * win)

    return sym, inner


@pytest.mark.parametrize("a,b", [(X, P), (X * X, P * P), (X * P, X * X * P), (P * P * P, X * X * X)])
def test_numeric_poisson_powers_match_symbolic(grid, windowed, a, b):
    sym, _ = windowed
    XX, PP = grid.mesh()
    # derivatives of the window tail reach 2e-4 at the corners of the L/4 box; use L/6
    inner = (np.abs(XX) <= grid.x_axis.half_width / 6) & (np.abs(PP) <= grid.p_axis.half_width / 6)
    for r in range(3):
        num = numeric_poisson_power(r, sym(a), sym(b))
        ref = poisson_power(r, a, b).evaluate(*grid.mesh())
        assert sup((num - ref)[inner]) < 1e-4 * max(1.0, sup(ref[inner]))


@pytest.mark.parametrize("a,b", [(X, P), (X * X, P), (X * P, P * P * X), (X * X * X, P * P * P)])
def test_compose_matches_formal_star_on_windowed_monomials(grid, windowed, a, b):
    sym, inner = windowed
    ref = star_formal(a, b).evaluate(*grid.mesh(), grid.hbar)
    got = compose_weyl(sym(a), sym(b)).values
    scale = max(1.0, sup(ref[inner]))
    assert sup((got - ref)[inner]) < 1e-4 * scale
    series = star_series_numeric(sym(a), sym(b), 6).values
    assert sup((series - ref)[inner]) < 1e-4 * scale


def test_star_series_order_checks(grid):
    with pytest.raises(ValueError):
        star_series_numeric(grid.zeros(), grid.zeros(), SERIES_CAP + 1)
    assert sup(star_series_numeric(grid.zeros(), grid.zeros(), 0).values) == 0


def test_deform_zeroth_order_is_pointwise_product(grid, h):
    m = MixtureSpec([(1.0, h(0))])
    out = deform_apply_numeric(m, h(0), Window(h(0)), 0, grid)
    rho = wigner_distribution(m, grid).values
    W = cross_wigner(h(0), h(0), grid).values
    assert sup(out.values - (2 * math.pi) ** 1.5 * rho * W) < 1e-14


def test_deform_partial_sums_and_order_checks(grid, h):
    m = MixtureSpec([(1.0, h(0))])
    sums = deform_apply_numeric(m, h(1), h(0), 3, grid, partial_sums=True)
    assert len(sums) == 4
    assert sup(sums[-1].values - deform_apply_numeric(m, h(1), h(0), 3, grid).values) == 0
    with pytest.raises(ValueError):
        deform_apply_numeric(m, h(1), h(0), -1, grid)
    with pytest.raises(ValueError):
        deform_apply_numeric(m, h(1), h(0), SERIES_CAP + 1, grid)
