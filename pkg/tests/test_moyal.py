import itertools
import math

import numpy as np
import pytest

from pslab.grid import GridError, PhaseGrid
from pslab.moyal import (
    DEFAULT_CAP, QuadratureCapError, star_cyclicity_residual, star_integral, star_wigner_pair,
    star_wigner_residual,
)
from pslab.samplers import gaussian_symbol, random_symbol
from pslab.weyl import compose_weyl
from pslab.wigner import cross_wigner, hermite_state, wigner

from conftest import rel, sup

TWO_PI = 2 * math.pi


def ones(g):
    return g.sample(lambda X, P: np.ones_like(X))


@pytest.fixture(scope="module")
def g64():
    return PhaseGrid.create(64)


@pytest.fixture(scope="module")
def h64(g64):
    return hermite_state(0, g64.x_axis)


def test_star_integral_unit(g64, rng):
    b = random_symbol(g64, rng)
    assert sup(star_integral(ones(g64), b).values - b.values) < 1e-5
    assert sup(star_integral(b, ones(g64)).values - b.values) < 1e-5


def test_star_integral_matches_compose_on_gaussians(g64):
    a = gaussian_symbol(g64, 0.3, -0.2, width=1.0, tilt=0.3)
    b = gaussian_symbol(g64, -0.4, 0.5, width=0.9)
    assert rel(star_integral(a, b).values, compose_weyl(a, b).values) < 1e-4


def test_star_integral_cyclicity(g64, rng):
    a, b = random_symbol(g64, rng), random_symbol(g64, rng)
    assert abs(star_integral(a, b).integral() - (a * b).integral()) < 1e-5


def test_star_integral_enforces_cap(grid):
    with pytest.raises(QuadratureCapError):
        star_integral(grid.zeros(), grid.zeros())
    small = PhaseGrid.create(32)
    star_integral(small.zeros(), small.zeros(), cap=32)
    with pytest.raises(QuadratureCapError):
        star_integral(small.zeros(), small.zeros(), cap=16)
    assert DEFAULT_CAP == 64


def test_star_integral_rejects_grid_mismatch(g64):
    with pytest.raises(GridError):
        star_integral(g64.zeros(), PhaseGrid.create(32).zeros())


def test_star_wigner_pair_ground_states(grid, h):
    scalar, field = star_wigner_pair(h(0), h(0), h(0), h(0), grid)
    assert abs(scalar - 1 / TWO_PI) < 1e-12
    assert sup(field.values - wigner(h(0), grid).values) < 1e-12


def test_star_wigner_pair_orthogonal_case_vanishes(grid, h):
    scalar, _ = star_wigner_pair(h(0), h(0), h(1), h(0), grid)
    assert abs(scalar) < 1e-12
    star = compose_weyl(wigner(h(0), grid), cross_wigner(h(1), h(0), grid))
    assert sup(star.values) < 1e-8


def test_star_wigner_pair_swapped_states(grid, h):
    scalar, field = star_wigner_pair(h(0), h(1), h(1), h(0), grid)
    assert abs(scalar - 1 / TWO_PI) < 1e-12
    assert sup(field.values - wigner(h(0), grid).values) < 1e-12


def test_star_wigner_residual_over_hermite_quadruples(grid, h):
    worst = max(star_wigner_residual(h(a), h(b), h(c), h(d), grid)
                for a, b, c, d in itertools.product(range(2), repeat=4))
    assert worst < 1e-7


def test_star_wigner_pair_raises_when_tolerance_is_unreachable(grid, h):
    with pytest.raises(ArithmeticError):
        star_wigner_pair(h(0), h(1), h(1), h(0), grid, tol=0.0)


def test_cyclicity_residual_examples(grid, h, rng):
    for _ in range(3):
        a, b = random_symbol(grid, rng), random_symbol(grid, rng)
        assert star_cyclicity_residual(a, b) < 1e-7
    assert star_cyclicity_residual(random_symbol(grid, rng), grid.zeros()) == 0
    W0, W1 = wigner(h(0), grid), wigner(h(1), grid)
    assert star_cyclicity_residual(W0, W1) < 1e-8
    assert abs((W0 * W1).integral()) < 1e-8


def test_compose_is_associative_and_noncommutative(grid, rng):
    a, b, c = (random_symbol(grid, rng) for _ in range(3))
    lhs = compose_weyl(compose_weyl(a, b), c).values
    rhs = compose_weyl(a, compose_weyl(b, c)).values
    assert sup(lhs - rhs) < 1e-8 * sup(lhs)
    ab, ba = compose_weyl(a, b).values, compose_weyl(b, a).values
    assert sup(ab - ba) > 1e-2 * sup(ab)
