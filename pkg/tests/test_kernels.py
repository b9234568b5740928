import numpy as np
import pytest

from pslab import _kernels_py, kernels

try:
    from pslab import _kernels
except ImportError:
    _kernels = None

BACKENDS = [_kernels_py] + ([_kernels] if _kernels else [])


def literal_star_sum(a, b):
    """``S[z] = sum_{u, v} exp(-2i pi ((lu-lz)(mv-mz) - (mu-mz)(lv-lz))/n) a[u] b[v]``, index form."""
    n = a.shape[0]
    idx = np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    mu, lu = np.meshgrid(idx, idx, indexing="ij")
    for mz in range(n):
        for lz in range(n):
            du_m, du_l = (mu - mz).ravel(), (lu - lz).ravel()
            ph = np.exp(-2j * np.pi * (np.outer(du_l, du_m) - np.outer(du_m, du_l)) / n)
            out[mz, lz] = a.ravel() @ ph @ b.ravel()
    return out


def literal_bopp_harmonic_sum(asig, Psi):
    """``R[j, k] = sum_{m, l} asig[m, l] w^{(l-c)(j-c) - (m-c)(k-c)} Psi[j - (m-c), k - (l-c)]`` with zero outside."""
    n = asig.shape[0]
    c = n // 2
    R = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            for m in range(n):
                for l in range(n):
                    js, ks = j - (m - c), k - (l - c)
                    if 0 <= js < n and 0 <= ks < n:
                        ph = np.exp(2j * np.pi * ((l - c) * (j - c) - (m - c) * (k - c)) / n)
                        R[j, k] += asig[m, l] * ph * Psi[js, ks]
    return R


@pytest.fixture(params=[8, 10])
def pair(request):
    rng = np.random.default_rng(request.param)
    n = request.param
    return (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)),
            rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_star_sum_matches_literal_quadrature(mod, pair):
    a, b = pair
    ref = literal_star_sum(a, b)
    assert np.max(np.abs(mod.star_integral_sum(a, b, 1) - ref)) < 1e-11 * np.max(np.abs(ref))


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_harmonic_sum_matches_literal_quadrature(mod, pair):
    a, b = pair
    ref = literal_bopp_harmonic_sum(a, b)
    assert np.max(np.abs(mod.bopp_harmonic_sum(a, b, 1) - ref)) < 1e-11 * np.max(np.abs(ref))


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
@pytest.mark.parametrize("threads", [1, 3])
def test_compiled_and_fallback_agree(threads):
    rng = np.random.default_rng(7)
    a = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    b = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    for name in ("star_integral_sum", "bopp_harmonic_sum"):
        x = getattr(_kernels, name)(a, b, threads)
        y = getattr(_kernels_py, name)(a, b, threads)
        assert np.max(np.abs(x - y)) < 1e-10 * np.max(np.abs(y))


def test_thread_count_comes_from_environment(monkeypatch):
    monkeypatch.setenv("PSLAB_THREADS", "4")
    assert kernels.num_threads() == 4
    monkeypatch.setenv("PSLAB_THREADS", "junk")
    assert kernels.num_threads() == 1
    monkeypatch.delenv("PSLAB_THREADS")
    assert kernels.num_threads() == 1


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    env = dict(os.environ, PSLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from pslab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
