"""Pure-numpy versions of the quadrature kernels in ``_kernels.pyx``.

Both modules expose identical signatures; :mod:`pslab.kernels` picks one.
"""
import numpy as np


def _roots(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def star_integral_sum(a, b, num_threads=1):
    """``S[jz, kz] = sum_{i,k,j,l} a[i,k] b[j,l] w^(-(k-kz)(j-jz) + (i-jz)(l-kz))``, ``w = exp(2i pi/n)``.

    The phase splits as ``w^(i(l-kz)) w^(-j(k-kz)) w^(jz(k-l))``, so after
    DFTs of ``a`` and ``b`` along their first axis each column ``kz`` is a
    diagonal gather followed by one DFT over ``k - l`` (O(n^3) total).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = a.shape[0]
    A = np.fft.ifft(a, axis=0) * n        # A[q, k] = sum_i a[i, k] w^(i q)
    B = np.fft.fft(b, axis=0)             # B[q, l] = sum_j b[j, l] w^(-j q)
    k = np.arange(n)[:, None]
    d = np.arange(n)[None, :]
    out = np.empty((n, n), dtype=complex)
    for kz in range(n):
        N = (A[(k - d - kz) % n, k] * B[(k - kz) % n, (k - d) % n]).sum(axis=0)
        out[:, kz] = np.fft.ifft(N) * n
    return out


def bopp_harmonic_sum(asig, Psi, num_threads=1):
    """``R[j,k] = sum_{m,l} asig[m,l] w^(-((k-c)(m-c) - (j-c)(l-c))) Psi[j-(m-c), k-(l-c)]``.

    Out-of-range ``Psi`` indices contribute zero.
    """
    asig = np.ascontiguousarray(asig, dtype=complex)
    Psi = np.ascontiguousarray(Psi, dtype=complex)
    n = Psi.shape[0]
    c = n // 2
    w = _roots(n)
    cent = np.arange(n) - c
    out = np.zeros((n, n), dtype=complex)
    for m in range(n):
        sx = m - c
        rows = slice(max(0, sx), min(n, n + sx))
        src_rows = slice(max(0, -sx), min(n, n - sx))
        if rows.start >= rows.stop:
            continue
        for l in range(n):
            coef = asig[m, l]
            if coef == 0:
                continue
            sp = l - c
            cols = slice(max(0, sp), min(n, n + sp))
            src_cols = slice(max(0, -sp), min(n, n - sp))
            if cols.start >= cols.stop:
                continue
            ph = w[(cent[:, None] * sp - cent[None, :] * sx) % n]
            out[rows, cols] += coef * ph[rows, cols] * Psi[src_rows, src_cols]
    return out
