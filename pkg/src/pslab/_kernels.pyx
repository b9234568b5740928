# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos, sin, M_PI

cnp.import_array()

ctypedef double complex cplx


cdef extern from *:
    """
    #ifdef _OPENMP
    #include <omp.h>
    static int pslab_thread_id(void) { return omp_get_thread_num(); }
    #else
    static int pslab_thread_id(void) { return 0; }
    #endif
    """
    int pslab_thread_id() noexcept nogil


cdef inline Py_ssize_t _thread_id() noexcept nogil:
    return pslab_thread_id()


cdef inline Py_ssize_t _mod(Py_ssize_t a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t r = a % n
    if r < 0:
        r += n
    return r


def _roots(Py_ssize_t n):
    cdef cnp.ndarray[cplx, ndim=1] w = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t q
    for q in range(n):
        w[q] = cos(2.0 * M_PI * q / n) + 1j * sin(2.0 * M_PI * q / n)
    return w


def star_integral_sum(a, b, int num_threads=1):
    """Same contract as ``_kernels_py.star_integral_sum``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0]
    cdef cplx[:, ::1] A = np.ascontiguousarray(np.fft.ifft(a, axis=0) * n)
    cdef cplx[:, ::1] B = np.ascontiguousarray(np.fft.fft(b, axis=0))
    cdef cplx[::1] w = _roots(n)
    out_arr = np.empty((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef int nt = max(num_threads, 1)
    cdef cplx[:, ::1] N = np.empty((nt, n), dtype=np.complex128)
    cdef cplx* Nt
    cdef Py_ssize_t kz, jz, k, d, t, e, qa, qb, lb
    cdef cplx acc
    for kz in prange(n, nogil=True, num_threads=nt, schedule="static"):
        t = 0
        if nt > 1:
            t = _thread_id()
        Nt = &N[t, 0]
        for d in range(n):
            acc = 0
            for k in range(n):
                qa = _mod(k - d - kz, n)
                qb = _mod(k - kz, n)
                lb = _mod(k - d, n)
                acc = acc + A[qa, k] * B[qb, lb]
            Nt[d] = acc
        for jz in range(n):
            acc = 0
            e = 0
            for d in range(n):
                acc = acc + w[e] * Nt[d]
                e = e + jz
                if e >= n:
                    e = e - n
            out[jz, kz] = acc
    return out_arr


def bopp_harmonic_sum(asig, Psi, int num_threads=1):
    cdef cplx[:, ::1] S = np.ascontiguousarray(asig, dtype=np.complex128)
    cdef cplx[:, ::1] F = np.ascontiguousarray(Psi, dtype=np.complex128)
    cdef Py_ssize_t n = F.shape[0]
    cdef Py_ssize_t c = n // 2
    cdef cplx[::1] w = _roots(n)
    out_arr = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef Py_ssize_t jk, j, k, m, l, sj, sk
    cdef cplx acc
    for jk in prange(n * n, nogil=True, num_threads=num_threads, schedule="static"):
        j = jk // n
        k = jk % n
        acc = 0
        for m in range(n):
            sj = j - (m - c)
            if sj < 0 or sj >= n:
                continue
            for l in range(n):
                sk = k - (l - c)
                if sk < 0 or sk >= n:
                    continue
                acc = acc + S[m, l] * w[_mod((j - c) * (l - c) - (k - c) * (m - c), n)] * F[sj, sk]
        out[j, k] = acc
    return out_arr
