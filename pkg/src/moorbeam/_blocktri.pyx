# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled block Thomas kernel for the Newton system.

Forward elimination with per-block partially pivoted Gaussian elimination,
then back substitution.  Block size is a runtime parameter (6 for the beam
solver, but the kernel is generic)."""

from libc.stdlib cimport malloc, free
from libc.math cimport fabs
from libc.string cimport memcpy


class SingularBlockError(ArithmeticError):
    pass


cdef int _gauss_solve(double* a, double* b, int m, int nrhs) nogil:
    """In-place solve of a (m x m) system with nrhs right-hand sides stored
    row-major in b (m x nrhs).  Returns the failing row on singularity, else -1."""
    cdef int i, j, k, piv
    cdef double amax, v, f
    for k in range(m):
        piv = k
        amax = fabs(a[k * m + k])
        for i in range(k + 1, m):
            v = fabs(a[i * m + k])
            if v > amax:
                amax = v
                piv = i
        if amax == 0.0 or amax != amax:
            return k
        if piv != k:
            for j in range(m):
                v = a[k * m + j]
                a[k * m + j] = a[piv * m + j]
                a[piv * m + j] = v
            for j in range(nrhs):
                v = b[k * nrhs + j]
                b[k * nrhs + j] = b[piv * nrhs + j]
                b[piv * nrhs + j] = v
        for i in range(k + 1, m):
            f = a[i * m + k] / a[k * m + k]
            if f != 0.0:
                a[i * m + k] = 0.0
                for j in range(k + 1, m):
                    a[i * m + j] -= f * a[k * m + j]
                for j in range(nrhs):
                    b[i * nrhs + j] -= f * b[k * nrhs + j]
    for k in range(m - 1, -1, -1):
        for j in range(nrhs):
            v = b[k * nrhs + j]
            for i in range(k + 1, m):
                v -= a[k * m + i] * b[i * nrhs + j]
            b[k * nrhs + j] = v / a[k * m + k]
    return -1


def solve(double[:, :, ::1] lower, double[:, :, ::1] diag,
          double[:, :, ::1] upper, double[:, ::1] rhs):
    """Solve the block tri-diagonal system; mirrors _blocktri_py.solve."""
    cdef int n = diag.shape[0]
    cdef int m = diag.shape[1]
    cdef int k, i, j, l, bad
    cdef int aug_cols = m + 1
    import numpy as np
    c_np = np.empty((n, m, m))
    x_np = np.empty((n, m))
    cdef double[:, :, ::1] c = c_np
    cdef double[:, ::1] x = x_np
    cdef double* piv = <double*> malloc(m * m * sizeof(double))
    cdef double* aug = <double*> malloc(m * aug_cols * sizeof(double))
    if piv == NULL or aug == NULL:
        free(piv); free(aug)
        raise MemoryError()
    bad = -1
    with nogil:
        for k in range(n):
            # pivot block = diag[k] - lower[k] @ c[k-1]; rhs likewise reduced
            for i in range(m):
                for j in range(m):
                    piv[i * m + j] = diag[k, i, j]
                for j in range(m):
                    aug[i * aug_cols + j] = upper[k, i, j] if k < n - 1 else 0.0
                aug[i * aug_cols + m] = rhs[k, i]
            if k > 0:
                for i in range(m):
                    for l in range(m):
                        for j in range(m):
                            piv[i * m + j] -= lower[k, i, l] * c[k - 1, l, j]
                        aug[i * aug_cols + m] -= lower[k, i, l] * x[k - 1, l]
            bad = _gauss_solve(piv, aug, m, aug_cols)
            if bad >= 0:
                bad = k
                break
            for i in range(m):
                for j in range(m):
                    c[k, i, j] = aug[i * aug_cols + j]
                x[k, i] = aug[i * aug_cols + m]
        if bad < 0:
            # back substitution: x[k] -= c[k] @ x[k+1]
            for k in range(n - 2, -1, -1):
                for i in range(m):
                    for j in range(m):
                        x[k, i] -= c[k, i, j] * x[k + 1, j]
    free(piv)
    free(aug)
    if bad >= 0:
        raise SingularBlockError(f"singular diagonal block at cell {bad}")
    return x_np
