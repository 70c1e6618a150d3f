# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled two-stage Gauss-Legendre kernel (see ``_kernels_py`` for the reference)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.string cimport memcpy

cnp.import_array()


cdef inline void _bracket(const double* a, const double* b, double* out, int m,
                          const int* L, const int* R, const int* S,
                          const double* V, int nnz) noexcept nogil:
    cdef int i, p
    for i in range(m):
        out[i] = 0.0
    for p in range(nnz):
        out[L[p]] += V[p] * a[R[p]] * b[S[p]]


cdef inline void _field(const double* z, double* out, const double* k, int m,
                        int with_x, const int* L, const int* R, const int* S,
                        const double* V, int nnz) noexcept nogil:
    cdef int i
    cdef int off = m if with_x else 0
    cdef const double* y = z + off
    cdef const double* v = z + off + m
    if with_x:
        _bracket(y, z, out, m, L, R, S, V, nnz)
    for i in range(m):
        out[off + i] = v[i]
    _bracket(y, v, out + off + m, m, L, R, S, V, nnz)
    for i in range(m):
        out[off + m + i] += k[i]


def integrate(z0, k, double h, int steps, nz_l, nz_r, nz_s, nz_val, bint with_x,
              bint store, double tol=1e-14, double fail_tol=1e-12, int max_sweeps=100):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] kk = np.ascontiguousarray(k, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zz = np.array(z0, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] L = np.ascontiguousarray(nz_l, dtype=np.intc)
    cdef cnp.ndarray[int, ndim=1] R = np.ascontiguousarray(nz_r, dtype=np.intc)
    cdef cnp.ndarray[int, ndim=1] S = np.ascontiguousarray(nz_s, dtype=np.intc)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] V = np.ascontiguousarray(nz_val, dtype=np.float64)
    cdef int m = kk.shape[0]
    cdef int d = zz.shape[0]
    cdef int nnz = V.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] traj
    cdef cnp.ndarray[cnp.float64_t, ndim=1] work = np.empty(6 * d, dtype=np.float64)
    cdef double* z = &zz[0]
    cdef double* f1 = &work[0]
    cdef double* f2 = f1 + d
    cdef double* g1 = f2 + d
    cdef double* g2 = g1 + d
    cdef double* s1 = g2 + d
    cdef double* s2 = s1 + d
    cdef const double* kp = &kk[0]
    cdef const int* Lp = &L[0] if nnz else NULL
    cdef const int* Rp = &R[0] if nnz else NULL
    cdef const int* Sp = &S[0] if nnz else NULL
    cdef const double* Vp = &V[0] if nnz else NULL
    cdef double sq36 = sqrt(3.0) / 6.0
    cdef double a11 = 0.25, a12 = 0.25 - sq36, a21 = 0.25 + sq36, a22 = 0.25
    cdef double habs = fabs(h)
    cdef double res = 0.0, prev, diff, scale
    cdef int step, sweep, i
    cdef int status = 0, fail_step = -1

    if store:
        traj = np.empty((steps + 1, d), dtype=np.float64)
        memcpy(&traj[0, 0], z, d * sizeof(double))

    with nogil:
        for step in range(steps):
            _field(z, f1, kp, m, with_x, Lp, Rp, Sp, Vp, nnz)
            memcpy(f2, f1, d * sizeof(double))
            scale = 1.0
            for i in range(d):
                if fabs(z[i]) > scale:
                    scale = fabs(z[i])
            prev = 1e300
            res = 1e300
            for sweep in range(max_sweeps):
                for i in range(d):
                    s1[i] = z[i] + h * (a11 * f1[i] + a12 * f2[i])
                    s2[i] = z[i] + h * (a21 * f1[i] + a22 * f2[i])
                _field(s1, g1, kp, m, with_x, Lp, Rp, Sp, Vp, nnz)
                _field(s2, g2, kp, m, with_x, Lp, Rp, Sp, Vp, nnz)
                res = 0.0
                for i in range(d):
                    diff = fabs(g1[i] - f1[i])
                    if diff > res or diff != diff:  # keep NaN sticky
                        res = diff
                    diff = fabs(g2[i] - f2[i])
                    if diff > res or diff != diff:
                        res = diff
                res = habs * res / scale
                memcpy(f1, g1, d * sizeof(double))
                memcpy(f2, g2, d * sizeof(double))
                if res < tol:
                    break
                if res <= fail_tol and res >= prev:
                    break
                prev = res
            if not res <= fail_tol:
                status = 1
                fail_step = step
                break
            for i in range(d):
                z[i] = z[i] + 0.5 * h * (f1[i] + f2[i])
            if store:
                memcpy(&traj[step + 1, 0], z, d * sizeof(double))

    if status:
        return (traj[:fail_step + 1] if store else zz), status, fail_step, res
    return (traj if store else zz), 0, -1, 0.0
