# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: lattice point enumeration and cell bounds.

Semantics match ``_pykernels`` exactly; see there for documentation.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

from .errors import EnumerationBudgetExceeded

cnp.import_array()

cdef enum:
    MAXDIM = 64
cdef double RADIUS_SLACK = 1e-10


def enumerate_ball(R, center, double radius_sq, long long max_nodes, bint half):
    cdef double[:, ::1] Rm = np.ascontiguousarray(R, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(center, dtype=np.float64)
    cdef int n = Rm.shape[0]
    if n > MAXDIM:
        raise ValueError("dimension too large for the compiled kernel")
    cdef double bound = radius_sq * (1.0 + RADIUS_SLACK) + 1e-300
    cdef double diag[MAXDIM]
    cdef double mu[MAXDIM][MAXDIM]
    cdef long long x[MAXDIM]
    cdef double c[MAXDIM]
    cdef double partial[MAXDIM + 1]
    cdef long long dx[MAXDIM]
    cdef long long ddx[MAXDIM]
    cdef bint nonneg[MAXDIM]
    cdef int i, j, k
    cdef long long nodes = 0
    cdef double diff, t, val, s
    cdef long long xi

    for k in range(n):
        diag[k] = Rm[k, k]
        for j in range(n):
            mu[k][j] = Rm[k, j] / diag[k]
        x[k] = 0
        c[k] = 0.0
        partial[k] = 0.0
        dx[k] = 0
        ddx[k] = 0
        nonneg[k] = False
    partial[n] = 0.0

    cdef Py_ssize_t cap = 64, count = 0
    buf_x = np.empty((cap, n), dtype=np.int64)
    buf_l = np.empty(cap, dtype=np.float64)
    cdef long long[:, ::1] bx = buf_x
    cdef double[::1] bl = buf_l

    k = n - 1
    c[k] = y[k]
    # setup level k
    nonneg[k] = half
    if nonneg[k]:
        x[k] = 1 if k == 0 else 0
    else:
        xi = <long long> floor(c[k] + 0.5)
        x[k] = xi
        dx[k] = 1 if c[k] >= xi else -1
        ddx[k] = dx[k]

    while True:
        diff = x[k] - c[k]
        t = diag[k] * diff
        val = partial[k + 1] + t * t
        nodes += 1
        if nodes > max_nodes:
            raise EnumerationBudgetExceeded(nodes, max_nodes)
        if val <= bound:
            if k == 0:
                if count == cap:
                    cap *= 2
                    buf_x = np.resize(buf_x, (cap, n))
                    buf_l = np.resize(buf_l, cap)
                    bx = buf_x
                    bl = buf_l
                for j in range(n):
                    bx[count, j] = x[j]
                bl[count] = val
                count += 1
                # advance level 0
                if nonneg[0]:
                    x[0] += 1
                else:
                    x[0] += dx[0]
                    ddx[0] = -ddx[0]
                    dx[0] = ddx[0] - dx[0]
            else:
                partial[k] = val
                k -= 1
                s = y[k]
                for j in range(k + 1, n):
                    s -= mu[k][j] * (x[j] - y[j])
                c[k] = s
                nonneg[k] = half and nonneg[k + 1] and x[k + 1] == 0
                if nonneg[k]:
                    x[k] = 1 if k == 0 else 0
                else:
                    xi = <long long> floor(c[k] + 0.5)
                    x[k] = xi
                    dx[k] = 1 if c[k] >= xi else -1
                    ddx[k] = dx[k]
        else:
            k += 1
            if k == n:
                break
            if nonneg[k]:
                x[k] += 1
            else:
                x[k] += dx[k]
                ddx[k] = -ddx[k]
                dx[k] = ddx[k] - dx[k]

    return buf_x[:count].copy(), buf_l[:count].copy(), nodes


def cell_bounds(p, rad, cand, int r, int s, int kind):
    cdef double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef double[::1] rv = np.ascontiguousarray(rad, dtype=np.float64)
    cdef double[:, ::1] q = np.ascontiguousarray(cand, dtype=np.float64)
    cdef Py_ssize_t m = q.shape[0]
    cdef int n = pv.shape[0]
    up_arr = np.empty(m, dtype=np.float64)
    lo_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] up = up_arr
    cdef double[::1] lo = lo_arr
    cdef Py_ssize_t a
    cdef int i, j
    cdef double d, h, l, d2, h2, l2, u, w
    for a in range(m):
        if kind == 1:
            u = 0.0
            w = 0.0
            for i in range(n):
                d = fabs(pv[i] - q[a, i])
                h = d + rv[i]
                l = d - rv[i]
                if l < 0.0:
                    l = 0.0
                u += h * h
                w += l * l
        else:
            u = 1.0
            w = 1.0
            for i in range(r):
                d = fabs(pv[i] - q[a, i])
                l = d - rv[i]
                if l < 0.0:
                    l = 0.0
                u *= d + rv[i]
                w *= l
            for j in range(s):
                i = r + 2 * j
                d = fabs(pv[i] - q[a, i])
                d2 = fabs(pv[i + 1] - q[a, i + 1])
                h = d + rv[i]
                h2 = d2 + rv[i + 1]
                l = d - rv[i]
                if l < 0.0:
                    l = 0.0
                l2 = d2 - rv[i + 1]
                if l2 < 0.0:
                    l2 = 0.0
                u *= h * h + h2 * h2
                w *= l * l + l2 * l2
        up[a] = u
        lo[a] = w
    return up_arr, lo_arr
