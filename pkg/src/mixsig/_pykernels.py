"""Pure Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` line for line and are used when the compiled
extension is unavailable (or when ``MIXSIG_PURE_PYTHON=1``).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import EnumerationBudgetExceeded

# relative slack on the radius test so boundary points are never lost to rounding
RADIUS_SLACK = 1e-10


def enumerate_ball(R, center, radius_sq, max_nodes, half):
    """All integer ``x`` with ``||R (x - center)||^2 <= radius_sq``.

    ``R`` is upper triangular with positive diagonal.  With ``half`` set the
    center must be zero; then only vectors whose last nonzero coordinate is
    positive are returned and the zero vector is skipped.  Levels are visited
    in Schnorr-Euchner zig-zag order.

    Returns ``(coeffs, sqlen, nodes)``.
    """
    R = np.asarray(R, dtype=float)
    y = np.asarray(center, dtype=float)
    n = R.shape[0]
    bound = radius_sq * (1.0 + RADIUS_SLACK) + 1e-300
    diag = [float(R[k, k]) for k in range(n)]
    mu = [[float(R[k, j]) / diag[k] for j in range(n)] for k in range(n)]
    yy = [float(v) for v in y]

    x = [0] * n
    c = [0.0] * n
    partial = [0.0] * (n + 1)
    dx = [0] * n
    ddx = [0] * n
    nonneg = [False] * n
    out_x: list = []
    out_l: list = []
    nodes = 0

    def setup(k):
        nonneg[k] = half and (k == n - 1 or (nonneg[k + 1] and x[k + 1] == 0))
        if nonneg[k]:
            x[k] = 1 if k == 0 else 0
        else:
            xi = math.floor(c[k] + 0.5)
            x[k] = xi
            step = 1 if c[k] >= xi else -1
            dx[k] = step
            ddx[k] = step

    def advance(k):
        if nonneg[k]:
            x[k] += 1
        else:
            x[k] += dx[k]
            ddx[k] = -ddx[k]
            dx[k] = ddx[k] - dx[k]

    k = n - 1
    c[k] = yy[k]
    setup(k)
    while True:
        diff = x[k] - c[k]
        t = diag[k] * diff
        val = partial[k + 1] + t * t
        nodes += 1
        if nodes > max_nodes:
            raise EnumerationBudgetExceeded(nodes, max_nodes)
        if val <= bound:
            if k == 0:
                out_x.append(list(x))
                out_l.append(val)
                advance(0)
            else:
                partial[k] = val
                k -= 1
                s = yy[k]
                row = mu[k]
                for j in range(k + 1, n):
                    s -= row[j] * (x[j] - yy[j])
                c[k] = s
                setup(k)
        else:
            k += 1
            if k == n:
                break
            advance(k)

    coeffs = np.array(out_x, dtype=np.int64).reshape(len(out_x), n)
    return coeffs, np.array(out_l, dtype=float), nodes


def cell_bounds(p, rad, cand, r, s, kind):
    """Bounds of ``f(v - q)`` for ``v`` in the box ``p +- rad`` and each row ``q`` of ``cand``.

    ``kind`` 0 is the norm form, 1 the squared Euclidean length.  Returns
    ``(upper, lower)`` arrays, one entry per candidate.
    """
    p = np.asarray(p, dtype=float)
    rad = np.asarray(rad, dtype=float)
    cand = np.asarray(cand, dtype=float)
    d = np.abs(p[None, :] - cand)
    hi = d + rad[None, :]
    lo = np.maximum(d - rad[None, :], 0.0)
    if kind == 1:
        return np.sum(hi * hi, axis=1), np.sum(lo * lo, axis=1)
    up = np.prod(hi[:, :r], axis=1)
    dn = np.prod(lo[:, :r], axis=1)
    for j in range(s):
        i = r + 2 * j
        up = up * (hi[:, i] * hi[:, i] + hi[:, i + 1] * hi[:, i + 1])
        dn = dn * (lo[:, i] * lo[:, i] + lo[:, i + 1] * lo[:, i + 1])
    return up, dn
