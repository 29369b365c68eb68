"""LLL reduction, successive minima by enumeration, Hermite constants.

Enumeration runs in float64 on an LLL reduced basis (compiled kernel when
available); the lengths reported for witnesses are then recomputed from their
integer coordinates at the lattice's working precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import kernels
from ._linalg import IndependenceTracker
from .core import Lattice, Vector, lattice_from_basis
from .errors import PrecisionExhausted

DEFAULT_NODE_BUDGET = 10**7
# lengths closer than this (relative) are ties, broken lexicographically
TIE_TOLERANCE = 1e-12

__all__ = [
    "MinimaProfile",
    "HermiteTable",
    "HERMITE",
    "hermite_gamma",
    "lll",
    "lll_reduce",
    "lll_reduce_with_transform",
    "is_lll_reduced",
    "positive_r",
    "successive_minima",
    "minima_float",
    "MinkowskiCheck",
    "verify_minkowski_bound",
]


# -- Hermite constants -------------------------------------------------------


@dataclass(frozen=True)
class HermiteTable:
    """``gamma_n ** n`` for the dimensions where it is known exactly.

    Outside the table ``gamma_n`` is replaced by the upper estimate ``n / 2``
    (valid for ``n >= 4``), flagged as inexact.
    """

    exact_powers: tuple = (
        (1, Fraction(1)),
        (2, Fraction(4, 3)),
        (3, Fraction(2)),
        (4, Fraction(4)),
        (5, Fraction(8)),
        (6, Fraction(64, 3)),
        (7, Fraction(64)),
        (8, Fraction(256)),
    )

    def power(self, n: int) -> Fraction | None:
        return dict(self.exact_powers).get(n)

    def value(self, n: int) -> tuple[float, bool]:
        if n < 1:
            raise ValueError("Hermite constant needs n >= 1")
        p = self.power(n)
        if p is not None:
            return float(p) ** (1.0 / n), True
        return n / 2, False


HERMITE = HermiteTable()


def hermite_gamma(n: int) -> tuple[float, bool]:
    """Return ``(gamma_n, exact)``; ``exact`` is False when the ``n/2`` estimate is used."""
    return HERMITE.value(n)


# -- LLL ---------------------------------------------------------------------


def positive_r(B: np.ndarray) -> np.ndarray:
    """R factor of the QR decomposition of ``B`` (columns), with positive diagonal."""
    R = np.linalg.qr(B, mode="r")
    sign = np.where(np.diag(R) < 0, -1.0, 1.0)
    return R * sign[:, None]


def lll(B: np.ndarray, delta: float = 0.99, max_iter: int = 100_000) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the columns of ``B``.

    Returns ``(B @ U, U)`` where ``U`` is the integer unimodular transform.
    Raises :class:`PrecisionExhausted` if Gram-Schmidt degenerates in float64.
    """
    if not 0.25 < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    B = np.array(B, dtype=float)
    n = B.shape[1]
    U = np.eye(n, dtype=np.int64)
    if n == 1:
        return B, U
    scale = np.max(np.abs(B))
    k = 1
    it = 0
    while k < n:
        it += 1
        if it > max_iter:
            raise PrecisionExhausted("LLL did not terminate; increase precision")
        R = np.linalg.qr(B, mode="r")
        for j in range(k - 1, -1, -1):
            q = round(R[j, k] / R[j, j])
            if q:
                B[:, k] -= q * B[:, j]
                U[:, k] -= q * U[:, j]
                R[:, k] -= q * R[:, j]
        if abs(R[k, k]) <= 1e-13 * scale or abs(R[k - 1, k - 1]) <= 1e-13 * scale:
            raise PrecisionExhausted("Gram-Schmidt vector vanished in float64; increase precision")
        if np.max(np.abs(U)) > 2**50:
            raise PrecisionExhausted("transform entries exceed float64 integer range")
        mu = R[k - 1, k] / R[k - 1, k - 1]
        if R[k, k] ** 2 >= (delta - mu * mu) * R[k - 1, k - 1] ** 2:
            k += 1
        else:
            B[:, [k - 1, k]] = B[:, [k, k - 1]]
            U[:, [k - 1, k]] = U[:, [k, k - 1]]
            k = max(k - 1, 1)
    return B, U


def is_lll_reduced(B: np.ndarray, delta: float = 0.99, eps: float = 1e-9) -> bool:
    R = np.linalg.qr(np.asarray(B, dtype=float), mode="r")
    n = R.shape[0]
    for k in range(1, n):
        for j in range(k):
            if abs(R[j, k] / R[j, j]) > 0.5 + eps:
                return False
        mu = R[k - 1, k] / R[k - 1, k - 1]
        if R[k, k] ** 2 < (delta - mu * mu) * R[k - 1, k - 1] ** 2 * (1 - eps):
            return False
    return True


def lll_reduce_with_transform(lattice: Lattice, delta: float = 0.99) -> tuple[Lattice, np.ndarray]:
    _, U = lll(lattice.chart, delta)
    basis = [lattice.point(U[:, j]) for j in range(lattice.n)]
    return lattice_from_basis(lattice.signature, basis, lattice.precision), U


def lll_reduce(lattice: Lattice, delta: float = 0.99) -> Lattice:
    """Same lattice, LLL reduced basis (computed exactly from integer combinations)."""
    return lll_reduce_with_transform(lattice, delta)[0]


# -- successive minima ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MinimaProfile:
    mu: tuple  # floats, nondecreasing
    mu_sq: tuple  # squared lengths at working precision
    witnesses: tuple  # integer coordinates in the lattice basis
    witness_vectors: tuple  # Vectors
    nodes: int = 0

    @property
    def n(self) -> int:
        return len(self.mu)

    def witness_chart(self) -> np.ndarray:
        """Float chart matrix whose columns are the witnesses in order."""
        cols = [[float(x) for x in w.chart()] for w in self.witness_vectors]
        return np.array(cols).T


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _ordered(coords: np.ndarray, sq: np.ndarray) -> list[int]:
    """Indices sorted by length, ties (relative TIE_TOLERANCE) by lexicographic coordinates."""
    idx = np.argsort(sq, kind="stable")
    out: list[int] = []
    i = 0
    m = len(idx)
    while i < m:
        j = i + 1
        base = sq[idx[i]]
        while j < m and sq[idx[j]] <= base * (1 + TIE_TOLERANCE) + 1e-300:
            j += 1
        block = sorted(idx[i:j].tolist(), key=lambda t: tuple(coords[t].tolist()))
        out.extend(block)
        i = j
    return out


def minima_float(
    chart: np.ndarray, budget: int = DEFAULT_NODE_BUDGET, delta: float = 0.99
) -> tuple[list[float], np.ndarray, int]:
    """Successive minima in float64.

    Returns ``(squared_lengths, coords, nodes)``; ``coords[i]`` are the integer
    coordinates of the ``i``-th witness in the basis given by the columns of
    ``chart``.
    """
    n = chart.shape[1]
    Bred, U = lll(chart, delta)
    R = positive_r(Bred)
    radius = float(np.linalg.norm(Bred[:, 0]))
    zero = np.zeros(n)
    nodes_total = 0
    while True:
        coeffs, sq, nodes = kernels.enumerate_ball(R, zero, radius * radius, budget - nodes_total, True)
        nodes_total += nodes
        orig = coeffs @ U.T
        orig = np.array([_canonical_sign(v) for v in orig], dtype=np.int64).reshape(-1, n)
        tracker = IndependenceTracker(n)
        chosen: list[int] = []
        for i in _ordered(orig, sq):
            if tracker.add(orig[i].tolist()):
                chosen.append(i)
                if len(chosen) == n:
                    break
        if len(chosen) == n:
            return [float(sq[i]) for i in chosen], orig[chosen], nodes_total
        radius *= 2.0


def successive_minima(lattice: Lattice, budget: int = DEFAULT_NODE_BUDGET) -> MinimaProfile:
    """Exact successive minima with witnesses (raises on node budget overrun)."""
    _, coords, nodes = minima_float(lattice.chart, budget)
    with lattice.precision.context():
        items = [(lattice.squared_length(c), tuple(int(x) for x in c)) for c in coords]
        # float ordering can disagree with high precision inside rounding noise
        items.sort(key=lambda t: t[0])
        mu_sq = tuple(t[0] for t in items)
        mu = tuple(float(mpmath.sqrt(q)) for q in mu_sq)
    witnesses = tuple(t[1] for t in items)
    vectors = tuple(lattice.point(c) for c in witnesses)
    return MinimaProfile(mu, mu_sq, witnesses, vectors, nodes)


@dataclass(frozen=True)
class MinkowskiCheck:
    t: int
    lhs: float
    rhs: float
    holds: bool
    gamma_exact: bool


def verify_minkowski_bound(
    lattice: Lattice, t: int, profile: MinimaProfile | None = None, tol: float = 1e-9
) -> MinkowskiCheck:
    """Check ``mu_1 ... mu_t <= gamma_n^{t/2} det^{t/n}``."""
    n = lattice.n
    if not 1 <= t <= n:
        raise ValueError(f"t must lie in [1, {n}]")
    if profile is None:
        profile = successive_minima(lattice)
    gamma, exact = hermite_gamma(n)
    lhs = math.prod(profile.mu[:t])
    rhs = gamma ** (t / 2) * lattice.det ** (t / n)
    return MinkowskiCheck(t, lhs, rhs, lhs <= rhs * (1 + tol), exact)
