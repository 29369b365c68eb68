"""Homogeneous and inhomogeneous minima, norm-form closest vectors, covering radius.

The inhomogeneous estimator is a branch and bound over a fundamental
parallelepiped of an LLL reduced basis.  Each cell carries a list of candidate
lattice points; the cell's upper bound is ``min_q sup_{v in cell} f(v - q)``
evaluated with coordinate-wise interval bounds on the chart bounding box of
the cell.  The maximum of these over all cells bounds ``sup_v inf_q f(v - q)``
from above whatever the candidate lists are, so the upper bound is always
certified.  The lower side is the largest value seen at a cell center, which
is exact (hence certified) only when the candidate lists provably contain a
nearest point: for the Euclidean distance and for norm forms that are a
power of the Euclidean distance (signatures (1,0) and (0,1)).
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from . import kernels
from .core import Lattice, Signature, Vector, norm_form_chart
from .reduction import DEFAULT_NODE_BUDGET, MinimaProfile, lll, positive_r

__all__ = [
    "MinimumEstimate",
    "Cell",
    "RadiusPolicy",
    "BabaiResult",
    "homogeneous_minimum",
    "babai_reduce",
    "local_norm_minimum",
    "inhomogeneous_minimum",
    "covering_radius",
]

DEFAULT_TOL = 1e-3
DEFAULT_CELL_BUDGET = 10**6
ROUND_SIZE = 64
# outward rounding applied to float64 bounds
ROUNDING = 1e-12

NORM, EUCLID = 0, 1


@dataclass(frozen=True)
class MinimumEstimate:
    lower: float
    upper: float
    lower_certified: bool
    upper_certified: bool
    witnesses: tuple = ()  # chart coordinates of points attaining ``lower``
    effort: dict = field(default_factory=dict)
    status: str = "converged"
    history: tuple = ()  # global upper bound after each round

    @property
    def gap(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class Cell:
    """A box of the branch and bound.

    ``center`` is a point of V and ``half_widths`` the half side lengths of
    the chart box that encloses the cell.
    """

    center: Vector
    half_widths: tuple

    def __post_init__(self):
        if any(h < 0 for h in self.half_widths):
            raise ValueError("half widths must be nonnegative")


@dataclass(frozen=True)
class RadiusPolicy:
    """Enumeration radius for closest-vector searches: ``growth`` times the Babai residual."""

    growth: float = 2.0

    def __post_init__(self):
        if self.growth < 1:
            raise ValueError("growth must be at least 1")


@dataclass(frozen=True)
class BabaiResult:
    coords: tuple  # integer coordinates in the lattice basis
    vector: Vector
    residual: float


def _as_chart(v, signature: Signature) -> np.ndarray:
    if isinstance(v, Vector):
        if v.signature != signature:
            raise ValueError(f"vector of signature {v.signature}, lattice has {signature}")
        return np.array([float(x) for x in v.chart()])
    x = np.asarray(v, dtype=float)
    if x.shape != (signature.n,):
        raise ValueError(f"expected a chart vector of length {signature.n}")
    return x


def _f(diff: np.ndarray, signature: Signature, kind: int) -> np.ndarray:
    if kind == EUCLID:
        return np.sum(diff * diff, axis=-1)
    return norm_form_chart(diff, signature)


# -- homogeneous minimum --------------------------------------------------------


def homogeneous_minimum(
    lattice: Lattice,
    mode: str = "search",
    radius: float | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> MinimumEstimate:
    """``m(lattice) = inf N(lambda)`` over nonzero lattice vectors.

    ``mode="number_field"`` asserts that the lattice is ``sigma(O_K)``; then
    the value is exactly 1, attained at ``sigma(1)``.  ``mode="search"``
    returns the minimum over nonzero vectors of length at most ``radius``,
    an upper bound on ``m``.
    """
    sig = lattice.signature
    if mode == "number_field":
        ones = tuple([1.0] * sig.r + [1.0, 0.0] * sig.s)
        return MinimumEstimate(1.0, 1.0, True, True, (ones,), {"nodes": 0}, "exact")
    if mode != "search":
        raise ValueError(f"unknown mode {mode!r}")
    if radius is None or radius <= 0:
        raise ValueError("search mode needs a positive radius")
    B, U = lll(lattice.chart)
    R = positive_r(B)
    coeffs, _, nodes = kernels.enumerate_ball(R, np.zeros(lattice.n), radius * radius, budget, True)
    if len(coeffs) == 0:
        return MinimumEstimate(math.inf, math.inf, False, False, (), {"nodes": nodes}, "empty")
    pts = coeffs @ B.T
    vals = norm_form_chart(pts, sig)
    i = int(np.argmin(vals))
    val = float(vals[i])
    return MinimumEstimate(val, val, False, True, (tuple(pts[i].tolist()),), {"nodes": nodes}, "search")


# -- closest vectors -------------------------------------------------------------


def babai_reduce(v, lattice: Lattice, profile: MinimaProfile | None = None) -> BabaiResult:
    """Nearest-plane rounding of ``v`` to the lattice.

    With a profile the witnesses are used as the (possibly non-basis)
    generating set, so the residual is at most ``(sqrt(n)/2) mu_n``.
    Processing goes from the last vector to the first.
    """
    sig = lattice.signature
    x = _as_chart(v, sig)
    if profile is not None:
        W = np.array(profile.witnesses, dtype=np.int64)  # rows: witness coords
        basis = lattice.chart @ W.T
    else:
        W = np.eye(lattice.n, dtype=np.int64)
        basis = lattice.chart
    Q, R = np.linalg.qr(basis)
    y = Q.T @ x
    n = lattice.n
    k = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        t = (y[i] - R[i, i + 1 :] @ k[i + 1 :]) / R[i, i]
        k[i] = math.floor(t + 0.5)
    coords = k @ W
    point = lattice.point(coords)
    resid = float(np.linalg.norm(x - lattice.chart @ coords))
    return BabaiResult(tuple(int(c) for c in coords), point, resid)


def local_norm_minimum(
    v,
    lattice: Lattice,
    radius_policy: RadiusPolicy = RadiusPolicy(),
    budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[float, str]:
    """``min N(v - lambda)`` over lattice points near ``v``.

    Enumerates every lattice point within ``growth`` times the Babai residual.
    The result bounds ``inf_lambda N(v - lambda)`` from above; it is exact
    when ``N`` is a power of the Euclidean length (signatures (1,0), (0,1)).
    Returns ``(value, certified_as)``.
    """
    sig = lattice.signature
    x = _as_chart(v, sig)
    B, U = lll(lattice.chart)
    R = positive_r(B)
    center = np.linalg.solve(B, x)
    babai = babai_reduce(x, lattice)
    rad = radius_policy.growth * babai.residual
    coeffs, _, _ = kernels.enumerate_ball(R, center, rad * rad, budget, False)
    pts = coeffs @ B.T if len(coeffs) else (lattice.chart @ np.array(babai.coords))[None, :]
    val = float(np.min(norm_form_chart(x[None, :] - pts, sig)))
    return val, ("exact" if _norm_is_euclidean(sig) else "upper")


def _norm_is_euclidean(sig: Signature) -> bool:
    return (sig.r, sig.s) in ((1, 0), (0, 1))


# -- branch and bound ----------------------------------------------------------


@dataclass
class _Problem:
    B: np.ndarray  # reduced basis, columns
    absB: np.ndarray
    col_norms: np.ndarray
    origin: np.ndarray  # chart offset of the parallelepiped origin
    cand: np.ndarray  # candidate lattice points, chart rows
    r: int
    s: int
    kind: int


def _eval_cell(prob: _Problem, lo: np.ndarray, hi: np.ndarray, idx: np.ndarray, parent_upper: float):
    """Bounds for one cell: ``(upper, center_value, kept_idx, center_chart)``."""
    c_u = 0.5 * (lo + hi)
    h_u = 0.5 * (hi - lo)
    p = prob.B @ c_u + prob.origin
    rad = prob.absB @ h_u
    q = prob.cand[idx]
    up, dn = kernels.cell_bounds(p, rad, q, prob.r, prob.s, prob.kind)
    best = float(up.min()) * (1 + ROUNDING)
    keep = idx[dn * (1 - ROUNDING) <= best]
    at_center, _ = kernels.cell_bounds(p, np.zeros_like(p), prob.cand[keep], prob.r, prob.s, prob.kind)
    return min(best, parent_upper), float(at_center.min()), keep, p


def _eval_batch(prob: _Problem, jobs: list) -> list:
    return [_eval_cell(prob, *job) for job in jobs]


def _branch_and_bound(
    lattice: Lattice,
    kind: int,
    tol: float,
    budget: int,
    growth: float,
    target: float | None,
    origin: Sequence[int] | None,
    workers: int,
    enum_budget: int,
):
    sig = lattice.signature
    n = lattice.n
    B, _ = lll(lattice.chart)
    R = positive_r(B)
    absB = np.abs(B)
    org = np.zeros(n) if origin is None else B @ np.asarray(origin, dtype=float)
    # nearest-plane covering bound: every point is within rho of the lattice
    rho = 0.5 * math.sqrt(float(np.sum(np.diag(R) ** 2)))

    lo = np.zeros(n)
    hi = np.ones(n)
    hi[0] = 0.5  # v and -v have the same value modulo the lattice
    root_center = B @ (0.5 * (lo + hi)) + org
    root_rad = float(np.linalg.norm(absB @ (0.5 * (hi - lo))))
    search = root_rad + growth * rho
    center_coords = np.linalg.solve(B, root_center)
    coeffs, _, nodes = kernels.enumerate_ball(R, center_coords, search * search, enum_budget, False)
    prob = _Problem(B, absB, np.linalg.norm(B, axis=0), org, coeffs @ B.T, sig.r, sig.s, kind)

    counter = 0
    heap: list = []
    lower = 0.0
    witness = None
    discarded_max = 0.0
    history: list[float] = []
    cells = 0

    def push(upper, lo_, hi_, idx):
        nonlocal counter, discarded_max
        if upper <= lower:
            discarded_max = max(discarded_max, upper)
            return
        heapq.heappush(heap, (-upper, counter, lo_, hi_, idx))
        counter += 1

    up0, val0, keep0, p0 = _eval_cell(prob, lo, hi, np.arange(len(prob.cand)), math.inf)
    cells += 1
    lower, witness = val0, p0
    push(up0, lo, hi, keep0)

    def global_upper():
        top = -heap[0][0] if heap else 0.0
        return max(top, discarded_max)

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    status = "converged"
    try:
        while True:
            U = global_upper()
            history.append(U)
            if U - lower <= tol * U or not heap:
                break
            if target is not None and U <= target:
                status = "target_reached"
                break
            if cells >= budget:
                status = "budget_exhausted"
                break
            # one round: the worst cells, split along the longest edge
            jobs = []
            while heap and len(jobs) < 2 * ROUND_SIZE:
                negu, _, clo, chi, idx = heapq.heappop(heap)
                j = int(np.argmax(prob.col_norms * (chi - clo)))
                mid = 0.5 * (clo[j] + chi[j])
                a_hi = chi.copy()
                a_hi[j] = mid
                b_lo = clo.copy()
                b_lo[j] = mid
                jobs.append((clo, a_hi, idx, -negu))
                jobs.append((b_lo, chi, idx, -negu))
            if pool is not None:
                chunk = max(1, math.ceil(len(jobs) / workers))
                parts = [jobs[i : i + chunk] for i in range(0, len(jobs), chunk)]
                results = [res for part in pool.map(_eval_batch, [prob] * len(parts), parts) for res in part]
            else:
                results = _eval_batch(prob, jobs)
            cells += len(jobs)
            for (clo, chi, _, _), (up, val, keep, p) in zip(jobs, results):
                if val > lower:
                    lower, witness = val, p
            for (clo, chi, _, _), (up, val, keep, p) in zip(jobs, results):
                push(up, clo, chi, keep)
    finally:
        if pool is not None:
            pool.shutdown()

    upper = global_upper()
    effort = {"cells": cells, "rounds": len(history), "nodes": int(nodes), "candidates": int(len(prob.cand))}
    return upper, lower, witness, effort, status, tuple(history)


def inhomogeneous_minimum(
    lattice: Lattice,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_CELL_BUDGET,
    *,
    growth: float = 2.0,
    target: float | None = None,
    origin: Sequence[int] | None = None,
    workers: int = 1,
    enum_budget: int = DEFAULT_NODE_BUDGET,
) -> MinimumEstimate:
    """Two-sided estimate of ``M(lattice) = sup_v inf_lambda N(v - lambda)``.

    The upper bound is certified.  The lower estimate is the largest
    candidate-restricted value seen at a cell center; it is certified only in
    signatures (1,0) and (0,1).  Stops when the relative gap is at most
    ``tol``, when the upper bound reaches ``target``, or after ``budget``
    cells (reported in ``status``).  ``origin`` moves the fundamental domain
    by a lattice vector (integer coordinates of the reduced basis).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    upper, lower, witness, effort, status, history = _branch_and_bound(
        lattice, NORM, tol, budget, growth, target, origin, workers, enum_budget
    )
    exact = _norm_is_euclidean(lattice.signature)
    if not exact and witness is not None:
        # a wider search at the witness can only lower the heuristic value
        val, _ = local_norm_minimum(witness, lattice, RadiusPolicy(2 * growth), enum_budget)
        lower = min(lower, val)
    lower = min(lower * (1 - ROUNDING), upper)
    wit = (tuple(float(x) for x in witness),) if witness is not None else ()
    return MinimumEstimate(lower, upper, exact, True, wit, effort, status, history)


def covering_radius(
    lattice: Lattice,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_CELL_BUDGET,
    *,
    workers: int = 1,
    enum_budget: int = DEFAULT_NODE_BUDGET,
) -> MinimumEstimate:
    """Certified two-sided bounds on ``sup_v min_lambda ||v - lambda||``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    # the squared problem with tolerance tol keeps the radius gap below tol
    upper, lower, witness, effort, status, history = _branch_and_bound(
        lattice, EUCLID, tol, budget, 1.0, None, None, workers, enum_budget
    )
    lo = math.sqrt(max(lower, 0.0) * (1 - ROUNDING))
    up = math.sqrt(upper)
    wit = (tuple(float(x) for x in witness),) if witness is not None else ()
    return MinimumEstimate(
        min(lo, up), up, True, True, wit, effort, status, tuple(math.sqrt(u) for u in history)
    )
