"""The diagonal flow on lattices and the search for semi-well-rounded points.

A point ``g`` of the diagonal group is stored through its log coordinates,
one per place, with weighted sum zero (complex places count twice).  The
search minimizes ``f(g) = mu_n(g L) / mu_{s+1}(g L)`` over the torus spanned
by unit log vectors (or a box when no units are known).  ``f >= 1`` with
equality exactly at the semi-well-rounded points.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from ._linalg import rank_exact, solve_exact
from .core import Lattice, Signature, lattice_from_rows
from .errors import EnumerationBudgetExceeded
from .minima import MinimumEstimate
from .numberfield import DiagonalElement
from .reduction import (
    DEFAULT_NODE_BUDGET,
    MinimaProfile,
    hermite_gamma,
    lll,
    minima_float,
    positive_r,
    successive_minima,
)
from . import kernels

__all__ = [
    "TorusPoint",
    "DegenerateData",
    "OrbitSearchResult",
    "ChainCheck",
    "apply_flow",
    "flow_chart",
    "objective",
    "degenerate_set",
    "search_semi_wellrounded",
    "certify_bound_chain",
]

DEFAULT_SEARCH_TOL = 1e-6
GRID_POINTS = 32
GRID_CAP = 4096
STEP_FLOOR = 1e-9
BOX_HALF_WIDTH = 3.0
DEGENERATE_MARGIN = 1e-6


@dataclass(frozen=True)
class TorusPoint:
    signature: Signature
    log_coords: tuple

    def __post_init__(self):
        if len(self.log_coords) != self.signature.places:
            raise ValueError("need one log coordinate per place")
        total = math.fsum(w * x for w, x in zip(self.signature.weights, self.log_coords))
        if abs(total) > 1e-12 * max(1.0, max(abs(x) for x in self.log_coords)):
            raise ValueError(f"weighted log sum is {total}, not 0")

    @classmethod
    def identity(cls, signature: Signature) -> "TorusPoint":
        return cls(signature, (0.0,) * signature.places)

    @classmethod
    def from_diagonal(cls, d: DiagonalElement) -> "TorusPoint":
        return cls(d.signature, d.log_coords())

    def diagonal(self) -> DiagonalElement:
        return DiagonalElement(self.signature, tuple(math.exp(x) for x in self.log_coords))

    def chart_scales(self) -> np.ndarray:
        """Per-chart-coordinate scale factors."""
        r = self.signature.r
        e = np.exp(np.asarray(self.log_coords, dtype=float))
        return np.concatenate([e[:r], np.repeat(e[r:], 2)])

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(self.signature, tuple(a + b for a, b in zip(self.log_coords, other.log_coords)))


@dataclass(frozen=True)
class DegenerateData:
    g: TorusPoint
    D: tuple  # integer coordinates (original basis) of vectors shorter than mu_n
    span_dim: int
    empty_by_margin: bool = False


@dataclass(frozen=True)
class OrbitSearchResult:
    g_star: TorusPoint
    profile: MinimaProfile
    ratio: float
    span_dim: int
    converged: bool
    mode: str = "torus"  # "torus", "box" (torus not covered) or "point"
    evaluations: int = 0
    trace: tuple = ()  # (log_coords, f) records of evaluated points
    converged_starts: tuple = ()  # log coords of every converged restart


@dataclass(frozen=True)
class ChainCheck:
    name: str
    lhs: float
    rhs: float
    holds: bool


# -- the action -------------------------------------------------------------------


def flow_chart(g: TorusPoint, chart: np.ndarray) -> np.ndarray:
    """Float64 chart matrix of ``g L`` from that of ``L``."""
    return g.chart_scales()[:, None] * chart


def apply_flow(g: TorusPoint, lattice: Lattice) -> Lattice:
    """``g L`` at the lattice's working precision."""
    if g.signature != lattice.signature:
        raise ValueError(f"torus point of signature {g.signature}, lattice has {lattice.signature}")
    sig = lattice.signature
    n = lattice.n
    with lattice.precision.context():
        e = [mpmath.exp(mpmath.mpf(x)) for x in g.log_coords]
        scale = e[: sig.r] + [x for x in e[sig.r :] for _ in (0, 1)]
        rows = [[lattice.chart_matrix[i, j] * scale[i] for i in range(n)] for j in range(n)]
    return lattice_from_rows(sig, rows, lattice.precision)


def objective(chart: np.ndarray, signature: Signature, budget: int = DEFAULT_NODE_BUDGET) -> float:
    """``mu_n / mu_{s+1}`` of the lattice with the given chart (float64)."""
    sq, _, _ = minima_float(chart, budget)
    return math.sqrt(sq[-1] / sq[signature.s])


# -- degenerate sets ---------------------------------------------------------------


def degenerate_set(
    g: TorusPoint,
    lattice: Lattice,
    margin: float = DEGENERATE_MARGIN,
    budget: int = DEFAULT_NODE_BUDGET,
) -> DegenerateData:
    """All vectors of ``g L`` with length below ``mu_n (1 - margin)`` and the dimension of their span."""
    chart = flow_chart(g, lattice.chart)
    sq, _, _ = minima_float(chart, budget)
    limit = math.sqrt(sq[-1]) * (1 - margin)
    B, U = lll(chart)
    R = positive_r(B)
    coeffs, lens, _ = kernels.enumerate_ball(R, np.zeros(lattice.n), limit * limit, budget, True)
    keep = lens < limit * limit
    coeffs = coeffs[keep] @ U.T
    vecs = sorted({tuple(int(x) for x in sgn * c) for c in coeffs for sgn in (1, -1)})
    dim = rank_exact(vecs, lattice.n)
    return DegenerateData(g, tuple(vecs), dim, len(vecs) == 0)


# -- search ---------------------------------------------------------------------------


def _hyperplane_basis(signature: Signature) -> np.ndarray:
    """Columns spanning the weighted-sum-zero hyperplane of log space."""
    k = signature.places - 1
    w = np.asarray(signature.weights, dtype=float)
    M = np.zeros((signature.places, k))
    for i in range(k):
        M[i, i] = 1.0
        M[-1, i] = -w[i] / w[-1]
    return M


def _evaluate(args) -> float:
    logs, chart, sig, budget = args
    g = TorusPoint(sig, tuple(logs))
    try:
        return objective(flow_chart(g, chart), sig, budget)
    except EnumerationBudgetExceeded:
        return math.inf


class _Evaluator:
    def __init__(self, lattice: Lattice, directions: np.ndarray, budget: int, workers: int):
        self.chart = np.array(lattice.chart)
        self.sig = lattice.signature
        self.dirs = directions  # columns: log vectors of the parameter axes
        self.budget = budget
        self.pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
        self.count = 0
        self.trace: list = []

    def logs(self, c: np.ndarray) -> np.ndarray:
        x = self.dirs @ c
        # remove rounding drift from the weighted-sum constraint
        w = np.asarray(self.sig.weights, dtype=float)
        return x - w * (w @ x) / (w @ w) if len(x) else x

    def __call__(self, points: list) -> list[float]:
        args = [(self.logs(np.asarray(c, dtype=float)), self.chart, self.sig, self.budget) for c in points]
        if self.pool is not None and len(args) > 1:
            vals = list(self.pool.map(_evaluate, args, chunksize=max(1, len(args) // 16)))
        else:
            vals = [_evaluate(a) for a in args]
        self.count += len(vals)
        self.trace.extend((tuple(float(v) for v in a[0]), f) for a, f in zip(args, vals))
        return vals

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def _pattern_directions(k: int) -> list[np.ndarray]:
    out = []
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        out += [e, -e]
    for i, j in itertools.combinations(range(k), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            e = np.zeros(k)
            e[i], e[j] = si, sj
            out.append(e / math.sqrt(2))
    return out


def _descend(ev: _Evaluator, start: np.ndarray, f0: float, step: float, tol: float) -> tuple[np.ndarray, float]:
    """Pattern search: accept the best improving neighbour, else halve the step."""
    x, fx = start.copy(), f0
    dirs = _pattern_directions(len(x))
    while step >= STEP_FLOOR and fx - 1 > tol:
        trial = [x + step * d for d in dirs]
        vals = ev(trial)
        i = int(np.argmin(vals))
        if vals[i] < fx:
            x, fx = trial[i], vals[i]
        else:
            step *= 0.5
    return x, fx


def _canonical(c: np.ndarray, dirs: np.ndarray, periodic: bool) -> np.ndarray:
    """Translate by the period lattice to the representative nearest the identity."""
    if not periodic or len(c) == 0:
        return c
    base = np.floor(c + 0.5)
    best = None
    for shift in itertools.product((-1, 0, 1), repeat=len(c)):
        cand = c - base - np.asarray(shift, dtype=float)
        logs = dirs @ cand
        key = (round(float(np.linalg.norm(logs)), 6), tuple(logs.tolist()))
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def search_semi_wellrounded(
    lattice: Lattice,
    units: Sequence[DiagonalElement] | None = None,
    *,
    box: float = BOX_HALF_WIDTH,
    tol: float = DEFAULT_SEARCH_TOL,
    restarts: int = 4,
    grid: int = GRID_POINTS,
    workers: int = 1,
    budget: int = DEFAULT_NODE_BUDGET,
) -> OrbitSearchResult:
    """Multi-start search for ``g`` with ``mu_{s+1}(gL) = ... = mu_n(gL)``.

    With ``units`` (diagonal actions of units spanning a finite index
    subgroup of the stabilizer) the parameters are coordinates with respect
    to their log vectors and the grid covers one period.  Otherwise the
    search runs over ``[-box, box]`` in hyperplane coordinates.
    """
    sig = lattice.signature
    k = sig.places - 1
    if k == 0:
        g = TorusPoint.identity(sig)
        prof = successive_minima(lattice, budget)
        ratio = prof.mu[-1] / prof.mu[sig.s]
        dd = degenerate_set(g, lattice, budget=budget)
        conv = ratio - 1 <= tol
        return OrbitSearchResult(g, prof, ratio, dd.span_dim, conv, "point", 1, ((g.log_coords, ratio),),
                                 (g.log_coords,) if conv else ())

    if units:
        dirs = np.array([u.log_coords() for u in units], dtype=float).T
        if np.linalg.matrix_rank(dirs) < k:
            raise ValueError(f"units span a torus of dimension {np.linalg.matrix_rank(dirs)}, need {k}")
        if dirs.shape[1] > k:
            dirs = dirs[:, :k]
        periodic = True
        lo, hi = 0.0, 1.0
        mode = "torus"
    else:
        dirs = _hyperplane_basis(sig)
        periodic = False
        lo, hi = -box, box
        mode = "box"

    per_dim = max(2, min(grid, int(round(GRID_CAP ** (1.0 / k)))))
    if periodic:
        axis = lo + (hi - lo) * np.arange(per_dim) / per_dim
    else:
        axis = np.linspace(lo, hi, per_dim)
    spacing = (hi - lo) / per_dim
    pts = [np.array(p) for p in itertools.product(axis, repeat=k)]

    ev = _Evaluator(lattice, dirs, budget, workers)
    try:
        vals = ev(pts)
        order = sorted(range(len(pts)), key=lambda i: (vals[i], i))
        results = []
        for i in order[: max(1, restarts)]:
            x, fx = _descend(ev, pts[i], vals[i], spacing, tol)
            results.append((fx, _canonical(x, dirs, periodic)))
    finally:
        ev.close()

    converged_starts = tuple(tuple((dirs @ x).tolist()) for fx, x in results if fx - 1 <= tol)
    # smallest f; among converged starts the canonical representative nearest the identity
    conv = [(round(float(np.linalg.norm(dirs @ x)), 6), tuple((dirs @ x).tolist()), fx, x) for fx, x in results if fx - 1 <= tol]
    if conv:
        _, _, fbest, xbest = min(conv, key=lambda t: (t[0], t[1]))
    else:
        fbest, xbest = min(results, key=lambda t: t[0])
    logs = dirs @ xbest
    w = np.asarray(sig.weights, dtype=float)
    logs = logs - w * (w @ logs) / (w @ w)
    g = TorusPoint(sig, tuple(float(v) for v in logs))
    prof = successive_minima(apply_flow(g, lattice), budget)
    ratio = prof.mu[-1] / prof.mu[sig.s]
    converged = ratio - 1 <= tol
    dd = degenerate_set(g, lattice, budget=budget)
    return OrbitSearchResult(
        g, prof, ratio, dd.span_dim, converged, mode, ev.count, tuple(ev.trace), converged_starts
    )


# -- the inequality chain ----------------------------------------------------------------


def certify_bound_chain(
    lattice: Lattice,
    g_star: TorusPoint,
    a: int,
    M: MinimumEstimate,
    m: MinimumEstimate,
    tol: float = DEFAULT_SEARCH_TOL,
    profile: MinimaProfile | None = None,
) -> list[ChainCheck]:
    """Evaluate the three inequalities combined in the main estimate at ``g_star L``.

    * ``mu_1^s mu_n^a <= gamma_n^{(s+a)/2} det^{(s+a)/n}``
    * ``sqrt(2) M^{1/n} <= mu_n`` using the certified upper bound of ``M``
    * ``(sqrt(n)/sqrt(2)) m^{1/n} <= mu_1`` using the lower bound of ``m``

    Each check passes when ``lhs <= rhs (1 + tol)``.
    """
    sig = lattice.signature
    n, s = sig.n, sig.s
    if not 1 <= a <= sig.places:
        raise ValueError(f"a must lie in [1, {sig.places}]")
    if not M.upper_certified:
        raise ValueError("the M side of the chain needs a certified upper bound")
    gl = apply_flow(g_star, lattice)
    if profile is None:
        profile = successive_minima(gl)
    mu1, mun = profile.mu[0], profile.mu[-1]
    gamma, _ = hermite_gamma(n)
    det = gl.det
    checks = []
    lhs = mu1**s * mun**a
    rhs = gamma ** ((s + a) / 2) * det ** ((s + a) / n)
    checks.append(ChainCheck("minima_product", lhs, rhs, lhs <= rhs * (1 + tol)))
    lhs = math.sqrt(2) * M.upper ** (1 / n)
    checks.append(ChainCheck("inhomogeneous_vs_mu_n", lhs, mun, lhs <= mun * (1 + tol)))
    m_low = m.lower if m.lower_certified else 0.0
    lhs = math.sqrt(n / 2) * m_low ** (1 / n)
    checks.append(ChainCheck("homogeneous_vs_mu_1", lhs, mu1, lhs <= mu1 * (1 + tol)))
    return checks
