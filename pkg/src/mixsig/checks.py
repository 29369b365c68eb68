"""Inequality checks shared by the command line harness and the test suite."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import best_bound, field_bounds
from .core import Lattice, Precision, Signature, lattice_from_rows
from .flow import certify_bound_chain, search_semi_wellrounded
from .minima import (
    DEFAULT_CELL_BUDGET,
    MinimumEstimate,
    homogeneous_minimum,
    inhomogeneous_minimum,
)
from .numberfield import FieldSpec, build_lattice, field_units, unit_action
from .reduction import DEFAULT_NODE_BUDGET, MinimaProfile, successive_minima, verify_minkowski_bound

# slack for comparisons against closed-form bounds
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    holds: bool
    certified: bool = True

    def as_record(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "certified": self.certified}


def random_integer_lattice(rng: np.random.Generator, max_dim: int = 4, entry: int = 4) -> Lattice:
    """A lattice with integer chart matrix and random signature of dimension at most ``max_dim``."""
    n = int(rng.integers(1, max_dim + 1))
    s = int(rng.integers(0, n // 2 + 1))
    sig = Signature(n - 2 * s, s)
    while True:
        rows = rng.integers(-entry, entry + 1, size=(n, n))
        if round(abs(np.linalg.det(rows))) >= 1:
            return lattice_from_rows(sig, rows.tolist())


def inequality_checks(
    lattice: Lattice,
    tol: float = 1e-3,
    profile: MinimaProfile | None = None,
    M: MinimumEstimate | None = None,
    m: MinimumEstimate | None = None,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    enum_budget: int = DEFAULT_NODE_BUDGET,
) -> list[Check]:
    """Minkowski's second theorem (every ``t``), the AM-GM bound on ``m`` and the nearest-plane bound on ``M``."""
    n = lattice.n
    if profile is None:
        profile = successive_minima(lattice, enum_budget)
    out = []
    for t in range(1, n + 1):
        c = verify_minkowski_bound(lattice, t, profile)
        out.append(Check(f"minima_product_t{t}", c.lhs, c.rhs, c.holds, c.gamma_exact))
    if m is None:
        m = homogeneous_minimum(lattice, "search", radius=profile.mu[-1] * (1 + 1e-9), budget=enum_budget)
    rhs = (math.sqrt(2 / n) * profile.mu[0]) ** n
    out.append(Check("homogeneous_amgm", m.upper, rhs, m.upper <= rhs * (1 + tol)))
    rhs = (profile.mu[-1] / math.sqrt(2)) ** n
    if M is None:
        M = inhomogeneous_minimum(lattice, tol, cell_budget, target=rhs, enum_budget=enum_budget)
    out.append(Check("inhomogeneous_nearest_plane", M.upper, rhs, M.upper <= rhs * (1 + tol)))
    return out


@dataclass(frozen=True)
class FieldAnalysis:
    label: str
    signature: Signature
    d_K: int
    det: float
    profile: MinimaProfile
    m: MinimumEstimate
    M: MinimumEstimate
    search: object  # OrbitSearchResult
    bounds: object  # BoundReport
    best_a: int
    best_value: float
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.holds for c in self.checks)


def analyze_field(
    spec: FieldSpec,
    precision: Precision = Precision(),
    tol: float = 1e-3,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    enum_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> FieldAnalysis:
    """Embed, reduce, estimate minima, search the flow and check every applicable inequality."""
    nf = build_lattice(spec, precision)
    lat = nf.lattice
    sig = lat.signature
    profile = successive_minima(lat, enum_budget)
    m = homogeneous_minimum(lat, "number_field")
    M = inhomogeneous_minimum(lat, tol, cell_budget, workers=workers, enum_budget=enum_budget)
    units = [unit_action(spec, nf.embeddings, u) for u in field_units(spec)]
    search = search_semi_wellrounded(lat, units or None, workers=workers, budget=enum_budget)
    report = field_bounds(sig.r, sig.s, nf.d_K)
    a_star, best = best_bound(sig.r, sig.s, nf.d_K)

    checks = inequality_checks(lat, tol, profile, M, m, cell_budget, enum_budget)
    checks.append(Check("main_bound_upper", M.upper, best, M.upper <= best * (1 + BOUND_SLACK)))
    checks.append(Check("main_bound_lower", M.lower, best, M.lower <= best * (1 + BOUND_SLACK), M.lower_certified))
    for e in report.entries:
        if e.value is not None and e.status == "proven":
            checks.append(Check(f"bound_{e.name}", M.lower, e.value, M.lower <= e.value * (1 + tol), M.lower_certified))
    # non-convergence of the search is a result state, not a failed inequality
    if search.converged:
        checks.append(Check("flow_span_dim", search.span_dim, sig.s, search.span_dim <= sig.s))
        for a in range(1, sig.places + 1):
            for c in certify_bound_chain(lat, search.g_star, a, M, m, profile=search.profile):
                checks.append(Check(f"chain_a{a}_{c.name}", c.lhs, c.rhs, c.holds))
    return FieldAnalysis(
        spec.label, sig, nf.d_K, lat.det, profile, m, M, search, report, a_star, best, tuple(checks)
    )
