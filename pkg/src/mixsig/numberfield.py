"""Number fields: ingestion, discriminant, Minkowski embedding and unit action.

A field is described by a monic integer defining polynomial and an integral
basis of its ring of integers, written in the power basis of a root ``theta``.
Elements are coordinate vectors (rationals) in that integral basis.  All
arithmetic on elements is exact; only the embedding into V is approximate.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import mpmath

from . import polynomials as P
from ._linalg import det_exact, inverse_exact
from .core import DEFAULT_PRECISION, Lattice, Precision, Signature, Vector, lattice_from_basis
from .errors import CatalogError, FieldSpecError

__all__ = [
    "FieldSpec",
    "EmbeddingSet",
    "NumberFieldLattice",
    "DiagonalElement",
    "signature_of",
    "discriminant",
    "compute_embeddings",
    "minkowski_embed",
    "build_lattice",
    "unit_action",
    "fundamental_unit_real_quadratic",
    "field_units",
    "element_norm",
    "element_multiply",
    "load_catalog",
    "parse_field_document",
    "default_catalog_path",
]

# relative agreement required between det(sigma(O_K)) and 2^{-s} sqrt(d_K)
DET_CHECK_TOLERANCE = 2.0**-40


def _rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise FieldSpecError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class FieldSpec:
    defining_polynomial: tuple  # integers, constant term first, monic
    integral_basis: tuple  # n rows of n Fractions (power basis coordinates)
    units: tuple = ()  # integer coordinate vectors in the integral basis
    label: str = ""

    def __post_init__(self):
        poly = tuple(int(c) for c in self.defining_polynomial)
        object.__setattr__(self, "defining_polynomial", poly)
        n = len(poly) - 1
        if n < 1:
            raise FieldSpecError(f"{self.label}: defining polynomial must have degree >= 1")
        if poly[-1] != 1:
            raise FieldSpecError(f"{self.label}: defining polynomial must be monic")
        basis = tuple(tuple(_rational(x) for x in row) for row in self.integral_basis)
        if len(basis) != n or any(len(row) != n for row in basis):
            raise FieldSpecError(f"{self.label}: integral basis must be {n}x{n}")
        object.__setattr__(self, "integral_basis", basis)
        object.__setattr__(self, "units", tuple(tuple(int(c) for c in u) for u in self.units))
        if n > 1:
            for root in _rational_root_candidates(poly[0]):
                if P.evaluate(poly, root) == 0:
                    raise FieldSpecError(f"{self.label}: polynomial has the rational root {root}")
        if not P.is_squarefree(poly):
            raise FieldSpecError(f"{self.label}: defining polynomial has repeated roots")
        if det_exact(basis) == 0:
            raise FieldSpecError(f"{self.label}: integral basis is singular")
        for u in self.units:
            if len(u) != n:
                raise FieldSpecError(f"{self.label}: unit {u} has wrong length")
            if abs(element_norm(self, u)) != 1:
                raise FieldSpecError(f"{self.label}: declared unit {u} has norm {element_norm(self, u)}")

    @property
    def degree(self) -> int:
        return len(self.defining_polynomial) - 1

    @cached_property
    def basis_inverse(self) -> list:
        return inverse_exact(self.integral_basis)

    def to_power_basis(self, coords: Sequence) -> list:
        n = self.degree
        if len(coords) != n:
            raise ValueError(f"element needs {n} coordinates")
        c = [_rational(x) if not isinstance(x, Fraction) else x for x in coords]
        return [sum((c[i] * self.integral_basis[i][k] for i in range(n)), Fraction(0)) for k in range(n)]

    def from_power_basis(self, coeffs: Sequence) -> list:
        n = self.degree
        coeffs = list(coeffs) + [Fraction(0)] * (n - len(coeffs))
        inv = self.basis_inverse
        # row vector: coords = coeffs * inv
        return [sum((Fraction(coeffs[k]) * inv[k][i] for k in range(n)), Fraction(0)) for i in range(n)]


def _rational_root_candidates(const: int) -> list[int]:
    if const == 0:
        return [0]
    c = abs(const)
    divs = [d for d in range(1, math.isqrt(c) + 1) if c % d == 0]
    divs = sorted(set(divs + [c // d for d in divs]))
    return [s * d for d in divs for s in (1, -1)]


# -- exact element arithmetic --------------------------------------------------


def _mult_matrix_power(spec: FieldSpec, a: Sequence[Fraction]) -> list[list[Fraction]]:
    """Matrix of multiplication by ``a`` (power basis coefficients) on the power basis."""
    n = spec.degree
    f = spec.defining_polynomial
    cols = []
    cur = P.normalize(a)
    x = [Fraction(0), Fraction(1)]
    for _ in range(n):
        r = P.mod(cur, f)
        cols.append(list(r) + [Fraction(0)] * (n - len(r)))
        cur = P.mul(r, x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def element_norm(spec: FieldSpec, coords: Sequence) -> Fraction:
    """Exact ``Norm_{K/Q}`` of an element given in integral basis coordinates."""
    return det_exact(_mult_matrix_power(spec, spec.to_power_basis(coords)))


def element_trace(spec: FieldSpec, coords: Sequence) -> Fraction:
    m = _mult_matrix_power(spec, spec.to_power_basis(coords))
    return sum((m[i][i] for i in range(spec.degree)), Fraction(0))


def element_multiply(spec: FieldSpec, a: Sequence, b: Sequence) -> list[Fraction]:
    prod = P.mod(P.mul(spec.to_power_basis(a), spec.to_power_basis(b)), spec.defining_polynomial)
    return spec.from_power_basis(prod)


def signature_of(spec: FieldSpec) -> Signature:
    f = spec.defining_polynomial
    if not P.is_squarefree(f):
        raise FieldSpecError(f"{spec.label}: defining polynomial has repeated roots")
    r = P.count_real_roots(f)
    return Signature(r, (spec.degree - r) // 2)


def discriminant(spec: FieldSpec) -> int:
    """Absolute discriminant ``|det(Tr(b_i b_j))|`` over the integral basis."""
    n = spec.degree
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    tr = [
        [element_trace(spec, element_multiply(spec, basis[i], basis[j])) for j in range(n)]
        for i in range(n)
    ]
    d = det_exact(tr)
    if d.denominator != 1:
        raise FieldSpecError(f"{spec.label}: discriminant {d} is not an integer; integral basis is invalid")
    if d == 0:
        raise FieldSpecError(f"{spec.label}: trace form is degenerate")
    return abs(d.numerator)


# -- embeddings -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Roots of the defining polynomial in canonical order.

    Real roots ascending, then one root of each complex conjugate pair
    (positive imaginary part), ordered by real part and then imaginary part.
    """

    real_roots: tuple
    complex_roots: tuple
    precision: Precision = DEFAULT_PRECISION

    @property
    def signature(self) -> Signature:
        return Signature(len(self.real_roots), len(self.complex_roots))


def compute_embeddings(spec: FieldSpec, precision: Precision = DEFAULT_PRECISION) -> EmbeddingSet:
    f = spec.defining_polynomial
    sig = signature_of(spec)
    prec = precision.mantissa_bits
    real = [P.refine_real_root(f, a, b, prec) for a, b in P.isolate_real_roots(f)]
    if len(real) != sig.r:
        raise FieldSpecError(f"{spec.label}: isolated {len(real)} real roots, Sturm count {sig.r}")
    cplx: list = []
    if sig.s:
        roots = P.aberth_roots(f, prec)
        with mpmath.workprec(prec):
            thresh = mpmath.mpf(2) ** (-prec // 3)
            upper = [z for z in roots if z.imag > thresh * max(1, abs(z))]
            if len(upper) != sig.s:
                raise FieldSpecError(
                    f"{spec.label}: found {len(upper)} roots in the upper half plane, expected {sig.s}"
                )
            cplx = sorted(upper, key=lambda z: (z.real, z.imag))
    with mpmath.workprec(prec):
        for x in real + cplx:
            if abs(P.evaluate([mpmath.mpf(c) for c in f], x)) > P.residual_bound(f, x, prec):
                raise FieldSpecError(f"{spec.label}: root {x} failed validation at {prec} bits")
    return EmbeddingSet(tuple(real), tuple(cplx), precision)


def _embed_values(spec: FieldSpec, emb: EmbeddingSet, element: Sequence) -> list:
    coeffs = spec.to_power_basis(element)
    with emb.precision.context():
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        return [P.evaluate(mp_coeffs, z) for z in emb.real_roots + emb.complex_roots]


def minkowski_embed(spec: FieldSpec, emb: EmbeddingSet, element: Sequence) -> Vector:
    """``(sigma_1(x), ..., sigma_{r+s}(x))`` as a :class:`Vector`."""
    vals = _embed_values(spec, emb, element)
    r = len(emb.real_roots)
    sig = emb.signature
    with emb.precision.context():
        real = tuple(mpmath.mpf(v) for v in vals[:r])
        cplx = tuple((mpmath.mpf(z.real), mpmath.mpf(z.imag)) for z in vals[r:])
    return Vector(sig, real, cplx)


@dataclass(frozen=True, eq=False)
class NumberFieldLattice:
    lattice: Lattice
    d_K: int
    field: FieldSpec
    embeddings: EmbeddingSet

    @property
    def signature(self) -> Signature:
        return self.lattice.signature

    def expected_determinant(self):
        with self.lattice.precision.context():
            return mpmath.sqrt(self.d_K) / mpmath.mpf(2) ** self.signature.s


def build_lattice(spec: FieldSpec, precision: Precision = DEFAULT_PRECISION) -> NumberFieldLattice:
    """``sigma(O_K)``; raises if its covolume disagrees with ``2^{-s} sqrt(d_K)``."""
    emb = compute_embeddings(spec, precision)
    n = spec.degree
    basis = [minkowski_embed(spec, emb, [int(i == j) for j in range(n)]) for i in range(n)]
    lat = lattice_from_basis(emb.signature, basis, precision)
    d = discriminant(spec)
    out = NumberFieldLattice(lat, d, spec, emb)
    with precision.context():
        ratio = lat.determinant / out.expected_determinant()
        if abs(ratio - 1) > DET_CHECK_TOLERANCE:
            raise FieldSpecError(
                f"{spec.label}: det(sigma(O_K)) / (2^-s sqrt(d_K)) = {mpmath.nstr(ratio, 15)}"
            )
    return out


# -- the diagonal group -----------------------------------------------------------


@dataclass(frozen=True)
class DiagonalElement:
    """Positive diagonal matrix acting place-wise on V with determinant one on V."""

    signature: Signature
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.signature.places:
            raise ValueError("need one entry per place")
        if any(e <= 0 for e in self.entries):
            raise ValueError("diagonal entries must be positive")
        logdet = math.fsum(w * math.log(float(e)) for w, e in zip(self.signature.weights, self.entries))
        if abs(logdet) > 1e-9:
            raise ValueError(f"determinant on V is exp({logdet}), not 1")

    def log_coords(self) -> tuple:
        return tuple(math.log(float(e)) for e in self.entries)

    def __mul__(self, other: "DiagonalElement") -> "DiagonalElement":
        return DiagonalElement(self.signature, tuple(a * b for a, b in zip(self.entries, other.entries)))


def unit_action(spec: FieldSpec, emb: EmbeddingSet, unit: Sequence) -> DiagonalElement:
    """``diag(|sigma_1(u)|, ..., |sigma_{r+s}(u)|)``; ``u`` must have norm +-1."""
    if abs(element_norm(spec, unit)) != 1:
        raise FieldSpecError(f"{spec.label}: {tuple(unit)} is not a unit")
    vals = _embed_values(spec, emb, unit)
    with emb.precision.context():
        entries = tuple(abs(v) for v in vals)
    return DiagonalElement(emb.signature, entries)


def _cf_first_unit(P0: int, Q0: int, D: int, trace: int, norm: int) -> tuple[int, int]:
    """First convergent ``p/q`` of ``(P0 + sqrt(D))/Q0`` with ``|N(p - q w)| = 1``.

    ``w`` is the quadratic integer with the given trace and norm.
    """
    a0 = math.isqrt(D)
    Pk, Qk = P0, Q0
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for _ in range(10_000):
        a = (Pk + a0) // Qk if Qk > 0 else -((-(Pk + a0)) // (-Qk))
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if abs(p * p - p * q * trace + q * q * norm) == 1:
            return p, q
        Pk = a * Qk - Pk
        Qk = (D - Pk * Pk) // Qk
    raise FieldSpecError("continued fraction did not produce a unit")


def fundamental_unit_real_quadratic(spec: FieldSpec) -> tuple:
    """Fundamental unit of a real quadratic field via continued fractions.

    Returned as integer coordinates in the field's integral basis; it is the
    unit ``> 1`` under the embedding ``theta -> larger root``.
    """
    if spec.degree != 2:
        raise FieldSpecError(f"{spec.label}: not a quadratic field")
    c0, c1, _ = spec.defining_polynomial
    disc = c1 * c1 - 4 * c0
    if disc <= 0:
        raise FieldSpecError(f"{spec.label}: imaginary quadratic field has no fundamental unit")
    # disc = f^2 * d0 with d0 squarefree
    d0, f = disc, 1
    k = 2
    while k * k <= d0:
        while d0 % (k * k) == 0:
            d0 //= k * k
            f *= k
        k += 1
    # sqrt(d0) = (2 theta + c1) / f ; w generates O_K over Z
    if d0 % 4 == 1:
        w_trace, w_norm = 1, (1 - d0) // 4
        p, q = _cf_first_unit(1, 2, d0, w_trace, w_norm)
        w = [Fraction(1, 2) + Fraction(c1, 2 * f), Fraction(1, f)]  # (1 + sqrt(d0))/2
    else:
        w_trace, w_norm = 0, -d0
        p, q = _cf_first_unit(0, 1, d0, w_trace, w_norm)
        w = [Fraction(c1, f), Fraction(2, f)]  # sqrt(d0)
    # p - q*w is the small conjugate; the unit > 1 is p - q*w' = p - q*trace + q*w
    eps_power = [p - q * w_trace + q * w[0], q * w[1]]
    coords = spec.from_power_basis(eps_power)
    if any(c.denominator != 1 for c in coords):
        raise FieldSpecError(f"{spec.label}: integral basis does not contain the ring of integers")
    unit = tuple(int(c) for c in coords)
    if abs(element_norm(spec, unit)) != 1:
        raise FieldSpecError(f"{spec.label}: continued fraction produced a non-unit")
    return unit


def field_units(spec: FieldSpec) -> tuple:
    """Declared units, or the computed fundamental unit for real quadratic fields."""
    if spec.units:
        return spec.units
    if spec.degree == 2 and signature_of(spec) == Signature(2, 0):
        return (fundamental_unit_real_quadratic(spec),)
    return ()


# -- catalog -------------------------------------------------------------------------


def default_catalog_path() -> Path:
    env = os.environ.get("MIXSIG_CATALOG")
    if env:
        return Path(env)
    return Path(__file__).with_name("data") / "catalog.jsonl"


def parse_field_document(doc: dict) -> FieldSpec:
    """One catalog document: label, polynomial, integral_basis (row-major strings), units."""
    try:
        label = str(doc["label"])
        poly = doc["polynomial"]
        flat = doc["integral_basis"]
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"field document is missing key {exc}") from exc
    if not isinstance(poly, list) or not all(isinstance(c, int) for c in poly):
        raise CatalogError(f"{label}: polynomial must be a list of integers")
    n = len(poly) - 1
    if not isinstance(flat, list) or len(flat) != n * n:
        raise CatalogError(f"{label}: integral_basis must hold {n * n} entries")
    try:
        entries = [Fraction(str(x)) for x in flat]
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogError(f"{label}: bad rational in integral_basis: {exc}") from exc
    rows = tuple(tuple(entries[i * n : (i + 1) * n]) for i in range(n))
    units = doc.get("units") or ()
    return FieldSpec(tuple(poly), rows, tuple(tuple(u) for u in units), label)


def _documents(text: str) -> Iterable[dict]:
    stripped = text.strip()
    if stripped.startswith("["):
        data = json.loads(stripped)
        if not isinstance(data, list):
            raise CatalogError("catalog array expected")
        yield from data
        return
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from exc


def load_catalog_documents(path: str | os.PathLike | None = None) -> list[dict]:
    path = Path(path) if path is not None else default_catalog_path()
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
    try:
        docs = list(_documents(text))
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: {exc}") from exc
    for d in docs:
        if not isinstance(d, dict) or "label" not in d:
            raise CatalogError(f"{path}: every document needs a label")
    return docs


def load_catalog(path: str | os.PathLike | None = None) -> list[FieldSpec]:
    return [parse_field_document(d) for d in load_catalog_documents(path)]
