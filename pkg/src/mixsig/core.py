"""The ambient space V = R^r (+) C^s, its scalar product, norm form and lattices.

Complex coordinates are carried as ``(re, im)`` pairs of reals.  The chart that
sends ``x + iy`` to the real pair ``(x, y)`` is orthonormal for the scalar
product, so every metric computation happens on chart coordinates.

High precision values are :mod:`mpmath` floats; float64 copies of the chart
matrix are exposed for the numerical kernels.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import RankDeficientError, SignatureMismatch

__all__ = [
    "Signature",
    "Precision",
    "DEFAULT_PRECISION",
    "Vector",
    "Lattice",
    "scalar_product",
    "orthonormal_chart",
    "norm_form",
    "norm_form_chart",
    "lattice_from_basis",
    "lattice_from_rows",
]


@dataclass(frozen=True)
class Signature:
    """Numbers ``r`` of real and ``s`` of complex places; ``n = r + 2s``."""

    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValueError(f"signature entries must be nonnegative, got ({self.r}, {self.s})")
        if self.r + 2 * self.s < 1:
            raise ValueError("signature must have n = r + 2s >= 1")

    @property
    def n(self) -> int:
        return self.r + 2 * self.s

    @property
    def places(self) -> int:
        return self.r + self.s

    @property
    def weights(self) -> tuple[int, ...]:
        """Multiplicity of each place in the norm form (1 real, 2 complex)."""
        return (1,) * self.r + (2,) * self.s

    def __str__(self) -> str:
        return f"({self.r},{self.s})"


@dataclass(frozen=True)
class Precision:
    mantissa_bits: int = 128
    comparison_tolerance: float = 2.0**-64

    def __post_init__(self):
        if self.mantissa_bits < 53:
            raise ValueError("mantissa_bits must be at least 53")
        if not self.comparison_tolerance > 0:
            raise ValueError("comparison_tolerance must be positive")

    def context(self):
        return mpmath.workprec(self.mantissa_bits)


DEFAULT_PRECISION = Precision()


def _mpf(x) -> mpmath.mpf:
    return x if isinstance(x, mpmath.mpf) else mpmath.mpf(x)


@dataclass(frozen=True)
class Vector:
    signature: Signature
    real_coords: tuple
    complex_coords: tuple

    def __post_init__(self):
        if len(self.real_coords) != self.signature.r:
            raise SignatureMismatch(
                f"expected {self.signature.r} real coordinates, got {len(self.real_coords)}"
            )
        if len(self.complex_coords) != self.signature.s:
            raise SignatureMismatch(
                f"expected {self.signature.s} complex coordinates, got {len(self.complex_coords)}"
            )
        for z in self.complex_coords:
            if len(z) != 2:
                raise ValueError("complex coordinates must be (re, im) pairs")

    @classmethod
    def from_chart(cls, signature: Signature, chart: Sequence) -> "Vector":
        if len(chart) != signature.n:
            raise SignatureMismatch(f"chart of length {len(chart)} for signature {signature}")
        r = signature.r
        real = tuple(chart[:r])
        cplx = tuple((chart[r + 2 * j], chart[r + 2 * j + 1]) for j in range(signature.s))
        return cls(signature, real, cplx)

    def chart(self) -> list:
        return orthonormal_chart(self)

    def __repr__(self) -> str:
        parts = [mpmath.nstr(x, 8) for x in map(_mpf, self.real_coords)]
        parts += [
            f"{mpmath.nstr(_mpf(a), 8)}{'+' if _mpf(b) >= 0 else '-'}{mpmath.nstr(abs(_mpf(b)), 8)}i"
            for a, b in self.complex_coords
        ]
        return f"Vector{self.signature}({', '.join(parts)})"


def orthonormal_chart(v: Vector) -> list:
    out = list(v.real_coords)
    for re, im in v.complex_coords:
        out.append(re)
        out.append(im)
    return out


def scalar_product(u: Vector, v: Vector, precision: Precision = DEFAULT_PRECISION):
    """Sum of products over real places plus ``Re(u_i * conj(v_i))`` over complex ones."""
    if u.signature != v.signature:
        raise SignatureMismatch(f"{u.signature} vs {v.signature}")
    with precision.context():
        total = mpmath.mpf(0)
        for a, b in zip(u.real_coords, v.real_coords):
            total += _mpf(a) * _mpf(b)
        for (a, b), (c, d) in zip(u.complex_coords, v.complex_coords):
            # Re((a+ib)(c-id)) = ac + bd
            total += _mpf(a) * _mpf(c) + _mpf(b) * _mpf(d)
        return +total


def norm_form(v: Vector, precision: Precision = DEFAULT_PRECISION):
    """``|v_1 ... v_r * |v_{r+1}|^2 ... |v_{r+s}|^2|``."""
    with precision.context():
        prod = mpmath.mpf(1)
        for a in v.real_coords:
            prod *= abs(_mpf(a))
        for a, b in v.complex_coords:
            prod *= _mpf(a) ** 2 + _mpf(b) ** 2
        return +prod


def norm_form_chart(x: np.ndarray, signature: Signature) -> np.ndarray:
    """Norm form on float64 chart coordinates; ``x`` may carry leading batch axes."""
    x = np.asarray(x, dtype=float)
    r = signature.r
    out = np.prod(np.abs(x[..., :r]), axis=-1)
    if signature.s:
        pairs = x[..., r:].reshape(x.shape[:-1] + (signature.s, 2))
        out = out * np.prod(np.sum(pairs * pairs, axis=-1), axis=-1)
    return out


@dataclass(frozen=True, eq=False)
class Lattice:
    """A full rank lattice in V given by an ordered basis.

    ``chart_matrix`` holds the chart of basis vector ``j`` in column ``j``;
    ``gram = chart_matrix^T chart_matrix`` and ``determinant`` is the covolume.
    """

    signature: Signature
    basis: tuple
    chart_matrix: mpmath.matrix
    gram: mpmath.matrix
    determinant: mpmath.mpf
    precision: Precision = DEFAULT_PRECISION

    @property
    def n(self) -> int:
        return self.signature.n

    @cached_property
    def chart(self) -> np.ndarray:
        """Float64 copy of ``chart_matrix`` (columns are basis vectors)."""
        n = self.n
        a = np.array([[float(self.chart_matrix[i, j]) for j in range(n)] for i in range(n)])
        a.setflags(write=False)
        return a

    @property
    def det(self) -> float:
        return float(self.determinant)

    def point(self, coords: Iterable[int]) -> Vector:
        """The lattice vector with the given integer coordinates, at full precision."""
        coords = [int(c) for c in coords]
        n = self.n
        with self.precision.context():
            chart = [
                mpmath.fsum(self.chart_matrix[i, j] * coords[j] for j in range(n) if coords[j])
                for i in range(n)
            ]
        return Vector.from_chart(self.signature, chart)

    def squared_length(self, coords: Iterable[int]):
        c = [int(x) for x in coords]
        n = self.n
        with self.precision.context():
            return mpmath.fsum(
                self.gram[i, j] * c[i] * c[j] for i in range(n) for j in range(n) if c[i] and c[j]
            )

    def scaled(self, t) -> "Lattice":
        with self.precision.context():
            t = _mpf(t)
            rows = [[self.chart_matrix[i, j] * t for i in range(self.n)] for j in range(self.n)]
        return lattice_from_rows(self.signature, rows, self.precision)

    def __repr__(self) -> str:
        return f"Lattice(signature={self.signature}, det={mpmath.nstr(self.determinant, 12)})"


def lattice_from_basis(
    signature: Signature, basis: Sequence[Vector], precision: Precision = DEFAULT_PRECISION
) -> Lattice:
    """Build a :class:`Lattice`; raises :class:`RankDeficientError` on dependent input."""
    basis = tuple(basis)
    n = signature.n
    if len(basis) != n:
        raise ValueError(f"need {n} basis vectors for signature {signature}, got {len(basis)}")
    for b in basis:
        if b.signature != signature:
            raise SignatureMismatch(f"basis vector of signature {b.signature}, expected {signature}")
    with precision.context():
        cm = mpmath.matrix(n, n)
        for j, b in enumerate(basis):
            for i, x in enumerate(orthonormal_chart(b)):
                cm[i, j] = _mpf(x)
        gram = cm.T * cm
        det = abs(mpmath.det(cm)) if n > 1 else abs(cm[0, 0])
        scale = mpmath.mpf(1)
        for j in range(n):
            scale *= mpmath.sqrt(gram[j, j])
        if scale == 0 or det <= precision.comparison_tolerance * scale:
            raise RankDeficientError(
                f"basis is rank deficient: |det| = {mpmath.nstr(det, 5)} vs scale {mpmath.nstr(scale, 5)}"
            )
    return Lattice(signature, basis, cm, gram, +det, precision)


def lattice_from_rows(
    signature: Signature, rows: Sequence[Sequence], precision: Precision = DEFAULT_PRECISION
) -> Lattice:
    """Convenience constructor: each row is the chart of one basis vector."""
    with precision.context():
        basis = [Vector.from_chart(signature, [_mpf(x) for x in row]) for row in rows]
    return lattice_from_basis(signature, basis, precision)
