"""Small exact linear algebra over the rationals (Python ints / Fractions)."""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence


def det_exact(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by Gaussian elimination over Fractions."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for i in range(col + 1, n):
            f = a[i][col] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return det


def solve_exact(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve ``A x = b`` exactly; raises ``ValueError`` if ``A`` is singular."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


def inverse_exact(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    cols = [solve_exact(rows, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


class IndependenceTracker:
    """Incremental exact rank test for integer vectors (fraction-free echelon form)."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, list[int]]] = []

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, v: Sequence[int]) -> list[int]:
        v = [int(x) for x in v]
        for col, p in self.rows:
            if v[col]:
                a, b = p[col], v[col]
                v = [a * x - b * y for x, y in zip(v, p)]
                g = 0
                for x in v:
                    g = gcd(g, x)
                if g > 1:
                    v = [x // g for x in v]
        return v

    def is_independent(self, v: Sequence[int]) -> bool:
        return any(self._reduce(v))

    def add(self, v: Sequence[int]) -> bool:
        """Add ``v`` if it is independent of the stored vectors; report whether it was."""
        w = self._reduce(v)
        col = next((i for i, x in enumerate(w) if x), None)
        if col is None:
            return False
        self.rows.append((col, w))
        return True


def rank_exact(vectors: Sequence[Sequence[int]], dim: int) -> int:
    t = IndependenceTracker(dim)
    for v in vectors:
        t.add(v)
    return len(t)
