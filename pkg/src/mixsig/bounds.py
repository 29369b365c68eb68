"""Closed-form upper bounds for the inhomogeneous minimum.

Constants are exact products of rational powers of primes
(:class:`PowerProduct`) and are converted to decimals only for reporting, so
that symbolic comparisons are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import Signature
from .reduction import HERMITE

__all__ = [
    "PowerProduct",
    "BoundEntry",
    "BoundReport",
    "TableEntry",
    "TableRow",
    "gamma_power",
    "thm51_rhs",
    "main_bound",
    "main_bound_symbolic",
    "intro_bound",
    "intro_bound_symbolic",
    "best_bound",
    "classical_bounds",
    "field_bounds",
    "reproduce_table",
    "render_table",
]


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class PowerProduct:
    """A positive real ``prod p ** e_p`` with primes ``p`` and rational exponents ``e_p``."""

    exponents: tuple = ()  # sorted (prime, Fraction) pairs, no zero exponents

    @classmethod
    def of(cls, x) -> "PowerProduct":
        x = Fraction(x)
        if x <= 0:
            raise ValueError("power products are positive")
        exps: dict[int, Fraction] = {}
        for p, e in _factor(x.numerator).items():
            exps[p] = exps.get(p, Fraction(0)) + e
        for p, e in _factor(x.denominator).items():
            exps[p] = exps.get(p, Fraction(0)) - e
        return cls._make(exps)

    @classmethod
    def _make(cls, exps: dict) -> "PowerProduct":
        return cls(tuple(sorted((p, Fraction(e)) for p, e in exps.items() if e != 0)))

    def __mul__(self, other) -> "PowerProduct":
        if not isinstance(other, PowerProduct):
            other = PowerProduct.of(other)
        exps = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = exps.get(p, Fraction(0)) + e
        return PowerProduct._make(exps)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerProduct":
        if not isinstance(other, PowerProduct):
            other = PowerProduct.of(other)
        return self * other ** -1

    def __rtruediv__(self, other) -> "PowerProduct":
        return PowerProduct.of(other) * self ** -1

    def __pow__(self, k) -> "PowerProduct":
        k = Fraction(k)
        return PowerProduct._make({p: e * k for p, e in self.exponents})

    def __float__(self) -> float:
        return math.exp(math.fsum(float(e) * math.log(p) for p, e in self.exponents))

    def log(self) -> float:
        return math.fsum(float(e) * math.log(p) for p, e in self.exponents)

    def split(self) -> tuple[Fraction, "PowerProduct"]:
        """``(rational part, radical part)`` with radical exponents in ``(0, 1)``."""
        q = Fraction(1)
        rad = {}
        for p, e in self.exponents:
            fl = math.floor(e)
            q *= Fraction(p) ** fl
            if e != fl:
                rad[p] = e - fl
        return q, PowerProduct._make(rad)

    def __str__(self) -> str:
        q, rad = self.split()
        parts = [str(q)] + [f"{p}^({e})" for p, e in rad.exponents]
        return "·".join(parts)

    def as_record(self) -> list:
        return [[p, str(e)] for p, e in self.exponents]


def gamma_power(n: int, k) -> tuple[PowerProduct, bool]:
    """``gamma_n ** k`` as an exact power product, and whether ``gamma_n`` is exact."""
    exact = HERMITE.power(n)
    if exact is not None:
        return PowerProduct.of(exact) ** (Fraction(k) / n), True
    return PowerProduct.of(Fraction(n, 2)) ** k, False


def _check_a(r: int, s: int, a: int) -> Signature:
    sig = Signature(r, s)
    if not 1 <= a <= sig.places:
        raise ValueError(f"a = {a} outside [1, {sig.places}]")
    return sig


def _thm51_constant(sig: Signature, a: int) -> tuple[PowerProduct, bool]:
    """``(2^{s-a} gamma_n^{s+a} n^{-s})^{n/2}``."""
    n, s = sig.n, sig.s
    g, exact = gamma_power(n, s + a)
    base = PowerProduct.of(2) ** (s - a) * g * PowerProduct.of(n) ** (-s)
    return base ** Fraction(n, 2), exact


def thm51_rhs(r: int, s: int, a: int, det_value: float, m_value: float = 1.0) -> tuple[float, bool]:
    """Upper bound for ``M`` from ``m^s M^a <= C det^{s+a}``; returns ``(value, gamma_exact)``."""
    sig = _check_a(r, s, a)
    if det_value <= 0:
        raise ValueError("det must be positive")
    if s > 0 and m_value <= 0:
        raise ValueError("m = 0 makes the bound vacuous")
    c, exact = _thm51_constant(sig, a)
    log_rhs = c.log() + (s + a) * math.log(det_value) - (s * math.log(m_value) if s else 0.0)
    return math.exp(log_rhs / a), exact


@dataclass(frozen=True)
class TableEntry:
    constant: PowerProduct
    exponent: Fraction  # of d_K
    a_values: tuple = ()
    gamma_exact: bool = True

    def value(self, d: float) -> float:
        return float(self.constant) * d ** float(self.exponent)

    def __str__(self) -> str:
        return f"{self.constant}·d^({self.exponent})"


def main_bound_symbolic(r: int, s: int, a: int) -> TableEntry:
    """``2^{-s(s+a)/a} (2^{s-a} gamma_n^{s+a} n^{-s})^{n/(2a)} d^{(s+a)/(2a)}``."""
    sig = _check_a(r, s, a)
    c, exact = _thm51_constant(sig, a)
    const = PowerProduct.of(2) ** Fraction(-s * (s + a), a) * c ** Fraction(1, a)
    return TableEntry(const, Fraction(s + a, 2 * a), (a,), exact)


def main_bound(r: int, s: int, a: int, d_K: float) -> float:
    if d_K < 1:
        raise ValueError("d_K must be at least 1")
    value = main_bound_symbolic(r, s, a).value(d_K)
    # same bound through the lattice form at det = 2^{-s} sqrt(d_K), m = 1
    check, _ = thm51_rhs(r, s, a, 2.0**-s * math.sqrt(d_K), 1.0)
    if abs(check - value) > 2**-35 * value:
        raise ArithmeticError(f"bound forms disagree: {value} vs {check}")
    return value


def intro_bound_symbolic(r: int, s: int) -> TableEntry:
    """``2^{-sn/(r+s)} (sqrt(n)/2)^n d^{n/(2(r+s))}``; needs ``n >= 4``."""
    sig = Signature(r, s)
    n = sig.n
    if n < 4:
        raise ValueError("the simplified bound needs n >= 4")
    const = PowerProduct.of(2) ** Fraction(-s * n, r + s) * (PowerProduct.of(n) ** Fraction(1, 2) / 2) ** n
    return TableEntry(const, Fraction(n, 2 * (r + s)), (), True)


def intro_bound(r: int, s: int, d_K: float) -> float:
    return intro_bound_symbolic(r, s).value(d_K)


def best_bound(r: int, s: int, d_K: float) -> tuple[int, float]:
    """``(a, value)`` minimizing the main bound over ``a``; ties go to the smaller ``a``."""
    sig = Signature(r, s)
    best = None
    for a in range(1, sig.places + 1):
        v = main_bound(r, s, a, d_K)
        if best is None or v < best[1] * (1 - 1e-12):
            best = (a, v)
    return best


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    name: str
    constant: PowerProduct | None  # None when the constant is unknown
    exponent: Fraction  # of d_K
    value: float | None
    gamma_exact: bool = True
    status: str = "proven"  # proven, conjectural, constant_unknown, estimate
    applicability: str = "all"

    @property
    def proven(self) -> bool:
        return self.status == "proven"

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "constant": None if self.constant is None else str(self.constant),
            "constant_exponents": None if self.constant is None else self.constant.as_record(),
            "exponent_of_dK": str(self.exponent),
            "value": self.value,
            "gamma_exact": self.gamma_exact,
            "status": self.status,
            "applicability": self.applicability,
        }


@dataclass(frozen=True)
class BoundReport:
    signature: Signature
    d_K: int
    entries: tuple = ()

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def best_proven(self) -> BoundEntry:
        """Smallest bound that is proven (conjectural or unknown constants never count)."""
        ok = [e for e in self.entries if e.proven and e.value is not None]
        return min(ok, key=lambda e: e.value)


def _entry(name, const, exponent, d, status="proven", applicability="all", gamma_exact=True):
    value = None if const is None else float(const) * d ** float(exponent)
    return BoundEntry(name, const, Fraction(exponent), value, gamma_exact, status, applicability)


def classical_bounds(r: int, s: int, d_K: float) -> BoundReport:
    """Earlier bounds that apply to signature ``(r, s)``."""
    sig = Signature(r, s)
    n = sig.n
    two = PowerProduct.of(2)
    out = []
    if s == 0:
        out.append(_entry("minkowski", two ** -n, Fraction(1, 2), d_K, "conjectural", "s = 0"))
        out.append(_entry("chebotarev", two ** Fraction(-n, 2), Fraction(1, 2), d_K, "proven", "s = 0"))
    out.append(_entry("bayer", two ** -n, 1, d_K))
    if (r, s) == (1, 1):
        out.append(_entry("complex_cubic", 1 / (16 * two ** Fraction(1, 3)), Fraction(2, 3), d_K, "proven", "(r,s) = (1,1)"))
    if (r, s) == (0, 1):
        out.append(_entry("complex_quadratic", PowerProduct.of(Fraction(1, 8)), 1, d_K, "proven", "(r,s) = (0,1)"))
    # exponent of det(L); det = 2^{-s} sqrt(d_K) halves it for d_K
    det_exp = max(Fraction(n - 1, r + s), Fraction(n - s) / (Fraction(r + s) - Fraction(s, 2)))
    out.append(BoundEntry("davenport_swinnerton_dyer", None, det_exp / 2, None, True, "constant_unknown"))
    return BoundReport(sig, int(d_K), tuple(out))


def field_bounds(r: int, s: int, d_K: int) -> BoundReport:
    """Classical bounds plus the main bound for every ``a``, the best ``a`` and the simplified form."""
    sig = Signature(r, s)
    entries = list(classical_bounds(r, s, d_K).entries)
    for a in range(1, sig.places + 1):
        t = main_bound_symbolic(r, s, a)
        status = "proven" if t.gamma_exact else "estimate"
        entries.append(_entry(f"main_a{a}", t.constant, t.exponent, d_K, status, gamma_exact=t.gamma_exact))
    if sig.n >= 4:
        t = intro_bound_symbolic(r, s)
        entries.append(_entry("simplified", t.constant, t.exponent, d_K, "proven", "n >= 4"))
    return BoundReport(sig, int(d_K), tuple(entries))


@dataclass(frozen=True)
class TableRow:
    n: int
    s: int
    entries: tuple  # distinct TableEntry objects, the bound is their minimum

    @property
    def r(self) -> int:
        return self.n - 2 * self.s

    def value(self, d: float) -> float:
        return min(e.value(d) for e in self.entries)

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "entries": [
                {
                    "a": list(e.a_values),
                    "constant": str(e.constant),
                    "constant_exponents": e.constant.as_record(),
                    "constant_decimal": float(e.constant),
                    "exponent_of_dK": str(e.exponent),
                }
                for e in self.entries
            ],
        }


def reproduce_table(max_degree: int = 5) -> list[TableRow]:
    """Rows ``(n, s)`` for ``n <= max_degree``; each lists the distinct expressions over ``a``."""
    rows = []
    for n in range(1, max_degree + 1):
        for s in range(0, n // 2 + 1):
            r = n - 2 * s
            distinct: list[TableEntry] = []
            for a in range(1, r + s + 1):
                t = main_bound_symbolic(r, s, a)
                for i, e in enumerate(distinct):
                    if e.constant == t.constant and e.exponent == t.exponent:
                        distinct[i] = TableEntry(e.constant, e.exponent, e.a_values + (a,), e.gamma_exact)
                        break
                else:
                    distinct.append(t)
            rows.append(TableRow(n, s, tuple(distinct)))
    return rows


def render_table(rows: list[TableRow]) -> str:
    lines = [f"{'n':>2} {'s':>2}  upper bound for M(K)"]
    for row in rows:
        body = ", ".join(str(e) for e in row.entries)
        if len(row.entries) > 1:
            body = f"min({body})"
        lines.append(f"{row.n:>2} {row.s:>2}  {body}")
    return "\n".join(lines)
