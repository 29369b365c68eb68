"""Univariate polynomial helpers: exact arithmetic over Q, Sturm sequences, root finding.

Polynomials are lists of coefficients, constant term first.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath

Poly = list  # list[Fraction], constant term first


def normalize(p: Sequence) -> Poly:
    out = [Fraction(c) for c in p]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out or [Fraction(0)]


def degree(p: Sequence) -> int:
    p = normalize(p)
    return -1 if len(p) == 1 and p[0] == 0 else len(p) - 1


def derivative(p: Sequence) -> Poly:
    return normalize([i * Fraction(c) for i, c in enumerate(p)][1:] or [0])


def mul(p: Sequence, q: Sequence) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return normalize(out)


def divmod_poly(p: Sequence, q: Sequence) -> tuple[Poly, Poly]:
    p = normalize(p)
    q = normalize(q)
    dq = degree(q)
    if dq < 0:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quot = [Fraction(0)] * max(len(p) - dq, 1)
    lead = q[-1]
    while degree(rem) >= dq and degree(rem) >= 0:
        shift = degree(rem) - dq
        f = rem[-1] / lead
        quot[shift] = f
        for i, c in enumerate(q):
            rem[i + shift] -= f * c
        rem = normalize(rem)
    return normalize(quot), normalize(rem)


def mod(p: Sequence, q: Sequence) -> Poly:
    return divmod_poly(p, q)[1]


def gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = normalize(p), normalize(q)
    while degree(b) >= 0:
        a, b = b, mod(a, b)
    if degree(a) >= 0:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sturm_sequence(p: Sequence) -> list[Poly]:
    seq = [normalize(p), derivative(p)]
    while degree(seq[-1]) > 0:
        r = mod(seq[-2], seq[-1])
        if degree(r) < 0:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _changes_at(seq, x: Fraction) -> int:
    return _sign_changes([evaluate(q, x) for q in seq])


def _changes_at_infinity(seq, sign: int) -> int:
    vals = []
    for q in seq:
        d = degree(q)
        if d < 0:
            continue
        vals.append(q[-1] * (sign**d))
    return _sign_changes(vals)


def count_real_roots(p: Sequence) -> int:
    """Number of distinct real roots (Sturm's theorem, exact)."""
    seq = sturm_sequence(p)
    return _changes_at_infinity(seq, -1) - _changes_at_infinity(seq, 1)


def is_squarefree(p: Sequence) -> bool:
    return degree(gcd(p, derivative(p))) == 0


def cauchy_bound(p: Sequence) -> Fraction:
    p = normalize(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(a, b]`` each containing exactly one real root, ascending."""
    seq = sturm_sequence(p)
    bound = cauchy_bound(p)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        k = _changes_at(seq, a) - _changes_at(seq, b)
        if k == 0:
            continue
        if k == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))
    out.sort()
    return out


def refine_real_root(p: Sequence, a: Fraction, b: Fraction, prec: int) -> mpmath.mpf:
    """Bisect the isolating interval ``(a, b]`` to ``prec`` bits."""
    with mpmath.workprec(prec + 20):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in normalize(p)]
        lo = mpmath.mpf(a.numerator) / a.denominator
        hi = mpmath.mpf(b.numerator) / b.denominator
        if evaluate(coeffs, hi) == 0:
            return +hi
        slo = evaluate(coeffs, lo) > 0
        for _ in range(prec + 40):
            mid = (lo + hi) / 2
            v = evaluate(coeffs, mid)
            if v == 0:
                return mid
            if (v > 0) == slo:
                lo = mid
            else:
                hi = mid
            if hi - lo <= abs(mid) * mpmath.mpf(2) ** (-prec - 4) + mpmath.mpf(2) ** (-prec - 30):
                break
        return (lo + hi) / 2


def aberth_roots(p: Sequence, prec: int, max_iter: int = 500) -> list[mpmath.mpc]:
    """All complex roots of a squarefree polynomial by Aberth-Ehrlich iteration."""
    p = normalize(p)
    n = degree(p)
    with mpmath.workprec(prec + 30):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in p]
        lead = coeffs[-1]
        coeffs = [c / lead for c in coeffs]
        dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
        radius = max(abs(c) for c in coeffs[:-1]) + 1 if n > 0 else mpmath.mpf(1)
        z = [
            radius / 2 * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) for k in range(n)
        ]
        tol = mpmath.mpf(2) ** (-prec - 10)
        for _ in range(max_iter):
            biggest = mpmath.mpf(0)
            new = list(z)
            for k in range(n):
                pv = evaluate(coeffs, z[k])
                dv = evaluate(dcoeffs, z[k])
                if pv == 0:
                    continue
                ratio = pv / dv
                s = mpmath.fsum(1 / (z[k] - z[j]) for j in range(n) if j != k)
                step = ratio / (1 - ratio * s)
                new[k] = z[k] - step
                biggest = max(biggest, abs(step) / max(abs(z[k]), 1))
            z = new
            if biggest < tol:
                break
        return [mpmath.mpc(w) for w in z]


def residual_bound(p: Sequence, x, prec: int):
    """Scale-aware acceptance threshold for ``|p(x)|`` at ``prec`` bits."""
    p = normalize(p)
    scale = sum(abs(mpmath.mpf(c.numerator) / c.denominator) * abs(x) ** i for i, c in enumerate(p))
    return scale * mpmath.mpf(2) ** (-prec + 16)
