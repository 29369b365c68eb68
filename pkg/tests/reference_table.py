"""Transcription of the published table of main bounds for ``n <= 5``.

Each entry is ``(rational factor, ((base, root), ...), exponent of d_K)`` and
stands for ``factor * prod base ** (-1/root) * d_K ** exponent``.
"""
from fractions import Fraction as F

from mixsig.bounds import PowerProduct

PRINTED = {
    (1, 0): [(F(1), ((2, 2),), F(1, 2))],
    (2, 0): [(F(1), ((3, 2),), F(1, 2))],
    (2, 1): [(F(1, 6), (), F(1))],
    (3, 0): [(F(1, 2), (), F(1, 2))],
    (3, 1): [(F(1, 6), ((3, 2),), F(1)), (F(1, 2), ((108, 4),), F(3, 4))],
    (4, 0): [(F(1, 2), (), F(1, 2))],
    (4, 1): [(F(1, 16), (), F(1)), (F(1, 8), (), F(3, 4)), (F(1, 4), ((4, 3),), F(2, 3))],
    (4, 2): [(F(1, 512), (), F(3, 2)), (F(1, 64), (), F(1))],
    (5, 0): [(F(1, 2), (), F(1, 2))],
    (5, 1): [
        (F(2, 25), ((5, 2),), F(1)),
        (F(1, 4), ((20, 4),), F(3, 4)),
        (F(1, 2), ((3125, 6),), F(2, 3)),
        (F(1, 2), ((12500, 8),), F(5, 8)),
    ],
    (5, 2): [(F(2, 3125), (), F(3, 2)), (F(1, 50), ((5, 2),), F(1)), (F(1, 10), ((100, 3),), F(5, 6))],
}

# entries whose printed constant disagrees with the closed form: (n, s, index) -> recomputed constant
# 1/(4 * 20^{1/4}) is printed, the closed form for a = 2 gives 1/(5 * 20^{1/4})
MISPRINTS = {(5, 1, 1): (F(1, 5), ((20, 4),))}


def constant(factor, radicals) -> PowerProduct:
    out = PowerProduct.of(factor)
    for base, root in radicals:
        out = out * PowerProduct.of(base) ** F(-1, root)
    return out


def expected_entries(n, s, corrected=True):
    """``[(PowerProduct, exponent), ...]`` in the printed order."""
    out = []
    for i, (q, rad, e) in enumerate(PRINTED[(n, s)]):
        if corrected and (n, s, i) in MISPRINTS:
            q, rad = MISPRINTS[(n, s, i)]
        out.append((constant(q, rad), e))
    return out
