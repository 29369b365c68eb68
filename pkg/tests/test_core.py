import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixsig.core import (
    Precision,
    Signature,
    Vector,
    lattice_from_basis,
    lattice_from_rows,
    norm_form,
    norm_form_chart,
    orthonormal_chart,
    scalar_product,
)
from mixsig.errors import RankDeficientError, SignatureMismatch


def vec(sig, *chart):
    return Vector.from_chart(sig, list(chart))


signatures = st.tuples(st.integers(0, 6), st.integers(0, 3)).filter(lambda t: 1 <= t[0] + 2 * t[1] <= 6)


@st.composite
def signature_and_vector(draw, nonzero=True):
    r, s = draw(signatures)
    sig = Signature(r, s)
    coords = draw(st.lists(st.floats(-10, 10, allow_nan=False), min_size=sig.n, max_size=sig.n))
    if nonzero and not any(coords):
        coords[0] = 1.0
    return sig, coords


class TestSignature:
    def test_dimension(self):
        assert Signature(2, 1).n == 4
        assert Signature(0, 2).places == 2
        assert Signature(1, 2).weights == (1, 2, 2)

    @pytest.mark.parametrize("r,s", [(0, 0), (-1, 1), (1, -1)])
    def test_rejects_bad(self, r, s):
        with pytest.raises(ValueError):
            Signature(r, s)


def test_precision_validation():
    with pytest.raises(ValueError):
        Precision(52)
    with pytest.raises(ValueError):
        Precision(64, 0.0)


def test_scalar_product_examples():
    s20, s01 = Signature(2, 0), Signature(0, 1)
    assert scalar_product(vec(s20, 1, 0), vec(s20, 1, 0)) == 1
    assert scalar_product(vec(s01, 0, 1), vec(s01, 0, 1)) == 1
    # (1+i) against (1-i): Re((1+i)(1+i)) = 0
    assert scalar_product(vec(s01, 1, 1), vec(s01, 1, -1)) == 0


def test_scalar_product_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        scalar_product(vec(Signature(2, 0), 1, 0), vec(Signature(0, 1), 1, 0))


def test_vector_shape_checked():
    with pytest.raises(SignatureMismatch):
        Vector(Signature(1, 1), (1,), ())
    with pytest.raises(SignatureMismatch):
        Vector.from_chart(Signature(1, 1), [1, 2])


def test_chart_examples():
    v = Vector(Signature(1, 1), (3,), ((1, 2),))
    assert orthonormal_chart(v) == [3, 1, 2]
    assert orthonormal_chart(vec(Signature(2, 0), 5, 7)) == [5, 7]
    assert scalar_product(vec(Signature(0, 1), 1, 1), vec(Signature(0, 1), 1, 1)) == 2


def test_norm_form_examples():
    assert norm_form(vec(Signature(2, 0), 2, 3)) == 6
    assert norm_form(vec(Signature(0, 1), 1, 1)) == 2
    assert norm_form(vec(Signature(1, 1), 3, 1, 1)) == 6
    assert norm_form(vec(Signature(2, 0), 0, 3)) == 0


def test_norm_form_chart_matches_mp():
    sig = Signature(1, 2)
    x = np.array([[1.5, -2.0, 0.5, 3.0, 1.0], [0.0, 1.0, 1.0, 1.0, 1.0]])
    got = norm_form_chart(x, sig)
    want = [float(norm_form(Vector.from_chart(sig, row.tolist()))) for row in x]
    assert np.allclose(got, want, rtol=1e-15)


@given(signature_and_vector())
def test_positive_definite(sv):
    sig, coords = sv
    v = Vector.from_chart(sig, coords)
    assert scalar_product(v, v) > 0


@given(signature_and_vector())
def test_amgm(sv):
    sig, coords = sv
    v = Vector.from_chart(sig, coords)
    n = sig.n
    lhs = float(norm_form(v)) ** (1 / n)
    rhs = math.sqrt(2 / n) * math.sqrt(float(scalar_product(v, v)))
    assert lhs <= rhs * (1 + 1e-12)


def test_amgm_equality_case():
    # no real places and equal complex moduli
    sig = Signature(0, 2)
    v = vec(sig, 1, 1, math.sqrt(2), 0)
    lhs = float(norm_form(v)) ** (1 / 4)
    rhs = math.sqrt(2 / 4) * math.sqrt(float(scalar_product(v, v)))
    assert lhs == pytest.approx(rhs, rel=1e-15)


@given(signature_and_vector(), st.data())
def test_chart_isometry(sv, data):
    sig, a = sv
    b = data.draw(st.lists(st.floats(-10, 10, allow_nan=False), min_size=sig.n, max_size=sig.n))
    prec = Precision(80)
    with mpmath.workprec(80):
        u = Vector.from_chart(sig, [mpmath.mpf(x) for x in a])
        v = Vector.from_chart(sig, [mpmath.mpf(x) for x in b])
        dot = mpmath.fsum(x * y for x, y in zip(u.chart(), v.chart()))
        sp = scalar_product(u, v, prec)
        scale = mpmath.sqrt(scalar_product(u, u, prec) * scalar_product(v, v, prec))
        assert abs(dot - sp) <= mpmath.mpf(2) ** -40 * scale


class TestLattice:
    def test_standard(self):
        lat = lattice_from_rows(Signature(2, 0), [[1, 0], [0, 1]])
        assert lat.det == 1.0

    def test_gaussian_integers(self):
        s = Signature(0, 1)
        lat = lattice_from_basis(s, [vec(s, 1, 0), vec(s, 0, 1)])
        assert lat.det == 1.0

    def test_zsqrt2_determinant(self):
        r2 = mpmath.sqrt(2)
        lat = lattice_from_rows(Signature(2, 0), [[1, 1], [r2, -r2]])
        assert abs(lat.determinant - mpmath.sqrt(8)) < mpmath.mpf(2) ** -100

    def test_gram(self):
        lat = lattice_from_rows(Signature(1, 1), [[1, 2, 0], [0, 1, 1], [3, 0, 1]])
        C = lat.chart_matrix
        assert mpmath.mnorm(lat.gram - C.T * C, 1) < mpmath.mpf(2) ** -100

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            lattice_from_rows(Signature(2, 0), [[1, 2], [2, 4]])

    def test_wrong_count(self):
        with pytest.raises(ValueError):
            lattice_from_rows(Signature(2, 0), [[1, 2]])

    def test_point_and_length(self):
        lat = lattice_from_rows(Signature(2, 0), [[1, 1], [0, 2]])
        assert [float(x) for x in lat.point([1, 1]).chart()] == [1.0, 3.0]
        assert lat.squared_length([1, 1]) == 10

    def test_scaled(self):
        lat = lattice_from_rows(Signature(0, 1), [[1, 0], [0, 1]])
        assert lat.scaled(3).det == pytest.approx(9.0)


@given(
    st.lists(st.integers(-5, 5), min_size=9, max_size=9),
    st.permutations([0, 1, 2]),
    st.integers(-4, 4),
)
def test_determinant_invariance(entries, perm, k):
    rows = [entries[0:3], entries[3:6], entries[6:9]]
    if round(abs(np.linalg.det(np.array(rows, dtype=float)))) == 0:
        return
    sig = Signature(1, 1)
    base = lattice_from_rows(sig, rows)
    permuted = lattice_from_rows(sig, [rows[i] for i in perm])
    sheared = [list(rows[0]), list(rows[1]), [a + k * b for a, b in zip(rows[2], rows[0])]]
    for other in (permuted, lattice_from_rows(sig, sheared)):
        assert abs(other.determinant - base.determinant) <= mpmath.mpf(2) ** -100 * base.determinant
