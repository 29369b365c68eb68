import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixsig.core import Signature, norm_form_chart
from mixsig.flow import (
    TorusPoint,
    apply_flow,
    certify_bound_chain,
    degenerate_set,
    flow_chart,
    objective,
    search_semi_wellrounded,
)
from mixsig.minima import homogeneous_minimum, inhomogeneous_minimum
from mixsig.numberfield import field_units, minkowski_embed, unit_action

from conftest import integer_lattice


def torus_point(sig, raw):
    """Project free log coordinates onto the weighted-sum-zero hyperplane."""
    w = np.asarray(sig.weights, dtype=float)
    x = np.asarray(raw, dtype=float)
    return TorusPoint(sig, tuple((x - w * (w @ x) / (w @ w)).tolist()))


def unit_points(nf):
    spec = nf.field
    return [TorusPoint.from_diagonal(unit_action(spec, nf.embeddings, u)) for u in field_units(spec)]


class TestTorusPoint:
    def test_weighted_sum(self):
        with pytest.raises(ValueError):
            TorusPoint(Signature(1, 1), (1.0, 1.0))
        TorusPoint(Signature(1, 1), (2.0, -1.0))

    def test_group(self):
        sig = Signature(2, 1)
        g, h = torus_point(sig, [1, 2, 0.5]), torus_point(sig, [-3, 0, 1])
        assert np.allclose((g * h).chart_scales(), g.chart_scales() * h.chart_scales())
        assert np.allclose(g.diagonal().entries, np.exp(g.log_coords))


class TestApplyFlow:
    def test_scales_rows(self):
        sig = Signature(1, 1)
        g = TorusPoint(sig, (math.log(4), -math.log(2)))
        lat = integer_lattice(3, 1)
        out = apply_flow(g, lat)
        assert np.allclose(out.chart, np.diag([4, 0.5, 0.5]))

    def test_det_and_norm_invariant(self, field_lattices):
        rng = np.random.default_rng(0)
        for nf in field_lattices.values():
            lat = nf.lattice
            sig = lat.signature
            g = torus_point(sig, rng.normal(size=sig.places))
            out = apply_flow(g, lat)
            assert out.det == pytest.approx(lat.det, rel=1e-12)
            assert np.allclose(norm_form_chart(out.chart.T, sig), norm_form_chart(lat.chart.T, sig), rtol=1e-9)

    def test_signature_mismatch(self, zsqrt2):
        with pytest.raises(ValueError):
            apply_flow(TorusPoint.identity(Signature(0, 1)), zsqrt2)

    def test_units_preserve_lattice(self, field_lattices):
        # totally real fields, where |sigma(u)| differs from sigma(u) only by signs
        for label in ("Q(sqrt2)", "Q(sqrt3)", "Q(sqrt5)"):
            nf = field_lattices[label]
            for u in field_units(nf.field):
                g = TorusPoint.from_diagonal(unit_action(nf.field, nf.embeddings, u))
                # the torus acts by |sigma(u)|; restore the signs
                emb = minkowski_embed(nf.field, nf.embeddings, u).chart()
                signs = np.array([np.sign(float(x)) for x in emb])
                moved = signs[:, None] * apply_flow(g, nf.lattice).chart
                coords = np.linalg.solve(nf.lattice.chart, moved)
                assert np.allclose(coords, np.round(coords), atol=1e-9)
                assert abs(round(np.linalg.det(np.round(coords)))) == 1


class TestObjective:
    def test_periodic_in_units(self, field_lattices):
        rng = np.random.default_rng(1)
        for label in ("Q(sqrt2)", "cubic-23"):
            nf = field_lattices[label]
            sig = nf.lattice.signature
            (u,) = unit_points(nf)
            for _ in range(5):
                g = torus_point(sig, rng.normal(size=sig.places))
                a = objective(flow_chart(g, nf.lattice.chart), sig)
                b = objective(flow_chart(g * u, nf.lattice.chart), sig)
                assert a == pytest.approx(b, rel=1e-9)

    def test_at_least_one(self, zsqrt2):
        assert objective(zsqrt2.chart, zsqrt2.signature) >= 1


class TestDegenerateSet:
    def test_integer_lattice_empty(self):
        for n in (2, 3):
            dd = degenerate_set(TorusPoint.identity(Signature(n, 0)), integer_lattice(n))
            assert dd.D == () and dd.span_dim == 0 and dd.empty_by_margin

    def test_zsqrt2(self, zsqrt2):
        dd = degenerate_set(TorusPoint.identity(Signature(2, 0)), zsqrt2)
        assert dd.D == ((-1, 0), (1, 0)) and dd.span_dim == 1

    def test_empty_at_wellrounded_point(self, zsqrt2):
        res = search_semi_wellrounded(zsqrt2, [unit_points_diag(zsqrt2)])
        assert degenerate_set(res.g_star, zsqrt2).span_dim == 0

    def test_locally_constant(self, zsqrt2):
        # D does not change under small perturbations of a generic g
        sig = zsqrt2.signature
        g = TorusPoint(sig, (0.3, -0.3))
        base = degenerate_set(g, zsqrt2).D
        for eps in (1e-4, -1e-4):
            assert degenerate_set(g * TorusPoint(sig, (eps, -eps)), zsqrt2).D == base


def unit_points_diag(zsqrt2):
    # 1 + sqrt2 acting on the two real places
    from mixsig.numberfield import DiagonalElement

    e = 1 + math.sqrt(2)
    return DiagonalElement(zsqrt2.signature, (e, 1 / e))


class TestSearch:
    def test_zsqrt2(self, field_lattices):
        nf = field_lattices["Q(sqrt2)"]
        units = [unit_action(nf.field, nf.embeddings, u) for u in field_units(nf.field)]
        res = search_semi_wellrounded(nf.lattice, units)
        assert res.converged and res.mode == "torus" and res.ratio - 1 <= 1e-6
        t2 = math.exp(2 * res.g_star.log_coords[0])
        assert min(abs(t2 - (math.sqrt(2) - 1)), abs(1 / t2 - (math.sqrt(2) - 1))) <= 1e-6
        assert res.profile.mu == pytest.approx([(2 * math.sqrt(2)) ** 0.5] * 2, abs=1e-6)

    def test_point_mode(self, gaussian):
        res = search_semi_wellrounded(gaussian)
        assert res.mode == "point" and res.converged and res.ratio == 1.0

    def test_box_mode(self):
        lat = integer_lattice(2)
        res = search_semi_wellrounded(lat)
        assert res.mode == "box" and res.converged

    def test_cubic(self, field_lattices):
        nf = field_lattices["cubic-23"]
        units = [unit_action(nf.field, nf.embeddings, u) for u in field_units(nf.field)]
        res = search_semi_wellrounded(nf.lattice, units)
        assert res.converged and res.span_dim <= 1

    def test_workers_deterministic(self, field_lattices):
        nf = field_lattices["Q(sqrt5)"]
        units = [unit_action(nf.field, nf.embeddings, u) for u in field_units(nf.field)]
        a = search_semi_wellrounded(nf.lattice, units)
        b = search_semi_wellrounded(nf.lattice, units, workers=2)
        assert a.g_star == b.g_star and a.ratio == b.ratio


class TestChain:
    def test_zsqrt2(self, field_lattices):
        nf = field_lattices["Q(sqrt2)"]
        lat = nf.lattice
        units = [unit_action(nf.field, nf.embeddings, u) for u in field_units(nf.field)]
        res = search_semi_wellrounded(lat, units)
        M = inhomogeneous_minimum(lat, tol=1e-4)
        m = homogeneous_minimum(lat, "number_field")
        for a in (1, 2):
            checks = certify_bound_chain(lat, res.g_star, a, M, m)
            assert [c.name for c in checks] == ["minima_product", "inhomogeneous_vs_mu_n", "homogeneous_vs_mu_1"]
            assert all(c.holds for c in checks)

    def test_bad_a(self, zsqrt2):
        M = inhomogeneous_minimum(zsqrt2, tol=1e-2)
        m = homogeneous_minimum(zsqrt2, "number_field")
        with pytest.raises(ValueError):
            certify_bound_chain(zsqrt2, TorusPoint.identity(zsqrt2.signature), 3, M, m)


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_flow_preserves_det(raw):
    sig = Signature(1, 1)
    g = torus_point(sig, raw[:2])
    chart = np.array([[1.0, 0.2, 0.0], [0.0, 1.0, 0.3], [0.1, 0.0, 1.0]])
    assert abs(np.linalg.det(flow_chart(g, chart))) == pytest.approx(abs(np.linalg.det(chart)), rel=1e-9)
