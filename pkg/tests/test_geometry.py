"""Tests for paths, bigons and the two-chart cover of the sphere."""
import numpy as np
import pytest

from twoholonomy.errors import EndpointMismatch, OutOfPatch
from twoholonomy.geometry import (
    ChartPoint,
    SphereCover,
    arc,
    bigon_area,
    concat,
    constant_path,
    embed,
    latitude_loop,
    monopole_bigons,
    reverse,
    sphere_family,
)


class TestPoints:
    def test_embed_is_unit(self):
        th, ph = np.meshgrid(np.linspace(0, np.pi, 7), np.linspace(0, 2 * np.pi, 5))
        assert np.allclose(np.linalg.norm(embed(th, ph), axis=-1), 1.0)

    def test_azimuth_is_periodic(self):
        assert ChartPoint(1.0, 0.3).same_point(ChartPoint(1.0, 0.3 + 2 * np.pi))
        assert ChartPoint(0.0, 0.0).same_point(ChartPoint(0.0, 2.0))

    def test_theta_range(self):
        with pytest.raises(ValueError):
            ChartPoint(-0.1, 0.0)


class TestPaths:
    def test_arc_endpoints(self):
        p = arc(0.2, 0.0, 1.0, 2.0)
        assert p.start == ChartPoint(0.2, 0.0)
        assert p.end == ChartPoint(1.0, 2.0)

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            arc(0, 0, 1, 1).eval(1.5)

    def test_concat_order_and_breaks(self):
        p, q = arc(0.2, 0.0, 1.0, 0.0), arc(1.0, 0.0, 1.0, 1.0)
        pq = concat(p, q)
        assert pq.breaks == (0.0, 0.5, 1.0)
        assert pq(0.25).same_point(ChartPoint(0.6, 0.0))
        assert pq(0.75).same_point(ChartPoint(1.0, 0.5))

    def test_concat_endpoint_mismatch(self):
        with pytest.raises(EndpointMismatch):
            concat(arc(0.2, 0, 1, 0), arc(0.5, 0, 1, 0))

    def test_reverse(self):
        p = concat(arc(0.2, 0.0, 1.0, 0.0), arc(1.0, 0.0, 1.0, 1.0))
        r = reverse(p)
        t = np.linspace(0, 1, 11)
        assert np.allclose(np.stack(r.eval(t)), np.stack(p.eval(1 - t)))
        assert r.breaks == (0.0, 0.5, 1.0)

    def test_sitting_instants(self):
        p = arc(0.2, 0.0, 1.0, 1.0).with_sitting_instants(0.1)
        th, _ = p.eval(np.array([0.0, 0.05, 0.1, 0.9, 0.95, 1.0]))
        assert np.allclose(th, [0.2, 0.2, 0.2, 1.0, 1.0, 1.0])
        assert p.breaks == (0.0, 0.1, 0.9, 1.0)

    def test_sitting_instants_keep_breaks(self):
        p = concat(arc(0.2, 0.0, 1.0, 0.0), arc(1.0, 0.0, 1.0, 1.0)).with_sitting_instants(0.1)
        assert 0.5 in p.breaks
        th, ph = p.eval(0.5)
        assert (float(th), float(ph)) == pytest.approx((1.0, 0.0))

    def test_reparametrize_moves_breaks(self):
        p = concat(arc(0.2, 0.0, 1.0, 0.0), arc(1.0, 0.0, 1.0, 1.0))
        q = p.reparametrize(lambda t: t**2, np.sqrt)
        assert q.breaks[1] == pytest.approx(np.sqrt(0.5))
        assert q(0.5).same_point(p(0.25))

    def test_constant_path(self):
        p = constant_path(ChartPoint(1.0, 2.0))
        th, ph = p.eval(np.linspace(0, 1, 4))
        assert np.all(th == 1.0) and np.all(ph == 2.0)


class TestCover:
    def test_bounds_and_overlap(self):
        c = SphereCover(0.2)
        assert c.contains("N", 0.0) and not c.contains("S", 0.0)
        assert c.contains("S", np.pi) and not c.contains("N", np.pi)
        assert c.contains("N", np.pi / 2) and c.contains("S", np.pi / 2)
        assert c.in_overlap(np.pi / 2 + 0.1) and not c.in_overlap(np.pi / 2 + 0.3)

    def test_require_raises(self):
        with pytest.raises(OutOfPatch):
            SphereCover().require("N", np.array([0.1, 2.5]))

    def test_invalid_delta(self):
        with pytest.raises(ValueError):
            SphereCover(0.0)


class TestLoopsAndBigons:
    def test_latitude_loop_is_based(self):
        cover = SphereCover(basepoint_phi=0.7)
        loop = latitude_loop(cover, 0.4)
        assert loop.start.same_point(cover.basepoint)
        assert loop.end.same_point(cover.basepoint)
        assert loop(0.5).same_point(ChartPoint(0.4, 0.7 + np.pi))
        assert loop.patch == "N"
        assert latitude_loop(cover, 2.0).patch == "S"

    def test_monopole_bigons_meet_at_equator(self):
        sn, ss, eq = monopole_bigons(SphereCover())
        t = np.linspace(0, 1, 9)
        assert np.allclose(np.stack(sn.target.eval(t)), np.stack(eq.eval(t)))
        assert np.allclose(np.stack(ss.source.eval(t)), np.stack(eq.eval(t)))
        assert np.allclose(sn.source.eval(t)[0][2:-2], 0.0)

    def test_closed_form_ds_matches_finite_difference(self):
        sn, _, _ = monopole_bigons(SphereCover())
        t, s = np.linspace(0.01, 0.99, 13), 0.37
        exact = sn.partial_s(t, s)
        fd = type(sn)(sn.fn, sn.t_breaks, sn.patch).partial_s(t, s)
        assert np.allclose(exact, fd, atol=1e-6)

    @pytest.mark.parametrize("which,area", [(0, 2 * np.pi), (1, 2 * np.pi)])
    def test_hemisphere_areas(self, which, area):
        bigon = monopole_bigons(SphereCover())[which]
        assert bigon_area(bigon) == pytest.approx(area, rel=1e-10)

    def test_sphere_area(self):
        assert bigon_area(sphere_family(SphereCover())) == pytest.approx(4 * np.pi, rel=1e-10)
