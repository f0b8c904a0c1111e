"""Tests for local connection data, curvature and gauge transformations."""
import numpy as np
import pytest

from twoholonomy.connection import (
    CHECK_TOL,
    b_from_curvature,
    check_connection,
    curvature,
    gauge_transform,
    identity_gauge,
    random_gauge,
    random_gauge_pair,
    structural_error,
    transition_error,
)
from twoholonomy.errors import OutOfPatch
from twoholonomy.geometry import PATCHES
from twoholonomy.liegroups import J, frobenius
from twoholonomy.monopoles import catalog, make_config

from conftest import constant_connection

FAMILY_CASES = [("U1", None, 2), ("SO3", None, 1), ("SUnZn", 2, 1), ("SUnZn", 3, 2), ("SUnZn", 4, 1), ("Un", 1, 1), ("Un", 2, -1), ("Un", 3, 2)]


class TestCurvature:
    def test_constant_connection_curvature_is_bracket(self):
        conn = constant_connection(J[0], J[1], group=make_config("SO3").covering.base)
        r = curvature(conn, "N", np.array([0.5]), np.array([0.3]))
        assert np.allclose(r[0], J[2], atol=1e-10)

    def test_monopole_curvature_closed_form(self):
        config = make_config("U1", charge=3)
        th = np.linspace(0.2, 1.5, 5)
        r = curvature(config.connection, "N", th, 0.0)
        assert np.allclose(r[..., 0, 0], -1.5j * np.sin(th), atol=1e-8)

    def test_stencil_leaving_patch(self):
        with pytest.raises(OutOfPatch):
            curvature(make_config("SO3").connection, "N", np.array([np.pi / 2 + 0.2]), 0.0)

    def test_b_from_curvature_matches_exact(self):
        conn = make_config("SUnZn", 3, 1).connection
        derived = b_from_curvature(conn)
        th, ph = np.linspace(0.3, 1.4, 6), np.linspace(0, 6, 6)
        assert np.allclose(derived.b("N", th, ph), conn.b("N", th, ph), atol=1e-8)


class TestCatalogChecks:
    """The structural equation and transition rule on 32 x 32 grids."""

    @pytest.mark.parametrize("config", catalog(), ids=lambda c: c.connection.name)
    def test_catalog_passes(self, config):
        s, t = check_connection(config.connection, n_grid=32)
        assert s < CHECK_TOL and t < CHECK_TOL

    @pytest.mark.parametrize("family,n,charge", FAMILY_CASES)
    def test_five_random_gauges(self, family, n, charge):
        config = make_config(family, n, charge)
        rng = np.random.default_rng(100 + len(family))
        for _ in range(5):
            gauged = gauge_transform(config.connection, random_gauge_pair(config.covering.base, rng))
            assert structural_error(gauged, n=32) < CHECK_TOL
            assert transition_error(gauged) < CHECK_TOL

    def test_broken_transition_is_detected(self):
        conn = make_config("SO3").connection
        broken = type(conn)(conn.covering, conn.A, conn.B, lambda th, ph: conn.g(th, 2 * np.asarray(ph)), conn.cover, "broken")
        assert transition_error(broken) > 0.1
        with pytest.raises(ValueError, match="fails checks"):
            check_connection(broken)

    def test_wrong_b_is_detected(self):
        conn = make_config("U1", charge=1).connection
        doubled = type(conn)(conn.covering, conn.A, {p: (lambda th, ph: 2 * conn.b("N", th, ph)) for p in PATCHES}, conn.transition, conn.cover)
        assert structural_error(doubled) > 0.1


class TestGauge:
    def test_identity_gauge_is_noop(self):
        conn = make_config("SO3").connection
        h = {p: identity_gauge(conn.base) for p in PATCHES}
        gauged = gauge_transform(conn, h)
        th, ph = np.linspace(0.2, 1.6, 7), np.linspace(0.0, 5.0, 7)
        for a, b in zip(gauged.a("N", th, ph), conn.a("N", th, ph)):
            assert np.allclose(a, b, atol=1e-8)
        assert np.allclose(gauged.g(th, ph), conn.g(th, ph))

    def test_random_gauge_is_smooth_at_poles(self):
        g = make_config("SO3").covering.base
        f = random_gauge(g, np.random.default_rng(0))
        at_pole = f(np.zeros(4), np.linspace(0, 6, 4))
        assert np.max(frobenius(at_pole - at_pole[0])) < 1e-12
        assert np.max(g.membership_error(at_pole)) < 1e-12

    def test_gauged_connection_drops_commuting_flag(self):
        config = make_config("SUnZn", 3, 1)
        assert config.connection.abelian
        gauged = gauge_transform(config.connection, random_gauge_pair(config.covering.base, np.random.default_rng(1)))
        assert not gauged.abelian

    def test_b_transforms_by_alpha(self):
        config = make_config("SO3")
        h = random_gauge_pair(config.covering.base, np.random.default_rng(2))
        gauged = gauge_transform(config.connection, h)
        th, ph = 0.7, 1.1
        want = config.covering.alpha_alg(h["N"](th, ph), config.connection.b("N", th, ph))
        assert np.allclose(gauged.b("N", th, ph), want)
