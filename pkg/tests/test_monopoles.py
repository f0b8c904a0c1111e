"""Tests for the monopole catalog and flux reports."""
import json

import numpy as np
import pytest

from twoholonomy.errors import UnsupportedFamily
from twoholonomy.liegroups import SUnxRToUn
from twoholonomy.monopoles import (
    catalog,
    flux_label,
    flux_payload,
    invariance_defect,
    magnetic_flux,
    make_config,
    x_generator,
)
from twoholonomy.transport import TransportConfig

CFG = TransportConfig(steps=128, tolerance=1e-6)


class TestCatalog:
    def test_size_and_families(self):
        configs = catalog()
        assert len(configs) == 32
        assert [c.family for c in configs].count("U1") == 7
        assert [c.family for c in configs].count("Un") == 15

    def test_x_generator(self):
        x = x_generator(3)
        assert np.trace(x) == pytest.approx(0)
        assert np.allclose(np.diag(x), 1j * np.array([1, 1, -2]) / 3)
        # exp(2 pi X) is central, hence trivial in PSU(3)
        assert np.allclose(np.exp(2 * np.pi * np.diag(x)), np.exp(2j * np.pi / 3))

    @pytest.mark.parametrize(
        "family,n,charge,index",
        [("U1", None, -3, 3), ("U1", None, 2, -2), ("SO3", None, 1, 1), ("SUnZn", 4, 3, 3), ("Un", 3, 2, -6), ("Un", 1, -1, 1)],
    )
    def test_expected_indices(self, family, n, charge, index):
        assert make_config(family, n, charge).expected_index == index

    def test_un_expected_flux_is_identity_pair(self):
        config = make_config("Un", 2, -2)
        a, t = config.covering.cover.split(config.expected_flux)
        assert np.allclose(a, np.eye(2)) and t == pytest.approx(2.0)

    @pytest.mark.parametrize("alias", ["u1", "U(1)", "so3", "SUNZN", "un"])
    def test_family_aliases(self, alias):
        assert make_config(alias, check=False).family in ("U1", "SO3", "SUnZn", "Un")

    @pytest.mark.parametrize(
        "args",
        [("Sp2",), ("SUnZn", 5), ("Un", 4), ("SO3", None, 2), ("U1", None, 1.5)],
    )
    def test_unsupported(self, args):
        with pytest.raises(UnsupportedFamily):
            make_config(*args)

    def test_sunzn_charge_reduced_with_note(self):
        config = make_config("SUnZn", 3, 5)
        assert config.charge == 2 and config.expected_index == 2
        assert "reduced mod 3" in config.notes[0]

    @pytest.mark.parametrize("config", [c for c in catalog() if c.charge in (1, -1) or c.family == "SO3"], ids=lambda c: c.connection.name)
    def test_flux_is_alpha_invariant(self, config):
        """The kernel element is fixed by alpha_g for 20 random g."""
        defect = invariance_defect(config, config.expected_index, np.random.default_rng(0), samples=20)
        assert defect < 1e-12


class TestLabels:
    def test_labels(self):
        assert flux_label(make_config("U1").covering, -3) == "-3"
        assert flux_label(make_config("SO3").covering, 1) == "-I2"
        assert flux_label(make_config("SUnZn", 3).covering, 2) == "exp(2 pi i 2/3) I3"
        assert flux_label(make_config("SUnZn", 3).covering, 0) == "I3"
        assert flux_label(SUnxRToUn(2), -4) == "(I2, -2)"
        assert flux_label(SUnxRToUn(2), 1) == "(exp(-2 pi i 1/2) I2, 1/2)"

    def test_payload_kinds(self):
        assert flux_payload(make_config("U1").covering, 2) == {"kind": "integer", "value": 2, "label": "2"}
        p = flux_payload(make_config("SO3").covering, 1)
        assert p["kind"] == "matrix"
        assert p["value"] == [[[-1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
        p = flux_payload(SUnxRToUn(2), -2)
        assert p["kind"] == "pair" and p["value"]["real"] == -1
        assert p["value"]["matrix"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]

    def test_payload_no_negative_zero(self):
        text = json.dumps(flux_payload(make_config("SUnZn", 4).covering, 2))
        assert "-0.0" not in text


class TestReports:
    @pytest.mark.parametrize("method", ["lift", "integral", "both"])
    def test_methods(self, method):
        r = magnetic_flux(make_config("U1", charge=2), method, CFG)
        assert r.kernel_index == -2 and r.matches_expected
        assert r.agree is (True if method == "both" else None)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            magnetic_flux(make_config("U1"), "guess", CFG)

    def test_json_schema(self):
        r = magnetic_flux(make_config("Un", 2, 1), "both", CFG)
        d = json.loads(r.to_json())
        assert set(d) == {"family", "n", "charge", "method", "flux", "snap_distance", "samples", "tolerance", "agree", "elapsed_ms", "notes"}
        assert d["flux"]["kind"] == "pair" and d["flux"]["value"]["real"] == -1
        assert d["samples"] == 128 and d["tolerance"] == 1e-6 and d["agree"] is True
        assert d["snap_distance"] < 1e-4

    def test_deterministic_apart_from_timing(self):
        config = make_config("SO3")
        a = magnetic_flux(config, "both", CFG).to_dict()
        b = magnetic_flux(config, "both", CFG).to_dict()
        a.pop("elapsed_ms"), b.pop("elapsed_ms")
        assert a == b
