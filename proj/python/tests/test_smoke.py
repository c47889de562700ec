import math

import pytest

import quintlab as ql


def test_classifier_labels():
    assert ql.preset("kdv5").type == "non-parabolic"
    assert ql.parse_nonlinearity("2*u2*u1^2").classify() == "parabolic"
    assert ql.parse_nonlinearity("2*u2*u1^2 + u2^2*u0").classify() == "non-parabolic"
    assert "kdv5" in ql.preset_names()


def test_p_functional_on_cosine():
    f = ql.Field.from_modes(16, [(1, 0.5 + 0j)])
    n1 = ql.parse_nonlinearity("2*u2*u1^2")
    assert n1.p_functional(f) == pytest.approx(1.0, abs=1e-12)
    assert n1.p_density() == "2*w1^2"


def test_field_roundtrip_and_norms():
    f = ql.random_band_field(5, 2.0, 1.0, 32)
    g = ql.field_from_json(ql.field_to_json(f))
    assert ql.sobolev_norm(f - g, 4.0) == 0.0
    assert ql.mean(f) == 0.0
    vals = f.sample_values(128)
    assert len(vals) == 128


def test_resonance():
    sym = ql.DispersionSymbol.pure_power(2)
    assert ql.phi(sym, 2) == 32j
    assert ql.resonance_fn(sym, [24, 28, 67, -3, -54, -62]) == 0
    hits = ql.resonance_search(sym, 2, 10)
    assert all(sum(t) == 0 for t in hits)
    assert all(ql.resonance_fn(sym, list(t)) == 0 for t in hits)


def test_oscillation_bound():
    sym = ql.DispersionSymbol.pure_power(2)
    rep = ql.verify_oscillation(sym, 2, 4.0, 60)
    assert rep["min_ratio"] >= 2.4
    assert rep["support_count"] > 0


def test_evolve_conserves_mean():
    phi0 = ql.Field.from_modes(32, [(1, 0.005 + 0j)])
    out = ql.evolve("kdv5", 0.0, phi0, t_end=0.01, dt=1e-4, stride=20)
    assert out["status"] == "completed"
    assert max(abs(m) for m in out["mean"]) < 1e-12
    assert out["sob_4"][0] == pytest.approx(out["sob_4"][-1], rel=1e-3)


def test_bona_smith_attenuation():
    f = ql.Field.from_modes(8, [(3, 0.5 + 0j)])
    sm = ql.bona_smith(f, 0.25, 8.0)
    expect = 0.5 * math.exp(-0.25 * 10.0**4)
    assert abs(sm.mode(3)) == pytest.approx(expect, rel=1e-12)


def test_j1_functional_value():
    n1 = ql.parse_nonlinearity("2*u2*u1^2")
    phi = ql.Field.from_modes(32, [(1, 0.5 + 0j)])
    sym = ql.DispersionSymbol.pure_power(2)
    assert ql.j1_functional(n1, phi, sym, 0.0) == pytest.approx(-1.0, abs=1e-9)
