import math

import pytest

import thinfilm


def test_constants():
    assert thinfilm.K0 == pytest.approx(0.5 + math.log(0.5), abs=1e-15)
    assert thinfilm.critical_marangoni(1.0, 1.0) == (4.0, 8.0)
    assert thinfilm.constant_state_symbol(1.0, 1.0, 8.5) == pytest.approx(0.125)


def test_fixed_points_and_orbits():
    fp = thinfilm.fixed_points(1.0, 8.0, thinfilm.K0 - 0.05)
    assert fp["kind_l"] == "center-minimum"
    assert fp["kind_u"] == "saddle"
    assert -1.0 < fp["v_l"] < 0.0 < fp["v_u"]

    ei = thinfilm.energy_interval(1.0, 8.0, thinfilm.K0 - 0.05)
    assert ei["E_min"] < ei["E_max"]
    E = ei["E_min"] + 0.3 * (ei["E_max"] - ei["E_min"])
    orb = thinfilm.orbit(E, 1.0, 8.0, thinfilm.K0 - 0.05)
    assert orb["q0"] < fp["v_l"] < orb["q1"]
    assert orb["period"] > 0.0
    assert orb["mean_v"] < 0.0


def test_v_max_infinity():
    K = -0.4
    v = thinfilm.v_max_infinity(K)
    ek = math.exp(K)
    assert v == pytest.approx(-(2.0 * ek - 1.0) / (ek - 1.0), rel=1e-14)


def test_solve_profile():
    sol = thinfilm.solve_profile(1.0, 1.0, 7.9, 0.11)
    assert sol["min_h"] > 0.8
    assert sol["K"] < thinfilm.K0
    assert abs(sol["coeffs"][0]) == pytest.approx(0.1107, abs=5e-3)


def test_branch_and_spectrum():
    rec = thinfilm.continue_branch(max_steps=6)
    assert rec["termination"] == "user-bound"
    assert len(rec["points"]) == 6
    Ms = [p["M"] for p in rec["points"]]
    assert all(a > b for a, b in zip(Ms, Ms[1:]))

    p = rec["points"][2]
    rep = thinfilm.spectrum(p["coeffs"], p["k0"], p["M"])
    assert rep["leading"] > 0.0


def test_growth_rate():
    r = thinfilm.measure_growth_rate(1, 8.5)
    assert r == pytest.approx(0.125, rel=0.02)


def test_errors():
    with pytest.raises(ValueError):
        thinfilm.fixed_points(-1.0, 8.0, thinfilm.K0)
    with pytest.raises(ValueError):
        thinfilm.energy_interval(1.0, 4.0, thinfilm.K0)
    with pytest.raises(RuntimeError):
        thinfilm.solve_profile(1.0, 1.0, 7.0, 0.9)
