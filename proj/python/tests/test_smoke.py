import math

import pytest

import plaquefsi


def test_baseline_config_round_trips():
    text = plaquefsi.baseline_config()
    assert plaquefsi.check_config(text) == text


def test_invalid_config_raises():
    text = plaquefsi.baseline_config().replace("zeta = 1", "zeta = -1")
    with pytest.raises(plaquefsi.ConfigError, match="physics.zeta"):
        plaquefsi.check_config(text)


def test_mesh_summary():
    m = plaquefsi.mesh_summary(8)
    assert m["cells"] == 256
    assert m["interface_facets"] == 8


def test_assumption_report_of_default_energy():
    r = plaquefsi.assumption_report(mu=1.5, samples=200)
    assert abs(r["c1"] - 3.0) <= 1e-10
    assert r["frame_indifference_violation"] <= 1e-12
    assert r["legendre_hadamard_min"] > 0.0


def test_growth_ode_matches_exponential():
    s = plaquefsi.growth_ode_study(10.0, 1.0, 1.0, [1e-3, 5e-4, 2.5e-4])
    assert s["richardson_error"] <= 1e-8
    assert s["exact"] == pytest.approx(math.exp(0.1 * 0.1 * 10.0 / 2.0), rel=1e-14)


def test_spectral_bound_is_negative():
    rows = plaquefsi.eigen_study(4, [1.0, 2.0])
    assert rows[0]["omega_max"] < 0.0
    assert rows[1]["omega_max"] / rows[0]["omega_max"] == pytest.approx(2.0, rel=1e-6)


def test_small_run(tmp_path):
    text = (
        plaquefsi.baseline_config()
        .replace("n = 32", "n = 4")
        .replace("T = 0.02", "T = 0.004")
        .replace("dt = 0.001", "dt = 0.002")
    )
    out = plaquefsi.run(text, tmp_path / "run")
    assert out["exit_code"] == 0
    assert out["summary"]["status"] == "converged"
    assert (tmp_path / "run" / "diagnostics.csv").exists()
