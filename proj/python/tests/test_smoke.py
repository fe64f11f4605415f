import math
import os
import pathlib

import pytest

import hybridheat as hh

CONFIGS = pathlib.Path(os.environ.get("HYBRIDHEAT_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))


def test_travel_times_closed_form():
    c = hh.Coefficients(rho1="1 + x^2")
    g1, g2 = c.travel_times()
    assert g1 == pytest.approx((math.sqrt(2) + math.asinh(1)) / 2, abs=1e-10)
    assert g2 == pytest.approx(1.0)


def test_first_eigenvalue_of_uniform_rods():
    lam = hh.eigenvalues(hh.Coefficients(), 4)
    assert lam[0] == pytest.approx(1.1596576, rel=1e-7)
    assert lam[1] == pytest.approx(math.pi**2, rel=1e-11)
    assert all(a < b for a, b in zip(lam, lam[1:]))


def test_report_is_certified():
    r = hh.spectral_report(hh.Coefficients(), 10, "neumann")
    assert r["certified"]
    assert r["min_gap"] > 0
    assert len(r["eigenvalues"]) == 10


def test_orthonormal_eigenpairs():
    g = hh.gram_matrix(hh.load_config(CONFIGS / "variable.yaml").coefficients, 6)
    for i, row in enumerate(g):
        for j, v in enumerate(row):
            assert abs(v - (i == j)) < 1e-7


def test_control_meets_moments():
    d = hh.synthesize_control(hh.Coefficients(), "mode:1")
    assert d["max_residual"] <= 1e-8
    assert len(d["t"]) == len(d["h"])
    assert abs(d["h"][-1]) < 1e-10


def test_verify_passes():
    cfg = hh.load_config(CONFIGS / "constant_neumann.yaml")
    r = hh.verify(cfg.coefficients, "mode:1", cfg.bc, cfg.horizon, cfg.n_modes, cfg.taper)
    assert r["pass"]
    assert r["baseline_ratio"] >= 1e4


def test_free_decay_is_dissipative():
    t, e = hh.simulate_free(hh.Coefficients(mass=0.5), "mode:2", nx=64, nt=512)
    assert all(b <= a for a, b in zip(e, e[1:]))


def test_errors_map_to_exceptions():
    with pytest.raises(hh.ValidationError):
        hh.Coefficients(mass=-1)
    with pytest.raises(hh.ValidationError):
        hh.parse_config("rods: {}")
    with pytest.raises(hh.ConditioningError):
        hh.synthesize_control(hh.Coefficients(), "mode:1", n_modes=40, taper=0, precision="double")
    assert issubclass(hh.ConditioningError, hh.NumericalError)
    assert issubclass(hh.NumericalError, hh.HybridHeatError)


def test_corpus_is_deterministic():
    a = hh.perturbed_corpus(hh.Coefficients(), 7, 2)
    b = hh.perturbed_corpus(hh.Coefficients(), 7, 2)
    assert [c.mass for c in a] == [c.mass for c in b]
    assert hh.eigenvalues(a[0], 3) == hh.eigenvalues(b[0], 3)
