import math

import pytest

import normsol


def test_fiber_roots_unit_triple():
    r = normsol.fiber_roots(1.0, 1.0, 1.0, mu=1.0)
    assert r["case"] == "TwoCritical"
    assert r["t_plus"] == pytest.approx(0.3833, rel=1e-3)
    assert r["t_minus"] == pytest.approx(0.8682, rel=1e-3)
    assert normsol.fiber_roots(1.0, 1.0, 1.0, mu=2.0)["case"] == "NoCritical"


def test_threshold_closed_form():
    assert normsol.mu_threshold(1.0, 1.0, 1.0) == pytest.approx(32.0 / 3.0 * 5.0 ** -1.25, rel=1e-14)


def test_invalid_exponents_raise():
    with pytest.raises(ValueError):
        normsol.fiber_roots(1.0, 1.0, 1.0, mu=1.0, q=5.0)


def test_ground_state():
    r = normsol.solve(mu=10.0, M=1000)
    assert r["converged"]
    assert r["energy"] < 0.0
    assert r["lambda"] < 0.0
    assert r["manifold"] == "Plus"
    assert len(r["r"]) == len(r["u"]) == 1001


def test_infeasible_coupling():
    with pytest.raises(normsol.InfeasibleBranch):
        normsol.solve(mu=30.0, M=800)


def test_constants_and_verify_rows():
    assert normsol.sobolev_constant(3) ** 1.5 / 3.0 == pytest.approx(4.2736, rel=1e-4)
    assert normsol.improvement_ratio(3, 3.0, 5.0) >= 1.0
    rows = normsol.verify(2)
    assert rows and all(row["pass"] for row in rows)


def test_config_roundtrip():
    kv = normsol.config_to_kv('{"mu": 2.5, "seed": 7}')
    assert "mu=2.5" in kv.splitlines()
    assert "seed=7" in kv.splitlines()
    assert math.isfinite(float(kv.splitlines()[1].split("=")[1]))
