import json
import math

import pytest

import sphbif


def test_eigenvalues():
    assert sphbif.eigenvalues(3, 8) == [0, 3, 8, 15, 24, 35, 48, 63]
    nu = sphbif.eigenvalues(2, 16)
    assert all(nu[k] == k * (k + 1) for k in range(16))
    with pytest.raises(ValueError):
        sphbif.eigenvalues(1, 8)


def test_nodal_zeros():
    z = sphbif.nodal_zeros(2, 2)
    assert z == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)], abs=1e-12)


def test_bifurcation_points():
    assert sphbif.bifurcation_points(2, 3.0, 3) == pytest.approx([1.0, 3.0, 6.0])
    assert sphbif.critical_exponent(3) == 5.0


def test_two_classes_at_lambda_4():
    for k in (1, 2):
        sol = sphbif.solve_class(2, 3.0, k, 4.0)
        assert sol["nodal_class"] == k
        assert sol["residual_norm"] < 1e-10
        assert sol["validation"]["v_max"] >= 2.0
        assert len(sol["profile"]["t"]) == len(sol["profile"]["w"])


def test_uniqueness_probe():
    rep = sphbif.uniqueness_probe(2, 3.0, 0.9, seed=3)
    assert rep["to_zero"] == rep["starts"] == 50


def test_shoot_homoclinic():
    a = 3 ** 0.25 / math.sqrt(2)
    tr = sphbif.shoot(3, a, 0.0, c=0.0, T=15.0)
    assert tr["status"] == "positive_on_interval"
    err = max(abs(w - 3 ** 0.25 / math.sqrt(2 * math.cosh(t))) for t, w in zip(tr["t"], tr["w"]))
    assert err < 1e-8
    with pytest.raises(ValueError):
        sphbif.shoot(3, 1.0, c=0.0, beta=1.0)


def test_shooting_condition():
    holds, value = sphbif.shooting_condition(0.8, 0.0, 4, 1.5)
    assert holds
    assert value == pytest.approx(-0.1152, abs=1e-12)


def test_sweep_and_periodic():
    sw = sphbif.nonexistence_sweep(3, c=0.25, grid=5, T=1e4)
    assert all(p["crossed_forward"] and p["crossed_backward"] for p in sw["outcomes"])
    assert len(sw["outcomes"]) == 25 and sw["all_cross_both"]
    ps = sphbif.periodic_sweep(3, 0.1)
    assert ps["sup_w"] == pytest.approx(0.45 ** 0.25, abs=1e-6)


def test_kelvin():
    assert sphbif.kelvin_value(lambda t: 2.0, "north", math.pi / 2, 3, 0.3) == pytest.approx(2.0)
    u = lambda r: (1 + r * r) ** -0.5
    assert sphbif.kelvin_rn(u, [2, 0, 0], 1.0, [3, 0, 0]) == pytest.approx(u(3.0), rel=1e-12)


def test_moving_sphere_and_condition_a():
    bubble = lambda r: 3 ** 0.25 / math.sqrt(1 + r * r)
    rep = sphbif.moving_sphere_check_rn(bubble, 3, budget=2000, seed=1)
    assert rep["pass"] and rep["samples_tested"] == 2000
    ca = sphbif.condition_A_check(1.0, 3, budget=5000)
    assert ca["pass"] and ca["max_factorization_error"] < 1e-12


def test_g_conditions():
    r = sphbif.g_condition_check("matukuma", 3, 2.0, ["g2"])
    assert r["results"][0]["holds"]
    with pytest.raises(ValueError):
        sphbif.g_condition_check("other", 3, 2.0, ["g2"])


def test_veron():
    s = sphbif.veron(4, -1.0)
    assert s["lambda"] == pytest.approx(2.0)
    assert len(s["classes"]) >= 1


def test_cli_in_process(tmp_path):
    out = tmp_path / "eig"
    code, stdout, _ = sphbif.run_cli(["eig", "--N", "2", "--K", "8", "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "eig"
    assert sorted(manifest["outputs"]) == ["eigenvalues.csv", "summary.json", "zeros.csv"]
    code, _, err = sphbif.run_cli(["verify", "--suite", "nope"])
    assert code == 2 and "nope" in err


def test_verify_suite():
    rep = sphbif.verify("g-conditions")
    assert rep["pass"]
