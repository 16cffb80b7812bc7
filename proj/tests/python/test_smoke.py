"""Smoke tests for the python bindings (build-tree module on PYTHONPATH)."""

import math
import os
import subprocess

import pytest

import _plmod as plmod


def test_poly_eval_and_iterate():
    p = plmod.Poly([complex(-1.0), 0j, complex(1.0)])
    assert p.degree == 2
    assert p(2.0 + 0j) == 3.0 + 0j
    q = p.iterate(2)
    assert q.degree == 4
    # (z^2-1)^2 - 1 = z^4 - 2z^2
    assert q.coeffs[2] == -2.0 + 0j


def test_green_and_boettcher():
    z2 = plmod.Poly([0j, 0j, 1.0 + 0j])
    assert plmod.green_potential(z2, 2.0 + 0j) == pytest.approx(math.log(2.0), abs=1e-10)
    assert plmod.boettcher(z2, 3.0 + 1.0j) == pytest.approx(3.0 + 1.0j)


def test_angles():
    a = plmod.Angle.parse("1/3")
    assert str(plmod.angle_mulD(a, 2)) == "2/3"
    assert plmod.orbit_period(a, 2) == (0, 2)
    pre, per = plmod.orbit_period(plmod.Angle(1, 12), 2)
    assert (pre, per) == (2, 2)
    d1, d2 = plmod.wake_to_dynamic_angles(plmod.Angle(0, 1), plmod.Angle(0, 1))
    assert str(d1) == "1/3" and str(d2) == "2/3"
    with pytest.raises(ValueError):
        plmod.Angle.parse("3/")


def test_basilica_landing():
    basilica = plmod.Poly([complex(-1.0), 0j, complex(1.0)])
    res = plmod.common_landing(basilica, plmod.Angle(1, 3), plmod.Angle(2, 3))
    assert res["status"] == "ok"
    alpha = (1.0 - math.sqrt(5.0)) / 2.0
    assert res["vertex"] == pytest.approx(complex(alpha, 0.0), abs=1e-6)
    assert abs(res["vertex_multiplier"]) > 1.0


def test_round_annulus_modulus():
    est = plmod.round_annulus_modulus(1.0, math.e, 128)
    expect = 1.0 / (2.0 * math.pi)
    assert est["lower"] <= expect <= est["upper"]
    assert est["upper"] - est["lower"] < 0.01 * expect


def test_rectangle_and_harmonic():
    est = plmod.rectangle_extremal_length(2.0, 1.0, 128)
    assert est["lower"] <= 2.0 <= est["upper"] * 1.01
    assert plmod.harmonic_sum_bound(1.0, [2.0, 2.0])
    assert plmod.period_bound(3, 0.1) == 3


def test_cubic_tests():
    params = plmod.CubicParams(0.5 + 0j, 0j)
    assert plmod.connectedness_test(params)
    assert plmod.principal_hyperbolic_test(params)
    far = plmod.CubicParams(0j, 10.0 + 0j)
    assert not plmod.connectedness_test(far)
    om2 = plmod.cubic_criticals(params)[0]
    cc = plmod.cocritical_point(params, om2)
    f = plmod.cubic_poly(params)
    assert f(cc) == pytest.approx(f(om2), abs=1e-10)


def test_cli_round_trip(tmp_path):
    cli = os.environ.get("PLMOD_CLI")
    if not cli:
        pytest.skip("PLMOD_CLI not set")
    out = tmp_path / "mod"
    subprocess.run(
        [cli, "modulus", "--annulus", "round", "--r1", "1", "--r2", "2.718281828459045",
         "--out", str(out)],
        check=True,
    )
    import json

    data = json.loads((out / "modulus.json").read_text())
    assert data["lower"] <= 1.0 / (2.0 * math.pi) <= data["upper"]
