"""Closed-form ledger values against independently frozen numbers."""

import math

import numpy as np
import pytest

from plateau_lab import ledger


def test_sigma_hat_area_frozen():
    e = ledger.sigma_hat_area(10.0)
    # 2*(10 + sqrt(101)), evaluated once by hand and frozen
    assert abs(e.value - 40.09975124224178) < 1e-12
    assert e.name == "sigma_hat_area"
    assert e.inputs == {"C": 10.0}


def test_ehat_area_frozen_and_relation():
    e = ledger.ehat_area(0.05, 10.0)
    assert abs(e.value - 6.004987562112089) < 1e-12
    # ehat = 4 + eps * sigma_hat, algebraically
    for eps in (0.2, 0.1, 0.05, 0.013):
        lhs = ledger.ehat_area(eps, 10.0).value
        rhs = 4.0 + eps * ledger.sigma_hat_area(10.0).value
        assert abs(lhs - rhs) < 1e-12


def test_eps_threshold_crossover():
    thr = ledger.eps_threshold(10.0)
    assert abs(thr - 0.9002487577582194) < 1e-12
    # at the threshold the two ledger areas coincide
    diff = ledger.ehat_area(thr, 10.0).value - ledger.sigma_hat_area(10.0).value
    assert abs(diff) < 1e-12
    assert ledger.ehat_area(0.9 * thr, 10.0).value < ledger.sigma_hat_area(10.0).value
    assert ledger.ehat_area(1.1 * thr, 10.0).value > ledger.sigma_hat_area(10.0).value


def test_ledger_input_validation():
    with pytest.raises(ValueError):
        ledger.sigma_hat_area(0.0)
    with pytest.raises(ValueError):
        ledger.ehat_area(-0.1, 10.0)
    with pytest.raises(ValueError):
        ledger.sigma_c_area(0.5)
    with pytest.raises(ValueError):
        ledger.sigma_c_area(0.0)


def test_sigma_c_area_values():
    assert abs(ledger.sigma_c_area(0.25).value - 0.75) < 1e-15
    d = (2.0 - math.sqrt(2.0)) / 4.0
    # the crossover delta: slice area = disk area = 1/2 (one ulp of slack
    # for the float evaluation of the irrational delta)
    assert abs(ledger.sigma_c_area(d).value - 0.5) < 1e-15


def test_solve_c0_frozen_paper_variant():
    c0 = ledger.solve_c0(0.15, 0.012, math.atan(1.0 / 7.0), variant="Paper")
    assert abs(c0 - 0.005010152544552217) < 1e-15


def test_solve_c0_balances_the_areas():
    rng = np.random.default_rng(7)
    found = 0
    while found < 100:
        delta = rng.uniform(0.05, 0.45)
        h = rng.uniform(1e-4, 0.05)
        theta0 = rng.uniform(0.02, 0.6)
        variant = "Paper" if found % 2 else "Exact"
        try:
            c0 = ledger.solve_c0(delta, h, theta0, variant=variant)
        except ValueError:
            continue
        found += 1
        cap = ledger.disk_Dc_area(delta, h, theta0, c0, variant=variant)
        slab = ledger.sigma_c_area(delta)
        assert abs(cap.value - slab.value) <= 1e-12


def test_solve_c0_domain_errors():
    # x = 0.7 makes 1 - 2x^2 = 0.02 > 0, so a tiny slant blows c0 past 2h/3
    with pytest.raises(ValueError):
        ledger.solve_c0(0.15, 1e-6, math.atan(1.0 / 7.0), variant="Paper")
    with pytest.raises(ValueError):
        ledger.solve_c0(0.15, 0.012, math.atan(1.0 / 7.0), variant="bogus")


def test_disk_Dc_area_variants_and_range():
    th = math.atan(1.0 / 7.0)
    base = ledger.disk_Dc_area(0.15, 0.012, th, 0.004, variant="Paper")
    exact = ledger.disk_Dc_area(0.15, 0.012, th, 0.004, variant="Exact")
    x = 0.7
    rise = 0.004 - 0.012 / 3.0
    assert abs(base.value - (x * x + 4 * x * rise / math.sin(th))) < 1e-15
    assert abs(exact.value
               - (x * x + 2 * x * rise / math.sin(th) + 2 * x * rise)) < 1e-15
    with pytest.raises(ValueError):
        ledger.disk_Dc_area(0.15, 0.012, th, 0.012, variant="Paper")  # c > 2h/3


def test_surgery_gain_frozen_and_errors():
    c0 = ledger.solve_c0(0.15, 0.0058, math.atan(1.0 / 15.0), variant="Exact")
    assert abs(c0 - 0.002824336277991936) < 1e-15
    g = ledger.surgery_gain(0.006, 0.0058, c0)
    assert abs(g.value - 4.112984203181159e-05) < 1e-18
    assert g.value > 0
    with pytest.raises(ValueError):
        ledger.surgery_gain(0.004, 0.0058, c0)  # needs h < eps
    with pytest.raises(ValueError):
        ledger.surgery_gain(0.006, 0.0058, 2.0)  # tube length <= 0


def test_iiib_threshold_regimes():
    assert ledger.iiib_threshold_check(0.1)["winner"] == "slice"
    assert ledger.iiib_threshold_check(0.2)["winner"] == "disk"
    r = ledger.iiib_threshold_check(0.3)
    assert r["disk_area"] == pytest.approx((1 - 0.6) ** 2, abs=1e-15)
    assert r["slice_area"] == pytest.approx(1 - (1 - 0.6) ** 2, abs=1e-15)


def test_catenoid_fit_frozen_pair():
    r_top = math.sqrt(24.0) / 5.0
    r_mid = math.sqrt(99.0) / 10.0
    fit = ledger.catenoid_fit(r_top, 0.2, r_mid, -0.1)
    assert abs(fit.a - 0.9745717077591881) < 1e-12
    assert abs(fit.b - 0.09913568580430211) < 1e-12
    assert fit.residual <= 1e-13
    # boundary radii are reproduced by construction
    assert abs(fit.radius_at(0.2) - r_top) < 1e-12
    assert abs(fit.radius_at(-0.1) - r_mid) < 1e-12
    area = ledger.catenoid_area(fit)
    assert abs(area.value - 1.8563470404900995) < 1e-12
    assert area.value < math.pi * (24.0 / 25.0 + 99.0 / 100.0)
    rho0 = fit.a * math.cosh(fit.b / fit.a)
    assert abs(rho0 - 0.9796182125412957) < 1e-12


def test_catenoid_canonical_and_symmetry():
    # r = cosh(z) between z = -1 and 1: a = 1, b = 0, area = pi*(2 + sinh 2)
    fit = ledger.catenoid_fit(math.cosh(1.0), 1.0, math.cosh(1.0), -1.0)
    assert abs(fit.a - 1.0) < 1e-12
    assert abs(fit.b) < 1e-12
    assert abs(ledger.catenoid_area(fit).value
               - math.pi * (2.0 + math.sinh(2.0))) < 1e-12


def test_catenoid_mirrored_pair():
    r_top = math.sqrt(24.0) / 5.0
    r_mid = math.sqrt(99.0) / 10.0
    f1 = ledger.catenoid_fit(r_top, 0.2, r_mid, -0.1)
    f2 = ledger.catenoid_fit(r_mid, 0.1, r_top, -0.2)
    assert abs(f2.a - f1.a) < 1e-9
    assert abs(f2.b + f1.b) < 1e-9


def test_goldschmidt_regime_raises():
    with pytest.raises(ledger.NoCatenoid):
        ledger.catenoid_fit(0.1, 10.0, 0.1, -10.0)
    with pytest.raises(ValueError):
        ledger.catenoid_fit(1.0, 0.5, 1.0, 0.5)  # same height
    with pytest.raises(ValueError):
        ledger.catenoid_fit(-1.0, 0.5, 1.0, -0.5)


def test_ledger_entry_basics():
    e = ledger.sigma_c_area(0.1)
    d = e.to_dict()
    assert d["name"] == "sigma_c_area"
    assert d["inputs"]["delta"] == 0.1
    assert "1 - (1 - 2*delta)^2" in d["formula_source"]
    with pytest.raises(ValueError):
        ledger.LedgerEntry("bad", float("nan"), "f", {})
    with pytest.raises(ValueError):
        ledger.LedgerEntry("bad", 1.0, "", {})
