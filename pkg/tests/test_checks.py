import pytest

from cubeosc import SUITES, run_suite
from cubeosc.checks import (bobkov_suite, coarea_suite, density_suite,
                            dyadic_suite, gauss_suite, hadwiger_suite,
                            lemma43_suite, relative_iso_suite, scaling_suite)
from cubeosc.errors import InputError


def test_suite_registry_complete():
    assert set(SUITES) == {"gauss", "hadwiger", "relative-iso", "scaling",
                           "coarea", "lemma43", "dyadic", "density", "bobkov"}
    with pytest.raises(InputError):
        run_suite("nonesuch")


def test_gauss_suite():
    res = gauss_suite()
    assert res.ok, res.lines
    assert res.stats["iso_half"] == pytest.approx(0.3989422804, abs=1e-9)
    assert res.stats["k_min"] >= -1e-12


def test_hadwiger_suite_reduced():
    res = hadwiger_suite(seed=1, rect_count=500, poly_count=80)
    assert res.ok, res.lines
    assert res.stats["min_margin_rect"] >= -1e-12
    assert res.stats["min_margin_poly"] >= -1e-12


def test_relative_iso_suite_reduced():
    res = relative_iso_suite(seed=1, count=200)
    assert res.ok, res.lines
    assert res.stats["min_margin"] >= -1e-12


def test_scaling_suite_reduced():
    res = scaling_suite(seed=1, instances=6)
    assert res.ok, res.lines
    assert res.stats["max_residual"] <= 1e-12


def test_coarea_suite_reduced():
    res = coarea_suite(seed=1, instances=3)
    assert res.ok, res.lines
    assert res.stats["min_tv_margin"] >= -1e-12


def test_lemma43_suite_reduced():
    res = lemma43_suite(seed=1, instances=6)
    assert res.ok, res.lines
    assert res.stats["min_axis_margin"] >= -1e-12


def test_dyadic_suite_reduced():
    res = dyadic_suite(seed=1, instances=2)
    assert res.ok, res.lines
    assert res.stats["min_score"] >= 0.25


def test_density_suite():
    res = density_suite()
    assert res.ok, res.lines


def test_bobkov_suite():
    res = bobkov_suite()
    assert res.ok, res.lines


def test_every_line_carries_verdict():
    res = dyadic_suite(seed=2, instances=1)
    assert res.lines
    for line in res.lines:
        assert line.startswith("[ok]") or line.startswith("[FAIL]")
