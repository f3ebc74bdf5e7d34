import math
from fractions import Fraction

import numpy as np
import pytest

from hopflike.hlb import (
    ClassificationError,
    classify,
    coordinate_exponents,
    four_quadrant_lambda,
    hopf_coeffs,
    normal_form_hysteretic_two_fold,
    normal_form_two_fold,
    predicted_period,
    predicted_radius,
    scaling_row,
    scan_for_onset,
)
from hopflike.model import Criticality, HLBKind, HLBReport
from hopflike.pwsmodel import PWSystem, Smooth
from hopflike.returnmaps import aux_shat
from hopflike.zoo import ZOO, zoo_build

from .conftest import piece, reversed_system

PUBLISHED = [(name, value) for name, entry in ZOO.items() for value in entry.published]


@pytest.mark.parametrize(
    "name, value", PUBLISHED, ids=[f"{name}-{value.kind}" for name, value in PUBLISHED]
)
def test_published_values(name, value, published_tolerances):
    tol = published_tolerances.get(name, published_tolerances["default"])
    sys = zoo_build(name, value.params)

    report = classify(sys)

    assert report.kind == value.kind
    for coefficient in ("alpha", "beta", "gamma"):
        expected = getattr(value, coefficient)
        if expected is not None:
            assert getattr(report, coefficient) == pytest.approx(expected, rel=tol["rel"], abs=1e-12)
    assert sys.param_value(report.mu0) == pytest.approx(value.bifurcation_value, abs=tol["bifurcation_abs"])
    assert all(item.satisfied for item in report.checklist if item.required)


def test_mckean_eigenvalues(mckean_values):
    sys = zoo_build("mckean", mckean_values["params"])
    values = [v for piece_ in sys.pieces() for v in piece_.taylor(0.0).eigen.values if v.imag > 0]
    for got, expected in zip(values, mckean_values["eigenvalues"]):
        assert got.real == pytest.approx(expected["real"], abs=1e-4)
        assert got.imag == pytest.approx(expected["imag"], abs=1e-4)

    report = classify(sys)
    assert report.alpha == pytest.approx(mckean_values["alpha"], abs=5e-4)
    assert report.criticality == mckean_values["criticality"]
    assert sys.param_value(report.mu0) == pytest.approx(mckean_values["raw_parameter"]["I"])


def test_vdp_report():
    report = classify(zoo_build("vdp"))
    assert report.criticality == Criticality.SUPERCRITICAL
    assert report.cycle_side == 1
    assert report.cycle_stable
    assert report.exponents == (0.5, 0.0)
    assert report.period_limit == pytest.approx(2 * math.pi)


def test_hopf_coeffs_need_jordan_form():
    table = piece("field", [(1.0, 0, 1), (0.3, 1, 0)], [(-1.0, 1, 0)]).taylor(0.0)
    with pytest.raises(ClassificationError):
        hopf_coeffs(table)


def test_unclassified_report_lists_witnesses():
    sys = PWSystem(name="shifted", mechanism=Smooth(field=piece("field", [(1.0, 0, 1)], [(-1.0, 1, 0), (1.0, 0, 0)])))
    report = classify(sys)
    assert report.kind == HLBKind.UNCLASSIFIED
    assert not report.classified
    origin = next(item for item in report.checklist if item.name == "equilibrium at the origin")
    assert not origin.satisfied
    assert origin.witness == pytest.approx(1.0)


def test_non_canonical_model_is_refused():
    with pytest.raises(ClassificationError):
        classify(zoo_build("wilson_cowan", {"form": "raw"}))


def test_scaling_rows():
    assert scaling_row(HLBKind.HLB17) == (Fraction(1, 3), Fraction(1, 3))
    assert scaling_row(HLBKind.HLB15) == (1, 1)
    assert coordinate_exponents(HLBKind.HLB17) == (Fraction(2, 3), Fraction(1, 3))
    assert coordinate_exponents(HLBKind.HLB1) == (1, 1)
    with pytest.raises(ClassificationError):
        scaling_row(HLBKind.UNCLASSIFIED)


@pytest.mark.parametrize(
    "name, params, mu, expected",
    [
        ("relay_observer", {}, 0.1, 0.4),
        ("relay_observer", {"mechanism": "delayed"}, 0.1, 0.4),
        ("forced_osc", {}, 0.01, 4 * (6 * 0.01) ** (1 / 3)),
        ("forced_osc", {"mechanism": "delayed"}, 0.01, 4 * math.sqrt(6) * math.sqrt(0.01)),
        ("lv_impulse", {}, None, 1.5 * math.pi),
        ("vdp", {}, None, 2 * math.pi),
    ],
)
def test_predicted_period(name, params, mu, expected):
    report = classify(zoo_build(name, params))
    assert predicted_period(report, mu=mu) == pytest.approx(expected, rel=1e-6)


def test_forced_oscillator_coefficients():
    report = classify(zoo_build("forced_osc"))
    assert report.extras["kappa"] == pytest.approx(2.0)
    assert report.alpha == pytest.approx(-1.0)


def test_predicted_period_errors():
    report = classify(zoo_build("relay_observer"))
    with pytest.raises(ClassificationError):
        predicted_period(report)
    with pytest.raises(ClassificationError):
        predicted_period(HLBReport(kind=HLBKind.UNCLASSIFIED))


def test_predicted_radius():
    report = classify(zoo_build("vdp"))
    assert predicted_radius(report, 0.03) == pytest.approx(0.2)
    assert predicted_radius(report, -0.03) is None
    assert predicted_radius(report, 0.0) is None


def test_normal_forms():
    assert normal_form_two_fold(1.0, 1.0, -1.0, 1.0) == pytest.approx(1 + 2 / 3 - 2 / 15)
    assert normal_form_two_fold(0.3, 0.0, 0.0, 1.0) == 0.3
    assert normal_form_hysteretic_two_fold(1.0, 0.25, -1.0, 2.0) == pytest.approx(math.sqrt(5 / 3))
    with pytest.raises(ClassificationError):
        normal_form_hysteretic_two_fold(1.0, -1.0, -1.0, 2.0)


def test_scan_for_onset():
    sys = zoo_build("vdp")
    assert scan_for_onset(sys, np.linspace(-0.13, 0.2, 6), "trace") == pytest.approx(0.0, abs=1e-12)
    assert scan_for_onset(sys, np.linspace(-0.13, 0.2, 6), lambda mu: mu - 0.05) == pytest.approx(0.05)
    assert scan_for_onset(sys, np.linspace(0.1, 0.2, 6), "trace") is None


def test_four_quadrant_lambda():
    sys = zoo_build("wilson_cowan")
    assert four_quadrant_lambda(sys) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ClassificationError):
        four_quadrant_lambda(zoo_build("vdp"))


def test_sqrt_report():
    report = classify(zoo_build("sqrt_example"))
    s_hat = aux_shat(0.5)
    landing = math.exp(0.5 * s_hat) * abs(math.sin(s_hat))
    assert report.kind == HLBKind.HLB20
    assert report.extras["landing"] == pytest.approx(landing)
    assert landing == pytest.approx(8.23, abs=0.01)
    assert report.radius_coefficient == pytest.approx(landing)
    assert report.period_parts == pytest.approx([s_hat, 2 * math.log(1 + landing / 2)])
    assert report.period_limit == pytest.approx(7.62, abs=0.01)


def test_slipping_foci_under_time_reversal():
    sys = zoo_build("slip_focus_focus")
    forward = classify(sys)
    backward = classify(reversed_system(sys))

    assert backward.kind == HLBKind.HLB5
    assert backward.alpha == pytest.approx(-forward.alpha, rel=1e-9)
    assert backward.beta == pytest.approx(forward.beta, rel=1e-9)
    assert backward.cycle_side == forward.cycle_side
    assert backward.cycle_stable is not forward.cycle_stable
    assert backward.criticality == Criticality.SUBCRITICAL
