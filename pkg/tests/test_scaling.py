import math

import numpy as np
import pytest

from hopflike.const import SCHEMA_SCALING
from hopflike.model import DiagramPoint, Extremes, FixedPoint, HLBKind, HLBReport, Policy
from hopflike.scaling import (
    ScalingError,
    _usable,
    fit_scaling,
    fit_summary,
    log_fit,
    scaling_frame,
    scaling_grid,
)
from hopflike.zoo import zoo_build


def _cycle(r: float) -> FixedPoint:
    return FixedPoint(r=r, residual=0.0, multiplier=0.5, period=6.0,
                      extremes=Extremes(x_min=-r, x_max=r, y_min=-r, y_max=r))


def test_log_fit():
    x = np.geomspace(1e-3, 1e-1, 9)
    slope, intercept, r2 = log_fit(x, 2 * x**0.5)
    assert slope == pytest.approx(0.5)
    assert intercept == pytest.approx(math.log(2))
    assert r2 == pytest.approx(1.0)


def test_log_fit_needs_two_points():
    with pytest.raises(ScalingError):
        log_fit([0.1], [0.2])


def test_scaling_grid():
    report = HLBReport(kind=HLBKind.HLB1, mu0=0.2, cycle_side=-1)
    grid = scaling_grid(report, 1e-3, 1e-1, 3)
    assert grid == pytest.approx([0.199, 0.19, 0.1])


@pytest.mark.parametrize(
    "report, bounds",
    [
        (HLBReport(kind=HLBKind.HLB1, cycle_side=1), (0.0, 0.1)),
        (HLBReport(kind=HLBKind.HLB1, cycle_side=1), (0.1, 0.01)),
        (HLBReport(kind=HLBKind.HLB1, cycle_side=0), (0.01, 0.1)),
    ],
)
def test_scaling_grid_errors(report, bounds):
    with pytest.raises(ScalingError):
        scaling_grid(report, *bounds, 5)


def test_points_without_cycles_are_dropped():
    points = [DiagramPoint(mu=0.1, cycle=_cycle(0.1)), DiagramPoint(mu=0.2, error="boom"),
              DiagramPoint(mu=0.3, cycle=_cycle(0.3))]
    assert [p.mu for p in _usable(points)] == [0.1, 0.3]
    with pytest.raises(ScalingError):
        _usable(points[1:])


def test_unclassified_model_is_refused():
    sys = zoo_build("vdp")
    with pytest.raises(ScalingError):
        fit_scaling(sys, 1e-3, 1e-1, report=HLBReport(kind=HLBKind.UNCLASSIFIED))


def test_vdp_scaling():
    fit = fit_scaling(zoo_build("vdp"), 1e-3, 1e-1, 8, workers=2)

    assert fit.kind == HLBKind.HOPF
    assert fit.expected == (0.5, 0.0)
    assert len(fit.mu) == 8
    assert fit.exponent_amplitude == pytest.approx(0.5, abs=0.05)
    assert fit.exponent_period == pytest.approx(0.0, abs=0.05)
    assert fit.r2_amplitude > 0.99
    assert fit.period_limit == pytest.approx(2 * math.pi)
    assert fit.limit_error < 0.01
    assert fit.correction_exponent is not None

    frame = scaling_frame(fit)
    assert list(frame.columns) == ["schema", "mu", "amplitude", "amplitude_x", "amplitude_y", "x_max", "period"]
    assert (frame["schema"] == SCHEMA_SCALING).all()

    summary = fit_summary(fit)
    assert summary["points"] == 8
    assert summary["schema"] == SCHEMA_SCALING
    assert "amplitude" not in summary


@pytest.mark.parametrize(
    "name, params, bounds",
    [
        ("relay_observer", {}, (1e-4, 1e-2)),
        ("forced_osc", {}, (1e-6, 1e-4)),
        ("forced_osc", {"mechanism": "delayed"}, (1e-5, 1e-3)),
        ("fixed_two_fold", {}, (1e-5, 1e-3)),
        ("pendulum", {}, (1e-5, 1e-3)),
    ],
    ids=["HLB15", "HLB17", "HLB18", "HLB10", "HLB7"],
)
def test_scaling_matrix(name, params, bounds):
    fit = fit_scaling(zoo_build(name, params), *bounds, 8, workers=1)

    assert len(fit.mu) == 8
    assert fit.exponent_amplitude == pytest.approx(fit.expected[0], abs=0.05)
    assert fit.exponent_period == pytest.approx(fit.expected[1], abs=0.05)


def test_fit_forwards_policy(mocker):
    report = HLBReport(kind=HLBKind.HLB15, mu0=0.0, cycle_side=1)
    grid = scaling_grid(report, 1e-3, 1e-1, 3)
    sweep = mocker.patch(
        "hopflike.scaling.sweep_diagram",
        return_value=[DiagramPoint(mu=mu, cycle=_cycle(2 * mu)) for mu in grid],
    )
    policy = Policy(rtol=1e-8, exit_side="left")

    fit = fit_scaling(zoo_build("relay_observer"), 1e-3, 1e-1, 3, report=report, workers=1, policy=policy)

    args, kwargs = sweep.call_args
    assert args[1] == pytest.approx(grid)
    assert kwargs["policy"] is policy
    assert kwargs["report"] is report
    assert fit.exponent_amplitude == pytest.approx(1.0)
    assert fit.expected == (1.0, 1.0)
