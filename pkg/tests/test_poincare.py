import math

import pytest

from hopflike.const import SCHEMA_DIAGRAM
from hopflike.hlb import classify, predicted_period, predicted_radius
from hopflike.integrator import ray_section
from hopflike.model import Criticality, DiagramPoint, HLBKind
from hopflike.poincare import (
    LimitCycleError,
    diagram_frame,
    diagram_point,
    find_limit_cycle,
    sweep_diagram,
    write_diagram_csv,
)
from hopflike.zoo import ZOO, zoo_build

from .conftest import reversed_system

STABILITY_CASES = [
    ("vdp", {}),
    ("slip_focus_focus", {}),
    ("pendulum", {}),
    ("fixed_two_fold", {}),
    ("impact_osc", {}),
    ("relay_observer", {}),
    ("forced_osc", {}),
    ("forced_osc", {"mechanism": "delayed"}),
]
STABILITY_IDS = [f"{name}-{params.get('mechanism', 'default')}" for name, params in STABILITY_CASES]


@pytest.fixture
def vdp():
    return zoo_build("vdp")


def test_vdp_cycle(vdp):
    cycle = find_limit_cycle(vdp, 0.01)
    assert cycle is not None
    assert cycle.r == pytest.approx(math.sqrt(4 * 0.01 / 3), rel=0.05)
    assert cycle.period == pytest.approx(2 * math.pi, rel=0.01)
    assert cycle.residual < 1e-8
    assert cycle.stable


def test_no_cycle_before_the_bifurcation(vdp):
    assert find_limit_cycle(vdp, -0.01) is None


def test_seeded_scan_finds_the_same_cycle(vdp):
    plain = find_limit_cycle(vdp, 0.01)
    seeded = find_limit_cycle(vdp, 0.01, seed=0.1)
    assert seeded.r == pytest.approx(plain.r, rel=1e-6)


def test_bad_bracket(vdp):
    with pytest.raises(LimitCycleError):
        find_limit_cycle(vdp, 0.01, bracket=(0.5, 0.1))


def test_diagram_point(vdp):
    point = diagram_point(vdp, 0.01, report=classify(vdp))
    assert point.error is None
    assert [eq.kind for eq in point.equilibria] == ["regular"]
    assert point.equilibria[0].stable is False
    assert point.cycle is not None


def test_sweep_is_independent_of_workers(vdp):
    grid = [-0.01, 0.01, 0.02]
    sequential = sweep_diagram(vdp, grid, workers=1)
    parallel = sweep_diagram(vdp, grid, workers=2)
    assert [p.mu for p in sequential] == grid
    assert [p.mu for p in parallel] == grid
    assert sequential[0].cycle is None
    assert parallel[0].cycle is None
    for one, two in zip(sequential[1:], parallel[1:]):
        assert one.cycle.r == pytest.approx(two.cycle.r, rel=1e-6)


def test_empty_sweep(vdp):
    assert sweep_diagram(vdp, []) == []


def test_diagram_frame(vdp, tmp_path):
    points = sweep_diagram(vdp, [-0.01, 0.01], workers=1)
    points.append(DiagramPoint(mu=0.5, error="no return"))
    frame = diagram_frame(points)

    assert list(frame.columns) == ["schema", "mu", "branch", "value", "stability"]
    assert (frame["schema"] == SCHEMA_DIAGRAM).all()
    before = frame[frame["mu"] == -0.01]
    assert before["branch"].tolist() == ["regular:0"]
    assert before["stability"].tolist() == ["stable"]
    after = frame[frame["mu"] == 0.01]
    assert set(after["branch"]) == {"regular:0", "cycle:x_min", "cycle:x_max", "cycle:y_min", "cycle:y_max"}
    assert frame[frame["branch"] == "error"]["stability"].tolist() == ["no return"]

    path = tmp_path / "diagram.csv"
    write_diagram_csv(points, path)
    assert path.read_text().splitlines()[0] == "schema,mu,branch,value,stability"


@pytest.mark.parametrize("offset", [1e-3, 1e-2])
@pytest.mark.parametrize("name, params", STABILITY_CASES, ids=STABILITY_IDS)
def test_cycle_stability_follows_alpha(name, params, offset):
    sys = zoo_build(name, params)
    report = classify(sys)
    mu = report.mu0 + report.cycle_side * offset

    cycle = find_limit_cycle(sys, mu, seed=predicted_radius(report, mu))

    assert cycle is not None
    assert cycle.stable == (report.alpha < 0)
    assert cycle.stable == report.cycle_stable


def _mckean_cycle(offset):
    sys = zoo_build("mckean")
    report = classify(sys)
    mu = report.mu0 + report.cycle_side * offset
    c = ZOO["mckean"].defaults["c"]
    # stable left focus: x = c y on -x - y + mu = 0
    focus = (c * mu / (1 + c), mu / (1 + c))
    assert focus[0] < 0
    return report, find_limit_cycle(sys, mu, bracket=(1e-5, 0.1), section=ray_section(focus, math.pi))


def test_mckean_cycle_is_unstable():
    report, cycle = _mckean_cycle(1e-3)
    assert report.criticality == Criticality.SUBCRITICAL
    assert cycle is not None
    assert cycle.multiplier > 1
    assert not cycle.stable


def test_mckean_cycle_scales_linearly():
    _, small = _mckean_cycle(1e-3)
    _, large = _mckean_cycle(2e-3)
    assert large.r == pytest.approx(2 * small.r, rel=1e-5)
    assert large.extremes.amplitude == pytest.approx(2 * small.extremes.amplitude, rel=1e-3)
    assert large.period == pytest.approx(small.period, rel=1e-5)


def test_slipping_foci_cycle_under_time_reversal():
    sys = zoo_build("slip_focus_focus")
    mu = 0.01
    forward = find_limit_cycle(sys, mu, bracket=(0.02, 0.1))
    backward = find_limit_cycle(reversed_system(sys), mu, bracket=(0.02, 0.1))

    # two half turns about foci on the manifold, lambda/omega = 0.1 and -0.5
    assert forward.multiplier == pytest.approx(math.exp(-0.4 * math.pi), rel=1e-4)
    assert forward.period == pytest.approx(2 * math.pi, rel=1e-6)
    assert backward.r == pytest.approx(forward.r, rel=1e-6)
    assert backward.multiplier == pytest.approx(1 / forward.multiplier, rel=1e-4)
    assert backward.period == pytest.approx(forward.period, rel=1e-6)


def test_impact_period_matches_prediction():
    sys = zoo_build("impact_osc")
    report = classify(sys)
    assert report.kind == HLBKind.HLB11
    mu = report.mu0 + report.cycle_side * 1e-2

    cycle = find_limit_cycle(sys, mu, seed=predicted_radius(report, mu))

    assert cycle is not None
    assert cycle.period == pytest.approx(predicted_period(report, sys), rel=2e-2)


def test_gause_period_matches_prediction():
    sys = zoo_build("gause")
    report = classify(sys)
    p = ZOO["gause"].defaults
    mu = report.mu0 + report.cycle_side * 1e-4
    ratio = p["delta"] / p["k"]
    b = sys.param_value(mu)
    prey = ratio / (b * (1 - p["h"] * ratio))
    predator = p["r"] * prey * (1 - prey / p["K"]) / ratio
    focus = (prey - p["Rc"], predator - sys.metadata["y_star"])
    assert focus[0] > 0

    # the positive y-axis is a sliding region here, so the section is a ray from the focus
    cycle = find_limit_cycle(sys, mu, bracket=(0.5 * focus[0], 50 * focus[0]), section=ray_section(focus, 0.0))

    assert cycle is not None
    assert cycle.stable
    assert cycle.period == pytest.approx(predicted_period(report, sys), rel=2e-2)


def test_sqrt_cycle_period():
    sys = zoo_build("sqrt_example")
    report = classify(sys)
    mu = report.mu0 + report.cycle_side * 1e-3

    cycle = find_limit_cycle(sys, mu, seed=predicted_radius(report, mu))

    assert cycle is not None
    assert cycle.stable
    assert cycle.r == pytest.approx(report.extras["landing"] * 1e-3, rel=5e-2)
    assert cycle.period == pytest.approx(report.period_limit, rel=2e-2)
