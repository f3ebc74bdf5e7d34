import json

import pytest

from hopflike.cli import ConfigError, build_parser, config_from_args, load_system, main
from hopflike.const import SCHEMA_ERROR, SCHEMA_REPORT
from hopflike.model import LemmaCheck, Policy


def _config(argv):
    return config_from_args(build_parser().parse_args(argv))


def test_zoo_listing(capsys):
    assert main(["zoo"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["schema"] == SCHEMA_REPORT
    assert len(document["entries"]) == 16
    assert document["entries"][0]["published"]


def test_classify_raw_parameter(capsys):
    assert main(["classify", "zoo:mckean", "--param", "I=0.375"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["kind"] == "HLB1"
    assert document["criticality"] == "subcritical"
    assert document["param_value"] == pytest.approx(0.375)
    assert document["mu0"] == pytest.approx(0.0, abs=1e-12)


def test_classify_model_document(capsys, tmp_path, vdp_document):
    path = tmp_path / "vdp.json"
    path.write_text(json.dumps(vdp_document))
    assert main(["classify", "--model", str(path)]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["kind"] == "Hopf"
    assert document["alpha"] == pytest.approx(-6.0)


def test_mechanism_option(capsys):
    assert main(["classify", "--zoo", "relay_observer", "--mechanism", "delayed"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "HLB16"


def test_simulate_empty_horizon(capsys):
    assert main(["simulate", "zoo:vdp", "--t-max", "0"]) == 0
    assert capsys.readouterr().out.strip() == "schema,t,x,y,segment_kind,event"


def test_simulate_writes_csv(tmp_path):
    path = tmp_path / "orbit.csv"
    assert main(["simulate", "zoo:vdp", "--mu", "0.1", "--state", "0.1,0", "--t-max", "1", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "schema,t,x,y,segment_kind,event"
    assert len(lines) > 2


def test_unknown_zoo_entry(capsys):
    assert main(["classify", "--zoo", "nope"]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["schema"] == SCHEMA_ERROR
    assert error["error"] == "ZooError"


def test_scaling_grid_must_be_positive(capsys):
    assert main(["scaling", "zoo:vdp", "--mu-grid=-1:1:5"]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigError"


@pytest.mark.parametrize(
    "argv",
    [
        ["classify"],
        ["classify", "zoo:vdp", "--zoo", "vdp"],
        ["diagram", "zoo:vdp", "--mu-grid", "0.1:0.1:5"],
        ["scan", "zoo:vdp", "--mu-grid", "0:1:1"],
    ],
)
def test_invalid_configurations(argv):
    with pytest.raises(ConfigError):
        _config(argv)


def test_params_need_a_zoo_entry(tmp_path, vdp_document):
    path = tmp_path / "vdp.json"
    path.write_text(json.dumps(vdp_document))
    with pytest.raises(ConfigError):
        load_system(_config(["classify", "--model", str(path), "--param", "k2=2"]))


def test_load_system_from_zoo():
    system = load_system(_config(["classify", "zoo:ocean", "--param", "lambda=1.2"]))
    assert system.mu == pytest.approx(0.2)
    system = load_system(_config(["classify", "zoo:vdp", "--param", "k2=2", "--mu", "0.3"]))
    assert system.mu == 0.3
    assert system.metadata["params"]["k2"] == 2.0


def test_scan(capsys):
    assert main(["scan", "zoo:vdp", "--mu-grid=-0.13:0.2:6", "--quantity", "trace"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["onset"] == pytest.approx(0.0, abs=1e-12)
    assert document["param_value"] == pytest.approx(0.0, abs=1e-12)


def test_scan_without_onset(capsys):
    assert main(["scan", "zoo:vdp", "--mu-grid", "0.1:0.2:3", "--quantity", "trace"]) == 1
    assert json.loads(capsys.readouterr().out)["onset"] is None


def test_diagram_wiring(mocker, capsys):
    sweep = mocker.patch("hopflike.cli.sweep_diagram", return_value=[])
    assert main(["diagram", "zoo:vdp", "--mu-grid=-0.1:0.1:3", "--workers", "2"]) == 0
    args, kwargs = sweep.call_args
    assert args[1] == pytest.approx([-0.1, 0.0, 0.1])
    assert kwargs["workers"] == 2
    assert kwargs["report"].kind == "Hopf"
    assert capsys.readouterr().out.strip() == "schema,mu,branch,value,stability"


def test_scaling_wiring(mocker, capsys, tmp_path):
    fit = mocker.patch("hopflike.cli.fit_scaling")
    mocker.patch("hopflike.cli.fit_summary", return_value={"schema": "s", "points": 8})
    frame = mocker.patch("hopflike.cli.scaling_frame")
    out = tmp_path / "scaling.csv"
    argv = ["scaling", "zoo:vdp", "--mu-grid", "0.001:0.1:8", "--workers", "1", "--out", str(out),
            "--tol", "1e-8", "--events-max", "50", "--policy-exit", "left"]
    assert main(argv) == 0
    args, kwargs = fit.call_args
    assert args[1:] == (0.001, 0.1, 8)
    assert kwargs["workers"] == 1
    policy = kwargs["policy"]
    assert isinstance(policy, Policy)
    assert (policy.rtol, policy.exit_side, policy.events_max) == (1e-8, "left", 50)
    assert policy.atol == pytest.approx(1e-10)
    frame.return_value.to_csv.assert_called_once()
    assert json.loads(capsys.readouterr().out)["points"] == 8


def test_verify_lemmas_single_check(capsys):
    assert main(["verify-lemmas", "--check", "focus_coefficient"]) == 0
    assert "focus_coefficient" in capsys.readouterr().out


def test_verify_lemmas_failure(mocker, tmp_path):
    mocker.patch(
        "hopflike.cli.run_checks",
        return_value=[
            LemmaCheck(name="focus_coefficient", passed=True, value=1 / 3, expected=1 / 3),
            LemmaCheck(name="fold_slope", passed=False, value=0.9, expected=1.0, tolerance=0.01),
        ],
    )
    out = tmp_path / "lemmas.csv"
    assert main(["verify-lemmas", "--out", str(out)]) == 1
    assert out.read_text().splitlines()[0].startswith("schema,name,passed")


def test_repeated_runs_are_identical(tmp_path, capsys):
    outputs = []
    for run in range(2):
        out = tmp_path / f"diagram{run}.csv"
        assert main(["diagram", "zoo:vdp", "--mu-grid=0.01:0.02:2", "--workers", "2", "--out", str(out)]) == 0
        assert main(["classify", "zoo:mckean"]) == 0
        outputs.append((out.read_bytes(), capsys.readouterr().out))
    assert outputs[0] == outputs[1]


def test_classify_sqrt_example(capsys):
    assert main(["classify", "--zoo", "sqrt_example"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "HLB20"


@pytest.mark.parametrize(
    "command, present, absent", [("scaling", "geometric", None), ("diagram", "linear", "geometric")]
)
def test_grid_help(capsys, command, present, absent):
    with pytest.raises(SystemExit):
        build_parser().parse_args([command, "--help"])
    text = capsys.readouterr().out
    assert present in text
    if absent is not None:
        assert absent not in text
