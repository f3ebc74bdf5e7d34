"""Command-line front end.

Series go out as CSV and reports as JSON, both tagged with a schema version.
Library errors end the process with exit code 1 and an error document on stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .const import (
    DEFAULT_EVENTS_MAX,
    DEFAULT_RTOL,
    DEFAULT_WORKERS,
    SCHEMA_DIAGRAM,
    SCHEMA_ERROR,
    SCHEMA_REPORT,
)
from .geometry import GeometryError
from .hlb import ClassificationError, classify, scan_for_onset
from .integrator import IntegrationError, NoReturnError, simulate, trajectory_frame
from .lemmas import CHECKS, checks_frame, run_checks
from .model import Policy
from .poincare import LimitCycleError, diagram_frame, sweep_diagram
from .pwsmodel import ModelError, PWSystem, load_model
from .returnmaps import ReturnMapError
from .roots import NewtonError
from .scaling import ScalingError, fit_scaling, fit_summary, scaling_frame
from .zoo import ZOO, ZooError, zoo_build, zoo_list

_LOGGER = logging.getLogger(__name__)

Command = Literal["simulate", "classify", "diagram", "scaling", "verify-lemmas", "scan", "zoo"]

_NEEDS_MODEL = ("simulate", "classify", "diagram", "scaling", "scan")
_LIBRARY_ERRORS = (
    ModelError,
    GeometryError,
    ReturnMapError,
    IntegrationError,
    NoReturnError,
    LimitCycleError,
    ClassificationError,
    NewtonError,
    ScalingError,
    ZooError,
)


class ConfigError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


class RunConfig(BaseModel):
    command: Command
    model: Path | None = None
    zoo: str | None = None
    params: dict[str, float | str] = Field(default_factory=dict)
    mu: float | None = None
    mu_grid: tuple[float, float, int] | None = None
    tol: float = Field(default=DEFAULT_RTOL, gt=0)
    out: Path | None = None
    policy_exit: Literal["left", "right"] = "right"
    events_max: int = Field(default=DEFAULT_EVENTS_MAX, gt=0)
    workers: int = Field(default=DEFAULT_WORKERS, gt=0)
    state: tuple[float, float] = (0.1, 0.0)
    t_max: float = Field(default=50.0, ge=0)
    quantity: Literal["trace", "equilibrium", "four_quadrant"] = "equilibrium"
    checks: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.command in _NEEDS_MODEL and (self.model is None) == (self.zoo is None):
            raise ValueError(f"'{self.command}' needs exactly one of --model or --zoo")
        if self.command in ("diagram", "scaling", "scan") and self.mu_grid is None:
            raise ValueError(f"'{self.command}' needs --mu-grid lo:hi:n")
        if self.mu_grid is not None:
            lo, hi, n = self.mu_grid
            if n < 2 or not lo < hi:
                raise ValueError(f"--mu-grid needs lo < hi and n >= 2, got {lo}:{hi}:{n}")
            if self.command == "scaling" and lo <= 0:
                raise ValueError("scaling grids are geometric in |mu - mu0|; lo must be positive")
        unknown = [name for name in self.checks if name not in CHECKS]
        if unknown:
            raise ValueError(f"Unknown checks {unknown}, expected some of {list(CHECKS)}")
        return self

    @property
    def policy(self) -> Policy:
        return Policy(rtol=self.tol, atol=self.tol * 1e-2, exit_side=self.policy_exit, events_max=self.events_max)

    def linear_grid(self) -> list[float]:
        assert self.mu_grid is not None
        lo, hi, n = self.mu_grid
        return [float(v) for v in np.linspace(lo, hi, n)]


def _param(text: str) -> tuple[str, float | str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected k=v, got '{text}'")
    try:
        return key.strip(), float(value)
    except ValueError:
        return key.strip(), value.strip()


def _grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got '{text}'")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got '{text}'") from None


def _state(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got '{text}'") from None
    return x, y


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopflike", description="Hopf-like bifurcations of planar piecewise-smooth ODEs."
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    def model_options(sub: argparse.ArgumentParser) -> None:
        source = sub.add_mutually_exclusive_group()
        source.add_argument("--model", type=Path, help="model document (JSON)")
        source.add_argument("--zoo", help="zoo entry name")
        sub.add_argument("source", nargs="?", help="zoo:NAME or a model document path")
        sub.add_argument("--param", type=_param, action="append", default=[], metavar="K=V",
                         help="zoo parameter override; the entry's raw parameter sets mu")
        sub.add_argument("--mechanism", choices=["hysteretic", "delayed"], help="switching rule for zoo entries")
        sub.add_argument("--mu", type=float)
        sub.add_argument("--tol", type=float, default=DEFAULT_RTOL)
        sub.add_argument("--out", type=Path)
        sub.add_argument("--policy-exit", choices=["left", "right"], default="right")
        sub.add_argument("--events-max", type=int, default=DEFAULT_EVENTS_MAX)

    sim = commands.add_parser("simulate", help="integrate one orbit and write a trajectory CSV")
    model_options(sim)
    sim.add_argument("--state", type=_state, default=(0.1, 0.0), metavar="X,Y")
    sim.add_argument("--t-max", type=float, default=50.0)

    model_options(commands.add_parser("classify", help="identify the bifurcation and print its report"))

    linear_help = "linear grid of mu values from LO to HI (may straddle mu0)"
    for name, text, grid_help in (
        ("diagram", "equilibria and cycles over a linear mu grid", linear_help),
        ("scaling", "fit amplitude and period exponents over |mu - mu0|",
         "geometric grid of offsets |mu - mu0| from LO to HI, both positive"),
    ):
        sub = commands.add_parser(name, help=text)
        model_options(sub)
        sub.add_argument("--mu-grid", type=_grid, required=True, metavar="LO:HI:N", help=grid_help)
        sub.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    scan = commands.add_parser("scan", help="locate a sign change of a stability quantity")
    model_options(scan)
    scan.add_argument("--mu-grid", type=_grid, required=True, metavar="LO:HI:N", help=linear_help)
    scan.add_argument("--quantity", choices=["trace", "equilibrium", "four_quadrant"], default="equilibrium")

    lemmas = commands.add_parser("verify-lemmas", help="check analytic return maps against simulation")
    lemmas.add_argument("--check", dest="checks", action="append", default=[], choices=list(CHECKS))
    lemmas.add_argument("--tol", type=float, default=1e-12)
    lemmas.add_argument("--out", type=Path)

    commands.add_parser("zoo", help="list the worked examples")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {"command": args.command}
    for name in ("model", "zoo", "mu", "mu_grid", "tol", "out", "policy_exit", "events_max", "workers",
                 "state", "t_max", "quantity", "checks"):
        value = getattr(args, name, None)
        if value is not None:
            values[name] = value
    params = dict(getattr(args, "param", None) or [])
    if getattr(args, "mechanism", None):
        params["mechanism"] = args.mechanism
    values["params"] = params

    source = getattr(args, "source", None)
    if source:
        if "model" in values or "zoo" in values:
            raise ConfigError("Give the model either positionally or with --model/--zoo, not both")
        if source.startswith("zoo:"):
            values["zoo"] = source[len("zoo:"):]
        else:
            values["model"] = Path(source)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def load_system(cfg: RunConfig) -> PWSystem:
    """The configured system; a zoo entry's raw parameter given as k=v is converted to mu."""
    if cfg.model is not None:
        if cfg.params:
            raise ConfigError("--param and --mechanism only apply to zoo entries")
        system = load_model(cfg.model.read_text())
    else:
        assert cfg.zoo is not None
        params = dict(cfg.params)
        raw = None
        if cfg.zoo in ZOO:
            default_sys = ZOO[cfg.zoo].builder(dict(ZOO[cfg.zoo].defaults))
            mapping = default_sys.metadata.get("mu_to_param")
            if mapping and mapping["param"] in params and mapping["param"] not in ZOO[cfg.zoo].defaults:
                raw = (mapping["param"], float(params.pop(mapping["param"])))
        system = zoo_build(cfg.zoo, params)
        if raw is not None:
            mapping = system.metadata["mu_to_param"]
            system = system.with_mu((raw[1] - mapping["offset"]) / mapping.get("scale", 1.0))
    return system.with_mu(cfg.mu) if cfg.mu is not None else system


def _write(text: str, path: Path | None = None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _json(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def cmd_simulate(cfg: RunConfig) -> int:
    system = load_system(cfg)
    trajectory = simulate(system, cfg.state, cfg.t_max, cfg.policy)
    _write(trajectory_frame(trajectory).to_csv(index=False, float_format="%.12g"), cfg.out)
    return 0


def cmd_classify(cfg: RunConfig) -> int:
    system = load_system(cfg)
    report = classify(system, system.mu)
    document = {
        "schema": SCHEMA_REPORT,
        "model": system.name,
        "param_value": system.param_value(),
        **report.model_dump(mode="json"),
    }
    _write(_json(document), cfg.out)
    return 0


def cmd_diagram(cfg: RunConfig) -> int:
    system = load_system(cfg)
    try:
        report = classify(system, system.mu)
    except ClassificationError:
        report = None
    points = sweep_diagram(system, cfg.linear_grid(), workers=cfg.workers, report=report, policy=cfg.policy)
    _write(diagram_frame(points).to_csv(index=False, float_format="%.12g"), cfg.out)
    return 0


def cmd_scaling(cfg: RunConfig) -> int:
    system = load_system(cfg)
    assert cfg.mu_grid is not None
    lo, hi, n = cfg.mu_grid
    fit = fit_scaling(system, lo, hi, n, workers=cfg.workers, policy=cfg.policy)
    if cfg.out is not None:
        scaling_frame(fit).to_csv(cfg.out, index=False, float_format="%.12g")
    _write(_json(fit_summary(fit)))
    return 0


def cmd_scan(cfg: RunConfig) -> int:
    system = load_system(cfg)
    onset = scan_for_onset(system, cfg.linear_grid(), cfg.quantity)
    document = {
        "schema": SCHEMA_DIAGRAM,
        "model": system.name,
        "quantity": cfg.quantity,
        "onset": onset,
        "param_value": system.param_value(onset) if onset is not None else None,
    }
    _write(_json(document), cfg.out)
    return 0 if onset is not None else 1


def cmd_verify_lemmas(cfg: RunConfig) -> int:
    checks = run_checks(cfg.checks or None, Policy(rtol=cfg.tol, atol=cfg.tol * 1e-3))
    frame = checks_frame(checks)
    if cfg.out is not None:
        frame.to_csv(cfg.out, index=False, float_format="%.12g")
    _write(frame.drop(columns="schema").to_string(index=False) + "\n")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        _LOGGER.warning("Failed checks: %s", ", ".join(failed))
        return 1
    return 0


def cmd_zoo(cfg: RunConfig) -> int:
    entries = [
        {"name": name, "description": ZOO[name].description, "defaults": ZOO[name].defaults,
         "published": [p.model_dump(mode="json") for p in ZOO[name].published]}
        for name in zoo_list()
    ]
    _write(_json({"schema": SCHEMA_REPORT, "entries": entries}))
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "diagram": cmd_diagram,
    "scaling": cmd_scaling,
    "scan": cmd_scan,
    "verify-lemmas": cmd_verify_lemmas,
    "zoo": cmd_zoo,
}


def _error(err: Exception) -> int:
    sys.stderr.write(json.dumps({"schema": SCHEMA_ERROR, "error": type(err).__name__, "message": str(err)}) + "\n")
    return 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except (ConfigError, OSError, *_LIBRARY_ERRORS) as err:
        return _error(err)


if __name__ == "__main__":
    sys.exit(main())
