"""Event-driven simulation of every switching mechanism.

Each flow runs ``solve_ivp`` up to the next terminal event; the loop then
applies the mechanism's rule (switch, slide, reset, impulse, scheduled
switch) and restarts. A restart that begins on an event surface first takes
one tiny step along the new field so the same surface does not fire again.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp

from .const import (
    DEFAULT_EVENTS_MAX,
    DEFAULT_RTOL,
    DENSE_SAMPLES,
    EQ_TOL,
    EXIT_OFFSET,
    FOLD_TOL,
    RETURN_T_MAX,
    SCHEMA_TRAJECTORY,
    SQRT_HANDOFF,
    SQRT_S_MAX,
    STEP_OFF,
)
from .model import Event, EventType, Extremes, Policy, Segment, SegmentKind, Trajectory
from .pwsmodel import (
    Delayed,
    Filippov,
    FourQuadrant,
    Hysteretic,
    Impact,
    Impulse,
    PWSystem,
    SmoothPiece,
    Smooth,
    SqrtContinuous,
)
from .roots import brent_root, sign_changes

_LOGGER = logging.getLogger(__name__)

_ON_SURFACE = 1e-12
_QUADRANT_KINDS = (SegmentKind.FLOW_Q1, SegmentKind.FLOW_Q2, SegmentKind.FLOW_Q3, SegmentKind.FLOW_Q4)

Branch = Literal["L", "R"]
StopRule = Callable[[Event], bool]


class IntegrationError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


class NoReturnError(Exception):
    pass


class Section(BaseModel):
    """A curve func(x, y) = 0 crossed in ``direction``, with a start point and a coordinate per r."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: str = "section"
    func: Callable[[float, float], float]
    start: Callable[[float], tuple[float, float]]
    coordinate: Callable[[float, float], float]
    accept: Callable[[float, float], bool] | None = None
    direction: float = 0.0


def ray_section(origin: Sequence[float], angle: float, label: str = "ray") -> Section:
    """The half-line from ``origin`` at ``angle``; r is the distance from the origin."""
    x0, y0 = float(origin[0]), float(origin[1])
    c, s = math.cos(angle), math.sin(angle)
    return Section(
        label=label,
        func=lambda x, y: (y - y0) * c - (x - x0) * s,
        start=lambda r: (x0 + r * c, y0 + r * s),
        coordinate=lambda x, y: (x - x0) * c + (y - y0) * s,
        accept=lambda x, y: (x - x0) * c + (y - y0) * s > 0,
    )


class ReturnResult(BaseModel):
    P: float
    T: float
    extremes: Extremes
    tangential: bool = False
    trajectory: Trajectory = Field(default_factory=Trajectory, exclude=True)


def _event(func: Callable[[float, np.ndarray], float], direction: float = 0.0):
    def event(t: float, z: np.ndarray) -> float:
        return func(t, z)

    event.terminal = True  # type: ignore[attr-defined]
    event.direction = direction  # type: ignore[attr-defined]
    return event


def _plane(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return z[0], z[1]


def _slide_plane(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return 0.0 * z[0], z[0]


def _sqrt_plane(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return w[0] * w[0], w[1]


def _field(piece: SmoothPiece, mu: float):
    def rhs(t: float, z: np.ndarray) -> tuple[float, float]:
        return piece.eval(z[0], z[1], mu)

    return rhs


def wrap_angle(theta: float) -> float:
    """Representative of ``theta`` in (-3 pi / 2, pi / 2]."""
    return theta - 2 * math.pi * math.ceil((theta - math.pi / 2) / (2 * math.pi))


def flow_piece(piece: SmoothPiece, state: Sequence[float], dt: float, tol: float = DEFAULT_RTOL,
               mu: float = 0.0):
    """Dense-output integration of one smooth piece over [0, dt]."""
    if dt <= 0:
        raise IntegrationError(f"flow_piece needs dt > 0, got {dt}")
    sol = solve_ivp(_field(piece, mu), (0.0, dt), np.asarray(state, dtype=float), method="DOP853",
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if sol.status < 0:
        raise IntegrationError(f"Integration of {piece.label or 'piece'} failed: {sol.message}")
    return sol


class _Run:
    """Mutable state of one simulation: clock, trajectory and event bookkeeping."""

    def __init__(self, policy: Policy, t_max: float, stop_on: StopRule | None, section: Section | None):
        self.policy = policy
        self.t = 0.0
        self.t_max = t_max
        self.stop_on = stop_on
        self.section = section
        self.trajectory = Trajectory()
        self.done = False
        self.stop_event: Event | None = None
        self.n_events = 0
        self.n_resets = 0

    @property
    def finished(self) -> bool:
        return self.done or self.t >= self.t_max - 1e-12 * max(1.0, self.t_max)

    def record(self, kind: EventType, x: float, y: float, detail: str = "") -> bool:
        event = Event(time=self.t, type=kind, x=float(x), y=float(y), detail=detail)
        self.trajectory.events.append(event)
        if kind != EventType.IMPACT:
            self.n_events += 1
            if self.n_events > self.policy.events_max:
                raise IntegrationError(
                    f"Event budget of {self.policy.events_max} exceeded at t={self.t:.6g}"
                )
        if self.stop_on is not None and self.stop_on(event):
            self.stop_event = event
            self.done = True
        return self.done

    def halt(self, reason: str, kind: EventType | None = None, x: float = 0.0, y: float = 0.0) -> None:
        if kind is not None:
            self.record(kind, x, y, reason)
        _LOGGER.debug("Simulation halted at t=%.6g: %s", self.t, reason)
        self.trajectory.halted = reason
        self.done = True

    def jump(self, kind: SegmentKind, before: Sequence[float], after: Sequence[float]) -> None:
        self.trajectory.segments.append(
            Segment(kind=kind, t=[self.t, self.t], x=[float(before[0]), float(after[0])],
                    y=[float(before[1]), float(after[1])])
        )

    def _section_event(self, to_xy):
        section = self.section
        assert section is not None
        return _event(lambda t, z: section.func(*to_xy(z)), section.direction)

    def flow(self, rhs, z0: Sequence[float], kind: SegmentKind, events: list, *, to_xy=_plane,
             t_end: float | None = None, clocked: bool = False, method: str = "DOP853",
             s_max: float = SQRT_S_MAX) -> tuple[np.ndarray, list[int]]:
        """Integrate until a terminal event or the time limit; returns the state and fired indices.

        ``clocked`` flows carry time as their last state component and are parametrised
        by s over [0, s_max].
        """
        z = np.asarray(z0, dtype=float)
        events = list(events)
        section_index = None
        if self.section is not None:
            section_index = len(events)
            events.append(self._section_event(to_xy))
        if clocked:
            start, end = 0.0, s_max
        else:
            start = self.t
            end = self.t_max if t_end is None else min(t_end, self.t_max)

        if any(abs(event(start, z)) < _ON_SURFACE for event in events):
            z = z + STEP_OFF * np.asarray(rhs(start, z), dtype=float)
            start += STEP_OFF
            if not clocked:
                self.t = start
        if end <= start:
            return z, []

        sol = solve_ivp(rhs, (start, end), z, method=method, rtol=self.policy.rtol,
                        atol=self.policy.atol, max_step=self.policy.max_step, events=events,
                        dense_output=True)
        if sol.status < 0:
            raise IntegrationError(f"Integration failed at t={self.t:.6g}: {sol.message}")
        self._append(kind, sol, to_xy, clocked)
        final = sol.y[:, -1]
        self.t = float(final[-1]) if clocked else float(sol.t[-1])

        fired: list[int] = []
        if sol.status == 1:
            fired = [i for i, times in enumerate(sol.t_events) if times.size and times[-1] == sol.t[-1]]
        if section_index is not None and section_index in fired:
            fired.remove(section_index)
            x, y = to_xy(final)
            section = self.section
            assert section is not None
            if section.accept is None or section.accept(float(x), float(y)):
                self.record(EventType.SECTION, x, y, section.label)
                self.stop_event = self.trajectory.events[-1]
                self.done = True
        return final, fired

    def _append(self, kind: SegmentKind, sol, to_xy, clocked: bool) -> None:
        s0, s1 = sol.t[0], sol.t[-1]
        if s1 <= s0:
            return
        grid = np.union1d(sol.t, np.linspace(s0, s1, DENSE_SAMPLES))
        states = sol.sol(grid)
        xs, ys = to_xy(states)
        ts = states[-1] if clocked else grid
        self.trajectory.segments.append(
            Segment(kind=kind, t=np.asarray(ts, dtype=float).tolist(),
                    x=np.broadcast_to(xs, grid.shape).astype(float).tolist(),
                    y=np.broadcast_to(ys, grid.shape).astype(float).tolist())
        )


class Simulator:
    """Runs one system at a fixed mu; every ``run`` call owns a fresh mutable context."""

    def __init__(self, sys: PWSystem, policy: Policy | None = None, mu: float | None = None):
        self.sys = sys
        self.policy = policy or Policy()
        self.mu = sys.mu if mu is None else float(mu)

    def run(self, state0: Sequence[float], t_max: float, **options) -> Trajectory:
        return self.execute(state0, t_max, **options).trajectory

    def execute(self, state0: Sequence[float], t_max: float, *, stop_on: StopRule | None = None,
                section: Section | None = None, branch: Branch | None = None,
                pending: list[tuple[float, Branch]] | None = None) -> _Run:
        run = _Run(self.policy, t_max, stop_on, section)
        if t_max <= 0:
            return run
        x, y = float(state0[0]), float(state0[1])
        mech = self.sys.mechanism
        match mech:
            case Smooth():
                self._smooth(run, mech, x, y)
            case Filippov():
                self._filippov(run, mech, x, y, branch)
            case Impact():
                self._impact(run, mech, x, y)
            case Impulse():
                self._impulse(run, mech, x, y)
            case Hysteretic():
                self._hysteretic(run, mech, x, y, branch)
            case Delayed():
                self._delayed(run, mech, x, y, branch, pending)
            case FourQuadrant():
                self._four_quadrant(run, mech, x, y)
            case SqrtContinuous():
                self._sqrt(run, mech, x, y)
        _LOGGER.debug(
            "Simulated %s to t=%.6g with %s events", self.sys.tag, run.t, len(run.trajectory.events)
        )
        return run

    def _side(self) -> Branch:
        return "R" if self.policy.exit_side == "right" else "L"

    def _smooth(self, run: _Run, mech: Smooth, x: float, y: float) -> None:
        rhs = _field(mech.field, self.mu)
        axis = _event(lambda t, z: z[0])
        while not run.finished:
            (x, y), fired = run.flow(rhs, [x, y], SegmentKind.FLOW, [axis])
            if run.done or not fired:
                continue
            x = 0.0
            upward = mech.field.eval(0.0, y, self.mu)[0] > 0
            run.record(EventType.SECTION, 0.0, y, "up" if upward else "down")

    def _filippov_start(self, run: _Run, mech: Filippov, y: float) -> Branch | Literal["S"] | None:
        f_l = mech.left.eval(0.0, y, self.mu)[0]
        f_r = mech.right.eval(0.0, y, self.mu)[0]
        tol = FOLD_TOL
        if abs(f_l) <= tol and abs(f_r) <= tol:
            run.halt("two-fold reached", EventType.TWO_FOLD_STOP, 0.0, y)
            return None
        if f_l < -tol and f_r > tol:
            side = self._side()
            _LOGGER.warning("Start (0, %s) lies on a repelling sliding region; leaving %s", y, side)
            run.record(EventType.AMBIGUOUS_EXIT, 0.0, y, self.policy.exit_side)
            return side
        if f_l > tol and f_r < -tol:
            return "S"
        if f_r > tol or (f_l > tol and f_r >= -tol):
            return "R"
        return "L"

    def _arrival(self, run: _Run, mech: Filippov, came_from: Branch, y: float) -> Branch | Literal["S"] | None:
        """Decide what happens when an orbit from ``came_from`` reaches (0, y)."""
        f_l = mech.left.eval(0.0, y, self.mu)[0]
        f_r = mech.right.eval(0.0, y, self.mu)[0]
        tol = FOLD_TOL
        own, other = (f_l, f_r) if came_from == "L" else (-f_r, -f_l)
        target: Branch = "R" if came_from == "L" else "L"
        if abs(own) <= tol and abs(other) <= tol:
            run.halt("two-fold reached", EventType.TWO_FOLD_STOP, 0.0, y)
            return None
        if abs(own) <= tol:
            run.record(EventType.FOLD_TANGENCY, 0.0, y, came_from)
            return came_from
        if other > tol:
            run.record(EventType.SWITCH, 0.0, y, f"{came_from}->{target}")
            return target
        if other < -tol:
            run.record(EventType.SLIDE_ENTER, 0.0, y, f"{came_from}->slide")
            return "S"
        run.record(EventType.FOLD_TANGENCY, 0.0, y, target)
        return target

    def _filippov(self, run: _Run, mech: Filippov, x: float, y: float, branch: Branch | None) -> None:
        mu = self.mu
        rhs = {"L": _field(mech.left, mu), "R": _field(mech.right, mu)}
        arrive = {"L": _event(lambda t, z: z[0], 1.0), "R": _event(lambda t, z: z[0], -1.0)}
        kinds = {"L": SegmentKind.FLOW_L, "R": SegmentKind.FLOW_R}

        def slide(t: float, z: np.ndarray) -> list[float]:
            f_l, g_l = mech.left.eval(0.0, z[0], mu)
            f_r, g_r = mech.right.eval(0.0, z[0], mu)
            return [(f_l * g_r - f_r * g_l) / (f_l - f_r)]

        leave_l = _event(lambda t, z: mech.left.eval(0.0, z[0], mu)[0], -1.0)
        leave_r = _event(lambda t, z: mech.right.eval(0.0, z[0], mu)[0], 1.0)

        mode: Branch | Literal["S"] | None
        if branch is not None:
            mode = branch
        elif x < 0:
            mode = "L"
        elif x > 0:
            mode = "R"
        else:
            mode = self._filippov_start(run, mech, y)

        while mode is not None and not run.finished:
            if mode == "S":
                z, fired = run.flow(slide, [y], SegmentKind.SLIDING, [leave_l, leave_r], to_xy=_slide_plane)
                y = float(z[0])
                if run.done or not fired:
                    continue
                f_l = mech.left.eval(0.0, y, mu)[0]
                f_r = mech.right.eval(0.0, y, mu)[0]
                if abs(f_l) <= FOLD_TOL and abs(f_r) <= FOLD_TOL:
                    run.halt("two-fold reached while sliding", EventType.TWO_FOLD_STOP, 0.0, y)
                    return
                mode = "L" if 0 in fired else "R"
                x = -EXIT_OFFSET if mode == "L" else EXIT_OFFSET
                run.record(EventType.SLIDE_EXIT, 0.0, y, f"slide->{mode}")
                continue

            (x, y), fired = run.flow(rhs[mode], [x, y], kinds[mode], [arrive[mode]])
            if run.done or not fired:
                continue
            x = 0.0
            mode = self._arrival(run, mech, mode, y)

    def _impact(self, run: _Run, mech: Impact, x: float, y: float) -> None:
        if x > EQ_TOL:
            raise IntegrationError(f"Impact orbits live in x <= 0, got x = {x}")
        policy = self.policy
        rhs = _field(mech.field, self.mu)
        hit = _event(lambda t, z: z[0], 1.0)
        while not run.finished:
            (x, y), fired = run.flow(rhs, [min(x, 0.0), y], SegmentKind.FLOW, [hit])
            if run.done or not fired:
                continue
            x = 0.0
            if run.record(EventType.IMPACT, 0.0, y):
                return
            if abs(y) < policy.zeno_y_tol:
                run.halt("zeno", EventType.ZENO_STOP, 0.0, y)
                return
            after = mech.reset(y, self.mu)
            run.n_resets += 1
            run.jump(SegmentKind.RESET, (0.0, y), (0.0, after))
            y = after
            if run.n_resets >= policy.zeno_max_resets or abs(y) < policy.zeno_y_tol:
                run.halt("zeno", EventType.ZENO_STOP, 0.0, y)
                return

    def _impulse(self, run: _Run, mech: Impulse, x: float, y: float) -> None:
        rhs = _field(mech.field, self.mu)
        cross = _event(lambda t, z: z[0], 1.0)
        while not run.finished:
            (x, y), fired = run.flow(rhs, [x, y], SegmentKind.FLOW, [cross])
            if run.done or not fired:
                continue
            x = 0.0
            if y <= 0:
                continue
            if run.record(EventType.IMPULSE, 0.0, y):
                return
            radius = mech.radius(y, self.mu)
            theta = wrap_angle(mech.angle(y, self.mu))
            after = (radius * math.cos(theta), radius * math.sin(theta))
            run.jump(SegmentKind.IMPULSE, (0.0, y), after)
            x, y = after
            if radius == 0:
                run.halt("impulse to the origin")
                return

    def _hysteretic(self, run: _Run, mech: Hysteretic, x: float, y: float, branch: Branch | None) -> None:
        mu = self.mu
        initial = self.policy.initial_branch
        if branch is None and initial is not None:
            branch = "L" if initial == "left" else "R"
        if branch is None:
            if x >= mu and x > 0:
                branch = "R"
            elif x <= -mu and x < 0:
                branch = "L"
            else:
                branch = "R" if x > 0 else "L" if x < 0 else self._side()
        rhs = {"L": _field(mech.left, mu), "R": _field(mech.right, mu)}
        threshold = {
            "L": _event(lambda t, z: z[0] - mu, 1.0),
            "R": _event(lambda t, z: z[0] + mu, -1.0),
        }
        kinds = {"L": SegmentKind.FLOW_L, "R": SegmentKind.FLOW_R}
        while not run.finished:
            (x, y), fired = run.flow(rhs[branch], [x, y], kinds[branch], [threshold[branch]])
            if run.done or not fired:
                continue
            target: Branch = "R" if branch == "L" else "L"
            x = mu if branch == "L" else -mu
            if run.record(EventType.SWITCH, x, y, f"{branch}->{target}"):
                return
            branch = target

    def _history_switches(self, history: Callable[[float], Sequence[float]]) -> list[tuple[float, Branch]]:
        mu = self.mu
        if mu <= 0:
            return []

        def past_x(t: float) -> float:
            return float(history(t)[0])

        scheduled: list[tuple[float, Branch]] = []
        for lo, hi in sign_changes(past_x, np.linspace(-mu, 0.0, 201)):
            if lo == hi:
                continue
            root = brent_root(past_x, lo, hi)
            if root >= 0.0:
                continue
            scheduled.append((root + mu, "R" if past_x(hi) > 0 else "L"))
        return scheduled

    def _delayed(self, run: _Run, mech: Delayed, x: float, y: float, branch: Branch | None,
                 pending: list[tuple[float, Branch]] | None) -> None:
        mu = self.mu
        if mu < 0:
            raise IntegrationError(f"Delayed switching needs a lag mu >= 0, got {mu}")
        if pending is None:
            history = mech.history or (lambda t: (x, y))
            pending = self._history_switches(history)
            if branch is None:
                past = float(history(-mu)[0])
                branch = "R" if past > 0 else "L" if past < 0 else self._side()
        else:
            pending = sorted(pending)
        if branch is None:
            branch = "R" if x > 0 else "L" if x < 0 else self._side()

        rhs = {"L": _field(mech.left, mu), "R": _field(mech.right, mu)}
        kinds = {"L": SegmentKind.FLOW_L, "R": SegmentKind.FLOW_R}
        zero = _event(lambda t, z: z[0])
        last_switch: float | None = None
        while not run.finished:
            t_next = pending[0][0] if pending else None
            (x, y), fired = run.flow(rhs[branch], [x, y], kinds[branch], [zero], t_end=t_next)
            if run.done:
                return
            if fired:
                x = 0.0
                upward = rhs[branch](run.t, np.array([0.0, y]))[0] > 0
                if run.record(EventType.SECTION, 0.0, y, "up" if upward else "down"):
                    return
                pending.append((run.t + mu, "R" if upward else "L"))
                continue
            if t_next is None or run.t < t_next - 1e-12 * max(1.0, abs(t_next)):
                continue
            when, target = pending.pop(0)
            if target == branch:
                continue
            if last_switch is not None and when - last_switch < mu - 1e-12:
                run.record(EventType.DELAY_VIOLATION, x, y, f"{when - last_switch:.3e} < {mu:.3e}")
            last_switch = when
            if run.record(EventType.SWITCH, x, y, f"{branch}->{target}"):
                return
            branch = target

    def _four_quadrant(self, run: _Run, mech: FourQuadrant, x: float, y: float) -> None:
        mu = self.mu

        def entered(px: float, py: float, velocity: Sequence[float]) -> int:
            return mech.piece_at(px + 1e-9 * velocity[0], py + 1e-9 * velocity[1])

        here = mech.piece_at(x, y)
        if x == 0.0 or y == 0.0:
            here = entered(x, y, mech.quadrants[here].eval(x, y, mu))
        axes = [_event(lambda t, z: z[0]), _event(lambda t, z: z[1])]
        while not run.finished:
            piece = mech.quadrants[here]
            (x, y), fired = run.flow(_field(piece, mu), [x, y], _QUADRANT_KINDS[here], axes)
            if run.done or not fired:
                continue
            if 0 in fired:
                x = 0.0
            if 1 in fired:
                y = 0.0
            if abs(x) < EQ_TOL and abs(y) < EQ_TOL:
                run.halt("origin reached")
                return
            velocity = piece.eval(x, y, mu)
            target = entered(x, y, velocity)
            normal = 0 if x == 0.0 else 1
            if mech.quadrants[target].eval(x, y, mu)[normal] * velocity[normal] <= 0:
                raise IntegrationError(
                    f"Quadrant fields oppose across the axis at ({x:.6g}, {y:.6g}); axis sliding is not supported"
                )
            if run.record(EventType.SWITCH, x, y, f"Q{here + 1}->Q{target + 1}"):
                return
            here = target

    def _sqrt(self, run: _Run, mech: SqrtContinuous, x: float, y: float) -> None:
        """x > 0 is entered in the regularised time s (x = z^2, dt/ds = 2z), which resolves the
        singular layer at x = 0+; once z passes SQRT_HANDOFF the flow continues in t with Radau.
        """
        mu = self.mu
        left = _field(mech.left, mu)

        def regularised(s: float, w: np.ndarray) -> list[float]:
            z = w[0]
            f, g = mech.eval_z(z * z, w[1], z, mu)
            return [f, 2 * z * g, 2 * z]

        def right(t: float, w: np.ndarray) -> tuple[float, float]:
            return mech.eval(w[0], w[1], mu)

        enter = _event(lambda t, w: w[0], 1.0)
        back = _event(lambda s, w: w[0], -1.0)
        handoff = _event(lambda s, w: w[0] - SQRT_HANDOFF, 1.0)
        timeout = _event(lambda s, w: w[2] - run.t_max, 1.0)
        leave = _event(lambda t, w: w[0], -1.0)

        mode: Literal["L", "layer", "R"]
        if x < 0:
            mode = "L"
        elif x > 0:
            mode = "R" if math.sqrt(x) >= SQRT_HANDOFF else "layer"
        else:
            mode = "layer" if mech.eval_z(0.0, y, 0.0, mu)[0] > 0 else "L"

        while not run.finished:
            if mode == "L":
                (x, y), fired = run.flow(left, [x, y], SegmentKind.FLOW_L, [enter])
                if run.done or not fired:
                    continue
                x = 0.0
                mode = "layer"
                if run.record(EventType.SWITCH, 0.0, y, "L->R"):
                    return
                continue
            if mode == "layer":
                w, fired = run.flow(regularised, [math.sqrt(max(x, 0.0)), y, run.t], SegmentKind.FLOW_R,
                                    [back, handoff, timeout], to_xy=_sqrt_plane, clocked=True)
                x, y = float(w[0] ** 2), float(w[1])
                if run.done or 2 in fired:
                    continue
                if 1 in fired:
                    mode = "R"
                    continue
                if not fired:
                    raise IntegrationError(
                        f"Regularised flow stuck in the layer x = 0+ at y={y:.6g} after s={SQRT_S_MAX:g}"
                    )
            else:
                (x, y), fired = run.flow(right, [x, y], SegmentKind.FLOW_R, [leave], method="Radau")
                if run.done or not fired:
                    continue
            x = 0.0
            mode = "L"
            if run.record(EventType.SWITCH, 0.0, y, "R->L"):
                return


def simulate(sys: PWSystem, state0: Sequence[float], t_max: float, policy: Policy | None = None,
             mu: float | None = None) -> Trajectory:
    """Forward orbit of ``sys`` from ``state0`` over [0, t_max]."""
    return Simulator(sys, policy, mu).run(state0, t_max)


def extremes_of(trajectory: Trajectory) -> Extremes:
    xs = np.concatenate([np.asarray(seg.x) for seg in trajectory.segments] or [np.zeros(1)])
    ys = np.concatenate([np.asarray(seg.y) for seg in trajectory.segments] or [np.zeros(1)])
    return Extremes(x_min=float(xs.min()), x_max=float(xs.max()), y_min=float(ys.min()),
                    y_max=float(ys.max()))


def _section_direction(sys: PWSystem, section: Section, point: tuple[float, float], mu: float) -> float:
    piece_value = _piece_value(sys, point, mu)
    h = 1e-7
    forward = section.func(point[0] + h * piece_value[0], point[1] + h * piece_value[1])
    backward = section.func(point[0] - h * piece_value[0], point[1] - h * piece_value[1])
    return float(np.sign(forward - backward))


def _piece_value(sys: PWSystem, point: tuple[float, float], mu: float) -> tuple[float, float]:
    mech = sys.mechanism
    x, y = point
    match mech:
        case Filippov() | Hysteretic() | Delayed():
            return (mech.left if x < 0 else mech.right).eval(x, y, mu)
        case FourQuadrant():
            return mech.quadrants[mech.piece_at(x, y)].eval(x, y, mu)
        case SqrtContinuous():
            return mech.eval(x, y, mu)
        case _:
            return mech.field.eval(x, y, mu)


def return_map(sys: PWSystem, r: float, mu: float | None = None, *, policy: Policy | None = None,
               section: Section | None = None, t_max: float = RETURN_T_MAX) -> ReturnResult:
    """One full return to the section from section coordinate ``r``.

    Without a custom section the positive y-axis is used (x = mu for
    hysteresis); resets and impulses at the start point are applied first.
    """
    mu = sys.mu if mu is None else float(mu)
    sim = Simulator(sys, policy, mu)
    mech = sys.mechanism
    options: dict = {}

    if section is not None:
        start = section.start(r)
        if section.direction == 0.0:
            section = section.model_copy(update={"direction": _section_direction(sys, section, start, mu)})
        options["section"] = section
    else:
        start = (0.0, r)
        match mech:
            case Smooth():
                detail = "up" if mech.field.eval(0.0, r, mu)[0] > 0 else "down"
                options["stop_on"] = lambda e: e.type == EventType.SECTION and e.detail == detail and e.y > 0
            case Filippov():
                f_l = mech.left.eval(0.0, r, mu)[0]
                f_r = mech.right.eval(0.0, r, mu)[0]
                if f_l * f_r <= 0:
                    raise NoReturnError(f"Start (0, {r}) is not in a crossing region")
                back = "L->" if f_r > 0 else "R->"
                options["stop_on"] = lambda e: (
                    e.type in (EventType.SWITCH, EventType.SLIDE_ENTER) and e.detail.startswith(back) and e.y > 0
                )
            case Impact():
                start = (0.0, mech.reset(r, mu))
                options["stop_on"] = lambda e: e.type == EventType.IMPACT and e.y > 0
            case Impulse():
                radius = mech.radius(r, mu)
                theta = wrap_angle(mech.angle(r, mu))
                start = (radius * math.cos(theta), radius * math.sin(theta))
                options["stop_on"] = lambda e: e.type == EventType.IMPULSE and e.y > 0
            case Hysteretic():
                start = (mu, r)
                options["branch"] = "R"
                options["stop_on"] = lambda e: e.type == EventType.SWITCH and e.detail == "L->R"
            case Delayed():
                options["branch"] = "L"
                options["pending"] = [(mu, "R")]
                options["stop_on"] = lambda e: e.type == EventType.SECTION and e.detail == "up"
            case FourQuadrant():
                options["stop_on"] = lambda e: e.type == EventType.SWITCH and e.detail == "Q4->Q1"
            case SqrtContinuous():
                options["stop_on"] = lambda e: e.type == EventType.SWITCH and e.detail == "L->R" and e.y > 0

    run = sim.execute(start, t_max, **options)
    event = run.stop_event
    if event is None:
        reason = run.trajectory.halted or f"no return before t={t_max:g}"
        raise NoReturnError(f"Orbit from r={r:.6g} at mu={mu:.6g} did not return: {reason}")
    p = section.coordinate(event.x, event.y) if section is not None else event.y
    tangential = bool(run.trajectory.events_of(EventType.FOLD_TANGENCY))
    if tangential:
        _LOGGER.warning("Return from r=%.6g grazes the switching manifold", r)
    return ReturnResult(P=float(p), T=event.time, extremes=extremes_of(run.trajectory),
                        tangential=tangential, trajectory=run.trajectory)


def poincare_numeric(sys: PWSystem, section: Section | None, r: float, mu: float | None = None,
                     max_events: int = DEFAULT_EVENTS_MAX) -> tuple[float, float]:
    """(P(r), T(r)) for one full return to ``section`` (the positive y-axis when None)."""
    result = return_map(sys, r, mu, policy=Policy(events_max=max_events), section=section)
    return result.P, result.T


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Long table of samples and event markers ordered by time."""
    rows = []
    for seg in trajectory.segments:
        rows.extend(
            {"t": t, "x": x, "y": y, "segment_kind": str(seg.kind), "event": ""}
            for t, x, y in zip(seg.t, seg.x, seg.y)
        )
    rows.extend(
        {"t": e.time, "x": e.x, "y": e.y, "segment_kind": "", "event": str(e.type)}
        for e in trajectory.events
    )
    frame = pd.DataFrame(rows, columns=["t", "x", "y", "segment_kind", "event"])
    frame = frame.sort_values("t", kind="stable").reset_index(drop=True)
    frame.insert(0, "schema", SCHEMA_TRAJECTORY)
    return frame


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> None:
    trajectory_frame(trajectory).to_csv(path, index=False, float_format="%.12g")
