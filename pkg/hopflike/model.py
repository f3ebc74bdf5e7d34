from __future__ import annotations

import math
from enum import StrEnum
from functools import cached_property
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .const import (
    DEFAULT_ATOL,
    DEFAULT_EVENTS_MAX,
    DEFAULT_MAX_STEP,
    DEFAULT_RTOL,
    MAX_TAYLOR_ORDER,
    ZENO_MAX_RESETS,
    ZENO_Y_TOL,
)

_SIZE = MAX_TAYLOR_ORDER + 1


def _zeros(n: int) -> list[list[float]]:
    return [[0.0] * n for _ in range(n)]


class TaylorTable(BaseModel):
    """Partial derivatives of one smooth piece at the origin.

    ``f[i][j]`` is the raw partial d^(i+j) f / dx^i dy^j, entries with
    i + j > 4 are zero. ``f_mu``/``g_mu`` hold d/dmu of the order <= 1 entries.
    """

    f: list[list[float]] = Field(default_factory=lambda: _zeros(_SIZE))
    g: list[list[float]] = Field(default_factory=lambda: _zeros(_SIZE))
    f_mu: list[list[float]] = Field(default_factory=lambda: _zeros(2))
    g_mu: list[list[float]] = Field(default_factory=lambda: _zeros(2))
    exact: bool = False

    @field_validator("f", "g")
    @classmethod
    def _square(cls, value: list[list[float]]) -> list[list[float]]:
        if len(value) != _SIZE or any(len(row) != _SIZE for row in value):
            raise ValueError(f"table must be {_SIZE}x{_SIZE}")
        return value

    def d(self, i: int, j: int, c: Literal["f", "g"]) -> float:
        if i + j > MAX_TAYLOR_ORDER:
            return 0.0
        return (self.f if c == "f" else self.g)[i][j]

    def dmu(self, i: int, j: int, c: Literal["f", "g"]) -> float:
        if i + j > 1:
            return 0.0
        return (self.f_mu if c == "f" else self.g_mu)[i][j]

    @property
    def a0(self) -> float:
        return self.f[0][0]

    @property
    def a1(self) -> float:
        return self.f[1][0]

    @property
    def a2(self) -> float:
        return self.f[0][1]

    @property
    def a3(self) -> float:
        return 0.5 * self.f[2][0]

    @property
    def a4(self) -> float:
        return self.f[1][1]

    @property
    def a5(self) -> float:
        return 0.5 * self.f[0][2]

    @property
    def b0(self) -> float:
        return self.g[0][0]

    @property
    def b1(self) -> float:
        return self.g[1][0]

    @property
    def b2(self) -> float:
        return self.g[0][1]

    @property
    def b3(self) -> float:
        return 0.5 * self.g[2][0]

    @property
    def b4(self) -> float:
        return self.g[1][1]

    @property
    def b5(self) -> float:
        return 0.5 * self.g[0][2]

    @property
    def jacobian(self) -> np.ndarray:
        return np.array([[self.a1, self.a2], [self.b1, self.b2]])

    @property
    def scale(self) -> float:
        """Magnitude used to make hypothesis thresholds scale-aware."""
        return 1.0 + float(np.max(np.abs(np.array(self.f + self.g))))

    @cached_property
    def eigen(self) -> EigenData:
        return EigenData.from_jacobian(self.jacobian)


class EigenData(BaseModel):
    """lam +- i omega for a focus, lam +- omega for a node."""

    kind: Literal["focus", "node", "degenerate"]
    lam: float
    omega: float

    @classmethod
    def from_jacobian(cls, jacobian: np.ndarray) -> EigenData:
        (a1, a2), (b1, b2) = np.asarray(jacobian, dtype=float)
        lam = 0.5 * (a1 + b2)
        disc = lam * lam - (a1 * b2 - a2 * b1)
        if disc < 0:
            return cls(kind="focus", lam=lam, omega=math.sqrt(-disc))
        if disc > 0:
            return cls(kind="node", lam=lam, omega=math.sqrt(disc))
        return cls(kind="degenerate", lam=lam, omega=0.0)

    @property
    def stable(self) -> bool:
        if self.kind == "node":
            return self.lam + self.omega < 0
        return self.lam < 0

    @property
    def values(self) -> tuple[complex, complex]:
        if self.kind == "focus":
            return complex(self.lam, self.omega), complex(self.lam, -self.omega)
        return complex(self.lam + self.omega), complex(self.lam - self.omega)


class Monomial(BaseModel):
    """coeff * x^i * y^j * z^z * mu^mu, z = sqrt(x) for the square-root mechanism."""

    model_config = ConfigDict(populate_by_name=True)

    i: int = Field(default=0, ge=0)
    j: int = Field(default=0, ge=0)
    z: int = Field(default=0, ge=0)
    mu: int = Field(default=0, ge=0)
    coeff: float


class PieceDocument(BaseModel):
    label: str
    f: list[Monomial] = Field(default_factory=list)
    g: list[Monomial] = Field(default_factory=list)


class ModelDocument(BaseModel):
    """Structured model description accepted by ``load_model``."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_tag: str | None = Field(default=None, alias="schema")
    name: str = "model"
    mechanism: str | None = None
    zoo: str | None = None
    pieces: list[PieceDocument] = Field(default_factory=list)
    reset: list[Monomial] | None = None
    radius: list[Monomial] | None = None
    angle: list[Monomial] | None = None
    params: dict[str, float] = Field(default_factory=dict)
    notes: str = ""


class Policy(BaseModel):
    """Integrator settings shared by every mechanism."""

    rtol: float = Field(default=DEFAULT_RTOL, gt=0)
    atol: float = Field(default=DEFAULT_ATOL, gt=0)
    max_step: float = Field(default=DEFAULT_MAX_STEP, gt=0)
    exit_side: Literal["left", "right"] = "right"
    events_max: int = Field(default=DEFAULT_EVENTS_MAX, gt=0)
    zeno_y_tol: float = Field(default=ZENO_Y_TOL, gt=0)
    zeno_max_resets: int = Field(default=ZENO_MAX_RESETS, gt=0)
    initial_branch: Literal["left", "right"] | None = None


class SegmentKind(StrEnum):
    FLOW = "flow"
    FLOW_L = "flow_L"
    FLOW_R = "flow_R"
    FLOW_Q1 = "flow_quadrant_1"
    FLOW_Q2 = "flow_quadrant_2"
    FLOW_Q3 = "flow_quadrant_3"
    FLOW_Q4 = "flow_quadrant_4"
    SLIDING = "sliding"
    RESET = "reset"
    IMPULSE = "impulse"


class EventType(StrEnum):
    SWITCH = "switch"
    FOLD_TANGENCY = "fold_tangency"
    IMPACT = "impact"
    IMPULSE = "impulse"
    ZENO_STOP = "zeno_stop"
    SLIDE_ENTER = "slide_enter"
    SLIDE_EXIT = "slide_exit"
    AMBIGUOUS_EXIT = "ambiguous_exit"
    TWO_FOLD_STOP = "two_fold_stop"
    DELAY_VIOLATION = "delay_violation"
    SECTION = "section"


class Segment(BaseModel):
    kind: SegmentKind
    t: list[float] = Field(default_factory=list)
    x: list[float] = Field(default_factory=list)
    y: list[float] = Field(default_factory=list)

    @property
    def t_start(self) -> float:
        return self.t[0]

    @property
    def t_end(self) -> float:
        return self.t[-1]


class Event(BaseModel):
    time: float
    type: EventType
    x: float
    y: float
    detail: str = ""


class Trajectory(BaseModel):
    segments: list[Segment] = Field(default_factory=list)
    events: list[Event] = Field(default_factory=list)
    halted: str | None = None

    @property
    def final_state(self) -> tuple[float, float] | None:
        if not self.segments:
            return None
        last = self.segments[-1]
        return last.x[-1], last.y[-1]

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end if self.segments else 0.0

    def events_of(self, kind: EventType) -> list[Event]:
        return [event for event in self.events if event.type == kind]


class PointTag(StrEnum):
    CROSSING = "crossing"
    ATTRACTING_SLIDING = "attracting_sliding"
    REPELLING_SLIDING = "repelling_sliding"
    VISIBLE_FOLD_L = "visible_fold_L"
    INVISIBLE_FOLD_L = "invisible_fold_L"
    VISIBLE_FOLD_R = "visible_fold_R"
    INVISIBLE_FOLD_R = "invisible_fold_R"
    TWO_FOLD = "two_fold"
    BOUNDARY_EQUILIBRIUM_L = "boundary_equilibrium_L"
    BOUNDARY_EQUILIBRIUM_R = "boundary_equilibrium_R"
    DEGENERATE = "degenerate"


class ManifoldPointClass(BaseModel):
    tag: PointTag
    f_left: float
    f_right: float
    visible_left: bool | None = None
    visible_right: bool | None = None
    detail: str = ""


class Equilibrium(BaseModel):
    x: float
    y: float
    kind: Literal[
        "regular_L", "regular_R", "regular", "pseudo", "two_fold_stationary", "boundary"
    ]
    admissible: bool
    stable: bool | None = None
    eigen: EigenData | None = None
    hyperbolic: bool = True


class AffineReturnResult(BaseModel):
    P: float | None
    T: float | None
    type_tag: Literal["I", "II", "III"]
    r_hat: float | None = None
    dP_dr: float | None = None


class HLBKind(StrEnum):
    HOPF = "Hopf"
    HLB1 = "HLB1"
    HLB2 = "HLB2"
    HLB3 = "HLB3"
    HLB4 = "HLB4"
    HLB5 = "HLB5"
    HLB6 = "HLB6"
    HLB7 = "HLB7"
    HLB8 = "HLB8"
    HLB9 = "HLB9"
    HLB10 = "HLB10"
    HLB11 = "HLB11"
    HLB12 = "HLB12"
    HLB13 = "HLB13"
    HLB14 = "HLB14"
    HLB15 = "HLB15"
    HLB16 = "HLB16"
    HLB17 = "HLB17"
    HLB18 = "HLB18"
    HLB19 = "HLB19"
    HLB20 = "HLB20"
    UNCLASSIFIED = "unclassified"


class Criticality(StrEnum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"
    DEGENERATE = "degenerate"


class ChecklistItem(BaseModel):
    name: str
    satisfied: bool
    witness: float | None = None
    required: bool = True


class HLBReport(BaseModel):
    kind: HLBKind
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    criticality: Criticality = Criticality.DEGENERATE
    exponents: tuple[float, float] | None = None
    period_limit: float | None = None
    period_coefficient: float | None = None
    period_parts: list[float] = Field(default_factory=list)
    radius_coefficient: float | None = None
    radius_exponent: float | None = None
    cycle_side: int = 0
    cycle_stable: bool | None = None
    normalization: list[str] = Field(default_factory=list)
    checklist: list[ChecklistItem] = Field(default_factory=list)
    extras: dict[str, float] = Field(default_factory=dict)
    mu0: float = 0.0

    @property
    def classified(self) -> bool:
        return self.kind != HLBKind.UNCLASSIFIED


class Extremes(BaseModel):
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def amplitude(self) -> float:
        return max(self.x_max - self.x_min, self.y_max - self.y_min)


class FixedPoint(BaseModel):
    r: float
    residual: float
    multiplier: float
    period: float
    extremes: Extremes

    @property
    def stable(self) -> bool:
        return abs(self.multiplier) < 1.0


class DiagramPoint(BaseModel):
    mu: float
    equilibria: list[Equilibrium] = Field(default_factory=list)
    cycle: FixedPoint | None = None
    error: str | None = None


class ScalingFit(BaseModel):
    """Log-log fits of cycle size and period against |mu - mu0|.

    ``exponent_amplitude`` and ``exponent_period`` are the measured (a, b) to
    compare with ``expected``. They are raw slopes, so for b = 0 rows
    ``exponent_period`` is close to zero. How fast T approaches its limit is
    carried separately by ``correction_exponent``, the slope of
    |T - period_limit|. ``limit_error`` is the relative gap at the point
    closest to mu0.
    """

    kind: HLBKind
    exponent_amplitude: float
    exponent_period: float
    exponent_x: float
    exponent_y: float
    exponent_x_max: float | None = None
    intercept_amplitude: float
    intercept_period: float
    r2_amplitude: float
    r2_period: float
    correction_exponent: float | None = None
    r2_correction: float | None = None
    period_limit: float | None = None
    limit_error: float | None = None
    expected: tuple[float, float] | None = None
    mu: list[float] = Field(default_factory=list)
    amplitude: list[float] = Field(default_factory=list)
    amplitude_x: list[float] = Field(default_factory=list)
    amplitude_y: list[float] = Field(default_factory=list)
    x_max: list[float] = Field(default_factory=list)
    period: list[float] = Field(default_factory=list)


class Published(BaseModel):
    """Values a zoo entry is documented to reproduce."""

    kind: HLBKind
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    bifurcation_value: float | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    source: str = ""


class LemmaCheck(BaseModel):
    name: str
    passed: bool
    value: float | None = None
    expected: float | None = None
    tolerance: float | None = None
    detail: str = ""
