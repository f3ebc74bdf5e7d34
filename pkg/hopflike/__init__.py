"""Hopf-like bifurcations of planar piecewise-smooth ODEs."""

from .hlb import ClassificationError, classify, predicted_period, predicted_radius, scan_for_onset
from .integrator import return_map, simulate
from .model import Criticality, HLBKind, HLBReport, Policy, TaylorTable
from .poincare import find_limit_cycle, sweep_diagram
from .pwsmodel import ModelError, PWSystem, load_model
from .scaling import fit_scaling
from .zoo import published, zoo_build, zoo_list

__all__ = [
    "ClassificationError",
    "Criticality",
    "HLBKind",
    "HLBReport",
    "ModelError",
    "PWSystem",
    "Policy",
    "TaylorTable",
    "classify",
    "find_limit_cycle",
    "fit_scaling",
    "load_model",
    "predicted_period",
    "predicted_radius",
    "published",
    "return_map",
    "scan_for_onset",
    "simulate",
    "sweep_diagram",
    "zoo_build",
    "zoo_list",
]
