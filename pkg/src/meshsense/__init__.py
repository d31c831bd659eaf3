"""Deterministic gossip-mesh sensing simulator with multi-objective sweeps."""

from .config import DecisionVars, ExperimentConfig, Scenario, load_config
from .metrics import ConvergenceConfig, ObjectiveTriple, run_simulation
from .pareto import ObjectivePoint, dominates, pareto_front, performance_score
from .region import RegionConfig, TemperatureField, generate_field
from .topology import MeshGraph, Placement, build_valid_topology

__version__ = "0.1.0"

__all__ = [
    "ConvergenceConfig",
    "DecisionVars",
    "ExperimentConfig",
    "MeshGraph",
    "ObjectivePoint",
    "ObjectiveTriple",
    "Placement",
    "RegionConfig",
    "Scenario",
    "TemperatureField",
    "build_valid_topology",
    "dominates",
    "generate_field",
    "load_config",
    "pareto_front",
    "performance_score",
    "run_simulation",
]
