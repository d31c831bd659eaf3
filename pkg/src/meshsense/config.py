"""Experiment configuration: dataclasses plus the JSON file format.

Every tunable lives here rather than in code: radio constants, MCU
profiles, convergence and constraint thresholds, region parameters, the
decision-variable grid, and the scenario list. A user config file is
deep-merged over the packaged defaults, so partial files are fine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .nodemodel import McuProfile
from .protocol import STRATEGIES, RadioConfig


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class Scenario:
    name: str
    side_m: float
    n_nodes: int
    placement: str  # "uniform" | "random"

    def __post_init__(self) -> None:
        if self.side_m <= 0:
            raise ConfigError(f"scenario {self.name!r}: side_m must be positive")
        if self.n_nodes < 2:
            raise ConfigError(f"scenario {self.name!r}: gossip needs at least two nodes")
        if self.placement not in ("uniform", "random"):
            raise ConfigError(f"scenario {self.name!r}: unknown placement {self.placement!r}")


@dataclass(frozen=True)
class DecisionVars:
    sharing_frequency: int
    resend_threshold: int
    strategy: str

    def __post_init__(self) -> None:
        if self.sharing_frequency < 1:
            raise ConfigError("sharing_frequency must be >= 1")
        if self.resend_threshold < 0:
            raise ConfigError("resend_threshold must be >= 0")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class RegionParams:
    cell_size_m: float = 1.0
    temp_min_c: int = 20
    temp_max_c: int = 22
    max_adjacent_delta_c: int = 2


@dataclass(frozen=True)
class NodeParams:
    max_energy_j: float = 1000.0
    tx_range_m: float = 50.0
    detect_range_m: float = 30.0
    message_send_success_rate: float = 0.95
    ack_send_success_rate: float = 0.98
    accuracy_epsilon_c: float = 2.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.message_send_success_rate <= 1.0):
            raise ConfigError("message_send_success_rate must be in [0, 1]")
        if not (0.0 <= self.ack_send_success_rate <= 1.0):
            raise ConfigError("ack_send_success_rate must be in [0, 1]")
        if min(self.max_energy_j, self.tx_range_m, self.detect_range_m) <= 0:
            raise ConfigError("energy and ranges must be positive")


@dataclass(frozen=True)
class Thresholds:
    psi: float = 0.95    # average-accuracy requirement
    theta: float = 0.80  # minimum-accuracy requirement
    phi: float = 0.70    # mean-battery floor
    max_rounds: int = 50

    def __post_init__(self) -> None:
        if not (0.0 < self.theta <= self.psi < 1.0):
            raise ConfigError("thresholds must satisfy 0 < theta <= psi < 1")
        if not (0.0 < self.phi < 1.0):
            raise ConfigError("phi must be in (0, 1)")
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be >= 1")


@dataclass(frozen=True)
class GridSpec:
    sharing_frequency: tuple[int, ...] = (1, 2, 3, 4, 5)
    resend_threshold: tuple[int, ...] = (0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
    strategy: tuple[str, ...] = STRATEGIES

    def cells(self) -> list[DecisionVars]:
        return [
            DecisionVars(f, t, s)
            for f in self.sharing_frequency
            for t in self.resend_threshold
            for s in self.strategy
        ]


@dataclass(frozen=True)
class TrialSpec:
    scenario: Scenario
    decision_vars: DecisionVars


@dataclass
class ExperimentConfig:
    region: RegionParams
    node: NodeParams
    radio: RadioConfig
    thresholds: Thresholds
    profiles: tuple[McuProfile, ...]
    scenarios: tuple[Scenario, ...]
    grid: GridSpec
    trial: TrialSpec
    repetitions: int = 3
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not (0 <= self.base_seed < 2**64):
            raise ConfigError("base_seed must be a 64-bit unsigned integer")
        if not self.profiles:
            raise ConfigError("need at least one MCU profile")


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def _default_doc() -> dict:
    text = resources.files("meshsense").joinpath("data/default_config.json").read_text()
    return json.loads(text)


def config_from_doc(doc: dict) -> ExperimentConfig:
    try:
        profiles = tuple(
            McuProfile(
                name=name,
                voltage_v=p["voltage_v"],
                tx_current_a=p["tx_current_a"],
                rx_current_a=p["rx_current_a"],
            )
            for name, p in doc["profiles"].items()
        )
        scenarios = tuple(Scenario(**s) for s in doc["scenarios"])
        trial_doc = doc["trial"]
        trial = TrialSpec(
            scenario=Scenario(**trial_doc["scenario"]),
            decision_vars=DecisionVars(**trial_doc["decision_vars"]),
        )
        return ExperimentConfig(
            region=RegionParams(**doc["region"]),
            node=NodeParams(**doc["node"]),
            radio=RadioConfig(**doc["radio"]),
            thresholds=Thresholds(**doc["thresholds"]),
            profiles=profiles,
            scenarios=scenarios,
            grid=GridSpec(
                sharing_frequency=tuple(doc["grid"]["sharing_frequency"]),
                resend_threshold=tuple(doc["grid"]["resend_threshold"]),
                strategy=tuple(doc["grid"]["strategy"]),
            ),
            trial=trial,
            repetitions=doc["repetitions"],
            base_seed=doc["base_seed"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad experiment config: {exc}") from exc


def load_config(path=None) -> ExperimentConfig:
    """Packaged defaults, deep-merged with the user file when given."""
    doc = _default_doc()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"config {path} must contain a JSON object")
        doc = _deep_merge(doc, user)
    return config_from_doc(doc)


def config_to_doc(cfg: ExperimentConfig) -> dict:
    return {
        "region": {
            "cell_size_m": cfg.region.cell_size_m,
            "temp_min_c": cfg.region.temp_min_c,
            "temp_max_c": cfg.region.temp_max_c,
            "max_adjacent_delta_c": cfg.region.max_adjacent_delta_c,
        },
        "node": {
            "max_energy_j": cfg.node.max_energy_j,
            "tx_range_m": cfg.node.tx_range_m,
            "detect_range_m": cfg.node.detect_range_m,
            "message_send_success_rate": cfg.node.message_send_success_rate,
            "ack_send_success_rate": cfg.node.ack_send_success_rate,
            "accuracy_epsilon_c": cfg.node.accuracy_epsilon_c,
        },
        "radio": {
            "data_rate_bps": cfg.radio.data_rate_bps,
            "data_message_bytes": cfg.radio.data_message_bytes,
            "ack_message_bytes": cfg.radio.ack_message_bytes,
            "cell_record_bytes": cfg.radio.cell_record_bytes,
        },
        "thresholds": {
            "psi": cfg.thresholds.psi,
            "theta": cfg.thresholds.theta,
            "phi": cfg.thresholds.phi,
            "max_rounds": cfg.thresholds.max_rounds,
        },
        "profiles": {
            p.name: {
                "voltage_v": p.voltage_v,
                "tx_current_a": p.tx_current_a,
                "rx_current_a": p.rx_current_a,
            }
            for p in cfg.profiles
        },
        "scenarios": [
            {"name": s.name, "side_m": s.side_m, "n_nodes": s.n_nodes, "placement": s.placement}
            for s in cfg.scenarios
        ],
        "grid": {
            "sharing_frequency": list(cfg.grid.sharing_frequency),
            "resend_threshold": list(cfg.grid.resend_threshold),
            "strategy": list(cfg.grid.strategy),
        },
        "trial": {
            "scenario": {
                "name": cfg.trial.scenario.name,
                "side_m": cfg.trial.scenario.side_m,
                "n_nodes": cfg.trial.scenario.n_nodes,
                "placement": cfg.trial.scenario.placement,
            },
            "decision_vars": {
                "sharing_frequency": cfg.trial.decision_vars.sharing_frequency,
                "resend_threshold": cfg.trial.decision_vars.resend_threshold,
                "strategy": cfg.trial.decision_vars.strategy,
            },
        },
        "repetitions": cfg.repetitions,
        "base_seed": cfg.base_seed,
    }


def save_config(cfg: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_doc(cfg), fh, indent=2)
        fh.write("\n")
