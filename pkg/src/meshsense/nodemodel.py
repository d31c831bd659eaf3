"""Node-local sensing, model merging by per-cell averaging, and accuracy.

A node's local model is a float grid the same shape as the ground-truth
field; NaN marks cells the node knows nothing about. Sensing extrapolates
the node's own-cell reading across its detection disk, which is where the
model's characteristic error comes from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .region import RegionError, TemperatureField, cell_of


@dataclass(frozen=True)
class McuProfile:
    name: str
    voltage_v: float
    tx_current_a: float
    rx_current_a: float

    def __post_init__(self) -> None:
        if min(self.voltage_v, self.tx_current_a, self.rx_current_a) <= 0:
            raise ValueError(f"profile {self.name!r} must have positive electrical values")


class LocalModel:
    """Per-cell temperature estimates; NaN = unknown."""

    __slots__ = ("estimate",)

    def __init__(self, estimate: np.ndarray):
        self.estimate = estimate

    @classmethod
    def empty(cls, cells_per_side: int) -> "LocalModel":
        return cls(np.full((cells_per_side, cells_per_side), np.nan))

    @property
    def known_count(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.estimate)))

    def known_cells(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Known cells in row-major order as (rows, cols, values)."""
        rows, cols = np.nonzero(~np.isnan(self.estimate))
        return rows, cols, self.estimate[rows, cols]

    def copy(self) -> "LocalModel":
        return LocalModel(self.estimate.copy())

    def absorb(self, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> None:
        """In-place merge of unique incoming cells: adopt unknowns, average knowns."""
        if len(rows) == 0:
            return
        est = self.estimate
        current = est[rows, cols]
        known = ~np.isnan(current)
        est[rows[~known], cols[~known]] = values[~known]
        est[rows[known], cols[known]] = (current[known] + values[known]) / 2.0


def merge(own: LocalModel, incoming_cells) -> LocalModel:
    """Merge incoming (row, col, value) records into a copy of the model.

    Cells the model already knows are replaced by the mean of the current
    and incoming value; unknown cells adopt the incoming value. Records are
    applied in order, so a repeated cell averages repeatedly.
    """
    merged = own.copy()
    records = list(incoming_cells)
    if not records:
        return merged
    k = merged.estimate.shape[0]
    rows = np.fromiter((r for r, _, _ in records), dtype=np.int64, count=len(records))
    cols = np.fromiter((c for _, c, _ in records), dtype=np.int64, count=len(records))
    values = np.fromiter((v for _, _, v in records), dtype=np.float64, count=len(records))
    if rows.min() < 0 or rows.max() >= k or cols.min() < 0 or cols.max() >= k:
        raise RegionError("incoming cell index outside the region grid")
    if not np.all(np.isfinite(values)):
        raise ValueError("incoming cell values must be finite")
    if len(np.unique(rows * k + cols)) == len(records):
        merged.absorb(rows, cols, values)
    else:
        for r, c, v in zip(rows, cols, values):
            cur = merged.estimate[r, c]
            merged.estimate[r, c] = v if np.isnan(cur) else (cur + v) / 2.0
    return merged


def detection_mask(
    position: tuple[float, float], detect_range_m: float, field: TemperatureField
) -> np.ndarray:
    """Boolean grid of cells whose center lies within the detection disk."""
    cfg = field.config
    k = cfg.cells_per_side
    centers = (np.arange(k) + 0.5) * cfg.cell_size_m
    dx = centers - position[0]
    dy = centers - position[1]
    return dy[:, None] ** 2 + dx[None, :] ** 2 <= detect_range_m**2


def sense(position: tuple[float, float], detect_range_m: float, field: TemperatureField) -> LocalModel:
    """Read the node's own cell exactly and extrapolate it across the disk."""
    own_row, own_col = cell_of(position, field.config)
    own_value = float(field.cells[own_row, own_col])
    model = LocalModel.empty(field.config.cells_per_side)
    model.estimate[detection_mask(position, detect_range_m, field)] = own_value
    return model


def accuracy(model: LocalModel, field: TemperatureField, epsilon_c: float = 1.0) -> float:
    """Fraction of ALL region cells known and within epsilon of the truth.

    Unknown cells count as inaccurate, so a node covering only part of the
    region caps below 1 even with perfect estimates.
    """
    if model.estimate.shape != field.cells.shape:
        raise RegionError("model and field dimensions differ")
    est = model.estimate
    good = ~np.isnan(est) & (np.abs(est - field.cells) <= epsilon_c)
    return float(np.count_nonzero(good)) / field.n_cells


@dataclass
class NodeState:
    node_id: int
    position: tuple[float, float]
    profile: McuProfile
    model: LocalModel
    neighbor_order: list[int]
    max_energy_j: float = 1000.0
    energy_j: float = 1000.0
    tx_range_m: float = 50.0
    detect_range_m: float = 30.0
    message_send_success_rate: float = 0.95
    ack_send_success_rate: float = 0.98
    resend_threshold: int = 0
    interaction_counts: dict[int, int] = field(default_factory=dict)

    @property
    def active(self) -> bool:
        return self.energy_j > 0.0

    def consume_energy(self, joules: float) -> None:
        self.energy_j = max(0.0, self.energy_j - joules)
