"""Ground-truth temperature field over a square region.

The region is discretized into square cells (integer Celsius each) with a
bounded difference between 4-adjacent cells, so nearby subregions stay
within a few degrees of each other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np


class RegionError(ValueError):
    """Invalid region configuration or query."""


@dataclass(frozen=True)
class RegionConfig:
    side_m: float
    cell_size_m: float = 1.0
    temp_min_c: int = 10
    temp_max_c: int = 35
    max_adjacent_delta_c: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.side_m <= 0 or self.cell_size_m <= 0:
            raise RegionError("side_m and cell_size_m must be positive")
        ratio = self.side_m / self.cell_size_m
        if abs(ratio - round(ratio)) > 1e-9:
            raise RegionError("side_m must be an integer multiple of cell_size_m")
        if self.temp_min_c > self.temp_max_c:
            raise RegionError("temp_min_c must not exceed temp_max_c")
        if self.max_adjacent_delta_c < 0:
            raise RegionError("max_adjacent_delta_c must be >= 0")
        if not (0 <= self.seed < 2**64):
            raise RegionError("seed must be a 64-bit unsigned integer")

    @property
    def cells_per_side(self) -> int:
        return int(round(self.side_m / self.cell_size_m))


@dataclass(frozen=True)
class TemperatureField:
    cells: np.ndarray  # (k, k) int64
    config: RegionConfig

    @property
    def n_cells(self) -> int:
        return self.cells.size


def generate_field(config: RegionConfig) -> TemperatureField:
    """Seeded random-walk fill of the region grid.

    Cell (0,0) is drawn uniformly from the temperature range; every other
    cell is drawn uniformly from the intersection of the range with
    [west +- delta] and [north +- delta]. The intersection is never empty
    because west and north neighbors share the northwest cell, so they
    differ by at most 2*delta.
    """
    k = config.cells_per_side
    rng = random.Random(config.seed)
    lo_b, hi_b, delta = config.temp_min_c, config.temp_max_c, config.max_adjacent_delta_c
    grid = np.zeros((k, k), dtype=np.int64)
    for r in range(k):
        row = grid[r]
        north = grid[r - 1] if r > 0 else None
        for c in range(k):
            lo, hi = lo_b, hi_b
            if c > 0:
                w = row[c - 1]
                lo = max(lo, w - delta)
                hi = min(hi, w + delta)
            if north is not None:
                n = north[c]
                lo = max(lo, n - delta)
                hi = min(hi, n + delta)
            row[c] = rng.randint(lo, hi)
    return TemperatureField(cells=grid, config=config)


def cell_of(position: tuple[float, float], config: RegionConfig) -> tuple[int, int]:
    """Map a position in meters to its (row, col) cell."""
    x, y = position
    if not (0 <= x < config.side_m and 0 <= y < config.side_m):
        raise RegionError(f"position {position} outside region [0, {config.side_m})^2")
    return int(y // config.cell_size_m), int(x // config.cell_size_m)


def field_to_csv(field: TemperatureField, path) -> None:
    """Snapshot the grid as CSV, one line per grid row."""
    np.savetxt(path, field.cells, fmt="%d", delimiter=",")


def field_from_csv(path, config: RegionConfig) -> TemperatureField:
    """Load a grid snapshot and re-check the field invariants against config."""
    cells = np.loadtxt(path, dtype=np.int64, delimiter=",", ndmin=2)
    k = config.cells_per_side
    if cells.shape != (k, k):
        raise RegionError(f"grid shape {cells.shape} does not match config ({k}, {k})")
    if cells.min() < config.temp_min_c or cells.max() > config.temp_max_c:
        raise RegionError("cell values outside configured temperature range")
    d = config.max_adjacent_delta_c
    if k > 1:
        if np.abs(np.diff(cells, axis=0)).max() > d or np.abs(np.diff(cells, axis=1)).max() > d:
            raise RegionError("adjacent cells differ by more than max_adjacent_delta_c")
    return TemperatureField(cells=cells, config=config)
