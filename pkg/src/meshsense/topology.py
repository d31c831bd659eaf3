"""Node placement and the transmission-range mesh graph."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np


class PlacementError(ValueError):
    """Invalid placement request."""


class TopologyInfeasibleError(RuntimeError):
    """No connected topology found within the retry budget."""


MAX_PLACEMENT_ATTEMPTS = 100


@dataclass(frozen=True)
class Placement:
    positions: tuple[tuple[float, float], ...]
    kind: str  # "uniform" | "random"

    @property
    def n_nodes(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class MeshGraph:
    adjacency: tuple[tuple[int, ...], ...]
    n_nodes: int

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])


def place_uniform(n: int, side_m: float) -> Placement:
    """sqrt(n) x sqrt(n) lattice, offset half a spacing from the edges."""
    if n < 1:
        raise PlacementError("need at least one node")
    k = math.isqrt(n)
    if k * k != n:
        raise PlacementError(f"uniform placement needs a perfect-square node count, got {n}")
    spacing = side_m / k
    positions = tuple(
        ((i + 0.5) * spacing, (j + 0.5) * spacing) for j in range(k) for i in range(k)
    )
    return Placement(positions=positions, kind="uniform")


def place_random(n: int, side_m: float, seed: int) -> Placement:
    if n < 1:
        raise PlacementError("need at least one node")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2)) * side_m
    return Placement(positions=tuple((float(x), float(y)) for x, y in pts), kind="random")


def build_graph(placement: Placement, tx_range_m: float) -> MeshGraph:
    """Edge between every pair of nodes within transmission range."""
    if tx_range_m <= 0:
        raise PlacementError("tx_range_m must be positive")
    pos = np.asarray(placement.positions, dtype=float)
    n = len(pos)
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    within = d2 <= tx_range_m**2
    np.fill_diagonal(within, False)
    adjacency = tuple(tuple(int(j) for j in np.flatnonzero(within[i])) for i in range(n))
    return MeshGraph(adjacency=adjacency, n_nodes=n)


def is_connected(graph: MeshGraph) -> bool:
    """Breadth-first reachability from node 0 covers all nodes."""
    n = graph.n_nodes
    if n == 0:
        raise PlacementError("graph has no nodes")
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n


def build_valid_topology(
    n_nodes: int,
    side_m: float,
    placement_kind: str,
    tx_range_m: float,
    seed: int,
    max_attempts: int = MAX_PLACEMENT_ATTEMPTS,
) -> tuple[Placement, MeshGraph]:
    """Place nodes and retry (random placement only) until connected.

    Uniform placement is deterministic, so a disconnected lattice is
    reported as infeasible immediately.
    """
    if placement_kind == "uniform":
        placement = place_uniform(n_nodes, side_m)
        graph = build_graph(placement, tx_range_m)
        if not is_connected(graph):
            raise TopologyInfeasibleError(
                f"uniform {n_nodes}-node lattice on {side_m} m side is disconnected "
                f"at range {tx_range_m} m"
            )
        return placement, graph
    if placement_kind != "random":
        raise PlacementError(f"unknown placement kind {placement_kind!r}")
    attempt_seeds = np.random.SeedSequence(seed).generate_state(max_attempts, np.uint64)
    for attempt in range(max_attempts):
        placement = place_random(n_nodes, side_m, int(attempt_seeds[attempt]))
        graph = build_graph(placement, tx_range_m)
        if is_connected(graph):
            return placement, graph
    raise TopologyInfeasibleError(
        f"no connected random placement of {n_nodes} nodes on {side_m} m side "
        f"within {max_attempts} attempts"
    )


def topology_to_json(
    placement: Placement,
    graph: MeshGraph,
    profile_names: list[str],
    tx_range_m: float,
    side_m: float,
    path,
) -> None:
    """Export node ids, positions, profiles and neighbor lists for plotting."""
    doc = {
        "side_m": side_m,
        "tx_range_m": tx_range_m,
        "nodes": [
            {
                "id": i,
                "x": placement.positions[i][0],
                "y": placement.positions[i][1],
                "profile": profile_names[i],
                "neighbors": list(graph.adjacency[i]),
            }
            for i in range(placement.n_nodes)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
