"""The figure kinds a run directory supports.

Every figure is deterministic: fixed camera angles, no randomness, colors
keyed by sorted profile names.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.lines import Line2D
from matplotlib.patches import Circle

from .io import (
    find_topology,
    find_trace,
    load_convergence_generation,
    load_points_csv,
    load_series,
    load_thresholds,
    load_topology,
)

VIEW_ANGLES = ((30, -60), (25, 45), (15, 150))

PROFILE_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:purple", "tab:brown", "tab:cyan")


class TooFewFrontPointsError(ValueError):
    pass


def plot_topology(run_dir, out) -> tuple[list[Path], dict]:
    """Network figure: profile-colored nodes, edges, dotted range circles."""
    run_dir = Path(run_dir)
    doc = load_topology(find_topology(run_dir))
    nodes = doc["nodes"]
    side = doc["side_m"]
    tx_range = doc["tx_range_m"]

    fig, ax = plt.subplots(figsize=(8, 8))
    for node in nodes:
        for neighbor in node["neighbors"]:
            if neighbor > node["id"]:
                other = nodes[neighbor]
                ax.plot(
                    [node["x"], other["x"]],
                    [node["y"], other["y"]],
                    color="0.6",
                    linewidth=0.6,
                    zorder=1,
                )
        ax.add_patch(
            Circle(
                (node["x"], node["y"]),
                tx_range,
                fill=False,
                linestyle=":",
                edgecolor="red",
                linewidth=0.5,
                alpha=0.5,
                zorder=0,
            )
        )
    profiles = sorted({node["profile"] for node in nodes})
    color_of = {name: PROFILE_COLORS[i % len(PROFILE_COLORS)] for i, name in enumerate(profiles)}
    n_markers = 0
    for name in profiles:
        xs = [n["x"] for n in nodes if n["profile"] == name]
        ys = [n["y"] for n in nodes if n["profile"] == name]
        ax.scatter(xs, ys, s=40, color=color_of[name], label=name, zorder=2)
        n_markers += len(xs)
    ax.set_xlim(-tx_range * 0.2, side + tx_range * 0.2)
    ax.set_ylim(-tx_range * 0.2, side + tx_range * 0.2)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"{len(nodes)}-node mesh, {tx_range:g} m transmission range")
    ax.legend(loc="upper right", fontsize=8)
    out = Path(out)
    fig.savefig(out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [out], {"n_markers": n_markers, "n_profiles": len(profiles)}


def plot_series(run_dir, out) -> tuple[list[Path], dict]:
    """Per-generation reliability, energy, and accuracy figures."""
    run_dir = Path(run_dir)
    trace_path = find_trace(run_dir)
    series = load_series(trace_path)
    thresholds = load_thresholds(run_dir)
    convergence_gen = load_convergence_generation(run_dir, trace_path.stem)
    generations = series["generation"]
    out = Path(out)
    paths = []

    def save(fig, suffix):
        path = out.with_name(f"{out.stem}_{suffix}{out.suffix or '.png'}")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, style in (("reliability_min", ":"), ("reliability_avg", "-"), ("reliability_max", "--")):
        ax.plot(generations, series[key], style, label=key.split("_")[1])
    ax.set_xlabel("generation")
    ax.set_ylabel("reliability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Reliability per generation")
    ax.legend()
    save(fig, "reliability")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(generations, series["energy_j"], "-o", markersize=3)
    ax.set_xlabel("generation")
    ax.set_ylabel("energy per node (J)")
    ax.set_title("Energy consumed per generation")
    save(fig, "energy")

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, style in (("accuracy_min", ":"), ("accuracy_avg", "-"), ("accuracy_max", "--")):
        ax.plot(generations, series[key], style, label=key.split("_")[1])
    if thresholds is not None:
        psi, theta = thresholds
        ax.axhline(psi, color="tab:red", linewidth=0.8, linestyle="-.", label=f"avg threshold {psi:g}")
        ax.axhline(theta, color="tab:gray", linewidth=0.8, linestyle="-.", label=f"min threshold {theta:g}")
    if convergence_gen is not None:
        ax.axvline(convergence_gen, color="tab:green", linewidth=0.8, label=f"converged at {convergence_gen}")
    ax.set_xlabel("generation")
    ax.set_ylabel("model accuracy")
    ax.set_ylim(-0.02, 1.05)
    ax.set_title("Accuracy per generation")
    ax.legend(fontsize=8)
    save(fig, "accuracy")

    return paths, {"n_generations": len(generations), "convergence_generation": convergence_gen}


def plot_front(points_csv, front_csv, out, with_mesh: bool = False) -> tuple[list[Path], dict]:
    """3-D objective scatter with the Pareto front outlined, three angles.

    Mesh mode drapes a triangulated surface over the front: Delaunay in the
    (energy, latency) plane with reliability as height. Purely cosmetic.
    """
    points = load_points_csv(points_csv)
    front = load_points_csv(front_csv)
    n_front = len(front["row_id"])
    triangles = None
    if with_mesh:
        if n_front < 3:
            raise TooFewFrontPointsError(
                f"front surface needs at least 3 points, found {n_front}"
            )
        from scipy.spatial import Delaunay, QhullError

        try:
            triangles = Delaunay(np.column_stack([front["energy_j"], front["latency_gens"]]))
        except QhullError:
            warnings.warn("degenerate front geometry; rendering scatter without surface")
            triangles = None

    out = Path(out)
    paths = []
    for i, (elev, azim) in enumerate(VIEW_ANGLES, start=1):
        fig = plt.figure(figsize=(8, 6.5))
        ax = fig.add_subplot(projection="3d")
        scatter = ax.scatter(
            points["energy_j"],
            points["latency_gens"],
            points["reliability"],
            c=points["score"],
            cmap="viridis",
            vmin=0.0,
            vmax=1.0,
            s=22,
            depthshade=False,
        )
        ax.scatter(
            front["energy_j"],
            front["latency_gens"],
            front["reliability"],
            facecolors="none",
            edgecolors="red",
            linewidths=1.2,
            s=70,
            depthshade=False,
        )
        if triangles is not None:
            ax.plot_trisurf(
                front["energy_j"],
                front["latency_gens"],
                front["reliability"],
                triangles=triangles.simplices,
                color="tab:red",
                alpha=0.25,
                linewidth=0.2,
            )
        fig.colorbar(scatter, ax=ax, shrink=0.6, label="performance score")
        ax.set_xlabel("energy per node per generation (J)")
        ax.set_ylabel("latency (generations)")
        ax.set_zlabel("reliability")
        ax.view_init(elev=elev, azim=azim)
        path = out.with_name(f"{out.stem}_angle{i}{out.suffix or '.png'}")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths, {
        "n_points": len(points["row_id"]),
        "n_outlined": n_front,
        "with_mesh": triangles is not None,
    }
