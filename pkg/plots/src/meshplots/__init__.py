"""Batch figure rendering for mesh-sensing run directories.

Consumes only the CSV/JSON files a run directory exports: topology JSON,
per-generation trace CSVs, results CSV, and the Pareto points/front CSVs.
Run directories are never modified.
"""

import matplotlib

matplotlib.use("Agg")

from .figures import plot_front, plot_series, plot_topology  # noqa: E402

__version__ = "0.1.0"

__all__ = ["plot_front", "plot_series", "plot_topology"]
