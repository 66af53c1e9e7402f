"""Plotting for benchmark results files.

Reads the documented results CSV schema (t, classifier, stream_id, per-class
recalls, gmean) and renders one labeled curve per classifier for a chosen
metric.  The results file is the only contract with the benchmark that
produced it; nothing here imports benchmark code.
"""

from .render import ResultsError, find_drift_window, read_results, render_metric

__version__ = "0.1.0"

__all__ = ["ResultsError", "find_drift_window", "read_results", "render_metric"]
