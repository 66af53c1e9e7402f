"""Results CSV parsing and figure rendering.

The expected schema is the benchmark's results file: a header of
``t,classifier,stream_id,recall_<name>...,gmean`` followed by one row per
(window point, classifier).  Metrics are the gmean column or any recall
column addressed as ``recall_<name>``.  The drift window, when one applies,
comes from the manifest.json sitting next to the results file; a missing
manifest or a stationary scenario simply means no shading.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# fixed colors so the same classifier looks the same across figures
CURVE_COLORS = {
    "vfdt": "#d62728",
    "ob": "#7f7f7f",
    "oob": "#1f77b4",
    "uob": "#2ca02c",
}
FALLBACK_CYCLE = ("#9467bd", "#8c564b", "#e377c2", "#17becf")


class ResultsError(ValueError):
    """Unusable results file or an unknown metric."""


def read_results(path):
    """Parse a results CSV into (stream_id, metric names, per-classifier rows).

    Returns (stream_id, metrics, series) where series maps classifier name to
    a list of (t, {metric: value}) in file order and metrics lists the
    plottable column names.  Missing recall cells (class absent from that
    window) are skipped for that point.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ResultsError(f"{path}: empty results file") from None
        if len(header) < 4 or header[:3] != ["t", "classifier", "stream_id"] or header[-1] != "gmean":
            raise ResultsError(
                f"{path}: unexpected header {','.join(header)}; "
                "expected t,classifier,stream_id,recall_...,gmean"
            )
        metric_names = header[3:]
        series: dict[str, list] = {}
        stream_id = None
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ResultsError(f"{path}: row with {len(row)} fields, header has {len(header)}")
            t = int(row[0])
            clf = row[1]
            if stream_id is None:
                stream_id = row[2]
            values = {}
            for name, cell in zip(metric_names, row[3:]):
                if cell != "":
                    values[name] = float(cell)
            series.setdefault(clf, []).append((t, values))
    if not series:
        raise ResultsError(f"{path}: results file has a header but no rows")
    return stream_id, metric_names, series


def find_drift_window(results_path, stream_id, manifest_path=None):
    """(t_start, t_end) of the scenario's drift, or None when stationary.

    Looks in the given manifest, or the manifest.json next to the results
    file.  Any missing piece (file, scenario entry, window) means None: a
    results CSV is complete without its manifest.
    """
    path = manifest_path or os.path.join(os.path.dirname(os.path.abspath(results_path)), "manifest.json")
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    info = manifest.get("scenarios", {}).get(stream_id)
    if not info:
        return None
    start, end = info.get("drift_start"), info.get("drift_end")
    if start is None or end is None:
        return None
    return int(start), int(end)


def render_metric(series, metric, metric_names, stream_id, drift_window=None, title=None):
    """Figure with one labeled curve per classifier for the chosen metric."""
    if metric not in metric_names:
        raise ResultsError(
            f"unknown metric {metric!r}; this file has {', '.join(metric_names)}"
        )
    fig, ax = plt.subplots(figsize=(9, 4.5))
    if drift_window is not None:
        ax.axvspan(drift_window[0], drift_window[1], color="0.85", zorder=0,
                   label="drift window")
    fallback = iter(FALLBACK_CYCLE)
    for clf, points in series.items():
        ts = [t for t, vals in points if metric in vals]
        ys = [vals[metric] for _, vals in points if metric in vals]
        color = CURVE_COLORS.get(clf) or next(fallback)
        ax.plot(ts, ys, label=clf, color=color, linewidth=1.2)
    ax.set_xlabel("examples")
    ax.set_ylabel(metric.replace("_", " "))
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title or f"{stream_id}: {metric.replace('_', ' ')}")
    ax.legend(loc="lower left", framealpha=0.9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_file(input_path, metric, out_path, manifest_path=None, title=None):
    """End-to-end: read the CSV, resolve the drift window, write the figure."""
    stream_id, metric_names, series = read_results(input_path)
    window = find_drift_window(input_path, stream_id, manifest_path)
    fig = render_metric(series, metric, metric_names, stream_id, window, title)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
