"""Grid orchestration: streams x classifiers, cached, with a run manifest.

Each scenario's stream is generated once and cached on disk keyed by the
config hash, so evaluating four classifiers costs one generation.  Cells are
independent (own classifier, own derived seed) and may run in a worker pool;
all result files are written to a temp file first and renamed into place so a
crashed run never leaves a truncated CSV behind.  Failures of individual
cells are recorded in the manifest instead of aborting the rest of the grid.
"""

from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .classifiers import make_classifier
from .config import ValidatedConfig, config_hash, serialize
from .evaluation import (
    DEFAULT_WINDOW,
    EvalSeries,
    prequential_run,
    render_results_csv,
    render_snapshot_csv,
)
from .generator import StreamArrays, generate_stream_arrays

CACHE_ENV = "STREAMBENCH_CACHE"


def atomic_write_text(path, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def resolve_cache_dir(out_dir, override=None) -> str:
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    if override:
        return str(override)
    return os.path.join(str(out_dir), "streams")


def stream_cache_path(cfg: ValidatedConfig, cache_dir) -> str:
    return os.path.join(str(cache_dir), f"{config_hash(cfg)}.npz")


def ensure_stream(cfg: ValidatedConfig, cache_dir) -> str:
    """Generate the stream unless an identically configured one is cached."""
    path = stream_cache_path(cfg, cache_dir)
    if os.path.exists(path):
        return path
    os.makedirs(str(cache_dir), exist_ok=True)
    arrays = generate_stream_arrays(cfg)
    fd, tmp = tempfile.mkstemp(dir=str(cache_dir), suffix=".npz.tmp")
    os.close(fd)
    try:
        with open(tmp, "wb") as fh:
            np.savez_compressed(
                fh,
                x=arrays.x,
                y=arrays.y,
                gen_type=arrays.gen_type,
                class_names=np.array(arrays.class_names),
                config=np.array(serialize(cfg)),
            )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_stream(path) -> StreamArrays:
    with np.load(path) as z:
        return StreamArrays(
            x=z["x"],
            y=z["y"],
            gen_type=z["gen_type"],
            class_names=tuple(str(n) for n in z["class_names"]),
            stats={},
        )


def classifier_seed(stream_hash: str, name: str) -> int:
    """Stable per-cell seed independent of grid order."""
    digest = hashlib.sha256(f"{stream_hash}:{name}".encode()).hexdigest()
    return int(digest[:8], 16)


def _run_cell(stream_path, clf_name, n_classes, seed, window):
    arrays = load_stream(stream_path)
    clf = make_classifier(clf_name, n_classes, seed=seed)
    t0 = time.perf_counter()
    series = prequential_run(arrays, clf, window)
    return series, time.perf_counter() - t0


def _cell_task(args):
    scenario_id, stream_path, clf_name, n_classes, seed, window = args
    try:
        series, secs = _run_cell(stream_path, clf_name, n_classes, seed, window)
        return scenario_id, clf_name, series.points, secs, None
    except Exception as exc:  # recorded in the manifest, grid keeps going
        return scenario_id, clf_name, None, 0.0, f"{type(exc).__name__}: {exc}"


def run_grid(
    scenarios,
    out_dir,
    classifiers=("vfdt", "ob", "oob", "uob"),
    window: int = DEFAULT_WINDOW,
    jobs: int = 1,
    cache_dir=None,
):
    """Run every (scenario, classifier) cell; returns the manifest dict.

    scenarios: list of (scenario_id, ValidatedConfig).
    """
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    cache = resolve_cache_dir(out_dir, cache_dir)

    manifest = {
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "window": window,
        "classifiers": list(classifiers),
        "scenarios": {},
        "cells": [],
    }

    # streams first: generation is cheap and serial, cells reuse the cache
    stream_paths = {}
    for scenario_id, cfg in scenarios:
        path = ensure_stream(cfg, cache)
        stream_paths[scenario_id] = path
        dw = cfg.drift_window
        manifest["scenarios"][scenario_id] = {
            "stream_hash": config_hash(cfg),
            "seed": cfg.seed,
            "length": cfg.length,
            "n_classes": cfg.n_classes,
            "drift_start": dw[0] if dw else None,
            "drift_end": dw[1] if dw else None,
            "results_csv": os.path.join(out_dir, f"{scenario_id}_results.csv"),
            "snapshots_csv": os.path.join(out_dir, f"{scenario_id}_snapshots.csv"),
        }

    tasks = []
    for scenario_id, cfg in scenarios:
        h = config_hash(cfg)
        for name in classifiers:
            tasks.append(
                (
                    scenario_id,
                    stream_paths[scenario_id],
                    name,
                    cfg.n_classes,
                    classifier_seed(h, name),
                    window,
                )
            )

    outcomes = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_task, tasks))
    else:
        results = [_cell_task(t) for t in tasks]
    for scenario_id, clf_name, points, secs, error in results:
        outcomes[(scenario_id, clf_name)] = (points, secs, error)

    ok = True
    for scenario_id, cfg in scenarios:
        series_by_clf = {}
        for name in classifiers:
            points, secs, error = outcomes[(scenario_id, name)]
            cell = {
                "scenario": scenario_id,
                "classifier": name,
                "seed": classifier_seed(config_hash(cfg), name),
                "wall_seconds": round(secs, 3),
                "status": "ok" if error is None else "error",
            }
            if error is not None:
                cell["error"] = error
                ok = False
            else:
                series_by_clf[name] = EvalSeries(window=window, points=points)
            manifest["cells"].append(cell)

        if series_by_clf:
            info = manifest["scenarios"][scenario_id]
            atomic_write_text(
                info["results_csv"], render_results_csv(series_by_clf, scenario_id, cfg.class_names)
            )
            atomic_write_text(info["snapshots_csv"], render_snapshot_csv(series_by_clf, scenario_id))

    manifest["ok"] = ok
    atomic_write_text(
        os.path.join(out_dir, "manifest.json"), json.dumps(manifest, indent=2) + "\n"
    )
    return manifest
