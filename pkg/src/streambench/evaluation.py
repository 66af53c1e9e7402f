"""Test-then-train evaluation over a sliding window.

Every example is first predicted, the (true, predicted) pair enters a ring
buffer of the last W pairs, and only then is the example used for training.
Every W examples the current window yields one series point: per-class recall
and the geometric mean of the recalls of the classes present in the window.
Classes absent from a window are excluded from the G-mean rather than counted
as zero; at a 1% class ratio a 1000-example window can easily contain no
minority example and a hard zero would say nothing about the classifier.

Snapshot points follow the reporting convention used throughout: settled
early-stream performance (t=50_000, past every classifier's cold start and
before the earliest drift onset), just before the drift window (70_000), at
its end (100_000), and the final window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_WINDOW = 1000

SNAPSHOT_START = 50_000
SNAPSHOT_PRE = 70_000
SNAPSHOT_POST = 100_000


def gmean(recalls) -> float:
    """Geometric mean of the given recalls: (prod r_k)^(1/len)."""
    acc = 0.0
    n = 0
    for r in recalls:
        if r < 0.0 or r > 1.0:
            raise ValueError(f"recall out of [0, 1]: {r}")
        if r == 0.0:
            return 0.0
        acc += math.log(r)
        n += 1
    if n == 0:
        return 0.0
    return math.exp(acc / n)


class WindowedConfusion:
    """Ring buffer of the last W (true, predicted) pairs with running counters."""

    def __init__(self, n_classes: int, window: int = DEFAULT_WINDOW):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.n_classes = n_classes
        self.window = window
        self._true = [0] * window
        self._pred = [0] * window
        self._pos = 0
        self.count = 0
        self.tp = [0] * n_classes
        self.support = [0] * n_classes

    def add(self, y_true: int, y_pred: int) -> None:
        pos = self._pos
        if self.count == self.window:
            ot = self._true[pos]
            self.support[ot] -= 1
            if ot == self._pred[pos]:
                self.tp[ot] -= 1
        else:
            self.count += 1
        self._true[pos] = y_true
        self._pred[pos] = y_pred
        self.support[y_true] += 1
        if y_true == y_pred:
            self.tp[y_true] += 1
        self._pos = (pos + 1) % self.window

    def recalls(self):
        """Per-class recall; None marks a class absent from the window."""
        out = []
        for c in range(self.n_classes):
            s = self.support[c]
            out.append(self.tp[c] / s if s > 0 else None)
        return tuple(out)

    def gmean(self) -> float:
        return gmean([r for r in self.recalls() if r is not None])


def recall_per_class(confusion: WindowedConfusion):
    return confusion.recalls()


@dataclass
class EvalSeries:
    """Windowed metric series for one (stream, classifier) pair."""

    window: int
    points: list = field(default_factory=list)  # (t, recalls tuple, gmean)

    def gmean_at(self, t: int):
        for pt, _, g in self.points:
            if pt == t:
                return g
        return None

    @property
    def snapshots(self) -> dict:
        """G-mean at the four reporting points (missing markers map to None)."""
        out = {
            "start": self.gmean_at(SNAPSHOT_START),
            "pre": self.gmean_at(SNAPSHOT_PRE),
            "post": self.gmean_at(SNAPSHOT_POST),
            "end": self.points[-1][2] if self.points else None,
        }
        return out

    def mean_gmean(self, after: int = 0) -> float:
        vals = [g for t, _, g in self.points if t > after]
        if not vals:
            raise ValueError(f"no series points after t={after}")
        return sum(vals) / len(vals)


def prequential_run(stream, classifier, window: int = DEFAULT_WINDOW) -> EvalSeries:
    """Predict, record, train; one series point per full window stride."""
    if hasattr(stream, "x"):
        xs = stream.x.tolist()
        ys = stream.y.tolist()
    else:
        xs = []
        ys = []
        for ex in stream:
            xs.append(list(ex.x))
            ys.append(ex.y)
    n = len(ys)
    if n < window:
        raise ValueError(f"stream length {n} is shorter than the window {window}")

    n_classes = max(ys) + 1
    if hasattr(classifier, "n_classes") and classifier.n_classes > n_classes:
        n_classes = classifier.n_classes
    conf = WindowedConfusion(n_classes, window)
    series = EvalSeries(window=window)
    predict = classifier.predict
    train = classifier.train
    add = conf.add

    stride = window
    for i in range(n):
        xi = xs[i]
        yi = ys[i]
        add(yi, predict(xi))
        train(xi, yi)
        stride -= 1
        if stride == 0:
            stride = window
            series.points.append((i + 1, conf.recalls(), conf.gmean()))
    return series


# ── result files ───────────────────────────────────────────────────────


def render_results_csv(series_by_classifier: dict, stream_id: str, class_names) -> str:
    """One row per (window point, classifier): t,classifier,stream_id,recalls...,gmean."""
    cols = ",".join(f"recall_{name}" for name in class_names)
    lines = [f"t,classifier,stream_id,{cols},gmean"]
    for clf_name, series in series_by_classifier.items():
        for t, recalls, g in series.points:
            rec = ",".join("" if r is None else f"{r:.6f}" for r in recalls)
            lines.append(f"{t},{clf_name},{stream_id},{rec},{g:.6f}")
    return "\n".join(lines) + "\n"


def render_snapshot_csv(series_by_classifier: dict, stream_id: str) -> str:
    """G-mean at the four reporting points, one row per classifier."""
    lines = ["stream_id,classifier,start,pre,post,end"]
    for clf_name, series in series_by_classifier.items():
        snaps = series.snapshots
        vals = ",".join(
            "" if snaps[k] is None else f"{snaps[k]:.6f}" for k in ("start", "pre", "post", "end")
        )
        lines.append(f"{stream_id},{clf_name},{vals}")
    return "\n".join(lines) + "\n"


def write_results_csv(path, series_by_classifier: dict, stream_id: str, class_names) -> None:
    with open(path, "w") as fh:
        fh.write(render_results_csv(series_by_classifier, stream_id, class_names))


def write_snapshot_csv(path, series_by_classifier: dict, stream_id: str) -> None:
    with open(path, "w") as fh:
        fh.write(render_snapshot_csv(series_by_classifier, stream_id))
