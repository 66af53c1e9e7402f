"""Example-type identification from local neighborhoods.

An example's difficulty type follows from how many of its k=5 nearest
neighbors (Euclidean distance on the raw attributes, which already share the
[0,1] scale) belong to its own class: 5 or 4 agreeing neighbors mark a Safe
example, 3 or 2 Borderline, exactly 1 Rare, none Outlier.  Applied over
consecutive windows this turns an arbitrary labeled stream into a time series
of per-class type distributions, which is how generator output gets
cross-validated against its configuration.

Neighbor ties at equal distance are broken by the lower example index inside
the window, so tags are invariant to shuffling as long as indices travel with
the examples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LABEL_SAFE = 0
LABEL_BORDERLINE = 1
LABEL_RARE = 2
LABEL_OUTLIER = 3
LABEL_NAMES = ("safe", "borderline", "rare", "outlier")

DEFAULT_K = 5
DEFAULT_WINDOW = 1000


def knn(points, query, k: int, self_index: int | None = None):
    """Indices of the k nearest points to query, nearest first.

    Pass self_index when the query is a member of the point set so it is
    excluded from its own neighborhood.  Distance ties resolve to the lower
    index.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    needed = k + (1 if self_index is not None else 0)
    if n < needed:
        raise ValueError(f"need at least {needed} points for k={k}, got {n}")
    q = np.asarray(query, dtype=float)
    d2 = ((pts - q) ** 2).sum(axis=1)
    if self_index is not None:
        d2[self_index] = np.inf
    order = np.argsort(d2, kind="stable")
    return [int(i) for i in order[:k]]


def label_types(window_x, window_y, k: int = DEFAULT_K):
    """Per-example type codes for one window (array of LABEL_* ints)."""
    x = np.asarray(window_x, dtype=float)
    y = np.asarray(window_y)
    n = len(y)
    if n < k + 1:
        raise ValueError(f"window needs at least {k + 1} examples, got {n}")
    # Pairwise differences rather than the dot-product expansion: bitwise
    # identical to the per-pair distance a brute-force scan computes, so
    # tie-breaking agrees exactly.
    d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    same = (y[order] == y[:, None]).sum(axis=1)
    codes = np.where(same >= 4, LABEL_SAFE,
                     np.where(same >= 2, LABEL_BORDERLINE,
                              np.where(same == 1, LABEL_RARE, LABEL_OUTLIER)))
    return codes.astype(np.int8)


def type_distribution(tags, window_y, cls):
    """(safe, borderline, rare, outlier) proportions for one class.

    Returns None when the class has no examples in the window; an absent
    class has no distribution, and a zero vector would be indistinguishable
    from a real measurement.
    """
    tags = np.asarray(tags)
    y = np.asarray(window_y)
    mask = y == cls
    total = int(mask.sum())
    if total == 0:
        return None
    counts = np.bincount(tags[mask], minlength=4)
    return tuple(counts[i] / total for i in range(4))


@dataclass(frozen=True)
class TypeHistogram:
    """Per-class type counts over one window of the stream."""

    window_start: int  # 1-based t of the first example
    window_end: int  # 1-based t of the last example
    counts: dict  # class index -> (safe, borderline, rare, outlier) counts

    def proportions(self, cls):
        c = self.counts.get(cls)
        if c is None:
            return None
        total = sum(c)
        return tuple(v / total for v in c)


def label_windows(x, y, k: int = DEFAULT_K, window: int = DEFAULT_WINDOW):
    """Tag consecutive windows of a stream; returns a TypeHistogram per window.

    The trailing partial window is kept when it still has enough examples to
    define k neighbors, otherwise it is folded into nothing (dropped).
    """
    y = np.asarray(y)
    n = len(y)
    out = []
    for start in range(0, n, window):
        end = min(start + window, n)
        if end - start < k + 1:
            break
        tags = label_types(x[start:end], y[start:end], k)
        counts = {}
        for cls in np.unique(y[start:end]):
            sub = np.bincount(tags[y[start:end] == cls], minlength=4)
            counts[int(cls)] = tuple(int(v) for v in sub)
        out.append(TypeHistogram(window_start=start + 1, window_end=end, counts=counts))
    return out


def write_type_distribution_csv(path, histograms, class_names) -> None:
    """Time series of per-class type proportions, one row per (window, class)."""
    lines = ["window_end,class,safe,borderline,rare,outlier"]
    for h in histograms:
        for cls in sorted(h.counts):
            props = h.proportions(cls)
            name = class_names[cls] if cls < len(class_names) else str(cls)
            vals = ",".join(f"{p:.6f}" for p in props)
            lines.append(f"{h.window_end},{name},{vals}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
