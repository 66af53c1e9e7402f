"""Online bagging ensembles with optional resampling against class imbalance.

Each incoming example trains every ensemble member K ~ Poisson(lambda) times,
applied as a single weighted update (identical sufficient statistics, one
traversal instead of K).  Plain online bagging fixes lambda = 1.  The
oversampling variant boosts minority examples by lambda = w_max / w_y, the
undersampling variant throttles majority examples by lambda = w_min / w_y,
where w are time-decayed class size estimates.
"""

from __future__ import annotations

import pickle

import numpy as np

from .vfdt import Vfdt, _SERIES_MAGIC

DEFAULT_N_MEMBERS = 15
DEFAULT_THETA = 0.9
DEFAULT_LAMBDA_MAX = 10.0


class ClassSizeTracker:
    """Exponentially decayed per-class share of the stream.

    w_k <- theta * w_k + (1 - theta) * [y = k], renormalized to sum 1.
    Starts uniform so that lambda is well defined from the first example.
    """

    def __init__(self, n_classes: int, theta: float = DEFAULT_THETA):
        if not 0.0 < theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {theta}")
        self.theta = theta
        self.w = [1.0 / n_classes] * n_classes

    def update(self, y: int) -> None:
        th = self.theta
        w = self.w
        for k in range(len(w)):
            w[k] *= th
        w[y] += 1.0 - th
        total = sum(w)
        if total != 1.0:
            for k in range(len(w)):
                w[k] /= total


def bagging_lambda(variant: str, w, y: int, lambda_max: float = DEFAULT_LAMBDA_MAX) -> float:
    """Per-example Poisson rate for a bagging variant given class sizes w."""
    if variant == "ob":
        return 1.0
    wy = w[y]
    if variant == "oob":
        if wy <= 0.0:
            return lambda_max
        return min(max(w) / wy, lambda_max)
    if variant == "uob":
        if wy <= 0.0:
            return 1.0
        return min(w) / wy
    raise ValueError(f"unknown bagging variant {variant!r}")


class OnlineBagging:
    """Ensemble of Hoeffding trees trained by Poisson-weighted replication."""

    def __init__(
        self,
        variant: str,
        n_classes: int,
        n_attrs: int = 5,
        n_members: int = DEFAULT_N_MEMBERS,
        seed: int = 0,
        theta: float = DEFAULT_THETA,
        lambda_max: float = DEFAULT_LAMBDA_MAX,
        **tree_kwargs,
    ):
        if variant not in ("ob", "oob", "uob"):
            raise ValueError(f"unknown bagging variant {variant!r}")
        self.variant = variant
        self.n_classes = n_classes
        self.n_members = n_members
        self.lambda_max = lambda_max
        self.members = [Vfdt(n_classes, n_attrs, **tree_kwargs) for _ in range(n_members)]
        self.tracker = ClassSizeTracker(n_classes, theta)
        self._rng = np.random.default_rng(seed)
        self.n_trained = 0

    def predict(self, x) -> int:
        votes = [0] * self.n_classes
        for m in self.members:
            votes[m.predict(x)] += 1
        best = 0
        bv = votes[0]
        for c in range(1, self.n_classes):
            if votes[c] > bv:
                best = c
                bv = votes[c]
        return best

    def train(self, x, y: int) -> None:
        self.n_trained += 1
        self.tracker.update(y)
        lam = bagging_lambda(self.variant, self.tracker.w, y, self.lambda_max)
        ks = self._rng.poisson(lam, self.n_members)
        self._train_weighted(x, y, ks)

    def _train_weighted(self, x, y: int, ks) -> None:
        for m, k in zip(self.members, ks):
            if k:
                m.train(x, y, float(k))

    def to_bytes(self) -> bytes:
        return _SERIES_MAGIC + pickle.dumps(self, protocol=4)

    @staticmethod
    def from_bytes(blob: bytes) -> "OnlineBagging":
        if not blob.startswith(_SERIES_MAGIC):
            raise ValueError("not a classifier checkpoint (bad magic)")
        obj = pickle.loads(blob[len(_SERIES_MAGIC) :])
        if not isinstance(obj, OnlineBagging):
            raise ValueError("checkpoint does not contain an ensemble")
        return obj
