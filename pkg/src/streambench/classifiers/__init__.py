"""Online classifiers evaluated by the benchmark."""

from __future__ import annotations

from .bagging import (
    DEFAULT_LAMBDA_MAX,
    DEFAULT_N_MEMBERS,
    DEFAULT_THETA,
    ClassSizeTracker,
    OnlineBagging,
    bagging_lambda,
)
from .vfdt import Vfdt, hoeffding_bound

CLASSIFIER_NAMES = ("vfdt", "ob", "oob", "uob")


def make_classifier(name: str, n_classes: int, seed: int = 0, **kwargs):
    """Build a classifier by its benchmark name."""
    if name == "vfdt":
        kwargs.pop("n_members", None)
        return Vfdt(n_classes, **kwargs)
    if name in ("ob", "oob", "uob"):
        return OnlineBagging(name, n_classes, seed=seed, **kwargs)
    raise ValueError(
        f"unknown classifier {name!r}; expected one of {', '.join(CLASSIFIER_NAMES)}"
    )


__all__ = [
    "CLASSIFIER_NAMES",
    "ClassSizeTracker",
    "DEFAULT_LAMBDA_MAX",
    "DEFAULT_N_MEMBERS",
    "DEFAULT_THETA",
    "OnlineBagging",
    "Vfdt",
    "bagging_lambda",
    "hoeffding_bound",
    "make_classifier",
]
