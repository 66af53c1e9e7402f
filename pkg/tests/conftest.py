"""Shared scenario builders for the test suite.

Everything here is deliberately tiny (a few thousand examples) so the suite
stays fast; full-scale runs live in test_acceptance.py only.
"""

from __future__ import annotations

import pytest

from streambench.config import (
    ClassSpec,
    DriftSpec,
    StreamConfig,
    TypeMix,
    validate_config,
)


def make_config(
    ratios=(0.8, 0.1, 0.1),
    mixes=None,
    n_subclusters=None,
    drifts=(),
    generator="old",
    distribution="uniform",
    length=4000,
    seed=7,
    radius=0.15,
    borderline_width=0.3,
):
    """Validated small scenario; class 0 is the majority."""
    n = len(ratios)
    if mixes is None:
        mixes = [TypeMix()] * n
    if n_subclusters is None:
        n_subclusters = [1] * n
    classes = tuple(
        ClassSpec(
            name=f"c{i}",
            role="majority" if i == 0 else "minority",
            ratio=ratios[i],
            type_proportions=mixes[i],
            n_subclusters=n_subclusters[i],
        )
        for i in range(n)
    )
    return validate_config(
        StreamConfig(
            classes=classes,
            drifts=tuple(drifts),
            generator=generator,
            distribution=distribution,
            length=length,
            seed=seed,
            radius=radius,
            borderline_width=borderline_width,
        )
    )


@pytest.fixture
def balanced_cfg():
    return make_config(ratios=(1 / 3, 1 / 3, 1 / 3), length=3000)


@pytest.fixture
def imbalanced_cfg():
    return make_config(ratios=(0.8, 0.1, 0.1), length=3000)


@pytest.fixture
def drift_cfg():
    drift = DriftSpec(
        kind="imbalance_ratio",
        from_value=(0.8, 0.1, 0.1),
        to_value=(0.34, 0.33, 0.33),
        t_start=1000,
        t_end=2000,
    )
    return make_config(ratios=(0.8, 0.1, 0.1), drifts=(drift,), length=3000)
