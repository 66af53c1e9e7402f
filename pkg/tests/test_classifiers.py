"""Tree and ensemble behavior: bounds, trackers, lambdas, determinism."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from streambench.classifiers import (
    CLASSIFIER_NAMES,
    ClassSizeTracker,
    OnlineBagging,
    Vfdt,
    bagging_lambda,
    hoeffding_bound,
    make_classifier,
)


def _labeled_cloud(n, seed=0):
    """x uniform in [0,1]^5, label = [x0 > 0.5]; cleanly separable."""
    rng = np.random.default_rng(seed)
    x = rng.random((n, 5))
    y = (x[:, 0] > 0.5).astype(int)
    return x.tolist(), y.tolist()


# ── Hoeffding bound ─────────────────────────────────────────────────────────


def test_hoeffding_bound_frozen_oracle():
    # sqrt(r^2 ln(1/delta) / (2n)) computed independently
    assert hoeffding_bound(1.0, 1e-7, 1000) == pytest.approx(0.0897721996248235, rel=1e-12)
    assert hoeffding_bound(2.0, 0.05, 500) == pytest.approx(0.10946656610223947, rel=1e-12)


@given(st.floats(0.5, 4.0), st.floats(1e-9, 0.1), st.integers(1, 10_000))
def test_hoeffding_bound_arithmetic(r, delta, n):
    eps = hoeffding_bound(r, delta, n)
    assert eps == pytest.approx(math.sqrt(r * r * math.log(1.0 / delta) / (2.0 * n)))
    # more evidence, tighter bound
    assert hoeffding_bound(r, delta, 4 * n) == pytest.approx(eps / 2.0)


# ── class size tracker ──────────────────────────────────────────────────────


def test_tracker_starts_uniform():
    t = ClassSizeTracker(4)
    assert t.w == [0.25] * 4


def test_tracker_single_update_oracle():
    t = ClassSizeTracker(2, theta=0.9)
    t.update(1)
    assert t.w == pytest.approx([0.45, 0.55])
    t.update(1)
    assert t.w == pytest.approx([0.405, 0.595])


def test_tracker_normalized():
    t = ClassSizeTracker(3, theta=0.9)
    rng = np.random.default_rng(31)
    for y in rng.integers(0, 3, 500):
        t.update(int(y))
        assert sum(t.w) == pytest.approx(1.0)


def test_tracker_converges_to_stream_share():
    t = ClassSizeTracker(2, theta=0.9)
    for _ in range(300):
        t.update(0)
    assert t.w[0] > 0.99


def test_tracker_theta_validated():
    with pytest.raises(ValueError):
        ClassSizeTracker(2, theta=1.0)
    with pytest.raises(ValueError):
        ClassSizeTracker(2, theta=0.0)


# ── resampling rates ────────────────────────────────────────────────────────


def test_lambda_oracles():
    w = [0.8, 0.1, 0.1]
    assert bagging_lambda("ob", w, 0) == 1.0
    assert bagging_lambda("ob", w, 1) == 1.0
    assert bagging_lambda("oob", w, 1) == pytest.approx(8.0)
    assert bagging_lambda("oob", w, 0) == pytest.approx(1.0)
    assert bagging_lambda("uob", w, 0) == pytest.approx(0.125)
    assert bagging_lambda("uob", w, 1) == pytest.approx(1.0)


def test_lambda_capped_and_degenerate():
    assert bagging_lambda("oob", [0.99, 0.01], 1) == 10.0  # 99 capped
    assert bagging_lambda("oob", [1.0, 0.0], 1) == 10.0
    assert bagging_lambda("uob", [1.0, 0.0], 1) == 1.0
    assert bagging_lambda("uob", [1.0, 0.0], 0) == 0.0


def test_lambda_uniform_tracker_is_one_for_all_variants():
    for n in (2, 3, 5):
        w = [1.0 / n] * n
        for variant in ("ob", "oob", "uob"):
            for y in range(n):
                assert bagging_lambda(variant, w, y) == pytest.approx(1.0)


def test_lambda_unknown_variant():
    with pytest.raises(ValueError, match="variant"):
        bagging_lambda("boosting", [0.5, 0.5], 0)


# ── tree behavior ───────────────────────────────────────────────────────────


def test_tree_learns_separable_rule():
    x, y = _labeled_cloud(3000)
    tree = Vfdt(n_classes=2)
    for xi, yi in zip(x, y):
        tree.train(xi, yi)
    assert tree.n_splits >= 1
    xt, yt = _labeled_cloud(500, seed=1)
    acc = sum(tree.predict(xi) == yi for xi, yi in zip(xt, yt)) / len(yt)
    assert acc > 0.95


def test_tree_is_deterministic():
    x, y = _labeled_cloud(1500, seed=2)
    a, b = Vfdt(2), Vfdt(2)
    for xi, yi in zip(x, y):
        a.train(xi, yi)
        b.train(xi, yi)
    xt, _ = _labeled_cloud(300, seed=3)
    assert [a.predict(xi) for xi in xt] == [b.predict(xi) for xi in xt]
    assert a.n_splits == b.n_splits


def test_weighted_train_equals_repetition():
    x, y = _labeled_cloud(400, seed=4)
    once = Vfdt(2, grace_period=10**9)  # no splits: compare raw leaf statistics
    twice = Vfdt(2, grace_period=10**9)
    for xi, yi in zip(x, y):
        once.train(xi, yi, w=2.0)
        twice.train(xi, yi)
        twice.train(xi, yi)
    ra, rb = once._root, twice._root
    assert ra.counts == pytest.approx(rb.counts)
    assert ra.weight == pytest.approx(rb.weight)
    for a in range(5):
        for c in range(2):
            assert ra.stats[a][c][0] == pytest.approx(rb.stats[a][c][0])
            assert ra.stats[a][c][1] == pytest.approx(rb.stats[a][c][1])
            assert ra.stats[a][c][2] == pytest.approx(rb.stats[a][c][2])


def test_untrained_tree_predicts_class_zero():
    assert Vfdt(3).predict([0.5] * 5) == 0


def test_leaf_naive_bayes_uses_gaussians():
    # equal counts, distinct means: the nearer class must win inside one leaf
    tree = Vfdt(2, grace_period=10**9)
    rng = np.random.default_rng(32)
    for _ in range(200):
        tree.train([0.2 + 0.02 * rng.standard_normal()] * 5, 0)
        tree.train([0.8 + 0.02 * rng.standard_normal()] * 5, 1)
    assert tree.predict([0.25] * 5) == 0
    assert tree.predict([0.75] * 5) == 1


# ── ensembles ───────────────────────────────────────────────────────────────


def test_ensemble_same_seed_reproducible():
    x, y = _labeled_cloud(800, seed=5)
    a = OnlineBagging("oob", 2, seed=9)
    b = OnlineBagging("oob", 2, seed=9)
    for xi, yi in zip(x, y):
        a.train(xi, yi)
        b.train(xi, yi)
    xt, _ = _labeled_cloud(200, seed=6)
    assert [a.predict(xi) for xi in xt] == [b.predict(xi) for xi in xt]


def test_uob_starves_on_single_class_stream():
    # the unseen class's tracked share decays geometrically, so lambda for
    # the majority collapses and members stop training after the transient
    clf = OnlineBagging("uob", 2, seed=1)
    for _ in range(100):
        clf.train([0.5] * 5, 0)
    after_transient = [m.n_trained for m in clf.members]
    for _ in range(200):
        clf.train([0.5] * 5, 0)
    assert [m.n_trained for m in clf.members] == after_transient
    assert bagging_lambda("uob", clf.tracker.w, 0) < 1e-10


def test_ob_members_train_at_unit_rate():
    clf = OnlineBagging("ob", 2, seed=2)
    x, y = _labeled_cloud(1000, seed=7)
    for xi, yi in zip(x, y):
        clf.train(xi, yi)
    # K ~ Poisson(1) applied as one weighted update: total absorbed weight
    # per member stays near one per example, call count near 1 - 1/e
    weights = [sum(m._global_counts) / 1000 for m in clf.members]
    assert 0.9 < sum(weights) / len(weights) < 1.1
    calls = [m.n_trained / 1000 for m in clf.members]
    assert 0.55 < sum(calls) / len(calls) < 0.72


def test_ensemble_learns_separable_rule():
    x, y = _labeled_cloud(2000, seed=8)
    clf = OnlineBagging("ob", 2, seed=3)
    for xi, yi in zip(x, y):
        clf.train(xi, yi)
    xt, yt = _labeled_cloud(400, seed=9)
    acc = sum(clf.predict(xi) == yi for xi, yi in zip(xt, yt)) / len(yt)
    assert acc > 0.95


def test_ensemble_vote_tie_breaks_low_class():
    clf = OnlineBagging("ob", 3, n_members=2, seed=4)
    assert clf.predict([0.5] * 5) == 0


def test_unknown_variant_rejected():
    with pytest.raises(ValueError, match="variant"):
        OnlineBagging("smote", 2)


# ── registry and checkpoints ────────────────────────────────────────────────


def test_registry_names():
    assert CLASSIFIER_NAMES == ("vfdt", "ob", "oob", "uob")
    assert isinstance(make_classifier("vfdt", 3), Vfdt)
    for name in ("ob", "oob", "uob"):
        clf = make_classifier(name, 3, seed=5)
        assert isinstance(clf, OnlineBagging)
        assert clf.variant == name
    with pytest.raises(ValueError, match="unknown classifier"):
        make_classifier("hat", 3)


def test_vfdt_ignores_ensemble_kwargs():
    assert isinstance(make_classifier("vfdt", 2, n_members=7), Vfdt)


def test_tree_checkpoint_roundtrip():
    x, y = _labeled_cloud(1200, seed=10)
    tree = Vfdt(2)
    for xi, yi in zip(x, y):
        tree.train(xi, yi)
    clone = Vfdt.from_bytes(tree.to_bytes())
    xt, _ = _labeled_cloud(300, seed=11)
    assert [clone.predict(xi) for xi in xt] == [tree.predict(xi) for xi in xt]


def test_ensemble_checkpoint_roundtrip():
    x, y = _labeled_cloud(600, seed=12)
    clf = OnlineBagging("uob", 2, seed=6)
    for xi, yi in zip(x, y):
        clf.train(xi, yi)
    clone = OnlineBagging.from_bytes(clf.to_bytes())
    xt, _ = _labeled_cloud(200, seed=13)
    assert [clone.predict(xi) for xi in xt] == [clf.predict(xi) for xi in xt]


def test_checkpoint_magic_checked():
    with pytest.raises(ValueError, match="magic"):
        Vfdt.from_bytes(b"garbage")
    with pytest.raises(ValueError, match="tree"):
        Vfdt.from_bytes(OnlineBagging("ob", 2).to_bytes())
