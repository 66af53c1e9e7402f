"""Full-scale benchmark gate, one test per criterion.

Every scenario here runs full-length (200k/250k examples), so results are
cached under .acceptance/<scenario>/ keyed by the config hash: a scenario is
re-run only when its config (or the generator seed chain behind it) changes.
Wall-clock limits are asserted from the recorded manifests.  Set
STREAMBENCH_ACCEPT_DIR to relocate the cache.

The numeric targets mirror the published behavior of the four classifiers on
these stream families; the property suites referenced by the final test live
in the rest of tests/.
"""

from __future__ import annotations

import json
import os

import pytest

from streambench.cli import resolve_configs
from streambench.config import config_hash
from streambench.evaluation import EvalSeries
from streambench.runner import run_grid

CLASSIFIERS = ("vfdt", "ob", "oob", "uob")
BURN_IN = 20_000  # windowed means are taken after the first 20k examples

SCENARIOS = (
    "balanced",
    "imb_0.03_0.03",
    "bord_20_20",
    "bord_40_40",
    "bord_60_60",
    "bord_80_80",
    "bord_100_100",
    "rare_40_40",
    "rare_60_60",
    "rare_80_80",
    "rare_100_100",
    "split_5_5",
    "move_5_5",
    "rared_60_60",
    "split_5_5_rared_60_60",
)

ACCEPT_DIR = os.environ.get(
    "STREAMBENCH_ACCEPT_DIR",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), ".acceptance"),
)


def _load_series(results_csv: str) -> dict[str, EvalSeries]:
    out: dict[str, EvalSeries] = {}
    with open(results_csv) as fh:
        header = fh.readline().strip().split(",")
        n_rec = len(header) - 4  # t, classifier, stream_id, ..., gmean
        for line in fh:
            parts = line.strip().split(",")
            t = int(parts[0])
            clf = parts[1]
            recalls = tuple(float(v) if v else None for v in parts[3 : 3 + n_rec])
            g = float(parts[-1])
            out.setdefault(clf, EvalSeries(window=1000)).points.append((t, recalls, g))
    return out


def _scenario_fresh(sdir: str, cfg) -> bool:
    mpath = os.path.join(sdir, "manifest.json")
    if not os.path.exists(mpath):
        return False
    with open(mpath) as fh:
        manifest = json.load(fh)
    info = next(iter(manifest["scenarios"].values()), None)
    if info is None or info["stream_hash"] != config_hash(cfg):
        return False
    if not manifest.get("ok"):
        return False
    cells = {c["classifier"]: c for c in manifest["cells"]}
    if set(cells) != set(CLASSIFIERS):
        return False
    return os.path.exists(info["results_csv"])


@pytest.fixture(scope="session")
def grid():
    """{scenario: {classifier: EvalSeries}} plus per-cell wall seconds."""
    os.makedirs(ACCEPT_DIR, exist_ok=True)
    cache = os.path.join(ACCEPT_DIR, "streams")
    series: dict[str, dict[str, EvalSeries]] = {}
    walls: dict[tuple[str, str], float] = {}
    for sid in SCENARIOS:
        [(_, cfg)] = resolve_configs(sid)
        sdir = os.path.join(ACCEPT_DIR, sid)
        if not _scenario_fresh(sdir, cfg):
            run_grid([(sid, cfg)], sdir, classifiers=CLASSIFIERS, cache_dir=cache)
        with open(os.path.join(sdir, "manifest.json")) as fh:
            manifest = json.load(fh)
        assert manifest["ok"], f"grid cells failed for {sid}"
        for cell in manifest["cells"]:
            walls[(sid, cell["classifier"])] = cell["wall_seconds"]
        series[sid] = _load_series(os.path.join(sdir, f"{sid}_results.csv"))
    series["_walls"] = walls
    return series


def _means(grid, sid):
    return {c: grid[sid][c].mean_gmean(after=BURN_IN) for c in CLASSIFIERS}


def _snaps(grid, sid, clf):
    return grid[sid][clf].snapshots


def test_a1_balanced_baseline(grid):
    means = _means(grid, "balanced")
    print("A1 balanced means:", {k: round(v, 4) for k, v in means.items()})
    for clf, m in means.items():
        assert m >= 0.95, f"{clf} mean G-mean {m:.4f} < 0.95 on the balanced stream"


def test_a2_imbalance_tolerance(grid):
    means = _means(grid, "imb_0.03_0.03")
    print("A2 imb_0.03_0.03 means:", {k: round(v, 4) for k, v in means.items()})
    assert means["uob"] >= 0.90
    assert means["oob"] >= 0.90
    for winner in ("uob", "oob"):
        for loser in ("ob", "vfdt"):
            assert means[winner] >= means[loser], (
                f"{winner} {means[winner]:.4f} below {loser} {means[loser]:.4f}"
            )


def test_a3_borderline_monotone(grid):
    levels = ("bord_20_20", "bord_40_40", "bord_60_60", "bord_80_80", "bord_100_100")
    vfdt = [_means(grid, s)["vfdt"] for s in levels]
    oob = [_means(grid, s)["oob"] for s in levels]
    print("A3 vfdt by level:", [round(v, 4) for v in vfdt])
    print("A3 oob  by level:", [round(v, 4) for v in oob])
    for a, b, la, lb in zip(vfdt, vfdt[1:], levels, levels[1:]):
        assert b < a, f"vfdt not strictly decreasing: {la} {a:.4f} -> {lb} {b:.4f}"
    for v, lvl in zip(oob[1:], levels[1:]):
        assert abs(v - oob[0]) <= 0.15, (
            f"oob at {lvl} ({v:.4f}) drifts more than 0.15 from its 20% value ({oob[0]:.4f})"
        )


def test_a4_rare_harder_than_borderline(grid):
    for lvl in ("40", "60", "80"):
        rare = _means(grid, f"rare_{lvl}_{lvl}")
        bord = _means(grid, f"bord_{lvl}_{lvl}")
        print(f"A4 level {lvl}: rare", {k: round(v, 4) for k, v in rare.items()},
              "bord", {k: round(v, 4) for k, v in bord.items()})
        for clf in CLASSIFIERS:
            assert rare[clf] < bord[clf], (
                f"{clf} at {lvl}%: rare {rare[clf]:.4f} not below borderline {bord[clf]:.4f}"
            )


def test_a5_rare_collapse(grid):
    means = _means(grid, "rare_100_100")
    print("A5 rare_100_100 means:", {k: round(v, 4) for k, v in means.items()})
    assert means["ob"] < 0.10
    assert means["vfdt"] < 0.10
    assert means["uob"] > 0.20


def test_a6_drift_recovery_shapes(grid):
    move = _snaps(grid, "move_5_5", "oob")
    print("A6 move_5_5 oob snapshots:", {k: round(v, 4) for k, v in move.items()})
    assert move["end"] >= move["pre"] - 0.05, (
        f"oob end {move['end']:.4f} below pre {move['pre']:.4f} - 0.05 after the move"
    )
    for clf in ("vfdt", "ob"):
        s = _snaps(grid, "split_5_5", clf)
        print(f"A6 split_5_5 {clf} snapshots:", {k: round(v, 4) for k, v in s.items()})
        assert s["end"] <= s["start"] - 0.05, (
            f"{clf} end {s['end']:.4f} not at least 0.05 below start {s['start']:.4f}"
        )


def test_a7_combined_degradation(grid):
    for clf in CLASSIFIERS:
        combined = _snaps(grid, "split_5_5_rared_60_60", clf)["post"]
        rare_only = _snaps(grid, "rared_60_60", clf)["post"]
        print(f"A7 {clf}: combined post {combined:.4f}, rare-only post {rare_only:.4f}")
        assert combined <= rare_only - 0.02, (
            f"{clf}: combined post {combined:.4f} not 0.02 below rare-only {rare_only:.4f}"
        )
    post = {c: _snaps(grid, "split_5_5_rared_60_60", c)["post"] for c in CLASSIFIERS}
    for winner in ("oob", "uob"):
        for loser in ("ob", "vfdt"):
            assert post[winner] >= post[loser] + 0.10, (
                f"{winner} post {post[winner]:.4f} not 0.10 above {loser} {post[loser]:.4f}"
            )


def test_a8_property_suites_present():
    # the suites themselves run with this session; here we pin their names so
    # a deleted file cannot silently void the gate
    here = os.path.dirname(os.path.abspath(__file__))
    wanted = {
        "test_generator.py": "test_generation_deterministic",
        "test_drift.py": "test_progress_scalar_vector_agreement",
        "test_labeler.py": "test_matches_brute_force_on_random_cloud",
        "test_classifiers.py": "test_hoeffding_bound_arithmetic",
        "test_evaluation.py": "test_gmean_permutation_invariant",
    }
    for fname, probe in wanted.items():
        with open(os.path.join(here, fname)) as fh:
            assert probe in fh.read(), f"{fname} lost its property test {probe}"


def test_cell_wall_clock(grid):
    walls = grid["_walls"]
    worst = max(walls.values())
    print(f"cell wall clock: worst {worst:.1f}s over {len(walls)} cells")
    for (sid, clf), secs in walls.items():
        assert secs < 120.0, f"{sid}/{clf} took {secs:.1f}s (>= 2 min)"
