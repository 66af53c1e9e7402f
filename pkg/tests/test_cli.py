"""Command line flows and grid orchestration on miniature scenarios."""

import json
import os

import numpy as np
import pytest

from streambench.cli import main, resolve_configs
from streambench.config import ConfigError, serialize
from streambench.runner import (
    atomic_write_text,
    classifier_seed,
    ensure_stream,
    load_stream,
    run_grid,
    stream_cache_path,
)

from conftest import make_config


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(serialize(make_config(length=2000)))
    return path


# ── config resolution ───────────────────────────────────────────────────────


def test_resolve_file(cfg_file):
    [(sid, cfg)] = resolve_configs(str(cfg_file))
    assert sid == "tiny"
    assert cfg.length == 2000


def test_resolve_directory(tmp_path):
    for name in ("a", "b"):
        (tmp_path / f"{name}.json").write_text(serialize(make_config(length=1500)))
    out = resolve_configs(str(tmp_path))
    assert [sid for sid, _ in out] == ["a", "b"]


def test_resolve_cookbook_ids():
    out = resolve_configs("balanced,imb_0.10_0.10")
    assert [sid for sid, _ in out] == ["balanced", "imb_0.10_0.10"]
    assert out[0][1].length == 200_000


def test_resolve_all_covers_cookbook():
    out = resolve_configs("all")
    ids = [sid for sid, _ in out]
    assert "balanced" in ids
    assert "split_5_5" in ids
    assert len(ids) >= 20


def test_resolve_seed_override(cfg_file):
    [(_, cfg)] = resolve_configs(str(cfg_file), seed=99)
    assert cfg.seed == 99


def test_resolve_unknown_id():
    with pytest.raises(ConfigError, match="unknown scenario"):
        resolve_configs("no_such_stream")


# ── runner internals ────────────────────────────────────────────────────────


def test_atomic_write(tmp_path):
    p = tmp_path / "out.txt"
    atomic_write_text(p, "hello\n")
    assert p.read_text() == "hello\n"
    assert list(tmp_path.iterdir()) == [p]  # no stray temp files


def test_classifier_seed_stable():
    assert classifier_seed("abc", "vfdt") == classifier_seed("abc", "vfdt")
    assert classifier_seed("abc", "vfdt") != classifier_seed("abc", "uob")
    assert classifier_seed("abc", "vfdt") != classifier_seed("abd", "vfdt")


def test_stream_cache_reused(tmp_path):
    cfg = make_config(length=1200)
    p1 = ensure_stream(cfg, tmp_path)
    stamp = os.path.getmtime(p1)
    p2 = ensure_stream(cfg, tmp_path)
    assert p1 == p2 == stream_cache_path(cfg, tmp_path)
    assert os.path.getmtime(p2) == stamp


def test_load_stream_roundtrip(tmp_path):
    cfg = make_config(length=1200)
    arrays = load_stream(ensure_stream(cfg, tmp_path))
    assert arrays.x.shape == (1200, 5)
    assert arrays.class_names == ("c0", "c1", "c2")
    assert len(np.unique(arrays.y)) == 3


def test_run_grid_manifest_and_outputs(tmp_path):
    cfg = make_config(length=2000)
    manifest = run_grid([("tiny", cfg)], tmp_path, classifiers=("vfdt", "ob"))
    assert manifest["ok"]
    assert {c["classifier"] for c in manifest["cells"]} == {"vfdt", "ob"}
    assert all(c["status"] == "ok" for c in manifest["cells"])
    assert all(c["wall_seconds"] > 0 for c in manifest["cells"])

    results = (tmp_path / "tiny_results.csv").read_text().strip().split("\n")
    assert results[0] == "t,classifier,stream_id,recall_c0,recall_c1,recall_c2,gmean"
    assert len(results) == 1 + 2 * 2  # 2 classifiers x 2 window points

    snaps = (tmp_path / "tiny_snapshots.csv").read_text().strip().split("\n")
    assert snaps[0] == "stream_id,classifier,start,pre,post,end"
    assert len(snaps) == 3

    stored = json.loads((tmp_path / "manifest.json").read_text())
    assert stored["scenarios"]["tiny"]["length"] == 2000
    assert stored["scenarios"]["tiny"]["drift_start"] is None


def test_run_grid_parallel_matches_serial(tmp_path):
    cfg = make_config(length=2000)
    run_grid([("s", cfg)], tmp_path / "serial", classifiers=("vfdt", "uob"))
    run_grid([("s", cfg)], tmp_path / "pool", classifiers=("vfdt", "uob"), jobs=2)
    a = (tmp_path / "serial" / "s_results.csv").read_text()
    b = (tmp_path / "pool" / "s_results.csv").read_text()
    assert a == b


def test_run_grid_records_drift_window(tmp_path, drift_cfg):
    manifest = run_grid([("d", drift_cfg)], tmp_path, classifiers=("vfdt",))
    info = manifest["scenarios"]["d"]
    assert info["drift_start"] == 1000
    assert info["drift_end"] == 2000


# ── CLI commands ────────────────────────────────────────────────────────────


def test_cli_generate(tmp_path, cfg_file, capsys):
    rc = main(["generate", "--config", str(cfg_file), "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "2000 examples" in out
    assert len(list((tmp_path / "streams").glob("*.npz"))) == 1


def test_cli_run(tmp_path, cfg_file, capsys):
    out_dir = tmp_path / "run"
    rc = main(
        ["run", "--config", str(cfg_file), "--out", str(out_dir), "--classifiers", "vfdt,oob"]
    )
    assert rc == 0
    assert "2/2 cells ok" in capsys.readouterr().out
    assert (out_dir / "manifest.json").exists()
    assert (out_dir / "tiny_results.csv").exists()


def test_cli_run_rejects_unknown_classifier(tmp_path, cfg_file, capsys):
    rc = main(["run", "--config", str(cfg_file), "--out", str(tmp_path), "--classifiers", "hat"])
    assert rc == 2
    assert "unknown classifier" in capsys.readouterr().err


def test_cli_export_and_label(tmp_path, cfg_file, capsys):
    stream_csv = tmp_path / "stream.csv"
    rc = main(["export", "--config", str(cfg_file), "--format", "csv", "--out", str(stream_csv)])
    assert rc == 0
    types_csv = tmp_path / "types.csv"
    rc = main(["label", "--input", str(stream_csv), "--out", str(types_csv)])
    assert rc == 0
    lines = types_csv.read_text().strip().split("\n")
    assert lines[0] == "window_end,class,safe,borderline,rare,outlier"
    assert len(lines) > 1


def test_cli_export_arff(tmp_path, cfg_file):
    out = tmp_path / "stream.arff"
    rc = main(["export", "--config", str(cfg_file), "--format", "arff", "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("@relation")


def test_cli_error_path(tmp_path, capsys):
    rc = main(["generate", "--config", "definitely_missing", "--out", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
