"""Command line front end: generate, run, label, export.

--config accepts a JSON file, a directory of them, a comma-separated list of
cookbook scenario ids, or "all" for the entire packaged cookbook.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from importlib import resources

import numpy as np

from .config import ConfigError, parse, validate_config
from .classifiers import CLASSIFIER_NAMES
from .evaluation import DEFAULT_WINDOW
from .generator import TYPE_NAMES
from .labeler import DEFAULT_K, label_windows, write_type_distribution_csv
from .runner import ensure_stream, load_stream, resolve_cache_dir, run_grid
from .stream_io import StreamFormatError, export_stream, read_stream_csv


def _cookbook_ids():
    root = resources.files("streambench.cookbook")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _load_one(text: str, seed):
    cfg = parse(text)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return validate_config(cfg)


def resolve_configs(spec: str, seed=None):
    """Expand a --config argument into [(scenario_id, ValidatedConfig)]."""
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            sid = os.path.splitext(os.path.basename(spec))[0]
            return [(sid, _load_one(fh.read(), seed))]
    if os.path.isdir(spec):
        out = []
        for name in sorted(os.listdir(spec)):
            if name.endswith(".json"):
                with open(os.path.join(spec, name), encoding="utf-8") as fh:
                    out.append((name[:-5], _load_one(fh.read(), seed)))
        if not out:
            raise ConfigError([f"no .json configs in directory {spec}"])
        return out

    root = resources.files("streambench.cookbook")
    ids = _cookbook_ids() if spec == "all" else [s.strip() for s in spec.split(",") if s.strip()]
    out = []
    for sid in ids:
        entry = root / f"{sid}.json"
        if not entry.is_file():
            raise ConfigError(
                [f"unknown scenario {sid!r}: not a file, directory, or cookbook id"]
            )
        out.append((sid, _load_one(entry.read_text(encoding="utf-8"), seed)))
    if not out:
        raise ConfigError([f"--config {spec!r} matched nothing"])
    return out


def _cmd_generate(args) -> int:
    configs = resolve_configs(args.config, args.seed)
    cache = resolve_cache_dir(args.out or ".", None) if args.out else resolve_cache_dir(".", "streams")
    for sid, cfg in configs:
        path = ensure_stream(cfg, cache)
        arrays = load_stream(path)
        counts = np.bincount(arrays.y, minlength=cfg.n_classes)
        types = np.bincount(arrays.gen_type, minlength=len(TYPE_NAMES))
        by_class = ", ".join(f"{n}={c}" for n, c in zip(arrays.class_names, counts))
        by_type = ", ".join(f"{n}={c}" for n, c in zip(TYPE_NAMES, types))
        print(f"{sid}: {path}")
        print(f"  {len(arrays.y)} examples; {by_class}; {by_type}")
    return 0


def _cmd_run(args) -> int:
    configs = resolve_configs(args.config, args.seed)
    classifiers = [s.strip() for s in args.classifiers.split(",") if s.strip()]
    for name in classifiers:
        if name not in CLASSIFIER_NAMES:
            print(
                f"unknown classifier {name!r}; expected one of {', '.join(CLASSIFIER_NAMES)}",
                file=sys.stderr,
            )
            return 2
    manifest = run_grid(
        configs,
        args.out,
        classifiers=classifiers,
        window=args.window,
        jobs=args.jobs,
    )
    n_ok = sum(1 for c in manifest["cells"] if c["status"] == "ok")
    print(f"{n_ok}/{len(manifest['cells'])} cells ok; manifest: {os.path.join(args.out, 'manifest.json')}")
    for cell in manifest["cells"]:
        if cell["status"] != "ok":
            print(f"  FAILED {cell['scenario']}/{cell['classifier']}: {cell['error']}", file=sys.stderr)
    return 0 if manifest["ok"] else 1


def _cmd_label(args) -> int:
    arrays = read_stream_csv(args.input)
    hists = label_windows(arrays.x, arrays.y, k=args.k, window=args.window)
    write_type_distribution_csv(args.out, hists, arrays.class_names)
    print(f"{len(hists)} windows -> {args.out}")
    return 0


def _cmd_export(args) -> int:
    [(sid, cfg)] = resolve_configs(args.config, args.seed)[:1]
    export_stream(cfg, args.format, args.out)
    print(f"{sid} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streambench")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="materialize streams into the cache")
    g.add_argument("--config", required=True)
    g.add_argument("--out", help="cache directory (default ./streams)")
    g.add_argument("--seed", type=int)
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("run", help="run the stream x classifier grid")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--classifiers", default=",".join(CLASSIFIER_NAMES))
    r.add_argument("--seed", type=int)
    r.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=_cmd_run)

    l = sub.add_parser("label", help="type-distribution time series for a stream CSV")
    l.add_argument("--input", required=True)
    l.add_argument("--out", required=True)
    l.add_argument("--k", type=int, default=DEFAULT_K)
    l.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    l.set_defaults(func=_cmd_label)

    e = sub.add_parser("export", help="write a stream as CSV or ARFF")
    e.add_argument("--config", required=True)
    e.add_argument("--format", choices=("csv", "arff"), required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--seed", type=int)
    e.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, StreamFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
