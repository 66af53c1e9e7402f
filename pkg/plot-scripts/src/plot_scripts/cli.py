"""plot: one figure from one results CSV."""

from __future__ import annotations

import argparse
import sys

from .render import ResultsError, render_file


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot", description="Render benchmark result curves to an image file."
    )
    p.add_argument("--input", required=True, help="results CSV")
    p.add_argument(
        "--metric",
        default="gmean",
        help="column to plot: gmean (default) or recall_<class>",
    )
    p.add_argument("--out", required=True, help="output image path (png, pdf, svg)")
    p.add_argument(
        "--manifest",
        help="manifest.json for drift-window shading (default: next to the input)",
    )
    p.add_argument("--title", help="figure title (default: stream id and metric)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render_file(args.input, args.metric, args.out, args.manifest, args.title)
    except (ResultsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.metric} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
