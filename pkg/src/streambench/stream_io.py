"""Stream materialization: CSV and ARFF export, CSV re-import.

CSV schema: header ``att1,att2,att3,att4,att5,class,gen_type``; attributes are
written with shortest round-trip float repr, so re-importing and re-exporting
a file reproduces it byte for byte.  ARFF writes numeric attributes and a
nominal class (no gen_type column) for stream-mining toolkits.
"""

from __future__ import annotations

import csv

import numpy as np

from .config import N_ATTRIBUTES, ValidatedConfig
from .generator import StreamArrays, TYPE_NAMES, generate_stream_arrays

CSV_HEADER = tuple(f"att{i + 1}" for i in range(N_ATTRIBUTES)) + ("class", "gen_type")


class StreamFormatError(ValueError):
    """Malformed stream file; message carries line and column positions."""


def write_stream_csv(arrays: StreamArrays, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        names = arrays.class_names
        x, y, g = arrays.x, arrays.y, arrays.gen_type
        for i in range(len(y)):
            row = [repr(float(v)) for v in x[i]]
            row.append(names[y[i]])
            row.append(TYPE_NAMES[g[i]])
            fh.write(",".join(row) + "\n")


def write_stream_arff(arrays: StreamArrays, path, relation: str = "stream") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"@relation {relation}\n\n")
        for i in range(N_ATTRIBUTES):
            fh.write(f"@attribute att{i + 1} numeric\n")
        fh.write("@attribute class {" + ",".join(arrays.class_names) + "}\n\n")
        fh.write("@data\n")
        names = arrays.class_names
        x, y = arrays.x, arrays.y
        for i in range(len(y)):
            fh.write(",".join(repr(float(v)) for v in x[i]) + "," + names[y[i]] + "\n")


def export_stream(cfg: ValidatedConfig, fmt: str, out_path, relation: str = "stream") -> StreamArrays:
    """Generate the configured stream and write it in the requested format."""
    arrays = generate_stream_arrays(cfg)
    if fmt == "csv":
        write_stream_csv(arrays, out_path)
    elif fmt == "arff":
        write_stream_arff(arrays, out_path, relation=relation)
    else:
        raise ValueError(f"unknown stream format {fmt!r} (expected 'csv' or 'arff')")
    return arrays


def read_stream_csv(path) -> StreamArrays:
    """Parse an exported CSV back into arrays (classes keep file order of first use)."""
    xs: list[list[float]] = []
    ys: list[int] = []
    gs: list[int] = []
    name_index: dict[str, int] = {}
    type_index = {name: i for i, name in enumerate(TYPE_NAMES)}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise StreamFormatError("line 1: empty stream file") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise StreamFormatError(
                f"line 1: bad header {header!r}, expected {','.join(CSV_HEADER)}"
            )
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise StreamFormatError(
                    f"line {ln}: expected {len(CSV_HEADER)} fields, found {len(row)}"
                )
            vals = []
            for col in range(N_ATTRIBUTES):
                try:
                    vals.append(float(row[col]))
                except ValueError:
                    raise StreamFormatError(
                        f"line {ln}, column {col + 1}: could not parse float {row[col]!r}"
                    ) from None
            cname = row[N_ATTRIBUTES]
            if not cname:
                raise StreamFormatError(f"line {ln}, column {N_ATTRIBUTES + 1}: empty class")
            gname = row[N_ATTRIBUTES + 1]
            if gname not in type_index:
                raise StreamFormatError(
                    f"line {ln}, column {N_ATTRIBUTES + 2}: unknown gen_type {gname!r}"
                )
            if cname not in name_index:
                name_index[cname] = len(name_index)
            xs.append(vals)
            ys.append(name_index[cname])
            gs.append(type_index[gname])
    if not xs:
        raise StreamFormatError("line 2: stream file has a header but no examples")
    return StreamArrays(
        x=np.array(xs, dtype=float),
        y=np.array(ys, dtype=np.int8),
        gen_type=np.array(gs, dtype=np.int8),
        class_names=tuple(name_index),
        stats={},
    )
