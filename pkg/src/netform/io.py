"""Edge-list and attribute-file ingestion, report emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from netform.graph import Graph
from netform.netgen import AttributeTable

ID_COLUMNS = ("node", "id", "node_id")


class DataError(ValueError):
    pass


def read_edge_list(path: str | Path) -> list[tuple[int, int]]:
    """``u<TAB>v`` per line; ``#`` starts a comment; duplicates collapse, self-loops are rejected."""
    edges: set[tuple[int, int]] = set()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read edge list {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: node ids must be integers, got {line!r}") from None
        if u < 0 or v < 0:
            raise DataError(f"{path}:{lineno}: node ids must be non-negative")
        if u == v:
            raise DataError(f"{path}:{lineno}: self-loop on node {u}")
        edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def write_edge_list(edges: Iterable[tuple[int, int]], path: str | Path) -> None:
    norm = sorted({(min(u, v), max(u, v)) for u, v in edges})
    Path(path).write_text("".join(f"{u}\t{v}\n" for u, v in norm), encoding="utf-8", newline="\n")


def read_attributes(path: str | Path) -> tuple[list[int], dict[str, list[str]]]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read attribute file {path}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: empty attribute file")
    header = [h.strip() for h in rows[0]]
    id_col = next((i for i, h in enumerate(header) if h.lower() in ID_COLUMNS), None)
    if id_col is None:
        raise DataError(f"{path}: no node id column (expected one of {', '.join(ID_COLUMNS)})")
    names = [h for i, h in enumerate(header) if i != id_col]
    ids: list[int] = []
    cols: dict[str, list[str]] = {h: [] for h in names}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            ids.append(int(row[id_col]))
        except ValueError:
            raise DataError(f"{path}:{lineno}: node id must be an integer, got {row[id_col]!r}") from None
        for i, h in enumerate(header):
            if i != id_col:
                cols[h].append(row[i].strip())
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate node id rows")
    return ids, cols


@dataclass(frozen=True)
class Dataset:
    graph: Graph
    attrs: AttributeTable
    mapping: dict[int, int]  # original id -> dense id


def load_dataset(edges_path: str | Path, attrs_path: str | Path) -> Dataset:
    """Join edges and attributes on node id and renumber ids densely in sorted order.

    Nodes listed only in the attribute file are kept as isolated nodes; edge
    endpoints without an attribute row are an error.
    """
    edges = read_edge_list(edges_path)
    ids, cols = read_attributes(attrs_path)
    missing = sorted({u for e in edges for u in e} - set(ids))
    if missing:
        raise DataError(f"missing attribute rows for nodes: {missing[:20]}")
    nodes = sorted(ids)
    mapping = {orig: i for i, orig in enumerate(nodes)}
    order = sorted(range(len(ids)), key=lambda k: mapping[ids[k]])
    table = AttributeTable({h: [vals[k] for k in order] for h, vals in cols.items()})
    g = Graph(len(nodes), ((mapping[u], mapping[v]) for u, v in edges))
    return Dataset(g, table, mapping)


# --------------------------------------------------------------------------
# report emission

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    if v is None:
        return ""
    return str(v)


def flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    if isinstance(obj, dict):
        for k in obj:
            rows.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows.extend(flatten(v, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, _fmt(obj)))
    return rows


def report_to_csv(report: dict) -> str:
    """Tidy two-column CSV: dotted metric path, value.  '.' decimals, LF endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    for key, val in flatten(report):
        w.writerow([key, val])
    return buf.getvalue()


def series_to_csv(report: dict) -> str:
    """Figure series (top-k curves, L/C by size, assortativity) as tidy CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "y"])
    for key in ("topk_degree",):
        if key in report:
            c = report[key]
            for x, y, z in zip(c["grid"], c["prob"], c["null"]):
                w.writerow([key, _fmt(x), _fmt(y)])
                w.writerow([key + "_null", _fmt(x), _fmt(z)])
    for row in report.get("series", []):
        w.writerow(["L", row["n"], _fmt(row["L"])])
        w.writerow(["C", row["n"], _fmt(row["C"])])
    for name, val in report.get("assortativity", {}).items():
        if isinstance(val, float):
            w.writerow(["assortativity", name, _fmt(val)])
    return buf.getvalue()


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, default=_default) + "\n"


def _default(o):
    import numpy as np

    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
