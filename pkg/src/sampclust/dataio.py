"""Text formats for points, graphs, dendrograms, labelings and run manifests.

Every loader rejects malformed input with a :class:`ParseError` that names the
file and line; none of them tries to repair what it reads.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .cluster import Branch, Dendrogram, Leaf, validate_dendrogram
from .errors import InvalidInput, ParseError
from .graph import DirectedGraph, PointSet

DENDROGRAM_FORMAT = "sampclust-dendrogram/1"


def _atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# --- points --------------------------------------------------------------


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _labels_array(raw: list[str]) -> np.ndarray:
    try:
        return np.array([int(s) for s in raw], dtype=np.int64)
    except ValueError:
        pass
    try:
        vals = np.array([float(s) for s in raw])
    except ValueError:
        return np.array(raw)
    if np.all(vals == np.round(vals)):
        return vals.astype(np.int64)
    return vals


def load_points(path, label_column: int | None = None) -> PointSet:
    """Read a numeric CSV into a :class:`PointSet`.

    A first row that does not parse as numbers is treated as a header.
    ``label_column`` may be negative to count from the end; that column is
    taken as class labels and kept out of the features.
    """
    path = str(path)
    rows: list[list[str]] = []
    lines: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            rows.append([c.strip() for c in row])
            lines.append(reader.line_num)
    if not rows:
        return PointSet(np.zeros((0, 1)))
    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        label_idx = label_column + width if label_column < 0 else label_column
        if not 0 <= label_idx < width:
            raise ParseError(f"label column {label_column} out of range for {width} columns", path, lines[0])
        if width < 2:
            raise ParseError("a label column needs at least one feature column beside it", path, lines[0])
    # labels may be text, so only feature cells decide whether row one is a header
    if not all(_is_number(c) for j, c in enumerate(rows[0]) if j != label_idx):
        rows, lines = rows[1:], lines[1:]
        if not rows:
            return PointSet(np.zeros((0, width - (label_idx is not None))))
    feats = np.empty((len(rows), width - (label_idx is not None)))
    raw_labels = []
    for r, (row, line) in enumerate(zip(rows, lines)):
        if len(row) != width:
            raise ParseError(f"expected {width} columns, found {len(row)}", path, line)
        if label_idx is not None:
            raw_labels.append(row[label_idx])
            row = row[:label_idx] + row[label_idx + 1:]
        try:
            feats[r] = [float(c) for c in row]
        except ValueError:
            bad = next(c for c in row if not _is_number(c))
            raise ParseError(f"non-numeric feature value {bad!r}", path, line) from None
    if not np.all(np.isfinite(feats)):
        r = int(np.flatnonzero(~np.isfinite(feats).all(axis=1))[0])
        raise ParseError("feature values must be finite", path, lines[r])
    labels = _labels_array(raw_labels) if label_idx is not None else None
    return PointSet(feats, labels)


def save_points(points: PointSet, path, *, header: bool = True) -> None:
    x = points.points
    out = []
    if header:
        names = [f"x{j}" for j in range(x.shape[1])]
        if points.labels is not None:
            names.append("label")
        out.append(",".join(names))
    for i in range(x.shape[0]):
        cells = [repr(float(v)) for v in x[i]]
        if points.labels is not None:
            cells.append(str(points.labels[i]))
        out.append(",".join(cells))
    _atomic_write(path, "".join(line + "\n" for line in out))


# --- graphs --------------------------------------------------------------


def format_graph(g: DirectedGraph) -> str:
    parts = []
    for v, ns in g.adjacency.items():
        parts.append(f"{v}: {' '.join(map(str, ns))}\n" if ns else f"{v}:\n")
    return "".join(parts)


def save_graph(g: DirectedGraph, path) -> None:
    """One line per vertex, ``<id>: <out-neighbor ids>``, sorted by id."""
    _atomic_write(path, format_graph(g))


def load_graph(path) -> DirectedGraph:
    path = str(path)
    out: dict[int, list[int]] = {}
    first_line: dict[int, int] = {}
    last = -1
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            head, sep, tail = text.partition(":")
            if not sep:
                raise ParseError("expected '<id>: <neighbor ids>'", path, line_no)
            try:
                v = int(head)
                ns = [int(tok) for tok in tail.split()]
            except ValueError:
                raise ParseError("vertex ids must be integers", path, line_no) from None
            if v < 0 or any(u < 0 for u in ns):
                raise ParseError("vertex ids must be non-negative", path, line_no)
            if v in out:
                raise ParseError(f"vertex {v} listed twice (first on line {first_line[v]})", path, line_no)
            if out and v < last:
                raise ParseError(f"vertex {v} comes after {last}; lines must be sorted by id", path, line_no)
            if any(a >= b for a, b in zip(ns, ns[1:])):
                raise ParseError(f"neighbors of vertex {v} must be ascending and distinct", path, line_no)
            if v in ns:
                raise ParseError(f"self-loop on vertex {v}", path, line_no)
            out[v] = ns
            last = v
            first_line[v] = line_no
    for v, ns in out.items():
        for u in ns:
            if u not in out:
                raise ParseError(f"neighbor {u} of vertex {v} is not a listed vertex", path, first_line[v])
    return DirectedGraph(out, validate=False)


# --- dendrograms ---------------------------------------------------------


def dendrogram_to_obj(d: Dendrogram):
    if isinstance(d, Leaf):
        return {"items": list(d.items)}
    return {"children": [dendrogram_to_obj(c) for c in d.children]}


def dendrogram_from_obj(obj, where: str = "root") -> Dendrogram:
    if not isinstance(obj, dict):
        raise InvalidInput(f"{where}: node must be an object")
    if set(obj) == {"items"}:
        items = obj["items"]
        if not isinstance(items, list) or not all(type(v) is int and v >= 0 for v in items):
            raise InvalidInput(f"{where}: items must be a list of non-negative integers")
        if any(a >= b for a, b in zip(items, items[1:])):
            raise InvalidInput(f"{where}: items must be sorted and distinct")
        return Leaf(items)
    if set(obj) == {"children"}:
        kids = obj["children"]
        if not isinstance(kids, list) or not kids:
            raise InvalidInput(f"{where}: children must be a non-empty list")
        return Branch([dendrogram_from_obj(c, f"{where}.children[{i}]") for i, c in enumerate(kids)])
    raise InvalidInput(f"{where}: node needs exactly one of 'items' or 'children'")


def save_dendrogram(d: Dendrogram, path, config: dict | None = None) -> None:
    doc = {"format": DENDROGRAM_FORMAT, "config": config or {}, "root": dendrogram_to_obj(d)}
    _atomic_write(path, json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def load_dendrogram(path, *, with_config: bool = False):
    """Read a dendrogram file; overlapping leaves are rejected."""
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg} (byte {exc.pos})", path, exc.lineno) from None
    if not isinstance(doc, dict) or "root" not in doc:
        raise ParseError("missing 'root' node", path)
    try:
        d = dendrogram_from_obj(doc["root"])
        validate_dendrogram(d)
    except InvalidInput as exc:
        raise ParseError(str(exc), path) from None
    if with_config:
        return d, doc.get("config", {})
    return d


# --- labelings -----------------------------------------------------------


def save_labels(labels, path) -> None:
    labels = np.asarray(labels)
    body = "".join(f"{i},{v}\n" for i, v in enumerate(labels.tolist()))
    _atomic_write(path, "index,label\n" + body)


def load_labels(path) -> np.ndarray:
    """Read an ``index,label`` CSV whose indices run 0..n-1 in order."""
    path = str(path)
    raw = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["index", "label"]:
            raise ParseError("expected header 'index,label'", path, 1)
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, found {len(row)}", path, reader.line_num)
            try:
                idx = int(row[0])
            except ValueError:
                raise ParseError(f"index {row[0]!r} is not an integer", path, reader.line_num) from None
            if idx != len(raw):
                raise ParseError(f"expected index {len(raw)}, found {idx}", path, reader.line_num)
            raw.append(row[1].strip())
    return _labels_array(raw)


# --- metric reports ------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.6f}"


def format_metrics(rows: Iterable[tuple[str, float]]) -> str:
    """``metric,value`` CSV; reals get six decimals, counts stay integers."""
    return "metric,value\n" + "".join(f"{name},{_cell(value)}\n" for name, value in rows)


def write_metrics(rows: Iterable[tuple[str, float]], path=None, stream: TextIO | None = None) -> None:
    text = format_metrics(rows)
    if path is None:
        (stream or sys.stdout).write(text)
    else:
        _atomic_write(path, text)


# --- manifests -----------------------------------------------------------


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What a command ran with, how long each stage took, and what it wrote."""

    command: str
    config: dict = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def record(self, stage: str, seconds: float) -> None:
        self.timings_ms[stage] = round(max(0.0, seconds) * 1000.0, 3)

    def write(self, path) -> None:
        _atomic_write(path, json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


def manifest_path(output) -> Path:
    return Path(f"{output}.manifest.json")
