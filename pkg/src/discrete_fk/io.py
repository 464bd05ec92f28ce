"""Text and JSON shape formats.

Text format: one line per row, top line is ``y_max``; ``#`` marks a member
cell and ``.`` an absent one. An optional first line ``origin X Y`` places
the top-left character at ``(X, Y)``; without it the minimum corner of the
bounding box lands on ``(0, 0)``. Blank lines and ``;`` comments are ignored.

JSON format: ``{"schema": 1, "cells": [[x, y], ...]}`` with cells sorted by
``(y, x)``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ShapeError
from .grid import Subgraph

SCHEMA = 1


def parse_text(text: str) -> Subgraph:
    lines = text.splitlines()
    origin = None
    rows: list[tuple[int, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split(";", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("origin"):
            if origin is not None or rows:
                raise ShapeError("origin header must come first", line=lineno)
            parts = line.split()
            if len(parts) != 3:
                raise ShapeError("origin header needs two integers", line=lineno)
            try:
                origin = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise ShapeError("origin header needs two integers", line=lineno) from None
            continue
        rows.append((lineno, line))
    cells = []
    for r, (lineno, line) in enumerate(rows):
        for col, ch in enumerate(line):
            if ch == "#":
                cells.append((col, -r))
            elif ch != ".":
                raise ShapeError(f"unexpected character {ch!r}", line=lineno, column=col + 1)
    if not cells:
        raise ShapeError("empty shape")
    if origin is None:
        g = Subgraph(cells).normalized()
    else:
        # blank leading columns still count: anchor is the top-left character
        g = Subgraph(cells).translate(origin[0], origin[1])
    return g


def emit_text(g: Subgraph) -> str:
    x0, x1, y0, y1 = g.bbox
    s = g.cell_set
    out = []
    if (x0, y0) != (0, 0):
        out.append(f"origin {x0} {y1}")
    for y in range(y1, y0 - 1, -1):
        out.append("".join("#" if (x, y) in s else "." for x in range(x0, x1 + 1)))
    return "\n".join(out) + "\n"


def parse_json(text: str) -> Subgraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if isinstance(data, dict):
        if "schema" in data and data["schema"] != SCHEMA:
            raise ShapeError(f"unsupported schema {data['schema']!r}")
        cells = data.get("cells")
    else:
        cells = data
    if not isinstance(cells, list):
        raise ShapeError("JSON shape needs a 'cells' list")
    for i, c in enumerate(cells):
        if not (isinstance(c, (list, tuple)) and len(c) == 2 and all(isinstance(v, int) for v in c)):
            raise ShapeError(f"cell #{i} is not an [x, y] integer pair")
    if not cells:
        raise ShapeError("empty shape")
    return Subgraph(cells)


def shape_to_json(g: Subgraph) -> dict:
    return {"schema": SCHEMA, "cells": [[c.x, c.y] for c in g.cells]}


def emit_json(g: Subgraph) -> str:
    return json.dumps(shape_to_json(g), separators=(", ", ": ")) + "\n"


def parse(text: str) -> Subgraph:
    """Sniff the format: JSON if the first non-blank character is ``{`` or ``[``."""
    head = text.lstrip()[:1]
    if head in ("{", "["):
        return parse_json(text)
    return parse_text(text)


def load_shape(path) -> Subgraph:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ShapeError(f"cannot read {p}: {exc.strerror}") from None
    if p.suffix == ".json":
        return parse_json(text)
    return parse(text)
