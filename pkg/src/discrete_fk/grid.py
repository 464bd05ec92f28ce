"""Lattice-cell data model for finite induced subgraphs of Z^2.

A cell doubles as a vertex of Z^2 and as the closed unit square centred on
it, so a :class:`Subgraph` is simultaneously a graph and a polyomino.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .errors import ShapeError

__all__ = [
    "Cell",
    "Subgraph",
    "Slice",
    "D4Element",
    "D4",
    "boundary",
    "slice",
    "rows",
    "columns",
    "diagonals",
    "components",
    "is_connected",
    "is_strongly_connected",
    "walls_in",
    "is_walled_in",
    "is_simply_connected",
    "transform",
    "canonical_form",
    "automorphisms",
]

STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class Cell(NamedTuple):
    x: int
    y: int

    def neighbors(self) -> tuple["Cell", "Cell", "Cell", "Cell"]:
        x, y = self
        return (Cell(x + 1, y), Cell(x - 1, y), Cell(x, y + 1), Cell(x, y - 1))

    def adjacent(self, other: "Cell") -> bool:
        return abs(self.x - other.x) + abs(self.y - other.y) == 1


def yx_key(c) -> tuple[int, int]:
    """Sort key used everywhere for deterministic output: (y, x)."""
    return (c[1], c[0])


class Subgraph:
    """Immutable finite induced subgraph of Z^2.

    Edges are implied: two member cells are joined iff they are lattice
    neighbours. Cells are kept sorted by ``(y, x)``; membership tests go
    through a frozenset view. Single cells are allowed, empty sets are not.
    """

    __slots__ = ("_cells", "_set", "_bbox")

    def __init__(self, cells: Iterable):
        try:
            cs = {Cell(int(c[0]), int(c[1])) for c in cells}
        except (TypeError, ValueError, IndexError) as exc:
            raise ShapeError(f"cells must be integer (x, y) pairs: {exc}") from None
        if not cs:
            raise ShapeError("empty shape")
        ordered = tuple(sorted(cs, key=yx_key))
        object.__setattr__(self, "_cells", ordered)
        object.__setattr__(self, "_set", frozenset(cs))
        xs = [c.x for c in ordered]
        object.__setattr__(self, "_bbox", (min(xs), max(xs), ordered[0].y, ordered[-1].y))

    def __setattr__(self, name, value):
        raise AttributeError("Subgraph is immutable")

    @property
    def cells(self) -> tuple[Cell, ...]:
        return self._cells

    @property
    def cell_set(self) -> frozenset:
        return self._set

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        """``(x_min, x_max, y_min, y_max)``."""
        return self._bbox

    @property
    def width(self) -> int:
        return self._bbox[1] - self._bbox[0] + 1

    @property
    def height(self) -> int:
        return self._bbox[3] - self._bbox[2] + 1

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self._cells)

    def __contains__(self, c) -> bool:
        return (c[0], c[1]) in self._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgraph) and self._set == other._set

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        body = ", ".join(f"({c.x},{c.y})" for c in self._cells[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"Subgraph(n={len(self)}, [{body}{more}])"

    def translate(self, dx: int, dy: int) -> "Subgraph":
        return Subgraph((c.x + dx, c.y + dy) for c in self._cells)

    def normalized(self) -> "Subgraph":
        """Translate so that ``x_min == y_min == 0``."""
        return self.translate(-self._bbox[0], -self._bbox[2])

    def with_cells(self, extra: Iterable) -> "Subgraph":
        return Subgraph(list(self._cells) + [tuple(c) for c in extra])

    def without_cells(self, removed: Iterable) -> "Subgraph":
        drop = {(c[0], c[1]) for c in removed}
        return Subgraph(c for c in self._cells if c not in drop)

    def edges(self) -> list[tuple[Cell, Cell]]:
        """In-graph edges, each listed once (right and up neighbours)."""
        out = []
        for c in self._cells:
            for nb in (Cell(c.x + 1, c.y), Cell(c.x, c.y + 1)):
                if nb in self._set:
                    out.append((c, nb))
        return out

    def degree(self, c) -> int:
        """In-graph degree of a member cell."""
        return sum(nb in self._set for nb in Cell(*c).neighbors())

    def boundary_degree(self, c) -> int:
        """Number of boundary neighbours of a member cell (4 - in-graph degree)."""
        return 4 - self.degree(c)


def boundary(g: Subgraph) -> set[Cell]:
    """Cells outside ``g`` adjacent to at least one member."""
    s = g.cell_set
    return {nb for c in g for nb in c.neighbors() if nb not in s}


@dataclass(frozen=True)
class Slice:
    """Member cells of ``g`` on one row, column or diagonal ``y = x + index``."""

    axis: str
    index: int
    cells: tuple[Cell, ...]

    def support(self) -> tuple[int, ...]:
        """Coordinates along the slice: x for rows and diagonals, y for columns."""
        if self.axis == "column":
            return tuple(c.y for c in self.cells)
        return tuple(c.x for c in self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def is_contiguous(self) -> bool:
        s = self.support()
        return not s or s[-1] - s[0] == len(s) - 1


_AXES = ("row", "column", "diagonal")


def slice(g: Subgraph, axis: str, index: int) -> Slice:  # noqa: A001 - domain name
    """Row ``y == index``, column ``x == index`` or diagonal ``y == x + index``."""
    if axis == "row":
        cells = [c for c in g if c.y == index]
    elif axis == "column":
        cells = [c for c in g if c.x == index]
    elif axis == "diagonal":
        cells = [c for c in g if c.y - c.x == index]
    else:
        raise ValueError(f"axis must be one of {_AXES}, got {axis!r}")
    return Slice(axis, index, tuple(sorted(cells)))


def _group(g: Subgraph, axis: str) -> dict[int, Slice]:
    buckets: dict[int, list[Cell]] = {}
    for c in g:
        key = c.y if axis == "row" else c.x if axis == "column" else c.y - c.x
        buckets.setdefault(key, []).append(c)
    return {k: Slice(axis, k, tuple(sorted(v))) for k, v in sorted(buckets.items())}


def rows(g: Subgraph) -> dict[int, Slice]:
    """Non-empty row slices keyed by y."""
    return _group(g, "row")


def columns(g: Subgraph) -> dict[int, Slice]:
    """Non-empty column slices keyed by x."""
    return _group(g, "column")


def diagonals(g: Subgraph) -> dict[int, Slice]:
    """Non-empty diagonal slices keyed by h = y - x."""
    return _group(g, "diagonal")


def components(g: Subgraph) -> list[Subgraph]:
    """Connected components, ordered by their smallest (y, x) cell."""
    s = g.cell_set
    seen: set[Cell] = set()
    out = []
    for start in g:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for nb in c.neighbors():
                if nb in s and nb not in seen:
                    seen.add(nb)
                    comp.append(nb)
                    queue.append(nb)
        out.append(Subgraph(comp))
    return out


def is_connected(g: Subgraph) -> bool:
    s = g.cell_set
    start = g.cells[0]
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for nb in c.neighbors():
            if nb in s and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(g)


def is_strongly_connected(g: Subgraph) -> bool:
    """Connected, with every row and every column a contiguous run.

    Connectivity is required on top of row/column convexity so that the
    predicate implies :func:`is_connected` (``{(0,0), (1,1)}`` is HV-convex
    but not strongly connected).
    """
    if not all(sl.is_contiguous() for sl in rows(g).values()):
        return False
    if not all(sl.is_contiguous() for sl in columns(g).values()):
        return False
    return is_connected(g)


def walls_in(a: Slice, b: Slice) -> bool:
    """True iff every coordinate occupied along ``b`` is occupied along ``a``."""
    if a.axis != b.axis or a.axis not in ("row", "column"):
        raise ValueError(
            f"walls_in needs two parallel row or column slices, got {a.axis!r} and {b.axis!r}"
        )
    return set(b.support()) <= set(a.support())


def _has_dominating(slices: Iterable[Slice]) -> bool:
    slices = list(slices)
    supports = [set(sl.support()) for sl in slices]
    union = set().union(*supports)
    # a dominating slice must contain the union of all supports
    return any(sup == union for sup in supports)


def is_walled_in(g: Subgraph) -> bool:
    """Strongly connected with one row walling in all rows and one column all columns."""
    if not is_strongly_connected(g):
        return False
    return _has_dominating(rows(g).values()) and _has_dominating(columns(g).values())


def is_simply_connected(g: Subgraph) -> bool:
    """No holes in the open domain associated with ``g``.

    The complement inside the bounding box inflated by one cell is flooded
    from the frame with 8-neighbour steps: two complement squares meeting at
    a corner are joined through that corner, which is not interior to the
    union of member squares.
    """
    x0, x1, y0, y1 = g.bbox
    x0, x1, y0, y1 = x0 - 1, x1 + 1, y0 - 1, y1 + 1
    s = g.cell_set
    start = Cell(x0, y0)
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                nb = Cell(c.x + dx, c.y + dy)
                if (
                    x0 <= nb.x <= x1
                    and y0 <= nb.y <= y1
                    and nb not in s
                    and nb not in seen
                ):
                    seen.add(nb)
                    queue.append(nb)
    n_complement = (x1 - x0 + 1) * (y1 - y0 + 1) - len(g)
    return len(seen) == n_complement


# The eight linear isometries of Z^2 fixing the origin, as (a, b, c, d) with
# (x, y) -> (a x + b y, c x + d y).
_LINEAR = (
    (1, 0, 0, 1),  # identity
    (0, -1, 1, 0),  # rotate 90
    (-1, 0, 0, -1),  # rotate 180
    (0, 1, -1, 0),  # rotate 270
    (-1, 0, 0, 1),  # mirror x -> -x
    (1, 0, 0, -1),  # mirror y -> -y
    (0, 1, 1, 0),  # mirror in y = x
    (0, -1, -1, 0),  # mirror in y = -x
)
_LINEAR_NAMES = ("id", "rot90", "rot180", "rot270", "flip_x", "flip_y", "flip_diag", "flip_antidiag")
_LINEAR_INDEX = {m: i for i, m in enumerate(_LINEAR)}


@dataclass(frozen=True)
class D4Element:
    """Lattice isometry ``v -> R v + t`` with ``R`` one of the 8 dihedral maps."""

    linear: int = 0
    tx: int = 0
    ty: int = 0

    def __post_init__(self):
        if not 0 <= self.linear < 8:
            raise ValueError("linear index must be in 0..7")

    @classmethod
    def named(cls, name: str, tx: int = 0, ty: int = 0) -> "D4Element":
        return cls(_LINEAR_NAMES.index(name), tx, ty)

    @property
    def name(self) -> str:
        return _LINEAR_NAMES[self.linear]

    @property
    def matrix(self) -> tuple[int, int, int, int]:
        return _LINEAR[self.linear]

    def apply(self, c) -> Cell:
        a, b, cc, d = _LINEAR[self.linear]
        x, y = c[0], c[1]
        return Cell(a * x + b * y + self.tx, cc * x + d * y + self.ty)

    def __call__(self, c) -> Cell:
        return self.apply(c)

    def compose(self, other: "D4Element") -> "D4Element":
        """``self ∘ other`` (apply ``other`` first)."""
        a, b, c, d = _LINEAR[self.linear]
        e, f, g, h = _LINEAR[other.linear]
        lin = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        t = self.apply((other.tx, other.ty))
        return D4Element(_LINEAR_INDEX[lin], t.x, t.y)

    def inverse(self) -> "D4Element":
        a, b, c, d = _LINEAR[self.linear]
        inv = D4Element(_LINEAR_INDEX[(a, c, b, d)])  # orthogonal: inverse = transpose
        t = inv.apply((self.tx, self.ty))
        return D4Element(inv.linear, -t.x, -t.y)


D4 = tuple(D4Element(i) for i in range(8))


def transform(g: Subgraph, t: D4Element) -> Subgraph:
    return Subgraph(t.apply(c) for c in g)


def _normalized_key(cells) -> tuple[tuple[int, int], ...]:
    mx = min(c[0] for c in cells)
    my = min(c[1] for c in cells)
    return tuple(sorted(((c[1] - my, c[0] - mx) for c in cells)))


def canonical_form(g: Subgraph, mode: str = "free") -> Subgraph:
    """Representative of ``g`` up to translation (``fixed``) or translation + D4 (``free``).

    Candidates are translated to ``min x = min y = 0`` and compared as cell
    lists sorted by (y, x); the lexicographically smallest wins.
    """
    if mode == "fixed":
        return g.normalized()
    if mode != "free":
        raise ValueError(f"mode must be 'fixed' or 'free', got {mode!r}")
    best = min(_normalized_key([t.apply(c) for c in g]) for t in D4)
    return Subgraph((x, y) for y, x in best)


def automorphisms(g: Subgraph) -> list[D4Element]:
    """Lattice isometries mapping the cell set onto itself (identity first)."""
    x0, _, y0, _ = g.bbox
    out = []
    for lin in D4:
        image = [lin.apply(c) for c in g]
        mx = min(c.x for c in image)
        my = min(c.y for c in image)
        t = D4Element(lin.linear, x0 - mx, y0 - my)
        if all(Cell(c.x + t.tx, c.y + t.ty) in g.cell_set for c in image):
            out.append(t)
    return out
