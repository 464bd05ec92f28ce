"""Named lattice shapes used across tests, examples and the CLI."""

from __future__ import annotations

from .grid import Subgraph


def square(k: int) -> Subgraph:
    return rectangle(k, k)


def rectangle(w: int, h: int) -> Subgraph:
    if w < 1 or h < 1:
        raise ValueError("rectangle sides must be >= 1")
    return Subgraph((x, y) for y in range(h) for x in range(w))


def path(n: int) -> Subgraph:
    """Horizontal 1 x n path."""
    return rectangle(n, 1)


def plus() -> Subgraph:
    return Subgraph([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])


def domino() -> Subgraph:
    return Subgraph([(0, 0), (1, 0)])


def p_pentomino() -> Subgraph:
    """2x2 square with one extra cell on top of its right column."""
    return Subgraph([(0, 0), (1, 0), (0, 1), (1, 1), (1, 2)])


def s_tetromino() -> Subgraph:
    return Subgraph([(0, 0), (1, 0), (1, 1), (2, 1)])


def l_tromino() -> Subgraph:
    return Subgraph([(0, 0), (1, 0), (0, 1)])


def t_tetromino() -> Subgraph:
    return Subgraph([(0, 0), (1, 0), (2, 0), (1, 1)])


def square_with_hole(k: int = 3) -> Subgraph:
    """k x k block with its centre cell removed (k odd)."""
    c = k // 2
    return Subgraph((x, y) for y in range(k) for x in range(k) if (x, y) != (c, c))


NAMED = {
    "plus": plus,
    "domino": domino,
    "p_pentomino": p_pentomino,
    "s_tetromino": s_tetromino,
    "l_tromino": l_tromino,
    "t_tetromino": t_tetromino,
}


def by_name(name: str) -> Subgraph:
    """Resolve ``plus``, ``square:K``, ``rect:WxH``, ``path:N`` and similar names."""
    if name in NAMED:
        return NAMED[name]()
    kind, _, arg = name.partition(":")
    try:
        if kind == "square":
            return square(int(arg))
        if kind == "path":
            return path(int(arg))
        if kind == "rect":
            w, h = arg.lower().split("x")
            return rectangle(int(w), int(h))
        if kind == "disk":
            from .continuum import discrete_disk

            return discrete_disk(int(arg))
    except ValueError as exc:
        raise ValueError(f"bad shape name {name!r}: {exc}") from None
    raise ValueError(f"unknown shape name {name!r}")
