"""Polyomino enumeration and exhaustive search for lambda_D minimizers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

from .errors import CapExceededError
from .grid import (
    D4,
    Subgraph,
    canonical_form,
    is_connected,
    is_simply_connected,
    is_strongly_connected,
    is_walled_in,
)
from .spectral import lambda_d

log = logging.getLogger(__name__)

ENUM_CAP = 14
TIE_RTOL = 1e-9
BATCH = 8192


def _redelmeier(n_max: int) -> Iterator[tuple[int, tuple]]:
    """Yield ``(size, cells)`` for every fixed polyomino of size <= n_max exactly once.

    Growth starts at the origin; only cells with ``y > 0`` or ``y == 0, x >= 0``
    may be added, so every polyomino is produced from its lowest-leftmost cell.
    Cells are encoded as ``y * W + x + n_max`` to keep the inner loop on ints.
    """
    W = 2 * n_max + 1
    off = n_max

    def allowed(c: int) -> bool:
        y, xo = divmod(c, W)
        return y > 0 or (y == 0 and xo >= off)

    steps = (1, -1, W, -W)
    seen = {off}
    poly: list[int] = []

    def grow(untried: list[int]):
        untried = list(untried)
        while untried:
            c = untried.pop()
            poly.append(c)
            size = len(poly)
            yield size, tuple(poly)
            if size < n_max:
                new = []
                # |x| < n_max inside the growth, so c +- 1 never wraps across W
                for s in steps:
                    nb = c + s
                    if nb not in seen and allowed(nb):
                        seen.add(nb)
                        new.append(nb)
                yield from grow(untried + new)
                for nb in new:
                    seen.discard(nb)
            poly.pop()

    for size, code in grow([off]):
        yield size, tuple(sorted(((c % W - off, c // W) for c in code), key=lambda p: (p[1], p[0])))


def _free_key(cells) -> tuple:
    best = None
    for t in D4:
        a, b, c, d = t.matrix
        pts = [(a * x + b * y, c * x + d * y) for x, y in cells]
        mx = min(p[0] for p in pts)
        my = min(p[1] for p in pts)
        key = tuple(sorted((p[1] - my, p[0] - mx) for p in pts))
        if best is None or key < best:
            best = key
    return best


def _fixed_key(cells) -> tuple:
    mx = min(p[0] for p in cells)
    my = min(p[1] for p in cells)
    return tuple(sorted((p[1] - my, p[0] - mx) for p in cells))


def _check_cap(n: int, mode: str) -> None:
    if mode not in ("fixed", "free"):
        raise ValueError(f"mode must be 'fixed' or 'free', got {mode!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ENUM_CAP:
        raise CapExceededError(f"enumeration capped at n={ENUM_CAP}, got {n}")


def _enumerate_raw(n_max: int, mode: str, exact: int | None = None):
    for size, cells in _redelmeier(n_max):
        if exact is not None and size != exact:
            continue
        if mode == "free" and _fixed_key(cells) != _free_key(cells):
            continue
        yield size, cells


def enumerate_polyominoes(n: int, mode: str = "free") -> Iterator[Subgraph]:
    """Every polyomino of size n once, up to translation (fixed) or translation + D4 (free).

    Free representatives are the canonical forms, translated to min corner 0.
    """
    _check_cap(n, mode)
    for _, cells in _enumerate_raw(n, mode, exact=n):
        yield Subgraph(cells).normalized()


def count_polyominoes(n: int, mode: str = "free") -> int:
    _check_cap(n, mode)
    return sum(1 for _ in _enumerate_raw(n, mode, exact=n))


def naive_polyominoes(n: int, mode: str = "free") -> set:
    """Independent oracle: connected n-subsets of an n x n box, deduplicated by canonical form."""
    import itertools

    from .grid import Subgraph as SG

    out = set()
    box = [(x, y) for y in range(n) for x in range(n)]
    for combo in itertools.combinations(box, n):
        g = SG(combo)
        if not is_connected(g):
            continue
        out.add(canonical_form(g, mode).cells)
    return out


def batch_lambda(shapes: list, n: int) -> np.ndarray:
    """Smallest L_D eigenvalue for many equal-size shapes at once (dense, stacked)."""
    out = np.empty(len(shapes))
    eye = 4.0 * np.eye(n)
    for lo in range(0, len(shapes), BATCH):
        pts = np.asarray(shapes[lo : lo + BATCH], dtype=np.int64)  # (B, n, 2)
        d = np.abs(pts[:, :, None, :] - pts[:, None, :, :]).sum(axis=-1)
        L = eye - (d == 1)
        out[lo : lo + len(pts)] = np.linalg.eigvalsh(L)[:, 0]
    return out


def audit(g: Subgraph) -> dict:
    return {
        "connected": is_connected(g),
        "strongly_connected": is_strongly_connected(g),
        "walled_in": is_walled_in(g),
        "simply_connected": is_simply_connected(g),
    }


@dataclass
class MinimizerRecord:
    n: int
    lambda_min: float
    minimizers: list
    audited: list
    enumerated_count: int
    mode: str
    candidates: int = 0
    confirmed_residual: float = 0.0
    diameter_ratios: list = field(default_factory=list)

    def to_json(self) -> dict:
        from .io import emit_text, shape_to_json

        return {
            "n": self.n,
            "lambda_min": self.lambda_min,
            "mode": self.mode,
            "enumerated_count": self.enumerated_count,
            "candidates": self.candidates,
            "minimizers": [
                {
                    "cells": shape_to_json(g)["cells"],
                    "text": emit_text(g),
                    "audit": a,
                    "diameter_ratio": r,
                }
                for g, a, r in zip(self.minimizers, self.audited, self.diameter_ratios)
            ],
        }


def _walled_in_cells(cells) -> bool:
    return is_walled_in(Subgraph(cells))


def _record(n: int, shapes: list, enumerated: int, mode: str, tol: float) -> MinimizerRecord:
    cand = shapes
    if mode == "pruned":
        cand = [c for c in shapes if _walled_in_cells(c)]
    lams = batch_lambda(cand, n)
    lo = float(lams.min())
    hits = np.nonzero(lams <= lo + TIE_RTOL * max(1.0, abs(lo)))[0]
    mins, audits, ratios = [], [], []
    best, worst_res = math.inf, 0.0
    for i in hits:
        g = canonical_form(Subgraph(cand[i]), "free")
        rep = lambda_d(g, tol)
        worst_res = max(worst_res, rep.residual)
        best = min(best, rep.lambda_d)
        mins.append(g)
    # keep only classes that the iterative solver confirms as ties
    confirmed = []
    for g in mins:
        lam = lambda_d(g, tol).lambda_d
        if lam <= best + TIE_RTOL * max(1.0, abs(best)):
            confirmed.append(g)
    confirmed = sorted(set(confirmed), key=lambda g: g.cells)
    for g in confirmed:
        audits.append(audit(g))
        ratios.append(diameter_ratio(g))
    return MinimizerRecord(
        n=n,
        lambda_min=best,
        minimizers=confirmed,
        audited=audits,
        enumerated_count=enumerated,
        mode=mode,
        candidates=len(cand),
        confirmed_residual=worst_res,
        diameter_ratios=ratios,
    )


def _check_search_mode(mode: str) -> None:
    if mode not in ("exhaustive", "pruned"):
        raise ValueError(f"mode must be 'exhaustive' or 'pruned', got {mode!r}")


def find_minimizers(n: int, mode: str = "exhaustive", tol: float = 1e-10) -> MinimizerRecord:
    """Exact lambda_D^(n) over all free n-ominoes and every minimizing class.

    ``pruned`` only evaluates strongly connected, walled-in candidates. Those
    are necessary conditions on a minimizer, so this is sound for the minimum
    but not for enumerating shapes in general.
    """
    _check_search_mode(mode)
    _check_cap(n, "free")
    shapes = [cells for _, cells in _enumerate_raw(n, "free", exact=n)]
    return _record(n, shapes, len(shapes), mode, tol)


def minimizer_table(n_max: int, mode: str = "exhaustive", tol: float = 1e-10) -> list[MinimizerRecord]:
    """Records for n = 1..n_max from a single enumeration pass."""
    _check_search_mode(mode)
    _check_cap(n_max, "free")
    by_size: dict[int, list] = {k: [] for k in range(1, n_max + 1)}
    for size, cells in _enumerate_raw(n_max, "free"):
        by_size[size].append(cells)
    table = []
    for k in range(1, n_max + 1):
        rec = _record(k, by_size[k], len(by_size[k]), mode, tol)
        log.info("n=%d lambda_min=%.12f minimizers=%d", k, rec.lambda_min, len(rec.minimizers))
        table.append(rec)
    return table


def is_strictly_decreasing(table: list[MinimizerRecord]) -> bool:
    return all(b.lambda_min < a.lambda_min for a, b in zip(table, table[1:]))


def diameter_ratio(g: Subgraph) -> float:
    """Diameter of the union of member squares divided by sqrt(|g|)."""
    pts = np.array(
        sorted({(c.x + dx, c.y + dy) for c in g for dx in (-0.5, 0.5) for dy in (-0.5, 0.5)}),
        dtype=float,
    )
    if len(pts) > 64:
        pts = pts[ConvexHull(pts).vertices]
    return float(pdist(pts).max() / math.sqrt(len(g)))
