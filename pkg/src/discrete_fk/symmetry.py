"""Discrete Steiner symmetrizations and the permutation-cost oracles behind them.

Horizontal symmetrization recentres every row about ``x = 0``; vertical
symmetrization does the same for columns about ``y = 0``; diagonal
symmetrization recentres every slice ``y = x + h`` about the line ``y = -x``.
When a slice has even length the extra cell goes to the positive side
(right / up) for ``sign="positive"`` and to the negative side otherwise.

Permutations in the cost oracles are 1-based tuples: ``perm[p-1] = i_p``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import CapExceededError
from .grid import Cell, Subgraph, columns, diagonals, rows, walls_in
from .spectral import as_vector, lambda_d

AXES = ("horizontal", "vertical")
SIGNS = ("positive", "negative")

BRUTE_CAP = 8
BRUTE_PAIR_CAP = 5


# ---------------------------------------------------------------- centring


def run_start(k: int, sign: str = "positive") -> int:
    """First coordinate of the centred run of ``k`` consecutive integers."""
    if sign == "positive":
        return -((k - 1) // 2)
    if sign == "negative":
        return -(k // 2)
    raise ValueError(f"sign must be one of {SIGNS}, got {sign!r}")


def fill_order(k: int, sign: str = "positive") -> list[int]:
    """Coordinates of the centred run in fill order 0, 1, -1, 2, -2, ... (mirrored if negative)."""
    s = 1 if sign == "positive" else -1
    out = [0]
    step = 1
    while len(out) < k:
        out.append(s * step)
        if len(out) < k:
            out.append(-s * step)
        step += 1
    return out


def diagonal_start(h: int, s: int) -> int:
    """First x of the recentred size-``s`` run on diagonal ``y = x + h``."""
    return math.ceil(-(h + s - 1) / 2)


def diagonal_order(h: int, xs: Sequence[int]) -> list[int]:
    """Order x's by distance |2x + h| to ``y = -x``, ties to the right (larger x)."""
    return sorted(xs, key=lambda x: (abs(2 * x + h), -x))


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class StrictCertificates:
    """Slice indices proving a strict eigenvalue decrease."""

    axis: str
    disconnected_slice: tuple[int, ...] = ()
    mutual_nonwalling: tuple[tuple[int, int], ...] = ()

    @property
    def any(self) -> bool:
        return bool(self.disconnected_slice or self.mutual_nonwalling)

    def to_json(self) -> dict:
        return {
            "axis": self.axis,
            "disconnected_slice": list(self.disconnected_slice),
            "mutual_nonwalling": [list(p) for p in self.mutual_nonwalling],
        }


@dataclass(frozen=True)
class SymmetrizationOutcome:
    input: Subgraph
    output: Subgraph
    kind: str
    transported: dict | None = None
    lambda_before: float | None = None
    lambda_after: float | None = None
    strict_certificates: StrictCertificates | None = field(default=None)

    def to_json(self) -> dict:
        from .io import shape_to_json

        out = {
            "kind": self.kind,
            "before": shape_to_json(self.input)["cells"],
            "after": shape_to_json(self.output)["cells"],
            "lambda_before": self.lambda_before,
            "lambda_after": self.lambda_after,
        }
        if self.strict_certificates is not None:
            out["strict_certificates"] = self.strict_certificates.to_json()
        return out


def _check_axis(axis: str, sign: str) -> None:
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    if sign not in SIGNS:
        raise ValueError(f"sign must be one of {SIGNS}, got {sign!r}")


def symmetrized_cells(g: Subgraph, axis: str, sign: str = "positive") -> Subgraph:
    _check_axis(axis, sign)
    out = []
    if axis == "horizontal":
        for y, sl in rows(g).items():
            a = run_start(len(sl), sign)
            out.extend((x, y) for x in range(a, a + len(sl)))
    else:
        for x, sl in columns(g).items():
            a = run_start(len(sl), sign)
            out.extend((x, y) for y in range(a, a + len(sl)))
    return Subgraph(out)


def symmetrized_diagonal_cells(g: Subgraph) -> Subgraph:
    out = []
    for h, sl in diagonals(g).items():
        a = diagonal_start(h, len(sl))
        out.extend((x, x + h) for x in range(a, a + len(sl)))
    return Subgraph(out)


def strictness_certificates(g: Subgraph, axis: str) -> StrictCertificates:
    """Disconnected slices and adjacent mutually non-walling slice pairs along ``axis``."""
    _check_axis(axis, "positive")
    slices = rows(g) if axis == "horizontal" else columns(g)
    disconnected = tuple(h for h, sl in slices.items() if not sl.is_contiguous())
    pairs = []
    for h, sl in slices.items():
        nxt = slices.get(h + 1)
        if nxt is not None and not walls_in(sl, nxt) and not walls_in(nxt, sl):
            pairs.append((h, h + 1))
    return StrictCertificates(axis, disconnected, tuple(pairs))


def symmetrize_axis(
    g: Subgraph,
    axis: str = "horizontal",
    sign: str = "positive",
    f=None,
    compute_lambda: bool = True,
    tol: float = 1e-10,
) -> SymmetrizationOutcome:
    out = symmetrized_cells(g, axis, sign)
    lam0 = lam1 = None
    if compute_lambda:
        lam0 = lambda_d(g, tol).lambda_d
        lam1 = lambda_d(out, tol).lambda_d
    moved = None
    if f is not None:
        if axis == "horizontal":
            moved = transport_horizontal(g, f, sign)
        else:
            moved = transport_vertical(g, f, sign)
    return SymmetrizationOutcome(
        g, out, f"{axis}-{sign}", moved, lam0, lam1, strictness_certificates(g, axis)
    )


def symmetrize_diagonal(
    g: Subgraph, f=None, compute_lambda: bool = True, tol: float = 1e-10
) -> SymmetrizationOutcome:
    out = symmetrized_diagonal_cells(g)
    lam0 = lam1 = None
    if compute_lambda:
        lam0 = lambda_d(g, tol).lambda_d
        lam1 = lambda_d(out, tol).lambda_d
    moved = transport_diagonal(g, f) if f is not None else None
    return SymmetrizationOutcome(g, out, "diagonal", moved, lam0, lam1, None)


VARIANTS = (
    ("horizontal", "positive"),
    ("horizontal", "negative"),
    ("vertical", "positive"),
    ("vertical", "negative"),
    ("diagonal", None),
)


def symmetrize(g: Subgraph, kind: str, sign: str | None = "positive", **kw) -> SymmetrizationOutcome:
    if kind == "diagonal":
        return symmetrize_diagonal(g, **kw)
    return symmetrize_axis(g, kind, sign or "positive", **kw)


# ---------------------------------------------------------------- transport


def _values(g: Subgraph, f) -> dict:
    v = as_vector(g, f)
    return dict(zip(g.cells, v.tolist()))


def transport_horizontal(g: Subgraph, f, sign: str = "positive") -> dict:
    """Per row: values descending (ties by original x) placed at x = 0, 1, -1, 2, ..."""
    vals = _values(g, f)
    out = {}
    for y, sl in rows(g).items():
        ranked = sorted(sl.cells, key=lambda c: (-vals[c], c.x))
        for c, x in zip(ranked, fill_order(len(ranked), sign)):
            out[Cell(x, y)] = vals[c]
    return out


def transport_vertical(g: Subgraph, f, sign: str = "positive") -> dict:
    """Column analogue of :func:`transport_horizontal` (fill order along y)."""
    vals = _values(g, f)
    out = {}
    for x, sl in columns(g).items():
        ranked = sorted(sl.cells, key=lambda c: (-vals[c], c.y))
        for c, y in zip(ranked, fill_order(len(ranked), sign)):
            out[Cell(x, y)] = vals[c]
    return out


def transport_diagonal(g: Subgraph, f) -> dict:
    """Per diagonal: values descending placed by increasing distance to ``y = -x``."""
    vals = _values(g, f)
    out = {}
    for h, sl in diagonals(g).items():
        ranked = sorted(sl.cells, key=lambda c: (-vals[c], c.x))
        a = diagonal_start(h, len(sl))
        targets = diagonal_order(h, range(a, a + len(sl)))
        for c, x in zip(ranked, targets):
            out[Cell(x, x + h)] = vals[c]
    return out


# ---------------------------------------------------------------- slice energies


def _lookup(f: Mapping, x: int, y: int) -> float:
    return f.get((x, y), 0.0)


def horizontal_energy(g: Subgraph, f, k: int) -> float:
    """``H_k(f)``: squared differences along row k, over the inflated bounding box."""
    vals = _values(g, f)
    x0, x1, _, _ = g.bbox
    return sum((_lookup(vals, j + 1, k) - _lookup(vals, j, k)) ** 2 for j in range(x0 - 1, x1 + 1))


def vertical_energy(g: Subgraph, f, k: int) -> float:
    """``V_k(f)``: squared differences between rows k and k + 1, over the inflated bounding box."""
    vals = _values(g, f)
    x0, x1, _, _ = g.bbox
    return sum((_lookup(vals, j, k + 1) - _lookup(vals, j, k)) ** 2 for j in range(x0 - 1, x1 + 2))


# ---------------------------------------------------------------- permutation costs


def _check_perm(perm: Sequence[int], n: int) -> None:
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation of 1..{n}")


def rhat(xs: Sequence[float], e0: float, e_np1: float, perm: Sequence[int]) -> float:
    """Path cost ``(e0 - x_{i1})^2 + sum (x_{ip} - x_{ip+1})^2 + (x_{in} - e_{n+1})^2``."""
    _check_perm(perm, len(xs))
    seq = [e0] + [xs[i - 1] for i in perm] + [e_np1]
    return float(sum((a - b) ** 2 for a, b in zip(seq, seq[1:])))


def rtilde(xs: Sequence[float], ys: Sequence[float], perm: Sequence[int]) -> float:
    """Pairing cost ``sum_p (x_p - y_{ip})^2``."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} xs vs {len(ys)} ys")
    _check_perm(perm, len(xs))
    return float(sum((x - ys[i - 1]) ** 2 for x, i in zip(xs, perm)))


def zigzag(xs: Sequence[float], ys: Sequence[float], permI, permJ) -> list[float]:
    """Chain ``y0, x_{i1}, y_{j1}, ..., x_{in}, y_{jn}, x0`` (xs[0] = x0, ys[0] = y0)."""
    seq = [ys[0]]
    for i, j in zip(permI, permJ):
        seq.append(xs[i])
        seq.append(ys[j])
    seq.append(xs[0])
    return seq


def rbar(xs: Sequence[float], ys: Sequence[float], permI, permJ) -> float:
    """Zigzag cost; ``xs = (x0, x1..xn)`` and ``ys = (y0, y1..yn)`` carry their endpoints first."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} xs vs {len(ys)} ys")
    n = len(xs) - 1
    if n < 1:
        raise ValueError("need at least one value besides the endpoints")
    _check_perm(permI, n)
    _check_perm(permJ, n)
    seq = zigzag(xs, ys, permI, permJ)
    return float(sum((a - b) ** 2 for a, b in zip(seq, seq[1:])))


def brute_min(kind: str, xs, ys=None, e0: float = 0.0, e_np1: float = 0.0, rtol: float = 1e-12):
    """Exhaustive minimum and every attaining permutation (or permutation pair for rbar)."""
    if kind == "rbar":
        n = len(xs) - 1
        if n > BRUTE_PAIR_CAP:
            raise CapExceededError(f"rbar brute force capped at n={BRUTE_PAIR_CAP}")
        perms = list(itertools.permutations(range(1, n + 1)))
        cands = [((p, q), rbar(xs, ys, p, q)) for p in perms for q in perms]
    else:
        n = len(xs)
        if n > BRUTE_CAP:
            raise CapExceededError(f"brute force capped at n={BRUTE_CAP}")
        perms = itertools.permutations(range(1, n + 1))
        if kind == "rhat":
            cands = [(p, rhat(xs, e0, e_np1, p)) for p in perms]
        elif kind == "rtilde":
            cands = [(p, rtilde(xs, ys, p)) for p in perms]
        else:
            raise ValueError(f"unknown cost {kind!r}")
    best = min(c for _, c in cands)
    slack = rtol * max(1.0, abs(best))
    return best, [p for p, c in cands if c <= best + slack]


def claimed_minimizers(kind: str, n: int):
    """J_R, J_L, the identity, or the diagonal (I, J) pair as 1-based tuples."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind in ("J_R", "J_L"):
        pos = [0] * n
        centre = math.ceil(n / 2)
        pos[centre - 1] = n
        right, left = centre + 1, centre - 1
        for v in range(n - 1, 0, -1):
            # alternate: right of the centre first, then left
            if (n - 1 - v) % 2 == 0 and right <= n or left < 1:
                pos[right - 1] = v
                right += 1
            else:
                pos[left - 1] = v
                left -= 1
        jr = tuple(pos)
        # J_L is the mirror image of J_R, so that its largest entry leans left
        return jr if kind == "J_R" else jr[::-1]
    if kind == "identity":
        return tuple(range(1, n + 1))
    if kind == "diagonal":
        # I fills positions 1, n, 2, n-1, ...; J fills n, 1, n-1, 2, ...; both with 1, 2, 3, ...
        front, back = list(range(1, n + 1)), list(range(n, 0, -1))
        order_i = [front[p // 2] if p % 2 == 0 else back[p // 2] for p in range(n)]
        order_j = [back[p // 2] if p % 2 == 0 else front[p // 2] for p in range(n)]
        I, J = [0] * n, [0] * n
        for value, p in enumerate(order_i, start=1):
            I[p - 1] = value
        for value, p in enumerate(order_j, start=1):
            J[p - 1] = value
        return tuple(I), tuple(J)
    raise ValueError(f"unknown minimizer kind {kind!r}")


def switch(perm: Sequence[int], l: int, m: int) -> tuple[int, ...]:
    """Switch operator S_(l,m): reverse the 1-based segment ``[l, m]``."""
    n = len(perm)
    if not 1 <= l <= m <= n:
        raise ValueError(f"need 1 <= l <= m <= {n}, got l={l}, m={m}")
    p = list(perm)
    p[l - 1 : m] = p[l - 1 : m][::-1]
    return tuple(p)


def _switch_or_keep(perm, l, m):
    return tuple(perm) if m < l else switch(perm, l, m)


def switch_lemma(which: int, xs, ys, permI, permJ, l: int, m: int):
    """Apply switch lemma ``which`` (1..4) at (l, m) if its hypothesis holds.

    Lemmas 1/2 move ``S_(l,m)`` on I and ``S_(l,m-1)`` on J; lemmas 3/4 move
    ``S_(l+1,m)`` on I and ``S_(l,m)`` on J. Index ``j_0`` stands for ``y0`` and
    ``i_{n+1}`` for ``x0``. Returns the new pair, or None when the hypothesis fails.
    """
    n = len(permI)
    if not 1 <= l <= m <= n:
        raise ValueError(f"need 1 <= l <= m <= {n}, got l={l}, m={m}")
    I = (0,) + tuple(permI) + (0,)  # I[0] unused, I[n+1] -> x0
    J = (0,) + tuple(permJ)  # J[0] -> y0
    x = lambda p: xs[I[p]]  # noqa: E731
    y = lambda p: ys[J[p]]  # noqa: E731
    if which in (1, 2):
        a, b = x(m) <= x(l), y(l - 1) <= y(m)
        ok = (a and b) if which == 1 else (x(l) <= x(m) and y(m) <= y(l - 1))
        if not ok:
            return None
        return switch(permI, l, m), _switch_or_keep(permJ, l, m - 1)
    if which in (3, 4):
        if which == 3:
            ok = y(m) <= y(l) and x(l) <= x(m + 1)
        else:
            ok = y(l) <= y(m) and x(m + 1) <= x(l)
        if not ok:
            return None
        return _switch_or_keep(permI, l + 1, m), switch(permJ, l, m)
    raise ValueError("switch lemmas are numbered 1..4")


def strict_horizontal_hypothesis(xs, perm, e0: float = 0.0, e_np1: float = 0.0) -> bool:
    """Some l < k with ``x_{il} > x_{ik}`` and ``x_{i(l-1)} < x_{i(k+1)}`` (i_0 -> e0, i_{n+1} -> e_{n+1})."""
    seq = [e0] + [xs[i - 1] for i in perm] + [e_np1]
    n = len(perm)
    for l in range(1, n + 1):
        for k in range(l + 1, n + 1):
            if seq[l] > seq[k] and seq[l - 1] < seq[k + 1]:
                return True
    return False


def strict_vertical_hypothesis(xs, ys, perm) -> bool:
    """Some k, l with ``x_k > x_l`` and ``y_{il} > y_{ik}``."""
    n = len(perm)
    for k in range(n):
        for l in range(n):
            if xs[k] > xs[l] and ys[perm[l] - 1] > ys[perm[k] - 1]:
                return True
    return False


def random_instance(rng: np.random.Generator, n: int, distinct: bool = True) -> list[float]:
    """Ascending nonnegative test values."""
    if distinct:
        return sorted(rng.choice(np.arange(1, 10 * n + 10), size=n, replace=False).astype(float) / 3)
    return sorted(rng.integers(0, 4, size=n).astype(float))
