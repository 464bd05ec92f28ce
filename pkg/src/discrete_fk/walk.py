"""Absorbing simple random walk on a lattice subgraph.

A walker at a member cell steps to one of its four Z^2 neighbours uniformly
and is killed on leaving the subgraph. Survival after k steps from cell i
is ``p_k = || P_D^k e_i ||_1`` with ``P_D = I - L_D/4``.

Z^2 is bipartite, so P_D has eigenvalues +rho and -rho together and the
one-step ratio p_{k+1}/p_k can oscillate forever. Decay rates are therefore
read off two-step ratios and even-k fits, where the -rho mode has the same
sign as the +rho mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Cell, Subgraph
from .spectral import assemble_pd, lambda_d

CHUNK = 1 << 18


@dataclass(frozen=True)
class SurvivalCurve:
    start: Cell
    probabilities: np.ndarray = field(repr=False)
    log_probabilities: np.ndarray = field(repr=False)
    trials: int | None = None
    seed: int | None = None

    @property
    def K(self) -> int:
        return len(self.probabilities) - 1

    @property
    def decay_estimate(self) -> float:
        """Two-step root ratio ``sqrt(p_K / p_{K-2})``; tends to (4 - lambda_D)/4."""
        lp = self.log_probabilities
        if len(lp) < 3 or not np.isfinite(lp[-1]) or not np.isfinite(lp[-3]):
            return float("nan")
        return float(math.exp((lp[-1] - lp[-3]) / 2.0))


def _start_index(g: Subgraph, start) -> int:
    c = Cell(int(start[0]), int(start[1]))
    if c not in g:
        raise ValueError(f"start cell {tuple(c)} is not in the subgraph")
    return g.cells.index(c)


def survival_exact(g: Subgraph, start, K: int) -> SurvivalCurve:
    """p_k for k = 0..K by repeated sparse application of P_D.

    The state vector is renormalized every step and its log-norm tracked, so
    long horizons do not underflow.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    i = _start_index(g, start)
    P = assemble_pd(g)
    v = np.zeros(len(g))
    v[i] = 1.0
    logp = np.empty(K + 1)
    logp[0] = 0.0
    acc = 0.0
    for k in range(1, K + 1):
        v = P @ v
        s = float(v.sum())
        if s <= 0.0:
            logp[k:] = -np.inf
            break
        acc += math.log(s)
        v /= s
        logp[k] = acc
    return SurvivalCurve(Cell(*g.cells[i]), np.exp(logp), logp)


def survival_mc(g: Subgraph, start, K: int, trials: int, seed: int) -> SurvivalCurve:
    """Empirical survival frequencies from ``trials`` independent walkers.

    Walkers run in fixed-size chunks, chunk c drawing from
    ``Philox(SeedSequence([seed, c]))``; the result depends only on
    (seed, trials), not on how chunks are scheduled.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if K < 0:
        raise ValueError("K must be >= 0")
    i = _start_index(g, start)
    sx, sy = g.cells[i]
    x0, x1, y0, y1 = g.bbox
    occ = np.zeros((y1 - y0 + 3, x1 - x0 + 3), dtype=bool)
    for c in g:
        occ[c.y - y0 + 1, c.x - x0 + 1] = True
    dx = np.array([1, -1, 0, 0])
    dy = np.array([0, 0, 1, -1])
    alive = np.zeros(K + 1, dtype=np.int64)
    for chunk, lo in enumerate(range(0, trials, CHUNK)):
        size = min(CHUNK, trials - lo)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))
        px = np.full(size, sx - x0 + 1)
        py = np.full(size, sy - y0 + 1)
        alive[0] += size
        for k in range(1, K + 1):
            if px.size == 0:
                break
            step = rng.integers(0, 4, size=px.size)
            px = px + dx[step]
            py = py + dy[step]
            keep = occ[py, px]
            px, py = px[keep], py[keep]
            alive[k] += px.size
    p = alive / trials
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    return SurvivalCurve(Cell(sx, sy), p, logp, trials, seed)


def mc_band(p_exact: np.ndarray, trials: int, sigmas: float = 3.0) -> np.ndarray:
    """``sigmas`` binomial standard deviations around the exact probabilities."""
    p = np.asarray(p_exact, dtype=float)
    return sigmas * np.sqrt(p * (1.0 - p) / trials)


def central_cell(g: Subgraph) -> Cell:
    """Member cell closest to the centroid; ties by (y, x)."""
    pts = np.array(g.cells, dtype=float)
    c = pts.mean(axis=0)
    d = ((pts - c) ** 2).sum(axis=1)
    return g.cells[int(np.argmin(d))]  # argmin keeps the first, i.e. smallest (y, x)


@dataclass
class DecayReport:
    slope: float
    expected: float
    intercept: float
    lambda_g: float
    lambda_h: float
    diverges: bool
    window: tuple[int, int]

    @property
    def relative_error(self) -> float:
        if self.expected == 0:
            return abs(self.slope)
        return abs(self.slope - self.expected) / abs(self.expected)

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "expected": self.expected,
            "relative_error": self.relative_error,
            "intercept": self.intercept,
            "lambda_g": self.lambda_g,
            "lambda_h": self.lambda_h,
            "diverges": self.diverges,
            "window": list(self.window),
        }


def decay_ratio(g: Subgraph, h: Subgraph, K: int = 200, start_g=None, start_h=None) -> DecayReport:
    """Slope of ``log(p_k^G / p_k^H)`` over even k in [K/2, K].

    The expected slope is ``log((4 - lambda_D(G)) / (4 - lambda_D(H)))``;
    ``diverges`` is set when lambda_D(G) < lambda_D(H), in which case the
    survival ratio grows without bound. The prefactor (intercept) is reported
    but not compared with anything.
    """
    if K < 4:
        raise ValueError("K must be >= 4")
    lg = lambda_d(g).lambda_d
    lh = lambda_d(h).lambda_d
    if lg >= 4.0 - 1e-12 or lh >= 4.0 - 1e-12:
        raise ValueError("decay ratio is degenerate when lambda_D = 4 (walker dies at step 1)")
    sg = survival_exact(g, start_g if start_g is not None else central_cell(g), K)
    sh = survival_exact(h, start_h if start_h is not None else central_cell(h), K)
    ks = np.arange(K + 1)
    sel = (ks >= K // 2) & (ks % 2 == 0)
    r = sg.log_probabilities[sel] - sh.log_probabilities[sel]
    if not np.all(np.isfinite(r)):
        raise ValueError("survival vanished inside the fit window")
    slope, icept = np.polyfit(ks[sel], r, 1)
    expected = math.log((4.0 - lg) / (4.0 - lh))
    return DecayReport(float(slope), expected, float(icept), lg, lh, lg < lh, (K // 2, K))
