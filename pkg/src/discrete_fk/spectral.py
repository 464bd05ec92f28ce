"""Combinatorial Dirichlet Laplacian L_D = 4I - A and its lowest eigenpair.

The eigensolver is power iteration on ``M = I - L_D/8``. ``P_D = I - L_D/4``
would be the natural choice, but Z^2 is bipartite so the spectrum of P_D is
symmetric about 0 and plain power iteration oscillates between the +rho and
-rho eigenvectors. M has diagonal 1/2, is primitive on each component, and
its top eigenvalue mu gives ``lambda_D = 8 (1 - mu)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import CapExceededError, ConvergenceError
from .grid import Cell, Subgraph, automorphisms, components

log = logging.getLogger(__name__)

DENSE_CAP = 4096
DEFAULT_TOL = 1e-10
MAX_ITER = 10**6


@dataclass(frozen=True)
class DirichletOperator:
    """L_D on a fixed vertex order (cells sorted by (y, x))."""

    cells: tuple
    index: Mapping
    neighbors: np.ndarray  # (n, 4) in-graph neighbour indices, padded with n
    degree: np.ndarray  # in-graph degree per vertex

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def boundary_count(self) -> np.ndarray:
        """``4 - deg``: number of boundary neighbours of each vertex."""
        return 4 - self.degree

    def matvec(self, v: np.ndarray) -> np.ndarray:
        ext = np.append(v, 0.0)
        return 4.0 * v - ext[self.neighbors].sum(axis=1)

    def adjacency(self) -> sp.csr_matrix:
        rows, cols = np.nonzero(self.neighbors < self.n)
        data = np.ones(rows.size)
        return sp.csr_matrix((data, (rows, self.neighbors[rows, cols])), shape=(self.n, self.n))

    def sparse(self) -> sp.csr_matrix:
        return (4.0 * sp.identity(self.n, format="csr") - self.adjacency()).tocsr()

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()


def assemble(g: Subgraph) -> DirichletOperator:
    cells = g.cells
    index = {c: i for i, c in enumerate(cells)}
    n = len(cells)
    nbr = np.full((n, 4), n, dtype=np.intp)
    for i, c in enumerate(cells):
        for j, nb in enumerate(c.neighbors()):
            k = index.get(nb)
            if k is not None:
                nbr[i, j] = k
    deg = (nbr < n).sum(axis=1)
    return DirichletOperator(cells, index, nbr, deg)


def assemble_pd(g: Subgraph) -> sp.csr_matrix:
    """Substochastic step matrix ``P_D = I - L_D/4`` of the absorbing walk."""
    return (0.25 * assemble(g).adjacency()).tocsr()


@dataclass(frozen=True)
class SpectralReport:
    lambda_d: float
    cells: tuple
    values: np.ndarray = field(repr=False)
    residual: float = 0.0
    iterations: int = 0
    method: str = "power"

    @property
    def eigenfunction(self) -> dict:
        return {c: float(v) for c, v in zip(self.cells, self.values)}

    def to_json(self) -> dict:
        return {
            "lambda_d": float(self.lambda_d),
            "residual": float(self.residual),
            "iterations": int(self.iterations),
            "method": self.method,
            "eigenfunction": [[c.x, c.y, float(v)] for c, v in zip(self.cells, self.values)],
        }


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # first entry is the smallest (y, x) cell of the component
    return -v if v[0] < 0 else v


def _dense_pair(op: DirichletOperator) -> tuple[float, np.ndarray]:
    w, V = np.linalg.eigh(op.dense())
    return float(w[0]), _fix_sign(V[:, 0])


def _power(op: DirichletOperator, tol: float, max_iter: int):
    """Power iteration on M = I - L/8; returns (lambda, vector, residual, iterations)."""
    n = op.n
    v = np.ones(n) / np.sqrt(n)
    lam, res = 4.0, np.inf
    for it in range(1, max_iter + 1):
        Lv = op.matvec(v)
        lam = float(v @ Lv)  # Rayleigh quotient, v has unit norm
        res = float(np.linalg.norm(Lv - lam * v))
        if res <= tol:
            return lam, v, res, it
        w = v - Lv / 8.0
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} in {max_iter} iterations",
        best_estimate=lam,
        residual=res,
        iterations=max_iter,
    )


def _component_pair(g: Subgraph, tol: float, max_iter: int, method: str):
    op = assemble(g)
    if method == "dense":
        if op.n > DENSE_CAP:
            raise CapExceededError(f"dense solver capped at {DENSE_CAP} cells, got {op.n}")
        lam, v = _dense_pair(op)
        res = float(np.linalg.norm(op.matvec(v) - lam * v))
        return lam, v, res, 0, "dense"
    try:
        lam, v, res, it = _power(op, tol, max_iter)
        return lam, _fix_sign(v), res, it, "power"
    except ConvergenceError as exc:
        if op.n > DENSE_CAP:
            raise
        log.warning("%s; falling back to dense solver", exc)
        lam, v = _dense_pair(op)
        res = float(np.linalg.norm(op.matvec(v) - lam * v))
        return lam, v, res, max_iter, "dense"


def lambda_d(
    g: Subgraph, tol: float = DEFAULT_TOL, method: str = "power", max_iter: int = MAX_ITER
) -> SpectralReport:
    """Smallest Dirichlet eigenvalue of ``g`` with its principal eigenfunction.

    Disconnected inputs are solved per component (L_D is block diagonal) and
    the smallest value wins; the eigenfunction is supported on the first
    minimizing component and zero elsewhere.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("power", "dense"):
        raise ValueError(f"method must be 'power' or 'dense', got {method!r}")
    comps = components(g)
    best = None
    total_it = 0
    for comp in comps:
        lam, v, res, it, used = _component_pair(comp, tol, max_iter, method)
        total_it += it
        if best is None or lam < best[0]:
            best = (lam, comp, v, res, used)
    lam, comp, v, res, used = best
    values = np.zeros(len(g))
    if len(comps) == 1:
        values[:] = v
    else:
        pos = {c: i for i, c in enumerate(g.cells)}
        for c, val in zip(comp.cells, v):
            values[pos[c]] = val
    return SpectralReport(lam, g.cells, values, res, total_it, used)


def dense_spectrum(g: Subgraph) -> np.ndarray:
    """All eigenvalues of L_D, ascending."""
    if len(g) > DENSE_CAP:
        raise CapExceededError(f"dense solver capped at {DENSE_CAP} cells, got {len(g)}")
    return np.linalg.eigvalsh(assemble(g).dense())


def as_vector(g: Subgraph, f) -> np.ndarray:
    """Accept a Cell->value mapping or an array aligned with ``g.cells``."""
    if isinstance(f, Mapping):
        return np.array([float(f.get(c, 0.0)) for c in g.cells])
    v = np.asarray(f, dtype=float)
    if v.shape != (len(g),):
        raise ValueError(f"function has shape {v.shape}, expected ({len(g)},)")
    return v


def dirichlet_energy(g: Subgraph, f) -> float:
    """Sum of squared differences over all edges of the closure (f = 0 off g)."""
    v = as_vector(g, f)
    op = assemble(g)
    ext = np.append(v, 0.0)
    inner = 0.0
    for j in (0, 2):  # right and up neighbours: each in-graph edge once
        mask = op.neighbors[:, j] < op.n
        inner += float(np.sum((v[mask] - ext[op.neighbors[mask, j]]) ** 2))
    return inner + float(np.sum(op.boundary_count * v**2))


def rayleigh(g: Subgraph, f) -> float:
    v = as_vector(g, f)
    denom = float(v @ v)
    if denom == 0.0:
        raise ValueError("Rayleigh quotient undefined for f identically zero")
    return dirichlet_energy(g, v) / denom


def boundary_identity_residual(g: Subgraph, r: SpectralReport) -> float:
    """``|sum_x d(x) f(x) - lambda_D ||f||_1|`` with d(x) the boundary-edge count."""
    op = assemble(g)
    f = as_vector(g, r.eigenfunction)
    return abs(float(op.boundary_count @ f) - r.lambda_d * float(np.abs(f).sum()))


def automorphism_symmetry_residual(g: Subgraph, r: SpectralReport) -> float:
    """Max over automorphisms chi and cells c of ``|f(c) - f(chi(c))|``."""
    f = r.eigenfunction
    worst = 0.0
    for t in automorphisms(g):
        for c in g:
            worst = max(worst, abs(f[c] - f[Cell(*t.apply(c))]))
    return worst
