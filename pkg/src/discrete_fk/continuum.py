"""Continuum side: fine-grid masks of a lattice domain, finite-difference
Dirichlet eigenvalues, discrete disks and the convergence experiments.

Lengths are in lattice units (one cell = one unit square) unless a function
says otherwise. The rescaled domain ``G* = G / sqrt(n)`` has area 1 and its
eigenvalues are ``n`` times the lattice-unit ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jn_zeros

from .grid import Subgraph
from .spectral import lambda_d

J01 = float(jn_zeros(0, 1)[0])
DISK_TARGET = math.pi * J01**2  # first Dirichlet eigenvalue of the area-1 disk
DILATION = 2.0  # lattice units; 2/sqrt(n) after rescaling to G*
DENSE_FD_CAP = 1500
_TIE = 1e-9


@dataclass(frozen=True)
class RefinedMask:
    """Subcell rasterization of a lattice domain or of its l1-dilation.

    ``inside[i, j]`` is the subcell in row ``i`` (y increasing) and column
    ``j``; its centre is ``origin + ((j + 0.5) h, (i + 0.5) h)`` with ``h = 1/m``.
    """

    base: Subgraph
    m: int
    epsilon: float
    origin: tuple[float, float]
    inside: np.ndarray = field(repr=False)
    ties: int = 0  # subcell centres exactly at distance epsilon

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def h(self) -> float:
        """Subcell side in lattice units."""
        return 1.0 / self.m

    @property
    def delta(self) -> float:
        """Subcell side in G* units."""
        return 1.0 / (self.m * math.sqrt(self.n))

    @property
    def count(self) -> int:
        return int(self.inside.sum())

    @property
    def area(self) -> float:
        """Lattice-unit area; boundary-touching centres count one half."""
        return (self.count + 0.5 * self.ties) * self.h**2

    @property
    def area_star(self) -> float:
        return self.area / self.n

    def to_pgm(self) -> bytes:
        """Binary PGM (inside = 255), top row is the largest y."""
        H, W = self.inside.shape
        body = (np.flipud(self.inside).astype(np.uint8) * 255).tobytes()
        return f"P5\n{W} {H}\n255\n".encode() + body


def build_mask(g: Subgraph, m: int, epsilon: float = 0.0) -> RefinedMask:
    """Subcells whose centre lies within l1 distance < epsilon of the closed domain.

    epsilon = 0 gives the plain union of member squares. The distance to the
    union is the minimum over member squares of the per-square l1 distance.
    """
    if m < 1:
        raise ValueError("refinement m must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pad = math.ceil(epsilon)
    x0, x1, y0, y1 = g.bbox
    ox, oy = x0 - 0.5 - pad, y0 - 0.5 - pad
    W = (x1 - x0 + 1 + 2 * pad) * m
    H = (y1 - y0 + 1 + 2 * pad) * m
    inside = np.zeros((H, W), dtype=bool)
    if epsilon == 0:
        for c in g:
            j = (c.x - x0 + pad) * m
            i = (c.y - y0 + pad) * m
            inside[i : i + m, j : j + m] = True
        return RefinedMask(g, m, 0.0, (ox, oy), inside, 0)
    tie = np.zeros((H, W), dtype=bool)
    span = (1 + 2 * pad) * m
    local = (np.arange(span) + 0.5) / m - 0.5 - pad  # centre offsets from the cell centre
    dist1 = np.maximum(np.abs(local) - 0.5, 0.0)
    d = dist1[:, None] + dist1[None, :]
    hit = d < epsilon - _TIE
    edge = np.abs(d - epsilon) <= _TIE
    for c in g:
        j = (c.x - x0) * m
        i = (c.y - y0) * m
        inside[i : i + span, j : j + span] |= hit
        tie[i : i + span, j : j + span] |= edge
    tie &= ~inside
    return RefinedMask(g, m, float(epsilon), (ox, oy), inside, int(tie.sum()))


def fd_nodes(mask: RefinedMask) -> np.ndarray:
    """Grid vertices whose four surrounding subcells are all inside."""
    p = np.pad(mask.inside, 1)
    return p[:-1, :-1] & p[1:, :-1] & p[:-1, 1:] & p[1:, 1:]


def fd_operator(mask: RefinedMask) -> sp.csr_matrix:
    """Five-point Dirichlet Laplacian on the interior vertices, in lattice units."""
    node = fd_nodes(mask)
    idx = -np.ones(node.shape, dtype=np.int64)
    N = int(node.sum())
    if N == 0:
        raise ValueError("mask has no interior finite-difference nodes")
    idx[node] = np.arange(N)
    rows, cols = [], []
    for di, dj in ((0, 1), (1, 0)):
        a = idx[: idx.shape[0] - di, : idx.shape[1] - dj]
        b = idx[di:, dj:]
        both = (a >= 0) & (b >= 0)
        rows.append(a[both])
        cols.append(b[both])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    off = sp.csr_matrix((np.ones(r.size), (r, c)), shape=(N, N))
    A = 4.0 * sp.identity(N, format="csr") - off - off.T
    return (A / mask.h**2).tocsc()


def fd_lambda(mask: RefinedMask, units: str = "star") -> float:
    """Smallest eigenvalue of the five-point Dirichlet operator on the mask.

    Small problems use a dense symmetric solve; larger ones shift-invert
    Lanczos about 0 (the operator is positive definite).
    ``units="star"`` rescales to the area-normalized domain G*.
    """
    if not mask.inside.any():
        raise ValueError("empty mask")
    A = fd_operator(mask)
    N = A.shape[0]
    if N <= DENSE_FD_CAP:
        lam = float(sla.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, 0])[0])
    else:
        v0 = np.ones(N)
        lam = float(spla.eigsh(A, k=1, sigma=0.0, which="LM", v0=v0, return_eigenvectors=False)[0])
    if units == "star":
        return lam * mask.n
    if units == "lattice":
        return lam
    raise ValueError(f"units must be 'star' or 'lattice', got {units!r}")


@dataclass(frozen=True)
class FDEstimate:
    coarse: float
    fine: float
    m: int

    @property
    def extrapolated(self) -> float:
        return self.fine + (self.fine - self.coarse) / 3.0

    @property
    def uncertainty(self) -> float:
        return abs(self.fine - self.coarse)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "coarse": self.coarse,
            "fine": self.fine,
            "extrapolated": self.extrapolated,
            "uncertainty": self.uncertainty,
        }


def richardson(g: Subgraph, m: int, epsilon: float = 0.0) -> FDEstimate:
    """FD eigenvalue of G* (or its dilation) at m and 2m, second-order extrapolated."""
    a = fd_lambda(build_mask(g, m, epsilon))
    b = fd_lambda(build_mask(g, 2 * m, epsilon))
    return FDEstimate(a, b, m)


def upper_bound(lam_star: float, n: int) -> float | None:
    """``pi^2 lam / (pi^2 n - lam)``; None when the denominator is not positive."""
    den = math.pi**2 * n - lam_star
    if den <= 0:
        return None
    return math.pi**2 * lam_star / den


def lower_bound(lam_dil: float, n: int) -> float:
    """``lam / (n + (5/12) lam)`` with lam the eigenvalue of the dilated G*."""
    return lam_dil / (n + 5.0 / 12.0 * lam_dil)


def _status(margin: float | None, unc: float) -> str:
    if margin is None:
        return "out_of_domain"
    if margin > unc:
        return "holds"
    if margin >= -unc:
        return "inconclusive"
    return "violated"


@dataclass
class SandwichReport:
    n: int
    lambda_d: float
    star: FDEstimate
    dilated: FDEstimate
    upper: float | None
    upper_margin: float | None
    upper_uncertainty: float
    upper_status: str
    lower: float
    lower_margin: float
    lower_uncertainty: float
    lower_status: str

    @property
    def consistent(self) -> bool:
        """Both margins at least minus their FD uncertainty (in-domain only)."""
        return self.upper_status in ("holds", "inconclusive") and self.lower_status in (
            "holds",
            "inconclusive",
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "lambda_d": self.lambda_d,
            "lambda_star": self.star.to_json(),
            "lambda_dilated": self.dilated.to_json(),
            "upper": {
                "bound": self.upper,
                "margin": self.upper_margin,
                "uncertainty": self.upper_uncertainty,
                "status": self.upper_status,
            },
            "lower": {
                "bound": self.lower,
                "margin": self.lower_margin,
                "uncertainty": self.lower_uncertainty,
                "status": self.lower_status,
            },
        }


def sandwich_check(g: Subgraph, m: int = 16, tol: float = 1e-10) -> SandwichReport:
    """Evaluate both sides of the discrete/continuum eigenvalue sandwich.

    The FD values replace the continuum eigenvalues; the propagated
    uncertainty of each bound comes from the m vs 2m spread.
    """
    n = len(g)
    lam = lambda_d(g, tol).lambda_d
    star = richardson(g, m)
    dil = richardson(g, m, DILATION)

    s, u = star.extrapolated, star.uncertainty
    ub = upper_bound(s, n)
    ub_band = [upper_bound(s + du, n) for du in (-u, u)]
    if ub is None or any(v is None for v in ub_band):
        up_margin, up_unc = None, math.inf
    else:
        up_margin = ub - lam
        up_unc = max(abs(v - ub) for v in ub_band)

    d, w = dil.extrapolated, dil.uncertainty
    lb = lower_bound(d, n)
    lo_unc = max(abs(lower_bound(max(d + dw, 0.0), n) - lb) for dw in (-w, w))
    lo_margin = lam - lb
    return SandwichReport(
        n,
        lam,
        star,
        dil,
        ub,
        up_margin,
        up_unc,
        _status(up_margin, up_unc),
        lb,
        lo_margin,
        lo_unc,
        _status(lo_margin, lo_unc),
    )


# ---------------------------------------------------------------- disks


def discrete_disk(n: int, reverse: bool = False) -> Subgraph:
    """First n lattice points by (x^2 + y^2, x, y); ``reverse`` flips the tie order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    R = int(math.ceil(math.sqrt(n / math.pi))) + 2
    r = np.arange(-R, R + 1)
    X, Y = np.meshgrid(r, r)
    X, Y = X.ravel(), Y.ravel()
    N2 = X * X + Y * Y
    if reverse:
        order = np.lexsort((-Y, -X, N2))
    else:
        order = np.lexsort((Y, X, N2))
    take = order[:n]
    # the box holds every point of norm <= R - 1 > sqrt(n/pi) + 1, so the prefix is exact
    return Subgraph(zip(X[take].tolist(), Y[take].tolist()))


def gauss_count(n: int) -> tuple[int, float, float]:
    """Lattice points in the open disk of area n at the origin, with the Gauss bounds."""
    count = int(gauss_counts(np.array([n]))[0])
    s = math.sqrt(n * math.pi)
    return count, n - s + math.pi / 4, n + s + math.pi / 4


def gauss_counts(ns: np.ndarray) -> np.ndarray:
    """Vectorized ``#{x^2 + y^2 < n/pi}`` for an array of n."""
    ns = np.asarray(ns, dtype=float)
    R = int(math.ceil(math.sqrt(ns.max() / math.pi))) + 1
    r = np.arange(-R, R + 1)
    norms = np.sort((r[:, None] ** 2 + r[None, :] ** 2).ravel())
    return np.searchsorted(norms, ns / math.pi, side="left")


@dataclass
class DiskReport:
    n: int
    lambda_discrete: float  # n * lambda_D(D_n)
    lambda_continuum: float | None  # FD eigenvalue of D_n*
    lambda_continuum_target: float
    symdiff_area: float
    centroid: tuple[float, float]

    @property
    def deviation(self) -> float:
        return abs(self.lambda_discrete - self.lambda_continuum_target)

    @property
    def relative_deviation(self) -> float:
        return self.deviation / self.lambda_continuum_target

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "lambda_discrete": self.lambda_discrete,
            "lambda_continuum": self.lambda_continuum,
            "lambda_continuum_target": self.lambda_continuum_target,
            "deviation": self.deviation,
            "relative_deviation": self.relative_deviation,
            "symdiff_area": self.symdiff_area,
            "centroid": list(self.centroid),
        }


def disk_convergence(n_list, m: int | None = 4, samples_per_unit: int = 8, tol: float = 1e-10):
    out = []
    for n in n_list:
        g = discrete_disk(int(n))
        lam = len(g) * lambda_d(g, tol).lambda_d
        cont = fd_lambda(build_mask(g, m)) if m else None
        c = centroid(g)
        out.append(DiskReport(len(g), lam, cont, DISK_TARGET, symdiff_vs_disk(g, samples_per_unit), c))
    return out


def centroid(g: Subgraph) -> tuple[float, float]:
    """Centroid of the domain (mean of cell centres, since all squares are equal)."""
    pts = np.array(g.cells, dtype=float)
    return float(pts[:, 0].mean()), float(pts[:, 1].mean())


def _symdiff_at(g: Subgraph, s: int, cx: float, cy: float) -> float:
    n = len(g)
    R = math.sqrt(n / math.pi)
    x0, x1, y0, y1 = g.bbox
    lo_x = math.floor(min(x0 - 0.5, cx - R)) - 1
    hi_x = math.ceil(max(x1 + 0.5, cx + R)) + 1
    lo_y = math.floor(min(y0 - 0.5, cy - R)) - 1
    hi_y = math.ceil(max(y1 + 0.5, cy + R)) + 1
    px = lo_x + (np.arange((hi_x - lo_x) * s) + 0.5) / s
    py = lo_y + (np.arange((hi_y - lo_y) * s) + 0.5) / s
    # cell containing each sample: round to nearest integer (samples never sit on edges)
    occ = np.zeros((hi_y - lo_y + 2, hi_x - lo_x + 2), dtype=bool)
    for c in g:
        occ[c.y - lo_y, c.x - lo_x] = True
    ci = np.floor(px + 0.5).astype(int) - lo_x
    cj = np.floor(py + 0.5).astype(int) - lo_y
    in_g = occ[cj[:, None], ci[None, :]]
    in_d = (px[None, :] - cx) ** 2 + (py[:, None] - cy) ** 2 < R * R
    return float(np.count_nonzero(in_g ^ in_d)) / (s * s) / n


def symdiff_vs_disk(g: Subgraph, samples_per_unit: int = 8, refine: bool = False) -> float:
    """Area of G* symmetric-difference the area-1 disk centred at the centroid of G*.

    ``refine`` additionally searches centre offsets in a +-0.5 lattice-unit
    (+-0.5/sqrt(n) in G* units) 5 x 5 grid and keeps the smallest value.
    """
    if samples_per_unit < 1:
        raise ValueError("samples_per_unit must be >= 1")
    cx, cy = centroid(g)
    best = _symdiff_at(g, samples_per_unit, cx, cy)
    if refine:
        for dx in np.linspace(-0.5, 0.5, 5):
            for dy in np.linspace(-0.5, 0.5, 5):
                best = min(best, _symdiff_at(g, samples_per_unit, cx + dx, cy + dy))
    return best


def dilation_symdiff(g: Subgraph, m: int = 16, epsilon: float = DILATION) -> float:
    """Area of ``B_{eps/sqrt(n)}(G*)`` minus ``G*``, from the rasterized dilation."""
    if epsilon == 0:
        return 0.0
    return build_mask(g, m, epsilon).area_star - 1.0


def minkowski_area_rectangle(w: float, h: float, r: float) -> float:
    """Exact area of a w x h rectangle dilated by an l1 ball of radius r."""
    return w * h + 2 * (w + h) * r + 2 * r * r
