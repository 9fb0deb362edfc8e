"""Discrete Laplacian with Dirichlet boundary on masked uniform grids.

Plain 5-point stencil on rectangles, embedded-boundary (cut-cell)
stencil on curved domains, shifted-Poisson solves and the principal
Dirichlet eigenpair via inverse power iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .domains import _DIRS, DiscretizedDomain
from .errors import MaxIterations, NoConvergence

INF_TIME = math.inf


@dataclass
class Field:
    """Scalar field over the interior nodes of a discretized domain.

    Values on and outside the boundary are identically 0 by the
    Dirichlet convention.  The time stamp may be a finite time,
    math.inf (stationary slice) or None (timeless).
    """

    dom: DiscretizedDomain
    values: np.ndarray
    time: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.dom.n_interior,):
            raise ValueError("field length must match interior node count")

    def to_grid(self, fill=0.0) -> np.ndarray:
        """Full (ny, nx) array with `fill` outside the interior."""
        g = np.full(self.dom.classification.shape, fill, dtype=float)
        iy, ix = self.dom.interior_idx[:, 0], self.dom.interior_idx[:, 1]
        g[iy, ix] = self.values
        return g

    def interp(self, pts) -> np.ndarray:
        """Bilinear interpolation at points (...,2), zero Dirichlet
        values used at non-interior grid nodes."""
        return bilinear_interp(self.dom, self.to_grid(), pts)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def field_from_function(dom: DiscretizedDomain, fn, time=None) -> Field:
    p = dom.interior_points
    return Field(dom, np.asarray(fn(p[:, 0], p[:, 1]), dtype=float), time)


def bilinear_interp(dom: DiscretizedDomain, grid: np.ndarray, pts):
    """Bilinear interpolation of a full-grid array at points (...,2)."""
    p = np.asarray(pts, dtype=float)
    scalar = p.ndim == 1
    p = np.atleast_2d(p)
    h = dom.h
    fx = (p[..., 0] - dom.xs[0]) / h
    fy = (p[..., 1] - dom.ys[0]) / h
    ix = np.clip(np.floor(fx).astype(int), 0, dom.xs.size - 2)
    iy = np.clip(np.floor(fy).astype(int), 0, dom.ys.size - 2)
    tx = np.clip(fx - ix, 0.0, 1.0)
    ty = np.clip(fy - iy, 0.0, 1.0)
    v = ((1 - tx) * (1 - ty) * grid[iy, ix]
         + tx * (1 - ty) * grid[iy, ix + 1]
         + (1 - tx) * ty * grid[iy + 1, ix]
         + tx * ty * grid[iy + 1, ix + 1])
    return float(v[0]) if scalar else v


# ---------------------------------------------------------------------------
# operator assembly
# ---------------------------------------------------------------------------

def neg_laplacian_matrix(dom: DiscretizedDomain) -> sp.csr_matrix:
    """Sparse matrix of -Laplacian on interior nodes (Dirichlet 0 outside).

    Full-interior nodes get the 5-point stencil; nodes with a cut
    neighbor get the nonuniform 3-point formula per axis
    u'' ~ 2[u_E/(tE(tE+tW)) + u_W/(tW(tE+tW)) - u_C/(tE tW)]/h^2
    with the boundary value 0, which is exact on per-axis quadratics.
    """
    if "neg_lap" in dom._cache:
        return dom._cache["neg_lap"]
    h2 = dom.h * dom.h
    N = dom.n_interior
    rows, cols, vals = [], [], []
    diag = np.zeros(N)
    idx = dom.index_of
    ny, nx = idx.shape
    # axis pairs: (E, W) are fraction columns (0, 1); (N, S) are (2, 3)
    for k in range(N):
        j, i = dom.interior_idx[k]
        for a0, a1 in ((0, 1), (2, 3)):
            tp = dom.fractions[k, a0]  # positive direction (E or N)
            tm = dom.fractions[k, a1]
            diag[k] += 2.0 / (tp * tm * h2)
            for a, t in ((a0, tp), (a1, tm)):
                diy, dix = _DIRS[a]
                jj, ii = j + diy, i + dix
                if 0 <= jj < ny and 0 <= ii < nx and idx[jj, ii] >= 0 \
                        and t == 1.0:
                    rows.append(k)
                    cols.append(idx[jj, ii])
                    vals.append(-2.0 / (t * (tp + tm) * h2))
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    A += sp.diags(diag)
    dom._cache["neg_lap"] = A.tocsr()
    return dom._cache["neg_lap"]


def apply_laplacian(f: Field) -> Field:
    """Discrete Laplacian of a field (Dirichlet 0 boundary)."""
    A = neg_laplacian_matrix(f.dom)
    return Field(f.dom, -(A @ f.values), f.time)


# ---------------------------------------------------------------------------
# linear solves
# ---------------------------------------------------------------------------

def _cg(matvec, b, x0, tol, max_iter):
    """Plain conjugate gradient with a fixed reduction order."""
    x = x0.copy()
    r = b - matvec(x)
    p = r.copy()
    rs = float(r @ r)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), 0.0
    for _ in range(max_iter):
        if math.sqrt(rs) <= tol * bnorm:
            return x, math.sqrt(rs) / bnorm
        Ap = matvec(p)
        alpha = rs / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise MaxIterations(
        f"conjugate gradient did not reach tolerance {tol} in "
        f"{max_iter} iterations", residual=math.sqrt(rs) / bnorm)


def solve_shifted_poisson(tau: float, rhs: Field, diag_shift=None,
                          x0=None) -> Field:
    """Solve (I + tau*(-Lap_h) + diag_shift) u = rhs to relative
    residual 1e-10.

    Conjugate gradient on rectangular grids (the operator is symmetric
    positive definite there); sparse LU on cut-cell grids, whose
    one-sided stencils are nonsymmetric (residual checked a posteriori).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    dom = rhs.dom
    A = neg_laplacian_matrix(dom)
    N = dom.n_interior
    b = rhs.values
    tol = 1e-10
    if dom.is_rectangular:
        if diag_shift is None:
            def matvec(v):
                return v + tau * (A @ v)
        else:
            def matvec(v):
                return v + tau * (A @ v) + diag_shift * v
        x0 = np.zeros(N) if x0 is None else np.asarray(x0, dtype=float)
        x, _ = _cg(matvec, b, x0, tol, 10 * max(N, 50))
        return Field(dom, x, rhs.time)
    # curved boundary: direct factorization, cached per (tau, no-shift)
    M = sp.identity(N, format="csc") + tau * A
    if diag_shift is not None:
        M = M + sp.diags(diag_shift)
        lu = splu(M.tocsc())
    else:
        key = ("shift_lu", tau)
        if key not in dom._cache:
            dom._cache[key] = splu(M.tocsc())
        lu = dom._cache[key]
    x = lu.solve(b)
    res = np.linalg.norm(M @ x - b)
    bn = np.linalg.norm(b)
    if bn > 0 and res > 1e-8 * bn:
        raise MaxIterations("direct solve residual above tolerance",
                            residual=res / bn)
    return Field(dom, x, rhs.time)


def poisson_solve(dom: DiscretizedDomain, rhs_values: np.ndarray):
    """Solve (-Lap_h) u = rhs (pure elliptic, no shift)."""
    key = "lap_lu"
    if key not in dom._cache:
        dom._cache[key] = splu(neg_laplacian_matrix(dom).tocsc())
    return dom._cache[key].solve(np.asarray(rhs_values, dtype=float))


# ---------------------------------------------------------------------------
# principal eigenpair
# ---------------------------------------------------------------------------

@dataclass
class EigenPair:
    lam: float
    phi: Field


def principal_eigenpair(dom: DiscretizedDomain) -> EigenPair:
    """Principal Dirichlet eigenpair of -Lap_h by inverse power iteration.

    Normalized to phi > 0 with sup norm 1; iterates until the Rayleigh
    quotient changes by at most 1e-10.
    """
    if dom.n_interior < 4:
        raise ValueError("need at least 4 interior nodes")
    key = "eigenpair"
    if key in dom._cache:
        return dom._cache[key]
    A = neg_laplacian_matrix(dom)
    if "lap_lu" not in dom._cache:
        dom._cache["lap_lu"] = splu(A.tocsc())
    lu = dom._cache["lap_lu"]
    v = np.ones(dom.n_interior)
    lam_old = np.inf
    for _ in range(500):
        w = lu.solve(v)
        w /= np.linalg.norm(w)
        Aw = A @ w
        lam = float(w @ Aw) / float(w @ w)
        resid = np.max(np.abs(Aw - lam * w)) / np.max(np.abs(w))
        if abs(lam - lam_old) <= 1e-10 and resid <= 1e-9 * lam:
            v = w
            break
        lam_old = lam
        v = w
    else:
        raise NoConvergence("inverse power iteration exceeded 500 iterations")
    if v.sum() < 0:
        v = -v
    v = v / np.max(np.abs(v))
    pair = EigenPair(lam=lam, phi=Field(dom, v))
    dom._cache[key] = pair
    return pair
