"""Least concave majorant and concave-approximation certificates.

Given a bounded sampled function f, computes the least concave majorant
g_hat via the upper convex hull of the lifted point cloud, then the
concave approximant g = g_hat - 0.5 ||g_hat - f||_inf.  The certificate
checks the distance against k_n * delta where delta is the measured
concavity defect of f and k_n = n(n+3)/(4(n+1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import HullDegenerate
from .operators import Field


def hyers_ulam_constant(n: int) -> float:
    return n * (n + 3) / (4.0 * (n + 1))


@dataclass
class EnvelopeResult:
    g: np.ndarray          # concave approximant at the sample points
    g_hat: np.ndarray      # least concave majorant at the sample points
    distance: float        # 0.5 * ||g_hat - f||_inf
    delta: float           # measured concavity defect of f
    k_n: float
    bound_ok: bool
    dimension: int


# ---------------------------------------------------------------------------
# 1-D sections
# ---------------------------------------------------------------------------

def _upper_envelope_1d(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least concave majorant of samples on a 1-D grid (values at x)."""
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    # upper hull by a monotone-chain sweep
    hull = []  # indices into xs
    for i in range(len(xs)):
        while len(hull) >= 2:
            i1, i2 = hull[-2], hull[-1]
            cross = (xs[i2] - xs[i1]) * (ys[i] - ys[i1]) \
                - (ys[i2] - ys[i1]) * (xs[i] - xs[i1])
            if cross >= 0:  # middle point below the chord: drop it
                hull.pop()
            else:
                break
        hull.append(i)
    hx, hy = xs[hull], ys[hull]
    env_sorted = np.interp(xs, hx, hy)
    env = np.empty_like(env_sorted)
    env[order] = env_sorted
    return env


def _defect_1d(x: np.ndarray, y: np.ndarray) -> float:
    """Worst negative concavity-function value over sample triples
    (endpoints at samples, middle point at every sample between)."""
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    n = len(xs)
    worst = 0.0
    for i in range(n - 2):
        for j in range(i + 2, n):
            lam = (xs[i + 1:j] - xs[i]) / (xs[j] - xs[i])
            c = ys[i + 1:j] - lam * ys[j] - (1 - lam) * ys[i]
            m = c.min()
            if m < worst:
                worst = m
    return -worst


# ---------------------------------------------------------------------------
# 2-D fields
# ---------------------------------------------------------------------------

def _upper_envelope_2d(pts: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Least concave majorant at the sample points via the lifted hull:
    the envelope is the pointwise minimum of the upper-facet planes."""
    cloud = np.column_stack([pts, vals])
    try:
        hull = ConvexHull(cloud)
    except QhullError as exc:
        raise HullDegenerate(str(exc)) from exc
    eqs = hull.equations  # outward normals: n . x + d = 0
    upper = eqs[eqs[:, 2] > 1e-12]
    if upper.shape[0] == 0:
        raise HullDegenerate("no upper facets: samples are degenerate")
    # plane value z = -(n0 x + n1 y + d)/n2 per facet; envelope = min
    z = -(upper[:, 0][:, None] * pts[:, 0][None, :]
          + upper[:, 1][:, None] * pts[:, 1][None, :]
          + upper[:, 3][:, None]) / upper[:, 2][:, None]
    env = z.min(axis=0)
    return np.maximum(env, vals)  # guard roundoff: majorant dominates f


def _defect_2d(pts: np.ndarray, vals: np.ndarray, lambdas=None,
               interp=None) -> float:
    """Concavity defect over sample pairs and a lambda grid; the middle
    value comes from `interp` (bilinear) when provided."""
    lambdas = np.linspace(0, 1, 17)[1:-1] if lambdas is None else lambdas
    n = len(pts)
    i1, i3 = np.triu_indices(n, k=1)
    worst = 0.0
    for lam in lambdas:
        x2 = lam * pts[i3] + (1 - lam) * pts[i1]
        if interp is not None:
            v2 = interp(x2)
        else:
            # nearest-sample middle values (coarse but certificate-safe)
            d2 = ((x2[:, None, 0] - pts[None, :, 0]) ** 2
                  + (x2[:, None, 1] - pts[None, :, 1]) ** 2)
            v2 = vals[np.argmin(d2, axis=1)]
        c = v2 - lam * vals[i3] - (1 - lam) * vals[i1]
        worst = min(worst, float(c.min()))
    return -worst


def concave_approximation(f, section=None, max_nodes: int = 600) \
        -> EnvelopeResult:
    """Concave approximant with a distance certificate.

    f may be a Field (2-D) or a tuple (x, values) for a 1-D section.
    Returns the approximant, the sup-distance 0.5 ||g_hat - f||, the
    measured defect delta, and the bound check distance <= k_n delta.
    """
    if isinstance(f, tuple) or section is not None:
        x, y = f if isinstance(f, tuple) else section
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if len(np.unique(x)) < 2:
            raise HullDegenerate("need at least 2 distinct sample abscissae")
        g_hat = _upper_envelope_1d(x, y)
        gap = float(np.max(g_hat - y))
        delta = _defect_1d(x, y)
        k = hyers_ulam_constant(1)
        dist = 0.5 * gap
        return EnvelopeResult(g=g_hat - dist, g_hat=g_hat, distance=dist,
                              delta=delta, k_n=k,
                              bound_ok=dist <= k * delta + 1e-12,
                              dimension=1)
    if not isinstance(f, Field):
        raise TypeError("expected a Field or a 1-D (x, values) tuple")
    dom = f.dom
    pts = dom.interior_points
    vals = f.values
    if len(pts) > max_nodes:
        stride = int(np.ceil(np.sqrt(len(pts) / max_nodes)))
        iy, ix = dom.interior_idx[:, 0], dom.interior_idx[:, 1]
        keep = (iy % stride == 0) & (ix % stride == 0)
        pts, vals = pts[keep], vals[keep]
    if len(pts) < 3:
        raise HullDegenerate("need at least 3 sample points in 2-D")
    g_hat = _upper_envelope_2d(pts, vals)
    gap = float(np.max(g_hat - vals))
    grid = f.to_grid()

    def interp(x2):
        from .operators import bilinear_interp
        return bilinear_interp(dom, grid, x2)

    delta = _defect_2d(pts, vals, interp=interp)
    k = hyers_ulam_constant(2)
    dist = 0.5 * gap
    return EnvelopeResult(g=g_hat - dist, g_hat=g_hat, distance=dist,
                          delta=delta, k_n=k,
                          bound_ok=dist <= k * delta + 1e-12,
                          dimension=2)
