"""The model domain of a weight vector: horofunction, boundary, chords.

The domain is the sublevel set {h <= 0} of the horofunction h inside the
open cone V = R_+^t x R^(n-t).  Writing t for the number of positive
weights, r = min(t, n-1), u = max(n-1-t, 0):

  t < n:  h(x) = -x_{t+1} - sum_i psi_i log x_i + |y|^2 / 2
  t = n:  h(x) = -(sum psi)^{-1} sum_i psi_i log x_i

The radial flow translates the distinguished coordinate (t < n) or rescales
the whole cone (t = n) and shifts h by exactly the flow time.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    NotInterior,
    OutsideChart,
)
from .numerics import DEFAULT_SETTINGS
from .weyl import DomainShape, basepoint, kernel_basis, make_domain


def _as_shape(psi, settings=DEFAULT_SETTINGS):
    if isinstance(psi, DomainShape):
        return psi
    return make_domain(psi, settings)


def _check_point(shape, p):
    p = np.asarray(p, dtype=float)
    if p.shape != (shape.n,):
        raise DimensionMismatch(f"expected point in R^{shape.n}")
    return p


def in_chart(shape, p):
    """True if p lies in the open cone V on which h is defined."""
    k = shape.n if shape.hyperbolic else shape.t
    return bool(np.all(p[:k] > 0))


def horofunction(psi, p, order=0, settings=DEFAULT_SETTINGS):
    """Horofunction value at p, optionally with gradient and Hessian.

    order 0 returns h, order 1 returns (h, grad), order 2 (h, grad, hess).
    """
    shape = _as_shape(psi, settings)
    p = _check_point(shape, p)
    if not in_chart(shape, p):
        raise OutsideChart("point outside the open cone of the domain")
    w = shape.psi.array
    n, t = shape.n, shape.t
    if shape.hyperbolic:
        total = w.sum()
        h = -float(np.dot(w, np.log(p))) / total
        if order == 0:
            return h
        grad = -w / (total * p)
        if order == 1:
            return h, grad
        hess = np.diag(w / (total * p * p))
        return h, grad, hess
    x = p[:t]
    z = p[t]
    y = p[t + 1 :]
    h = -z + 0.5 * float(np.dot(y, y))
    if t > 0:
        h -= float(np.dot(w[:t], np.log(x)))
    if order == 0:
        return h
    grad = np.zeros(n)
    if t > 0:
        grad[:t] = -w[:t] / x
    grad[t] = -1.0
    grad[t + 1 :] = y
    if order == 1:
        return h, grad
    hess = np.zeros((n, n))
    if t > 0:
        hess[:t, :t] = np.diag(w[:t] / (x * x))
    for j in range(t + 1, n):
        hess[j, j] = 1.0
    return h, grad, hess


def boundary_height(psi, x, y=None, order=0, settings=DEFAULT_SETTINGS):
    """Height f of the boundary graph over the hyperbolic/parabolic coords.

    The boundary hypersurface {h = 0} is the graph of f: the distinguished
    coordinate equals f(x, y).  order 1/2 add gradient and Hessian of f in
    the (x, y) variables (r + u of them).
    """
    shape = _as_shape(psi, settings)
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.zeros(0) if y is None else np.asarray(y, dtype=float).reshape(-1)
    if x.shape != (shape.r,) or y.shape != (shape.u,):
        raise DimensionMismatch(f"expected r={shape.r} and u={shape.u} coordinates")
    if np.any(x <= 0):
        raise OutsideChart("hyperbolic coordinates must be positive")
    w = shape.psi.array
    r, u = shape.r, shape.u
    if shape.hyperbolic:
        c = w[:r] / w[r]
        f = float(np.exp(-np.dot(c, np.log(x))))
        if order == 0:
            return f
        grad = -f * c / x
        if order == 1:
            return f, grad
        hess = f * np.outer(c / x, c / x) + np.diag(f * c / (x * x))
        return f, grad, hess
    f = 0.5 * float(np.dot(y, y))
    if r > 0:
        f -= float(np.dot(w[:r], np.log(x)))
    if order == 0:
        return f
    grad = np.concatenate([-w[:r] / x, y])
    if order == 1:
        return f, grad
    hess = np.zeros((r + u, r + u))
    if r > 0:
        hess[:r, :r] = np.diag(w[:r] / (x * x))
    for j in range(r, r + u):
        hess[j, j] = 1.0
    return f, grad, hess


def graph_point(psi, x, y=None, settings=DEFAULT_SETTINGS):
    """Boundary point with the distinguished coordinate filled in via f."""
    shape = _as_shape(psi, settings)
    f = boundary_height(shape, x, y, settings=settings)
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.zeros(0) if y is None else np.asarray(y, dtype=float).reshape(-1)
    return np.concatenate([x, [f], y])


@dataclass(frozen=True)
class Membership:
    status: str  # interior | boundary | exterior
    level: float  # horofunction value, +inf outside the cone


def membership(psi, p, settings=DEFAULT_SETTINGS):
    """Classify p as interior, boundary or exterior to the domain."""
    shape = _as_shape(psi, settings)
    p = _check_point(shape, p)
    if not in_chart(shape, p):
        return Membership("exterior", math.inf)
    h = horofunction(shape, p, settings=settings)
    if abs(h) <= settings.eq_tol:
        return Membership("boundary", h)
    return Membership("interior" if h < 0 else "exterior", h)


def flow_point(psi, p, s, settings=DEFAULT_SETTINGS):
    """Apply the time-s radial flow to an affine point (h goes up by s)."""
    shape = _as_shape(psi, settings)
    p = _check_point(shape, p)
    if shape.hyperbolic:
        return math.exp(-s) * p
    q = p.copy()
    q[shape.t] -= s
    return q


def horosphere_point(psi, X=None, Y=None, level=0.0, settings=DEFAULT_SETTINGS):
    """Point of the horosphere {h = level} reached from the basepoint.

    (X, Y) are translation-group parameters (r hyperbolic, u parabolic);
    levels are <= 0 inside the domain, and h(result) = level exactly.
    """
    shape = _as_shape(psi, settings)
    X = np.zeros(shape.r) if X is None else np.asarray(X, dtype=float).reshape(-1)
    Y = np.zeros(shape.u) if Y is None else np.asarray(Y, dtype=float).reshape(-1)
    if X.shape != (shape.r,) or Y.shape != (shape.u,):
        raise DimensionMismatch(f"expected r={shape.r} and u={shape.u} parameters")
    if shape.hyperbolic:
        full = kernel_basis(shape) @ X
        return flow_point(shape, np.exp(full), level, settings)
    x = np.exp(X)
    p = graph_point(shape, x, Y, settings=settings) if shape.r + shape.u else None
    if p is None:  # n = 1 cannot happen (n >= 2), keep guard for clarity
        p = basepoint(shape)
    return flow_point(shape, p, level, settings)


def _h_values(shape, pts):
    """Vectorized horofunction on rows of pts; +inf outside the cone."""
    w = shape.psi.array
    n, t = shape.n, shape.t
    out = np.full(pts.shape[0], np.inf)
    k = n if shape.hyperbolic else t
    ok = np.all(pts[:, :k] > 0, axis=1) if k > 0 else np.ones(len(pts), dtype=bool)
    if not np.any(ok):
        return out
    q = pts[ok]
    if shape.hyperbolic:
        out[ok] = -(np.log(q) @ w) / w.sum()
        return out
    vals = -q[:, t] + 0.5 * np.einsum("ij,ij->i", q[:, t + 1 :], q[:, t + 1 :])
    if t > 0:
        vals -= np.log(q[:, :t]) @ w[:t]
    out[ok] = vals
    return out


def chord_exit_times(psi, p, dirs, settings=DEFAULT_SETTINGS):
    """Forward exit times of the chords p + s*dirs[i], one per row of dirs.

    Returns an array of positive s with h(p + s*dir) = 0, or +inf when the
    ray stays in the domain all the way to the ideal boundary.
    """
    shape = _as_shape(psi, settings)
    p = _check_point(shape, p)
    if not in_chart(shape, p):
        raise OutsideChart("point outside the open cone of the domain")
    h0 = horofunction(shape, p, settings=settings)
    if h0 >= 0:
        raise NotInterior("chord endpoints need a strictly interior point")
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms <= settings.det_tol):
        raise DegenerateDirection("zero direction vector")

    m = dirs.shape[0]
    k = shape.n if shape.hyperbolic else shape.t

    # distance to the cone wall along each direction (+inf if none)
    wall = np.full(m, np.inf)
    if k > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(dirs[:, :k] < 0, -p[:k] / dirs[:, :k], np.inf)
        wall = ratios.min(axis=1)

    def g(svals):
        return _h_values(shape, p[None, :] + svals[:, None] * dirs)

    hi = np.where(np.isfinite(wall), wall * (1.0 - 1e-13), 1.0)
    # push hi toward the wall until h is positive there (log divergence)
    for _ in range(60):
        mask = np.isfinite(wall) & (g(hi) <= 0)
        if not np.any(mask):
            break
        hi[mask] = wall[mask] - (wall[mask] - hi[mask]) / 1024.0

    # no wall: bracket by doubling up to the cap, keeping g(lo) < 0 <= g(hi)
    lo = np.zeros(m)
    free = ~np.isfinite(wall)
    if np.any(free):
        for _ in range(64):
            mask = free & (g(hi) < 0) & (hi < settings.chord_cap)
            if not np.any(mask):
                break
            lo[mask] = hi[mask]
            hi[mask] *= 2.0
    unbounded = free & (g(hi) < 0)
    active = ~unbounded
    for _ in range(settings.chord_bisections):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        take_hi = active & (gm >= 0)
        take_lo = active & (gm < 0)
        hi[take_hi] = mid[take_hi]
        lo[take_lo] = mid[take_lo]
    roots = 0.5 * (lo + hi)
    roots[unbounded] = np.inf
    return roots


def chord_endpoints(psi, p, v, settings=DEFAULT_SETTINGS):
    """Exit times (t_minus, t_plus) of the full chord through p along v.

    p + t_plus*v and p - t_minus*v lie on the boundary (either may be +inf
    when the chord ends at the ideal boundary).
    """
    v = np.asarray(v, dtype=float)
    times = chord_exit_times(psi, p, np.vstack([-v, v]), settings)
    return float(times[0]), float(times[1])


@dataclass(frozen=True)
class IdealBoundary:
    """Descriptor of the ideal boundary simplex and the flow center."""

    vertices: tuple  # homogeneous coordinate vectors of the simplex vertices
    dim: int
    center: tuple  # homogeneous coordinates of the flow center
    center_is_vertex: bool


def ideal_boundary(psi, settings=DEFAULT_SETTINGS):
    """Ideal boundary of the domain: an r-simplex plus the flow center."""
    shape = _as_shape(psi, settings)
    n, r, t = shape.n, shape.r, shape.t
    verts = []
    for i in range(r + 1):
        e = np.zeros(n + 1)
        e[i] = 1.0
        verts.append(tuple(e))
    center = np.zeros(n + 1)
    center[shape.t if t < n else n] = 1.0
    # for t < n the center e_{t+1} is the last simplex vertex (t = r);
    # for t = n the center is the cone tip, not a vertex of the simplex
    return IdealBoundary(
        vertices=tuple(verts),
        dim=r,
        center=tuple(center),
        center_is_vertex=not shape.hyperbolic,
    )
