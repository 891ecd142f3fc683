"""Metrics on the model domain.

Two metrics live here: the Hilbert (cross-ratio) metric of the convex
domain, and the flat metric obtained from the horofunction Hessian plus the
squared level differential.  The translation group acts by isometries of
both; in the chart coordinates (X, Y, s) the flat metric has a constant
Gram matrix, which is what makes the domain a Euclidean cusp model.
"""

import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    _as_shape,
    chord_exit_times,
    flow_point,
    horofunction,
    horosphere_point,
    boundary_height,
    membership,
)
from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    NonPositiveScale,
    NotInterior,
    NotOnBoundary,
    UnsupportedPsi,
    ZeroPsi,
)
from .numerics import DEFAULT_SETTINGS
from .projective import affine_action
from .weyl import kernel_basis


# ---------------------------------------------------------------- Hilbert


def hilbert_norm(psi, p, v, settings=DEFAULT_SETTINGS):
    """Finsler norm of the Hilbert metric at interior point p."""
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv <= settings.det_tol:
        raise DegenerateDirection("zero direction vector")
    times = chord_exit_times(psi, p, np.vstack([-v, v]), settings)
    tm, tp = times[0], times[1]
    total = (0.0 if math.isinf(tm) else 1.0 / tm) + (0.0 if math.isinf(tp) else 1.0 / tp)
    return 0.5 * total


def hilbert_distance(psi, p, q, settings=DEFAULT_SETTINGS):
    """Hilbert (cross-ratio) distance between interior points p and q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    v = q - p
    if np.linalg.norm(v) <= settings.det_tol * max(1.0, np.linalg.norm(p)):
        return 0.0
    if membership(psi, q, settings).status != "interior":
        raise NotInterior("second point is not interior")
    times = chord_exit_times(psi, p, np.vstack([-v, v]), settings)
    tm, tp = times[0], times[1]
    # chord parameters: p at 0, q at 1, endpoints at -tm and tp (tp > 1)
    left = 1.0 if math.isinf(tm) else (tm + 1.0) / tm
    right = 1.0 if math.isinf(tp) else tp / (tp - 1.0)
    return 0.5 * math.log(left * right)


# ---------------------------------------------------------------- flat metric


@dataclass(frozen=True)
class MetricSample:
    point: tuple
    level: float
    grad: tuple
    gram: tuple  # row tuples of the flat-metric Gram matrix at the point


def _flow_direction(shape, p):
    """Unit-speed flow direction v with Dh(v) = 1."""
    if shape.hyperbolic:
        return -np.asarray(p, dtype=float)
    v = np.zeros(shape.n)
    v[shape.t] = -1.0
    return v


def _beta_gram(shape, p, scale=1.0, settings=DEFAULT_SETTINGS):
    h, grad, hess = horofunction(shape, p, order=2, settings=settings)
    v = _flow_direction(shape, p)
    proj = np.eye(shape.n) - np.outer(v, grad)
    gram = scale * (proj.T @ hess @ proj) + scale * scale * np.outer(grad, grad)
    return h, grad, gram


def beta_form(psi, p, settings=DEFAULT_SETTINGS):
    """Flat-metric data at p: level, horofunction gradient, Gram matrix.

    The quadratic form is D2h on the kernel of Dh plus (Dh)^2 in the flow
    direction; it is flat, translation- and flow-invariant.
    """
    shape = _as_shape(psi, settings)
    h, grad, gram = _beta_gram(shape, np.asarray(p, dtype=float), 1.0, settings)
    return MetricSample(
        point=tuple(np.asarray(p, dtype=float)),
        level=h,
        grad=tuple(grad),
        gram=tuple(map(tuple, gram)),
    )


def horoscale(psi, c, settings=DEFAULT_SETTINGS):
    """Evaluator for the rescaled flat metric c*D2h|ker + c^2*(Dh)^2."""
    if c <= 0:
        raise NonPositiveScale("horospherical scaling factor must be positive")
    shape = _as_shape(psi, settings)

    def gram_at(p):
        _, _, gram = _beta_gram(shape, np.asarray(p, dtype=float), c, settings)
        return gram

    return gram_at


# ---------------------------------------------------------------- chart


class EuclideanChart:
    """Global chart (X, Y, s) in which the flat metric is constant.

    X are the r hyperbolic translation parameters, Y the u parabolic ones
    and s >= 0 the depth below the boundary (the point sits at level -s).
    """

    def __init__(self, psi, settings=DEFAULT_SETTINGS):
        self.shape = _as_shape(psi, settings)
        self.settings = settings
        self.kernel = kernel_basis(self.shape)
        self._gram = self._constant_gram()
        self._chol = np.linalg.cholesky(self._gram)

    def _constant_gram(self):
        shape = self.shape
        w = shape.psi.array
        n = shape.n
        g = np.zeros((n, n))
        if shape.hyperbolic:
            h = np.diag(w) / w.sum()
            g[: n - 1, : n - 1] = self.kernel.T @ h @ self.kernel
        else:
            r, u = shape.r, shape.u
            g[:r, :r] = np.diag(w[:r])
            g[r : r + u, r : r + u] = np.eye(u)
        g[n - 1, n - 1] = 1.0
        return g

    @property
    def gram(self):
        """Constant n x n Gram of the flat metric in chart coordinates."""
        return self._gram.copy()

    @property
    def gram_boundary(self):
        """Gram of the induced metric on a horosphere (the (X, Y) block)."""
        return self._gram[:-1, :-1].copy()

    def point(self, X=None, Y=None, s=0.0):
        """Affine point of the chart coordinates (X, Y, s)."""
        return horosphere_point(self.shape, X, Y, level=-s, settings=self.settings)

    def coords(self, p):
        """Chart coordinates of an interior-or-boundary point."""
        shape = self.shape
        p = np.asarray(p, dtype=float)
        h = horofunction(shape, p, settings=self.settings)
        s = -h
        if shape.hyperbolic:
            full = np.log(p) + s
            return np.concatenate([full[: shape.n - 1], [s]])
        X = np.log(p[: shape.r])
        Y = p[shape.t + 1 :]
        return np.concatenate([X, Y, [s]])

    def jacobian(self, X=None, Y=None, s=0.0):
        """Columns d(point)/d(X, Y, s), an n x n matrix."""
        shape = self.shape
        n, r, u, t = shape.n, shape.r, shape.u, shape.t
        X = np.zeros(r) if X is None else np.asarray(X, dtype=float).reshape(-1)
        Y = np.zeros(u) if Y is None else np.asarray(Y, dtype=float).reshape(-1)
        w = shape.psi.array
        J = np.zeros((n, n))
        if shape.hyperbolic:
            p = self.point(X, None, s)
            for i in range(r):
                J[:, i] = p * self.kernel[:, i]
            J[:, n - 1] = -p
            return J
        ex = np.exp(X)
        for i in range(r):
            J[i, i] = ex[i]
            J[t, i] = -w[i]
        for j in range(u):
            J[t, r + j] = Y[j]
            J[t + 1 + j, r + j] = 1.0
        J[t, n - 1] = 1.0
        return J

    def chart_action(self, g):
        """Affine action (A, tau) of a group element on chart coordinates."""
        n = self.shape.n
        base = self.point()
        tau = self.coords(affine_action(g, base, self.settings))
        A = np.zeros((n, n))
        for k in range(n):
            c = np.zeros(n)
            c[k] = 1.0
            q = self.point(c[: self.shape.r], c[self.shape.r : n - 1], c[n - 1])
            A[:, k] = self.coords(affine_action(g, q, self.settings)) - tau
        return A, tau

    def isometry(self, g):
        """Euclidean form (Q, v) of a group element: orthogonal + translation."""
        A, tau = self.chart_action(g)
        L = self._chol
        Q = L.T @ A @ np.linalg.inv(L.T)
        return Q, L.T @ tau


# ---------------------------------------------------------------- displacement


@dataclass(frozen=True)
class Displacement:
    beta: float
    hilbert_estimate: float
    hilbert_level: float


def beta_displacement(psi, g, settings=DEFAULT_SETTINGS):
    """Translation length of g in the flat metric (0 for elliptics)."""
    chart = EuclideanChart(psi, settings)
    Q, v = chart.isometry(np.asarray(g, dtype=float))
    n = Q.shape[0]
    # minimal |Qx + v - x| equals the norm of v projected onto ker(Q - I)
    u_mat, sv, vt = np.linalg.svd(Q - np.eye(n))
    null = vt[sv <= 1e-8].T if np.any(sv <= 1e-8) else np.zeros((n, 0))
    return float(np.linalg.norm(null.T @ v))


def displacement(psi, g, depths=(1.0, 4.0, 16.0, 64.0), settings=DEFAULT_SETTINGS):
    """Flat translation length plus a sampled Hilbert displacement bound.

    The Hilbert estimate is the minimum of d(x, g.x) over seeded chart
    points pushed to the listed depths; hilbert_level reports the deepest
    level at which the minimum was attained.
    """
    g = np.asarray(g, dtype=float)
    beta = beta_displacement(psi, g, settings)
    chart = EuclideanChart(psi, settings)
    best, best_level = math.inf, 0.0
    rng = np.random.default_rng(0)
    shape = chart.shape
    for s in depths:
        for _ in range(3):
            X = rng.normal(scale=0.5, size=shape.r)
            Y = rng.normal(scale=0.5, size=shape.u)
            x = chart.point(X, Y, s)
            d = hilbert_distance(shape, x, affine_action(g, x, settings), settings)
            if d < best:
                best, best_level = d, -s
    return Displacement(beta=beta, hilbert_estimate=best, hilbert_level=best_level)


# ---------------------------------------------------------------- boundary geometry


@dataclass(frozen=True)
class BoundaryForm:
    point: tuple
    frame: tuple  # n x (n-1) tangent frame, column tuples
    second_fundamental: tuple  # Gram in the frame, inward orientation
    flat_restriction: tuple  # flat metric restricted to the frame
    conformal_factor: float  # |grad h|, with flat = factor * second_fundamental


def second_fundamental_form(psi, x, y=None, settings=DEFAULT_SETTINGS):
    """Second fundamental form of the boundary graph at (x, y).

    Returns the tangent frame (graph parameterization), the second
    fundamental form with respect to the inward unit normal, the flat
    metric restricted to the same frame, and the conformal factor tying
    them together.
    """
    shape = _as_shape(psi, settings)
    f, grad_f, hess_f = boundary_height(shape, x, y, order=2, settings=settings)
    n, r, u = shape.n, shape.r, shape.u
    zi = shape.z_index
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.zeros(0) if y is None else np.asarray(y, dtype=float).reshape(-1)
    coords = np.concatenate([x, y])
    p = np.zeros(n)
    graph_idx = [i for i in range(n) if i != zi]
    p[graph_idx] = coords
    p[zi] = f
    frame = np.zeros((n, n - 1))
    for k, idx in enumerate(graph_idx):
        frame[idx, k] = 1.0
        frame[zi, k] = grad_f[k]
    ii = hess_f / math.sqrt(1.0 + float(np.dot(grad_f, grad_f)))
    h, grad_h, hess_h = horofunction(shape, p, order=2, settings=settings)
    if abs(h) > settings.eq_tol:
        raise NotOnBoundary("graph point does not satisfy h = 0")
    beta_restr = frame.T @ hess_h @ frame
    lam = float(np.linalg.norm(grad_h))
    return BoundaryForm(
        point=tuple(p),
        frame=tuple(map(tuple, frame)),
        second_fundamental=tuple(map(tuple, ii)),
        flat_restriction=tuple(map(tuple, beta_restr)),
        conformal_factor=lam,
    )


# ---------------------------------------------------------------- normalization


@dataclass(frozen=True)
class NormalizedScale:
    scale: float  # the horoscaling factor c
    sup_displacement: float  # sup of flat displacement over the unit slice
    witness: tuple  # hyperbolic parameters attaining the sup


def normalized_scale(psi, settings=DEFAULT_SETTINGS):
    """Horoscaling factor normalizing the maximal unit-slice displacement.

    The unit slice consists of the hyperbolic translations whose largest
    eigenvalue is e.  Supported when t = n (sup over a compact polytope,
    attained at a vertex) or r <= 1; for t < n with r >= 2 the sup is
    infinite and UnsupportedPsi is raised.
    """
    shape = _as_shape(psi, settings)
    w = shape.psi.array
    if shape.t == 0:
        raise ZeroPsi("no hyperbolic directions to normalize against")
    if shape.hyperbolic:
        n = shape.n
        h = np.diag(w) / w.sum()
        best, bx = -1.0, None
        for j in range(n):
            X = np.ones(n)
            X[j] = -(w.sum() - w[j]) / w[j]
            q = float(X @ h @ X)
            if q > best:
                best, bx = q, X
        sup = math.sqrt(best)
        return NormalizedScale(scale=1.0 / best, sup_displacement=sup, witness=tuple(bx))
    if shape.r > 1:
        raise UnsupportedPsi("unit-slice displacement is unbounded for t < n, r >= 2")
    sup = math.sqrt(w[0])
    return NormalizedScale(scale=1.0 / w[0], sup_displacement=sup, witness=(1.0,))


# ---------------------------------------------------------------- shrink profile


@dataclass(frozen=True)
class DecaySeries:
    times: tuple
    separations: tuple  # f(t) = d(flow_t p, flow_t q)
    depths: tuple  # d(t) = d(p at time 1, p at time t)
    products: tuple  # f(t) * exp(d(t))
    slope: float  # least-squares slope of log f against d
    parabolic: bool


def shrink_profile(psi, p, q, times, settings=DEFAULT_SETTINGS):
    """Decay of the separation of two boundary points under the flow.

    Non-parabolic pairs keep a positive separation; parabolic pairs decay
    with log-separation slope -1 against the flowline depth.
    """
    shape = _as_shape(psi, settings)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    for pt in (p, q):
        if membership(shape, pt, settings).status != "boundary":
            raise NotOnBoundary("shrink profile needs boundary points")
    parabolic = (not shape.hyperbolic) and bool(
        np.all(np.abs(p[: shape.r] - q[: shape.r]) <= settings.eq_tol)
    )
    ts, seps, depths, prods = [], [], [], []
    p1 = flow_point(shape, p, -1.0, settings)
    for t in times:
        if t <= 0:
            raise DimensionMismatch("flow times must be positive")
        pt = flow_point(shape, p, -t, settings)
        qt = flow_point(shape, q, -t, settings)
        f = hilbert_distance(shape, pt, qt, settings)
        d = 0.0 if t == 1.0 else hilbert_distance(shape, p1, pt, settings)
        ts.append(float(t))
        seps.append(f)
        depths.append(d)
        prods.append(f * math.exp(d))
    good = [i for i, f in enumerate(seps) if f > 0]
    if len(good) >= 2:
        dv = np.array([depths[i] for i in good])
        lf = np.array([math.log(seps[i]) for i in good])
        slope = float(np.polyfit(dv, lf, 1)[0])
    else:
        slope = 0.0
    return DecaySeries(
        times=tuple(ts),
        separations=tuple(seps),
        depths=tuple(depths),
        products=tuple(prods),
        slope=slope,
        parabolic=parabolic,
    )
