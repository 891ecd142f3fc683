"""Busemann volume: densities, horosphere cross-sections, cusp volumes.

The Busemann measure of the Hilbert metric has density c_n / vol(B_p)
against Lebesgue measure, where B_p is the Euclidean unit ball of the
Finsler norm at p.  Cusp volumes are integrated in chart coordinates over
a fundamental patch of a lattice times a depth interval, where depth is
the Hilbert distance from the reference horosphere at level -1 measured
along flowlines.  The volume is finite exactly when there is at least one
parabolic direction (u > 0).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .domain import _as_shape, chord_exit_times, horofunction, membership
from .errors import DegeneratePatch, NotInterior, UnsupportedDimension
from .metrics import EuclideanChart
from .numerics import DEFAULT_SETTINGS

_BALL_CONSTANT = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}
_DEFAULT_DIRECTIONS = {1: 2, 2: 2 ** 10, 3: 2 ** 14}


def sphere_directions(dim, count):
    """Quadrature directions and weights on the unit sphere of R^dim."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        theta = 2.0 * math.pi * (np.arange(count) + 0.5) / count
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
        return dirs, np.full(count, 2.0 * math.pi / count)
    if dim == 3:
        # Fibonacci sphere grid
        k = np.arange(count) + 0.5
        phi = math.pi * (1.0 + math.sqrt(5.0)) * k
        z = 1.0 - 2.0 * k / count
        rad = np.sqrt(1.0 - z * z)
        dirs = np.column_stack([rad * np.cos(phi), rad * np.sin(phi), z])
        return dirs, np.full(count, 4.0 * math.pi / count)
    raise UnsupportedDimension("sphere quadrature implemented for dim <= 3")


def busemann_density(psi, p, directions=None, settings=DEFAULT_SETTINGS):
    """Busemann density of the Hilbert volume at p, against Lebesgue measure."""
    shape = _as_shape(psi, settings)
    n = shape.n
    if n not in _BALL_CONSTANT:
        raise UnsupportedDimension("Busemann density implemented for n in {2, 3}")
    if membership(shape, p, settings).status != "interior":
        raise NotInterior("density needs an interior point")
    count = directions or _DEFAULT_DIRECTIONS[n]
    dirs, weights = sphere_directions(n, count)
    both = np.vstack([dirs, -dirs])
    times = chord_exit_times(shape, p, both, settings)
    with np.errstate(divide="ignore"):
        inv = np.where(np.isinf(times), 0.0, 1.0 / times)
    norms = 0.5 * (inv[: len(dirs)] + inv[len(dirs) :])
    if np.any(norms <= 0):
        return 0.0  # infinite unit ball, zero density
    radii = 1.0 / norms
    ball = float(np.dot(weights, radii ** n)) / n
    return _BALL_CONSTANT[n] / ball


def _tangent_frame(shape, p, settings):
    """Orthonormal basis of the horosphere tangent space at p."""
    _, grad = horofunction(shape, p, order=1, settings=settings)
    g = grad / np.linalg.norm(grad)
    _, _, vt = np.linalg.svd(g[None, :])
    return vt[1:].T  # n x (n-1), orthonormal, orthogonal to grad


def _section_density(shape, p, directions, settings):
    """(n-1)-dimensional Busemann density on the horosphere through p."""
    n = shape.n
    frame = _tangent_frame(shape, p, settings)
    dirs, weights = sphere_directions(n - 1, directions)
    vectors = dirs @ frame.T
    both = np.vstack([vectors, -vectors])
    times = chord_exit_times(shape, p, both, settings)
    with np.errstate(divide="ignore"):
        inv = np.where(np.isinf(times), 0.0, 1.0 / times)
    norms = 0.5 * (inv[: len(dirs)] + inv[len(dirs) :])
    if np.any(norms <= 0):
        return 0.0, frame
    radii = 1.0 / norms
    ball = float(np.dot(weights, radii ** (n - 1))) / (n - 1)
    return _BALL_CONSTANT[n - 1] / ball, frame


@dataclass(frozen=True)
class CrossSection:
    flow_time: float
    value: float


def cross_section(psi, patch_basis, flow_time, directions=None, settings=DEFAULT_SETTINGS):
    """Busemann (n-1)-volume of a lattice patch pushed to level -flow_time.

    patch_basis has the chart translation vectors of the lattice as columns;
    the patch is its fundamental parallelepiped.  The translation group acts
    transitively by isometries on the horosphere, so the density is sampled
    once and multiplied by the patch area.
    """
    shape = _as_shape(psi, settings)
    n = shape.n
    if n not in _BALL_CONSTANT:
        raise UnsupportedDimension("cross sections implemented for n in {2, 3}")
    basis = np.atleast_2d(np.asarray(patch_basis, dtype=float))
    if basis.shape != (n - 1, n - 1):
        raise DegeneratePatch("patch basis must be (n-1) x (n-1)")
    if abs(np.linalg.det(basis)) < 1e-12:
        raise DegeneratePatch("patch basis is singular")
    chart = EuclideanChart(shape, settings)
    p = chart.point(s=flow_time)
    count = directions or _DEFAULT_DIRECTIONS[max(n - 1, 1)]
    density, _ = _section_density(shape, p, count, settings)
    cols = chart.jacobian(s=flow_time)[:, : n - 1] @ basis
    area = math.sqrt(abs(np.linalg.det(cols.T @ cols)))
    return CrossSection(flow_time=float(flow_time), value=density * area)


def horosphere_gap(psi, r, s, settings=DEFAULT_SETTINGS):
    """Hilbert distance between the horospheres at levels -r and -s.

    Measured along flowlines; exact cross-ratio values, which approach
    |log(r/s)|/2 and |r - s|/2 in the parabolic and hyperbolic regimes.
    """
    shape = _as_shape(psi, settings)
    if shape.hyperbolic:
        return 0.5 * abs(math.log(math.expm1(max(r, s)) / math.expm1(min(r, s))))
    return 0.5 * abs(math.log(r / s))


@dataclass(frozen=True)
class KappaProfile:
    flow_times: tuple
    values: tuple  # cross-section ratios against flow time 1
    depths: tuple  # Hilbert depth of each horosphere below the reference
    slope: float  # least-squares slope of log kappa against depth


def kappa_profile(psi, patch_basis, flow_times, directions=None, settings=DEFAULT_SETTINGS):
    """Cross-section decay ratios kappa(t) and their exponential rate."""
    base = cross_section(psi, patch_basis, 1.0, directions, settings).value
    values, depths = [], []
    for t in flow_times:
        values.append(cross_section(psi, patch_basis, t, directions, settings).value / base)
        depths.append(horosphere_gap(psi, 1.0, t, settings))
    slope = float(np.polyfit(depths, np.log(values), 1)[0]) if len(values) > 1 else 0.0
    return KappaProfile(
        flow_times=tuple(float(t) for t in flow_times),
        values=tuple(values),
        depths=tuple(depths),
        slope=slope,
    )


def _depth_to_flow(shape, sigma):
    """Flow time tau with Hilbert depth sigma below the level -1 horosphere."""
    if shape.hyperbolic:
        return math.log1p((math.e - 1.0) * math.exp(2.0 * sigma))
    return math.exp(2.0 * sigma)


def _depth_to_flow_rate(shape, sigma):
    if shape.hyperbolic:
        a = (math.e - 1.0) * math.exp(2.0 * sigma)
        return 2.0 * a / (1.0 + a)
    return 2.0 * math.exp(2.0 * sigma)


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    samples: int
    depth: float


def cusp_volume(
    psi,
    patch_basis,
    depth,
    seed=0,
    sigma_strata=24,
    patch_strata=2,
    samples_per_stratum=2,
    directions=None,
    settings=DEFAULT_SETTINGS,
):
    """Busemann volume of a lattice patch between depths 0 and `depth`.

    Stratified Monte Carlo over fundamental-patch x depth cells in chart
    coordinates; each stratum draws its own generator seeded by (seed,
    stratum index), so results are independent of scheduling and worker
    count.  Worker threads are taken from CUSPGEOM_THREADS if set.
    """
    shape = _as_shape(psi, settings)
    n = shape.n
    if n not in _BALL_CONSTANT:
        raise UnsupportedDimension("cusp volume implemented for n in {2, 3}")
    basis = np.atleast_2d(np.asarray(patch_basis, dtype=float))
    if basis.shape != (n - 1, n - 1) or abs(np.linalg.det(basis)) < 1e-12:
        raise DegeneratePatch("patch basis must be a nonsingular (n-1) square matrix")
    chart = EuclideanChart(shape, settings)
    count = directions or _DEFAULT_DIRECTIONS[n]

    grid = [patch_strata] * (n - 1) + [sigma_strata]
    cells = []
    idx = np.zeros(n, dtype=int)
    total_cells = int(np.prod(grid))
    for flat in range(total_cells):
        rem = flat
        lo = np.zeros(n)
        for d in range(n):
            q, rem = divmod(rem, int(np.prod(grid[d + 1 :])) or 1)
            lo[d] = q / grid[d]
        cells.append((flat, lo))

    widths = np.array([1.0 / g for g in grid])
    cell_volume = float(np.prod(widths)) * depth  # sigma in [0, depth]

    def integrand(w, sigma):
        tau = _depth_to_flow(shape, sigma)
        coords = basis @ w
        X, Y = coords[: shape.r], coords[shape.r :]
        p = chart.point(X, Y, tau)
        jac = chart.jacobian(X, Y, tau)
        cols = np.empty((n, n))
        cols[:, : n - 1] = jac[:, : n - 1] @ basis
        cols[:, n - 1] = jac[:, n - 1] * _depth_to_flow_rate(shape, sigma)
        dens = busemann_density(shape, p, count, settings)
        return dens * abs(np.linalg.det(cols))

    def run_cell(cell):
        flat, lo = cell
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), flat)))
        vals = []
        for _ in range(samples_per_stratum):
            u = lo + rng.random(n) * widths
            w = u[: n - 1]
            sigma = u[n - 1] * depth
            vals.append(integrand(w, sigma))
        return np.mean(vals), np.var(vals, ddof=1) if len(vals) > 1 else 0.0

    workers = int(os.environ.get("CUSPGEOM_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    total = sum(m for m, _ in results) * cell_volume
    var = sum(v / samples_per_stratum for _, v in results) * cell_volume ** 2
    return VolumeEstimate(
        value=float(total),
        stderr=float(math.sqrt(var)),
        samples=total_cells * samples_per_stratum,
        depth=float(depth),
    )


@dataclass(frozen=True)
class FinitenessVerdict:
    finite: bool
    parabolic_rank: int
    reason: str


def finiteness_verdict(psi, settings=DEFAULT_SETTINGS):
    """Whether the cusp has finite Busemann volume (iff u > 0)."""
    shape = _as_shape(psi, settings)
    if shape.u > 0:
        reason = (
            "cross-sections decay exponentially in depth along the "
            f"{shape.u} parabolic direction(s), so the depth integral converges"
        )
    else:
        reason = (
            "cross-sections are bounded below along purely hyperbolic "
            "directions, so the depth integral grows linearly"
        )
    return FinitenessVerdict(finite=shape.u > 0, parabolic_rank=shape.u, reason=reason)


def orbit_length(psi, chart_vector, flow_time=1.0, quad_points=64, settings=DEFAULT_SETTINGS):
    """Hilbert length of one period of a translation orbit at a fixed level.

    chart_vector is the (n-1)-vector of the generator in chart coordinates;
    the orbit segment runs from the chart origin to that vector at level
    -flow_time, and the length is a midpoint quadrature of the Finsler norm.
    """
    from .metrics import hilbert_norm

    shape = _as_shape(psi, settings)
    chart = EuclideanChart(shape, settings)
    v = np.asarray(chart_vector, dtype=float).reshape(-1)
    total = 0.0
    for k in range(quad_points):
        w = (k + 0.5) / quad_points * v
        X, Y = w[: shape.r], w[shape.r :]
        p = chart.point(X, Y, flow_time)
        jac = chart.jacobian(X, Y, flow_time)
        dp = jac[:, : shape.n - 1] @ v
        total += hilbert_norm(shape, p, dp, settings) / quad_points
    return total
