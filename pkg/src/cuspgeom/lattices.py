"""Lattices in the cusp group and their classification data.

A marked lattice is an ordered list of n-1 generators of a discrete
cocompact subgroup of the horosphere isometries, each a translation with an
optional isotropy part.  Working in the Euclidean coordinates of the flat
chart, classification reduces to Euclidean lattice geometry: a Gram matrix
(the flat shape) plus an anisotropy coset recording how the lattice sits
relative to the weight axes.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .domain import _as_shape
from .errors import (
    DegenerateLattice,
    DimensionMismatch,
    RotationalPartOutsidePsi,
    UnsupportedDimension,
    UnsupportedGroupShape,
    UnsupportedPsi,
)
from .groups import OrthDescriptor, enumerate_orth, orth_matrix
from .metrics import EuclideanChart
from .numerics import DEFAULT_SETTINGS
from .weyl import make_weyl


@dataclass(frozen=True)
class LatticeGenerator:
    X: tuple = ()
    Y: tuple = ()
    orth: OrthDescriptor = None

    def chart_vector(self):
        return np.concatenate([np.asarray(self.X, float), np.asarray(self.Y, float)])


@dataclass(frozen=True)
class MarkedLattice:
    psi: tuple
    generators: tuple  # n-1 LatticeGenerator records

    @property
    def translation_only(self):
        return all(g.orth is None for g in self.generators)


def make_lattice(psi, generators, settings=DEFAULT_SETTINGS):
    """Validate and build a marked lattice from generator parameters."""
    shape = _as_shape(psi, settings)
    gens = []
    for g in generators:
        if isinstance(g, LatticeGenerator):
            gens.append(g)
        else:
            X, Y = g if isinstance(g, tuple) and len(g) == 2 else (g, ())
            gens.append(LatticeGenerator(X=tuple(X), Y=tuple(Y)))
    if len(gens) != shape.n - 1:
        raise DimensionMismatch(f"need {shape.n - 1} generators")
    basis = np.column_stack([g.chart_vector() for g in gens])
    if basis.shape[0] != shape.n - 1:
        raise DimensionMismatch("generator parameters have the wrong length")
    if abs(np.linalg.det(basis)) < 1e-10 * max(1.0, np.abs(basis).max() ** (shape.n - 1)):
        raise DegenerateLattice("generators do not span the horosphere")
    return MarkedLattice(psi=tuple(make_weyl(psi).coeffs), generators=tuple(gens))


def chart_basis(lat):
    """(n-1) x (n-1) matrix whose columns are the chart translation vectors."""
    return np.column_stack([g.chart_vector() for g in lat.generators])


def _boundary_chol(psi, settings=DEFAULT_SETTINGS):
    chart = EuclideanChart(psi, settings)
    return np.linalg.cholesky(chart.gram_boundary)


def euclid_basis(lat, settings=DEFAULT_SETTINGS):
    """Generator basis in orthonormal coordinates of the flat horosphere."""
    L = _boundary_chol(lat.psi, settings)
    return L.T @ chart_basis(lat)


def orth_euclid(psi, desc, settings=DEFAULT_SETTINGS):
    """Isotropy element as an orthogonal matrix on the flat horosphere."""
    shape = _as_shape(psi, settings)
    chart = EuclideanChart(shape, settings)
    A, _ = chart.chart_action(orth_matrix(shape, desc, settings))
    A = A[:-1, :-1]  # isotropy fixes the depth coordinate
    L = np.linalg.cholesky(chart.gram_boundary)
    return L.T @ A @ np.linalg.inv(L.T)


def lll_reduce(basis, delta=0.75):
    """LLL-reduced basis (columns) of a full-rank real lattice basis."""
    b = np.array(basis, dtype=float)
    m = b.shape[1]

    def gso(b):
        q = np.zeros_like(b)
        mu = np.eye(m)
        for i in range(m):
            q[:, i] = b[:, i]
            for j in range(i):
                mu[i, j] = np.dot(b[:, i], q[:, j]) / np.dot(q[:, j], q[:, j])
                q[:, i] -= mu[i, j] * q[:, j]
        return q, mu

    q, mu = gso(b)
    k = 1
    guard = 0
    while k < m and guard < 10000:
        guard += 1
        for j in range(k - 1, -1, -1):
            r = round(mu[k, j])
            if r:
                b[:, k] -= r * b[:, j]
                q, mu = gso(b)
        if np.dot(q[:, k], q[:, k]) >= (delta - mu[k, k - 1] ** 2) * np.dot(
            q[:, k - 1], q[:, k - 1]
        ):
            k += 1
        else:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            q, mu = gso(b)
            k = max(k - 1, 1)
    return b


def _canonical_basis(e):
    """Deterministic representative basis: LLL-reduced, sorted, sign-fixed."""
    red = lll_reduce(e)
    cols = []
    for i in range(red.shape[1]):
        c = red[:, i]
        for v in c:
            if abs(v) > 1e-12:
                if v < 0:
                    c = -c
                break
        cols.append(c)
    cols.sort(key=lambda c: (round(float(np.dot(c, c)), 9),) + tuple(np.round(c, 9)))
    out = np.column_stack(cols)
    if np.linalg.det(out) < 0:
        out[:, -1] = -out[:, -1]
    return out


@dataclass(frozen=True)
class LatticeInvariants:
    gram: tuple  # Gram matrix of the marked generators in the flat metric
    coset: tuple  # orthogonal matrix aligning canonical shape to embedding


def lattice_invariants(lat, settings=DEFAULT_SETTINGS):
    """Flat Gram matrix and anisotropy coset representative of a lattice."""
    if not lat.translation_only:
        raise UnsupportedGroupShape("invariants implemented for translation lattices")
    e = euclid_basis(lat, settings)
    gram = e.T @ e
    ec = _canonical_basis(e)
    gc = ec.T @ ec
    c = np.linalg.cholesky(gc)
    a = ec @ np.linalg.inv(c.T)
    return LatticeInvariants(gram=tuple(map(tuple, gram)), coset=tuple(map(tuple, a)))


def _same_lattice(e1, e2, tol=1e-6):
    """True when two real bases span the same lattice of translations."""
    try:
        w = np.linalg.solve(e1, e2)
    except np.linalg.LinAlgError:
        return False
    wr = np.round(w)
    if np.abs(w - wr).max() > tol:
        return False
    return abs(abs(round(float(np.linalg.det(wr)))) - 1) == 0


def scale_equivalence(psi1, psi2, settings=DEFAULT_SETTINGS):
    """Positive c with psi2 = c * psi1, or None if the rays differ."""
    a = make_weyl(psi1).array
    b = make_weyl(psi2).array
    if a.shape != b.shape:
        return None
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na <= settings.weight_zero_tol and nb <= settings.weight_zero_tol:
        return 1.0
    if na <= settings.weight_zero_tol or nb <= settings.weight_zero_tol:
        return None
    c = nb / na
    return float(c) if np.allclose(c * a, b, atol=settings.eq_tol * max(1.0, nb)) else None


def _reduced_gram_2d(g):
    """Lagrange-reduced Gram of a 2-d lattice, canonical up to nothing."""
    a = np.array(g, dtype=float)
    # work with a basis realizing the Gram
    b = np.linalg.cholesky(a).T.copy()
    for _ in range(100):
        if np.dot(b[:, 0], b[:, 0]) > np.dot(b[:, 1], b[:, 1]):
            b = b[:, ::-1].copy()
        r = round(np.dot(b[:, 0], b[:, 1]) / np.dot(b[:, 0], b[:, 0]))
        if r == 0:
            break
        b[:, 1] -= r * b[:, 0]
    if np.dot(b[:, 0], b[:, 1]) < 0:
        b[:, 1] = -b[:, 1]
    if np.dot(b[:, 0], b[:, 0]) > np.dot(b[:, 1], b[:, 1]):
        b = b[:, ::-1].copy()
    return b.T @ b


def are_conjugate(lat1, lat2, marked=False, settings=DEFAULT_SETTINGS):
    """Whether two lattices agree up to the isotropy group action.

    Unmarked: some isotropy element maps the subgroup generated by lat1
    onto lat2's.  Marked: it must match the ordered generators.  For the
    zero weight vector the comparison is similarity of lattice shapes.
    """
    if not (lat1.translation_only and lat2.translation_only):
        raise UnsupportedGroupShape("conjugacy implemented for translation lattices")
    c = scale_equivalence(lat1.psi, lat2.psi, settings)
    if c is None or abs(c - 1.0) > settings.eq_tol:
        return False
    shape = _as_shape(lat1.psi, settings)
    e1 = euclid_basis(lat1, settings)
    e2 = euclid_basis(lat2, settings)
    if shape.t == 0:
        # full orthogonal isotropy: compare shapes up to scale (similarity)
        if shape.n - 1 != 2:
            raise UnsupportedDimension("zero-weight similarity implemented for n = 3")
        g1 = _reduced_gram_2d(e1.T @ e1)
        g2 = _reduced_gram_2d(e2.T @ e2)
        g1 = g1 / g1[0, 0]
        g2 = g2 / g2[0, 0]
        return bool(np.abs(g1 - g2).max() <= 1e-7)
    if shape.u > 1:
        raise UnsupportedPsi("conjugacy test needs a finite isotropy group (u <= 1)")
    for desc in enumerate_orth(shape, settings):
        q = orth_euclid(shape, desc, settings)
        if marked:
            if np.abs(q @ e1 - e2).max() <= 1e-7 * max(1.0, np.abs(e2).max()):
                return True
        elif _same_lattice(e2, q @ e1):
            return True
    return False


@dataclass(frozen=True)
class AnisotropyCoset:
    """Coset of the isotropy group in O(n-1), by an orthogonal representative."""

    matrix: tuple

    def array(self):
        return np.array(self.matrix, dtype=float)


def theta_map(lat, coset, settings=DEFAULT_SETTINGS):
    """Classification map: conjugate a marked lattice by a coset representative.

    Generator translations v become A^T v in flat coordinates; isotropy
    parts must conjugate back into the isotropy group.
    """
    if not lat.translation_only:
        raise RotationalPartOutsidePsi("theta map implemented for translation lattices")
    a = coset.array() if isinstance(coset, AnisotropyCoset) else np.asarray(coset, float)
    n1 = a.shape[0]
    if np.abs(a.T @ a - np.eye(n1)).max() > settings.group_tol:
        raise DimensionMismatch("coset representative must be orthogonal")
    shape = _as_shape(lat.psi, settings)
    if n1 != shape.n - 1:
        raise DimensionMismatch("coset representative has the wrong size")
    l = _boundary_chol(lat.psi, settings)
    e = euclid_basis(lat, settings)
    new_chart = np.linalg.inv(l.T) @ (a.T @ e)
    gens = []
    for k in range(n1):
        v = new_chart[:, k]
        gens.append(LatticeGenerator(X=tuple(v[: shape.r]), Y=tuple(v[shape.r :])))
    return MarkedLattice(psi=lat.psi, generators=tuple(gens))


@dataclass(frozen=True)
class RecoveredPsi:
    psi: tuple  # sorted non-increasing, scaled so the top entry is 1
    perm: tuple  # original coordinate i carries weight psi[perm[i]]
    residual: float


def _recover_from_diagonal(mats, n, settings):
    logs = []
    for g in mats:
        d = np.diag(g) / g[n, n]
        if np.abs(g / g[n, n] - np.diag(d)).max() > settings.group_tol:
            return None
        if np.any(d[:n] <= 0):
            raise UnsupportedGroupShape("diagonal generators must be positive")
        logs.append(np.log(d[:n]))
    span = np.array(logs)
    _, sv, vt = np.linalg.svd(span)
    rank = int(np.sum(sv > 1e-9 * max(sv[0], 1e-300)))
    if rank != n - 1:
        raise UnsupportedGroupShape("diagonal generators do not pin down the weights")
    psi = vt[-1]
    if np.all(psi <= 1e-12):
        psi = -psi
    if np.any(psi < -1e-9):
        raise UnsupportedGroupShape("recovered weight direction changes sign")
    psi = np.clip(psi, 0.0, None)
    residual = float(np.abs(span @ psi).max())
    return psi, residual


def recover_psi(generators, settings=DEFAULT_SETTINGS):
    """Recover the weight vector from lattice generator matrices.

    Handles two shapes: simultaneously diagonal generators (weights from
    the kernel of their log-diagonals) and generators in translation block
    form, where the weights are read off the corner entries.  Returns the
    sorted weights with the coordinate permutation achieving the sorting.
    """
    mats = [np.asarray(g, dtype=float) for g in generators]
    n = mats[0].shape[0] - 1
    for g in mats:
        if g.shape != (n + 1, n + 1):
            raise DimensionMismatch("generator matrices must share one size")
    diag = _recover_from_diagonal(mats, n, settings)
    if diag is not None:
        psi, residual = diag
        return _sorted_psi(psi, residual)

    # translation block shape: locate clean (diagonal) coordinates
    scale = max(max(np.abs(g).max() for g in mats), 1.0)
    tol = settings.group_tol * scale
    clean = []
    for i in range(n):
        ok = True
        for g in mats:
            gg = g / g[n, n]
            row = np.abs(gg[i]) > tol
            col = np.abs(gg[:, i]) > tol
            row[i] = col[i] = False
            if row.any() or col.any() or gg[i, i] <= 0:
                ok = False
                break
        if ok:
            clean.append(i)
    others = [i for i in range(n) if i not in clean]
    if not others:
        raise UnsupportedGroupShape("generators are diagonal but degenerate")
    xs, corners = [], []
    zc = None
    # the distinguished coordinate is the one whose column is clean everywhere
    for cand in others:
        col_clean = True
        for g in mats:
            gg = g / g[n, n]
            col = np.abs(gg[:, cand]) > tol
            col[cand] = False
            if col.any():
                col_clean = False
                break
        if col_clean:
            zc = cand
            break
    if zc is None:
        raise UnsupportedGroupShape("no distinguished coordinate found")
    ys = [i for i in others if i != zc]
    for g in mats:
        gg = g / g[n, n]
        x = np.array([math.log(gg[i, i]) for i in clean])
        yv = gg[ys, n] if ys else np.zeros(0)
        if ys and np.abs(gg[zc, ys] - yv).max() > tol:
            raise UnsupportedGroupShape("parabolic entries are inconsistent")
        xs.append(x)
        corners.append(gg[zc, n] - 0.5 * float(np.dot(yv, yv)))
    xs = np.array(xs)
    corners = np.array(corners)
    if len(clean) == 0:
        psi_clean = np.zeros(0)
        residual = float(np.abs(corners).max(initial=0.0))
    else:
        sol, res, rank, _ = np.linalg.lstsq(xs, -corners, rcond=None)
        if rank < len(clean):
            raise UnsupportedGroupShape("hyperbolic parameters do not pin down weights")
        psi_clean = sol
        residual = float(np.abs(xs @ sol + corners).max())
    if residual > settings.group_tol * max(1.0, np.abs(corners).max(initial=0.0)):
        raise UnsupportedGroupShape("corner entries inconsistent with any weights")
    if np.any(psi_clean < -1e-9):
        raise UnsupportedGroupShape("recovered weights are negative")
    psi = np.zeros(n)
    psi[clean] = np.clip(psi_clean, 0.0, None)
    return _sorted_psi(psi, residual)


def _sorted_psi(psi, residual):
    n = len(psi)
    order = sorted(range(n), key=lambda i: -psi[i])
    sorted_vals = np.array([psi[i] for i in order])
    top = sorted_vals[0] if sorted_vals[0] > 0 else 1.0
    perm = [0] * n
    for rank, i in enumerate(order):
        perm[i] = rank
    return RecoveredPsi(
        psi=tuple(sorted_vals / top), perm=tuple(perm), residual=residual
    )
