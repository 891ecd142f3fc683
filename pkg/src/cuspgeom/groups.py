"""Cusp Lie groups: translations, parabolics, flow, isotropy, factorization.

Elements act on RP^n by (n+1)x(n+1) matrices, written in block form with
respect to the splitting (hyperbolic coords, distinguished coord, parabolic
coords, affine coord).  The translation group T acts simply transitively on
each horosphere; the full group is the semidirect product of T with the
finite-by-orthogonal isotropy group O and commutes with the radial flow.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    KernelViolation,
    NotInGroup,
    OutsideChart,
    UnsupportedPsi,
)
from .numerics import DEFAULT_SETTINGS
from .weyl import kernel_basis
from .domain import _as_shape


def _vec(v, length, name):
    v = np.zeros(length) if v is None else np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (length,):
        raise DimensionMismatch(f"{name} must have length {length}")
    return v


def translation(psi, X=None, Y=None, settings=DEFAULT_SETTINGS):
    """Translation-group element with hyperbolic parameters X, parabolic Y.

    For t < n, X has r entries and the corner entry is |Y|^2/2 - psi.X.
    For t = n, X is either a full kernel vector (n entries, psi.X = 0) or
    r = n-1 chart parameters expanded through the kernel basis.
    """
    shape = _as_shape(psi, settings)
    n, t, r, u = shape.n, shape.t, shape.r, shape.u
    w = shape.psi.array
    Y = _vec(Y, u, "Y")
    if shape.hyperbolic:
        X = np.asarray(X, dtype=float).reshape(-1) if X is not None else np.zeros(r)
        if X.shape == (r,):
            X = kernel_basis(shape) @ X
        elif X.shape != (n,):
            raise DimensionMismatch(f"X must have length {r} or {n}")
        if abs(float(np.dot(w, X))) > 1e-10 * max(1.0, np.linalg.norm(X)):
            raise KernelViolation("hyperbolic parameters must annihilate psi")
        m = np.eye(n + 1)
        m[:n, :n] = np.diag(np.exp(X))
        return m
    X = _vec(X, r, "X")
    m = np.eye(n + 1)
    m[:r, :r] = np.diag(np.exp(X))
    m[t, n] = 0.5 * float(np.dot(Y, Y)) - float(np.dot(w[:r], X))
    m[t, t + 1 : n] = Y
    m[t + 1 : n, n] = Y
    return m


def enlarged(psi, X=None, Z=0.0, Y=None, settings=DEFAULT_SETTINGS):
    """Element of the enlarged translation group and its level character.

    Returns (matrix, c) where the element moves every horofunction level by
    exactly -c; the translation group proper is the kernel c = 0.
    """
    shape = _as_shape(psi, settings)
    n, t, r, u = shape.n, shape.t, shape.r, shape.u
    w = shape.psi.array
    if shape.hyperbolic:
        X = _vec(X, n, "X")
        m = np.eye(n + 1)
        m[:n, :n] = np.diag(np.exp(X))
        return m, float(np.dot(w, X)) / w.sum()
    X = _vec(X, r, "X")
    Y = _vec(Y, u, "Y")
    m = np.eye(n + 1)
    m[:r, :r] = np.diag(np.exp(X))
    m[t, n] = float(Z) + 0.5 * float(np.dot(Y, Y))
    m[t, t + 1 : n] = Y
    m[t + 1 : n, n] = Y
    return m, float(np.dot(w[:r], X)) + float(Z)


def radial_flow(psi, s, settings=DEFAULT_SETTINGS):
    """Matrix of the time-s radial flow (shifts the horofunction by +s)."""
    shape = _as_shape(psi, settings)
    n = shape.n
    m = np.eye(n + 1)
    if shape.hyperbolic:
        m[:n, :n] *= math.exp(-s)
    else:
        m[shape.t, n] = -s
    return m


def flow_center(psi, settings=DEFAULT_SETTINGS):
    """Homogeneous coordinates of the fixed center of the radial flow."""
    shape = _as_shape(psi, settings)
    c = np.zeros(shape.n + 1)
    c[shape.t if not shape.hyperbolic else shape.n] = 1.0
    return c


@dataclass(frozen=True)
class OrthDescriptor:
    """Isotropy element: a weight-preserving permutation plus an O(u) block."""

    perm: tuple  # permutation of range(t), must preserve the weights
    block: tuple = ()  # u x u orthogonal matrix, row tuples

    def block_matrix(self, u):
        if not self.block:
            return np.eye(u)
        return np.array(self.block, dtype=float)


def orth_matrix(psi, desc, settings=DEFAULT_SETTINGS):
    """(n+1)x(n+1) matrix of an isotropy element."""
    shape = _as_shape(psi, settings)
    n, t, u = shape.n, shape.t, shape.u
    w = shape.psi.array
    perm = tuple(desc.perm) if desc.perm else tuple(range(t))
    if sorted(perm) != list(range(t)):
        raise DimensionMismatch("perm must permute the hyperbolic coordinates")
    for i, j in enumerate(perm):
        if w[i] != w[j]:
            raise UnsupportedPsi("permutation does not preserve the weights")
    B = desc.block_matrix(u)
    if B.shape != (u, u) or np.linalg.norm(B.T @ B - np.eye(u)) > settings.group_tol:
        raise DimensionMismatch("block must be a u x u orthogonal matrix")
    m = np.zeros((n + 1, n + 1))
    for i, j in enumerate(perm):
        m[j, i] = 1.0  # column i has its 1 in row perm(i)
    if shape.hyperbolic:
        m[n, n] = 1.0
        return m
    m[t, t] = 1.0
    m[t + 1 : n, t + 1 : n] = B
    m[n, n] = 1.0
    return m


def orth_generators(psi, settings=DEFAULT_SETTINGS):
    """Generating set of the isotropy group (continuous O(u) part sampled).

    Returns adjacent weight-preserving transpositions, a reflection of the
    first parabolic coordinate when u >= 1, and a unit-angle rotation in the
    first parabolic plane when u >= 2.
    """
    shape = _as_shape(psi, settings)
    t, u = shape.t, shape.u
    w = shape.psi.array
    gens = []
    ident = tuple(range(t))
    for i in range(t - 1):
        if w[i] == w[i + 1]:
            p = list(ident)
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(OrthDescriptor(perm=tuple(p)))
    if u >= 1:
        B = np.eye(u)
        B[0, 0] = -1.0
        gens.append(OrthDescriptor(perm=ident, block=tuple(map(tuple, B))))
    if u >= 2:
        c, s = math.cos(1.0), math.sin(1.0)
        B = np.eye(u)
        B[0, 0], B[0, 1], B[1, 0], B[1, 1] = c, -s, s, c
        gens.append(OrthDescriptor(perm=ident, block=tuple(map(tuple, B))))
    return gens


def orth_sample(psi, rng, settings=DEFAULT_SETTINGS):
    """Random isotropy element: block permutation x Haar-ish O(u) matrix."""
    shape = _as_shape(psi, settings)
    t, u = shape.t, shape.u
    w = shape.psi.array
    perm = np.arange(t)
    i = 0
    while i < t:
        j = i
        while j < t and w[j] == w[i]:
            j += 1
        perm[i:j] = i + rng.permutation(j - i)
        i = j
    if u > 0:
        q, rmat = np.linalg.qr(rng.normal(size=(u, u)))
        q = q * np.sign(np.diag(rmat))
        block = tuple(map(tuple, q))
    else:
        block = ()
    return OrthDescriptor(perm=tuple(int(k) for k in perm), block=block)


def enumerate_orth(psi, settings=DEFAULT_SETTINGS):
    """All isotropy elements when the group is finite (u <= 1)."""
    shape = _as_shape(psi, settings)
    t, u = shape.t, shape.u
    if u > 1:
        raise UnsupportedPsi("isotropy group is infinite for u >= 2")
    w = shape.psi.array
    blocks = []
    i = 0
    while i < t:
        j = i
        while j < t and w[j] == w[i]:
            j += 1
        blocks.append(list(range(i, j)))
        i = j
    perms = [()]
    for blk in blocks:
        perms = [p + q for p in perms for q in itertools.permutations(blk)]
    signs = [()] if u == 0 else [((1.0,),), ((-1.0,),)]
    return [OrthDescriptor(perm=p, block=b) for p in perms for b in signs]


@dataclass(frozen=True)
class Factorization:
    """g = flow(s) . translation(X, Y) . orth, with the rebuild residual."""

    s: float
    X: tuple
    Y: tuple
    orth: OrthDescriptor
    residual: float

    @property
    def is_translation(self):
        ident = tuple(range(len(self.orth.perm)))
        trivial_block = True
        if self.orth.block:
            B = np.array(self.orth.block)
            trivial_block = np.allclose(B, np.eye(B.shape[0]), atol=1e-10)
        return abs(self.s) <= 1e-10 and self.orth.perm == ident and trivial_block


def _split_diag_perm(block, tol):
    """Split a matrix with one positive entry per row/column into D.P."""
    t = block.shape[0]
    perm = [-1] * t
    vals = np.zeros(t)
    scale = max(np.abs(block).max(), 1.0) if t else 1.0
    for col in range(t):
        rows = np.nonzero(np.abs(block[:, col]) > tol * scale)[0]
        if len(rows) != 1 or block[rows[0], col] <= 0:
            raise NotInGroup("hyperbolic block is not positive-diagonal-times-permutation")
        perm[col] = int(rows[0])
        vals[col] = block[rows[0], col]
    if sorted(perm) != list(range(t)):
        raise NotInGroup("hyperbolic block is not a permutation pattern")
    return vals, tuple(perm)


def semidirect_decompose(psi, g, settings=DEFAULT_SETTINGS):
    """Factor g as flow(s) . translation(X, Y) . orth element.

    Raises NotInGroup when the matrix does not have this form within the
    group tolerance.  The input is treated projectively (rescaled so the
    affine corner is 1).
    """
    shape = _as_shape(psi, settings)
    n, t, r, u = shape.n, shape.t, shape.r, shape.u
    w = shape.psi.array
    g = np.asarray(g, dtype=float)
    if g.shape != (n + 1, n + 1):
        raise DimensionMismatch(f"expected a {n + 1} x {n + 1} matrix")
    if abs(g[n, n]) <= settings.det_tol * max(np.abs(g).max(), 1e-300):
        raise NotInGroup("affine corner entry vanishes")
    g = g / g[n, n]
    tol = settings.group_tol

    if shape.hyperbolic:
        vals, perm = _split_diag_perm(g[:n, :n], settings.det_tol)
        logs = np.log(vals)
        s = -float(np.dot(w, logs)) / w.sum()
        Xfull = np.empty(n)
        Xfull[list(perm)] = logs + s
        orth = OrthDescriptor(perm=perm)
        rebuilt = radial_flow(shape, s) @ translation(shape, Xfull) @ orth_matrix(shape, orth)
        residual = float(np.abs(rebuilt - g).max())
        if residual > tol * max(1.0, np.abs(g).max()):
            raise NotInGroup(f"factorization residual {residual:.3e}")
        # report chart parameters (coordinates in the kernel basis)
        Xchart = Xfull[: n - 1]
        for i, pj in enumerate(perm):
            if w[i] != w[pj]:
                raise NotInGroup("permutation part does not preserve the weights")
        return Factorization(s=s, X=tuple(Xchart), Y=(), orth=orth, residual=residual)

    vals, perm = _split_diag_perm(g[:r, :r], settings.det_tol) if r else (np.zeros(0), ())
    X = np.zeros(r)
    if r:
        X[list(perm)] = np.log(vals)
    YB = g[t, t + 1 : n]
    Y = g[t + 1 : n, n].copy()
    B = g[t + 1 : n, t + 1 : n]
    corner = g[t, n]
    s = 0.5 * float(np.dot(Y, Y)) - float(np.dot(w[:r], X)) - float(corner)
    orth = OrthDescriptor(perm=perm, block=tuple(map(tuple, B)) if u else ())
    if u and np.linalg.norm(B.T @ B - np.eye(u)) > tol:
        raise NotInGroup("parabolic block is not orthogonal")
    if np.linalg.norm(YB - Y @ B) > tol * max(1.0, np.linalg.norm(Y)):
        raise NotInGroup("parabolic row/column entries are inconsistent")
    rebuilt = radial_flow(shape, s) @ translation(shape, X, Y) @ orth_matrix(shape, orth)
    residual = float(np.abs(rebuilt - g).max())
    if residual > tol * max(1.0, np.abs(g).max()):
        raise NotInGroup(f"factorization residual {residual:.3e}")
    return Factorization(s=s, X=tuple(X), Y=tuple(Y), orth=orth, residual=residual)


@dataclass(frozen=True)
class ElementClass:
    kind: str  # hyperbolic | elliptic | parabolic
    standard_parabolic: bool
    spectral_radius: float
    block_sizes: tuple = ()


def _jordan_block_sizes(a, lam, settings):
    """Sizes of the Jordan blocks of eigenvalue lam, by rank tests."""
    m = a.shape[0]
    cutoff = 1e-8 * max(np.linalg.norm(a), 1.0)
    b = a - lam * np.eye(m)
    ranks = [m]
    power = np.eye(m)
    for _ in range(m):
        power = power @ b
        ranks.append(int(np.linalg.matrix_rank(power, tol=cutoff)))
        if ranks[-1] == ranks[-2]:
            break
    # number of blocks of size >= k is ranks[k-1] - ranks[k]
    sizes = []
    for k in range(1, len(ranks)):
        at_least_k = ranks[k - 1] - ranks[k]
        at_least_k1 = (ranks[k] - ranks[k + 1]) if k + 1 < len(ranks) else 0
        sizes.extend([k] * (at_least_k - at_least_k1))
    return tuple(sorted(sizes, reverse=True))


def classify_element(g, settings=DEFAULT_SETTINGS):
    """Classify a projective transformation as hyperbolic/elliptic/parabolic.

    Hyperbolic: eigenvalue moduli are not all equal.  Elliptic: all moduli
    equal and the matrix is diagonalizable over C.  Parabolic otherwise; a
    parabolic is standard when its largest Jordan block has size exactly 3
    and every other block is trivial for that eigenvalue.
    """
    g = np.asarray(g, dtype=float)
    eigs = np.linalg.eigvals(g)
    moduli = np.abs(eigs)
    top, bottom = moduli.max(), moduli.min()
    if bottom <= 0:
        raise NotInGroup("singular matrix cannot be classified")
    if top / bottom > 1.0 + 1e-8:
        return ElementClass("hyperbolic", False, float(top))
    # unit-modulus spectrum after projective normalization; test semisimplicity
    a = g / top
    lam, vecs = np.linalg.eig(a)
    diagonalizable = False
    if np.linalg.cond(vecs) < 1e8:
        residual = np.linalg.norm(vecs @ np.diag(lam) @ np.linalg.inv(vecs) - a)
        diagonalizable = residual < 1e-8 * max(1.0, np.linalg.norm(a))
    if diagonalizable:
        return ElementClass("elliptic", False, float(top))
    # parabolic: find the defective eigenvalue cluster (real for standard ones)
    sizes = ()
    real_eigs = [complex(e) for e in lam if abs(e.imag) < 1e-6]
    for e in sorted(set(round(v.real, 6) for v in real_eigs)):
        s = _jordan_block_sizes(a, e, settings)
        if s and s[0] > 1:
            sizes = s
            break
    nontrivial = tuple(k for k in sizes if k > 1)
    standard = nontrivial == (3,)
    return ElementClass("parabolic", standard, float(top), sizes)


@dataclass(frozen=True)
class SubgroupMembership:
    in_group: bool
    in_translation: bool
    in_parabolic: bool
    in_kernel_part: bool  # translations with psi.X = 0 and Y = 0
    in_hyperbolic_part: bool  # translations with Y = 0
    weights: tuple


def subgroup_membership(psi, g, settings=DEFAULT_SETTINGS):
    """Locate g within the subgroup lattice of the cusp group."""
    shape = _as_shape(psi, settings)
    w = shape.psi.array
    try:
        fac = semidirect_decompose(shape, g, settings)
    except NotInGroup:
        return SubgroupMembership(False, False, False, False, False, ())
    tol = settings.eq_tol
    is_t = fac.is_translation
    X = np.array(fac.X)
    Y = np.array(fac.Y)
    no_y = Y.size == 0 or np.all(np.abs(Y) <= tol)
    no_x = X.size == 0 or np.all(np.abs(X) <= tol)
    if shape.hyperbolic:
        psi_x = 0.0  # chart parameters always satisfy the kernel constraint
    else:
        psi_x = float(np.dot(w[: shape.r], X)) if X.size else 0.0
    g = np.asarray(g, dtype=float)
    diag = np.diag(g / g[-1, -1])
    vals = []
    for v in diag:
        if not any(abs(v - q) <= 1e-9 * max(1.0, abs(q)) for q in vals):
            vals.append(float(v))
    return SubgroupMembership(
        in_group=True,
        in_translation=is_t,
        in_parabolic=is_t and no_x,
        in_kernel_part=is_t and no_y and abs(psi_x) <= tol,
        in_hyperbolic_part=is_t and no_y,
        weights=tuple(sorted(vals, reverse=True)),
    )


def straighten(psi, p, inverse=False, settings=DEFAULT_SETTINGS):
    """Shear that flattens the boundary graph (t < n only).

    Sends (x, z, y) to (x, z + psi . log x, y); the boundary hypersurface
    maps onto the graph z = |y|^2/2.
    """
    shape = _as_shape(psi, settings)
    if shape.hyperbolic:
        raise UnsupportedPsi("straightening is defined for t < n")
    p = np.asarray(p, dtype=float).copy()
    if p.shape != (shape.n,):
        raise DimensionMismatch(f"expected point in R^{shape.n}")
    r, t = shape.r, shape.t
    if np.any(p[:r] <= 0):
        raise OutsideChart("hyperbolic coordinates must be positive")
    shift = float(np.dot(shape.psi.array[:r], np.log(p[:r]))) if r else 0.0
    p[t] += -shift if inverse else shift
    return p
