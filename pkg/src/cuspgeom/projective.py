"""Projective points, projective maps and triangular matrix exp/log.

Points of RP^n are represented by numpy vectors of length n+1 up to scale.
The canonical representative has last coordinate 1 when possible, otherwise
unit norm with the first nonzero entry positive.
"""

import numpy as np
import scipy.linalg

from .errors import AtInfinity, NonPositiveDiagonal, Singular, ZeroImage
from .numerics import DEFAULT_SETTINGS


def canonicalize(v, settings=DEFAULT_SETTINGS):
    """Canonical representative of the projective class of v."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroImage("zero vector has no projective class")
    if abs(v[-1]) > settings.det_tol * norm:
        return v / v[-1]
    w = v / norm
    for entry in w:
        if abs(entry) > settings.det_tol:
            return w if entry > 0 else -w
    raise ZeroImage("zero vector has no projective class")


def from_affine(x):
    """Lift an affine point of R^n to homogeneous coordinates."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, [1.0]])


def to_affine(v, settings=DEFAULT_SETTINGS):
    """Affine representative of a projective point; AtInfinity if none."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroImage("zero vector has no projective class")
    if abs(v[-1]) <= settings.det_tol * norm:
        raise AtInfinity("point has last coordinate zero")
    return v[:-1] / v[-1]


def apply_map(m, v, settings=DEFAULT_SETTINGS):
    """Apply a projective transformation (matrix) to homogeneous coordinates."""
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    w = m @ v
    scale = np.linalg.norm(m, ord=np.inf) * np.linalg.norm(v)
    if np.linalg.norm(w) <= settings.det_tol * max(scale, 1e-300):
        raise ZeroImage("projective map sent point to zero")
    return w


def check_invertible(m, settings=DEFAULT_SETTINGS):
    """Raise Singular unless m is invertible within tolerance."""
    m = np.asarray(m, dtype=float)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= settings.det_tol * max(sv[0], 1e-300):
        raise Singular("matrix is singular within tolerance")
    return m


def affine_action(m, x, settings=DEFAULT_SETTINGS):
    """Action of a projective matrix on an affine point of R^n."""
    return to_affine(apply_map(m, from_affine(x), settings), settings)


def tri_exp(a):
    """Matrix exponential (exact for the nilpotent part up to roundoff)."""
    return scipy.linalg.expm(np.asarray(a, dtype=float))


def tri_log(m, settings=DEFAULT_SETTINGS):
    """Principal matrix logarithm for matrices with positive real spectrum."""
    m = np.asarray(m, dtype=float)
    check_invertible(m, settings)
    eigs = np.linalg.eigvals(m)
    scale = max(np.max(np.abs(eigs)), 1e-300)
    if np.any(np.abs(eigs.imag) > 1e-9 * scale) or np.any(eigs.real <= 0):
        raise NonPositiveDiagonal("matrix spectrum is not positive real")
    out = scipy.linalg.logm(m)
    return out.real
