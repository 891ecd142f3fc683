"""Low-dimensional normal forms and the two-dimensional parameter map.

In ambient dimension 2 a cusp generator is conjugate to one of three
normal forms (distinct positive diagonal, one 2x2 unipotent block over a
hyperbolic factor, or a single 3x3 unipotent block), and the diagonal
family is parameterized by two shear coordinates.  In dimension 3 the four
translation families are tabulated explicitly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexSpectrum,
    DimensionMismatch,
    MixedSigns,
    UnsortedWeyl,
    UnsupportedGroupShape,
)
from .groups import _jordan_block_sizes
from .numerics import DEFAULT_SETTINGS


def dim2_teich_forward(y1, y2):
    """Upper-triangular representative of the shear parameters (y1, y2).

    Defined on the cone y2 >= y1 >= 0; the diagonal logs come out sorted.
    """
    if y1 < 0 or y2 < y1:
        raise UnsortedWeyl("parameters must satisfy y2 >= y1 >= 0")
    a = (2.0 * y2 - y1) / 3.0
    b = (2.0 * y1 - y2) / 3.0
    c = -(y1 + y2) / 3.0
    return np.array(
        [
            [math.exp(a), 1.0, 1.0],
            [0.0, math.exp(b), 1.0],
            [0.0, 0.0, math.exp(c)],
        ]
    )


def _real_positive_logs(mat, settings):
    """Sorted (desc) logs of the spectrum, after projective sign fixing."""
    a = np.asarray(mat, dtype=float)
    if a.shape != (3, 3):
        raise DimensionMismatch("expected a 3 x 3 matrix")
    eigs = np.linalg.eigvals(a)
    scale = np.abs(eigs).max()
    if np.any(np.abs(eigs.imag) > 1e-8 * scale):
        raise ComplexSpectrum("matrix has non-real eigenvalues")
    real = np.sort(eigs.real)[::-1]
    if real[0] < 0:
        real = np.sort(-real)[::-1]
    if np.any(real <= 0):
        raise MixedSigns("real spectrum with mixed signs")
    logs = np.log(real)
    return logs - logs.mean()


def dim2_teich_inverse(mat, settings=DEFAULT_SETTINGS):
    """Shear parameters (y1, y2) of a matrix with positive real spectrum."""
    logs = _real_positive_logs(mat, settings)
    y2 = float(logs[0] - logs[2])
    y1 = float(logs[1] - logs[2])
    return y1, y2


@dataclass(frozen=True)
class Dim2NormalForm:
    family: str  # hyperbolic | mixed | unipotent
    logs: tuple  # zero-sum sorted eigenvalue logs (after any inversion)
    psi_ratio: float  # second/first weight, in [0, 1]; only for hyperbolic
    inverted: bool  # whether the inverse matrix was used for the ratio


def dim2_normal_form(mat, settings=DEFAULT_SETTINGS):
    """Classify a 3x3 matrix into the three two-dimensional cusp families.

    hyperbolic: distinct positive eigenvalues (projectively); the weight
    ratio is (x2 - x3)/(x1 - x2) on the sorted logs, inverting the matrix
    first when that exceeds 1.  mixed: a double eigenvalue with a 2-block.
    unipotent: a single 3-block.
    """
    a = np.asarray(mat, dtype=float)
    if a.shape != (3, 3):
        raise DimensionMismatch("expected a 3 x 3 matrix")
    norm = -a if np.linalg.det(a) < 0 else a
    eigs = np.linalg.eigvals(norm)
    scale = np.abs(eigs).max()
    # eigenvalues of defective matrices are ill-conditioned, so cluster them
    # before deciding the family rather than demanding exact reality
    ctol = 1e-5 * scale
    order = np.argsort(-eigs.real)
    eigs = eigs[order]
    clusters = [[eigs[0]]]
    for e in eigs[1:]:
        if abs(e - clusters[-1][-1]) <= ctol or abs(e - np.conj(clusters[-1][-1])) <= ctol:
            clusters[-1].append(e)
        else:
            clusters.append([e])
    if len(clusters) == 3:
        if np.any(np.abs(eigs.imag) > 1e-8 * scale):
            raise ComplexSpectrum("matrix has non-real eigenvalues")
        vals = eigs.real
        if np.any(vals <= 0):
            raise MixedSigns("real spectrum with mixed signs")
        logs = np.log(vals)
        logs = np.sort(logs - logs.mean())[::-1]
        gaps = (logs[0] - logs[1], logs[1] - logs[2])
        ratio = gaps[1] / gaps[0]
        inverted = ratio > 1.0
        if inverted:
            logs = np.sort(-logs)[::-1]
            gaps = (logs[0] - logs[1], logs[1] - logs[2])
            ratio = gaps[1] / gaps[0]
        return Dim2NormalForm("hyperbolic", tuple(logs), float(ratio), inverted)
    if len(clusters) == 1:
        lam = float(np.cbrt(abs(np.linalg.det(norm))))
        sizes = _jordan_block_sizes(norm / lam, 1.0, settings)
        if sizes and sizes[0] == 3:
            return Dim2NormalForm("unipotent", tuple(np.zeros(3)), 0.0, False)
        raise UnsupportedGroupShape("repeated spectrum without a full unipotent block")
    # one double cluster plus a simple eigenvalue
    pair = max(clusters, key=len)
    single = min(clusters, key=len)
    rep = float(np.mean([e.real for e in pair]))
    simple = float(single[0].real)
    if rep <= 0 or simple <= 0:
        raise MixedSigns("real spectrum with mixed signs")
    sizes = _jordan_block_sizes(norm / rep, 1.0, settings)
    logs = np.log(np.array([simple, rep, rep]))
    logs = np.sort(logs - logs.mean())[::-1]
    if sizes and sizes[0] == 2:
        return Dim2NormalForm("mixed", tuple(logs), 0.0, False)
    raise UnsupportedGroupShape("double eigenvalue without a unipotent 2-block")


def dim3_family(psi, params, settings=DEFAULT_SETTINGS):
    """Explicit 4x4 translation matrix from the dimension-3 family tables.

    psi selects the family by its number of positive weights t; params are
    (y1, y2), (x1, y1), (x1, x2) or (x1, x2) for t = 0, 1, 2, 3.
    """
    w = [float(v) for v in psi]
    if len(w) != 3:
        raise DimensionMismatch("expected three weights")
    t = sum(1 for v in w if v > DEFAULT_SETTINGS.weight_zero_tol)
    p = [float(v) for v in params]
    m = np.eye(4)
    if t == 0:
        y1, y2 = p
        m[0, 1], m[0, 2], m[0, 3] = y1, y2, 0.5 * (y1 * y1 + y2 * y2)
        m[1, 3], m[2, 3] = y1, y2
    elif t == 1:
        x1, y1 = p
        m[0, 0] = math.exp(x1)
        m[1, 2], m[1, 3] = y1, 0.5 * y1 * y1 - w[0] * x1
        m[2, 3] = y1
    elif t == 2:
        x1, x2 = p
        m[0, 0], m[1, 1] = math.exp(x1), math.exp(x2)
        m[2, 3] = -w[0] * x1 - w[1] * x2
    else:
        x1, x2 = p
        x3 = -(w[0] * x1 + w[1] * x2) / w[2]
        m[0, 0], m[1, 1], m[2, 2] = math.exp(x1), math.exp(x2), math.exp(x3)
    return m
