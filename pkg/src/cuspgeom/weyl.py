"""Weight vectors and the shape data they induce.

A weight vector is a non-increasing list of n non-negative reals
psi_1 >= ... >= psi_n >= 0.  From it we derive

  t = number of strictly positive weights (hyperbolic type),
  r = min(t, n-1)       number of hyperbolic chart coordinates,
  u = max(n-1-t, 0)     number of parabolic chart coordinates,

with r + u = n - 1 always.  The model cone lives in coordinates
(x, z, y) in R_+^r x R x R^u; when t = n the distinguished coordinate z is
the n-th positive coordinate instead.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NegativeWeyl, UnsortedWeyl
from .numerics import DEFAULT_SETTINGS


@dataclass(frozen=True)
class WeylVector:
    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2:
            raise DimensionMismatch("need at least 2 weights (ambient dim >= 2)")
        if any(v < 0 for v in c):
            raise NegativeWeyl("weights must be non-negative")
        if any(c[i] < c[i + 1] for i in range(len(c) - 1)):
            raise UnsortedWeyl("weights must be non-increasing")

    @property
    def n(self):
        return len(self.coeffs)

    @property
    def array(self):
        return np.array(self.coeffs)

    def type_count(self, settings=DEFAULT_SETTINGS):
        """Number of strictly positive weights."""
        return int(sum(1 for v in self.coeffs if v > settings.weight_zero_tol))


@dataclass(frozen=True)
class DomainShape:
    """Derived shape data of the model domain for a weight vector."""

    psi: WeylVector
    t: int
    r: int
    u: int

    @property
    def n(self):
        return self.psi.n

    @property
    def hyperbolic(self):
        """True in the purely hyperbolic regime t = n."""
        return self.t == self.n

    @property
    def z_index(self):
        """Index of the distinguished flow coordinate in R^n."""
        return self.t if self.t < self.n else self.n - 1


def make_weyl(coeffs):
    return coeffs if isinstance(coeffs, WeylVector) else WeylVector(tuple(coeffs))


def make_domain(psi, settings=DEFAULT_SETTINGS):
    """Shape record (t, r, u) for a weight vector."""
    psi = make_weyl(psi)
    t = psi.type_count(settings)
    n = psi.n
    r = min(t, n - 1)
    u = max(n - 1 - t, 0)
    return DomainShape(psi=psi, t=t, r=r, u=u)


def basepoint(shape):
    """Preferred boundary basepoint: sum of the first t coordinate vectors."""
    b = np.zeros(shape.n)
    if shape.hyperbolic:
        b[:] = 1.0
    else:
        b[: shape.t] = 1.0
    return b


def kernel_basis(shape):
    """Basis of the hyperbolic parameter space, as an n x r matrix.

    For t < n this is the inclusion of the first r coordinates.  For t = n it
    is a basis of the kernel of psi in R^n: v_i = e_i - (psi_i/psi_n) e_n.
    """
    n, r = shape.n, shape.r
    basis = np.zeros((n, r))
    if shape.hyperbolic:
        psi = shape.psi.array
        for i in range(n - 1):
            basis[i, i] = 1.0
            basis[n - 1, i] = -psi[i] / psi[n - 1]
    else:
        for i in range(r):
            basis[i, i] = 1.0
    return basis
