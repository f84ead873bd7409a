"""Linear algebra of Minkowski 4-space with signature (-,+,+,+).

Provides the pseudo scalar product, causal classification, the triple
wedge product and membership residuals for the two unit quadrics
(hyperbolic 3-space H3 and de Sitter 3-space S31).  All values are
immutable and every operation is pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .tolerances import DEFAULT, Tolerances

#: Gram matrix of the pseudo scalar product in the canonical basis.
METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])


class CausalClass(enum.Enum):
    SPACELIKE = "Spacelike"
    LIGHTLIKE = "Lightlike"
    TIMELIKE = "Timelike"


class Quadric(enum.Enum):
    H3 = "H3"    # <x,x> = -1
    S31 = "S31"  # <x,x> = +1


@dataclass(frozen=True)
class MinkVec:
    """A 4-vector in the canonical basis e0..e3; components must be finite."""

    x0: float
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name in ("x0", "x1", "x2", "x3"):
            c = float(getattr(self, name))
            if not math.isfinite(c):
                raise InvalidInputError(f"non-finite component in MinkVec: {c!r}")
            object.__setattr__(self, name, c)

    @classmethod
    def from_array(cls, arr) -> "MinkVec":
        a = np.asarray(arr, dtype=float).reshape(4)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def __iter__(self):
        return iter((self.x0, self.x1, self.x2, self.x3))

    def __getitem__(self, i):
        return (self.x0, self.x1, self.x2, self.x3)[i]

    def __add__(self, other: "MinkVec") -> "MinkVec":
        return MinkVec(self.x0 + other.x0, self.x1 + other.x1,
                       self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "MinkVec") -> "MinkVec":
        return MinkVec(self.x0 - other.x0, self.x1 - other.x1,
                       self.x2 - other.x2, self.x3 - other.x3)

    def __mul__(self, s: float) -> "MinkVec":
        return MinkVec(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)

    __rmul__ = __mul__

    def __neg__(self) -> "MinkVec":
        return MinkVec(-self.x0, -self.x1, -self.x2, -self.x3)

    def max_abs(self) -> float:
        return max(abs(self.x0), abs(self.x1), abs(self.x2), abs(self.x3))


E0 = MinkVec(1.0, 0.0, 0.0, 0.0)
E1 = MinkVec(0.0, 1.0, 0.0, 0.0)
E2 = MinkVec(0.0, 0.0, 1.0, 0.0)
E3 = MinkVec(0.0, 0.0, 0.0, 1.0)


def mink_dot(x: MinkVec, y: MinkVec) -> float:
    """Pseudo scalar product: -x0*y0 + x1*y1 + x2*y2 + x3*y3."""
    return -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3


def causal_character(x: MinkVec, tol: Tolerances = DEFAULT) -> CausalClass:
    """Classify a non-zero vector by the sign of its self-pairing."""
    if x.max_abs() == 0.0:
        raise InvalidInputError("causal character of the zero vector is undefined")
    q = mink_dot(x, x)
    eps = tol.causal * max(1.0, x.max_abs() ** 2)
    if q > eps:
        return CausalClass.SPACELIKE
    if q < -eps:
        return CausalClass.TIMELIKE
    return CausalClass.LIGHTLIKE


def wedge3(x1: MinkVec, x2: MinkVec, x3: MinkVec) -> MinkVec:
    """Triple wedge product: the unique w with <x0,w> = det(x0,x1,x2,x3).

    Explicit cofactor expansion of the determinant with first row
    (-e0, e1, e2, e3); deterministic and branch-free.
    """
    a0, a1, a2, a3 = x1.x0, x1.x1, x1.x2, x1.x3
    b0, b1, b2, b3 = x2.x0, x2.x1, x2.x2, x2.x3
    c0, c1, c2, c3 = x3.x0, x3.x1, x3.x2, x3.x3
    # 2x2 minors of rows (x2, x3)
    m01 = b0 * c1 - b1 * c0
    m02 = b0 * c2 - b2 * c0
    m03 = b0 * c3 - b3 * c0
    m12 = b1 * c2 - b2 * c1
    m13 = b1 * c3 - b3 * c1
    m23 = b2 * c3 - b3 * c2
    w0 = -(a1 * m23 - a2 * m13 + a3 * m12)
    w1 = -(a0 * m23 - a2 * m03 + a3 * m02)
    w2 = a0 * m13 - a1 * m03 + a3 * m01
    w3 = -(a0 * m12 - a1 * m02 + a2 * m01)
    return MinkVec(w0, w1, w2, w3)


def membership_residual(x: MinkVec, target: Quadric) -> float:
    """<x,x> + 1 for H3, <x,x> - 1 for S31; zero iff on the quadric."""
    q = mink_dot(x, x)
    if target is Quadric.H3:
        return q + 1.0
    if target is Quadric.S31:
        return q - 1.0
    raise InvalidInputError(f"unknown quadric {target!r}")


def det4(x0: MinkVec, x1: MinkVec, x2: MinkVec, x3: MinkVec) -> float:
    """Determinant of the four vectors as rows (NumPy LU path)."""
    return float(np.linalg.det(np.array([list(x0), list(x1), list(x2), list(x3)])))
