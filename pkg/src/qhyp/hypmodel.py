"""Projective model of quaternionic hyperbolic space.

Points are represented by lifts in H^{n,1}; a lift ``z`` and ``z q`` (q a
nonzero quaternion) name the same point.  Negative lifts are interior points,
null lifts are boundary points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, DimensionError, QHypError
from .quatcore import (
    SYMPLECTIC_TOL,
    HermitianForm,
    Presentation,
    QMatrix,
    Quaternion,
    _require_symplectic,
)

BOUNDARY_TOL = 1e-9


class Region(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class PointLift:
    vector: QMatrix
    form_length: float
    region: Region

    @classmethod
    def from_vector(cls, v, J: HermitianForm, tol: float = BOUNDARY_TOL) -> "PointLift":
        if isinstance(v, PointLift):
            v = v.vector
        if not isinstance(v, QMatrix):
            v = QMatrix.column(v)
        if v.cols != 1:
            raise DimensionError(f"a lift is a column vector, got shape {v.shape}")
        J.check_size(v)
        length = J.pair(v, v).w
        scale = v.frobenius() ** 2
        if scale == 0.0:
            raise QHypError("the zero vector is not a lift of any point")
        if abs(length) <= tol * scale:
            region = Region.BOUNDARY
        elif length < 0:
            region = Region.INTERIOR
        else:
            region = Region.EXTERIOR
        return cls(v, length, region)

    def rescale(self, q, J: HermitianForm) -> "PointLift":
        return PointLift.from_vector(self.vector * Quaternion.coerce(q), J)

    def to_json(self) -> dict:
        return {
            "vector": [[float(c) for c in q] for q in self.vector.array[:, 0, :]],
            "formLength": self.form_length,
            "region": self.region.value,
        }

    @classmethod
    def from_json(cls, obj, J: HermitianForm) -> "PointLift":
        try:
            vec = obj["vector"] if isinstance(obj, dict) else obj
            a = np.asarray(vec, dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise DimensionError(f"malformed point JSON: {exc}") from exc
        if a.ndim != 2 or a.shape[1] != 4:
            raise DimensionError(f"point vector must be a list of [w,x,y,z], got shape {a.shape}")
        return cls.from_vector(QMatrix(a[:, None, :]), J)


def _vec(z) -> QMatrix:
    return z.vector if isinstance(z, PointLift) else z


def origin(J: HermitianForm) -> PointLift:
    """Ball-model origin (first basis vector); requires the ball presentation."""
    if J.presentation is not Presentation.BALL:
        raise QHypError("the origin is only marked in the ball model")
    return PointLift.from_vector(QMatrix.basis_vector(J.size, 0), J)


def zero_point(J: HermitianForm) -> PointLift:
    """Siegel boundary point 0, lifted to (0, 1, 0, ..., 0)."""
    if J.presentation is not Presentation.SIEGEL:
        raise QHypError("the boundary point 0 is only marked in the Siegel model")
    return PointLift.from_vector(QMatrix.basis_vector(J.size, 1), J)


def infinity_point(J: HermitianForm) -> PointLift:
    """Siegel boundary point infinity, lifted to (1, 0, ..., 0)."""
    if J.presentation is not Presentation.SIEGEL:
        raise QHypError("the boundary point infinity is only marked in the Siegel model")
    return PointLift.from_vector(QMatrix.basis_vector(J.size, 0), J)


def pairing(z, w, J: HermitianForm) -> Quaternion:
    """Hermitian pairing ``<z, w> = z* J w``; conjugate-linear in ``z``."""
    return J.pair(_vec(z), _vec(w))


def cosh_half_distance(z, w, J: HermitianForm) -> float:
    """cosh(rho/2) for the Bergman distance rho between two interior points."""
    z, w = PointLift.from_vector(_vec(z), J), PointLift.from_vector(_vec(w), J)
    for name, p in (("z", z), ("w", w)):
        if p.region is not Region.INTERIOR:
            raise QHypError(f"Bergman distance needs interior points; {name} is {p.region.value}")
    zw = pairing(z, w, J)
    ratio = zw.norm2() / (z.form_length * w.form_length)
    return math.sqrt(max(ratio, 1.0))


def bergman_distance(z, w, J: HermitianForm) -> float:
    return 2.0 * math.acosh(cosh_half_distance(z, w, J))


def apply_isometry(
    A: QMatrix, z, J: HermitianForm, tol: float = SYMPLECTIC_TOL, check: bool = True
) -> PointLift:
    if check:
        _require_symplectic(A, J, tol)
    return PointLift.from_vector(A @ _vec(z), J)


def same_point(z, w, tol: float = 1e-9) -> bool:
    """Whether two lifts differ by a right quaternionic scalar."""
    z, w = _vec(z), _vec(w)
    zz = float(np.sum(z.array**2))
    # best q minimizes |z q - w|: q = (z* w) / |z|^2
    q = (z.H @ w).entry(0, 0) / zz if zz else Quaternion()
    r = (z * q - w).frobenius()
    return r <= tol * max(1.0, w.frobenius())


@dataclass(frozen=True)
class CrossRatioValue:
    value: Quaternion
    modulus: float

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "modulus": self.modulus}


def cross_ratio(z1, z2, z3, z4, J: HermitianForm) -> CrossRatioValue:
    """``[z1, z2, z3, z4] = <z3,z1> <z3,z2>^{-1} <z4,z2> <z4,z1>^{-1}`` in this factor order."""
    p31 = pairing(z3, z1, J)
    p32 = pairing(z3, z2, J)
    p42 = pairing(z4, z2, J)
    p41 = pairing(z4, z1, J)
    for name, p, a, b in (("<z3,z2>", p32, z3, z2), ("<z4,z1>", p41, z4, z1)):
        if abs(p) <= 1e-14 * _vec(a).frobenius() * _vec(b).frobenius():
            raise DegenerateConfigurationError(
                f"cross ratio undefined: pairing {name} vanishes", pairing=name
            )
    value = p31 * p32.inverse() * p42 * p41.inverse()
    return CrossRatioValue(value, abs(value))
