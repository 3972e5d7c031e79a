"""Classification of Sp(n,1) elements and their conjugacy invariants."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, NotSymplecticError
from .hypmodel import PointLift
from .quatcore import (
    MERGE_TOL,
    SYMPLECTIC_TOL,
    EigenData,
    HermitianForm,
    LengthSign,
    QMatrix,
    Quaternion,
    _eigenspace,
    _qcols,
    _qgram_schmidt,
    _vector_from_adjoint,
    adjoint_star,
    complex_adjoint,
    right_eigen,
    symplectic_residual,
)

MODULUS_TOL = 1e-6
SIGN_TOL = 1e-6
UNIPOTENT_TOL = 1e-8


class Kind(enum.Enum):
    IDENTITY = "Identity"
    REGULAR_ELLIPTIC = "RegularElliptic"
    ELLIPTIC = "Elliptic"
    LOXODROMIC = "Loxodromic"
    PARABOLIC = "Parabolic"
    HEISENBERG_TRANSLATION = "HeisenbergTranslation"

    @property
    def is_elliptic(self) -> bool:
        return self in (Kind.ELLIPTIC, Kind.REGULAR_ELLIPTIC)


@dataclass(frozen=True)
class IsometryClassification:
    kind: Kind
    eigen: EigenData
    form: HermitianForm
    matrix: QMatrix
    fixed_points: tuple[PointLift, ...] = ()
    negative_class_index: int | None = None
    margin: float = math.inf
    warnings: tuple[str, ...] = ()

    @property
    def lambda1(self) -> complex:
        if self.negative_class_index is None:
            raise ClassificationError(f"{self.kind.value} element has no distinguished eigenvalue")
        return self.eigen.reps[self.negative_class_index]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "eigen": self.eigen.to_json(),
            "negativeClassIndex": self.negative_class_index,
            "fixedPoints": [p.to_json() for p in self.fixed_points],
            "margin": self.margin if math.isfinite(self.margin) else None,
            "warnings": list(self.warnings),
        }
        return out


@dataclass(frozen=True)
class InvariantSet:
    delta: float | None = None
    delta_cp: float | None = None
    m_g: float | None = None
    delta_ct: float | None = None
    applicable_kinds: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: {
            "delta": (Kind.ELLIPTIC.value, Kind.REGULAR_ELLIPTIC.value),
            "deltaCt": (Kind.ELLIPTIC.value, Kind.REGULAR_ELLIPTIC.value),
            "deltaCp": (Kind.LOXODROMIC.value,),
            "M_g": (Kind.LOXODROMIC.value,),
        }
    )

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "deltaCp": self.delta_cp,
            "M_g": self.m_g,
            "deltaCt": self.delta_ct,
            "applicableKinds": {k: list(v) for k, v in self.applicable_kinds.items()},
        }


@dataclass(frozen=True)
class HeisenbergParams:
    s: Quaternion
    zeta: QMatrix | None
    residual: float = 0.0

    @property
    def zeta_norm(self) -> float:
        return 0.0 if self.zeta is None else self.zeta.frobenius()

    def to_json(self) -> dict:
        z = [] if self.zeta is None else [list(map(float, q)) for q in self.zeta.array[:, 0, :]]
        return {"s": self.s.to_json(), "zeta": z, "zetaNorm": self.zeta_norm, "residual": self.residual}


def _unipotent_sign(A: QMatrix, tol: float) -> int:
    """+1 if A - I is nilpotent, -1 if A + I is, 0 otherwise."""
    size = A.rows
    ident = QMatrix.identity(size)
    for sign in (1, -1):
        N = A - ident.scale(sign)
        nn = N.max_norm()
        if nn == 0.0:
            return sign
        # compare scale-free: N / |N| to the power size
        Ns = N.scale(1.0 / nn)
        if Ns.power(size).max_norm() <= tol:
            return sign
    return 0


def _kernel_null_vector(N: QMatrix, J: HermitianForm) -> QMatrix:
    """The null vector in ker N (unique up to scale for a parabolic element)."""
    chiN = complex_adjoint(N)
    cand = _eigenspace(chiN, 0.0, chiN.shape[0], 1e-7)
    basis = _qgram_schmidt(cand, 1e-6)
    B = _qcols(basis)
    G = adjoint_star(B) @ J.matrix @ B
    w, vecs = np.linalg.eigh(0.5 * (complex_adjoint(G) + complex_adjoint(G).conj().T))
    k = int(np.argmin(np.abs(w)))
    c = _vector_from_adjoint(vecs[:, k])
    return B @ QMatrix(c[:, None, :])


def classify(
    A: QMatrix,
    J: HermitianForm,
    tol: float = SYMPLECTIC_TOL,
    *,
    modulus_tol: float = MODULUS_TOL,
    merge_tol: float = MERGE_TOL,
    sign_tol: float = SIGN_TOL,
    unipotent_tol: float = UNIPOTENT_TOL,
) -> IsometryClassification:
    """Decide the dynamical type of ``A`` from its eigenvalue classes.

    Order of tests: +-identity; unipotent (Heisenberg translation); some class
    off the unit circle (loxodromic); a negative-length eigenvector
    (elliptic, regular when all classes are simple); otherwise parabolic.
    """
    res = symplectic_residual(A, J)
    if res > tol:
        raise NotSymplecticError(f"matrix is not in Sp({J.n},1): residual {res:.3e} > {tol:.1e}")
    size = J.size
    ident = QMatrix.identity(size)
    if (A - ident).max_norm() <= tol or (A + ident).max_norm() <= tol:
        eig = right_eigen(A, merge_tol, form=J, sign_tol=sign_tol)
        return IsometryClassification(Kind.IDENTITY, eig, J, A, margin=math.inf)

    sign = _unipotent_sign(A, unipotent_tol)
    if sign:
        N = A - ident.scale(sign)
        v = _kernel_null_vector(N, J)
        eig = EigenData(
            reps=(complex(sign, 0.0),),
            multiplicities=(size,),
            spaces=(v.scale(1.0 / v.frobenius()),),
            lengths=((J.pair(v, v).w / v.frobenius() ** 2,),),
            length_signs=(LengthSign.ZERO,),
            residual=(A @ v - v.scale(sign)).max_norm(),
        )
        return IsometryClassification(
            Kind.HEISENBERG_TRANSLATION, eig, J, A, fixed_points=(PointLift.from_vector(v, J, tol=1e-6),)
        )

    eig = right_eigen(A, merge_tol, form=J, sign_tol=sign_tol)
    mods = np.array([abs(r) for r in eig.reps])
    excess = float(np.max(mods) - 1.0)
    if excess > modulus_tol:
        if excess <= 10.0 * modulus_tol:
            raise ClassificationError(
                f"largest eigenvalue modulus exceeds 1 by {excess:.3e}, inside the ambiguity band",
                margin=excess - modulus_tol,
            )
        i1 = int(np.argmax(mods))
        i2 = int(np.argmin(mods))
        u = eig.spaces[i1][:, 0:1]
        v = eig.spaces[i2][:, 0:1]
        fps = (PointLift.from_vector(u, J, tol=1e-6), PointLift.from_vector(v, J, tol=1e-6))
        return IsometryClassification(
            Kind.LOXODROMIC, eig, J, A, fixed_points=fps, negative_class_index=i1,
            margin=excess - modulus_tol,
        )

    min_lengths = [min(ls) for ls in eig.lengths]
    neg = int(np.argmin(min_lengths))
    most_negative = min_lengths[neg]
    margin = abs(most_negative) - sign_tol
    if -10.0 * sign_tol <= most_negative < -sign_tol:
        raise ClassificationError(
            f"most negative eigenvector length {most_negative:.3e} inside the ambiguity band",
            margin=margin,
        )
    if most_negative < -sign_tol:
        warnings = []
        if eig.multiplicities[neg] > 1:
            warnings.append(
                f"negative eigenvalue class has multiplicity {eig.multiplicities[neg]}; "
                "lambda_1 is taken as that class"
            )
        kind = Kind.REGULAR_ELLIPTIC if all(m == 1 for m in eig.multiplicities) else Kind.ELLIPTIC
        q = eig.spaces[neg][:, 0:1]
        return IsometryClassification(
            kind, eig, J, A, fixed_points=(PointLift.from_vector(q, J),),
            negative_class_index=neg, margin=margin, warnings=tuple(warnings),
        )

    # parabolic: a null eigenvector gives the fixed boundary point
    best, vec = math.inf, None
    for space, lens in zip(eig.spaces, eig.lengths):
        for k, ell in enumerate(lens):
            if abs(ell) < best:
                best, vec = abs(ell), space[:, k : k + 1]
    fps = (PointLift.from_vector(vec, J, tol=1e-6),) if vec is not None else ()
    return IsometryClassification(Kind.PARABOLIC, eig, J, A, fixed_points=fps, margin=-margin)


def _require(C: IsometryClassification, kinds: tuple[Kind, ...], what: str) -> None:
    if C.kind not in kinds:
        raise ClassificationError(f"{what} is defined for {[k.value for k in kinds]}, got {C.kind.value}")


def delta_elliptic(C: IsometryClassification) -> float:
    """max_i |lambda_1 - 1| + |lambda_i - 1| over the eigenvalues other than lambda_1."""
    _require(C, (Kind.ELLIPTIC, Kind.REGULAR_ELLIPTIC), "delta")
    lam1 = C.lambda1
    others = C.eigen.eigenvalue_list()
    others.remove(lam1)
    return max(abs(lam1 - 1) + abs(lam - 1) for lam in others)


def delta_ct(C: IsometryClassification) -> float:
    """max_i |lambda_i -+ lambda_1|^2, maximized over both conjugate representatives."""
    _require(C, (Kind.ELLIPTIC, Kind.REGULAR_ELLIPTIC), "delta_ct")
    lam1 = C.lambda1
    others = C.eigen.eigenvalue_list()
    others.remove(lam1)
    return max(max(abs(lam - lam1), abs(lam.conjugate() - lam1)) ** 2 for lam in others)


def loxodromic_invariants(C: IsometryClassification) -> InvariantSet:
    _require(C, (Kind.LOXODROMIC,), "delta_cp and M_g")
    reps = C.eigen.reps
    mods = [abs(r) for r in reps]
    i1, i2 = int(np.argmax(mods)), int(np.argmin(mods))
    lam1, lam2 = reps[i1], reps[i2]
    rest = [abs(r - 1) for k, r in enumerate(reps) if k not in (i1, i2)]
    d_cp = max(rest, default=0.0)
    m_g = 2.0 * d_cp + abs(lam1 - 1) + abs(lam2 - 1)
    return InvariantSet(delta_cp=d_cp, m_g=m_g)


def invariants(C: IsometryClassification) -> InvariantSet:
    """All invariants defined for the element's kind; the others are ``None``."""
    if C.kind.is_elliptic:
        return InvariantSet(delta=delta_elliptic(C), delta_ct=delta_ct(C))
    if C.kind is Kind.LOXODROMIC:
        return loxodromic_invariants(C)
    return InvariantSet()


def heisenberg_params(A: QMatrix, tol: float = 1e-9) -> HeisenbergParams:
    """Read ``s`` and ``zeta`` off a matrix in the normal form [[1,0,0],[s,1,zeta*],[zeta,0,I]]."""
    if not A.is_square() or A.rows < 2:
        raise ClassificationError(f"not a Heisenberg normal form: shape {A.shape}")
    size = A.rows
    s = A.entry(1, 0)
    zeta = A[2:, 0:1] if size > 2 else None
    expected = QMatrix.identity(size).array.copy()
    expected[1, 0] = s.as_array()
    if zeta is not None:
        expected[2:, 0:1] = zeta.array
        expected[1:2, 2:] = adjoint_star(zeta).array
    shape_res = float(np.max(np.abs(A.array - expected)))
    if shape_res > tol:
        raise ClassificationError(
            f"matrix is not in Heisenberg normal form (residual {shape_res:.3e}); conjugate it first",
            margin=shape_res,
        )
    znorm2 = 0.0 if zeta is None else zeta.frobenius() ** 2
    if abs(s) <= tol and znorm2 <= tol**2:
        raise ClassificationError("identity is not a Heisenberg translation")
    res = abs(s.w - 0.5 * znorm2)
    if res > tol:
        raise ClassificationError(f"Re(s) - |zeta|^2/2 = {res:.3e} violates the normal form", margin=res)
    return HeisenbergParams(s, zeta, res)


def heisenberg_translation(s, zeta) -> QMatrix:
    """The matrix T_{s,zeta} (Siegel model); ``zeta`` has n-1 quaternion entries."""
    s = Quaternion.coerce(s)
    zeta = [Quaternion.coerce(q) for q in zeta]
    size = len(zeta) + 2
    a = np.zeros((size, size, 4))
    a[np.arange(size), np.arange(size), 0] = 1.0
    a[1, 0] = s.as_array()
    for k, q in enumerate(zeta):
        a[2 + k, 0] = q.as_array()
        a[1, 2 + k] = q.conj().as_array()
    return QMatrix(a)
