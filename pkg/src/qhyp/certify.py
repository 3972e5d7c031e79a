"""Executable Jorgensen-type certificates.

Each predicate is a necessary condition for a two-generator group to be
non-elementary and discrete.  A violated inequality certifies that the group
is elementary or not discrete; a satisfied one certifies nothing, so no
verdict ever claims discreteness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, DegenerateConfigurationError, QHypError
from .hypmodel import (
    PointLift,
    cosh_half_distance,
    cross_ratio,
    same_point,
)
from .isometry import Kind, classify, delta_elliptic, heisenberg_params, loxodromic_invariants
from .quatcore import (
    SYMPLECTIC_TOL,
    HermitianForm,
    QMatrix,
    is_symplectic,
)

BOUNDARY_EQ_TOL = 1e-12
FIXES_ZERO_TOL = 1e-8


class Verdict(enum.Enum):
    NON_DISCRETE_OR_ELEMENTARY = "NonDiscreteOrElementary"
    NECESSARY_CONDITION_HOLDS = "NecessaryConditionHolds"
    NOT_APPLICABLE = "NotApplicable"


class Predicate(enum.Enum):
    ELLIPTIC_JORGENSEN = "EllipticJorgensen"
    CAO_PARKER = "CaoParker"
    SHIMIZU = "Shimizu"
    SL2C = "SL2C"


@dataclass(frozen=True)
class Certificate:
    """Outcome of one predicate.  ``lhs < rhs`` is the certifying inequality."""

    verdict: Verdict
    predicate: Predicate
    evidence: dict[str, float] = field(default_factory=dict)
    hypothesis: str | None = None
    boundary: bool = False
    notes: dict[str, object] = field(default_factory=dict)

    def recheck(self) -> Verdict:
        """Recompute the verdict from the evidence map alone."""
        if self.hypothesis is not None:
            return Verdict.NOT_APPLICABLE
        lhs, rhs = self.evidence["lhs"], self.evidence["rhs"]
        return _decide(lhs, rhs)[0]

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "predicate": self.predicate.value,
            "evidence": dict(self.evidence),
            "boundary": self.boundary,
        }
        if self.hypothesis is not None:
            out["hypothesis"] = self.hypothesis
        if self.notes:
            out["notes"] = self.notes
        return out


def _decide(lhs: float, rhs: float) -> tuple[Verdict, bool]:
    if abs(lhs - rhs) <= BOUNDARY_EQ_TOL * max(1.0, abs(rhs)):
        return Verdict.NECESSARY_CONDITION_HOLDS, True
    if lhs < rhs:
        return Verdict.NON_DISCRETE_OR_ELEMENTARY, False
    return Verdict.NECESSARY_CONDITION_HOLDS, False


def _certificate(predicate: Predicate, evidence: dict[str, float], **kw) -> Certificate:
    verdict, boundary = _decide(evidence["lhs"], evidence["rhs"])
    return Certificate(verdict, predicate, evidence, boundary=boundary, **kw)


def _not_applicable(predicate: Predicate, reason: str, evidence=None, **notes) -> Certificate:
    return Certificate(
        Verdict.NOT_APPLICABLE, predicate, dict(evidence or {}), hypothesis=reason, notes=notes
    )


def elliptic_certificate(
    g: QMatrix,
    h: QMatrix,
    J: HermitianForm,
    *,
    fixed_point=None,
    allow_nonregular: bool = False,
    tol: float = SYMPLECTIC_TOL,
) -> Certificate:
    """cosh(rho(q, h(q))/2) * delta(g) < 1 for g regular elliptic with fixed point q.

    ``allow_nonregular`` admits elliptic g with repeated eigenvalue classes;
    ``fixed_point`` then selects q inside g's fixed set (the negative
    eigenvector of lambda_1 is used otherwise).
    """
    pred = Predicate.ELLIPTIC_JORGENSEN
    if not is_symplectic(h, J, tol):
        return _not_applicable(pred, "h not in Sp(n,1)")
    try:
        C = classify(g, J, tol)
    except QHypError as exc:
        return _not_applicable(pred, f"g not classifiable: {exc}")
    regular = C.kind is Kind.REGULAR_ELLIPTIC
    if not regular and not (allow_nonregular and C.kind in (Kind.ELLIPTIC, Kind.IDENTITY)):
        return _not_applicable(pred, "g not regular elliptic", kind=C.kind.value)

    if C.kind is Kind.IDENTITY:
        lams = C.eigen.eigenvalue_list()
        lam1 = lams[0]
        others = lams[1:]
        delta = max(abs(lam1 - 1) + abs(lam - 1) for lam in others)
    else:
        delta = delta_elliptic(C)
    if fixed_point is None:
        if not C.fixed_points:
            return _not_applicable(pred, "no interior fixed point for g")
        q = C.fixed_points[0]
    else:
        q = PointLift.from_vector(fixed_point, J)
        gq = g @ q.vector
        if not same_point(q.vector, gq, 1e-8):
            return _not_applicable(pred, "supplied point is not fixed by g")
    hq = h @ q.vector
    cosh_term = cosh_half_distance(q, hq, J)
    evidence = {
        "coshTerm": cosh_term,
        "delta": delta,
        "lhs": cosh_term * delta,
        "rhs": 1.0,
        "regular": 1.0 if regular else 0.0,
    }
    return _certificate(pred, evidence)


def cao_parker_certificate(
    g: QMatrix, h: QMatrix, J: HermitianForm, *, tol: float = SYMPLECTIC_TOL
) -> Certificate:
    """|[h(u),u,v,h(v)]|^(1/2) |[h(u),v,u,h(v)]|^(1/2) < (1 - M_g)/M_g^2 for loxodromic g."""
    pred = Predicate.CAO_PARKER
    if not is_symplectic(h, J, tol):
        return _not_applicable(pred, "h not in Sp(n,1)")
    try:
        C = classify(g, J, tol)
    except QHypError as exc:
        return _not_applicable(pred, f"g not classifiable: {exc}")
    if C.kind is not Kind.LOXODROMIC:
        return _not_applicable(pred, "g not loxodromic", kind=C.kind.value)
    inv = loxodromic_invariants(C)
    m_g = inv.m_g
    if m_g >= 1.0:
        return _not_applicable(pred, "M_g >= 1", {"M_g": m_g})
    u, v = C.fixed_points
    hu = h @ u.vector
    hv = h @ v.vector
    try:
        cr1 = cross_ratio(hu, u, v, hv, J)
        cr2 = cross_ratio(hu, v, u, hv, J)
    except DegenerateConfigurationError as exc:
        return _not_applicable(pred, f"degenerate cross ratio: {exc.pairing} vanishes", {"M_g": m_g})
    lhs = math.sqrt(cr1.modulus) * math.sqrt(cr2.modulus)
    rhs = (1.0 - m_g) / m_g**2
    evidence = {
        "M_g": m_g,
        "deltaCp": inv.delta_cp,
        "crossRatio1": cr1.modulus,
        "crossRatio2": cr2.modulus,
        "lhs": lhs,
        "rhs": rhs,
    }
    return _certificate(pred, evidence)


def fixes_zero(A: QMatrix, tol: float = FIXES_ZERO_TOL) -> bool:
    """Whether A maps the Siegel boundary point 0 to itself.

    min over quaternions q of |A e2 - e2 q| is the norm of A e2 without its
    second entry.
    """
    col = A.array[:, 1, :].copy()
    col[1] = 0.0
    return float(np.sqrt(np.sum(col**2))) <= tol * max(1.0, A.max_norm())


def shimizu_certificate(
    T: QMatrix, A: QMatrix, *, tol: float = SYMPLECTIC_TOL
) -> Certificate:
    """M t + 2|zeta| < 1 with t = sup{|b|, |beta|, |gamma|, |U - I|}, M = |s| + 2|zeta|.

    Vector blocks use the Euclidean norm; ``|U - I|`` is the largest entry
    modulus.  Raw block norms are recorded so other norm choices can be
    recomputed.
    """
    pred = Predicate.SHIMIZU
    if T.shape != A.shape or not T.is_square():
        return _not_applicable(pred, "T and A must be square of equal size")
    n = T.rows - 1
    J = HermitianForm.siegel(n)
    try:
        params = heisenberg_params(T)
    except ClassificationError as exc:
        return _not_applicable(pred, f"T not in Heisenberg normal form: {exc}")
    if not is_symplectic(A, J, tol):
        return _not_applicable(pred, "A not in Sp(n,1)")
    if fixes_zero(A):
        return _not_applicable(pred, "A fixes 0")
    b = abs(A.entry(0, 1))
    if n >= 2:
        beta = A[2:, 1:2].frobenius()
        gamma = A[0:1, 2:].frobenius()
        u_dev = (A[2:, 2:] - QMatrix.identity(n - 1)).max_norm()
    else:
        beta = gamma = u_dev = 0.0
    t = max(b, beta, gamma, u_dev)
    zeta = params.zeta_norm
    M = abs(params.s) + 2.0 * zeta
    evidence = {
        "t": t,
        "M": M,
        "Mzeta": 2.0 * zeta,
        "absS": abs(params.s),
        "absZeta": zeta,
        "absB": b,
        "normBeta": beta,
        "normGamma": gamma,
        "maxUminusI": u_dev,
        "lhs": M * t + 2.0 * zeta,
        "rhs": 1.0,
    }
    return _certificate(pred, evidence, notes={"norms": "beta,gamma Euclidean; U-I entrywise max"})


def sl2c_certificate(theta: float, h) -> Certificate:
    """4 sin^2(theta/2) (||h||^2 + 2) < 1 for g = diag(e^{i theta}, e^{-i theta})."""
    pred = Predicate.SL2C
    if not 0.0 <= theta <= math.pi:
        raise QHypError("theta must lie in [0, pi]")
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise QHypError(f"h must be 2x2, got {h.shape}")
    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    if abs(det - 1.0) > 1e-10:
        raise QHypError(f"h must have determinant 1, got {det}")
    norm2 = float(np.sum(np.abs(h) ** 2))
    s2 = math.sin(theta / 2.0) ** 2
    evidence = {
        "theta": float(theta),
        "sinHalfSq": s2,
        "normSq": norm2,
        "lhs": 4.0 * s2 * (norm2 + 2.0),
        "rhs": 1.0,
    }
    return _certificate(pred, evidence)
