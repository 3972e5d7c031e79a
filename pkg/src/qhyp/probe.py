"""Conjugation-iteration probe for elliptic two-generator groups.

With g = diag(lambda_1, L) regular elliptic in the ball model and
h_0 = h, the sequence h_{k+1} = h_k g h_k^{-1} has

    |a11^(k+1)|^2 - 1 <= (|a11^(k)|^2 - 1) |a11^(k)|^2 delta(g)^2,

so whenever |a11(h)| delta(g) < 1 the top-left entry shrinks to modulus 1
and the off-diagonal blocks die out, exhibiting a block-diagonal limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, QHypError
from .isometry import Kind, classify, delta_elliptic
from .quatcore import (
    SYMPLECTIC_TOL,
    HermitianForm,
    LengthSign,
    Presentation,
    QMatrix,
    Quaternion,
    adjoint_star,
    is_symplectic,
    symplectic_inverse,
)

ELEMENTARY_TOL = 1e-13
# |a11| beyond this makes h_k^{-1} too ill-conditioned (about |a11|^4 eps) to trust
DIVERGENCE_CAP = 1e4
MONOTONE_FLOOR = 1e-12


@dataclass(frozen=True)
class ProbeStep:
    k: int
    a11_mod: float
    beta_norm: float
    alpha_norm: float
    off_block_residual: float
    unitary_residual: float
    u_spread: tuple[float, ...] = ()


@dataclass
class ProbeTrace:
    steps: list[ProbeStep] = field(default_factory=list)
    bound: list[float] = field(default_factory=list)
    delta: float = math.nan
    premise: float = math.nan
    bound_checked: bool = False
    converged: bool = False
    elementary_detected: bool = False
    limit: QMatrix | None = None
    iterates_symplectic: bool = True
    diverged: bool = False

    def bound_slack(self) -> list[float]:
        """rhs - lhs of the geometric bound for k >= 1 (index 0 is unused and set to inf)."""
        out = [math.inf]
        for step, b in zip(self.steps[1:], self.bound[1:]):
            out.append(b - (step.a11_mod**2 - 1.0))
        return out

    def bound_holds(self) -> bool:
        return all(s > 0 for s in self.bound_slack()[1:])

    def monotone(self, floor: float = MONOTONE_FLOOR) -> bool:
        mods = [s.a11_mod for s in self.steps]
        return all(b < a for a, b in zip(mods, mods[1:]) if a > 1.0 + floor)

    def to_json(self) -> dict:
        return {
            "steps": [
                {
                    "k": s.k,
                    "a11Mod": s.a11_mod,
                    "betaNorm": s.beta_norm,
                    "alphaNorm": s.alpha_norm,
                    "offBlockResidual": s.off_block_residual,
                    "unitaryResidual": s.unitary_residual,
                    "uDiagnostics": list(s.u_spread),
                }
                for s in self.steps
            ],
            "bound": self.bound,
            "delta": self.delta,
            "premise": self.premise,
            "boundChecked": self.bound_checked,
            "converged": self.converged,
            "elementaryDetected": self.elementary_detected,
            "diverged": self.diverged,
            "limit": None if self.limit is None else self.limit.to_json(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "a11Mod", "bound"])
        for s, b in zip(self.steps, self.bound):
            w.writerow([s.k, repr(s.a11_mod), repr(b)])
        return buf.getvalue()


def _step_record(h: QMatrix, k: int, g_diag: list[Quaternion]) -> ProbeStep:
    a = h.array
    a11 = float(np.sqrt(np.sum(a[0, 0] ** 2)))
    beta = float(np.sqrt(np.sum(a[0, 1:] ** 2)))
    alpha = float(np.sqrt(np.sum(a[1:, 0] ** 2)))
    off = float(max(np.max(np.sqrt(np.sum(a[0, 1:] ** 2, axis=-1)), initial=0.0),
                    np.max(np.sqrt(np.sum(a[1:, 0] ** 2, axis=-1)), initial=0.0)))
    Ab = h[1:, 1:]
    unit = (Ab @ adjoint_star(Ab) - QMatrix.identity(Ab.rows)).max_norm()
    # u_i = conj(a_1i)^{-1} lambda_i conj(a_1i); spread |u_1 - u_i|
    spread = []
    row = [h.entry(0, j) for j in range(h.cols)]
    us = []
    for lam, aij in zip(g_diag, row):
        c = aij.conj()
        us.append(c.inverse() * lam * c if abs(c) > 0 else None)
    if us[0] is not None:
        for u in us[1:]:
            spread.append(abs(us[0] - u) if u is not None else math.nan)
    return ProbeStep(k, a11, beta, alpha, off, unit, tuple(spread))


def _resymplectify(A: QMatrix, J: HermitianForm, sweeps: int = 2) -> QMatrix:
    """Newton correction A <- A (I - J D / 2) with D = A* J A - J.

    Rounding errors along non-symplectic directions are amplified by the
    iteration, so every iterate is pulled back onto Sp(n,1).
    """
    Jm = J.matrix
    ident = QMatrix.identity(A.rows)
    for _ in range(sweeps):
        D = adjoint_star(A) @ Jm @ A - Jm
        A = A @ (ident - (Jm @ D).scale(0.5))
    return A


def _check_diagonal(g: QMatrix, tol: float) -> list[Quaternion]:
    off = g.array.copy()
    idx = np.arange(g.rows)
    off[idx, idx] = 0.0
    if float(np.max(np.abs(off))) > tol:
        raise QHypError("g must be diagonal; use diagonalize() first")
    return [g.entry(i, i) for i in range(g.rows)]


def run_probe(
    g: QMatrix,
    h: QMatrix,
    J: HermitianForm,
    max_steps: int = 200,
    conv_tol: float = 1e-9,
) -> ProbeTrace:
    """Iterate h_{k+1} = h_k g h_k^{-1} and record |a11|, block norms and the bound.

    ``bound[k] = (|a11(h)|^2 - 1) (|a11(h)|^2 delta(g)^2)^k`` is only checked
    when |a11(h)| delta(g) < 1.  Iteration stops when the off-diagonal blocks
    and the unitarity defect of the lower block are all below ``conv_tol``
    (from k = 1 on).  A run whose |a11| exceeds ``DIVERGENCE_CAP`` stops with
    ``diverged`` set; the iterates beyond that point carry no reliable digits.
    """
    if J.presentation is not Presentation.BALL:
        raise QHypError("the probe works in the ball model")
    C = classify(g, J)
    if C.kind is not Kind.REGULAR_ELLIPTIC:
        raise ClassificationError(f"g must be regular elliptic, got {C.kind.value}")
    if C.eigen.length_signs[C.negative_class_index] is not LengthSign.NEGATIVE:
        raise ClassificationError("lambda_1 has no negative eigenvector")
    g_diag = _check_diagonal(g, 1e-12)
    # lambda_1 must sit at the origin: e1 is an eigenvector of negative length
    delta = delta_elliptic(C)
    if not is_symplectic(h, J):
        raise QHypError("h is not in Sp(n,1)")

    a0 = abs(h.entry(0, 0))
    trace = ProbeTrace(delta=delta, premise=a0 * delta)
    trace.bound_checked = a0 * delta < 1.0
    rate = a0**2 * delta**2
    base = a0**2 - 1.0

    hk = h
    for k in range(max_steps + 1):
        if not np.all(np.isfinite(hk.array)):
            raise OverflowError(f"iterate {k} overflowed")
        rec = _step_record(hk, k, g_diag)
        trace.steps.append(rec)
        trace.bound.append(base * rate**k)
        if not is_symplectic(hk, J, 1e-8):
            trace.iterates_symplectic = False
        if rec.beta_norm <= ELEMENTARY_TOL:
            trace.elementary_detected = True
        if k >= 1 and max(rec.beta_norm, rec.alpha_norm, rec.off_block_residual) <= conv_tol:
            trace.converged = True
            break
        if rec.a11_mod > DIVERGENCE_CAP:
            trace.diverged = True
            break
        if k == max_steps:
            break
        hk = _resymplectify(hk @ g @ symplectic_inverse(hk, J, tol=1e-6), J)
    trace.limit = hk
    return trace


def diagonalize(g: QMatrix, J: HermitianForm) -> tuple[QMatrix, QMatrix]:
    """Return (D, k) with k g k^{-1} = D diagonal and k symplectic.

    Elliptic elements are diagonalized in the ball model (the negative-length
    eigenvector first, normalized to <v,v> = -1); loxodromic ones in the
    Siegel model as diag(lambda_1, conj(lambda_1)^{-1}, ...) with the two null
    eigenvectors paired so that <v1, v2> = -1.
    """
    C = classify(g, J)
    eig = C.eigen
    cols: list[QMatrix] = []
    diag: list[Quaternion] = []
    if C.kind.is_elliptic:
        if J.presentation is not Presentation.BALL:
            raise QHypError("elliptic elements are diagonalized in the ball model")
        neg = C.negative_class_index
        order = [neg] + [i for i in range(len(eig.reps)) if i != neg]
        for i in order:
            space, lens = eig.spaces[i], eig.lengths[i]
            for j in range(space.cols):
                v = space[:, j : j + 1]
                ell = lens[j]
                if i != neg and ell <= 0:
                    raise QHypError(f"eigenvector of length {ell:.3e} in a positive class")
                cols.append(v.scale(1.0 / math.sqrt(abs(ell))))
                diag.append(Quaternion.from_complex(eig.reps[i]))
            if space.cols != eig.multiplicities[i]:
                raise QHypError(
                    f"class {eig.reps[i]} is defective: {space.cols} eigenvectors for "
                    f"multiplicity {eig.multiplicities[i]}"
                )
    elif C.kind is Kind.LOXODROMIC:
        if J.presentation is not Presentation.SIEGEL:
            raise QHypError("loxodromic elements are diagonalized in the Siegel model")
        mods = [abs(r) for r in eig.reps]
        i1, i2 = int(np.argmax(mods)), int(np.argmin(mods))
        v1 = eig.spaces[i1][:, 0:1]
        v2 = eig.spaces[i2][:, 0:1]
        p = J.pair(v1, v2)
        v2 = v2 * (-(p.inverse()))
        cols += [v1, v2]
        diag += [Quaternion.from_complex(eig.reps[i1]), Quaternion.from_complex(eig.reps[i2])]
        for i in range(len(eig.reps)):
            if i in (i1, i2):
                continue
            space, lens = eig.spaces[i], eig.lengths[i]
            if space.cols != eig.multiplicities[i]:
                raise QHypError(f"class {eig.reps[i]} is defective")
            for j in range(space.cols):
                cols.append(space[:, j : j + 1].scale(1.0 / math.sqrt(lens[j])))
                diag.append(Quaternion.from_complex(eig.reps[i]))
    else:
        raise ClassificationError(f"only elliptic and loxodromic elements diagonalize, got {C.kind.value}")

    V = QMatrix(np.concatenate([c.array for c in cols], axis=1))
    Jm = J.matrix
    k = Jm @ adjoint_star(V) @ Jm
    D = QMatrix.diag(diag)
    res = (k @ g @ V - D).max_norm()
    if res > 1e-8 * max(1.0, g.max_norm()):
        raise QHypError(f"diagonalization residual {res:.3e} too large")
    return D, k
