"""Random Sp(n,1) sampling, the SL(2,C) -> Sp(1,1) embedding and the sine sweep."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .certify import Certificate, elliptic_certificate
from .errors import QHypError
from .hypmodel import origin
from .isometry import heisenberg_translation
from .quatcore import (
    SYMPLECTIC_TOL,
    HermitianForm,
    Presentation,
    QMatrix,
    Quaternion,
    adjoint_star,
    symplectic_inverse,
)


def rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) determined by ``seed`` alone."""
    return np.random.Generator(np.random.Philox(int(seed)))


# ---------------------------------------------------------------------------
# matrix exponential

_EXP_DEGREE = 12
_EXP_THETA = 0.25


def expm(X: QMatrix) -> QMatrix:
    """exp(X) by scaling and squaring a degree-12 Taylor polynomial.

    Works on the quaternionic matrix directly; X is scaled by 2^-s so that
    max|X| / 2^s <= 0.25 before the series is evaluated.
    """
    if not X.is_square():
        raise QHypError(f"exponential of a non-square matrix {X.shape}")
    norm = X.max_norm() * X.rows
    s = 0 if norm <= _EXP_THETA else int(math.ceil(math.log2(norm / _EXP_THETA)))
    Xs = X.scale(2.0**-s)
    ident = QMatrix.identity(X.rows)
    # Horner: I + X(I + X/2 (I + X/3 (...)))
    out = ident
    for k in range(_EXP_DEGREE, 0, -1):
        out = ident + (Xs @ out).scale(1.0 / k)
    for _ in range(s):
        out = out @ out
    return out


# ---------------------------------------------------------------------------
# random elements


def _random_quaternions(gen: np.random.Generator, shape) -> np.ndarray:
    return gen.standard_normal(tuple(shape) + (4,))


def random_lie_algebra(n: int, J: HermitianForm, gen: np.random.Generator, scale: float) -> QMatrix:
    """Random X with X* J + J X = 0 and max|X| = scale (0 gives the zero matrix)."""
    size = n + 1
    a = _random_quaternions(gen, (size, size))
    S = QMatrix(a)
    S = S - adjoint_star(S)  # skew-Hermitian
    X = J.matrix @ S
    m = X.max_norm()
    if scale == 0.0 or m == 0.0:
        return QMatrix.zeros(size, size)
    return X.scale(scale / m)


def random_symplectic(n: int, J: HermitianForm, seed: int, scale: float = 1.0) -> QMatrix:
    """exp(X) for a seeded random X in sp(n,1) with max|X| = scale."""
    if n < 1:
        raise QHypError("n must be >= 1")
    if scale < 0:
        raise QHypError("scale must be >= 0")
    return expm(random_lie_algebra(n, J, rng(seed), scale))


def _conjugate(D: QMatrix, J: HermitianForm, seed: int, scale: float) -> QMatrix:
    k = random_symplectic(J.n, J, seed, scale)
    return k @ D @ symplectic_inverse(k, J, tol=1e-6)


def _unit_complex(theta: float) -> complex:
    return cmath.exp(1j * theta)


def regular_elliptic_normal_form(angles: Sequence[float]) -> QMatrix:
    """diag(e^{i theta_1}, ..., e^{i theta_{n+1}}) in the ball model; lambda_1 first."""
    return QMatrix.diag([_unit_complex(t) for t in angles])


def random_regular_elliptic(
    n: int, seed: int, angles: Sequence[float] | None = None, scale: float = 1.0
) -> QMatrix:
    """A conjugate (ball model) of the diagonal elliptic with the given angles in [0, pi]."""
    gen = rng(seed)
    if angles is None:
        angles = _distinct_angles(gen, n + 1)
    angles = list(angles)
    if len(angles) != n + 1:
        raise QHypError(f"need {n + 1} angles, got {len(angles)}")
    if any(not 0.0 <= t <= math.pi for t in angles):
        raise QHypError("angles must lie in [0, pi]")
    srt = sorted(angles)
    if any(b - a < 1e-6 for a, b in zip(srt, srt[1:])):
        raise QHypError("regular elliptic angles must be distinct")
    J = HermitianForm.ball(n)
    return _conjugate(regular_elliptic_normal_form(angles), J, seed + 1, scale)


def _distinct_angles(gen: np.random.Generator, count: int, gap: float = 0.05) -> list[float]:
    while True:
        t = gen.uniform(0.0, math.pi, size=count)
        s = np.sort(t)
        if np.all(np.diff(s) > gap):
            return [float(x) for x in t]


def loxodromic_normal_form(lam1, angles: Sequence[float]) -> QMatrix:
    """diag(lambda_1, conj(lambda_1)^{-1}, e^{i theta_3}, ...) in the Siegel model."""
    lam1 = Quaternion.coerce(lam1)
    return QMatrix.diag([lam1, lam1.conj().inverse()] + [_unit_complex(t) for t in angles])


def random_loxodromic(
    n: int, seed: int, lam1=None, angles: Sequence[float] | None = None, scale: float = 1.0
) -> QMatrix:
    """A conjugate (Siegel model) of the diagonal loxodromic normal form."""
    gen = rng(seed)
    if lam1 is None:
        r = gen.uniform(1.2, 3.0)
        lam1 = Quaternion.from_complex(r * _unit_complex(gen.uniform(0.0, math.pi)))
    lam1 = Quaternion.coerce(lam1)
    if abs(lam1) <= 1.0:
        raise QHypError("loxodromic lambda_1 must have modulus > 1")
    if angles is None:
        angles = [float(t) for t in gen.uniform(0.0, math.pi, size=n - 1)]
    if len(angles) != n - 1:
        raise QHypError(f"need {n - 1} angles, got {len(angles)}")
    J = HermitianForm.siegel(n)
    return _conjugate(loxodromic_normal_form(lam1, angles), J, seed + 1, scale)


def random_heisenberg(
    n: int,
    seed: int,
    zeta_norm: float = 0.4,
    im_s: float = 1.0,
    scale: float = 1.0,
    normal_form: bool = False,
) -> QMatrix:
    """Heisenberg translation T_{s,zeta} with Re(s) = |zeta|^2 / 2.

    ``im_s`` is the length of the imaginary part of ``s`` (random direction);
    with ``normal_form`` the matrix is returned unconjugated.
    """
    if zeta_norm < 0:
        raise QHypError("zeta norm must be >= 0")
    if n == 1 and zeta_norm != 0.0:
        raise QHypError("zeta is empty for n = 1")
    gen = rng(seed)
    zeta = _random_quaternions(gen, (n - 1,))
    nz = float(np.linalg.norm(zeta))
    zeta = zeta * (zeta_norm / nz) if nz > 0 else zeta * 0.0
    u = gen.standard_normal(3)
    u = u / np.linalg.norm(u)
    s = Quaternion(0.5 * zeta_norm**2, *(im_s * u))
    if s.norm2() == 0.0:
        raise QHypError("s and zeta both vanish: that is the identity")
    T = heisenberg_translation(s, [Quaternion.from_array(z) for z in zeta])
    if normal_form:
        return T
    return _conjugate(T, HermitianForm.siegel(n), seed + 1, scale)


# ---------------------------------------------------------------------------
# SL(2,C) inside Sp(1,1)

_SQ2 = 1.0 / math.sqrt(2.0)
# P has columns (1, j)/sqrt2 and (1, -j)/sqrt2; P* F P = J1 where F = [[0, j], [-j, 0]]
# is the quaternionic Hermitian form preserved by every complex matrix of determinant 1.
_P = QMatrix(
    np.array(
        [
            [[_SQ2, 0, 0, 0], [_SQ2, 0, 0, 0]],
            [[0, 0, _SQ2, 0], [0, 0, -_SQ2, 0]],
        ]
    )
)
_P_INV = QMatrix(
    np.array(
        [
            [[_SQ2, 0, 0, 0], [0, 0, -_SQ2, 0]],
            [[_SQ2, 0, 0, 0], [0, 0, _SQ2, 0]],
        ]
    )
)


def _check_sl2(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise QHypError(f"expected a 2x2 complex matrix, got shape {h.shape}")
    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    if abs(det - 1.0) > 1e-10:
        raise QHypError(f"determinant must be 1, got {det}")
    return h


def embed_sl2c(h) -> QMatrix:
    """Image of h in SL(2,C) as an element of Sp(1,1) in the ball model.

    The embedding is h -> P^{-1} h P; it is a homomorphism, sends the maximal
    compact SU(2) into the stabilizer of the origin, and satisfies
    cosh^2(rho(0, h(0))/2) = (||h||^2 + 2) / 4.
    """
    return _P_INV @ QMatrix.from_complex(_check_sl2(h)) @ _P


def sl2_norm2(h) -> float:
    h = np.asarray(h, dtype=complex)
    return float(np.sum(np.abs(h) ** 2))


def random_sl2c(seed: int, max_norm: float = 10.0) -> np.ndarray:
    """Random determinant-1 complex matrix with Frobenius norm at most ``max_norm``."""
    gen = rng(seed)
    while True:
        m = gen.standard_normal((2, 2)) + 1j * gen.standard_normal((2, 2))
        det = np.linalg.det(m)
        if abs(det) < 1e-3:
            continue
        m = m / np.sqrt(det)
        if math.sqrt(sl2_norm2(m)) <= max_norm:
            return m


def rotation_sl2c(theta: float) -> np.ndarray:
    return np.diag([cmath.exp(1j * theta), cmath.exp(-1j * theta)])


def embedded_elliptic_certificate(theta: float, h) -> Certificate:
    """Elliptic certificate for the embedded pair (rotation(theta), h) in Sp(1,1).

    The embedded rotation has a single eigenvalue class of multiplicity two,
    so it is elliptic but not regular; the origin is used as its fixed point.
    Its lhs squared equals the lhs of ``sl2c_certificate(theta, h)``.
    """
    J = HermitianForm.ball(1)
    return elliptic_certificate(
        embed_sl2c(rotation_sl2c(theta)),
        embed_sl2c(h),
        J,
        fixed_point=origin(J),
        allow_nonregular=True,
    )


# ---------------------------------------------------------------------------
# sin^2(theta/2) against sin^2(theta)


class Better(enum.Enum):
    NEW = "New"
    CAO_TAN = "CaoTan"
    TIE = "Tie"


@dataclass(frozen=True)
class ComparisonRow:
    theta: float
    sin_half_sq: float
    sin_sq: float
    better: Better


def compare_at(theta: float, tie_tol: float = 1e-12) -> ComparisonRow:
    a = math.sin(theta / 2.0) ** 2
    b = math.sin(theta) ** 2
    if a < b - tie_tol:
        better = Better.NEW
    elif a > b + tie_tol:
        better = Better.CAO_TAN
    else:
        better = Better.TIE
    return ComparisonRow(theta, a, b, better)


def comparison_sweep(theta_min: float, theta_max: float, step: float) -> list[ComparisonRow]:
    """Rows on the grid theta_min + k*step, k = 0, 1, ..., up to theta_max."""
    if step <= 0:
        raise QHypError("step must be positive")
    if not 0.0 <= theta_min < theta_max <= math.pi + 1e-12:
        raise QHypError("need 0 <= theta_min < theta_max <= pi")
    count = int(math.floor((theta_max - theta_min) / step + 1e-9)) + 1
    if count < 1:
        raise QHypError("empty grid")
    return [compare_at(theta_min + k * step) for k in range(count)]


def crossover(rows: Sequence[ComparisonRow]) -> float | None:
    """First theta where the better inequality stops being the new one."""
    for row in rows:
        if row.theta > 0 and row.better is not Better.NEW:
            return row.theta
    return None
