"""Quaternion arithmetic, quaternionic matrices and the Sp(n,1) Hermitian forms.

A quaternion ``w + x i + y j + z k`` is stored as the length-4 array
``[w, x, y, z]``.  Quaternionic matrices are ``(rows, cols, 4)`` float arrays.
Column vectors form a *right* module: matrices act on the left, scalars
multiply on the right.

Right eigenvalues are computed through the complex adjoint.  Writing
``A = X + Y j`` with complex ``X, Y`` (so ``q = (w + x i) + (y + z i) j``),

    chi(A) = [[X, Y], [-conj(Y), conj(X)]]

is a multiplicative embedding into ``2(n+1)`` square complex matrices whose
spectrum is the union of the eigenvalue classes and their conjugates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotSymplecticError

__all__ = [
    "Quaternion",
    "QMatrix",
    "Presentation",
    "HermitianForm",
    "BlockDecomposition",
    "LengthSign",
    "EigenData",
    "qmul",
    "class_rep",
    "adjoint_star",
    "is_symplectic",
    "symplectic_residual",
    "symplectic_inverse",
    "block_decompose",
    "right_eigen",
    "complex_adjoint",
]

SYMPLECTIC_TOL = 1e-9
MERGE_TOL = 1e-7


def _hamilton(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def _conj(a: np.ndarray) -> np.ndarray:
    return a * np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    """A Hamilton quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        w, x, y, z = (float(v) for v in a)
        return cls(w, x, y, z)

    @classmethod
    def from_complex(cls, c: complex) -> "Quaternion":
        return cls(float(c.real), float(c.imag), 0.0, 0.0)

    @classmethod
    def coerce(cls, q) -> "Quaternion":
        if isinstance(q, Quaternion):
            return q
        if isinstance(q, (int, float, np.floating, np.integer)):
            return cls(float(q))
        if isinstance(q, (complex, np.complexfloating)):
            return cls.from_complex(complex(q))
        return cls.from_array(q)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_json(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @property
    def real(self) -> float:
        return self.w

    def imag_norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    def norm2(self) -> float:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("quaternion 0 has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def is_complex(self, tol: float = 0.0) -> bool:
        return abs(self.y) <= tol and abs(self.z) <= tol

    def to_complex(self) -> complex:
        return complex(self.w, self.x)

    def __add__(self, other) -> "Quaternion":
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other) -> "Quaternion":
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other) -> "Quaternion":
        return Quaternion.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, QMatrix):
            return NotImplemented
        return qmul(self, Quaternion.coerce(other))

    def __rmul__(self, other) -> "Quaternion":
        return qmul(Quaternion.coerce(other), self)

    def __truediv__(self, other) -> "Quaternion":
        # right division: self * other^{-1}
        return self * Quaternion.coerce(other).inverse()

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


ONE = Quaternion(1.0)
I_UNIT = Quaternion(0.0, 1.0)
J_UNIT = Quaternion(0.0, 0.0, 1.0)
K_UNIT = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    return Quaternion.from_array(_hamilton(p.as_array(), q.as_array()))


def class_rep(q) -> Quaternion:
    """Canonical complex representative ``Re(q) + |Im(q)| i`` of the similarity class of ``q``."""
    q = Quaternion.coerce(q)
    return Quaternion(q.w, q.imag_norm(), 0.0, 0.0)


def _class_rep_complex(c: complex) -> complex:
    return complex(c.real, abs(c.imag))


class QMatrix:
    """Dense quaternionic matrix backed by a ``(rows, cols, 4)`` float array.

    ``A @ B`` is the matrix product, ``A * q`` scales on the right by a
    quaternion and ``q * A`` on the left.
    """

    __slots__ = ("_a",)
    __array_priority__ = 100

    def __init__(self, data):
        a = np.array(data, dtype=float)
        if a.ndim != 3 or a.shape[2] != 4 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError(f"expected a (rows, cols, 4) array, got shape {a.shape}")
        a.setflags(write=False)
        self._a = a

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        a = np.zeros((n, n, 4))
        a[np.arange(n), np.arange(n), 0] = 1.0
        return cls(a)

    @classmethod
    def from_real(cls, m) -> "QMatrix":
        m = np.atleast_2d(np.asarray(m, dtype=float))
        a = np.zeros(m.shape + (4,))
        a[..., 0] = m
        return cls(a)

    @classmethod
    def from_complex(cls, m) -> "QMatrix":
        m = np.atleast_2d(np.asarray(m, dtype=complex))
        a = np.zeros(m.shape + (4,))
        a[..., 0] = m.real
        a[..., 1] = m.imag
        return cls(a)

    @classmethod
    def from_complex_pair(cls, x, y) -> "QMatrix":
        """Matrix ``X + Y j`` for complex ``X, Y`` of equal shape."""
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        y = np.atleast_2d(np.asarray(y, dtype=complex))
        return cls(np.stack([x.real, x.imag, y.real, y.imag], axis=-1))

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "QMatrix":
        return cls([[Quaternion.coerce(q).as_array() for q in row] for row in rows])

    @classmethod
    def diag(cls, entries: Iterable) -> "QMatrix":
        entries = [Quaternion.coerce(q).as_array() for q in entries]
        n = len(entries)
        a = np.zeros((n, n, 4))
        for i, q in enumerate(entries):
            a[i, i] = q
        return cls(a)

    @classmethod
    def column(cls, entries: Iterable) -> "QMatrix":
        return cls([[Quaternion.coerce(q).as_array()] for q in entries])

    @classmethod
    def basis_vector(cls, size: int, index: int) -> "QMatrix":
        a = np.zeros((size, 1, 4))
        a[index, 0, 0] = 1.0
        return cls(a)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["QMatrix"]]) -> "QMatrix":
        rows = [np.concatenate([b.array for b in row], axis=1) for row in blocks]
        return cls(np.concatenate(rows, axis=0))

    # -- access -------------------------------------------------------
    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape[:2]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and len(idx) == 2 and all(
            isinstance(i, (int, np.integer)) for i in idx
        ):
            return Quaternion.from_array(self._a[idx])
        sub = self._a[idx]
        if sub.ndim != 3:
            raise IndexError("use integer pairs for entries or slice pairs for submatrices")
        return QMatrix(sub)

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self._a[i, j])

    def complex_pair(self) -> tuple[np.ndarray, np.ndarray]:
        a = self._a
        return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]

    def to_complex(self) -> np.ndarray:
        """Complex part of each entry; exact only for complex matrices."""
        return self._a[..., 0] + 1j * self._a[..., 1]

    # -- algebra ------------------------------------------------------
    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        x1, y1 = self.complex_pair()
        x2, y2 = other.complex_pair()
        return QMatrix.from_complex_pair(
            x1 @ x2 - y1 @ np.conj(y2), x1 @ y2 + y1 @ np.conj(x2)
        )

    def __mul__(self, q) -> "QMatrix":
        q = Quaternion.coerce(q)
        return QMatrix(_hamilton(self._a, q.as_array()))

    def __rmul__(self, q) -> "QMatrix":
        q = Quaternion.coerce(q)
        return QMatrix(_hamilton(np.broadcast_to(q.as_array(), self._a.shape), self._a))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return QMatrix(self._a + other._a)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot subtract {other.shape} from {self.shape}")
        return QMatrix(self._a - other._a)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self._a)

    def scale(self, r: float) -> "QMatrix":
        return QMatrix(self._a * float(r))

    def conj(self) -> "QMatrix":
        return QMatrix(_conj(self._a))

    def transpose(self) -> "QMatrix":
        return QMatrix(np.swapaxes(self._a, 0, 1))

    @property
    def H(self) -> "QMatrix":
        return adjoint_star(self)

    def abs_entries(self) -> np.ndarray:
        return np.sqrt(np.sum(self._a**2, axis=-1))

    def max_norm(self) -> float:
        return float(np.max(self.abs_entries()))

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self._a**2)))

    def power(self, k: int) -> "QMatrix":
        if not self.is_square():
            raise DimensionError("power of a non-square matrix")
        out = QMatrix.identity(self.rows)
        base = self
        while k > 0:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def complex_adjoint(self) -> np.ndarray:
        return complex_adjoint(self)

    def allclose(self, other: "QMatrix", atol: float = 1e-12) -> bool:
        return self.shape == other.shape and float(np.max(np.abs(self._a - other._a))) <= atol

    # -- io -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[float(v) for v in q] for q in self._a.reshape(-1, 4)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QMatrix":
        try:
            rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except (KeyError, TypeError) as exc:
            raise DimensionError(f"malformed matrix JSON: {exc}") from exc
        a = np.asarray(entries, dtype=float)
        if a.shape != (rows * cols, 4):
            raise DimensionError(
                f"entries shape {a.shape} does not match rows*cols={rows * cols} quaternions"
            )
        return cls(a.reshape(rows, cols, 4))

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"QMatrix(rows={self.rows}, cols={self.cols})"


def complex_adjoint(A: QMatrix) -> np.ndarray:
    """The ``2m x 2m`` complex matrix chi(A) with chi(AB) = chi(A) chi(B)."""
    x, y = A.complex_pair()
    return np.block([[x, y], [-np.conj(y), np.conj(x)]])


def _vector_from_adjoint(u: np.ndarray) -> np.ndarray:
    # u = [v1; -conj(v2)] is a chi-eigenvector for the quaternionic column v1 + v2 j
    m = u.shape[0] // 2
    v1, v2 = u[:m], -np.conj(u[m:])
    return np.stack([v1.real, v1.imag, v2.real, v2.imag], axis=-1)


def adjoint_star(A: QMatrix) -> QMatrix:
    """Conjugate transpose ``A*``."""
    return QMatrix(np.swapaxes(_conj(A.array), 0, 1))


class Presentation(enum.Enum):
    BALL = "ball"
    SIEGEL = "siegel"


@dataclass(frozen=True)
class HermitianForm:
    """Signature (n,1) form on H^{n+1}: J1 = diag(-1, I_n) or the Siegel J2."""

    presentation: Presentation
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"hyperbolic dimension must be >= 1, got {self.n}")

    @classmethod
    def ball(cls, n: int) -> "HermitianForm":
        return cls(Presentation.BALL, n)

    @classmethod
    def siegel(cls, n: int) -> "HermitianForm":
        return cls(Presentation.SIEGEL, n)

    @classmethod
    def parse(cls, name: str, n: int) -> "HermitianForm":
        return cls(Presentation(name.lower()), n)

    @property
    def size(self) -> int:
        return self.n + 1

    def real_matrix(self) -> np.ndarray:
        m = np.eye(self.size)
        if self.presentation is Presentation.BALL:
            m[0, 0] = -1.0
        else:
            m[:2, :2] = [[0.0, -1.0], [-1.0, 0.0]]
        return m

    @property
    def matrix(self) -> QMatrix:
        return QMatrix.from_real(self.real_matrix())

    def check_size(self, A: QMatrix) -> None:
        if A.rows != self.size:
            raise DimensionError(
                f"{self.presentation.value} form of dimension n={self.n} needs "
                f"{self.size} rows, got {A.rows}"
            )

    def pair(self, z: QMatrix, w: QMatrix) -> Quaternion:
        """``<z, w> = z* J w`` for column vectors."""
        self.check_size(z)
        self.check_size(w)
        return (adjoint_star(z) @ self.matrix @ w).entry(0, 0)

    def other(self) -> "HermitianForm":
        p = Presentation.SIEGEL if self.presentation is Presentation.BALL else Presentation.BALL
        return HermitianForm(p, self.n)


def cayley_matrix(n: int) -> QMatrix:
    """Real orthogonal involution C with C* J2 C = J1, so A -> C A C swaps the models."""
    c = np.eye(n + 1)
    s = 1.0 / math.sqrt(2.0)
    c[:2, :2] = [[s, s], [s, -s]]
    return QMatrix.from_real(c)


def change_model(A: QMatrix, source: HermitianForm, target: HermitianForm) -> QMatrix:
    """Conjugate ``A`` from the ``source`` presentation into ``target``."""
    if source.n != target.n:
        raise DimensionError("forms of different dimension")
    if source.presentation is target.presentation:
        return A
    c = cayley_matrix(source.n)
    return c @ A @ c


def symplectic_residual(A: QMatrix, J: HermitianForm) -> float:
    """``max|A* J A - J| / max(1, max|A|^2)``."""
    if not A.is_square():
        raise DimensionError(f"symplectic test needs a square matrix, got {A.shape}")
    J.check_size(A)
    Jm = J.matrix
    r = (adjoint_star(A) @ Jm @ A - Jm).max_norm()
    return r / max(1.0, A.max_norm() ** 2)


def is_symplectic(A: QMatrix, J: HermitianForm, tol: float = SYMPLECTIC_TOL) -> bool:
    return symplectic_residual(A, J) <= tol


def _require_symplectic(A: QMatrix, J: HermitianForm, tol: float) -> None:
    res = symplectic_residual(A, J)
    if res > tol:
        raise NotSymplecticError(f"matrix is not in Sp({J.n},1): residual {res:.3e} > {tol:.1e}")


def symplectic_inverse(A: QMatrix, J: HermitianForm, tol: float = SYMPLECTIC_TOL) -> QMatrix:
    """Inverse of an Sp(n,1) element without solving a linear system.

    In the Siegel presentation with ``n >= 2`` this is the block formula

        [[a, b, g*], [c, d, d*], [al, be, U]]^{-1}
            = [[conj d, conj b, -be*], [conj c, conj a, -al*], [-d, -g, U*]]

    In general it is ``J A* J`` (J is an involution), which agrees with the
    block formula entry for entry.
    """
    _require_symplectic(A, J, tol)
    if J.presentation is Presentation.SIEGEL and J.n >= 2:
        return block_decompose(A).inverse_blocks().reassemble()
    Jm = J.matrix
    return Jm @ adjoint_star(A) @ Jm


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks of an (n+1)x(n+1) matrix laid out as [[a, b, g*], [c, d, d*], [al, be, U]]."""

    a: Quaternion
    b: Quaternion
    c: Quaternion
    d: Quaternion
    gamma: QMatrix
    delta: QMatrix
    alpha: QMatrix
    beta: QMatrix
    U: QMatrix

    def reassemble(self) -> QMatrix:
        top = QMatrix.block(
            [
                [QMatrix([[self.a.as_array()]]), QMatrix([[self.b.as_array()]]), adjoint_star(self.gamma)],
                [QMatrix([[self.c.as_array()]]), QMatrix([[self.d.as_array()]]), adjoint_star(self.delta)],
                [self.alpha, self.beta, self.U],
            ]
        )
        return top

    def inverse_blocks(self) -> "BlockDecomposition":
        # entries of the inverse in the same layout: gamma' = -beta, delta' = -alpha
        return BlockDecomposition(
            a=self.d.conj(),
            b=self.b.conj(),
            c=self.c.conj(),
            d=self.a.conj(),
            gamma=-self.beta,
            delta=-self.alpha,
            alpha=-self.delta,
            beta=-self.gamma,
            U=adjoint_star(self.U),
        )


def block_decompose(A: QMatrix) -> BlockDecomposition:
    if not A.is_square():
        raise DimensionError(f"block decomposition needs a square matrix, got {A.shape}")
    if A.rows < 3:
        raise DimensionError("block decomposition needs n >= 2 (matrix size >= 3); no U block")
    return BlockDecomposition(
        a=A.entry(0, 0),
        b=A.entry(0, 1),
        c=A.entry(1, 0),
        d=A.entry(1, 1),
        gamma=adjoint_star(A[0:1, 2:]),
        delta=adjoint_star(A[1:2, 2:]),
        alpha=A[2:, 0:1],
        beta=A[2:, 1:2],
        U=A[2:, 2:],
    )


# ---------------------------------------------------------------------------
# right eigenvalues


class LengthSign(enum.Enum):
    NEGATIVE = "negative"
    ZERO = "zero"
    POSITIVE = "positive"


@dataclass(frozen=True)
class EigenData:
    """Right-eigenvalue classes of a square quaternionic matrix.

    ``reps[c]`` is the complex class representative (imaginary part >= 0).
    ``spaces[c]`` holds a basis of the eigenvectors ``v`` with ``A v = v reps[c]``
    (unit Euclidean norm, J-orthogonal and sorted by Hermitian length when a
    form was supplied); ``lengths[c]`` are the matching values of ``<v, v>``.
    """

    reps: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    spaces: tuple[QMatrix, ...]
    lengths: tuple[tuple[float, ...], ...] = ()
    length_signs: tuple[LengthSign, ...] = ()
    residual: float = 0.0

    @property
    def classes(self) -> list[tuple[Quaternion, int]]:
        return [(Quaternion.from_complex(r), m) for r, m in zip(self.reps, self.multiplicities)]

    @property
    def vectors(self) -> list[QMatrix]:
        """One eigenvector per class; the most negative one when a form was given."""
        return [s[:, 0:1] for s in self.spaces]

    def eigenvalue_list(self) -> list[complex]:
        out: list[complex] = []
        for r, m in zip(self.reps, self.multiplicities):
            out.extend([r] * m)
        return out

    @property
    def size(self) -> int:
        return sum(self.multiplicities)

    def to_json(self) -> dict:
        return {
            "classes": [
                {"rep": Quaternion.from_complex(r).to_json(), "multiplicity": m}
                for r, m in zip(self.reps, self.multiplicities)
            ],
            "lengthSigns": [s.value for s in self.length_signs],
        }


def _cluster(values: Sequence[complex], tol: float) -> list[list[int]]:
    """Single-linkage clusters of complex numbers at distance <= tol."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _qgram_schmidt(vectors: list[np.ndarray], tol: float) -> list[np.ndarray]:
    """Euclidean quaternionic Gram-Schmidt, dropping dependent columns."""
    basis: list[np.ndarray] = []
    for v in vectors:
        w = v.copy()
        for _ in range(2):
            for e in basis:
                # coefficient e* w (a quaternion), subtract e * coeff
                coeff = np.sum(_hamilton(_conj(e), w), axis=0)
                w = w - _hamilton(e, np.broadcast_to(coeff, e.shape))
        nrm = math.sqrt(float(np.sum(w**2)))
        if nrm > tol * max(1.0, math.sqrt(float(np.sum(v**2)))):
            basis.append(w / nrm)
    return basis


def _qcols(vectors: list[np.ndarray]) -> QMatrix:
    return QMatrix(np.stack(vectors, axis=1))


def _eigenspace(chiA: np.ndarray, r: complex, expected: int, null_tol: float) -> list[np.ndarray]:
    """Quaternionic vectors v with A v = v r spanning the numerical eigenspace."""
    m = chiA.shape[0]
    _, s, vh = np.linalg.svd(chiA - r * np.eye(m))
    scale = max(1.0, float(s[0]))
    count = int(np.sum(s <= null_tol * scale))
    count = max(1, min(count, expected))
    null = np.conj(vh[-count:]).T  # columns
    return [_vector_from_adjoint(null[:, k]) for k in range(count)]


def right_eigen(
    A: QMatrix,
    tol: float = MERGE_TOL,
    form: HermitianForm | None = None,
    sign_tol: float = 1e-9,
) -> EigenData:
    """Right-eigenvalue similarity classes of ``A`` via the complex adjoint.

    Eigenvalues of chi(A) are mapped to class representatives and merged when
    they lie within ``tol``; each class of multiplicity m accounts for 2m
    eigenvalues of chi(A).  With a ``form`` the eigenspace basis is
    J-diagonalized and each class gets the sign of its most negative
    normalized Hermitian length (``sign_tol`` relative to ``|v|^2``).
    """
    if not A.is_square():
        raise DimensionError(f"eigenvalues need a square matrix, got {A.shape}")
    if form is not None:
        form.check_size(A)
    chiA = complex_adjoint(A)
    try:
        evals = np.linalg.eigvals(chiA)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError(f"eigen-solver failed on the complex adjoint: {exc}") from exc
    reps_all = [_class_rep_complex(complex(e)) for e in evals]
    groups = _cluster(reps_all, tol)

    raw = []
    for g in groups:
        centre = complex(np.mean([reps_all[i] for i in g]))
        if centre.imag <= tol:
            centre = complex(centre.real, 0.0)
        mult = max(1, int(round(len(g) / 2)))
        raw.append((centre, mult))
    # leftover rounding (odd cluster sizes) must not change the total
    total = sum(m for _, m in raw)
    if total != A.rows:
        raw.sort(key=lambda cm: -cm[1])
        diff = A.rows - total
        c0, m0 = raw[0]
        raw[0] = (c0, max(1, m0 + diff))
    raw.sort(key=lambda cm: (round(cm[0].real, 12), round(cm[0].imag, 12)))

    Jm = form.matrix if form is not None else None
    reps, mults, spaces, lengths, signs = [], [], [], [], []
    null_tol = max(10.0 * tol, 1e-9)
    worst = 0.0
    for r, mult in raw:
        expected = 2 * mult if r.imag == 0.0 else mult
        cand = _eigenspace(chiA, r, expected, null_tol)
        if r.imag == 0.0:
            basis = _qgram_schmidt(cand, 1e-6)
        else:
            basis = [v / math.sqrt(float(np.sum(v**2))) for v in cand]
        vecs = basis
        lens: list[float] = []
        if Jm is not None:
            vecs, lens = _diagonalize_form_on_space(basis, Jm, complex_coeffs=r.imag != 0.0)
        B = _qcols(vecs)
        worst = max(worst, (A @ B - B * Quaternion.from_complex(r)).max_norm())
        reps.append(r)
        mults.append(mult)
        spaces.append(B)
        lengths.append(tuple(lens))
        if lens:
            lo, hi = min(lens), max(lens)
            if lo < -sign_tol:
                signs.append(LengthSign.NEGATIVE)
            elif lo > sign_tol:
                signs.append(LengthSign.POSITIVE)
            else:
                signs.append(LengthSign.ZERO)
    return EigenData(
        reps=tuple(reps),
        multiplicities=tuple(mults),
        spaces=tuple(spaces),
        lengths=tuple(lengths),
        length_signs=tuple(signs),
        residual=worst,
    )


def _diagonalize_form_on_space(
    basis: list[np.ndarray], Jm: QMatrix, complex_coeffs: bool
) -> tuple[list[np.ndarray], list[float]]:
    """Re-express ``basis`` so the form restricted to its span is diagonal.

    For non-real eigenvalues only complex combinations keep ``A v = v r``
    exact; the restricted form is complex Hermitian there.
    """
    B = _qcols(basis)
    G = adjoint_star(B) @ Jm @ B
    p = len(basis)
    if complex_coeffs:
        Gc = G.to_complex()
        Gc = 0.5 * (Gc + Gc.conj().T)
        _, vecs = np.linalg.eigh(Gc)
        coeffs = [QMatrix.from_complex(vecs[:, k : k + 1]) for k in range(p)]
    else:
        chiG = complex_adjoint(G)
        chiG = 0.5 * (chiG + chiG.conj().T)
        _, vecs = np.linalg.eigh(chiG)
        cand = [_vector_from_adjoint(vecs[:, k]) for k in range(2 * p)]
        coeffs = [QMatrix(c[:, None, :]) for c in _qgram_schmidt(cand, 1e-6)[:p]]
    out, lens = [], []
    for c in coeffs:
        v = (B @ c).array[:, 0, :]
        v = v / math.sqrt(float(np.sum(v**2)))
        col = QMatrix(v[:, None, :])
        out.append(v)
        lens.append((adjoint_star(col) @ Jm @ col).entry(0, 0).w)
    order = np.argsort(lens)
    return [out[k] for k in order], [lens[k] for k in order]
