import math

import numpy as np
import pytest

from qhyp.quatcore import HermitianForm, QMatrix


def quat_as_2x2(q) -> np.ndarray:
    """Independent oracle: q = a + b j with a, b complex acts as [[a, b], [-conj b, conj a]]."""
    w, x, y, z = q
    a, b = complex(w, x), complex(y, z)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def qmat_as_complex(A: QMatrix) -> np.ndarray:
    """Block-embed a quaternionic matrix entry by entry through ``quat_as_2x2``."""
    r, c = A.shape
    out = np.zeros((2 * r, 2 * c), dtype=complex)
    for i in range(r):
        for j in range(c):
            out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = quat_as_2x2(A.array[i, j])
    return out


def complex_as_qmat(M: np.ndarray) -> QMatrix:
    r, c = M.shape[0] // 2, M.shape[1] // 2
    a = np.zeros((r, c, 4))
    for i in range(r):
        for j in range(c):
            blk = M[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            a[i, j] = [blk[0, 0].real, blk[0, 0].imag, blk[0, 1].real, blk[0, 1].imag]
    return QMatrix(a)


def ball_boost(n: int, t: float, phase=(1.0, 0.0, 0.0, 0.0)) -> QMatrix:
    """Ball-model element with |a11| = cosh t: a hyperbolic boost in the (e1, e2) plane,
    followed by a right unit-quaternion phase on the first coordinate."""
    a = np.zeros((n + 1, n + 1, 4))
    a[np.arange(n + 1), np.arange(n + 1), 0] = 1.0
    a[0, 0, 0] = a[1, 1, 0] = math.cosh(t)
    a[0, 1, 0] = a[1, 0, 0] = math.sinh(t)
    p = np.asarray(phase, dtype=float)
    p = p / np.linalg.norm(p)
    d = np.zeros((n + 1, n + 1, 4))
    d[np.arange(n + 1), np.arange(n + 1), 0] = 1.0
    d[0, 0] = p
    return QMatrix(a) @ QMatrix(d)


@pytest.fixture
def ball1():
    return HermitianForm.ball(1)


@pytest.fixture
def ball2():
    return HermitianForm.ball(2)


@pytest.fixture
def siegel2():
    return HermitianForm.siegel(2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(RESULTS, key=lambda s: (int(s.rstrip("abc")), s)):
        ok, text = RESULTS[label]
        terminalreporter.write_line(f"criterion {label:<3} {'PASS' if ok else 'FAIL'}  {text}")
