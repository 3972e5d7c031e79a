import cmath
import math

import numpy as np
import pytest

from qhyp.errors import ClassificationError, NotSymplecticError
from qhyp.experiments import (
    random_heisenberg,
    random_loxodromic,
    random_regular_elliptic,
    random_symplectic,
)
from qhyp.hypmodel import infinity_point, same_point, zero_point
from qhyp.isometry import (
    Kind,
    classify,
    delta_ct,
    delta_elliptic,
    heisenberg_params,
    heisenberg_translation,
    invariants,
    loxodromic_invariants,
)
from qhyp.quatcore import HermitianForm, QMatrix, Quaternion, symplectic_inverse


def e(t):
    return cmath.exp(1j * t)


def test_identity():
    C = classify(QMatrix.identity(3), HermitianForm.ball(2))
    assert C.kind is Kind.IDENTITY
    assert classify(QMatrix.identity(3).scale(-1), HermitianForm.siegel(2)).kind is Kind.IDENTITY


def test_loxodromic_normal_form():
    J = HermitianForm.siegel(2)
    C = classify(QMatrix.diag([2, 0.5, 1]), J)
    assert C.kind is Kind.LOXODROMIC
    assert abs(C.lambda1 - 2) < 1e-12
    u, v = C.fixed_points
    assert same_point(u.vector, infinity_point(J).vector)
    assert same_point(v.vector, zero_point(J).vector)


def test_heisenberg_normal_form():
    T = heisenberg_translation(Quaternion(1 / 32, 1), [Quaternion(0.25)])
    C = classify(T, HermitianForm.siegel(2))
    assert C.kind is Kind.HEISENBERG_TRANSLATION
    assert same_point(C.fixed_points[0].vector, zero_point(HermitianForm.siegel(2)).vector, 1e-6)


def test_regular_elliptic_normal_form():
    g = QMatrix.diag([e(math.pi / 3), e(math.pi / 4), e(math.pi / 5)])
    C = classify(g, HermitianForm.ball(2))
    assert C.kind is Kind.REGULAR_ELLIPTIC
    assert abs(C.lambda1 - e(math.pi / 3)) < 1e-12


def test_nonregular_elliptic():
    g = QMatrix.diag([e(0.4), e(0.4), e(1.0)])
    C = classify(g, HermitianForm.ball(2))
    assert C.kind is Kind.ELLIPTIC
    assert C.warnings  # multiplicity at lambda_1


def test_non_symplectic_rejected():
    with pytest.raises(NotSymplecticError):
        classify(QMatrix.diag([2, 2, 1]), HermitianForm.siegel(2))


def test_loxodromic_ambiguity_band_raises():
    r = 1 + 5e-6
    with pytest.raises(ClassificationError) as exc:
        classify(QMatrix.diag([r, 1 / r, 1]), HermitianForm.siegel(2))
    assert exc.value.margin is not None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_kinds_and_inverse(n):
    Jb, Js = HermitianForm.ball(n), HermitianForm.siegel(n)
    for seed in range(15):
        g = random_regular_elliptic(n, seed)
        assert classify(g, Jb).kind is Kind.REGULAR_ELLIPTIC, f"seed {seed}"
        assert classify(symplectic_inverse(g, Jb, 1e-8), Jb).kind is Kind.REGULAR_ELLIPTIC
        L = random_loxodromic(n, seed)
        C = classify(L, Js)
        assert C.kind is Kind.LOXODROMIC, f"seed {seed}"
        Ci = classify(symplectic_inverse(L, Js, 1e-8), Js)
        assert Ci.kind is Kind.LOXODROMIC
        assert abs(abs(Ci.lambda1) - abs(C.lambda1)) < 1e-7
        mods = sorted(abs(r) for r in C.eigen.reps)
        assert abs(mods[0] * mods[-1] - 1) < 1e-8
        H = random_heisenberg(n, seed, zeta_norm=0.0 if n == 1 else 0.4)
        assert classify(H, Js).kind is Kind.HEISENBERG_TRANSLATION, f"seed {seed}"


def test_delta_examples():
    C = classify(QMatrix.diag([e(math.pi / 12), e(math.pi / 10)]), HermitianForm.ball(1))
    assert abs(delta_elliptic(C) - (2 * math.sin(math.pi / 24) + 2 * math.sin(math.pi / 20))) < 1e-14
    assert abs(delta_elliptic(C) - 0.5739213145205648) < 1e-14
    for th in (0.1, 1.0, 2.0, 3.0):
        # the image of diag(e^{i th}, e^{-i th}): both entries lie in one class
        C = classify(QMatrix.diag([e(th), e(-th)]), HermitianForm.ball(1))
        assert abs(delta_elliptic(C) - 4 * math.sin(th / 2)) < 1e-12
        assert abs(delta_ct(C) - 4 * math.sin(th) ** 2) < 1e-12


def test_delta_closed_form():
    gen = np.random.default_rng(0)
    for _ in range(50):
        th = gen.uniform(0, math.pi, 3)
        C = classify(QMatrix.diag([e(t) for t in th]), HermitianForm.ball(2))
        want = max(4 * math.sin((th[0] + t) / 4) * math.cos((th[0] - t) / 4) for t in th[1:])
        assert abs(delta_elliptic(C) - want) <= 1e-12
        want_ct = max(4 * math.sin((th[0] + s * t) / 2) ** 2 for t in th[1:] for s in (1, -1))
        assert abs(delta_ct(C) - want_ct) <= 1e-12


def test_loxodromic_invariant_examples():
    inv = loxodromic_invariants(classify(QMatrix.diag([2, 0.5, 1]), HermitianForm.siegel(2)))
    assert inv.delta_cp < 1e-12 and abs(inv.m_g - 1.5) < 1e-12
    inv = loxodromic_invariants(classify(QMatrix.diag([2, 0.5, e(math.pi / 6)]), HermitianForm.siegel(2)))
    assert abs(inv.delta_cp - 2 * math.sin(math.pi / 12)) < 1e-12
    assert abs(inv.m_g - (4 * math.sin(math.pi / 12) + 1.5)) < 1e-12
    inv = loxodromic_invariants(classify(QMatrix.diag([1.1, 1 / 1.1, 1, 1]), HermitianForm.siegel(3)))
    assert inv.delta_cp < 1e-12 and abs(inv.m_g - 0.19090909090909) < 1e-12


def test_invariants_none_for_other_kinds():
    inv = invariants(classify(QMatrix.identity(3), HermitianForm.ball(2)))
    assert inv.delta is None and inv.m_g is None
    with pytest.raises(ClassificationError):
        delta_elliptic(classify(QMatrix.diag([2, 0.5, 1]), HermitianForm.siegel(2)))


def test_random_loxodromic_m_g_matches_hand_formula():
    angles = [math.pi / 5]
    g = random_loxodromic(2, 7, lam1=1.1, angles=angles)
    inv = loxodromic_invariants(classify(g, HermitianForm.siegel(2)))
    want = 2 * abs(e(angles[0]) - 1) + 0.1 + (1 - 1 / 1.1)
    assert abs(inv.m_g - want) < 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_conjugacy_invariance(n):
    Jb, Js = HermitianForm.ball(n), HermitianForm.siegel(n)
    g = random_regular_elliptic(n, 3)
    L = random_loxodromic(n, 3)
    f0 = invariants(classify(g, Jb))
    l0 = invariants(classify(L, Js))
    for seed in range(30):
        k = random_symplectic(n, Jb, 1000 + seed, 0.8)
        f = invariants(classify(k @ g @ symplectic_inverse(k, Jb), Jb))
        assert abs(f.delta - f0.delta) <= 1e-8 * (1 + f0.delta), f"seed {seed}"
        assert abs(f.delta_ct - f0.delta_ct) <= 1e-8 * (1 + f0.delta_ct)
        k = random_symplectic(n, Js, 2000 + seed, 0.8)
        f = invariants(classify(k @ L @ symplectic_inverse(k, Js), Js))
        assert abs(f.m_g - l0.m_g) <= 1e-8 * (1 + l0.m_g), f"seed {seed}"
        assert abs(f.delta_cp - l0.delta_cp) <= 1e-8 * (1 + l0.delta_cp)


def test_heisenberg_params_examples():
    T = heisenberg_translation(Quaternion(0.5), [Quaternion(1)])
    p = heisenberg_params(T)
    assert abs(p.s.w - 0.5) < 1e-15 and abs(p.zeta_norm - 1) < 1e-15
    with pytest.raises(ClassificationError):
        heisenberg_params(QMatrix.identity(3))
    p = heisenberg_params(heisenberg_translation(Quaternion(0, 1), [0]))
    assert p.s.w == 0 and p.zeta_norm == 0
    p = heisenberg_params(random_heisenberg(2, 5, zeta_norm=0.4, im_s=1.0, normal_form=True))
    assert abs(p.s.w - 0.08) < 1e-12 and abs(p.s.imag_norm() - 1) < 1e-12


def test_heisenberg_params_rejects_bad_real_part():
    with pytest.raises(ClassificationError):
        heisenberg_params(heisenberg_translation(Quaternion(0.3, 1), [Quaternion(0.25)]))


def test_classification_json_has_kind():
    C = classify(QMatrix.diag([2, 0.5, 1]), HermitianForm.siegel(2))
    out = C.to_json()
    assert out["kind"] == "Loxodromic" and len(out["fixedPoints"]) == 2
