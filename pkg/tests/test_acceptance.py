"""Acceptance suite: one test per criterion (criterion 5 is split in three).

Each test records a PASS/FAIL line; the lines are printed at the end of the
pytest run by ``pytest_terminal_summary`` in conftest.py, and immediately when
pytest runs with ``-s``.
"""

import functools
import math

import numpy as np
import pytest

from qhyp.certify import Verdict, shimizu_certificate, sl2c_certificate
from qhyp.experiments import (
    Better,
    comparison_sweep,
    crossover,
    embed_sl2c,
    embedded_elliptic_certificate,
    expm,
    random_heisenberg,
    random_lie_algebra,
    random_loxodromic,
    random_regular_elliptic,
    random_sl2c,
    random_symplectic,
    regular_elliptic_normal_form,
    rng,
    rotation_sl2c,
    sl2_norm2,
)
from qhyp.hypmodel import cosh_half_distance, cross_ratio, infinity_point, origin, zero_point
from qhyp.isometry import Kind, classify, delta_elliptic, heisenberg_translation, invariants
from qhyp.probe import run_probe
from qhyp.quatcore import (
    HermitianForm,
    QMatrix,
    Quaternion,
    adjoint_star,
    right_eigen,
    symplectic_inverse,
)

RESULTS: dict[str, tuple[bool, str]] = {}


def criterion(label: str, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except Exception as exc:
                RESULTS[label] = (False, f"{title}: {type(exc).__name__}: {str(exc).splitlines()[0]}")
                print(f"\nACCEPTANCE {label} FAIL  {title}")
                raise
            RESULTS[label] = (True, f"{title}{': ' + detail if detail else ''}")
            print(f"\nACCEPTANCE {label} PASS  {title} {detail}")

        return run

    return wrap


# ---------------------------------------------------------------------------


@criterion("1", "cross-ratio moduli equal |bc|, |ad|, |bc|/|ad| (rel 1e-9, 200 h each at n=2,3)")
def test_criterion_1_cross_ratio_identities():
    worst = 0.0
    for n in (2, 3):
        J = HermitianForm.siegel(n)
        inf, zero = infinity_point(J), zero_point(J)
        for seed in range(200):
            h = random_symplectic(n, J, seed, 1.0)
            hi, h0 = h @ inf.vector, h @ zero.vector
            a, b, c, d = (abs(h.entry(i, j)) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
            pairs = [
                (cross_ratio(hi, zero, inf, h0, J).modulus, b * c),
                (cross_ratio(hi, inf, zero, h0, J).modulus, a * d),
                (cross_ratio(inf, zero, hi, h0, J).modulus, b * c / (a * d)),
            ]
            for got, want in pairs:
                rel = abs(got - want) / want
                worst = max(worst, rel)
                assert rel <= 1e-9, f"n={n} seed={seed}: {got} vs {want}"
    return f"worst rel err {worst:.1e}"


@criterion("2", "cosh(rho(0,h0)/2) = |a11(h)| within 1e-10 (200 h, ball model)")
def test_criterion_2_cosh_identity():
    J = HermitianForm.ball(2)
    g = regular_elliptic_normal_form([0.3, 1.1, 2.3])
    assert classify(g, J).kind is Kind.REGULAR_ELLIPTIC
    q = classify(g, J).fixed_points[0]
    worst = 0.0
    for seed in range(200):
        h = random_symplectic(2, J, seed, 1.5)
        c = cosh_half_distance(q, h @ q.vector, J)
        err = abs(c - abs(h.entry(0, 0)))
        worst = max(worst, err)
        assert err <= 1e-10, f"seed={seed}"
    o = origin(J)
    assert abs(cosh_half_distance(o, q, J) - 1.0) < 1e-15
    return f"worst abs err {worst:.1e}"


def _probe_pairs(count=50):
    """Seeded (g, h) with g diagonal regular elliptic, n in {1, 2}, |a11| delta <= 0.9."""
    seed = 0
    while count:
        gen = rng(seed)
        n = 1 + seed % 2
        J = HermitianForm.ball(n)
        g = regular_elliptic_normal_form([float(t) for t in gen.uniform(0.0, 0.6, size=n + 1)])
        seed += 1
        try:
            C = classify(g, J)
        except ValueError:
            continue
        if C.kind is not Kind.REGULAR_ELLIPTIC:
            continue
        d = delta_elliptic(C)
        h = random_symplectic(n, J, 10_000 + seed, float(gen.uniform(0.05, 0.6)))
        a = abs(h.entry(0, 0))
        if a < 1.01 or a * d > 0.9:
            continue
        count -= 1
        yield seed - 1, n, J, g, h


@criterion("3", "probe: monotone |a11|, strict contraction bound to k=50, block-diagonal limit <= 1e-8")
def test_criterion_3_probe_contraction():
    longest = 0
    for seed, n, J, g, h in _probe_pairs(50):
        tr = run_probe(g, h, J, max_steps=200)
        assert tr.bound_checked, f"seed={seed}"
        mods = [s.a11_mod for s in tr.steps]
        for k in range(min(50, len(mods) - 1)):
            if mods[k] > 1 + 1e-12:
                assert mods[k + 1] < mods[k], f"seed={seed} not monotone at k={k}"
            lhs = mods[k + 1] ** 2 - 1
            rhs = (mods[0] ** 2 - 1) * (mods[0] ** 2 * tr.delta**2) ** (k + 1)
            assert lhs < rhs, f"seed={seed} bound fails at k={k}: {lhs} >= {rhs}"
        assert tr.converged, f"seed={seed} did not converge in {len(mods)} steps"
        assert tr.iterates_symplectic, f"seed={seed}"
        last = tr.steps[-1]
        assert max(last.beta_norm, last.alpha_norm, last.off_block_residual) <= 1e-8
        longest = max(longest, len(mods) - 1)
    return f"longest run {longest} steps"


@criterion("4", "delta, delta_cp, M_g, delta_ct invariant under 100 conjugations (rel 1e-8)")
def test_criterion_4_conjugacy_invariance():
    worst = 0.0
    for n in (1, 2):
        Jb, Js = HermitianForm.ball(n), HermitianForm.siegel(n)
        g = random_regular_elliptic(n, 42)
        L = random_loxodromic(n, 42)
        e0, l0 = invariants(classify(g, Jb)), invariants(classify(L, Js))
        for seed in range(100):
            k = random_symplectic(n, Jb, 3000 + seed, 1.0)
            e1 = invariants(classify(k @ g @ symplectic_inverse(k, Jb), Jb))
            k = random_symplectic(n, Js, 4000 + seed, 1.0)
            l1 = invariants(classify(k @ L @ symplectic_inverse(k, Js), Js))
            for name, a, b in (
                ("delta", e0.delta, e1.delta),
                ("delta_ct", e0.delta_ct, e1.delta_ct),
                ("delta_cp", l0.delta_cp, l1.delta_cp),
                ("M_g", l0.m_g, l1.m_g),
            ):
                rel = abs(a - b) / max(abs(a), 1e-300) if a else abs(b)
                worst = max(worst, rel)
                assert abs(a - b) <= 1e-8 * max(abs(a), 1.0), f"{name} n={n} seed={seed}"
    return f"worst rel diff {worst:.1e}"


def _cor_pairs():
    gen = rng(2024)
    for seed in range(100):
        yield seed, float(gen.uniform(0.0, math.pi)), random_sl2c(seed, max_norm=10.0)


@criterion("5a", "sl2c certificate and embedded elliptic certificate agree (100 pairs)")
def test_criterion_5a_verdicts_agree():
    counts = {v: 0 for v in Verdict}
    for seed, theta, h in _cor_pairs():
        a = sl2c_certificate(theta, h)
        b = embedded_elliptic_certificate(theta, h)
        assert a.verdict is b.verdict, f"seed={seed} theta={theta}"
        counts[a.verdict] += 1
    return ", ".join(f"{v.value}={c}" for v, c in counts.items() if c)


@criterion("5b", "delta of the embedded rotation = 4 sin(theta/2) within 1e-12")
def test_criterion_5b_embedded_delta():
    J = HermitianForm.ball(1)
    for seed, theta, _ in _cor_pairs():
        C = classify(embed_sl2c(rotation_sl2c(theta)), J)
        assert abs(delta_elliptic(C) - 4 * math.sin(theta / 2)) <= 1e-12, f"seed={seed}"


@criterion("5c", "cosh^2(rho(0, h0)/2) = ||h||^2 within 1e-9 for the embedded h")
def test_criterion_5c_cosh_squared_equals_norm_squared():
    # Checked exactly as stated.  For a homomorphic embedding, h = I gives
    # cosh^2 = 1 but ||I||^2 = 2; the observed relation is (||h||^2 + 2)/4.
    J = HermitianForm.ball(1)
    o = origin(J)
    worst = 0.0
    for seed, _, h in _cor_pairs():
        H = embed_sl2c(h)
        c2 = cosh_half_distance(o, H @ o.vector, J) ** 2
        worst = max(worst, abs(c2 - sl2_norm2(h)))
    assert worst <= 1e-9, f"max |cosh^2 - ||h||^2| = {worst:.3e}"


@criterion("6", "sweep locates the regime change at 2 pi/3 within one step (1e-3)")
def test_criterion_6_crossover():
    step = 1e-3
    rows = comparison_sweep(0.0, math.pi, step)
    x = crossover(rows)
    assert x is not None and abs(x - 2 * math.pi / 3) <= 1e-3
    cut = 2 * math.pi / 3
    for r in rows:
        if r.theta <= cut:
            assert r.sin_half_sq <= r.sin_sq + 1e-15, r.theta
        if r.theta > cut + step:
            assert r.sin_half_sq > r.sin_sq and r.better is Better.CAO_TAN, r.theta
    return f"crossover at theta = {x:.4f}"


def _merged_oracle(qs, tol=1e-7):
    """Entrywise class representatives merged by single linkage, independent of the package."""
    reps = [complex(q[0], math.sqrt(q[1] ** 2 + q[2] ** 2 + q[3] ** 2)) for q in qs]
    groups: list[list[complex]] = []
    for r in reps:
        hits = [g for g in groups if any(abs(r - x) <= tol for x in g)]
        merged = [r] + [x for g in hits for x in g]
        groups = [g for g in groups if g not in hits] + [merged]
    return [(complex(np.mean(g)), len(g)) for g in groups], reps


def _match(eig, oracle, tol):
    got = sorted(zip(eig.reps, eig.multiplicities), key=lambda p: (p[0].real, p[0].imag))
    want = sorted(oracle, key=lambda p: (p[0].real, p[0].imag))
    assert len(got) == len(want), (got, want)
    for (r, m), (w, k) in zip(got, want):
        assert m == k and abs(r - w) <= tol, (got, want)


@criterion("7", "right eigenvalues of 500 diagonal matrices and their symplectic conjugates")
def test_criterion_7_eigen_oracle():
    gen = rng(7)
    worst_conj = 0.0
    for t in range(500):
        n = 1 + t % 3
        qs = gen.standard_normal((n + 1, 4))
        D = QMatrix.diag([Quaternion.from_array(q) for q in qs])
        oracle, _ = _merged_oracle(qs)
        _match(right_eigen(D), oracle, 1e-12)
        J = HermitianForm.ball(n)
        k = random_symplectic(n, J, 7000 + t, 0.5)
        A = k @ D @ symplectic_inverse(k, J)
        eig = right_eigen(A)
        _match(eig, oracle, 1e-7)
        worst_conj = max(
            worst_conj,
            max(min(abs(r - w) for w, _ in oracle) for r in eig.reps),
        )
    return f"worst conjugate drift {worst_conj:.1e}"


@criterion("8", "Shimizu: 2|zeta| >= 1 never certifies; vertical T flips once, monotone in t")
def test_criterion_8_shimizu_boundary():
    Js = HermitianForm.siegel(2)
    for zeta in (0.5, 0.6, 1.0):
        T = heisenberg_translation(Quaternion(0.5 * zeta**2, 0.0, 1.0), [Quaternion(zeta)])
        for seed in range(100):
            A = random_symplectic(2, Js, seed, 0.05 + 0.02 * seed)
            c = shimizu_certificate(T, A)
            assert c.verdict is not Verdict.NON_DISCRETE_OR_ELEMENTARY, f"zeta={zeta} seed={seed}"
    T = heisenberg_translation(Quaternion(0.0, 1.0), [0])
    X = random_lie_algebra(2, Js, rng(8), 1.0)
    rows = []
    for scale in np.linspace(0.01, 3.0, 300):
        c = shimizu_certificate(T, expm(X.scale(float(scale))))
        assert c.verdict is not Verdict.NOT_APPLICABLE, c.hypothesis
        rows.append((c.evidence["t"], c.verdict))
    assert rows[0][1] is Verdict.NON_DISCRETE_OR_ELEMENTARY
    assert rows[-1][1] is Verdict.NECESSARY_CONDITION_HOLDS
    by_t = [v for _, v in sorted(rows, key=lambda r: r[0])]
    flips = sum(1 for a, b in zip(by_t, by_t[1:]) if a is not b)
    assert flips == 1
    along_scale = sum(1 for a, b in zip(rows, rows[1:]) if a[1] is not b[1])
    return f"{flips} flip ordered by t, {along_scale} along the scale grid"


def _block_inverse(A: QMatrix) -> QMatrix:
    """Inverse written out from the Siegel block layout, independent of the package."""
    a = A.array
    n1 = A.rows

    def conj(q):
        return q * np.array([1, -1, -1, -1])

    out = np.zeros_like(a)
    out[0, 0], out[0, 1] = conj(a[1, 1]), conj(a[0, 1])
    out[1, 0], out[1, 1] = conj(a[1, 0]), conj(a[0, 0])
    for i in range(2, n1):
        out[0, i] = -conj(a[i, 1])  # -beta*
        out[1, i] = -conj(a[i, 0])  # -alpha*
        out[i, 0] = -conj(a[1, i])  # -delta
        out[i, 1] = -conj(a[0, i])  # -gamma
        for j in range(2, n1):
            out[i, j] = conj(a[j, i])  # U*
    return QMatrix(out)


@criterion("9", "normal forms classify as declared (1000 each); symplectic inverse = block formula (1e-10)")
def test_criterion_9_round_trips():
    counts = {}
    for t in range(1000):
        n = 1 + t % 3
        Jb, Js = HermitianForm.ball(n), HermitianForm.siegel(n)
        cases = [
            (random_regular_elliptic(n, t), Jb, Kind.REGULAR_ELLIPTIC),
            (random_loxodromic(n, t), Js, Kind.LOXODROMIC),
            (random_heisenberg(n, t, zeta_norm=0.0 if n == 1 else 0.4), Js, Kind.HEISENBERG_TRANSLATION),
        ]
        for A, J, kind in cases:
            got = classify(A, J).kind
            assert got is kind, f"seed={t} n={n}: {got} != {kind}"
            counts[kind] = counts.get(kind, 0) + 1
    worst = 0.0
    for n in (2, 3):
        J = HermitianForm.siegel(n)
        for seed in range(100):
            A = random_symplectic(n, J, seed, 1.0)
            inv = symplectic_inverse(A, J)
            blk = _block_inverse(A)
            ident = QMatrix.identity(n + 1)
            worst = max(worst, (inv - blk).max_norm(), (blk @ A - ident).max_norm(),
                        (A @ blk - ident).max_norm())
            assert (inv - blk).max_norm() <= 1e-10
            assert (blk @ A - ident).max_norm() <= 1e-10, f"seed={seed}"
            assert (A @ blk - ident).max_norm() <= 1e-10, f"seed={seed}"
        assert (adjoint_star(A) @ J.matrix @ A - J.matrix).max_norm() < 1e-9
    return f"{sum(counts.values())} classifications, worst inverse residual {worst:.1e}"
