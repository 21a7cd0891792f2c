import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moogvcf import lyapunov, model
from moogvcf.lyapunov import (
    CertificateReport,
    MatrixFamily,
    Verdict,
    V_nonlinear,
    V_quadratic_w,
    V_quadratic_x,
    V_zero_feedback,
    Vdot_nonlinear,
    certify,
    definiteness_threshold,
    grad_V,
    log_cosh,
    log_cosh_diff,
    structure_max_eigenvalue,
    sym_eigvals,
    symmetrize,
)
from moogvcf.model import make_params

resonances = st.floats(min_value=1e-6, max_value=1.0, allow_nan=False)
coords = st.lists(st.floats(min_value=-20, max_value=20), min_size=4, max_size=4)


def test_log_cosh_matches_naive():
    for u in (-300.0, -2.0, -1e-9, 0.0, 0.3, 5.0, 50.0):
        if abs(u) < 50:
            assert log_cosh(u) == pytest.approx(math.log(math.cosh(u)), rel=1e-14, abs=1e-300)
    # saturated regime: lncosh(u) ~ |u| - ln 2
    assert log_cosh(800.0) == pytest.approx(800.0 - math.log(2.0), rel=1e-15)


@given(a=st.floats(min_value=-30, max_value=30), h=st.floats(min_value=-40, max_value=40))
def test_log_cosh_diff_consistent(a, h):
    direct = log_cosh(a + h) - log_cosh(a)
    assert log_cosh_diff(a, h) == pytest.approx(direct, abs=5e-13)


def test_quadratic_energies():
    assert V_quadratic_x(np.zeros(4)) == 0.0
    assert V_quadratic_x(np.ones(4)) == 2.0
    assert V_quadratic_x([3.0, 0.0, 0.0, 0.0]) == 4.5
    assert V_quadratic_w(np.zeros(4)) == 0.0
    w = model.to_scaled([1.0, 1.0, 0.0, 0.0], math.sqrt(2.0))
    assert V_quadratic_w(w) == pytest.approx(1.5, rel=1e-15)
    x = np.array([0.2, -1.0, 3.0, 0.5])
    assert V_quadratic_w(model.to_scaled(x, 1.0)) == V_quadratic_x(x)


def test_V_nonlinear_zero_at_origin():
    assert V_nonlinear(np.zeros(4), make_params(1.0, 0.4)) == 0.0


def test_V_nonlinear_rejects_r0():
    with pytest.raises(ValueError):
        V_nonlinear(np.ones(4), make_params(1.0, 0.0))
    with pytest.raises(ValueError):
        grad_V(np.ones(4), make_params(1.0, 0.0))
    with pytest.raises(ValueError):
        Vdot_nonlinear(np.ones(4), make_params(1.0, 0.0))


def test_V_nonlinear_small_state_quadratic():
    # second-order expansion: V ~ (w1^2 + w2^2 + w3^2 + (4r/d^4) w4^2)/2
    rng = np.random.default_rng(5)
    for r in (0.05, 0.5, 1.0):
        p = make_params(1.0, r)
        for _ in range(20):
            w = rng.normal(size=4)
            w *= 1e-4 / np.linalg.norm(w)
            quad = 0.5 * (w[0] ** 2 + w[1] ** 2 + w[2] ** 2
                          + (4.0 * r / p.d ** 4) * w[3] ** 2)
            assert V_nonlinear(w, p) == pytest.approx(quad, rel=1e-6)


def test_V_nonlinear_positive_and_radially_unbounded():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        r = rng.uniform(1e-3, 1.0)
        p = make_params(1.0, r)
        w = rng.uniform(-30, 30, size=4)
        if np.all(w == 0.0):
            continue
        assert V_nonlinear(w, p) > 0.0
    for r in (0.1, 0.5, 1.0):
        p = make_params(1.0, r)
        for direction in np.eye(4):
            s = 1e4
            assert V_nonlinear(s * direction, p) / s > 0.05


def test_zero_feedback_energy():
    assert V_zero_feedback(np.zeros(4)) == 0.0
    w = np.array([1.0, -2.0, 0.5, 3.0])
    assert V_zero_feedback(w) == pytest.approx(sum(math.log(math.cosh(v)) for v in w), rel=1e-14)


def test_grad_is_saturation_vector_bit_for_bit():
    rng = np.random.default_rng(8)
    for _ in range(50):
        p = make_params(1.0, rng.uniform(1e-3, 1.0))
        w = rng.uniform(-10, 10, size=4)
        assert np.array_equal(grad_V(w, p), model.saturation_vector(w, p))


def test_grad_component_hand_value():
    p = make_params(1.0, 0.9)
    w = np.array([0.0, p.d, 0.0, 0.0])
    assert grad_V(w, p)[1] == pytest.approx(p.d * math.tanh(1.0), rel=1e-15)


def test_grad_matches_finite_differences():
    rng = np.random.default_rng(9)
    for _ in range(100):
        p = make_params(1.0, rng.uniform(1e-3, 1.0))
        w = rng.uniform(-10, 10, size=4)
        grad = grad_V(w, p)
        fd = np.empty(4)
        for k in range(4):
            h = 1e-6 * max(1.0, abs(w[k]))
            hi = w.copy(); hi[k] += h
            lo = w.copy(); lo[k] -= h
            fd[k] = (V_nonlinear(hi, p) - V_nonlinear(lo, p)) / (2.0 * h)
        assert np.abs(fd - grad).max() <= 1e-6 * max(1.0, np.abs(grad).max())


def test_Vdot_zero_at_origin():
    assert Vdot_nonlinear(np.zeros(4), make_params(1.0, 0.5)) == 0.0


def test_Vdot_is_directional_derivative():
    # chain-rule oracle: (V(w + eps*wdot) - V(w - eps*wdot)) / (2 eps)
    rng = np.random.default_rng(10)
    eps = 1e-6
    for _ in range(100):
        p = make_params(1.0, rng.uniform(1e-2, 1.0))
        w = rng.uniform(-5, 5, size=4)
        wdot = model.rhs_scaled(w, p)
        fd = (V_nonlinear(w + eps * wdot, p) - V_nonlinear(w - eps * wdot, p)) / (2 * eps)
        got = Vdot_nonlinear(w, p)
        assert got == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_Vdot_equals_grad_dot_field():
    rng = np.random.default_rng(12)
    for _ in range(200):
        p = make_params(rng.choice([0.1, 1.0, 100.0]), rng.uniform(1e-3, 1.0))
        w = rng.uniform(-20, 20, size=4)
        inner = float(grad_V(w, p) @ model.rhs_scaled(w, p))
        assert abs(Vdot_nonlinear(w, p) - inner) < 1e-12


@given(r=resonances, w=coords)
@settings(max_examples=300)
def test_Vdot_nonpositive(r, w):
    p = make_params(1.0, r)
    assert Vdot_nonlinear(np.array(w), p) <= 0.0


def test_Vdot_zero_feedback_nonpositive():
    rng = np.random.default_rng(13)
    p = make_params(1.0, 0.0)
    for _ in range(500):
        w = rng.uniform(-20, 20, size=4)
        assert lyapunov.Vdot_zero_feedback(w, p) <= 0.0


def test_branch_dispatchers():
    p0 = make_params(2.0, 0.0)
    w = np.array([1.0, -1.0, 0.5, 2.0])
    assert lyapunov.lyapunov_value(w, p0) == V_zero_feedback(w)
    assert lyapunov.lyapunov_rate(w, p0) == lyapunov.Vdot_zero_feedback(w, p0)
    p1 = make_params(2.0, 0.5)
    assert lyapunov.lyapunov_value(w, p1) == V_nonlinear(w, p1)
    assert lyapunov.lyapunov_rate(w, p1) == Vdot_nonlinear(w, p1)


def test_candidate_dispatch():
    p = make_params(1.0, 0.5)
    x = np.array([1.0, -1.0, 0.5, 2.0])
    w = model.to_scaled(x, p.d)
    assert lyapunov.candidate_value(lyapunov.LyapunovKind.QUADRATIC_X, x, p) == V_quadratic_x(x)
    assert lyapunov.candidate_value(lyapunov.LyapunovKind.QUADRATIC_W, w, p) == V_quadratic_w(w)
    assert lyapunov.candidate_value(lyapunov.LyapunovKind.LOG_COSH, w, p) == V_nonlinear(w, p)
    p0 = make_params(1.0, 0.0)
    assert lyapunov.candidate_value(lyapunov.LyapunovKind.LOG_COSH, x, p0) == V_zero_feedback(x)


def test_symmetrize():
    M = model.linearized_matrix(make_params(1.0, 1.0))
    S = symmetrize(M)
    assert S[0, 1] == 0.5
    assert np.array_equal(S, symmetrize(S))
    anti = np.array([[0.0, 1.0, -2.0, 3.0],
                     [-1.0, 0.0, 4.0, -5.0],
                     [2.0, -4.0, 0.0, 6.0],
                     [-3.0, 5.0, -6.0, 0.0]])
    assert np.array_equal(symmetrize(anti), np.zeros((4, 4)))


def test_sym_eigvals_diagonal():
    got = sym_eigvals(np.diag([-1.0, -2.0, -3.0, -4.0]))
    assert np.array_equal(got, [-4.0, -3.0, -2.0, -1.0])


def test_sym_eigvals_structure_matrix():
    got = sym_eigvals(model.coupling_structure(0.0))
    assert abs(got[-1] - math.sqrt(2.0)) < 1e-10


def test_sym_eigvals_scaled_linearization_boundary():
    p = make_params(1.0, 1.0)
    M = symmetrize(model.scaled_linearized_matrix(p)) / p.omega0
    assert abs(sym_eigvals(M)[-1]) < 1e-10


def test_sym_eigvals_rejects_asymmetric():
    M = np.eye(4)
    M[0, 1] = 1.0
    with pytest.raises(ValueError):
        sym_eigvals(M, tol=1e-10)


@given(entries=st.lists(st.floats(min_value=-10, max_value=10), min_size=10, max_size=10))
@settings(max_examples=200)
def test_sym_eigvals_against_numpy(entries):
    M = np.zeros((4, 4))
    idx = 0
    for i in range(4):
        for j in range(i, 4):
            M[i, j] = M[j, i] = entries[idx]
            idx += 1
    got = sym_eigvals(M)
    ref = np.linalg.eigvalsh(M)
    assert np.abs(got - ref).max() < 1e-11 * max(1.0, np.abs(M).max())


def test_structure_max_eigenvalue_values():
    assert structure_max_eigenvalue(0.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert structure_max_eigenvalue(1.0) == 2.0
    # second branch stays below sqrt(2) at f = -3: (sqrt(17) - 3)/2 ~ 0.5616
    assert 0.5 * (-3.0 + math.sqrt(17.0)) < math.sqrt(2.0)
    assert structure_max_eigenvalue(-3.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_structure_max_eigenvalue_matches_solver():
    for f in np.linspace(-10.0, 10.0, 101):
        ref = sym_eigvals(model.coupling_structure(f))[-1]
        assert abs(structure_max_eigenvalue(f) - ref) < 1e-10


def test_max_eig_monotone_in_ratio():
    # larger ratio only subtracts from the (4,4) entry, so the top
    # eigenvalue cannot grow
    rng = np.random.default_rng(14)
    p = make_params(1.0, 0.6)
    for _ in range(100):
        g1, g2 = sorted(rng.uniform(1.0, 4.0, size=2))
        e1 = sym_eigvals(symmetrize(model.coupling_matrix(p, g1)))[-1]
        e2 = sym_eigvals(symmetrize(model.coupling_matrix(p, g2)))[-1]
        assert e2 <= e1 + 1e-12


@pytest.mark.parametrize("family,r,verdict", [
    (MatrixFamily.AS, 0.2, Verdict.NEGATIVE_DEFINITE),
    (MatrixFamily.AS, 0.5, Verdict.INDEFINITE),
    (MatrixFamily.AS, 5.0 / 12.0, Verdict.NEGATIVE_SEMIDEFINITE),
    (MatrixFamily.BS, 1.0, Verdict.NEGATIVE_SEMIDEFINITE),
    (MatrixFamily.BS, 0.99, Verdict.NEGATIVE_DEFINITE),
    (MatrixFamily.QS_WORST_CASE, 0.999, Verdict.NEGATIVE_DEFINITE),
    (MatrixFamily.QS_WORST_CASE, 1.0, Verdict.NEGATIVE_SEMIDEFINITE),
])
def test_certify_verdicts(family, r, verdict):
    report = certify(family, make_params(1.0, r))
    assert report.verdict is verdict


def test_certify_bs_boundary_eigenvalue():
    report = certify(MatrixFamily.BS, make_params(1.0, 1.0))
    assert abs(report.max_eig) < 1e-10


def test_certify_report_consistency():
    for family in MatrixFamily:
        for r in (0.1, 0.45, 0.9, 1.0):
            rep = certify(family, make_params(3.0, r))
            assert rep.min_eig <= rep.max_eig
            if rep.verdict is Verdict.NEGATIVE_DEFINITE:
                assert rep.max_eig < -rep.tol
            elif rep.verdict is Verdict.NEGATIVE_SEMIDEFINITE:
                assert abs(rep.max_eig) <= rep.tol
            else:
                assert rep.max_eig > rep.tol


def test_certify_omega0_invariance():
    a = certify(MatrixFamily.AS, make_params(1.0, 0.3))
    b = certify(MatrixFamily.AS, make_params(250.0, 0.3))
    assert a.max_eig == b.max_eig
    assert a.verdict is b.verdict


def test_certify_qs_rejects_r0():
    with pytest.raises(ValueError):
        certify(MatrixFamily.QS_WORST_CASE, make_params(1.0, 0.0))


def test_threshold_as_recovers_five_twelfths():
    r_star = definiteness_threshold(MatrixFamily.AS, 0.0, 1.0, tol=1e-8)
    assert abs(r_star - 5.0 / 12.0) < 1e-6


def test_threshold_bs_and_qs_at_one():
    assert abs(definiteness_threshold(MatrixFamily.BS, 0.5, 1.0001, tol=1e-8) - 1.0) < 1e-6
    assert abs(definiteness_threshold(MatrixFamily.QS_WORST_CASE, 0.5, 1.0001, tol=1e-8) - 1.0) < 1e-6


def test_threshold_requires_sign_change():
    with pytest.raises(ValueError):
        definiteness_threshold(MatrixFamily.AS, 0.0, 0.2)
    with pytest.raises(ValueError):
        definiteness_threshold(MatrixFamily.AS, 0.5, 0.3)


def test_stability_condition_over_resonance_range():
    # strict margin below r = 1, equality at the top of the range
    for r in np.linspace(0.01, 0.99, 50):
        p = make_params(1.0, r)
        g_lo, _ = model.feedback_ratio_bounds(p)
        lam = structure_max_eigenvalue(model.corner_gain(g_lo, p.d))
        assert lam < 2.0 / p.d
    p = make_params(1.0, 1.0)
    g_lo, _ = model.feedback_ratio_bounds(p)
    lam = structure_max_eigenvalue(model.corner_gain(g_lo, p.d))
    assert abs(lam - 2.0 / p.d) < 1e-12


def test_case_split_by_resonance():
    for r in (0.01, 0.1, 0.25):
        assert make_params(1.0, r).d <= 1.0 + 1e-15
    for r in (0.26, 0.5, 1.0):
        p = make_params(1.0, r)
        assert p.d == p.alpha > 1.0
