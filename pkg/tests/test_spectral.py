import math
from fractions import Fraction

import numpy as np
import pytest

from moogvcf.model import linearized_matrix, make_params
from moogvcf.spectral import (
    RootFindingError,
    characteristic_coeffs,
    eigvals_closed_form,
    eigvals_numeric,
    stability_margin,
)


def test_closed_form_r0_all_equal():
    spec = eigvals_closed_form(make_params(1.0, 0.0))
    assert np.allclose(spec.eigenvalues, -1.0)
    assert spec.max_real_part == -1.0


def test_closed_form_r1_against_quartic_oracle():
    # (lambda + 1)^4 + 4 = 0 solved by numpy's companion-matrix roots
    oracle = np.roots([1.0, 4.0, 6.0, 4.0, 5.0])
    spec = eigvals_closed_form(make_params(1.0, 1.0))
    got = sorted(spec.eigenvalues, key=lambda z: (round(z.real, 9), z.imag))
    want = sorted(oracle, key=lambda z: (round(z.real, 9), z.imag))
    assert np.abs(np.array(got) - np.array(want)).max() < 1e-10


def test_closed_form_r1_exact_boundary():
    spec = eigvals_closed_form(make_params(1.0, 1.0))
    assert spec.max_real_part == 0.0
    want = {(0.0, 1.0), (0.0, -1.0), (-2.0, 1.0), (-2.0, -1.0)}
    got = {(round(z.real, 12), round(z.imag, 12)) for z in spec.eigenvalues}
    assert got == want


def test_max_real_part_consistent_with_eigenvalues():
    for r in (0.0, 0.3, 1.0):
        for omega0 in (0.1, 1.0, 42.0):
            spec = eigvals_closed_form(make_params(omega0, r))
            assert spec.max_real_part == spec.eigenvalues.real.max()


def test_numeric_diagonal():
    spec = eigvals_numeric(np.diag([1.0, 2.0, 3.0, 4.0]))
    assert np.abs(np.sort(spec.eigenvalues.real) - [1.0, 2.0, 3.0, 4.0]).max() < 1e-12
    assert np.abs(spec.eigenvalues.imag).max() < 1e-12


def test_numeric_rotation_blocks():
    # two uncoupled unit rotations: double pair at +-j
    M = np.array([
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    spec = eigvals_numeric(M)
    imag_sorted = np.sort(spec.eigenvalues.imag)
    assert np.abs(imag_sorted - [-1.0, -1.0, 1.0, 1.0]).max() < 1e-10
    assert np.abs(spec.eigenvalues.real).max() < 1e-10


def test_numeric_matches_closed_form():
    p = make_params(2.0, 0.5)
    closed = eigvals_closed_form(p)
    numeric = eigvals_numeric(linearized_matrix(p))
    assert np.abs(closed.eigenvalues - numeric.eigenvalues).max() < 1e-10


def test_numeric_conjugate_closure():
    rng = np.random.default_rng(21)
    for _ in range(20):
        M = rng.uniform(-3, 3, size=(4, 4))
        eigs = eigvals_numeric(M).eigenvalues
        conj = np.conj(eigs)
        for z in eigs:
            assert np.abs(conj - z).min() < 1e-9 * (1.0 + abs(z))


def test_grid_agreement_subset():
    for r in np.linspace(0.0, 1.0, 11):
        for omega0 in (0.1, 1.0, 10.0, 100.0):
            p = make_params(omega0, r)
            closed = eigvals_closed_form(p)
            numeric = eigvals_numeric(linearized_matrix(p))
            assert np.abs(closed.eigenvalues - numeric.eigenvalues).max() < 1e-10
            assert closed.max_real_part <= 0.0


def test_characteristic_polynomial_identity():
    # det(A - lambda I) = (lambda + omega0)^4 + omega0^4 * 4r at the
    # computed eigenvalues, scaled by omega0^4
    for r in np.linspace(0.0, 1.0, 11):
        for omega0 in (0.1, 1.0, 100.0):
            p = make_params(omega0, r)
            for z in eigvals_closed_form(p).eigenvalues:
                val = (z + omega0) ** 4 + omega0 ** 4 * (4.0 * r)
                assert abs(val) / omega0 ** 4 < 1e-8
            for z in eigvals_numeric(linearized_matrix(p)).eigenvalues:
                val = (z + omega0) ** 4 + omega0 ** 4 * (4.0 * r)
                assert abs(val) / omega0 ** 4 < 1e-8


def test_characteristic_coeffs_exact():
    coeffs = characteristic_coeffs(linearized_matrix(make_params(1.0, 0.0)))
    assert coeffs == [Fraction(1), Fraction(4), Fraction(6), Fraction(4), Fraction(1)]


def test_stability_margin_values():
    assert stability_margin(make_params(1.0, 1.0)) == 0.0
    assert stability_margin(make_params(3.0, 0.0)) == 3.0
    assert stability_margin(make_params(1.0, 1.0 / 16.0)) == pytest.approx(0.5, rel=1e-15)


def test_stability_margin_nonnegative():
    for r in np.linspace(0.0, 1.0, 101):
        assert stability_margin(make_params(7.0, r)) >= 0.0


def test_margin_agrees_with_closed_form():
    for r in (0.0, 0.2, 0.77, 1.0):
        p = make_params(2.5, r)
        assert stability_margin(p) == -eigvals_closed_form(p).max_real_part


def test_root_finding_error_carries_residual():
    M = linearized_matrix(make_params(1.0, 0.5))
    with pytest.raises(RootFindingError) as exc:
        eigvals_numeric(M, max_iter=1)
    assert exc.value.residual > 0.0
