"""Interpolation, integration, mass matrices, and L^2 machinery."""

import fractions

import numpy as np
import pytest

from cochainflow import (Cochain, build_flat_torus, coboundary, de_rham_map,
                         l2_distance, l2_pairing, parse_form,
                         taylor_green_form, whitney_map, whitney_mass_matrix)
from cochainflow.polyform import form_is_zero
from cochainflow.whitney import de_rham_exact, whitney_mass_matrix_quadrature


def test_interpolate_then_integrate_is_identity(torus4):
    rng = np.random.default_rng(10)
    for k in (0, 1, 2):
        c = Cochain(torus4, k, rng.standard_normal(torus4.n_simplices(k)))
        back = de_rham_map(whitney_map(c))
        assert np.max(np.abs(back.values - c.values)) <= 1e-13


def test_interpolate_then_integrate_exact_rationals(torus4):
    for k in (0, 1, 2):
        for idx in (0, torus4.n_simplices(k) - 1):
            c = Cochain.elementary(torus4, k, idx)
            exact = de_rham_exact(whitney_map(c))
            for i, v in enumerate(exact):
                expected = fractions.Fraction(int(i == idx))
                assert v == expected


def test_interpolation_commutes_with_coboundary(torus4):
    rng = np.random.default_rng(11)
    for k in (0, 1):
        vals = rng.integers(-5, 6, size=torus4.n_simplices(k)).astype(float)
        c = Cochain(torus4, k, vals)
        diff = whitney_map(coboundary(c)) - whitney_map(c).d()
        for piece in diff.pieces:
            assert form_is_zero(piece, torus4.dim + 1)


def test_integration_of_smooth_forms(torus4):
    # Integrals of dx over edges recover the x-displacement of each edge.
    c = de_rham_map(parse_form("dx"), torus4)
    e = torus4.simplex_coords[1]
    assert np.allclose(c.values, e[:, 1, 0] - e[:, 0, 0], atol=1e-12)


def test_mass_matrix_single_triangle():
    from cochainflow import SimplicialComplex
    K = SimplicialComplex.from_cells(
        2, 3, [(0, 1, 2)],
        vertex_coords=[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    M0 = whitney_mass_matrix(K, 0).toarray()
    area = 0.5
    expected = np.full((3, 3), area / 12.0)
    np.fill_diagonal(expected, area / 6.0)
    assert np.allclose(M0, expected, atol=1e-15)


def test_mass_matrices_symmetric_positive(torus8):
    for k in (0, 1, 2):
        M = whitney_mass_matrix(torus8, k).toarray()
        assert np.max(np.abs(M - M.T)) <= 1e-15
        np.linalg.cholesky(M)


def test_mass_matrix_against_quadrature(torus4):
    for k in (0, 1, 2):
        M = whitney_mass_matrix(torus4, k).toarray()
        Q = whitney_mass_matrix_quadrature(torus4, k).toarray()
        assert np.max(np.abs(M - Q)) <= 1e-12


def test_l2_pairing_symmetry(torus4):
    rng = np.random.default_rng(12)
    a = Cochain(torus4, 1, rng.standard_normal(torus4.n_simplices(1)))
    b = Cochain(torus4, 1, rng.standard_normal(torus4.n_simplices(1)))
    assert l2_pairing(a, b, torus4) == pytest.approx(
        l2_pairing(b, a, torus4), abs=1e-13)
    M1 = whitney_mass_matrix(torus4, 1).toarray()
    assert l2_pairing(a, b, torus4) == pytest.approx(
        a.values @ (M1 @ b.values), abs=1e-12)


def test_interpolation_error_shrinks_under_refinement():
    omega = taylor_green_form()
    errs = []
    for n in (4, 8):
        K = build_flat_torus(n, 2)
        errs.append(l2_distance(de_rham_map(omega, K), omega, K))
    assert errs[1] < 0.6 * errs[0]
