"""Metric models, co-closed projection, decomposition, harmonic subspaces."""

import numpy as np
import pytest

from cochainflow import (Cochain, InnerProductModel, coboundary,
                         harmonic_basis, hodge_decompose, toy_model,
                         whitney_model)


def random_cochain(K, k, rng):
    return Cochain(K, k, rng.standard_normal(K.n_simplices(k)))


def test_toy_adjoint_is_transpose(torus8, toy8):
    d0 = torus8.coboundary_matrix(0).toarray()
    assert np.array_equal(toy8.adjoint_coboundary(0), d0.T)


def test_adjoint_identity(torus8, whitney8):
    rng = np.random.default_rng(20)
    a = random_cochain(torus8, 0, rng)
    b = random_cochain(torus8, 1, rng)
    lhs = whitney8.inner(coboundary(a), b)
    dstar_b = Cochain(torus8, 0, whitney8.adjoint_coboundary_apply(0, b.values))
    assert lhs == pytest.approx(whitney8.inner(a, dstar_b), rel=1e-12)


@pytest.mark.parametrize("variant", ["toy", "whitney"])
def test_projection_properties(torus8, variant):
    model = InnerProductModel(torus8, variant)
    rng = np.random.default_rng(21)
    c = random_cochain(torus8, 1, rng)
    p = model.project_coclosed(c)
    pp = model.project_coclosed(p)
    assert model.norm(pp - p) <= 1e-12 * model.norm(c)
    dstar = model.adjoint_coboundary_apply(0, p.values)
    res = Cochain(torus8, 0, dstar)
    assert model.norm(res) <= 1e-12 * model.norm(c)


def test_projection_self_adjoint(torus8, whitney8):
    rng = np.random.default_rng(22)
    a = random_cochain(torus8, 1, rng)
    b = random_cochain(torus8, 1, rng)
    lhs = whitney8.inner(whitney8.project_coclosed(a), b)
    rhs = whitney8.inner(a, whitney8.project_coclosed(b))
    assert lhs == pytest.approx(rhs, rel=1e-11)


def test_projection_fixes_coclosed(torus8, whitney8):
    h = harmonic_basis(whitney8).basis[0]
    assert whitney8.norm(whitney8.project_coclosed(h) - h) <= 1e-12


def test_hodge_decomposition(torus8, whitney8):
    rng = np.random.default_rng(23)
    c = random_cochain(torus8, 1, rng)
    dec = hodge_decompose(whitney8, c)
    assert whitney8.norm(dec.recombined() - c) <= 1e-11 * whitney8.norm(c)
    for a, b in [(dec.exact, dec.coexact), (dec.exact, dec.harmonic),
                 (dec.coexact, dec.harmonic)]:
        assert abs(whitney8.inner(a, b)) <= 1e-10 * whitney8.norm(c) ** 2
    # The pieces land in the right kernels.
    assert whitney8.norm(coboundary(dec.exact)) <= 1e-10
    h = dec.harmonic
    assert whitney8.norm(coboundary(h)) <= 1e-10
    dstar = Cochain(torus8, 0, whitney8.adjoint_coboundary_apply(0, h.values))
    assert whitney8.norm(dstar) <= 1e-10


@pytest.mark.parametrize("variant", ["toy", "whitney"])
def test_torus_harmonic_dimension(torus8, variant):
    model = InnerProductModel(torus8, variant)
    rep = harmonic_basis(model)
    assert len(rep.basis) == 2
    assert rep.spectral_gap >= 1e3
    for h in rep.basis:
        assert model.norm(coboundary(h)) <= 1e-9
        dstar = Cochain(torus8, 0, model.adjoint_coboundary_apply(0, h.values))
        assert model.norm(dstar) <= 1e-9


def test_sphere_has_no_harmonic_1_cochains(sphere):
    for make in (toy_model, whitney_model):
        rep = harmonic_basis(make(sphere))
        assert len(rep.basis) == 0
        assert rep.spectral_gap >= 1e3


def test_variant_validation(torus4):
    with pytest.raises(ValueError):
        InnerProductModel(torus4, "euclidean")
