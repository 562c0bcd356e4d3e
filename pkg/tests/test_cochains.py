"""Coboundary, cup product algebra, and multiplication matrices."""

import numpy as np
import pytest

from cochainflow import Cochain, CochainError, coboundary, cup, get_cup_table
from cochainflow.cochains import (cup_right_multiplication_matrix,
                                  toy_inner_product)


def random_cochain(K, k, rng):
    return Cochain(K, k, rng.standard_normal(K.n_simplices(k)))


def test_coboundary_linearity(torus4):
    rng = np.random.default_rng(0)
    a = random_cochain(torus4, 1, rng)
    b = random_cochain(torus4, 1, rng)
    lhs = coboundary(a + b * 2.0).values
    rhs = coboundary(a).values + 2.0 * coboundary(b).values
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_toy_inner_product_is_euclidean(torus4):
    rng = np.random.default_rng(1)
    a = random_cochain(torus4, 1, rng)
    b = random_cochain(torus4, 1, rng)
    assert toy_inner_product(a, b) == pytest.approx(a.values @ b.values)


def test_cup_degree_and_mismatch(torus4, sphere):
    a = Cochain.zeros(torus4, 1)
    b = Cochain.zeros(torus4, 1)
    assert cup(a, b).degree == 2
    with pytest.raises(CochainError):
        cup(a, Cochain.zeros(sphere, 1))
    with pytest.raises(CochainError):
        cup(a, Cochain.zeros(torus4, 2))  # degree 3 > dim


def test_cup_coefficient_one_sixth(torus4):
    table = get_cup_table(torus4, 1, 1)
    coeffs = np.abs(table.coeffs)
    assert np.allclose(coeffs, 1.0 / 6.0, atol=1e-15)


def test_cup_with_self_vanishes(torus8):
    # Graded commutativity in odd degree forces c cup c = 0.
    rng = np.random.default_rng(2)
    c = random_cochain(torus8, 1, rng)
    assert np.max(np.abs(cup(c, c).values)) <= 1e-13 * np.max(np.abs(c.values)) ** 2


def test_graded_commutativity(torus8):
    rng = np.random.default_rng(3)
    for j, k in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)]:
        a = random_cochain(torus8, j, rng)
        b = random_cochain(torus8, k, rng)
        lhs = cup(a, b).values
        rhs = (-1.0) ** (j * k) * cup(b, a).values
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_leibniz_rule(torus8):
    rng = np.random.default_rng(4)
    for j, k in [(0, 0), (0, 1), (1, 0)]:
        a = random_cochain(torus8, j, rng)
        b = random_cochain(torus8, k, rng)
        lhs = coboundary(cup(a, b)).values
        rhs = (cup(coboundary(a), b).values
               + (-1.0) ** j * cup(a, coboundary(b)).values)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_unit_cochain_is_left_identity(torus8):
    one = Cochain(torus8, 0, np.ones(torus8.n_simplices(0)))
    rng = np.random.default_rng(5)
    for k in (0, 1, 2):
        c = random_cochain(torus8, k, rng)
        assert np.allclose(cup(one, c).values, c.values, atol=1e-13)


def test_right_multiplication_matrix(torus8):
    rng = np.random.default_rng(6)
    c = random_cochain(torus8, 1, rng)
    b = random_cochain(torus8, 1, rng)
    L = cup_right_multiplication_matrix(c)
    assert np.allclose(L @ b.values, cup(c, b).values, atol=1e-13)
    # Each 2-simplex sees at most a handful of contributing pairs.
    rows = np.diff(L.tocsr().indptr)
    assert rows.max() <= 6


def test_cup_table_cached(torus8):
    assert get_cup_table(torus8, 1, 1) is get_cup_table(torus8, 1, 1)
