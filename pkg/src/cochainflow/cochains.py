"""Cochains as coefficient vectors and the graded-commutative cup product.

The product follows the elementary-cochain rule: a_j cup b_k is nonzero only
when the supports meet in exactly one vertex and jointly span a (j+k)-simplex
c, in which case the coefficient is eps(a, b) * j! k! / (j+k+1)!.  The sign
eps(a, b) is the parity of the block shuffle merging the non-shared vertices
of a and b into increasing order; this is the convention that matches the
Whitney-wedge integration oracle on every simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np
import scipy.sparse as sp

from .complexes import SimplicialComplex


class CochainError(ValueError):
    """Degree or complex mismatch in a cochain operation."""


@dataclass
class Cochain:
    complex: SimplicialComplex
    degree: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not 0 <= self.degree <= self.complex.dim:
            raise CochainError(f"degree {self.degree} out of range")
        if len(self.values) != self.complex.n_simplices(self.degree):
            raise CochainError("cochain length does not match simplex count")

    @classmethod
    def zeros(cls, complex_, degree):
        return cls(complex_, degree, np.zeros(complex_.n_simplices(degree)))

    @classmethod
    def elementary(cls, complex_, degree, index):
        c = cls.zeros(complex_, degree)
        c.values[index] = 1.0
        return c

    def copy(self):
        return Cochain(self.complex, self.degree, self.values.copy())

    def __add__(self, other):
        _check_pair(self, other)
        return Cochain(self.complex, self.degree, self.values + other.values)

    def __sub__(self, other):
        _check_pair(self, other)
        return Cochain(self.complex, self.degree, self.values - other.values)

    def __mul__(self, scalar):
        return Cochain(self.complex, self.degree, self.values * float(scalar))

    __rmul__ = __mul__


def _check_pair(a, b):
    if a.complex is not b.complex:
        raise CochainError("cochains live on different complexes")
    if a.degree != b.degree:
        raise CochainError(f"degree mismatch: {a.degree} vs {b.degree}")


def coboundary(c: Cochain) -> Cochain:
    mat = c.complex.coboundary_matrix(c.degree)
    return Cochain(c.complex, c.degree + 1, mat @ c.values)


def toy_inner_product(a: Cochain, b: Cochain) -> float:
    """Inner product with the elementary cochains declared orthonormal."""
    _check_pair(a, b)
    return float(np.dot(a.values, b.values))


# ------------------------------------------------------------------ cup table

def _shuffle_sign(left, right):
    """Parity of merging two increasing id blocks into increasing order."""
    inv = sum(1 for u in left for v in right if u > v)
    return -1 if inv % 2 else 1


class CupTable:
    """Precomputed sparse triples for one (j, k) degree pair on a complex.

    Entries are (a_index, b_index, c_index, coefficient); coefficients are
    kept as exact rationals and mirrored to floats for application.
    """

    def __init__(self, complex_, j, k):
        if j + k > complex_.dim:
            raise CochainError(f"cup degrees overflow complex dimension: {j}+{k}")
        self.complex = complex_
        self.j, self.k = j, k
        m = j + k
        ai, bi, ci, fracs = [], [], [], []
        coeff = Fraction(factorial(j) * factorial(k), factorial(m + 1))
        tuples = complex_.simplices[m]
        positions = list(range(m + 1))
        for c_idx in range(complex_.n_simplices(m)):
            w = tuples[c_idx]
            for s_pos in positions:
                others = [p for p in positions if p != s_pos]
                for a_rest in combinations(others, j):
                    a_pos = tuple(sorted(a_rest + (s_pos,)))
                    b_pos = tuple(sorted(set(positions) - set(a_rest)))
                    a_idx = complex_.face_of(m, c_idx, a_pos)
                    b_idx = complex_.face_of(m, c_idx, b_pos)
                    left = [w[p] for p in a_pos if p != s_pos]
                    right = [w[p] for p in b_pos if p != s_pos]
                    eps = _shuffle_sign(left, right)
                    ai.append(a_idx)
                    bi.append(b_idx)
                    ci.append(c_idx)
                    fracs.append(eps * coeff)
        self.a_idx = np.array(ai, dtype=np.int64)
        self.b_idx = np.array(bi, dtype=np.int64)
        self.c_idx = np.array(ci, dtype=np.int64)
        self.coeffs_exact = fracs
        self.coeffs = np.array([float(f) for f in fracs])

    def apply(self, a_values, b_values):
        out = np.zeros(self.complex.n_simplices(self.j + self.k))
        np.add.at(out, self.c_idx,
                  self.coeffs * a_values[self.a_idx] * b_values[self.b_idx])
        return out

    def left_multiplication_matrix(self, a_values):
        """Matrix of b -> a cup b in the elementary bases."""
        data = self.coeffs * a_values[self.a_idx]
        shape = (self.complex.n_simplices(self.j + self.k),
                 self.complex.n_simplices(self.k))
        mat = sp.coo_matrix((data, (self.c_idx, self.b_idx)), shape=shape).tocsr()
        mat.sum_duplicates()
        return mat

    def exact_pairs(self):
        """Iterate (a_index, b_index, c_index, Fraction coefficient)."""
        for i in range(len(self.a_idx)):
            yield (int(self.a_idx[i]), int(self.b_idx[i]), int(self.c_idx[i]),
                   self.coeffs_exact[i])


def get_cup_table(complex_, j, k) -> CupTable:
    key = ("cup_table", j, k)
    if key not in complex_._cache:
        complex_._cache[key] = CupTable(complex_, j, k)
    return complex_._cache[key]


def cup(a: Cochain, b: Cochain) -> Cochain:
    if a.complex is not b.complex:
        raise CochainError("cochains live on different complexes")
    table = get_cup_table(a.complex, a.degree, b.degree)
    return Cochain(a.complex, a.degree + b.degree, table.apply(a.values, b.values))


def cup_right_multiplication_matrix(c: Cochain):
    """Matrix of b -> c cup b from C^1 to C^2 (the operator L_c)."""
    if c.degree != 1:
        raise CochainError("L_c is defined for 1-cochains")
    table = get_cup_table(c.complex, 1, 1)
    return table.left_multiplication_matrix(c.values)
