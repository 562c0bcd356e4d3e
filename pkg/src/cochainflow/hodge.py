"""Inner-product models, adjoint coboundaries, and the co-closed projection.

The projection onto ker delta* is computed through a degree-0 potential
solve: a weighted graph Laplacian with its constant-per-component null
space deflated, factorized once per (complex, model) and reused across a
whole simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .cochains import Cochain
from .complexes import SimplicialComplex
from .whitney import whitney_mass_matrix


class SolverError(RuntimeError):
    """Factorization failure or unresolved spectral threshold."""


class InnerProductModel:
    """Metric on cochains: identity masses (toy) or Whitney L^2 masses."""

    def __init__(self, complex_: SimplicialComplex, variant: str = "whitney"):
        if variant not in ("toy", "whitney"):
            raise ValueError(f"unknown metric variant: {variant}")
        if variant == "whitney":
            complex_.require_embedded()
        self.complex = complex_
        self.variant = variant
        self._mass = {}
        self._mass_solve = {}
        self._proj = None

    def mass(self, k):
        if k not in self._mass:
            n = self.complex.n_simplices(k)
            if self.variant == "toy":
                self._mass[k] = sp.identity(n, format="csr")
            else:
                self._mass[k] = whitney_mass_matrix(self.complex, k)
        return self._mass[k]

    def mass_solve(self, k, rhs):
        if self.variant == "toy":
            return np.asarray(rhs, dtype=float)
        if k not in self._mass_solve:
            try:
                self._mass_solve[k] = spla.splu(self.mass(k).tocsc())
            except RuntimeError as exc:
                raise SolverError(f"mass matrix factorization failed (degree {k}): "
                                  f"{exc}") from exc
        return self._mass_solve[k].solve(np.asarray(rhs, dtype=float))

    def inner(self, a: Cochain, b: Cochain) -> float:
        if a.degree != b.degree:
            raise ValueError("degree mismatch in inner product")
        return float(a.values @ (self.mass(a.degree) @ b.values))

    def norm(self, a: Cochain) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    # ------------------------------------------------------------- adjoints

    def adjoint_coboundary_apply(self, k, values):
        """delta*_k applied to a (k+1)-cochain vector: M_k^{-1} d_k^T M_{k+1}."""
        d = self.complex.coboundary_matrix(k)
        return self.mass_solve(k, d.T @ (self.mass(k + 1) @ np.asarray(values, float)))

    def adjoint_coboundary(self, k):
        """delta*_k as a dense matrix (desk-scale use: tests and reports)."""
        d = self.complex.coboundary_matrix(k).toarray().astype(float)
        rhs = d.T @ self.mass(k + 1).toarray()
        if self.variant == "toy":
            return rhs
        return np.column_stack([self.mass_solve(k, rhs[:, i])
                                for i in range(rhs.shape[1])])

    # ----------------------------------------------------------- projection

    def _projection_factor(self):
        if self._proj is None:
            K = self.complex
            d0 = K.coboundary_matrix(0)
            M1 = self.mass(1)
            L = (d0.T @ M1 @ d0).toarray()
            adj = sp.coo_matrix((np.ones(len(K.facets[1]) * 2),
                                 (np.repeat(np.arange(len(K.facets[1])), 2).astype(int),
                                  K.facets[1].ravel())),
                                shape=(len(K.facets[1]), K.n_vertices))
            n_comp, labels = connected_components(adj.T @ adj, directed=False)
            P = np.zeros_like(L)
            for c in range(n_comp):
                idx = np.nonzero(labels == c)[0]
                P[np.ix_(idx, idx)] = 1.0 / len(idx)
            try:
                factor = la.cho_factor(L + P)
            except la.LinAlgError as exc:
                raise SolverError(f"projection Laplacian not SPD: {exc}") from exc
            self._proj = (d0, M1, factor)
        return self._proj

    def exact_potential(self, c: Cochain) -> np.ndarray:
        """The degree-0 potential f with <delta f, delta g> = <c, delta g>."""
        d0, M1, factor = self._projection_factor()
        return la.cho_solve(factor, d0.T @ (M1 @ c.values))

    def project_coclosed(self, c: Cochain) -> Cochain:
        """Orthogonal projection onto ker delta*; removes the exact part."""
        if c.degree != 1:
            raise ValueError("projection is defined for 1-cochains")
        d0 = self.complex.coboundary_matrix(0)
        return Cochain(self.complex, 1, c.values - d0 @ self.exact_potential(c))


def toy_model(complex_):
    return InnerProductModel(complex_, "toy")


def whitney_model(complex_):
    return InnerProductModel(complex_, "whitney")


# ------------------------------------------------------------- decomposition

@dataclass
class HodgeDecomposition:
    exact: Cochain
    coexact: Cochain
    harmonic: Cochain

    def recombined(self) -> Cochain:
        return self.exact + self.coexact + self.harmonic


def hodge_decompose(model: InnerProductModel, c: Cochain) -> HodgeDecomposition:
    """Split a 1-cochain into exact, coexact, and harmonic parts."""
    if c.degree != 1:
        raise ValueError("decomposition implemented for 1-cochains")
    K = model.complex
    d0 = K.coboundary_matrix(0)
    exact = Cochain(K, 1, d0 @ model.exact_potential(c))
    B = K.coboundary_matrix(1).toarray().astype(float)
    # Solve (B M1^{-1} B^T) y = B c in the least-squares sense (singular PSD),
    # then the coexact part is M1^{-1} B^T y, i.e. the delta* image closest to c.
    Minv_Bt = np.column_stack([model.mass_solve(1, B.T[:, i])
                               for i in range(B.shape[0])])
    A = B @ Minv_Bt
    y, *_ = np.linalg.lstsq(A, B @ c.values, rcond=None)
    coexact = Cochain(K, 1, Minv_Bt @ y)
    harmonic = c - exact - coexact
    return HodgeDecomposition(exact=exact, coexact=coexact, harmonic=harmonic)


@dataclass
class HarmonicReport:
    basis: list
    eigenvalues: np.ndarray
    threshold: float
    spectral_gap: float


def harmonic_basis(model: InnerProductModel, k: int = 1,
                   zero_tol: float = 1e-9) -> HarmonicReport:
    """Orthonormal basis of ker delta cap ker delta* from the Hodge Laplacian.

    Eigenvalues below zero_tol times the largest one count as numerical
    zeros; the gap between accepted and rejected eigenvalues is reported.
    """
    K = model.complex
    n = K.n_simplices(k)
    S = np.zeros((n, n))
    if k < K.dim:
        dk = K.coboundary_matrix(k).toarray().astype(float)
        S += dk.T @ self_mass(model, k + 1) @ dk
    if k > 0:
        dkm = K.coboundary_matrix(k - 1).toarray().astype(float)
        lower = self_mass(model, k) @ dkm
        S += lower @ np.linalg.solve(self_mass(model, k - 1), lower.T)
    Mk = self_mass(model, k)
    vals, vecs = la.eigh(S, Mk)
    vals = np.clip(vals, 0.0, None)
    lam_max = vals[-1] if len(vals) else 0.0
    thresh = zero_tol * max(lam_max, 1e-300)
    accepted = vals < thresh
    dim = int(accepted.sum())
    if 0 < dim < n:
        gap = vals[dim] / max(vals[dim - 1], vals[dim] * 1e-300, 1e-300)
    elif dim == 0 and n:
        gap = np.inf if vals[0] >= thresh else 0.0
    else:
        gap = np.inf
    basis = [Cochain(K, k, vecs[:, i].copy()) for i in range(dim)]
    return HarmonicReport(basis=basis, eigenvalues=vals, threshold=thresh,
                          spectral_gap=float(gap))


def self_mass(model, k):
    return model.mass(k).toarray().astype(float)
