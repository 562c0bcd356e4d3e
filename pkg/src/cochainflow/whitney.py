"""The Whitney map, the integration (de Rham) map, and L^2 machinery.

Whitney forms of cochains are stored exactly, as rational piecewise
polynomials in barycentric coordinates per top simplex.  Mass matrices are
assembled from exact barycentric moments and per-simplex Gram matrices;
quadrature enters only when analytic (trigonometric) integrands do.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np
import scipy.sparse as sp

from . import polyform as pf
from .analytic import AnalyticForm
from .cochains import Cochain
from .complexes import MeshError, SimplicialComplex
from .quadrature import simplex_rule


class QuadratureError(RuntimeError):
    """Order-doubling convergence check failed for an analytic integrand."""


DEFAULT_QUADRATURE_DEGREE = 8


class PiecewisePolyForm:
    """A piecewise polynomial k-form: one exact rational form per top simplex."""

    def __init__(self, complex_, degree, pieces):
        complex_.require_embedded()
        self.complex = complex_
        self.degree = degree
        self.pieces = pieces  # list of {wedge index tuple: polynomial}

    @classmethod
    def zero(cls, complex_, degree):
        return cls(complex_, degree, [{} for _ in range(complex_.n_simplices(complex_.dim))])

    def __add__(self, other):
        _check_same(self, other)
        return PiecewisePolyForm(self.complex, self.degree,
                                 [pf.form_add(a, b) for a, b in zip(self.pieces, other.pieces)])

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        c = Fraction(scalar)
        return PiecewisePolyForm(self.complex, self.degree,
                                 [pf.form_scale(p, c) for p in self.pieces])

    __rmul__ = __mul__

    def wedge(self, other):
        if self.complex is not other.complex:
            raise MeshError("forms live on different complexes")
        if self.degree + other.degree > self.complex.dim:
            raise MeshError("wedge degree overflow")
        return PiecewisePolyForm(self.complex, self.degree + other.degree,
                                 [pf.form_wedge(a, b) for a, b in zip(self.pieces, other.pieces)])

    def d(self):
        nvars = self.complex.dim + 1
        return PiecewisePolyForm(self.complex, self.degree + 1,
                                 [pf.form_d(p, nvars) for p in self.pieces])

    def evaluate_proxy(self, bary):
        """Euclidean component arrays at reference points, per top simplex.

        Components are taken against the orthonormal coordinate k-form basis,
        listed in lexicographic order of coordinate subsets; shape (N, P, C).
        """
        K = self.complex
        n, d, k = K.dim, K.embed_dim, self.degree
        grads = K.top_grads
        csubs = list(combinations(range(d), k))
        P = len(bary)
        out = np.zeros((K.n_simplices(n), P, len(csubs)))
        for s, piece in enumerate(self.pieces):
            for I, p in piece.items():
                vals = pf.poly_eval(p, bary)  # (P,)
                gi = grads[s][list(I), :]  # (k, d)
                for ci, C in enumerate(csubs):
                    det = np.linalg.det(gi[:, list(C)]) if k else 1.0
                    out[s, :, ci] += vals * det
        return out


def _check_same(a, b):
    if a.complex is not b.complex or a.degree != b.degree:
        raise MeshError("form degree/complex mismatch")


# ------------------------------------------------------------------- W and R

def whitney_map(c: Cochain) -> PiecewisePolyForm:
    """Linear extension of the elementary Whitney formula, per top simplex."""
    K = c.complex
    K.require_embedded()
    n, k = K.dim, c.degree
    table, combs = K.faces_of_top(k)
    pieces = []
    for s in range(K.n_simplices(n)):
        piece = {}
        for j, pos in enumerate(combs):
            v = c.values[table[s, j]]
            if v == 0:
                continue
            piece = pf.form_add(piece, pf.form_scale(pf.whitney_local(n, pos), Fraction(v)))
        pieces.append(piece)
    return PiecewisePolyForm(K, k, pieces)


def de_rham_map(form, complex_=None, quadrature_degree=DEFAULT_QUADRATURE_DEGREE,
                check=True) -> Cochain:
    """Integrate a form over every simplex of its degree.

    Piecewise polynomial forms are integrated exactly; analytic forms by
    Gauss quadrature with an order-doubling convergence check.
    """
    if isinstance(form, PiecewisePolyForm):
        vals = de_rham_exact(form)
        return Cochain(form.complex, form.degree, np.array([float(v) for v in vals]))
    if complex_ is None:
        raise MeshError("analytic integration needs a target complex")
    vals = _integrate_analytic(form, complex_, quadrature_degree)
    if check:
        vals2 = _integrate_analytic(form, complex_, 2 * quadrature_degree)
        scale = max(1e-30, float(np.abs(vals2).max()))
        if np.abs(vals - vals2).max() > 1e-8 * max(1.0, scale):
            raise QuadratureError("quadrature order insufficient for this form")
        vals = vals2
    return Cochain(complex_, form.degree, vals)


def de_rham_exact(form: PiecewisePolyForm):
    """Exact rational integrals of a piecewise polynomial form, per k-simplex."""
    K = form.complex
    k = K.dim if form.degree > K.dim else form.degree
    refs = K.top_reference(form.degree)
    out = []
    nvars = K.dim + 1
    for f in range(K.n_simplices(form.degree)):
        top, pos = refs[f]
        restricted = pf.form_restrict(form.pieces[top], pos, nvars)
        out.append(pf.form_integrate_top(restricted, form.degree))
    return out


def _integrate_analytic(form: AnalyticForm, complex_, degree):
    k = form.degree
    if complex_.embed_dim != 2:
        raise MeshError("analytic forms are defined on the 2-torus")
    coords = complex_.simplex_coords[k]  # (N, k+1, 2)
    if k == 0:
        comps = form.evaluate(coords[:, 0, :])
        return comps[0].copy()
    bary, w = simplex_rule(k, degree)
    pts = np.einsum("pi,nid->npd", bary, coords)  # (N, P, 2)
    comps = form.evaluate(pts)  # list over coordinate subsets
    E = coords[:, 1:, :] - coords[:, :1, :]  # (N, k, 2)
    csubs = list(combinations(range(2), k))
    out = np.zeros(len(coords))
    for ci, C in enumerate(csubs):
        sub = E[:, :, list(C)]  # (N, k, k)
        det = np.linalg.det(sub) if k > 1 else sub[:, 0, 0]
        out += (comps[ci] * w[None, :]).sum(axis=1) * det * factorial(k)
    return out


# -------------------------------------------------------------- mass matrices

def whitney_mass_matrix(complex_, k):
    """Exact-assembly SPD Gram matrix of the degree-k Whitney forms."""
    complex_.require_embedded()
    n = complex_.dim
    if not 0 <= k <= n:
        raise MeshError(f"degree {k} out of range")
    faces, wedges, T = pf.whitney_mass_coefficients(n, k)
    gram = complex_.top_gram
    vols = complex_.top_volumes
    minors = np.empty((len(vols), len(wedges), len(wedges)))
    for a, I in enumerate(wedges):
        for b, J in enumerate(wedges):
            sub = gram[:, list(I), :][:, :, list(J)]
            minors[:, a, b] = np.linalg.det(sub) if k else 1.0
    blocks = np.einsum("fgab,nab->nfg", T, minors) * vols[:, None, None]
    table, _ = complex_.faces_of_top(k)
    F = len(faces)
    rows = np.repeat(table, F, axis=1).ravel()
    cols = np.tile(table, (1, F)).ravel()
    N = complex_.n_simplices(k)
    mat = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(N, N)).tocsr()
    mat.sum_duplicates()
    return mat


def whitney_mass_matrix_quadrature(complex_, k, degree=DEFAULT_QUADRATURE_DEGREE):
    """Quadrature-assembled mass matrix; the independent oracle for the exact path."""
    complex_.require_embedded()
    n = complex_.dim
    bary, w = simplex_rule(n, degree)
    basis = _whitney_basis_proxy(complex_, k, bary)  # (N, F, P, C)
    vols = complex_.top_volumes
    scale = factorial(n) * vols  # maps reference dt weights to physical dV
    blocks = np.einsum("nfpc,ngpc,p->nfg", basis, basis, w) * scale[:, None, None]
    table, _ = complex_.faces_of_top(k)
    F = table.shape[1]
    rows = np.repeat(table, F, axis=1).ravel()
    cols = np.tile(table, (1, F)).ravel()
    N = complex_.n_simplices(k)
    mat = sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(N, N)).tocsr()
    mat.sum_duplicates()
    return mat


def _whitney_basis_proxy(complex_, k, bary):
    """Component arrays (N_top, F, P, C) of the local Whitney k-basis."""
    n, d = complex_.dim, complex_.embed_dim
    grads = complex_.top_grads
    csubs = list(combinations(range(d), k))
    faces = list(combinations(range(n + 1), k + 1))
    P = len(bary)
    N = complex_.n_simplices(n)
    out = np.zeros((N, len(faces), P, len(csubs)))
    for f, pos in enumerate(faces):
        for I, p in pf.whitney_local(n, pos).items():
            vals = pf.poly_eval(p, bary)  # (P,)
            if k == 0:
                out[:, f, :, 0] += vals[None, :]
                continue
            gi = grads[:, list(I), :]  # (N, k, d)
            for ci, C in enumerate(csubs):
                det = np.linalg.det(gi[:, :, list(C)]) if k > 1 else gi[:, 0, C[0]]
                out[:, f, :, ci] += det[:, None] * vals[None, :]
    return out


def whitney_cochain_proxy(complex_, cochain, bary):
    """Fast evaluation of W(cochain) at reference points: (N_top, P, C)."""
    basis = _whitney_basis_proxy(complex_, cochain.degree, bary)
    table, _ = complex_.faces_of_top(cochain.degree)
    coef = cochain.values[table]  # (N, F)
    return np.einsum("nf,nfpc->npc", coef, basis)


# ------------------------------------------------------------- L^2 computation

def _proxy_at(obj, complex_, bary, pts):
    if isinstance(obj, Cochain):
        return whitney_cochain_proxy(complex_, obj, bary)
    if isinstance(obj, PiecewisePolyForm):
        return obj.evaluate_proxy(bary)
    if isinstance(obj, AnalyticForm):
        comps = obj.evaluate(pts)
        return np.stack(comps, axis=-1)
    raise TypeError(f"unsupported form object: {type(obj)!r}")


def _l2_accumulate(a, b, complex_, degree, mode):
    n = complex_.dim
    bary, w = simplex_rule(n, degree)
    coords = complex_.simplex_coords[n]
    pts = np.einsum("pi,nid->npd", bary, coords)
    pa = _proxy_at(a, complex_, bary, pts)
    pb = _proxy_at(b, complex_, bary, pts)
    scale = factorial(n) * complex_.top_volumes
    if mode == "distance":
        integ = ((pa - pb) ** 2).sum(axis=2)
    else:
        integ = (pa * pb).sum(axis=2)
    return float(((integ * w[None, :]).sum(axis=1) * scale).sum())


def l2_pairing(a, b, complex_, quadrature_degree=DEFAULT_QUADRATURE_DEGREE, check=True):
    """L^2 inner product of two k-forms (cochains stand for their Whitney forms)."""
    v = _l2_accumulate(a, b, complex_, quadrature_degree, "pairing")
    if check:
        v2 = _l2_accumulate(a, b, complex_, 2 * quadrature_degree, "pairing")
        if abs(v - v2) > 1e-8 * max(1.0, abs(v2)):
            raise QuadratureError("quadrature order insufficient in L^2 pairing")
        v = v2
    return v


def l2_distance(a, b, complex_=None, quadrature_degree=DEFAULT_QUADRATURE_DEGREE,
                check=True):
    """L^2 norm of the difference of two k-forms over the embedded complex."""
    if complex_ is None:
        for obj in (a, b):
            if isinstance(obj, (PiecewisePolyForm, Cochain)):
                complex_ = obj.complex
                break
    if complex_ is None:
        raise MeshError("l2_distance between analytic forms needs a complex")
    v = _l2_accumulate(a, b, complex_, quadrature_degree, "distance")
    if check:
        v2 = _l2_accumulate(a, b, complex_, 2 * quadrature_degree, "distance")
        if abs(v - v2) > 1e-8 * max(1.0, abs(v2)):
            raise QuadratureError("quadrature order insufficient in L^2 distance")
        v = v2
    return float(np.sqrt(max(v, 0.0)))
