"""Exact polynomial differential forms in barycentric coordinates.

A polynomial is a dict mapping exponent multi-indices over the m+1
barycentric coordinates of an m-simplex to rational coefficients.  A form
is a dict mapping increasing wedge index tuples (subsets of 0..m, allowing
the redundant d mu_0) to polynomials.  Everything here is exact rational
arithmetic; numeric evaluation happens only at the boundary of the module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

import numpy as np


# ----------------------------------------------------------------- polynomials

def poly_const(c, nvars):
    c = Fraction(c)
    return {} if c == 0 else {(0,) * nvars: c}


def poly_var(i, nvars):
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): Fraction(1)}


def poly_add(p, q):
    out = dict(p)
    for a, c in q.items():
        s = out.get(a, Fraction(0)) + c
        if s:
            out[a] = s
        elif a in out:
            del out[a]
    return out


def poly_scale(p, c):
    c = Fraction(c)
    if c == 0:
        return {}
    return {a: v * c for a, v in p.items()}


def poly_mul(p, q):
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            e = tuple(x + y for x, y in zip(a, b))
            s = out.get(e, Fraction(0)) + ca * cb
            if s:
                out[e] = s
            elif e in out:
                del out[e]
    return out


def poly_diff(p, i):
    out = {}
    for a, c in p.items():
        if a[i]:
            e = list(a)
            e[i] -= 1
            out[tuple(e)] = out.get(tuple(e), Fraction(0)) + c * a[i]
    return {a: c for a, c in out.items() if c}


def poly_moment_integral(p, m):
    """Exact integral of p over the standard m-simplex in dt_1..dt_m measure.

    Uses int mu^alpha dt = alpha! / (|alpha| + m)!.
    """
    total = Fraction(0)
    for a, c in p.items():
        num = 1
        for ai in a:
            num *= factorial(ai)
        total += c * Fraction(num, factorial(sum(a) + m))
    return total


def poly_eval(p, mus):
    """Evaluate at an array of barycentric points, shape (..., m+1)."""
    mus = np.asarray(mus, dtype=float)
    out = np.zeros(mus.shape[:-1])
    for a, c in p.items():
        term = float(c) * np.ones(mus.shape[:-1])
        for i, ai in enumerate(a):
            if ai:
                term = term * mus[..., i] ** ai
        out = out + term
    return out


# ----------------------------------------------------------------------- forms

def _sort_wedge(idx):
    """Sort a wedge index sequence; returns (sign, tuple) or (0, None) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def form_add(f, g):
    out = dict(f)
    for I, p in g.items():
        out[I] = poly_add(out.get(I, {}), p)
        if not out[I]:
            del out[I]
    return out


def form_scale(f, c):
    if Fraction(c) == 0:
        return {}
    return {I: poly_scale(p, c) for I, p in f.items()}


def form_wedge(f, g):
    out = {}
    for I, p in f.items():
        for J, q in g.items():
            sign, K = _sort_wedge(I + J)
            if sign == 0:
                continue
            term = poly_scale(poly_mul(p, q), sign)
            out[K] = poly_add(out.get(K, {}), term)
            if not out[K]:
                del out[K]
    return out


def form_d(f, nvars):
    out = {}
    for I, p in f.items():
        for i in range(nvars):
            dp = poly_diff(p, i)
            if not dp:
                continue
            sign, K = _sort_wedge((i,) + I)
            if sign == 0:
                continue
            out[K] = poly_add(out.get(K, {}), poly_scale(dp, sign))
            if not out[K]:
                del out[K]
    return out


def form_eliminate_zero(f, nvars):
    """Substitute d mu_0 = -sum d mu_i, leaving wedges over indices 1..m only."""
    out = {}
    for I, p in f.items():
        if 0 not in I:
            out[I] = poly_add(out.get(I, {}), p)
            continue
        rest = tuple(i for i in I if i != 0)
        for j in range(1, nvars):
            sign, K = _sort_wedge((j,) + rest)
            if sign == 0:
                continue
            term = poly_scale(p, -sign)
            out[K] = poly_add(out.get(K, {}), term)
            if K in out and not out[K]:
                del out[K]
    return {I: p for I, p in out.items() if p}


def form_restrict(f, positions, nvars):
    """Pull a form on an m-simplex back to the face spanned by ``positions``.

    Barycentric coordinates of absent vertices restrict to zero, as do their
    differentials; surviving indices are renumbered to face-local positions.
    """
    pos = list(positions)
    where = {p: i for i, p in enumerate(pos)}
    out = {}
    for I, p in f.items():
        if any(i not in where for i in I):
            continue
        q = {}
        for a, c in p.items():
            if any(a[i] for i in range(nvars) if i not in where):
                continue
            e = tuple(a[v] for v in pos)
            q[e] = q.get(e, Fraction(0)) + c
        q = {a: c for a, c in q.items() if c}
        if not q:
            continue
        J = tuple(where[i] for i in I)  # positions increasing => J increasing
        out[J] = poly_add(out.get(J, {}), q)
    return {I: p for I, p in out.items() if p}


def poly_subst_zero(p, nvars):
    """Substitute mu_0 = 1 - sum mu_i, eliminating the redundant variable."""
    out = {}
    one_minus = poly_const(1, nvars)
    for i in range(1, nvars):
        one_minus = poly_add(one_minus, poly_scale(poly_var(i, nvars), -1))
    for a, c in p.items():
        base = {(0,) * nvars: Fraction(1)}
        for _ in range(a[0]):
            base = poly_mul(base, one_minus)
        rest = (0,) + a[1:]
        term = poly_scale(poly_mul(base, {rest: Fraction(1)}), c)
        out = poly_add(out, term)
    return out


def form_canonical(f, nvars):
    """Unique representative: no index 0 in wedges, no mu_0 in coefficients."""
    red = form_eliminate_zero(f, nvars)
    out = {}
    for I, p in red.items():
        q = poly_subst_zero(p, nvars)
        if q:
            out[I] = q
    return out


def form_equal(f, g, nvars):
    cf = form_canonical(f, nvars)
    cg = form_canonical(g, nvars)
    return cf == cg


def form_is_zero(f, nvars):
    return not form_canonical(f, nvars)


def form_integrate_top(f, m):
    """Exact integral of an m-form over the standard oriented m-simplex."""
    if m == 0:
        p = f.get((), {})
        # A 0-form on a point: value at the point (mu_0 = 1).
        return sum((c for a, c in p.items()), Fraction(0))
    red = form_eliminate_zero(f, m + 1)
    p = red.get(tuple(range(1, m + 1)), {})
    return poly_moment_integral(p, m)


# ------------------------------------------------------------- whitney basis

@lru_cache(maxsize=None)
def whitney_local(m, positions):
    """The Whitney form of the elementary cochain on face ``positions`` of an
    m-simplex: j! * sum_i (-1)^i mu_{p_i} d mu_{p_0} ^ ... omit i ... ^ d mu_{p_j}.
    """
    positions = tuple(positions)
    j = len(positions) - 1
    nvars = m + 1
    out = {}
    pref = Fraction(factorial(j))
    for i, pi in enumerate(positions):
        I = tuple(p for p in positions if p != pi)
        coef = pref * ((-1) ** i)
        term = {I: poly_scale(poly_var(pi, nvars), coef)}
        out = form_add(out, term)
    return out


@lru_cache(maxsize=None)
def whitney_mass_coefficients(n, k):
    """Coefficient tensor for exact Whitney mass blocks on an n-simplex.

    Returns (faces, wedges, T) where ``faces`` lists local k-faces, ``wedges``
    lists wedge index tuples, and T[f1, f2, a, b] is the exact reference
    integral (in the dV/vol measure, i.e. times n!) of the polynomial
    coefficient product, so that the local mass block is
    vol * sum_{a,b} T[f1, f2, a, b] * det(G[wedges[a], wedges[b]]).
    """
    faces = list(combinations(range(n + 1), k + 1))
    wedges = sorted({I for f in faces for I in whitney_local(n, f)})
    widx = {I: a for a, I in enumerate(wedges)}
    T = np.zeros((len(faces), len(faces), len(wedges), len(wedges)))
    for f1, pa in enumerate(faces):
        wa = whitney_local(n, pa)
        for f2, pb in enumerate(faces):
            wb = whitney_local(n, pb)
            for I, p in wa.items():
                for J, q in wb.items():
                    # int_sigma p q dV = vol * n! * moment integral
                    val = poly_moment_integral(poly_mul(p, q), n) * factorial(n)
                    T[f1, f2, widx[I], widx[J]] += float(val)
    return faces, wedges, T
