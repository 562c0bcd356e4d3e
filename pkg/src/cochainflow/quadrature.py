"""Gauss quadrature on reference simplices via the collapsed-square map."""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np


@lru_cache(maxsize=None)
def gauss_01(npts):
    x, w = np.polynomial.legendre.leggauss(npts)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def simplex_rule(m, degree):
    """Quadrature on the standard m-simplex, exact to (at least) ``degree``.

    Returns (bary, weights): barycentric points (P, m+1) and weights summing
    to 1/m!, the reference volume.
    """
    q = max(2, (int(degree) + 3) // 2 + 1)
    x, w = gauss_01(q)
    if m == 0:
        return np.array([[1.0]]), np.array([1.0])
    if m == 1:
        t = x[:, None]
        wt = w
    elif m == 2:
        u, v = np.meshgrid(x, x, indexing="ij")
        t1 = u.ravel()
        t2 = (v * (1 - u)).ravel()
        wt = np.outer(w, w).ravel() * (1 - u.ravel())
        t = np.column_stack([t1, t2])
    elif m == 3:
        u, v, s = np.meshgrid(x, x, x, indexing="ij")
        t1 = u.ravel()
        t2 = (v * (1 - u)).ravel()
        t3 = (s * (1 - u) * (1 - v)).ravel()
        wt = (np.outer(np.outer(w, w).ravel(), w).ravel()
              * ((1 - u) ** 2 * (1 - v)).ravel())
        t = np.column_stack([t1, t2, t3])
    else:
        raise ValueError(f"no simplex rule for dimension {m}")
    bary = np.column_stack([1.0 - t.sum(axis=1), t])
    assert abs(wt.sum() - 1.0 / factorial(m)) < 1e-12
    return bary, wt
