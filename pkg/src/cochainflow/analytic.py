"""Closed-form smooth differential forms on the flat unit 2-torus.

Components are sympy expressions in x, y; the operators d, star, wedge and
the codifferential are symbolic, so the identities used by the experiment
oracles (d d = 0, exactness of particular nonlinear terms) can be verified
rather than assumed.
"""

from __future__ import annotations

import re

import numpy as np
import sympy as sym

x, y = sym.symbols("x y", real=True)
_TWO_PI = 2 * sym.pi


class FormError(ValueError):
    """Unsupported degree combination or malformed form expression."""


class AnalyticForm:
    """A smooth k-form on T^2: k=0 a function, k=1 (f dx + g dy), k=2 f dx^dy."""

    def __init__(self, degree, comps):
        if not 0 <= degree <= 2:
            raise FormError(f"degree {degree} out of range on a 2-torus")
        n_comps = {0: 1, 1: 2, 2: 1}[degree]
        comps = tuple(sym.sympify(c) for c in comps)
        if len(comps) != n_comps:
            raise FormError(f"degree {degree} needs {n_comps} components")
        self.degree = degree
        self.comps = comps
        self._fns = None

    # ---------------------------------------------------------------- algebra

    def __add__(self, other):
        if self.degree != other.degree:
            raise FormError("degree mismatch")
        return AnalyticForm(self.degree,
                            [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        return AnalyticForm(self.degree, [sym.sympify(scalar) * c for c in self.comps])

    __rmul__ = __mul__

    def d(self):
        if self.degree == 0:
            (f,) = self.comps
            return AnalyticForm(1, [sym.diff(f, x), sym.diff(f, y)])
        if self.degree == 1:
            f, g = self.comps
            return AnalyticForm(2, [sym.diff(g, x) - sym.diff(f, y)])
        raise FormError("d of a top-degree form on T^2")

    def star(self):
        if self.degree == 0:
            return AnalyticForm(2, self.comps)
        if self.degree == 2:
            return AnalyticForm(0, self.comps)
        f, g = self.comps
        return AnalyticForm(1, [-g, f])

    def codiff(self):
        """The L^2-adjoint of d; on a 2-manifold d* = -star d star in all degrees."""
        if self.degree == 0:
            return None
        return -1 * self.star().d().star()

    def wedge(self, other):
        j, k = self.degree, other.degree
        if j + k > 2:
            raise FormError("wedge degree overflow")
        if j == 0:
            return AnalyticForm(k, [self.comps[0] * c for c in other.comps])
        if k == 0:
            return AnalyticForm(j, [c * other.comps[0] for c in self.comps])
        f1, g1 = self.comps
        f2, g2 = other.comps
        return AnalyticForm(2, [f1 * g2 - g1 * f2])

    def simplify(self):
        return AnalyticForm(self.degree, [sym.simplify(c) for c in self.comps])

    def is_zero(self):
        return all(sym.simplify(c) == 0 for c in self.comps)

    def equals(self, other):
        return self.degree == other.degree and (self - other).is_zero()

    def mean_components(self):
        """Exact torus averages of the components (harmonic coefficients)."""
        return [sym.integrate(sym.integrate(c, (x, 0, 1)), (y, 0, 1))
                for c in self.comps]

    # --------------------------------------------------------------- numerics

    def evaluate(self, points):
        """Component arrays at points of shape (..., 2)."""
        if self._fns is None:
            self._fns = [sym.lambdify((x, y), c, modules="numpy") for c in self.comps]
        points = np.asarray(points, dtype=float)
        xs, ys = points[..., 0], points[..., 1]
        out = []
        for fn in self._fns:
            v = fn(xs, ys)
            out.append(np.broadcast_to(np.asarray(v, dtype=float), xs.shape))
        return out

    def __repr__(self):
        basis = {0: ["1"], 1: ["dx", "dy"], 2: ["dx^dy"]}[self.degree]
        terms = [f"({c})*{b}" for c, b in zip(self.comps, basis) if c != 0]
        return " + ".join(terms) if terms else "0"


def constant_form(degree, value=1):
    n_comps = {0: 1, 1: 2, 2: 1}[degree]
    if degree == 1:
        raise FormError("use dx_form/dy_form for constant 1-forms")
    return AnalyticForm(degree, [value] * n_comps)


def dx_form():
    return AnalyticForm(1, [1, 0])


def dy_form():
    return AnalyticForm(1, [0, 1])


def taylor_green_form():
    """cos(2 pi x) sin(2 pi y) dx - sin(2 pi x) cos(2 pi y) dy; divergence-free."""
    return AnalyticForm(1, [sym.cos(_TWO_PI * x) * sym.sin(_TWO_PI * y),
                            -sym.sin(_TWO_PI * x) * sym.cos(_TWO_PI * y)])


# ------------------------------------------------------------ smooth-side oracle

def nonlinear_transport_term(omega: AnalyticForm) -> AnalyticForm:
    """-star(omega ^ star d omega), the transport part of the momentum equation."""
    if omega.degree != 1:
        raise FormError("transport term is defined for 1-forms")
    return -1 * omega.wedge(omega.d().star()).star()


def verify_projected_drift(omega: AnalyticForm):
    """Check symbolically that the projected drift of ``omega`` is purely viscous.

    Requires: omega co-closed; the transport term exact (closed with zero
    harmonic averages), so the co-closed projection kills it.  Returns the
    1-form -d* d omega (the reference drift is nu times it).  Raises if any
    of the facts fail, so experiment references are verified, not assumed.
    """
    if not omega.codiff().is_zero():
        raise FormError("form is not co-closed")
    n = nonlinear_transport_term(omega)
    if not n.d().is_zero():
        raise FormError("transport term is not closed; no smooth reference available")
    if any(sym.simplify(m) != 0 for m in n.mean_components()):
        raise FormError("transport term has a harmonic part; projection does not kill it")
    return (-1 * omega.d().codiff()).simplify()


# ------------------------------------------------------------------ mini-parser

_TRIG = re.compile(r"^(sin|cos)\((.+)\)$")


def parse_form(text: str) -> AnalyticForm:
    """Parse the experiment mini-language: sums of `coef trig(2pi k x + ...) dxi`.

    Examples: "sin(2pi x) dy", "dx", "2 cos(2pi x) sin(2pi y) dx - dy",
    and the named form "taylor-green".
    """
    text = text.strip()
    if text in ("taylor-green", "taylor_green"):
        return taylor_green_form()
    # Split into signed terms at top-level +/-.
    terms, depth, cur, sign = [], 0, "", 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0:
            if cur.strip():
                terms.append((sign, cur.strip()))
            sign = 1 if ch == "+" else -1
            cur = ""
        else:
            cur += ch
    if cur.strip():
        terms.append((sign, cur.strip()))
    if not terms:
        raise FormError(f"empty form expression: {text!r}")

    degree = None
    comps = {0: [sym.Integer(0)], 1: [sym.Integer(0), sym.Integer(0)],
             2: [sym.Integer(0)]}
    parsed = []
    for sgn, term in terms:
        coef = sym.Integer(sgn)
        slot = None
        deg = 0
        for tok in _tokenize(term):
            if tok in ("dx", "dy"):
                if slot is not None or deg:
                    raise FormError(f"multiple differentials in term: {term!r}")
                deg, slot = 1, {"dx": 0, "dy": 1}[tok]
            elif tok == "dx^dy" or tok == "dxdy":
                deg, slot = 2, 0
            else:
                coef = coef * _parse_factor(tok)
        parsed.append((deg, slot if slot is not None else 0, coef))
    degs = {d for d, _, _ in parsed}
    if len(degs) != 1:
        raise FormError(f"mixed degrees in form expression: {text!r}")
    degree = degs.pop()
    for _, slot, coef in parsed:
        comps[degree][slot] = comps[degree][slot] + coef
    return AnalyticForm(degree, comps[degree])


def _tokenize(term):
    out, depth, cur = [], 0, ""
    for ch in term:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in " *" and depth == 0:
            if cur:
                out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        out.append(cur)
    return out


def _parse_factor(tok):
    m = _TRIG.match(tok)
    if m:
        fn = sym.sin if m.group(1) == "sin" else sym.cos
        return fn(_parse_linear(m.group(2)))
    try:
        return sym.Rational(tok) if "/" in tok or "." not in tok else sym.Float(tok)
    except (ValueError, TypeError) as exc:
        raise FormError(f"cannot parse factor {tok!r}") from exc


def _parse_linear(expr):
    # Normalize "2pi" and implicit products like "2pi x" / "4pi y".
    expr = re.sub(r"(\d+)\s*pi", r"(\1*pi)", expr)
    expr = re.sub(r"pi\s*([xy])", r"pi*\1", expr)
    expr = re.sub(r"\)\s*([xy])", r")*\1", expr)
    expr = re.sub(r"(\d)\s+([xy])", r"\1*\2", expr)
    try:
        return sym.sympify(expr, locals={"x": x, "y": y, "pi": sym.pi})
    except (sym.SympifyError, SyntaxError) as exc:
        raise FormError(f"cannot parse trig argument {expr!r}") from exc
