"""Mesh-refinement convergence experiments on the flat torus.

Each study runs over a sequence of torus resolutions, records an error or a
weak pairing gap per mesh, and fits a log-log slope against the mesh size.
Smooth-side references are verified symbolically before use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sym

from .analytic import AnalyticForm, verify_projected_drift, x, y
from .cochains import Cochain, cup
from .complexes import build_flat_torus
from .flow import euler_orthogonality_defect, flow_vector, steady_residual
from .hodge import whitney_model
from .whitney import de_rham_map, l2_distance, l2_pairing


@dataclass
class RefinementStudy:
    kind: str
    resolutions: list
    etas: list
    errors: list
    slope: float = float("nan")
    intercept: float = float("nan")

    def fit(self):
        if len(self.resolutions) < 3:
            raise ValueError("a refinement study needs at least 3 meshes")
        if any(b >= a for a, b in zip(self.etas, self.etas[1:])):
            raise ValueError("mesh sizes must be strictly decreasing")
        errs = np.asarray(self.errors, dtype=float)
        if np.any(errs <= 0):
            self.slope, self.intercept = float("inf"), float("-inf")
            return self
        coef = np.polyfit(np.log(self.etas), np.log(errs), 1)
        self.slope, self.intercept = float(coef[0]), float(coef[1])
        return self


@dataclass
class WeakConvergenceReport:
    resolutions: list
    test_form_ids: list
    discrete: dict      # (resolution, test id) -> pairing
    reference: dict     # test id -> mesh-independent pairing
    gaps: dict          # (resolution, test id) -> |discrete - reference|


def _torus_sequence(resolutions):
    res = sorted(set(int(r) for r in resolutions))
    for r in res:
        K = build_flat_torus(r, 2)
        yield r, K, K.mesh_quality().eta


def converge_wr(omega: AnalyticForm, resolutions,
                quadrature_degree=8) -> RefinementStudy:
    """Error ||W R omega - omega||_{L^2} across a torus refinement sequence."""
    _startup_checks(omega)
    study = RefinementStudy("wr", [], [], [])
    for r, K, eta in _torus_sequence(resolutions):
        c = de_rham_map(omega, K, quadrature_degree=quadrature_degree)
        err = l2_distance(c, omega, K, quadrature_degree=quadrature_degree)
        study.resolutions.append(r)
        study.etas.append(eta)
        study.errors.append(err)
    return study.fit()


def converge_cup(omega1: AnalyticForm, omega2: AnalyticForm, resolutions,
                 quadrature_degree=8) -> RefinementStudy:
    """Error ||W(R omega1 cup R omega2) - omega1 ^ omega2||_{L^2} per mesh."""
    _startup_checks(omega1)
    _startup_checks(omega2)
    if omega1.degree + omega2.degree > 2:
        raise ValueError("cup study degrees overflow the torus dimension")
    target = omega1.wedge(omega2)
    study = RefinementStudy("cup", [], [], [])
    for r, K, eta in _torus_sequence(resolutions):
        c1 = de_rham_map(omega1, K, quadrature_degree=quadrature_degree)
        c2 = de_rham_map(omega2, K, quadrature_degree=quadrature_degree)
        cc = cup(c1, c2)
        err = l2_distance(cc, target, K, quadrature_degree=quadrature_degree)
        study.resolutions.append(r)
        study.etas.append(eta)
        study.errors.append(err)
    return study.fit()


def analytic_l2_pairing(a: AnalyticForm, b: AnalyticForm):
    """Exact L^2 pairing of two analytic forms over the unit torus."""
    if a.degree != b.degree:
        raise ValueError("degree mismatch")
    total = sym.Integer(0)
    for ca, cb in zip(a.comps, b.comps):
        total += sym.integrate(sym.integrate(ca * cb, (x, 0, 1)), (y, 0, 1))
    return float(total)


def converge_weak_flow(omega: AnalyticForm, nu, test_forms, resolutions,
                       quadrature_degree=8) -> WeakConvergenceReport:
    """Weak pairings of the discrete drift against test forms, vs the smooth drift.

    The smooth reference pi(T_nu omega) = -nu d* d omega is admitted only
    after the symbolic oracle verifies that the transport term is exact.
    """
    ref_drift = float(nu) * verify_projected_drift(omega)
    ids = [f"test{i}" for i in range(len(test_forms))]
    reference = {tid: analytic_l2_pairing(ref_drift, eta)
                 for tid, eta in zip(ids, test_forms)}
    report = WeakConvergenceReport(resolutions=[], test_form_ids=ids,
                                   discrete={}, reference=reference, gaps={})
    for r, K, _eta in _torus_sequence(resolutions):
        model = whitney_model(K)
        c = de_rham_map(omega, K, quadrature_degree=quadrature_degree)
        drift = flow_vector(model, c, float(nu))
        report.resolutions.append(r)
        for tid, eta_form in zip(ids, test_forms):
            val = l2_pairing(drift, eta_form, K, quadrature_degree=quadrature_degree)
            report.discrete[(r, tid)] = val
            report.gaps[(r, tid)] = abs(val - reference[tid])
    return report


@dataclass
class SteadyScanReport:
    resolutions: list
    residuals: list
    euler_defects: list
    pairings: dict     # (resolution, test id) -> weak pairing of the drift
    test_form_ids: list


def steady_state_scan(omega: AnalyticForm, nu, resolutions,
                      test_forms=(), quadrature_degree=8) -> SteadyScanReport:
    """Steady residual of R omega per mesh, with a weak-pairing battery."""
    _startup_checks(omega)
    ids = [f"test{i}" for i in range(len(test_forms))]
    report = SteadyScanReport([], [], [], {}, ids)
    for r, K, _eta in _torus_sequence(resolutions):
        model = whitney_model(K)
        c = de_rham_map(omega, K, quadrature_degree=quadrature_degree)
        report.resolutions.append(r)
        report.residuals.append(steady_residual(model, c, float(nu)))
        defect = euler_orthogonality_defect(model, c) if nu == 0 else float("nan")
        report.euler_defects.append(defect)
        drift = flow_vector(model, c, float(nu))
        for tid, eta_form in zip(ids, test_forms):
            report.pairings[(r, tid)] = l2_pairing(drift, eta_form, K,
                                                   quadrature_degree=quadrature_degree)
    return report


def _startup_checks(form: AnalyticForm):
    # d of d vanishes symbolically for the forms we accept; never assumed.
    if form.degree == 0:
        dd = form.d().d()
        if not dd.is_zero():
            raise AssertionError("symbolic d d != 0; broken form algebra")
    if form.degree >= 1:
        star2 = form.star().star()
        expect = form if form.degree != 1 else (-1) * form
        if not star2.equals(expect):
            raise AssertionError("symbolic star star identity failed")
