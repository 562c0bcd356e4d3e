"""The nonlinear drift operator and the projected flow on co-closed 1-cochains.

The drift T_nu(c) is the Riesz representative of
b -> <delta c, c cup b> - nu <delta c, delta b>; the flow is its projection
onto ker delta*.  Time stepping is explicit (RK4 by default); since every
stage velocity lies in the linear subspace ker delta*, the iterate stays
co-closed up to roundoff, and periodic reprojection removes the drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cochains import Cochain, cup_right_multiplication_matrix, get_cup_table
from .hodge import InnerProductModel


class FlowBlowupError(RuntimeError):
    """Non-finite state encountered; carries the last valid state."""

    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


@dataclass
class FlowParams:
    nu: float = 0.0
    dt: float = 1e-3
    t_final: float = 1.0
    integrator: str = "rk4"
    reproject_every: int = 1
    stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.nu < 0:
            raise ValueError("viscosity must be non-negative")
        if self.reproject_every < 1:
            raise ValueError("reprojection period must be >= 1")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator: {self.integrator}")


@dataclass
class FlowState:
    t: float
    c: Cochain


@dataclass
class Diagnostics:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    vorticity_sq: list = field(default_factory=list)
    steady_residual: list = field(default_factory=list)
    coclosed_residual: list = field(default_factory=list)

    def record(self, model, state, nu):
        c = state.c
        dc = Cochain(c.complex, 2, c.complex.coboundary_matrix(1) @ c.values)
        self.times.append(state.t)
        self.energy.append(model.inner(c, c))
        self.vorticity_sq.append(model.inner(dc, dc))
        self.steady_residual.append(steady_residual(model, c, nu))
        dstar = model.adjoint_coboundary_apply(0, c.values)
        m0 = model.mass(0)
        self.coclosed_residual.append(float(np.sqrt(max(dstar @ (m0 @ dstar), 0.0))))


def default_dt(complex_, nu):
    """Heuristic stability bound: 0.1 h^2 / max(nu, h) for the shortest edge h."""
    e = complex_.simplex_coords[1]
    h = float(np.linalg.norm(e[:, 1] - e[:, 0], axis=1).min())
    return 0.1 * h * h / max(nu, h)


def apply_T_nu(model: InnerProductModel, c: Cochain, nu: float) -> Cochain:
    """The unique 1-cochain pairing as <T,b> = <dc, c cup b> - nu <dc, db>."""
    if c.degree != 1:
        raise ValueError("drift is defined for 1-cochains")
    K = c.complex
    d1 = K.coboundary_matrix(1)
    dc = d1 @ c.values
    m2dc = model.mass(2) @ dc
    L_c = cup_right_multiplication_matrix(c)
    rhs = L_c.T @ m2dc - nu * (d1.T @ m2dc)
    return Cochain(K, 1, model.mass_solve(1, rhs))


def flow_vector(model: InnerProductModel, c: Cochain, nu: float) -> Cochain:
    """The time derivative of the flow: the co-closed projection of the drift."""
    return model.project_coclosed(apply_T_nu(model, c, nu))


def steady_residual(model: InnerProductModel, c: Cochain, nu: float) -> float:
    """Norm of the projected drift; zero at steady states."""
    return model.norm(flow_vector(model, c, nu))


def euler_orthogonality_defect(model: InnerProductModel, c: Cochain) -> float:
    """Norm of the projection of the vorticity onto im(L_c).

    The inviscid steady-state criterion: the drift vanishes exactly when the
    vorticity is orthogonal to the image of cupping with c.
    """
    K = c.complex
    dc = K.coboundary_matrix(1) @ c.values
    L = cup_right_multiplication_matrix(c).toarray()
    M2 = model.mass(2).toarray()
    # Orthogonal projection of dc onto the column span of L in the M2 metric.
    A = L.T @ M2 @ L
    b = L.T @ M2 @ dc
    y, *_ = np.linalg.lstsq(A, b, rcond=None)
    proj = L @ y
    return float(np.sqrt(max(proj @ (M2 @ proj), 0.0)))


def step(model: InnerProductModel, state: FlowState, params: FlowParams,
         step_index: int = 0) -> FlowState:
    """One explicit step of dc/dt = pi(T_nu(c)), with periodic reprojection."""
    c, dt = state.c, params.dt

    def F(vals):
        if not np.all(np.isfinite(vals)):
            raise FlowBlowupError(
                f"non-finite stage value at t={state.t:g}; the time step is "
                f"too large", state)
        T = apply_T_nu(model, Cochain(c.complex, 1, vals), params.nu)
        if not np.all(np.isfinite(T.values)):
            raise FlowBlowupError(
                f"drift overflow at t={state.t:g}; the time step is too "
                f"large", state)
        return model.project_coclosed(T).values

    v = c.values
    if params.integrator == "euler":
        new = v + dt * F(v)
    else:
        k1 = F(v)
        k2 = F(v + 0.5 * dt * k1)
        k3 = F(v + 0.5 * dt * k2)
        k4 = F(v + dt * k3)
        new = v + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(new)):
        raise FlowBlowupError(
            f"non-finite state at t={state.t + dt:g}; the exact flow cannot blow "
            f"up, so the time step is too large", state)
    out = Cochain(c.complex, 1, new)
    if (step_index + 1) % params.reproject_every == 0:
        out = model.project_coclosed(out)
    return FlowState(t=state.t + dt, c=out)


def run(model: InnerProductModel, initial: Cochain, params: FlowParams,
        record_states: bool = False):
    """Integrate to t_final; the initial cochain is projected co-closed first.

    Returns (final_state, diagnostics[, states]): diagnostics rows at the
    configured stride, and optionally the recorded (t, values) trajectory.
    """
    state = FlowState(t=0.0, c=model.project_coclosed(initial))
    diags = Diagnostics()
    diags.record(model, state, params.nu)
    states = [(state.t, state.c.values.copy())] if record_states else None
    n_steps = int(round(params.t_final / params.dt))
    for i in range(n_steps):
        state = step(model, state, params, step_index=i)
        if (i + 1) % params.stride == 0 or i == n_steps - 1:
            diags.record(model, state, params.nu)
            if record_states:
                states.append((state.t, state.c.values.copy()))
    if record_states:
        return state, diags, states
    return state, diags
