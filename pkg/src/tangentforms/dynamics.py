"""Fixed-step RK4 integration of the third-order, phase-X and phase-Y flows."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NumericError
from .form import TangentForm
from .reduction import PhaseStateX, PhaseStateY, legendre_invert, x_field, y_field_parts
from .special import SemiSprayFamily
from .variational import residual_from_jets, solve_regular, split_from_jets

FORMULATIONS = ("third_order", "x_flow", "y_flow")
MAX_STEPS = 10_000_000


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on the uniform grid t0 + k*dt.

    Each row is (x, y, z) for third_order, (x, y, p) for x_flow, (x, p0, p1)
    for y_flow, and (x, y) for a first-order family.
    """

    formulation: str
    t0: float
    dt: float
    states: np.ndarray
    m: int

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.states))

    @property
    def x(self) -> np.ndarray:
        return self.states[:, : self.m]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _grid(t0: float, t1: float, dt: float) -> tuple[int, float]:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    span = t1 - t0
    if span / dt > MAX_STEPS:
        raise ValueError(f"{span / dt:.3g} steps exceed the limit of {MAX_STEPS}")
    if span == 0:
        return 0, dt
    # round up, tolerating dt that divides the span up to roundoff
    n = max(1, math.ceil(span / dt - 1e-9))
    return n, span / n


def rk4(
    rhs: Callable[[float, np.ndarray], np.ndarray], t0: float, state0, t1: float, dt: float
) -> tuple[float, np.ndarray]:
    """Classic RK4; returns the actual step and the (n + 1, d) state array."""
    n, h = _grid(t0, t1, dt)
    states = np.empty((n + 1, len(state0)))
    states[0] = state0
    u = states[0].copy()
    for k in range(n):
        t = t0 + k * h
        try:
            k1 = rhs(t, u)
            k2 = rhs(t + h / 2, u + h / 2 * k1)
            k3 = rhs(t + h / 2, u + h / 2 * k2)
            k4 = rhs(t + h, u + h * k3)
        except NumericError as exc:
            exc.t = t
            raise
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise NumericError("state left the finite range", t=t + h)
        states[k + 1] = u
    return h, states


def _third_order_rhs(form: TangentForm, tol: Tolerances):
    m = form.m

    def rhs(t, u):
        x, y, z = u[:m], u[m : 2 * m], u[2 * m :]
        s = split_from_jets(form.jets(t, x, y), y, z)
        return np.concatenate([y, z, solve_regular(s.h, -s.f, tol)])

    return rhs


def _x_flow_rhs(form: TangentForm, tol: Tolerances):
    def rhs(t, u):
        return np.concatenate(x_field(form, PhaseStateX.from_vector(t, u), tol))

    return rhs


def _y_flow_rhs(form: TangentForm, tol: Tolerances):
    last_y: list[np.ndarray | None] = [None]

    def rhs(t, u):
        field, inv, _ = y_field_parts(form, PhaseStateY.from_vector(t, u), last_y[0], tol)
        last_y[0] = inv.y
        return np.concatenate(field)

    return rhs


_RHS = {"third_order": _third_order_rhs, "x_flow": _x_flow_rhs, "y_flow": _y_flow_rhs}


def integrate(
    form: TangentForm,
    formulation: str,
    t0: float,
    state0,
    t1: float,
    dt: float,
    tol: Tolerances = DEFAULT,
) -> Trajectory:
    """Integrate from t0 to t1.  The step is shrunk to divide t1 - t0 evenly."""
    if formulation not in _RHS:
        raise ValueError(f"unknown formulation {formulation!r}; expected one of {FORMULATIONS}")
    m = form.m
    state0 = np.asarray(state0, dtype=float)
    if state0.shape != (3 * m,):
        raise ValueError(f"initial state must have {3 * m} entries, got {state0.shape}")
    h, states = rk4(_RHS[formulation](form, tol), t0, state0, t1, dt)
    return Trajectory(formulation, float(t0), h, states, m)


def integrate_family(family: SemiSprayFamily, t0: float, x0, y0, t1: float, dt: float) -> Trajectory:
    """Integral curve of x'' = S(t, x, y)."""
    x0, y0 = np.asarray(x0, dtype=float), np.asarray(y0, dtype=float)
    m = len(x0)

    def rhs(t, u):
        return np.concatenate([u[m:], family(t, u[:m], u[m:])])

    h, states = rk4(rhs, t0, np.concatenate([x0, y0]), t1, dt)
    return Trajectory(f"family_{family.kind}", float(t0), h, states, m)


def phase_y_initial(form: TangentForm, t0: float, x, y, p) -> np.ndarray:
    """(x, p0, p1) = (x, omegabar(t0, x, y), p), the phase-Y state matching an X state."""
    _, _, wb = form.values(t0, x, y)
    return np.concatenate([np.asarray(x, float), wb, np.asarray(p, float)])


def to_phase_x(form: TangentForm, traj: Trajectory, tol: Tolerances = DEFAULT) -> Trajectory:
    """Map a y_flow trajectory node-wise through the Legendre chart."""
    if traj.formulation != "y_flow":
        raise ValueError("expected a y_flow trajectory")
    m = traj.m
    out = np.empty_like(traj.states)
    guess = None
    for k, (t, u) in enumerate(zip(traj.times, traj.states)):
        inv = legendre_invert(form, t, u[:m], u[m : 2 * m], guess, tol)
        guess = inv.y
        out[k] = np.concatenate([u[:m], inv.y, u[2 * m :]])
    return Trajectory("x_flow", traj.t0, traj.dt, out, m)


def project_and_compare(a: Trajectory, b: Trajectory) -> float:
    """Max over nodes of the sup-norm distance between the x blocks."""
    if a.m != b.m or len(a.states) != len(b.states) or a.t0 != b.t0 or not math.isclose(a.dt, b.dt, rel_tol=1e-12):
        raise ValueError("trajectories live on different grids")
    return float(np.abs(a.x - b.x).max())


def residual_along(form: TangentForm, traj: Trajectory) -> float:
    """Max |E| at interior nodes with w taken from central differences of z."""
    if traj.formulation != "third_order":
        raise ValueError("residual_along needs a third_order trajectory")
    m = traj.m
    if len(traj.states) < 3:
        raise ValueError("need at least three nodes")
    worst = 0.0
    zs = traj.states[:, 2 * m :]
    for k in range(1, len(traj.states) - 1):
        u = traj.states[k]
        x, y, z = u[:m], u[m : 2 * m], u[2 * m :]
        w = (zs[k + 1] - zs[k - 1]) / (2 * traj.dt)
        E = residual_from_jets(form.jets(traj.times[k], x, y), y, z, w)
        worst = max(worst, float(np.abs(E).max()))
    return worst

