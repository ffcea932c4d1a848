"""Euler-Lagrange residual, its h/f split, and the Ostrogradski construction.

All total derivatives are expanded by hand from the component jets.  Along a
curve u(t) = (t, x, y) has velocity v = (1, y, z) and acceleration
a = (0, z, w), so for any component g(t, x, y)

    dg/dt = grad(g) . v,      d2g/dt2 = v^T Hess(g) v + grad(g) . a.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import RegularityError
from .form import FormJets, JetPoint, TangentForm, condition_number


@dataclass(frozen=True, eq=False)
class ELSplit:
    h: np.ndarray
    f: np.ndarray


@dataclass(frozen=True, eq=False)
class OstrogradskiPair:
    Omega_dx: np.ndarray
    Omega_dy: np.ndarray
    Phi_dx: np.ndarray
    Phi_dy: np.ndarray


def solve_regular(h: np.ndarray, rhs: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solve h s = rhs, refusing matrices whose condition number reaches ``tol.cond_max``."""
    cond = condition_number(h)
    if not cond < tol.cond_max:
        raise RegularityError(cond)
    return np.linalg.solve(h, rhs)


def _velocity(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.concatenate(([1.0], y, z))


def _dL_dx(J: FormJets, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    X = J.X
    return J.g0[X] + J.Gw[:, X].T @ y + J.Gb[:, X].T @ z


def _omega_momentum(J: FormJets, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """dL/dy^i - omega_i."""
    Y = J.Y
    return J.g0[Y] + J.Gw[:, Y].T @ y + J.Gb[:, Y].T @ z


def residual_from_jets(J: FormJets, y: np.ndarray, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    Y = J.Y
    v = _velocity(y, z)
    acc = np.concatenate(([0.0], z, w))
    Hwv = J.Hw @ v
    Hbv = J.Hb @ v
    d_dLdy = (
        (J.H0 @ v)[Y]
        + Hwv[:, Y].T @ y
        + J.Gw[:, Y].T @ z
        + J.Gw @ v
        + Hbv[:, Y].T @ z
        + J.Gb[:, Y].T @ w
    )
    dd_omegabar = Hbv @ v + J.Gb @ acc
    return _dL_dx(J, y, z) - d_dLdy + dd_omegabar


def el_residual(form: TangentForm, p: JetPoint) -> np.ndarray:
    """E_i = dL/dx^i - d/dt dL/dy^i + d2/dt2 dL/dz^i for L = omega0 + omega.y + omegabar.z."""
    p.require(3)
    return residual_from_jets(form.jets(p.t, p.x, p.y), p.y, p.z, p.w)


def split_from_jets(J: FormJets, y: np.ndarray, z: np.ndarray) -> ELSplit:
    return ELSplit(J.h, residual_from_jets(J, y, z, np.zeros(J.m)))


def el_split(form: TangentForm, p: JetPoint) -> ELSplit:
    p.require(2)
    return split_from_jets(form.jets(p.t, p.x, p.y), p.y, p.z)


def third_order_semispray(form: TangentForm, p: JetPoint, tol: Tolerances = DEFAULT) -> np.ndarray:
    """The w solving h w + f = 0."""
    s = el_split(form, p)
    return solve_regular(s.h, -s.f, tol)


def pair_from_jets(J: FormJets, y: np.ndarray, z: np.ndarray) -> OstrogradskiPair:
    v = _velocity(y, z)
    Omega = _omega_momentum(J, y, z)
    return OstrogradskiPair(
        Omega_dx=Omega,
        Omega_dy=J.vb.copy(),
        Phi_dx=_dL_dx(J, y, z) - J.Gw @ v,
        Phi_dy=Omega - J.Gb @ v,
    )


def ostrogradski(form: TangentForm, p: JetPoint) -> OstrogradskiPair:
    p.require(2)
    return pair_from_jets(form.jets(p.t, p.x, p.y), p.y, p.z)


# covector fields and the Lagrange top derivative ------------------------------


@dataclass(frozen=True)
class CovectorField:
    """An m-covector depending on (t, x, y, ..., level ``order``).

    ``fn`` returns the values and the Jacobian with columns ordered
    (t, x, y, ...) up to level ``order``, i.e. ``1 + (order + 1) * m`` columns.
    """

    order: int
    fn: Callable[[JetPoint], tuple[np.ndarray, np.ndarray]]

    def __call__(self, p: JetPoint) -> tuple[np.ndarray, np.ndarray]:
        if self.order >= 2:
            p.require(self.order)
        return self.fn(p)


def lagrange_top_derivative(omega_dx: CovectorField, omega_dy: CovectorField, p: JetPoint) -> np.ndarray:
    """omega_i - d/dt omegabar_i, with d/dt expanded to one level above ``omega_dy``."""
    k = omega_dy.order
    if p.order < k + 1 or p.order < omega_dx.order:
        raise ValueError(f"need a jet point of order {max(k + 1, omega_dx.order)}, got {p.order}")
    values, _ = omega_dx(p)
    _, jac = omega_dy(p)
    v = np.concatenate([[1.0], *p.levels[1 : k + 2]])
    return values - jac @ v


def form_fields(form: TangentForm) -> tuple[CovectorField, CovectorField]:
    """The order-1 fields (omega_i) and (omegabar_i)."""

    def omega(p: JetPoint):
        J = form.jets(p.t, p.x, p.y)
        return J.vw, J.Gw

    def omegabar(p: JetPoint):
        J = form.jets(p.t, p.x, p.y)
        return J.vb, J.Gb

    return CovectorField(1, omega), CovectorField(1, omegabar)


def _total_derivative_jac(G: np.ndarray, H: np.ndarray, J: FormJets, v: np.ndarray):
    """Jacobian over (t,x,y) and over z of the functions G . v (one row per component)."""
    ju = H @ v
    ju[:, J.Y] += G[:, J.X]
    return ju, G[:, J.Y].copy()


def ostrogradski_fields(form: TangentForm) -> dict[str, CovectorField]:
    """Omega, Omegabar, Phi, Phibar as jet-evaluable fields for the top-derivative chain."""

    def pieces(p: JetPoint):
        J = form.jets(p.t, p.x, p.y)
        y, z = p.y, p.z
        v = _velocity(y, z)
        X, Y = J.X, J.Y
        # Omega_i = d_y_i omega0 + d_y_i omega_j y^j + d_y_i omegabar_j z^j
        om_u = J.H0[Y, :] + np.einsum("jia,j->ia", J.Hw[:, Y, :], y) + np.einsum("jia,j->ia", J.Hb[:, Y, :], z)
        om_u[:, Y] += J.Gw[:, Y].T
        om_z = J.Gb[:, Y].T
        # dL/dx_i with the same structure
        lx_u = J.H0[X, :] + np.einsum("jia,j->ia", J.Hw[:, X, :], y) + np.einsum("jia,j->ia", J.Hb[:, X, :], z)
        lx_u[:, Y] += J.Gw[:, X].T
        lx_z = J.Gb[:, X].T
        db_u, db_z = _total_derivative_jac(J.Gb, J.Hb, J, v)
        dw_u, dw_z = _total_derivative_jac(J.Gw, J.Hw, J, v)
        pair = pair_from_jets(J, y, z)
        return {
            "Omega_dx": (pair.Omega_dx, np.hstack([om_u, om_z])),
            "Phi_dy": (pair.Phi_dy, np.hstack([om_u - db_u, om_z - db_z])),
            "Phi_dx": (pair.Phi_dx, np.hstack([lx_u - dw_u, lx_z - dw_z])),
        }

    _, omegabar = form_fields(form)
    return {
        "Omega_dx": CovectorField(2, lambda p: pieces(p)["Omega_dx"]),
        "Omega_dy": omegabar,
        "Phi_dx": CovectorField(2, lambda p: pieces(p)["Phi_dx"]),
        "Phi_dy": CovectorField(2, lambda p: pieces(p)["Phi_dy"]),
    }
