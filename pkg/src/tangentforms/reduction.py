"""Reduced dynamics on the two phase spaces and their symplectic structure.

Phase space X carries (x, y, p) with p the Ostrogradski momenta; phase space
Y carries (x, p0, p1) with p0 = omegabar(t, x, y) and p1 = p.  The map
F(t, x, p0, p1) = (t, x, T(t, x, p0), p1), with T the inverse Legendre map,
relates them.  Every 3m x 3m matrix uses the basis order (x, y | p0, p | p1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import InversionError, NonDegeneracyError
from .form import FormJets, JetPoint, TangentForm, condition_number
from .variational import OstrogradskiPair, pair_from_jets, solve_regular


@dataclass(frozen=True, eq=False)
class PhaseStateX:
    t: float
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.y, self.p])

    @classmethod
    def from_vector(cls, t: float, v: np.ndarray) -> "PhaseStateX":
        m = len(v) // 3
        return cls(t, v[:m], v[m : 2 * m], v[2 * m :])


@dataclass(frozen=True, eq=False)
class PhaseStateY:
    t: float
    x: np.ndarray
    p0: np.ndarray
    p1: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.p0, self.p1])

    @classmethod
    def from_vector(cls, t: float, v: np.ndarray) -> "PhaseStateY":
        m = len(v) // 3
        return cls(t, v[:m], v[m : 2 * m], v[2 * m :])


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Antisymmetric [[A, B, I], [-B^T, C, 0], [-I, 0, 0]]."""

    matrix: np.ndarray

    @classmethod
    def assemble(cls, A: np.ndarray, B: np.ndarray, C: np.ndarray) -> "SymplecticMatrix":
        m = A.shape[0]
        eye, zero = np.eye(m), np.zeros((m, m))
        return cls(np.block([[A, B, eye], [-B.T, C, zero], [-eye, zero, zero]]))

    @property
    def m(self) -> int:
        return self.matrix.shape[0] // 3

    def block(self, i: int, j: int) -> np.ndarray:
        m = self.m
        return self.matrix[i * m : (i + 1) * m, j * m : (j + 1) * m]

    @property
    def A(self) -> np.ndarray:
        return self.block(0, 0)

    @property
    def B(self) -> np.ndarray:
        return self.block(0, 1)

    @property
    def C(self) -> np.ndarray:
        return self.block(1, 1)


# phase space X ---------------------------------------------------------------


def phase_lift(form: TangentForm, p: JetPoint) -> PhaseStateX:
    """(t, x, y, Phibar(t, x, y, z))."""
    p.require(2)
    J = form.jets(p.t, p.x, p.y)
    return PhaseStateX(p.t, p.x.copy(), p.y.copy(), pair_from_jets(J, p.y, p.z).Phi_dy)


def acceleration_from_momentum(
    J: FormJets, y: np.ndarray, p: np.ndarray, tol: Tolerances = DEFAULT
) -> np.ndarray:
    """The z with Phibar(t, x, y, z) = p.  Phibar is affine in z with slope -h."""
    phibar0 = pair_from_jets(J, y, np.zeros(J.m)).Phi_dy
    return solve_regular(J.h, phibar0 - p, tol)


def x_field(form: TangentForm, s: PhaseStateX, tol: Tolerances = DEFAULT) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    J = form.jets(s.t, s.x, s.y)
    S = acceleration_from_momentum(J, s.y, s.p, tol)
    return s.y.copy(), S, pair_from_jets(J, s.y, S).Phi_dx


def symplectic_prime(form: TangentForm, s: PhaseStateX) -> SymplecticMatrix:
    J = form.jets(s.t, s.x, s.y)
    X, Y = J.X, J.Y
    Wx, Wy, Bx, By = J.Gw[:, X], J.Gw[:, Y], J.Gb[:, X], J.Gb[:, Y]
    return SymplecticMatrix.assemble(Wx - Wx.T, Wy - Bx.T, By - By.T)


def hamiltonian_H(form: TangentForm, s: PhaseStateX) -> float:
    """-p.y + omega0."""
    w0, _, _ = form.values(s.t, s.x, s.y)
    return -float(s.p @ s.y) + w0


def hamiltonian_gradient(form: TangentForm, s: PhaseStateX) -> np.ndarray:
    """dH over (x, y, p)."""
    J = form.jets(s.t, s.x, s.y)
    return np.concatenate([J.g0[J.X], J.g0[J.Y] - s.p, -s.y])


def time_derivative_correction(form: TangentForm, s: PhaseStateX) -> np.ndarray:
    """(d omega_i/dt, d omegabar_i/dt, 0)."""
    J = form.jets(s.t, s.x, s.y)
    return np.concatenate([J.Gw[:, 0], J.Gb[:, 0], np.zeros(form.m)])


def hamiltonian_check(
    form: TangentForm, s: PhaseStateX, time_correction: bool = True, tol: Tolerances = DEFAULT
) -> float:
    """sup-norm of Xi'.X - dH + d_t(omega~); the last term is dropped on request."""
    X = np.concatenate(x_field(form, s, tol))
    lhs = symplectic_prime(form, s).matrix @ X
    r = lhs - hamiltonian_gradient(form, s)
    if time_correction:
        r = r + time_derivative_correction(form, s)
    return float(np.abs(r).max())


# Legendre map and phase space Y -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class LegendreInverse:
    """y = T(t, x, p0) together with its implicit derivatives."""

    y: np.ndarray
    N: np.ndarray
    T_p: np.ndarray
    T_x: np.ndarray
    T_t: np.ndarray
    jets: FormJets
    iterations: int


def legendre_invert(
    form: TangentForm, t: float, x, p0, guess=None, tol: Tolerances = DEFAULT
) -> LegendreInverse:
    """Damped Newton solve of omegabar(t, x, y) = p0 for y, starting at ``guess`` (default p0)."""
    x = np.asarray(x, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    y = p0.copy() if guess is None else np.array(guess, dtype=float)
    scale = max(1.0, float(np.abs(p0).max(initial=0.0)))

    def state(y):
        J = form.jets(t, x, y)
        return J, J.vb - p0

    J, r = state(y)
    res = float(np.abs(r).max())
    for it in range(tol.newton_maxiter + 1):
        N = J.N
        cond = condition_number(N)
        if not cond < tol.cond_max:
            raise NonDegeneracyError(cond)
        if res < tol.newton_tol * scale:
            return _inverse_with_derivatives(J, y, it)
        if it == tol.newton_maxiter:
            break
        step = np.linalg.solve(N, r)
        lam = 1.0
        while True:
            y_new = y - lam * step
            J_new, r_new = state(y_new)
            res_new = float(np.abs(r_new).max())
            if res_new < res or lam < 1e-4:
                break
            lam *= 0.5
        y, J, r, res = y_new, J_new, r_new, res_new
    raise InversionError(res, tol.newton_maxiter)


def _inverse_with_derivatives(J: FormJets, y: np.ndarray, iterations: int) -> LegendreInverse:
    N = J.N
    T_p = np.linalg.inv(N)
    return LegendreInverse(
        y=y,
        N=N,
        T_p=T_p,
        T_x=-T_p @ J.Gb[:, J.X],
        T_t=-T_p @ J.Gb[:, 0],
        jets=J,
        iterations=iterations,
    )


def legendre_chart(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> PhaseStateX:
    """F(s) = (t, x, T(t, x, p0), p1)."""
    inv = legendre_invert(form, s.t, s.x, s.p0, guess, tol)
    return PhaseStateX(s.t, s.x.copy(), inv.y, s.p1.copy())


def to_phase_y(form: TangentForm, s: PhaseStateX) -> PhaseStateY:
    """Inverse of :func:`legendre_chart`: p0 = omegabar(t, x, y)."""
    _, _, wb = form.values(s.t, s.x, s.y)
    return PhaseStateY(s.t, s.x.copy(), wb, s.p.copy())


def y_field_parts(
    form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT
) -> tuple[tuple[np.ndarray, np.ndarray, np.ndarray], LegendreInverse, np.ndarray]:
    inv = legendre_invert(form, s.t, s.x, s.p0, guess, tol)
    J, y = inv.jets, inv.y
    z = acceleration_from_momentum(J, y, s.p1, tol)
    pair: OstrogradskiPair = pair_from_jets(J, y, z)
    return (y.copy(), pair.Omega_dx - s.p1, pair.Phi_dx), inv, z


def y_field(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT):
    """(x', p0', p1') = (T, Omega - p1, Phi) evaluated at y = T and the matching z."""
    field, _, _ = y_field_parts(form, s, guess, tol)
    return field


def pushforward_y(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """F_* Y at F(s) as a vector over (x, y, p); compare with x_field there."""
    (dx, dp0, dp1), inv, _ = y_field_parts(form, s, guess, tol)
    dy = inv.T_t + inv.T_x @ dx + inv.T_p @ dp0
    return np.concatenate([dx, dy, dp1])


def hamiltonian_Hprime(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> float:
    """-p1.T + omega0(t, x, T)."""
    inv = legendre_invert(form, s.t, s.x, s.p0, guess, tol)
    return -float(s.p1 @ inv.y) + inv.jets.v0


def hamiltonian_Hprime_gradient(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """dH' over (x, p0, p1)."""
    inv = legendre_invert(form, s.t, s.x, s.p0, guess, tol)
    J = inv.jets
    g_y = J.g0[J.Y] - s.p1
    return np.concatenate([J.g0[J.X] + inv.T_x.T @ g_y, inv.T_p.T @ g_y, -inv.y])


def symplectic_doubleprime(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> SymplecticMatrix:
    """F^* Xi' in the basis (x, p0, p1)."""
    inv = legendre_invert(form, s.t, s.x, s.p0, guess, tol)
    J = inv.jets
    Wy = J.Gw[:, J.Y]
    Wt_x = J.Gw[:, J.X] + Wy @ inv.T_x
    Wt_p = Wy @ inv.T_p
    A = Wt_x - Wt_x.T
    B = Wt_p + inv.T_x.T
    C = inv.T_p.T - inv.T_p
    return SymplecticMatrix.assemble(A, B, C)


def coregular_matrix(form: TangentForm, t: float, x, p0, guess=None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """h~^{ij} = dT^i/dp_j - dT^j/dp_i."""
    T_p = legendre_invert(form, t, x, p0, guess, tol).T_p
    return T_p - T_p.T


def hamiltonian_check_y(form: TangentForm, s: PhaseStateY, guess=None, tol: Tolerances = DEFAULT) -> float:
    """sup-norm of Xi''.Y - dH' (time-independent forms)."""
    Y = np.concatenate(y_field(form, s, guess, tol))
    lhs = symplectic_doubleprime(form, s, guess, tol).matrix @ Y
    return float(np.abs(lhs - hamiltonian_Hprime_gradient(form, s, guess, tol)).max())
