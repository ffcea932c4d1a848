"""One-dimensional theory, first-order semi-spray families and closedness criteria."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import jet
from .config import DEFAULT, Tolerances
from .errors import PreconditionError, QuadratureError, RegularityError, SamplingError
from .expr import Expr, compile_expr, free_vars, parse
from .form import JetPoint, TangentForm
from .reduction import acceleration_from_momentum
from .variational import pair_from_jets


def _require_basic_1d(form: TangentForm) -> None:
    if form.m != 1:
        raise PreconditionError(f"needs a one-dimensional form, got m={form.m}")
    if "y1" in form.free_vars():
        raise PreconditionError("form is not basic: some component depends on y1")


def el1d_residual(form: TangentForm, p: JetPoint) -> float:
    """2 wb_x z + wb_xx y^2 + 2 wb_xt y + (w0_x - w_t + wb_tt) for basic m = 1 forms."""
    _require_basic_1d(form)
    p.require(2)
    J = form.jets(p.t, p.x, p.y)
    y, z = p.y[0], p.z[0]
    Gb, Hb = J.Gb[0], J.Hb[0]
    return 2 * Gb[1] * z + Hb[1, 1] * y * y + 2 * Hb[1, 0] * y + (J.g0[1] - J.Gw[0, 0] + Hb[0, 0])


def _richardson(f: Callable[[float], float], h: float) -> float:
    """Central difference at 0 with one Richardson step (error O(h^4))."""
    d1 = (f(h) - f(-h)) / (2 * h)
    d2 = (f(h / 2) - f(-h / 2)) / h
    return (4 * d2 - d1) / 3


@dataclass(frozen=True)
class StandardLagrangian1D:
    """L = P y^2 / 2 + Q y + R for a basic regular one-dimensional form.

    P is anchored so that P(t, x_anchor) = wb_x(t, x_anchor); the inner
    integral of ``a`` uses fixed Gauss-Legendre nodes and R uses adaptive
    quadrature.
    """

    form: TangentForm
    Q: Expr
    x_anchor: float = 0.0
    nodes: int = 32
    fd_step: float = 1e-3

    @cached_property
    def _Q(self):
        return compile_expr(self.Q)

    @cached_property
    def _gauss(self) -> tuple[np.ndarray, np.ndarray]:
        return np.polynomial.legendre.leggauss(self.nodes)

    def _parts(self, t: float, x: float):
        J = self.form.jets(t, [x], [0.0])
        wb_x = J.Gb[0, 1]
        if not wb_x > 0:
            # P > 0 needs omegabar_x > 0 everywhere on the domain
            raise RegularityError(float("inf"))
        return J, wb_x

    def a(self, t: float, x: float) -> float:
        J, wb_x = self._parts(t, x)
        return J.Hb[0, 1, 1] / (2 * wb_x)

    def b(self, t: float, x: float) -> float:
        J, wb_x = self._parts(t, x)
        return J.Hb[0, 1, 0] / wb_x

    def c(self, t: float, x: float) -> float:
        J, wb_x = self._parts(t, x)
        return (J.g0[1] - J.Gw[0, 0] + J.Hb[0, 0, 0]) / (2 * wb_x)

    def P(self, t: float, x: float) -> float:
        x0 = self.x_anchor
        _, base = self._parts(t, x0)
        if x == x0:
            return base
        u, wts = self._gauss
        half = 0.5 * (x - x0)
        s = x0 + half * (u + 1.0)
        integral = half * sum(wi * self.a(t, si) for wi, si in zip(wts, s))
        return base * math.exp(2.0 * integral)

    def P_x(self, t: float, x: float) -> float:
        return 2.0 * self.a(t, x) * self.P(t, x)

    def P_t(self, t: float, x: float) -> float:
        return _richardson(lambda d: self.P(t + d, x), self.fd_step)

    def Q_jet(self, t: float, x: float) -> jet.Jet2:
        env = {"t": jet.seed(3, 0, t), "x1": jet.seed(3, 1, x), "y1": jet.seed(3, 2, 0.0)}
        return jet.as_jet(self._Q(env), 3)

    def R_x(self, t: float, x: float) -> float:
        return self.Q_jet(t, x).grad[0] - self.c(t, x) * self.P(t, x)

    def R(self, t: float, x: float) -> float:
        value, err = integrate.quad(lambda s: self.R_x(t, s), self.x_anchor, x, epsabs=1e-13, epsrel=1e-12, limit=200)
        if not np.isfinite(value) or err > 1e-8 * max(1.0, abs(value)):
            raise QuadratureError(f"quadrature for R failed (estimate {err:.3g})")
        return value

    def lagrangian(self, t: float, x: float, y: float) -> float:
        return 0.5 * self.P(t, x) * y * y + self.Q_jet(t, x).value * y + self.R(t, x)

    def el_residual(self, t: float, x: float, y: float, z: float) -> float:
        """2P z + P_x y^2 + 2P_t y + 2(Q_t - R_x)."""
        P = self.P(t, x)
        q_t = self.Q_jet(t, x).grad[0]
        return 2 * P * z + self.P_x(t, x) * y * y + 2 * self.P_t(t, x) * y + 2 * (q_t - self.R_x(t, x))

    def existence_defect(self, t: float, x: float) -> float:
        """b_x - 2 a_t, which must vanish for a standard description to exist."""
        h = self.fd_step
        b_x = _richardson(lambda d: self.b(t, x + d), h)
        a_t = _richardson(lambda d: self.a(t + d, x), h)
        return b_x - 2.0 * a_t


def standard_lagrangian_1d(
    form: TangentForm, Q: Expr | str = "0", x_anchor: float = 0.0, nodes: int = 32
) -> StandardLagrangian1D:
    _require_basic_1d(form)
    Qe = parse(Q, 1) if isinstance(Q, str) else Q
    if not free_vars(Qe) <= {"t", "x1"}:
        raise PreconditionError("Q may depend on (t, x1) only")
    return StandardLagrangian1D(form, Qe, float(x_anchor), nodes)


# antisymmetric affine fit ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AffineAntisymmetricFit:
    c: np.ndarray
    d: np.ndarray
    residual: float
    symmetric_defect: float

    def passes(self, tol: float = DEFAULT.fit_residual) -> bool:
        return self.residual <= tol


def antisym_affine_fit(omega_exprs: Sequence[Expr], samples: Sequence[Sequence[float]]) -> AffineAntisymmetricFit:
    """Least-squares omega_i(x) ~ c_ij x^j + d_i with c antisymmetric."""
    m = len(omega_exprs)
    xs = np.array(samples, dtype=float).reshape(len(samples), m)
    allowed = {f"x{i}" for i in range(1, m + 1)}
    for e in omega_exprs:
        if not free_vars(e) <= allowed:
            raise PreconditionError(f"expected functions of x only, got variables {sorted(free_vars(e))}")
    fns = [compile_expr(e) for e in omega_exprs]
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    n_unknown = len(pairs) + m
    rows, rhs = [], []
    values = np.empty((len(xs), m))
    defect = 0.0
    n = m
    for k, x in enumerate(xs):
        env_r = {f"x{i + 1}": x[i] for i in range(m)}
        env_j = {f"x{i + 1}": jet.seed(n, i, x[i]) for i in range(m)}
        grads = np.array([jet.as_jet(f(env_j), n).grad for f in fns])
        defect = max(defect, float(np.abs(grads + grads.T).max()))
        for i, f in enumerate(fns):
            values[k, i] = float(f(env_r))
            row = np.zeros(n_unknown)
            for q, (a, b) in enumerate(pairs):
                if a == i:
                    row[q] = x[b]
                elif b == i:
                    row[q] = -x[a]
            row[len(pairs) + i] = 1.0
            rows.append(row)
            rhs.append(values[k, i])
    A = np.array(rows)
    sol, _, rank, _ = np.linalg.lstsq(A, np.array(rhs), rcond=None)
    if rank < n_unknown:
        raise SamplingError(f"samples determine only {rank} of {n_unknown} coefficients")
    c = np.zeros((m, m))
    for q, (a, b) in enumerate(pairs):
        c[a, b] = sol[q]
    c = c - c.T
    d = sol[len(pairs) :]
    residual = float(np.abs(xs @ c.T + d - values).max())
    return AffineAntisymmetricFit(c, d, residual, defect)


# semi-spray families ---------------------------------------------------------------


@dataclass(frozen=True)
class SemiSprayFamily:
    """x'' = S(t, x, y) whose integral curves solve the Euler-Lagrange equation."""

    kind: str
    constants: np.ndarray
    evaluator: Callable[[float, np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, t: float, x, y) -> np.ndarray:
        return self.evaluator(t, np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def _only(form_exprs: Sequence[Expr], allowed: set[str]) -> bool:
    return all(free_vars(e) <= allowed for e in form_exprs)


def _ys(m: int) -> set[str]:
    return {f"y{i}" for i in range(1, m + 1)}


def _xs(m: int) -> set[str]:
    return {f"x{i}" for i in range(1, m + 1)}


def semispray_family_y_only(form: TangentForm, c, tol: Tolerances = DEFAULT) -> SemiSprayFamily:
    """Family from the first integral p + omega = c, valid when every component depends on y only."""
    if not _only(form.components(), _ys(form.m)):
        raise PreconditionError("every component must depend on y only")
    c = np.asarray(c, dtype=float).copy()

    def S(t, x, y):
        J = form.jets(t, x, y)
        return acceleration_from_momentum(J, y, c - J.vw, tol)

    return SemiSprayFamily("y_only", c, S)


def fit_samples(m: int, count: int | None = None, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (count or 3 * m + 3, m))


def linear_family_coefficients(form: TangentForm, tol: Tolerances = DEFAULT) -> AffineAntisymmetricFit:
    m = form.m
    if not (_only([form.omega0, *form.omegabar], _ys(m)) and _only(form.omega, _xs(m))):
        raise PreconditionError("need omega0, omegabar depending on y only and omega on x only")
    fit = antisym_affine_fit(form.omega, fit_samples(m))
    if fit.residual > tol.fit_residual or fit.symmetric_defect > tol.fit_residual:
        raise PreconditionError(
            f"omega is not affine antisymmetric (fit residual {fit.residual:.3g}, "
            f"symmetric part {fit.symmetric_defect:.3g})"
        )
    return fit


def semispray_family_linear(form: TangentForm, e, tol: Tolerances = DEFAULT) -> SemiSprayFamily:
    """Family from the momentum integral p = -2 c x + e."""
    c = linear_family_coefficients(form, tol).c
    e = np.asarray(e, dtype=float).copy()

    def S(t, x, y):
        J = form.jets(t, x, y)
        return acceleration_from_momentum(J, y, -2.0 * c @ x + e, tol)

    return SemiSprayFamily("linear", e, S)


def family_from_initial_jet(form: TangentForm, kind: str, p: JetPoint, tol: Tolerances = DEFAULT) -> SemiSprayFamily:
    """Pick the family member through the initial data (t, x, y, z) of a third-order solution."""
    p.require(2)
    J = form.jets(p.t, p.x, p.y)
    momentum = pair_from_jets(J, p.y, p.z).Phi_dy
    if kind == "y_only":
        return semispray_family_y_only(form, momentum + J.vw, tol)
    if kind == "linear":
        c = linear_family_coefficients(form, tol).c
        return semispray_family_linear(form, momentum + 2.0 * c @ p.x, tol)
    raise ValueError(f"unknown family kind {kind!r}")


# closedness criteria ----------------------------------------------------------------


def exterior_derivative(mu: TangentForm, t: float, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Components K[a, b] of d(mu) on (t, x, y) and their derivatives dK[a, b, c]."""
    J = mu.jets(t, x, y)
    G = np.vstack([J.g0[None, :], J.Gw, J.Gb])
    H = np.concatenate([J.H0[None], J.Hw, J.Hb])
    K = G.T - G
    dK = np.transpose(H, (1, 0, 2)) - H
    return K, dK


CRITERIA = ("y_dependent", "constant_xx", "constant_mixed")


def criterion_check(
    mu: TangentForm, which: str, samples: Sequence[JetPoint], tol: Tolerances = DEFAULT
) -> tuple[bool, float]:
    """Test a pattern of d(mu) on the samples.

    ``y_dependent``: d(mu) has no dt^dx or dx^dx part and its components depend on y only.
    ``constant_xx``: only the dx^dx and dy^dy parts survive, dx^dx with constant
    coefficients and dy^dy depending on y only.
    ``constant_mixed``: no dx^dx or dx^dy part, dy^dy depends on y only, and the
    dt^dx, dt^dy coefficients f, g satisfy df_j/dy^i = dg_i/dx^j = const.
    """
    if which not in CRITERIA:
        raise ValueError(f"unknown criterion {which!r}; expected one of {', '.join(CRITERIA)}")
    if not samples:
        raise ValueError("need samples")
    m = mu.m
    T, X, Y = [0], list(range(1, m + 1)), list(range(m + 1, 2 * m + 1))
    TX = T + X
    worst = 0.0
    constant_blocks: list[np.ndarray] = []

    def vanish(block: np.ndarray):
        nonlocal worst
        if block.size:
            worst = max(worst, float(np.abs(block).max()))

    for p in samples:
        K, dK = exterior_derivative(mu, p.t, p.x, p.y)
        if which == "y_dependent":
            vanish(K[np.ix_(T, X)])
            vanish(K[np.ix_(X, X)])
            vanish(dK[:, :, TX])
        elif which == "constant_xx":
            vanish(K[np.ix_(X, T)])
            vanish(K[np.ix_(Y, T)])
            vanish(K[np.ix_(X, Y)])
            vanish(dK[np.ix_(Y, Y, TX)])
            constant_blocks.append(K[np.ix_(X, X)])
        else:
            vanish(K[np.ix_(X, X)])
            vanish(K[np.ix_(X, Y)])
            vanish(dK[np.ix_(Y, Y, TX)])
            # f_j = K[x_j, t], g_i = K[y_i, t]; need df_j/dy^i = dg_i/dx^j constant
            F = dK[np.ix_(X, T, Y)][:, 0, :].T
            G = dK[np.ix_(Y, T, X)][:, 0, :]
            vanish(F - G)
            constant_blocks.append(F)
    if constant_blocks:
        stack = np.array(constant_blocks)
        worst = max(worst, float((stack.max(axis=0) - stack.min(axis=0)).max()))
    return worst <= tol.constancy_atol, worst
