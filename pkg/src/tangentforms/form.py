"""Tangent forms, their Lagrangian and action, and pointwise classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import jet
from .config import DEFAULT, Tolerances
from .errors import DomainError, PreconditionError
from .expr import Binary, Expr, Unary, Var, compile_expr, free_vars, parse, to_text
from .jet import VarSet


def condition_number(a: np.ndarray) -> float:
    """2-norm condition number, ``inf`` for exactly singular matrices."""
    s = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    if s[-1] == 0.0 or not np.isfinite(s).all():
        return float("inf")
    return float(s[0] / s[-1])


def _vec(v, m: int | None, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(-1)
    if m is not None and arr.size != m:
        raise ValueError(f"{name} must have {m} entries, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class JetPoint:
    """A point (t, x, y, z, w) with y = x', z = x'', w = x'''; z and w optional."""

    t: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray | None = None
    w: np.ndarray | None = None

    def __post_init__(self):
        x = _vec(self.x, None, "x")
        m = x.size
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", _vec(self.y, m, "y"))
        if self.w is not None and self.z is None:
            raise ValueError("w given without z")
        if self.z is not None:
            object.__setattr__(self, "z", _vec(self.z, m, "z"))
        if self.w is not None:
            object.__setattr__(self, "w", _vec(self.w, m, "w"))

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def order(self) -> int:
        """Highest derivative level carried (1 for (x,y), 2 with z, 3 with w)."""
        return 1 + (self.z is not None) + (self.w is not None)

    @property
    def levels(self) -> list[np.ndarray]:
        return [lv for lv in (self.x, self.y, self.z, self.w) if lv is not None]

    def require(self, order: int) -> None:
        if self.order < order:
            level = ("z", "w")[order - 2]
            raise ValueError(f"jet point of order {self.order} lacks level {level!r}")

    def with_w(self, w) -> "JetPoint":
        return JetPoint(self.t, self.x, self.y, self.z, w)

    @classmethod
    def from_vector(cls, m: int, values: Sequence[float]) -> "JetPoint":
        """Parse ``t, x.., y.. [, z.. [, w..]]``."""
        v = [float(c) for c in values]
        if len(v) < 1 + 2 * m or (len(v) - 1) % m or len(v) > 1 + 4 * m:
            raise ValueError(f"expected 1 + k*{m} numbers with k in 2..4, got {len(v)}")
        chunks = [v[1 + i * m : 1 + (i + 1) * m] for i in range((len(v) - 1) // m)]
        return cls(v[0], *chunks)


@dataclass(frozen=True, eq=False)
class FormJets:
    """Values, gradients and Hessians of all components at one (t, x, y)."""

    m: int
    v0: float
    g0: np.ndarray
    H0: np.ndarray
    vw: np.ndarray
    Gw: np.ndarray
    Hw: np.ndarray
    vb: np.ndarray
    Gb: np.ndarray
    Hb: np.ndarray

    @property
    def X(self) -> slice:
        return slice(1, self.m + 1)

    @property
    def Y(self) -> slice:
        return slice(self.m + 1, 2 * self.m + 1)

    @property
    def N(self) -> np.ndarray:
        """Vertical Jacobian: N[i, j] = d omegabar_i / d y^j."""
        return self.Gb[:, self.Y]

    @property
    def h(self) -> np.ndarray:
        N = self.N
        return N - N.T


def _as_expr(e: Expr | str, m: int) -> Expr:
    return parse(e, m) if isinstance(e, str) else e


@dataclass(frozen=True)
class TangentForm:
    """omega0 dt + omega_i dx^i + omegabar_i dy^i in a single chart."""

    m: int
    omega0: Expr
    omega: tuple[Expr, ...]
    omegabar: tuple[Expr, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "omega", tuple(self.omega))
        object.__setattr__(self, "omegabar", tuple(self.omegabar))
        if len(self.omega) != self.m or len(self.omegabar) != self.m:
            raise ValueError(
                f"dimension {self.m} needs {self.m} omega and omegabar components, "
                f"got {len(self.omega)} and {len(self.omegabar)}"
            )
        allowed = set(self.varset.labels)
        stray = self.free_vars() - allowed
        if stray:
            raise ValueError(f"variables outside the chart: {sorted(stray)}")

    @classmethod
    def from_text(
        cls,
        m: int,
        omega0: Expr | str = "0",
        omega: Sequence[Expr | str] | None = None,
        omegabar: Sequence[Expr | str] | None = None,
        name: str | None = None,
    ) -> "TangentForm":
        omega = ["0"] * m if omega is None else list(omega)
        omegabar = ["0"] * m if omegabar is None else list(omegabar)
        if len(omega) != m or len(omegabar) != m:
            raise ValueError(f"dimension {m} needs {m} omega and omegabar components")
        return cls(
            m,
            _as_expr(omega0, m),
            tuple(_as_expr(e, m) for e in omega),
            tuple(_as_expr(e, m) for e in omegabar),
            name,
        )

    @property
    def varset(self) -> VarSet:
        return VarSet.for_dimension(self.m)

    def components(self) -> tuple[Expr, ...]:
        return (self.omega0, *self.omega, *self.omegabar)

    def free_vars(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for e in self.components():
            out |= free_vars(e)
        return out

    def texts(self) -> dict:
        return {
            "omega0": to_text(self.omega0),
            "omega": [to_text(e) for e in self.omega],
            "omegabar": [to_text(e) for e in self.omegabar],
        }

    @cached_property
    def _compiled(self) -> list[Callable]:
        return [compile_expr(e) for e in self.components()]

    def _env_real(self, t: float, x, y) -> dict:
        labels = self.varset.labels
        return dict(zip(labels, [float(t), *map(float, x), *map(float, y)]))

    def values(self, t: float, x, y) -> tuple[float, np.ndarray, np.ndarray]:
        env = self._env_real(t, x, y)
        out = [float(f(env)) for f in self._compiled]
        m = self.m
        return out[0], np.array(out[1 : m + 1]), np.array(out[m + 1 :])

    def jets(self, t: float, x, y) -> FormJets:
        m = self.m
        n = 2 * m + 1
        labels = self.varset.labels
        point = [float(t), *map(float, x), *map(float, y)]
        env = {lab: jet.seed(n, i, v) for i, (lab, v) in enumerate(zip(labels, point))}
        outs = [jet.as_jet(f(env), n) for f in self._compiled]
        vals = np.array([o.value for o in outs])
        grads = np.array([o.grad for o in outs])
        hess = np.array([o.hess for o in outs])
        w, b = slice(1, m + 1), slice(m + 1, 2 * m + 1)
        return FormJets(m, vals[0], grads[0], hess[0], vals[w], grads[w], hess[w], vals[b], grads[b], hess[b])

    def is_time_independent(self) -> bool:
        return "t" not in self.free_vars()

    def negate(self) -> "TangentForm":
        def neg(e: Expr) -> Expr:
            return e.child if isinstance(e, Unary) else Unary("neg", e)

        return TangentForm(
            self.m, neg(self.omega0), tuple(map(neg, self.omega)), tuple(map(neg, self.omegabar)), self.name
        )


def add_exact(form: TangentForm, dt: Expr, dx: Sequence[Expr], dy: Sequence[Expr]) -> TangentForm:
    """``form + dF`` given the partial derivatives of F as expressions."""
    return TangentForm(
        form.m,
        Binary("add", form.omega0, dt),
        tuple(Binary("add", a, b) for a, b in zip(form.omega, dx)),
        tuple(Binary("add", a, b) for a, b in zip(form.omegabar, dy)),
        form.name,
    )


def add_g_element(form: TangentForm, a: Sequence[Expr]) -> TangentForm:
    """``form + a_i (dx^i - y^i dt)``."""
    contraction: Expr = Binary("mul", a[0], Var("y1"))
    for i in range(1, form.m):
        contraction = Binary("add", contraction, Binary("mul", a[i], Var(f"y{i + 1}")))
    return TangentForm(
        form.m,
        Binary("sub", form.omega0, contraction),
        tuple(Binary("add", w, ai) for w, ai in zip(form.omega, a)),
        form.omegabar,
        form.name,
    )


# Lagrangian and action ---------------------------------------------------


def lagrangian(form: TangentForm, p: JetPoint) -> float:
    """omega0 + omega_i y^i + omegabar_i z^i at the jet point."""
    p.require(2)
    w0, w, wb = form.values(p.t, p.x, p.y)
    return w0 + float(w @ p.y) + float(wb @ p.z)


@dataclass(frozen=True, eq=False)
class Curve:
    """Uniform samples x(t_k), k = 0..N, of a curve in R^m."""

    t0: float
    t1: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if not self.t0 < self.t1:
            raise ValueError("need t0 < t1")
        if s.shape[0] < 5:
            raise ValueError("a curve needs at least 5 samples (N >= 4)")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, f: Callable[[float], Sequence[float]], t0: float, t1: float, N: int) -> "Curve":
        ts = np.linspace(t0, t1, N + 1)
        return cls(t0, t1, np.array([f(t) for t in ts], dtype=float))

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def m(self) -> int:
        return self.samples.shape[1]

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.N

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.N + 1)

    def derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        """Second-order accurate first and second derivatives at every node."""
        return finite_difference_derivatives(self.samples, self.dt)


def finite_difference_derivatives(x: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    d1 = np.empty_like(x)
    d2 = np.empty_like(x)
    d1[1:-1] = (x[2:] - x[:-2]) / (2 * h)
    d1[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * h)
    d1[-1] = (3 * x[-1] - 4 * x[-2] + x[-3]) / (2 * h)
    d2[1:-1] = (x[2:] - 2 * x[1:-1] + x[:-2]) / (h * h)
    d2[0] = (2 * x[0] - 5 * x[1] + 4 * x[2] - x[3]) / (h * h)
    d2[-1] = (2 * x[-1] - 5 * x[-2] + 4 * x[-3] - x[-4]) / (h * h)
    return d1, d2


def lagrangian_action(L: Callable[[float, np.ndarray, np.ndarray, np.ndarray], float], curve: Curve) -> float:
    """Trapezoid integral of L(t, x, x', x'') along the sampled curve."""
    ys, zs = curve.derivatives()
    vals = np.empty(curve.N + 1)
    for k, t in enumerate(curve.times):
        try:
            vals[k] = L(t, curve.samples[k], ys[k], zs[k])
        except DomainError as err:
            err.args = (f"{err.args[0]} at node {k}",)
            raise
    return float(curve.dt * (vals.sum() - 0.5 * (vals[0] + vals[-1])))


def action(form: TangentForm, curve: Curve) -> float:
    if curve.m != form.m:
        raise ValueError(f"curve lives in R^{curve.m}, form in dimension {form.m}")

    def L(t, x, y, z):
        w0, w, wb = form.values(t, x, y)
        return w0 + float(w @ y) + float(wb @ z)

    return lagrangian_action(L, curve)


# classification ------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    regular: bool
    non_degenerated: bool
    singular: bool
    basic: bool
    per_sample: dict = field(repr=False)
    cond_h_worst: float = float("inf")
    cond_N_worst: float = float("inf")

    def to_dict(self) -> dict:
        def finite(v: float):
            return v if np.isfinite(v) else None

        return {
            "regular": self.regular,
            "non_degenerated": self.non_degenerated,
            "singular": self.singular,
            "basic": self.basic,
            "cond_h_worst": finite(self.cond_h_worst),
            "cond_N_worst": finite(self.cond_N_worst),
            "samples": len(self.per_sample["regular"]),
            "per_sample": self.per_sample,
        }


def classify(form: TangentForm, samples: Sequence[JetPoint], tol: Tolerances = DEFAULT) -> ClassificationReport:
    if not samples:
        raise ValueError("classification needs at least one sample")
    reg, nondeg, sing = [], [], []
    cond_h, cond_n = [], []
    for p in samples:
        J = form.jets(p.t, p.x, p.y)
        h = J.h
        ch, cn = condition_number(h), condition_number(J.N)
        cond_h.append(ch)
        cond_n.append(cn)
        reg.append(ch < tol.cond_max)
        nondeg.append(cn < tol.cond_max)
        sing.append(float(np.abs(h).max()) < tol.singular_atol)
    basic = form.m == 1 and "y1" not in form.free_vars()
    return ClassificationReport(
        regular=all(reg),
        non_degenerated=all(nondeg),
        singular=all(sing),
        basic=basic,
        per_sample={"regular": reg, "non_degenerated": nondeg, "singular": sing},
        cond_h_worst=max(cond_h),
        cond_N_worst=max(cond_n),
    )


def random_jet_points(
    m: int, count: int, rng: np.random.Generator, lo: float = -1.0, hi: float = 1.0, order: int = 1,
    min_speed: float = 0.0,
) -> list[JetPoint]:
    """Uniform samples of (t, x, y[, z[, w]]) in a box; ``min_speed`` rejects small |y|."""
    out = []
    while len(out) < count:
        t = rng.uniform(lo, hi)
        levels = [rng.uniform(lo, hi, m) for _ in range(order + 1)]
        if np.linalg.norm(levels[1]) < min_speed:
            continue
        out.append(JetPoint(t, *levels))
    return out


# equivalence and decomposition ------------------------------------------------


def equivalence_check(
    a: TangentForm, b: TangentForm, F: Expr | str, samples: Sequence[JetPoint], tol: Tolerances = DEFAULT
) -> tuple[bool, float]:
    """Check that ``b - a`` is ``dF`` plus an element of the module G at every sample."""
    if a.m != b.m:
        raise ValueError("forms of different dimension")
    m = a.m
    Fe = _as_expr(F, m)
    Ff = compile_expr(Fe)
    labels = a.varset.labels
    n = 2 * m + 1
    worst = 0.0
    for p in samples:
        env = {lab: jet.seed(n, i, v) for i, (lab, v) in enumerate(zip(labels, [p.t, *p.x, *p.y]))}
        dF = jet.as_jet(Ff(env), n).grad
        Ft, Fx, Fy = dF[0], dF[1 : m + 1], dF[m + 1 :]
        a0, aw, ab = a.values(p.t, p.x, p.y)
        b0, bw, bb = b.values(p.t, p.x, p.y)
        r1 = np.abs(bb - ab - Fy).max()
        r2 = abs(float(bw @ p.y) + b0 - (float((Fx + aw) @ p.y) + Ft + a0))
        worst = max(worst, float(r1), r2)
    return worst <= tol.equivalence_atol, worst


def pointed_decompose(
    L: Expr | str, p: JetPoint, quad_nodes: int = 32, tol: Tolerances = DEFAULT
) -> np.ndarray:
    """nu_i = int_0^1 dL/dy^i(t, x, tau*y) dtau, so that y^i nu_i = L for pointed L."""
    if quad_nodes < 8:
        raise ValueError("quad_nodes must be at least 8")
    m = p.m
    Lf = compile_expr(_as_expr(L, m))
    labels = VarSet.for_dimension(m).labels
    n = 2 * m + 1
    at_zero = float(Lf(dict(zip(labels, [p.t, *p.x, *np.zeros(m)]))))
    if abs(at_zero) > tol.pointed_atol:
        raise PreconditionError(f"L is not pointed: L(t, x, 0) = {at_zero!r}")
    nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
    taus, weights = 0.5 * (nodes + 1.0), 0.5 * weights
    nu = np.zeros(m)
    for tau, wgt in zip(taus, weights):
        vals = [p.t, *p.x, *(tau * p.y)]
        env = {lab: jet.seed(n, i, v) for i, (lab, v) in enumerate(zip(labels, vals))}
        nu += wgt * jet.as_jet(Lf(env), n).grad[m + 1 :]
    return nu
