"""Second-order truncated multivariate jets (forward-mode AD).

A :class:`Jet2` carries the value, gradient and Hessian of a scalar function
with respect to a fixed list of independent variables.  Every operation
propagates the three levels by the chain and product rules truncated at
order two.  The module-level functions (:func:`add`, :func:`sin`, ...) accept
plain floats as well, so one code path serves both real and jet evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class VarSet:
    """Ordered, uniquely labelled independent variables."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a VarSet needs at least one variable")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in {self.labels}")

    @property
    def count(self) -> int:
        return len(self.labels)

    @classmethod
    def for_dimension(cls, m: int) -> "VarSet":
        """The chart variables (t, x1..xm, y1..ym) of a dimension-m form."""
        if m < 1:
            raise ValueError("dimension must be positive")
        return _chart_varset(m)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@lru_cache(maxsize=None)
def _chart_varset(m: int) -> VarSet:
    return VarSet(("t",) + tuple(f"x{i}" for i in range(1, m + 1)) + tuple(f"y{i}" for i in range(1, m + 1)))


@lru_cache(maxsize=None)
def _zeros(n: int) -> tuple[np.ndarray, np.ndarray]:
    g = np.zeros(n)
    h = np.zeros((n, n))
    g.flags.writeable = False
    h.flags.writeable = False
    return g, h


@lru_cache(maxsize=None)
def _basis(n: int) -> np.ndarray:
    e = np.eye(n)
    e.flags.writeable = False
    return e


class Jet2:
    """Value, gradient and Hessian of a scalar function.

    Jets are treated as immutable: operations always allocate fresh arrays, so
    the (read-only) zero arrays used by constants and seeds can be shared.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, n: int) -> "Jet2":
        g, h = _zeros(n)
        return cls(value, g, h)

    @property
    def n(self) -> int:
        return self.grad.shape[0]

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r})"

    def _chain(self, f0: float, f1: float, f2: float) -> "Jet2":
        g = self.grad
        return Jet2(f0, f1 * g, f1 * self.hess + f2 * np.outer(g, g))

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self) -> "Jet2":
        return self

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __pow__(self, other):
        return power(self, other)

    def __rpow__(self, other):
        return power(other, self)


def seed(varset: VarSet | int, index: int, value: float) -> Jet2:
    """The jet of the coordinate function number ``index`` at ``value``."""
    n = varset if isinstance(varset, int) else varset.count
    if not 0 <= index < n:
        raise IndexError(f"seed index {index} outside 0..{n - 1}")
    return Jet2(value, _basis(n)[index], _zeros(n)[1])


def seeds(varset: VarSet | int, values: Sequence[float]) -> list[Jet2]:
    n = varset if isinstance(varset, int) else varset.count
    if len(values) != n:
        raise ValueError(f"expected {n} values, got {len(values)}")
    return [seed(n, i, v) for i, v in enumerate(values)]


def _check_sizes(a: Jet2, b: Jet2) -> None:
    if a.grad.shape != b.grad.shape:
        raise ValueError(f"jets over different variable sets ({a.n} vs {b.n})")


def add(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            _check_sizes(a, b)
            return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
        return Jet2(a.value + b, a.grad, a.hess)
    if isinstance(b, Jet2):
        return Jet2(a + b.value, b.grad, b.hess)
    return a + b


def sub(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            _check_sizes(a, b)
            return Jet2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
        return Jet2(a.value - b, a.grad, a.hess)
    if isinstance(b, Jet2):
        return Jet2(a - b.value, -b.grad, -b.hess)
    return a - b


def mul(a, b):
    if isinstance(a, Jet2):
        if isinstance(b, Jet2):
            _check_sizes(a, b)
            av, bv, ag, bg = a.value, b.value, a.grad, b.grad
            cross = np.outer(ag, bg)
            return Jet2(av * bv, av * bg + bv * ag, av * b.hess + bv * a.hess + (cross + cross.T))
        return Jet2(a.value * b, a.grad * b, a.hess * b)
    if isinstance(b, Jet2):
        return Jet2(a * b.value, a * b.grad, a * b.hess)
    return a * b


def reciprocal(a):
    v = a.value if isinstance(a, Jet2) else a
    if v == 0:
        raise DomainError("div", 0.0)
    if not isinstance(a, Jet2):
        return 1.0 / a
    r = 1.0 / v
    return a._chain(r, -r * r, 2.0 * r * r * r)


def div(a, b):
    if isinstance(b, Jet2):
        return mul(a, reciprocal(b))
    if b == 0:
        raise DomainError("div", 0.0)
    if isinstance(a, Jet2):
        return mul(a, 1.0 / b)
    return a / b


def _ipow(v: float, k: int) -> float:
    return v**k if k >= 0 else 1.0 / v ** (-k)


def _power_const(a, c: float):
    v = a.value if isinstance(a, Jet2) else a
    if float(c).is_integer():
        k = int(c)
        if k < 0 and v == 0:
            raise DomainError("pow", v)
        if not isinstance(a, Jet2):
            return _ipow(v, k)
        if k == 0:
            return Jet2.constant(1.0, a.n)
        f1 = k * _ipow(v, k - 1)
        f2 = k * (k - 1) * _ipow(v, k - 2) if k not in (0, 1) else 0.0
        return a._chain(_ipow(v, k), f1, f2)
    if v <= 0:
        raise DomainError("pow", v)
    if not isinstance(a, Jet2):
        return v**c
    return a._chain(v**c, c * v ** (c - 1.0), c * (c - 1.0) * v ** (c - 2.0))


def power(a, b):
    """``a ** b``; integer exponents allow any base, the rest need a positive base."""
    if isinstance(b, Jet2):
        va = a.value if isinstance(a, Jet2) else a
        if va <= 0:
            raise DomainError("pow", va)
        return exp(mul(b, ln(a)))
    return _power_const(a, float(b))


def neg(a):
    return -a


def sin(a):
    if not isinstance(a, Jet2):
        return math.sin(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return a._chain(s, c, -s)


def cos(a):
    if not isinstance(a, Jet2):
        return math.cos(a)
    s, c = math.sin(a.value), math.cos(a.value)
    return a._chain(c, -s, -c)


def exp(a):
    if not isinstance(a, Jet2):
        try:
            return math.exp(a)
        except OverflowError:
            raise DomainError("exp", a) from None
    try:
        e = math.exp(a.value)
    except OverflowError:
        raise DomainError("exp", a.value) from None
    return a._chain(e, e, e)


def ln(a):
    v = a.value if isinstance(a, Jet2) else a
    if v <= 0:
        raise DomainError("ln", v)
    if not isinstance(a, Jet2):
        return math.log(v)
    r = 1.0 / v
    return a._chain(math.log(v), r, -r * r)


def sqrt(a):
    v = a.value if isinstance(a, Jet2) else a
    if v <= 0:
        raise DomainError("sqrt", v)
    if not isinstance(a, Jet2):
        return math.sqrt(v)
    s = math.sqrt(v)
    return a._chain(s, 0.5 / s, -0.25 / (s * v))


UNARY: dict[str, Callable] = {"neg": neg, "sin": sin, "cos": cos, "exp": exp, "ln": ln, "sqrt": sqrt}
BINARY: dict[str, Callable] = {"add": add, "sub": sub, "mul": mul, "div": div, "pow": power}


def jet_arith(a, b, op: str):
    return BINARY[op](a, b)


def jet_fn(a, fn: str):
    return UNARY[fn](a)


def as_jet(x, n: int) -> Jet2:
    return x if isinstance(x, Jet2) else Jet2.constant(x, n)


def fd_check(f: Callable[[Sequence], object], point: Sequence[float], h: float = 1e-5) -> float:
    """Largest ``|AD - FD| / (1 + |AD|)`` over all first and second partials.

    ``f`` must accept a sequence of scalars that are either all floats or all
    jets.  First partials use central differences with step ``h``; second
    partials use step ``sqrt(h)`` with one Richardson extrapolation.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(point, dtype=float)
    n = x.size
    jet = as_jet(f(seeds(n, x)), n)

    def fr(dx: np.ndarray) -> float:
        v = f([float(c) for c in x + dx])
        return v.value if isinstance(v, Jet2) else float(v)

    eye = np.eye(n)
    worst = 0.0
    f0 = fr(np.zeros(n))
    for i in range(n):
        d1 = (fr(h * eye[i]) - fr(-h * eye[i])) / (2 * h)
        worst = max(worst, abs(jet.grad[i] - d1) / (1 + abs(jet.grad[i])))

    def second(i: int, j: int, k: float) -> float:
        if i == j:
            return (fr(k * eye[i]) - 2 * f0 + fr(-k * eye[i])) / (k * k)
        ei, ej = k * eye[i], k * eye[j]
        return (fr(ei + ej) - fr(ei - ej) - fr(ej - ei) + fr(-ei - ej)) / (4 * k * k)

    k = math.sqrt(h)
    for i in range(n):
        for j in range(i, n):
            d2 = (4 * second(i, j, k / 2) - second(i, j, k)) / 3
            ad = jet.hess[i, j]
            worst = max(worst, abs(ad - d2) / (1 + abs(ad)))
    return worst
