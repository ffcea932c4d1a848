"""Named example forms.

Parameters are substituted into the expression text, so every builtin is an
ordinary :class:`TangentForm`.  ``min_speed`` marks slashed forms that are
only defined away from y = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .form import TangentForm


def _num(v: float) -> str:
    v = float(v)
    text = str(int(v)) if v.is_integer() else repr(v)
    return f"({text})" if v < 0 else text


@dataclass(frozen=True)
class Builtin:
    name: str
    summary: str
    build: Callable[..., TangentForm]
    params: dict = field(default_factory=dict)
    min_speed: float = 0.0

    def make(self, **overrides) -> TangentForm:
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise ValueError(f"{self.name} has no parameter(s) {sorted(unknown)}; known: {sorted(self.params)}")
        return self.build(**{**self.params, **overrides})


def _example1() -> TangentForm:
    return TangentForm.from_text(2, "0", ["0", "0"], ["y2", "-y1"], name="example1")


def _example2(name: str = "example2") -> TangentForm:
    return TangentForm.from_text(2, "0", ["-x2", "x1"], ["y2", "-y1"], name=name)


def _example3() -> TangentForm:
    return TangentForm.from_text(2, "0", ["0", "0"], ["y1 + y2", "y2"], name="example3")


def _lsz(k: float, m: float) -> TangentForm:
    half = _num(m / 2)
    return TangentForm.from_text(
        2, "0", [f"{half}*y1", f"{half}*y2"], [f"{_num(k)}*y2", f"-{_num(k)}*y1"], name="lsz"
    )


def _lsz_dt(k: float, m: float) -> TangentForm:
    return TangentForm.from_text(
        2, f"{_num(m / 2)}*(y1^2 + y2^2)", ["0", "0"], [f"{_num(k)}*y2", f"-{_num(k)}*y1"], name="lsz_dt"
    )


def _riemannian(g1: float, g2: float) -> TangentForm:
    return TangentForm.from_text(2, "0", ["0", "0"], [f"{_num(g1)}*y1", f"{_num(g2)}*y2"], name="riemannian")


def _degenerate_regular() -> TangentForm:
    return TangentForm.from_text(2, "0", ["0", "0"], ["y1 + y2", "-(y1 + y2)"], name="degenerate_regular")


_SPEED = "sqrt((y1^2 + y2^2)/2)"


def _mathisson(m: float) -> TangentForm:
    return TangentForm.from_text(
        2,
        f"-{_num(m)}*{_SPEED}",
        ["0", "0"],
        [f"-y2/{_SPEED}^3", f"y1/{_SPEED}^3"],
        name="mathisson",
    )


def _mathisson_pure(m: float) -> TangentForm:
    return TangentForm.from_text(
        2,
        "0",
        [f"-{_num(m)}*y1/{_SPEED}", f"-{_num(m)}*y2/{_SPEED}"],
        [f"-y2/{_SPEED}^3", f"y1/{_SPEED}^3"],
        name="mathisson_pure",
    )


def _fedosov(r: float, k: float) -> TangentForm:
    r = int(r)
    if r < 1:
        raise ValueError("fedosov needs r >= 1")
    m = 2 * r
    # eps = [[0, I], [-I, 0]]; omegabar_i = eps_ij y^j
    bar = [f"y{i + r + 1}" for i in range(r)] + [f"-y{i + 1}" for i in range(r)]
    energy = " + ".join(f"y{i}^2" for i in range(1, m + 1))
    return TangentForm.from_text(m, f"{_num(k / 2)}*({energy})", ["0"] * m, bar, name="fedosov")


def _symplectic_spray(a: float) -> TangentForm:
    # alpha = eps on R^2, connection of the metric diag(1, rho^2) with rho = x1 + a
    rho = f"(x1 + {_num(a)})"
    return TangentForm.from_text(
        2,
        "0",
        [f"y1*y2/{rho}", f"{rho}*y2^2 + y1^2/{rho}"],
        ["y2", "-y1"],
        name="symplectic_spray",
    )


def _basic_quadratic() -> TangentForm:
    return TangentForm.from_text(1, "-x1^2/2", ["0"], ["x1"], name="basic_quadratic")


def _basic_exp() -> TangentForm:
    return TangentForm.from_text(1, "0", ["0"], ["exp(x1)"], name="basic_exp")


def _basic_timed() -> TangentForm:
    return TangentForm.from_text(
        1, "cos(t)*x1^2", ["t*x1"], ["(2 + sin(t))*exp(0.5*x1)"], name="basic_timed"
    )


REGISTRY: dict[str, Builtin] = {
    b.name: b
    for b in [
        Builtin("example1", "omegabar = (y2, -y1); solutions are quadratic in t", _example1),
        Builtin("example2", "omega = (-x2, x1), omegabar = (y2, -y1); x''' = -x'", _example2),
        Builtin("example3", "omegabar = (y1 + y2, y2); x''' = 0", _example3),
        Builtin("example4", "the example2 form, used for first-order semi-spray families", lambda: _example2("example4")),
        Builtin("lsz", "pure form -k eps_ij y^i dy^j + (m/2) y.dx", _lsz, {"k": 1.0, "m": 1.0}),
        Builtin("lsz_dt", "mixed form -k eps_ij y^i dy^j + (m/2)|y|^2 dt", _lsz_dt, {"k": 1.0, "m": 1.0}),
        Builtin("riemannian", "omegabar = (g1 y1, g2 y2): non-degenerate, singular", _riemannian, {"g1": 1.0, "g2": 1.0}),
        Builtin("degenerate_regular", "omegabar = (y1 + y2, -(y1 + y2)): regular but degenerate", _degenerate_regular),
        Builtin("mathisson", "slashed mixed form -m|y| dt + eps_ij y^i/|y|^3 dy^j", _mathisson, {"m": 1.0}, 0.1),
        Builtin("mathisson_pure", "slashed pure form -m y/|y| dx + eps_ij y^i/|y|^3 dy^j", _mathisson_pure, {"m": 1.0}, 0.1),
        Builtin("fedosov", "flat R^(2r): eps_ij y^j dy^i + k|y|^2/2 dt", _fedosov, {"r": 1, "k": 1.0}),
        Builtin("symplectic_spray", "eps y dy minus the spray term of a polar-type connection", _symplectic_spray, {"a": 3.0}),
        Builtin("basic_quadratic", "dim 1: omegabar = x, omega0 = -x^2/2 (2x'' = x)", _basic_quadratic),
        Builtin("basic_exp", "dim 1: omegabar = exp(x)", _basic_exp),
        Builtin("basic_timed", "dim 1, time dependent: omegabar = (2 + sin t) exp(x/2)", _basic_timed),
    ]
}


def builtin(name: str, **params) -> TangentForm:
    try:
        entry = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; available: {', '.join(REGISTRY)}") from None
    return entry.make(**params)


def builtin_names() -> list[str]:
    return list(REGISTRY)
