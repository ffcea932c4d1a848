"""Self-checks of the identities that hold for every regular form."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .dynamics import integrate, project_and_compare
from .errors import TangentFormError
from .form import JetPoint, TangentForm, add_g_element, classify, equivalence_check, lagrangian, random_jet_points
from .polynomial import Polynomial, exact_shift
from .reduction import hamiltonian_check, hamiltonian_check_y, phase_lift, pushforward_y, to_phase_y, x_field
from .special import el1d_residual, standard_lagrangian_1d
from .variational import el_residual, lagrange_top_derivative, ostrogradski_fields

SUITES = ("hamiltonian", "reduction", "gauge", "dim1")


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    worst: float | None
    threshold: float | None
    detail: str = ""


@dataclass
class VerifyReport:
    form: str
    seed: int
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"form": self.form, "seed": self.seed, "passed": self.passed, "results": [asdict(r) for r in self.results]}


@dataclass
class _Context:
    form: TangentForm
    rng: np.random.Generator
    samples: int
    min_speed: float

    def jets(self, order: int) -> list[JetPoint]:
        return random_jet_points(self.form.m, self.samples, self.rng, order=order, min_speed=self.min_speed)


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.atleast_1d(a), np.atleast_1d(b)
    return float(np.abs(a - b).max() / (1.0 + np.abs(b).max()))


# suites -----------------------------------------------------------------------------


def _hamiltonian(ctx: _Context):
    f = ctx.form
    yield "hamiltonian_identity", 1e-8, lambda: max(hamiltonian_check(f, phase_lift(f, p)) for p in ctx.jets(2))

    def chain():
        fields = ostrogradski_fields(f)
        worst = 0.0
        for p in ctx.jets(3):
            phibar = lagrange_top_derivative(fields["Omega_dx"], fields["Omega_dy"], p)
            E = lagrange_top_derivative(fields["Phi_dx"], fields["Phi_dy"], p)
            worst = max(worst, _rel(phibar, fields["Phi_dy"](p)[0]), _rel(E, el_residual(f, p)))
        return worst

    yield "ostrogradski_chain", 1e-10, chain


def _reduction(ctx: _Context):
    f = ctx.form

    def flows():
        p = ctx.jets(2)[0]
        a = integrate(f, "third_order", p.t, np.concatenate([p.x, p.y, p.z]), p.t + 0.2, 1e-3)
        b = integrate(f, "x_flow", p.t, phase_lift(f, p).vector(), p.t + 0.2, 1e-3)
        return project_and_compare(a, b)

    yield "third_order_vs_x_flow", 1e-6, flows
    points = ctx.jets(2)
    if not classify(f, points).non_degenerated:
        yield "pushforward", None, "skipped: top component is degenerate"
        return

    def push():
        worst = 0.0
        for p in points:
            s = phase_lift(f, p)
            X = np.concatenate(x_field(f, s))
            worst = max(worst, _rel(pushforward_y(f, to_phase_y(f, s), guess=s.y), X))
        return worst

    yield "pushforward", 1e-8, push
    if f.is_time_independent():
        yield "hamiltonian_y", 1e-8, lambda: max(
            hamiltonian_check_y(f, to_phase_y(f, s), guess=s.y) for s in (phase_lift(f, p) for p in points)
        )


def _gauge(ctx: _Context):
    f, m = ctx.form, ctx.form.m

    def shifts():
        worst = 0.0
        points = ctx.jets(3)
        for _ in range(3):
            g = exact_shift(f, Polynomial.random(m, ctx.rng))
            worst = max(worst, max(_rel(el_residual(g, p), el_residual(f, p)) for p in points))
        return worst

    yield "exact_shift_residual", 1e-10, shifts

    def equivalence():
        F = Polynomial.random(m, ctx.rng)
        ok, worst = equivalence_check(f, exact_shift(f, F), F.to_expr(), ctx.jets(1))
        return worst

    yield "exact_shift_equivalence", 1e-9, equivalence

    def g_element():
        g = add_g_element(f, [Polynomial.random(m, ctx.rng).to_expr() for _ in range(m)])
        return max(_rel(lagrangian(g, p), lagrangian(f, p)) for p in ctx.jets(2))

    yield "g_element_lagrangian", 1e-12, g_element


def _dim1(ctx: _Context):
    f = ctx.form
    if f.m != 1 or "y1" in f.free_vars():
        yield "el1d", None, "skipped: not a basic one-dimensional form"
        return
    points = ctx.jets(3)
    yield "el1d", 1e-12, lambda: max(_rel(el1d_residual(f, p), el_residual(f, p)[0]) for p in points)
    if not all(f.jets(p.t, p.x, p.y).Gb[0, 1] > 0 for p in points):
        yield "standard_lagrangian", None, "skipped: d(omegabar)/dx is not positive on the samples"
        return
    sl = standard_lagrangian_1d(f)
    few = points[: min(len(points), 10)]

    def standard():
        return max(
            abs(sl.el_residual(p.t, p.x[0], p.y[0], p.z[0]) - el1d_residual(f, p)) for p in few
        )

    yield "standard_lagrangian", 1e-8, standard
    yield "existence_criterion", 1e-9, lambda: max(abs(sl.existence_defect(p.t, p.x[0])) for p in few)


_SUITE_FNS: dict[str, Callable] = {"hamiltonian": _hamiltonian, "reduction": _reduction, "gauge": _gauge, "dim1": _dim1}


def suites_for(form: TangentForm, suite: str) -> list[str]:
    if suite != "all":
        if suite not in _SUITE_FNS:
            raise ValueError(f"unknown suite {suite!r}; expected all or one of {', '.join(SUITES)}")
        return [suite]
    chosen = ["gauge"]
    if form.m == 1:
        chosen.append("dim1")
    else:
        chosen += ["hamiltonian", "reduction"]
    return chosen


def verify(
    form: TangentForm, suite: str = "all", samples: int = 20, seed: int = 0, min_speed: float = 0.0
) -> VerifyReport:
    """Run the named suite(s).  Numeric failures inside a check count as a failed check."""
    report = VerifyReport(form.name or "<form>", seed)
    ctx = _Context(form, np.random.default_rng(seed), samples, min_speed)
    for name in suites_for(form, suite):
        try:
            for check, threshold, run in _SUITE_FNS[name](ctx):
                if threshold is None:
                    report.results.append(CheckResult(name, check, True, None, None, run))
                    continue
                try:
                    worst = float(run())
                except TangentFormError as exc:
                    report.results.append(CheckResult(name, check, False, None, threshold, f"{type(exc).__name__}: {exc}"))
                    continue
                report.results.append(CheckResult(name, check, worst <= threshold, worst, threshold))
        except TangentFormError as exc:
            report.results.append(CheckResult(name, "setup", False, None, None, f"{type(exc).__name__}: {exc}"))
    return report
