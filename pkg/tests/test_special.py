import numpy as np
import pytest

from tangentforms.errors import PreconditionError, RegularityError, SamplingError
from tangentforms.expr import parse
from tangentforms.form import JetPoint, TangentForm, random_jet_points
from tangentforms.polynomial import Polynomial, exact_shift
from tangentforms.registry import builtin
from tangentforms.special import (
    antisym_affine_fit,
    criterion_check,
    el1d_residual,
    fit_samples,
    semispray_family_linear,
    semispray_family_y_only,
    standard_lagrangian_1d,
)
from tangentforms.variational import el_residual


def test_el1d_examples(rng):
    assert el1d_residual(builtin("basic_quadratic"), JetPoint(0, [1.0], [0.0], [0.5])) == 0
    free = TangentForm.from_text(1, "0", ["0"], ["x1"])
    assert el1d_residual(free, JetPoint(0.2, [0.4], [1.3], [0.7])) == pytest.approx(1.4)
    for name in ("basic_quadratic", "basic_exp", "basic_timed"):
        f = builtin(name)
        for p in random_jet_points(1, 30, rng, order=3):
            assert el1d_residual(f, p) == pytest.approx(el_residual(f, p)[0], abs=1e-12)


def test_el1d_rejects_non_basic():
    with pytest.raises(PreconditionError):
        el1d_residual(TangentForm.from_text(1, "0", ["0"], ["y1"]), JetPoint(0, [0.0], [1.0], [0.0]))
    with pytest.raises(PreconditionError):
        el1d_residual(builtin("example1"), JetPoint(0, [0, 0], [1, 1], [0, 0]))


def test_standard_lagrangian_quadratic():
    sl = standard_lagrangian_1d(builtin("basic_quadratic"))
    for x in (-0.8, 0.3, 1.7):
        assert sl.P(0.1, x) == pytest.approx(1.0, abs=1e-14)
        assert sl.R(0.1, x) == pytest.approx(x * x / 4, abs=1e-12)
        assert sl.lagrangian(0.1, x, 0.6) == pytest.approx(0.18 + x * x / 4, abs=1e-12)
    assert sl.a(0, 0.5) == 0 and sl.b(0, 0.5) == 0 and sl.c(0, 0.5) == pytest.approx(-0.25)


def test_standard_lagrangian_exp():
    sl = standard_lagrangian_1d(builtin("basic_exp"))
    for x in (-1.0, 0.4, 1.2):
        assert sl.a(0.3, x) == pytest.approx(0.5)
        assert sl.P(0.3, x) == pytest.approx(np.exp(x), rel=1e-13)
        assert sl.R(0.3, x) == 0


def test_standard_lagrangian_nonzero_Q(rng):
    f = builtin("basic_timed")
    sl = standard_lagrangian_1d(f, Q="t*x1^2 + sin(x1)")
    for p in random_jet_points(1, 15, rng, order=2):
        lhs = sl.el_residual(p.t, p.x[0], p.y[0], p.z[0])
        assert lhs == pytest.approx(el1d_residual(f, p), abs=1e-8)
        assert abs(sl.existence_defect(p.t, p.x[0])) < 1e-9


def test_standard_lagrangian_R_derivative_matches_integrand():
    sl = standard_lagrangian_1d(builtin("basic_timed"), Q="t*x1")
    h = 1e-4
    for x in (-0.5, 0.6):
        fd = (sl.R(0.4, x + h) - sl.R(0.4, x - h)) / (2 * h)
        assert fd == pytest.approx(sl.R_x(0.4, x), abs=1e-7)


def test_standard_lagrangian_errors():
    neg = TangentForm.from_text(1, "0", ["0"], ["-x1"])
    with pytest.raises(RegularityError):
        standard_lagrangian_1d(neg).P(0, 0.5)
    with pytest.raises(PreconditionError):
        standard_lagrangian_1d(builtin("basic_exp"), Q="y1")


def test_fit_examples(rng):
    fit = antisym_affine_fit([parse("-x2", 2), parse("x1", 2)], fit_samples(2))
    assert np.allclose(fit.c, [[0, -1], [1, 0]]) and np.allclose(fit.d, 0) and fit.residual < 1e-12
    assert np.array_equal(fit.c, -fit.c.T)
    bad = antisym_affine_fit([parse("x1", 2), parse("0", 2)], fit_samples(2))
    assert bad.symmetric_defect == 2.0 and not bad.passes()
    with pytest.raises(SamplingError):
        antisym_affine_fit([parse("-x2", 2), parse("x1", 2)], [[0.1, 0.2]])
    with pytest.raises(PreconditionError):
        antisym_affine_fit([parse("y1", 2), parse("x1", 2)], fit_samples(2))


def test_fit_round_trip(rng):
    for m in (2, 3, 4):
        c = np.triu(rng.normal(size=(m, m)), 1)
        c = c - c.T
        d = rng.normal(size=m)
        exprs = [
            parse(" + ".join([f"({float(c[i, j])!r})*x{j + 1}" for j in range(m) if j != i] + [f"({float(d[i])!r})"]), m)
            for i in range(m)
        ]
        fit = antisym_affine_fit(exprs, fit_samples(m, 3 * m))
        assert np.abs(fit.c - c).max() < 1e-10 and np.abs(fit.d - d).max() < 1e-10


def test_affine_fit_recovers_random_forms(rng):
    """The jet check and the fit agree on affine-antisymmetric and on perturbed omegas."""
    for k in range(50):
        c = float(rng.normal())
        good = k % 2 == 0
        extra = "" if good else f" + ({float(rng.uniform(0.5, 2))!r})*x{1 + k % 4 // 2}^2"
        exprs = [parse(f"({c!r})*x2 + 0.5{extra if k % 4 < 2 else ''}", 2),
                 parse(f"({-c!r})*x1{extra if k % 4 >= 2 else ''}", 2)]
        fit = antisym_affine_fit(exprs, fit_samples(2, 12, seed=k))
        assert (fit.symmetric_defect < 1e-9) == (fit.residual < 1e-9) == good


def test_y_only_family_example3():
    f = builtin("example3")
    fam = semispray_family_y_only(f, [0.5, -1.5])
    a = fam(0.0, np.zeros(2), np.array([0.3, 0.4]))
    b = fam(2.0, np.ones(2), np.array([0.3, 0.4]))
    assert np.array_equal(a, b)
    assert np.array_equal(semispray_family_y_only(builtin("example1"), [0, 0])(0, np.zeros(2), np.ones(2)), [0, 0])
    with pytest.raises(PreconditionError):
        semispray_family_y_only(TangentForm.from_text(2, "0", ["x1", "x2"], ["y2", "-y1"]), [0, 0])


def test_linear_family_example4():
    f = builtin("example4")
    fam = semispray_family_linear(f, [0.4, -0.6])
    x, y = np.array([0.3, -0.7]), np.array([1.0, 2.0])
    # momentum integral p = -2 c x + e gives x'' = -x + const
    S0 = fam(0.0, np.zeros(2), y)
    assert np.allclose(fam(0.0, x, y) - S0, -x)
    with pytest.raises(PreconditionError):
        semispray_family_linear(TangentForm.from_text(2, "0", ["x1", "0"], ["y2", "-y1"]), [0, 0])


def test_criteria(rng):
    pts = random_jet_points(2, 15, rng)
    base = TangentForm.from_text(2, "y1*y2", ["y1^2", "sin(y2)"], ["y2", "-y1 + y2^3"])
    shifted = exact_shift(base, Polynomial.random(2, rng))
    assert criterion_check(shifted, "y_dependent", pts)[0]
    assert criterion_check(builtin("example2"), "constant_xx", pts)[0]
    ok, worst = criterion_check(TangentForm.from_text(2, "x1", ["0", "0"], ["y2", "-y1"]), "y_dependent", pts)
    assert not ok and worst >= 1
    # omega_i(x) y^i dt + omegabar(y) dy: cross derivatives of f_j = K[x_j, t], g_i = K[y_i, t] agree
    mu = TangentForm.from_text(2, "-x2*y1 + x1*y2", ["0", "0"], ["y2", "-y1"])
    assert criterion_check(mu, "constant_mixed", pts) == (True, 0.0)
    ok, worst = criterion_check(TangentForm.from_text(2, "x1^2*y2", ["0", "0"], ["y2", "-y1"]), "constant_mixed", pts)
    assert not ok and worst > 0.1
    assert not criterion_check(TangentForm.from_text(2, "0", ["y2", "0"], ["y2", "-y1"]), "constant_mixed", pts)[0]
    with pytest.raises(ValueError):
        criterion_check(mu, "no_such_criterion", pts)


def test_mathisson_domain():
    from tangentforms.errors import DomainError

    f = builtin("mathisson")
    with pytest.raises(DomainError):
        f.values(0.0, [0.0, 0.0], [0.0, 0.0])
    for y in ([0.1, 0.0], [0.0, -0.1], [0.07, 0.08]):
        w0, w, wb = f.values(0.0, [0.0, 0.0], y)
        assert np.isfinite([w0, *w, *wb]).all()
