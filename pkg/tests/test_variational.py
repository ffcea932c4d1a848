import numpy as np
import pytest

from tangentforms.errors import RegularityError
from tangentforms.form import JetPoint, TangentForm, random_jet_points
from tangentforms.polynomial import Polynomial, exact_shift
from tangentforms.registry import REGISTRY, builtin
from tangentforms.variational import (
    CovectorField,
    el_residual,
    el_split,
    form_fields,
    lagrange_top_derivative,
    ostrogradski,
    ostrogradski_fields,
    third_order_semispray,
)

P1 = JetPoint(0, [0, 0], [1, 2], [3, 4], [5, 6])


def test_el_residual_examples():
    assert np.array_equal(el_residual(builtin("example1"), P1), [12, -10])
    classical = TangentForm.from_text(1, "y1^2/2")
    assert el_residual(classical, JetPoint(0, [0.3], [0.2], [0.7], [1.0]))[0] == -0.7
    on_shell = JetPoint(0, [1, 0], [0, 1], [-1, 0], [0, -1])
    assert np.allclose(el_residual(builtin("example2"), on_shell), 0, atol=1e-15)
    assert not el_residual(TangentForm.from_text(2), P1).any()


def test_example1_quadratics_are_solutions(rng):
    f = builtin("example1")
    for _ in range(10):
        c = rng.normal(size=(3, 2))
        t = rng.uniform(-1, 1)
        x, y, z = c[0] + c[1] * t + c[2] * t * t, c[1] + 2 * c[2] * t, 2 * c[2]
        assert not el_residual(f, JetPoint(t, x, y, z, [0, 0])).any()


@pytest.mark.parametrize(
    "name,h", [("example3", [[0, 1], [-1, 0]]), ("example4", [[0, 2], [-2, 0]]), ("riemannian", [[0, 0], [0, 0]])]
)
def test_split_matrices(name, h, rng):
    for p in random_jet_points(2, 5, rng, order=2):
        assert np.array_equal(el_split(builtin(name), p).h, h)


def test_linearity_in_w(rng):
    for name, entry in REGISTRY.items():
        f = entry.make()
        for p in random_jet_points(f.m, 10, rng, order=3, min_speed=max(entry.min_speed, 0.5)):
            s = el_split(f, p)
            diff = el_residual(f, p) - s.f
            assert np.allclose(diff, s.h @ p.w, rtol=1e-12, atol=1e-12 * (1 + np.abs(s.f).max()))


def test_semispray_examples(rng):
    p = JetPoint(0.3, [0.1, 0.2], [1.0, 2.0], [0.5, -0.5])
    assert np.allclose(third_order_semispray(builtin("example1"), p), 0)
    q = JetPoint(0.0, [3.0, -1.0], [0.0, 1.0], [0.7, 0.2])
    assert np.allclose(third_order_semispray(builtin("example2"), q), [0, -1], atol=1e-15)
    with pytest.raises(RegularityError):
        third_order_semispray(builtin("riemannian"), p)


def test_semispray_zeroes_residual(rng):
    for name in ("example2", "example3", "mathisson", "symplectic_spray", "fedosov", "lsz"):
        f = builtin(name)
        for p in random_jet_points(2, 10, rng, order=2, min_speed=0.5):
            w = third_order_semispray(f, p)
            assert np.abs(el_residual(f, p.with_w(w))).max() < 1e-10


def test_lagrange_top_derivative_examples():
    omega, omegabar = form_fields(builtin("example1"))
    p = JetPoint(0, [0, 0], [1, 2], [3, 4])
    assert np.array_equal(lagrange_top_derivative(omega, omegabar, p), [-4, 3])
    const = TangentForm.from_text(2, "0", ["2", "-3"], ["1", "5"])
    omega, omegabar = form_fields(const)
    assert np.array_equal(lagrange_top_derivative(omega, omegabar, p), [2, -3])
    with pytest.raises(ValueError):
        lagrange_top_derivative(omega, omegabar, JetPoint(0, [0, 0], [1, 2]))


def test_covector_field_requires_levels():
    fld = CovectorField(2, lambda p: (p.z, None))
    with pytest.raises(ValueError):
        fld(JetPoint(0, [0.0], [1.0]))


def test_ostrogradski_example3():
    pair = ostrogradski(builtin("example3"), JetPoint(0, [0, 0], [1, 2], [0, 0]))
    assert np.array_equal(pair.Omega_dx, [0, 0])
    assert np.array_equal(pair.Omega_dy, [3, 2])
    assert np.array_equal(pair.Phi_dy, [0, 0])
    zero = ostrogradski(TangentForm.from_text(2), P1)
    assert not any(v.any() for v in (zero.Omega_dx, zero.Omega_dy, zero.Phi_dx, zero.Phi_dy))


def test_ostrogradski_chain_all_builtins(rng):
    for name, entry in REGISTRY.items():
        f = entry.make()
        fields = ostrogradski_fields(f)
        for p in random_jet_points(f.m, 15, rng, order=3, min_speed=max(entry.min_speed, 0.5)):
            pair = ostrogradski(f, p)
            _, omegabar = form_fields(f)
            assert np.allclose(omegabar(p)[0], pair.Omega_dy)
            phibar = lagrange_top_derivative(fields["Omega_dx"], fields["Omega_dy"], p)
            assert np.allclose(phibar, pair.Phi_dy, rtol=1e-12, atol=1e-12)
            E = lagrange_top_derivative(fields["Phi_dx"], fields["Phi_dy"], p)
            ref = el_residual(f, p)
            assert np.abs(E - ref).max() <= 1e-10 * (1 + np.abs(ref).max()), name


def test_gauge_invariance(rng):
    f = builtin("symplectic_spray")
    pts = random_jet_points(2, 20, rng, order=3)
    for _ in range(4):
        g = exact_shift(f, Polynomial.random(2, rng))
        for p in pts:
            assert np.allclose(el_residual(g, p), el_residual(f, p), rtol=0, atol=1e-10)
