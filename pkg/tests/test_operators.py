import numpy as np
import pytest

from magtorus import (
    FourierField2D,
    GridFunction,
    H_commutation_residual,
    Lattice,
    b0_for_unit_flux,
    build_potential,
    commutator_phase,
    eval_A,
    grid_function_from_callable,
    magnetic_translate,
    random_admissible_field,
    random_mean_zero_field,
    transport_residual,
)
from magtorus.operators import a0


def ones(lattice, n=16, spans=2.0):
    return grid_function_from_callable(
        lattice, lambda x: np.ones(x.shape[:-1]), n, (0.0, spans), (0.0, spans))


def test_translate_zero_field(square):
    u = ones(square)
    t = magnetic_translate(1, u, square, 0.0)
    assert np.allclose(t.values, 1.0, atol=0)


def test_translate_phase_example(square):
    # e1 = (1,0), b0 = 2 pi: A0(e1) = (0, -pi), so T1 multiplies by e^{i pi x2}
    u = ones(square)
    t = magnetic_translate(1, u, square, 2 * np.pi)
    pts = t.points()
    want = np.exp(1j * np.pi * pts[..., 1])
    assert np.max(np.abs(t.values - want)) <= 1e-12


def test_translate_leaves_grid(square):
    u = grid_function_from_callable(
        square, lambda x: np.ones(x.shape[:-1]), 16, (0.0, 1.0), (0.0, 2.0))
    with pytest.raises(ValueError, match="grid"):
        magnetic_translate(1, u, square, 1.0)
    magnetic_translate(2, u, square, 1.0)  # room on the u axis


def test_translate_twice_composes(skew, rng):
    b0 = b0_for_unit_flux(skew)

    def f(x):
        return np.exp(np.sin(2 * np.pi * x[..., 0]) + 1j * x[..., 1])

    u = grid_function_from_callable(skew, f, 16, (0.0, 3.0), (0.0, 1.0))
    twice = magnetic_translate(1, magnetic_translate(1, u, skew, b0), skew, b0)
    # single translation by 2 e1 with its own composed phase
    e1 = np.asarray(skew.e1)
    v1 = -0.5 * b0 * np.array([e1[1], -e1[0]])
    pts = twice.points()
    direct = np.exp(1j * (pts @ v1)) * np.exp(1j * ((pts + e1) @ v1)) * f(pts + 2 * e1)
    assert np.max(np.abs(twice.values - direct)) <= 1e-12


@pytest.mark.parametrize("l", [1, 2, 3])
def test_commutator_phase_integer_flux(skew, l):
    b0 = l * 2 * np.pi / skew.area
    assert abs(commutator_phase(skew, b0)) <= 1e-14


def test_commutator_phase_half_flux(skew):
    b0 = np.pi / skew.area
    assert abs(commutator_phase(skew, b0)) == pytest.approx(2.0, abs=1e-14)


def test_commutators_on_grid_functions(skew):
    # [T1, T2] = 0 on samples iff the flux is integral
    def f(x):
        return np.exp(1j * x[..., 0] - 0.3 * np.cos(2 * np.pi * x[..., 1]))

    for l, bound in ((1, 1e-12), (2, 1e-12)):
        b0 = l * 2 * np.pi / skew.area
        u = grid_function_from_callable(skew, f, 16, (0.0, 2.5), (0.0, 2.5))
        ab = magnetic_translate(1, magnetic_translate(2, u, skew, b0), skew, b0)
        ba = magnetic_translate(2, magnetic_translate(1, u, skew, b0), skew, b0)
        gap = np.max(np.abs(ab.values - ba.values))
        assert gap <= bound, (l, gap)

    b0 = np.pi / skew.area  # l = 1/2
    u = ones(skew, spans=2.5)
    ab = magnetic_translate(1, magnetic_translate(2, u, skew, b0), skew, b0)
    ba = magnetic_translate(2, magnetic_translate(1, u, skew, b0), skew, b0)
    assert np.max(np.abs(ab.values - ba.values)) == pytest.approx(2.0, abs=1e-12)


def gaussian_probe(x):
    x = np.asarray(x, dtype=float)
    w = (x[..., 0] - 0.4) ** 2 + (x[..., 1] - 0.5) ** 2
    return np.exp(-3.0 * w + 1j * x[..., 0])


def test_H_commutation_fourth_order(skew):
    B = random_admissible_field(2, skew, 2, 0.4)
    V = random_mean_zero_field(3, skew, 2)
    pot = build_potential(B)
    r1 = H_commutation_residual(gaussian_probe, pot, V, 1, 1.0 / 128)
    r2 = H_commutation_residual(gaussian_probe, pot, V, 1, 1.0 / 256)
    ratio = r1 / r2
    assert 10.0 < ratio < 24.0, (r1, r2, ratio)


def test_H_commutation_wrong_phase_stagnates(skew):
    B = random_admissible_field(2, skew, 2, 0.4)
    V = random_mean_zero_field(3, skew, 2)
    pot = build_potential(B)
    e1 = np.asarray(skew.e1)
    v_bad = -0.5 * pot.b0 * np.array([e1[1], -e1[0]]) + np.array([0.1, 0.0])
    r1 = H_commutation_residual(gaussian_probe, pot, V, 1, 1.0 / 128, v_override=v_bad)
    r2 = H_commutation_residual(gaussian_probe, pot, V, 1, 1.0 / 256, v_override=v_bad)
    assert r1 > 1e-3
    assert r2 > 0.5 * r1  # no 4th-order decay in sight


def test_H_free_case_commutes(square):
    # A = 0, V = 0: plain Laplacian commutes with plain translation
    V0 = FourierField2D(square, 0.0, {})
    pot = build_potential(FourierField2D(square, 0.0, {}))

    def f(x):
        return np.exp(2j * np.pi * x[..., 0]) * np.cos(2 * np.pi * x[..., 1])

    r = H_commutation_residual(f, pot, V0, 2, 1.0 / 128)
    assert r <= 1e-7  # discretization error of the stencil alone


def test_a0_diagonal_exact(skew):
    B = random_admissible_field(4, skew, 3, 0.3)
    pot = build_potential(B)
    y = np.array([0.37, -0.21])
    assert a0(y, y, pot) == 1.0 + 0.0j


def test_a0_closed_form_example(square):
    pot = build_potential(FourierField2D(square, 2 * np.pi, {}))
    val = a0(np.array([1.0, 1.0]), np.array([0.0, 1.0]), pot)
    assert val == pytest.approx(-1.0 + 0.0j, abs=1e-15)


def test_a0_unimodular(skew, rng):
    B = random_admissible_field(4, skew, 3, 0.3)
    pot = build_potential(B)
    for _ in range(100):
        x, y = rng.uniform(-1.5, 1.5, 2), rng.uniform(-1.5, 1.5, 2)
        assert abs(abs(a0(x, y, pot)) - 1.0) <= 1e-14


def test_a0_quadrature_cross_check(skew, rng):
    # independent check of the closed-form line integral
    B = random_admissible_field(4, skew, 3, 0.3)
    pot = build_potential(B)
    x, y = np.array([0.8, -0.3]), np.array([-0.2, 0.4])
    r = x - y
    s = (np.arange(4096) + 0.5) / 4096
    pts = y[None, :] + s[:, None] * r[None, :]
    integrand = eval_A(pot, pts) @ r
    val = np.exp(1j * np.mean(integrand))
    assert abs(val - a0(x, y, pot)) <= 1e-8


def test_a0_gauge_property(skew, rng):
    from magtorus import MagneticPotential

    B = random_admissible_field(4, skew, 2, 0.3)
    pot = build_potential(B)
    # phi(x) = 2 Re(w e^{2 pi i beta.x}); grad phi adds 2 pi i beta w to c_beta
    w = 0.21 - 0.13j
    idx = (1, -2)
    beta = skew.dual_vector(*idx)
    shifted = dict(pot.a1coeffs)
    shifted[idx] = shifted.get(idx, np.zeros(2, dtype=complex)) + 2j * np.pi * w * beta
    nidx = (-idx[0], -idx[1])
    shifted[nidx] = shifted.get(nidx, np.zeros(2, dtype=complex)) + np.conj(2j * np.pi * w) * beta
    pot2 = MagneticPotential(skew, pot.b0, shifted)

    def phi(x):
        return 2 * (w * np.exp(2j * np.pi * (x @ beta))).real

    for _ in range(10):
        x, y = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        lhs = a0(x, y, pot2)
        rhs = a0(x, y, pot) * np.exp(1j * (phi(x) - phi(y)))
        assert abs(lhs - rhs) <= 1e-12


def test_transport_residual_decay(skew, rng):
    B = random_admissible_field(4, skew, 3, 0.3)
    pot = build_potential(B)
    x, y = np.array([0.8, -0.3]), np.array([-0.2, 0.4])
    assert transport_residual(y, y, pot, 1e-4) == 0.0
    r1 = transport_residual(x, y, pot, 1e-4)
    r2 = transport_residual(x, y, pot, 5e-5)
    assert r1 / r2 == pytest.approx(4.0, rel=0.15)
    # constant field: straight-segment transport is exact up to quadrature
    pot0 = build_potential(FourierField2D(skew, b0_for_unit_flux(skew), {}))
    assert transport_residual(x, y, pot0, 1e-4) <= 1e-6


def test_grid_function_validation(square):
    with pytest.raises(ValueError):
        GridFunction(square, 8, 0.0, 0.0, np.zeros((16, 16)))
    g = grid_function_from_callable(square, lambda x: x[..., 0], 16, (0.0, 1.0), (0.0, 1.0))
    assert g.values.shape == (16, 16)
    assert g.points().shape == (16, 16, 2)
