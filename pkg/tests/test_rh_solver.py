import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumann_ahlfors.kernels import DiscreteOperators, DiscretizationContext, assemble
from neumann_ahlfors.rh_solver import (NearBoundaryWarning, RHSystem, SolverError, boundary_f,
                                       build_gamma, cauchy_eval, compute_h, solve_mu, solve_rh)

from conftest import SQRT10, annulus, disk, disk_points


def mobius_f(z, a):
    """Closed-form f for the disk: omega = c (z-a) exp((z-a) f) is the Moebius map."""
    c = 1 / (1 - abs(a) ** 2)
    return (-np.log(c) - np.log(1 - np.conj(a) * z)) / (z - a)


def setup(b, a, zeros=(), aux=()):
    ctx = DiscretizationContext(b, a)
    ops = assemble(ctx)
    return ctx, ops, build_gamma(ctx, zeros, aux)


@pytest.fixture(scope="module")
def disk_half():
    ctx, ops, gamma = setup(disk(64), 0.5)
    return ctx, ops, gamma, solve_rh(ops, ctx, gamma)


def test_gamma_unit_disk_origin():
    _, _, gamma = setup(disk(16), 0)
    assert np.abs(gamma).max() <= 1e-15


def test_gamma_unit_disk_half():
    ctx, _, gamma = setup(disk(16), 0.5)
    np.testing.assert_allclose(gamma, -np.log(np.abs(np.exp(1j * ctx.boundary.t) - 0.5)), atol=1e-15)


def test_gamma_annulus():
    b = annulus(128)
    a = 1 / SQRT10
    ctx, _, gamma = setup(b, a, [-a], [0])
    eta = b.eta
    expected = -np.log(np.abs(eta - a)) - np.log(np.abs(eta + a)) + np.log(np.abs(eta))
    np.testing.assert_allclose(gamma, expected, atol=1e-14)


def test_gamma_validation():
    ctx = DiscretizationContext(annulus(64), 0.5)
    with pytest.raises(ValueError, match="need 1 zeros"):
        build_gamma(ctx, [], [])
    with pytest.raises(ValueError, match="auxiliary point"):
        build_gamma(ctx, [-0.2], [0.5])
    with pytest.raises(ValueError, match="not inside the region"):
        build_gamma(ctx, [0.1 + 1e-4j], [0])
    with pytest.raises(ValueError, match="not inside the region"):
        build_gamma(ctx, [0.05], [0])


def test_disk_origin_is_trivial():
    ctx, ops, gamma = setup(disk(16), 0)
    mu, residual = solve_mu(ops, ctx, gamma)
    h, disp, raw = compute_h(ops, ctx, gamma, mu)
    assert np.abs(mu).max() <= 1e-13 and residual <= 1e-13
    assert abs(h[0]) <= 1e-13 and disp <= 1e-13 and raw <= 1e-13
    assert np.abs(boundary_f(ctx, gamma, h, mu)).max() <= 1e-13


def test_disk_half_mu_and_h(disk_half):
    ctx, ops, gamma, rh = disk_half
    assert rh.residual <= 1e-12
    assert rh.h[0] == pytest.approx(-np.log(4 / 3), abs=1e-10)
    exact = mobius_f(ctx.boundary.eta, 0.5)
    np.testing.assert_allclose(rh.mu, np.imag(ctx.A * exact), atol=1e-9)


def test_boundary_f_matches_closed_form(disk_half):
    ctx, _, _, rh = disk_half
    assert np.abs(rh.f_boundary - mobius_f(ctx.boundary.eta, 0.5)).max() <= 1e-9


def test_reconstruction_identity(disk_half):
    ctx, _, gamma, rh = disk_half
    recovered = ctx.A * rh.f_boundary - 1j * rh.mu - gamma
    assert np.abs(recovered - rh.h[0]).max() <= 1e-13


def test_residual_annulus(annulus128):
    a = 1 / SQRT10
    ctx, ops, gamma = setup(annulus128, a, [-a], [0])
    mu, residual = solve_mu(ops, ctx, gamma)
    assert residual <= 1e-10 * np.abs(gamma).max()
    _, disp, _ = compute_h(ops, ctx, gamma, mu)
    assert disp <= 1e-8


def test_singular_system_raises():
    n = 8
    ops = DiscreteOperators(np.eye(n), np.zeros((n, n)), np.zeros((n, n)), np.zeros(n, int), 1, n)
    with pytest.raises(SolverError) as info:
        RHSystem(ops)
    assert info.value.condition > 1e12 or not np.isfinite(info.value.condition)


def test_cauchy_constant_is_exact():
    ctx = DiscretizationContext(annulus(64), 0.5)
    c0 = 0.3 - 1.7j
    z = np.array([0.5, -0.3 + 0.4j, 0.15j, 0.95])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        vals = cauchy_eval(ctx, np.full(ctx.boundary.size, c0), z)
    assert np.abs(vals - c0).max() <= 1e-15 * abs(c0) * 4


def test_cauchy_of_one_at_random_points():
    ctx = DiscretizationContext(annulus(64), 0.5)
    rng = np.random.default_rng(3)
    z = rng.uniform(0.2, 0.9, 10) * np.exp(2j * np.pi * rng.uniform(size=10))
    assert np.abs(cauchy_eval(ctx, np.ones(ctx.boundary.size), z) - 1).max() <= 1e-13
    plain = cauchy_eval(ctx, np.ones(ctx.boundary.size), z, plain=True)
    assert np.abs(plain - 1).max() <= 1e-6


def test_cauchy_disk_half_values(disk_half):
    ctx, _, _, rh = disk_half
    assert cauchy_eval(ctx, rh.f_boundary, 0) == pytest.approx(2 * np.log(4 / 3), abs=1e-10)
    assert cauchy_eval(ctx, rh.f_boundary, 0.5) == pytest.approx(2 / 3, abs=1e-9)
    z = disk_points(50, 0.8)
    ratio = np.abs(cauchy_eval(ctx, rh.f_boundary, z) - mobius_f(z, 0.5)).max()
    plain = np.abs(cauchy_eval(ctx, rh.f_boundary, z, plain=True) - mobius_f(z, 0.5)).max()
    assert ratio <= 1e-10
    # plain trapezoid error decays like |z|^n
    assert ratio < plain <= 10 * 0.8 ** 64


def test_cauchy_outside_and_near(disk_half):
    ctx, _, _, rh = disk_half
    with pytest.raises(ValueError, match="outside"):
        cauchy_eval(ctx, rh.f_boundary, 1.5)
    with pytest.warns(NearBoundaryWarning):
        cauchy_eval(ctx, rh.f_boundary, 0.99)


def test_f_boundary_spectral_convergence():
    errors = []
    for n in (16, 32, 64):
        ctx, ops, gamma = setup(disk(n), 0.5)
        rh = solve_rh(ops, ctx, gamma)
        errors.append(np.abs(rh.f_boundary - mobius_f(ctx.boundary.eta, 0.5)).max())
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] <= 1e-9


def test_h_raw_deviation_shrinks_on_analytic_curves():
    raw = []
    for n in (16, 32, 64):
        ctx, ops, gamma = setup(disk(n), 0.5)
        raw.append(solve_rh(ops, ctx, gamma).h_raw_deviation)
    assert raw[1] <= 0.25 * raw[0] and raw[2] <= 0.25 * raw[1]


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.0, 0.7), t=st.floats(0, 2 * np.pi))
def test_disk_h_matches_mobius_constant(r, t):
    a = r * np.exp(1j * t)
    ctx, ops, gamma = setup(disk(64), a)
    rh = solve_rh(ops, ctx, gamma)
    # h = -ln c with c = 1 / (1 - |a|^2)
    assert rh.h[0] == pytest.approx(np.log(1 - r * r), abs=1e-9)
    recovered = ctx.A * rh.f_boundary - 1j * rh.mu - gamma
    assert np.abs(recovered - rh.h[0]).max() <= 1e-13
