import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neumann_ahlfors.kernels import DiscretizationContext
from neumann_ahlfors.rh_solver import build_gamma, compute_h, solve_mu
from neumann_ahlfors.zeros import (ZeroProblem, ZeroSearchConfig, default_initial_guesses,
                                   find_zeros, h_dispersion_objective)

from conftest import SQRT10, annulus, disk


def oracle(a):
    return -0.1 / np.conj(a)


@pytest.fixture(scope="module")
def problem_half(annulus128):
    return ZeroProblem(annulus128, 0.5, [0])


@pytest.fixture(scope="module")
def problem_symmetric(annulus128):
    return ZeroProblem(annulus128, 1 / SQRT10, [0])


def test_objective_at_true_zeros(problem_half, problem_symmetric):
    assert h_dispersion_objective(problem_symmetric, [-1 / SQRT10]) <= 1e-14
    assert h_dispersion_objective(problem_half, [-0.2]) <= 1e-14


def test_objective_at_wrong_zero(problem_half):
    assert h_dispersion_objective(problem_half, [0.7]) > 1e-4


@pytest.mark.parametrize("name", ["half", "symmetric"])
def test_objective_separation(name, problem_half, problem_symmetric):
    problem, a1 = (problem_half, -0.2) if name == "half" else (problem_symmetric, -1 / SQRT10)
    best = h_dispersion_objective(problem, [a1])
    assert best <= 1e-12
    for d in (0.05, -0.05, 0.05j, -0.05j):
        assert h_dispersion_objective(problem, [a1 + d]) >= 1e4 * max(best, 1e-30)
        assert h_dispersion_objective(problem, [a1 + d]) > 1e-6


def test_dispersion_alone_is_degenerate(problem_half):
    # every point on |a1| = 0.1/|a| gives uniform h; only -0.1/conj(a) is extremal
    best = problem_half.extremal_objective(problem_half.to_vector([-0.2]))
    for theta in (2.5, 1.5, 0.8, -2.0):
        other = 0.2 * np.exp(1j * theta)
        assert h_dispersion_objective(problem_half, [other]) <= 1e-12
        assert best < problem_half.extremal_objective(problem_half.to_vector([other])) - 1e-3


@pytest.mark.parametrize("cand", [2.0, 0.05, 0.5, 0.1 + 1e-3j, 1.0])
def test_infeasible_candidates_are_penalized(problem_half, cand):
    value = h_dispersion_objective(problem_half, [cand])
    assert value >= 1e6
    assert value == h_dispersion_objective(problem_half, [cand])


def test_affine_h_matches_full_solve(problem_half):
    rng = np.random.default_rng(11)
    ctx = problem_half.ctx
    for _ in range(5):
        cand = rng.uniform(0.2, 0.9) * np.exp(2j * np.pi * rng.uniform())
        if abs(cand - 0.5) < 0.1:
            continue
        gamma = build_gamma(ctx, [cand], [0])
        mu, _ = solve_mu(problem_half.ops, ctx, gamma, problem_half.system)
        h, _, _ = compute_h(problem_half.ops, ctx, gamma, mu, problem_half.system)
        assert np.abs(problem_half.h([cand]) - h).max() <= 1e-12


def test_h_jacobian_matches_finite_differences(two_holes):
    problem = ZeroProblem(two_holes, 0.05 + 0.4j)
    x = problem.to_vector([-0.8 - 0.1j, 0.9 - 0.3j])
    jac = problem.h_jacobian(problem.to_points(x))
    step = 1e-6
    for k in range(problem.dim):
        e = np.zeros(problem.dim)
        e[k] = step
        fd = (problem.h(problem.to_points(x + e)) - problem.h(problem.to_points(x - e))) / (2 * step)
        assert np.abs(fd - jac[:, k]).max() <= 1e-7


@pytest.mark.parametrize("a,guess,expected", [
    (0.5, -0.1 + 0.05j, -0.2),
    (1 / SQRT10, -0.25, -1 / SQRT10),
    (0.36 + 0.48j, -0.15, oracle(0.36 + 0.48j)),
    (0.36 + 0.48j, None, oracle(0.36 + 0.48j)),
])
def test_find_zeros_annulus(annulus128, a, guess, expected):
    problem = ZeroProblem(annulus128, a, [0])
    result = find_zeros(problem, ZeroSearchConfig(initial=None if guess is None else [guess]))
    assert result.converged
    assert abs(result.zeros[0] - expected) <= 1e-6
    assert result.objective <= 1e-12
    assert result.iterations > 0 and len(result.trace) == result.iterations


def test_guess_on_the_inner_circle_is_rejected(annulus128):
    problem = ZeroProblem(annulus128, 0.36 + 0.48j, [0])
    with pytest.raises(ValueError, match="not admissible"):
        find_zeros(problem, ZeroSearchConfig(initial=[-0.1]))


def test_wrong_guess_count_rejected(problem_half):
    with pytest.raises(ValueError, match="need 1"):
        find_zeros(problem_half, ZeroSearchConfig(initial=[-0.3, 0.3]))


def test_simply_connected_has_nothing_to_search():
    with pytest.raises(ValueError, match="no unknown zeros"):
        ZeroProblem(disk(16), 0.2)


def test_default_guess_is_inside(annulus128):
    for a in (0.5, 0.3j, -0.4 - 0.4j):
        g = default_initial_guesses(annulus128, a)[0]
        assert 0.1 < abs(g) < 1 and np.real(g * np.conj(a)) < 0


def test_iteration_cap_flags_non_convergence(problem_half):
    result = find_zeros(problem_half, ZeroSearchConfig(initial=[-0.5 + 0.3j], max_iter=3))
    assert not result.converged
    assert len(result.zeros) == 1 and np.isfinite(result.objective)


def test_search_is_deterministic(problem_half):
    cfg = ZeroSearchConfig(initial=[-0.1 + 0.05j])
    r1, r2 = find_zeros(problem_half, cfg), find_zeros(problem_half, cfg)
    assert r1.zeros == r2.zeros and r1.objective == r2.objective
    assert r1.trace == r2.trace


def test_two_holes_independent_of_start(two_holes):
    problem = ZeroProblem(two_holes, 0.05 + 0.4j)
    starts = [None, [-0.5 - 0.25j, 0.6 + 0.25j], [-0.9 + 0.3j, 1.0 - 0.5j]]
    found = []
    for s in starts:
        result = find_zeros(problem, ZeroSearchConfig(initial=s))
        assert result.converged
        found.append(result.zeros)
    for z in found[1:]:
        assert np.abs(np.array(z) - np.array(found[0])).max() <= 1e-8


@settings(max_examples=5, deadline=None)
@given(r=st.floats(0.2, 0.8), t=st.floats(0, 2 * np.pi))
def test_oracle_agreement_random_base_points(r, t):
    a = r * np.exp(1j * t)
    problem = ZeroProblem(annulus(64), a, [0])
    result = find_zeros(problem)
    assert abs(result.zeros[0] - oracle(a)) <= 1e-5
