"""Locating the unknown zeros ``a_1 ... a_{m-1}`` of the Ahlfors map.

For candidate zeros the Riemann-Hilbert problem always has a solution, and
it yields a function ``g`` (the product representation with ``c = 1``)
whose modulus on curve ``j`` is ``exp(h_j)``.  Two facts drive the search:

* ``h`` is uniform across curves exactly when ``g`` is a proper map onto a
  disk.  This only pins down an ``(m-1)``-dimensional family of candidates
  (for the annulus ``r < |z| < 1`` the whole circle ``|a_1| = r/|a|``), so
  uniformity alone does not identify the zeros.
* ``g / exp(max_j h_j)`` maps the region into the unit disk, so its
  derivative at ``a`` is bounded by the Ahlfors constant ``c`` with
  equality only at the true zeros.

:func:`find_zeros` maximizes ``log c`` subject to ``h_j = h_1``: a
Nelder-Mead simplex on a quadratic-penalty version gets close, then the
Lagrange conditions are solved with exact gradients (``h`` is affine in the
``log|eta - a_j|`` data).  Candidates are ranked by the exact criterion
``log|g'(a)| - max_j h_j``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize

from .geometry import Location, ParametrizedBoundary, classify_points
from .kernels import DiscretizationContext, assemble
from .rh_solver import RHSystem, SolverError, build_gamma, compute_h, solve_mu

__all__ = [
    "ZeroSearchConfig",
    "ZeroSearchResult",
    "ZeroProblem",
    "default_initial_guesses",
    "h_dispersion_objective",
    "find_zeros",
]

logger = logging.getLogger(__name__)


@dataclass
class ZeroSearchConfig:
    initial: Sequence[complex] | None = None
    max_iter: int = 4000
    tol: float = 1e-12
    penalty: float = 1e6
    xatol: float = 1e-10


@dataclass
class ZeroSearchResult:
    zeros: list
    objective: float
    iterations: int
    converged: bool
    log_c: float
    initial: list
    trace: list = field(default_factory=list)


def default_initial_guesses(b: ParametrizedBoundary, a: complex) -> list[complex]:
    """One guess per hole, on the far side of the hole from ``a``.

    The guess sits two hole radii from the hole centroid, pulled back toward
    the centroid until it lies in the region.
    """
    guesses = []
    for j in range(b.m - 1):
        center = b.hole_centroid(j)
        radius = float(np.abs(b.eta[b.curve(j)] - center).max())
        d = a - center
        direction = d / abs(d) if abs(d) > 0 else 1.0
        for scale in (2.0, 1.75, 1.5, 1.25, 1.1):
            g = center - scale * radius * direction
            if classify_points(b, [g])[0] == Location.INSIDE:
                guesses.append(complex(g))
                break
        else:
            raise ValueError(f"no default initial guess for hole {j}; supply one")
    return guesses


class ZeroProblem:
    """Fixed geometry, base point and auxiliary points; candidates vary.

    The operators are assembled and factored once.  ``h`` as a function of
    the candidates is ``h0 - L @ sum_j log|eta - a_j|`` with a precomputed
    ``(m, m*n)`` matrix ``L``.
    """

    def __init__(self, boundary: ParametrizedBoundary, a: complex,
                 aux: Sequence[complex] | None = None):
        if boundary.m < 2:
            raise ValueError("a simply connected region has no unknown zeros")
        self.boundary = b = boundary
        self.ctx = DiscretizationContext(boundary, a)
        self.a = self.ctx.a
        if aux is None:
            aux = [b.hole_centroid(j) for j in range(b.m - 1)]
        self.aux = [complex(z) for z in aux]
        self.ops = assemble(self.ctx)
        self.system = RHSystem(self.ops)

        M = self.ops.M1_mat - np.kron(np.eye(b.m), self.ops.K)
        R = self.system.solve(M)
        average = np.kron(np.eye(b.m), np.full((1, b.n), 1.0 / b.n))
        self.L = 0.5 * average @ (-M @ R - self.system.matrix)
        base = -np.log(np.abs(self.ctx.A))
        for zj in self.aux:
            base += np.log(np.abs(b.eta - zj))
        self.h0 = self.L @ base
        self.spacing = b.weight * max(b.speed_scale(j) for j in range(b.m))
        self.evaluations = 0

    @property
    def dim(self) -> int:
        return 2 * (self.boundary.m - 1)

    def to_points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x[0::2] + 1j * x[1::2]

    @staticmethod
    def to_vector(points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        return np.column_stack([pts.real, pts.imag]).ravel()

    def infeasibility(self, cands) -> float:
        """0 for admissible candidates, else a positive distance-like measure."""
        cands = np.atleast_1d(np.asarray(cands, dtype=complex))
        b = self.boundary
        loc = classify_points(b, cands)
        bad = 0.0
        for z, where in zip(cands, loc):
            d_bdry = float(np.abs(b.eta - z).min())
            if where != Location.INSIDE:
                bad += d_bdry if where == Location.OUTSIDE else self.spacing - d_bdry
            elif abs(z - self.a) < self.spacing:
                bad += self.spacing - abs(z - self.a)
        if bad == 0.0 and np.any(loc != Location.INSIDE):
            bad = self.spacing
        return bad

    def h(self, cands) -> np.ndarray:
        cands = np.atleast_1d(np.asarray(cands, dtype=complex))
        data = np.zeros(self.boundary.size)
        for z in cands:
            data += np.log(np.abs(self.boundary.eta - z))
        self.evaluations += 1
        return self.h0 - self.L @ data

    def h_jacobian(self, cands) -> np.ndarray:
        """``(m, 2(m-1))`` derivatives of ``h`` in (Re, Im) of each candidate."""
        cands = np.atleast_1d(np.asarray(cands, dtype=complex))
        cols = []
        for z in cands:
            d = self.boundary.eta - z
            r2 = np.abs(d) ** 2
            cols += [self.L @ (d.real / r2), self.L @ (d.imag / r2)]
        return np.column_stack(cols)

    def log_derivative_scale(self, cands) -> float:
        """``log|g'(a)| = sum_j log|a - a_j| - log|a - z_j|``."""
        cands = np.atleast_1d(np.asarray(cands, dtype=complex))
        return float(sum(np.log(abs(self.a - aj)) - np.log(abs(self.a - zj))
                         for aj, zj in zip(cands, self.aux)))

    def log_c(self, cands) -> float:
        """``log omega'(a)`` implied by the candidates (meaningful when h is uniform)."""
        return self.log_derivative_scale(cands) - float(np.mean(self.h(cands)))

    def extremal_objective(self, x) -> float:
        """``-(log|g'(a)| - max_j h_j)``, minimized by the true zeros."""
        cands = self.to_points(x)
        bad = self.infeasibility(cands)
        if bad > 0:
            return 1e6 + bad
        return -(self.log_derivative_scale(cands) - float(self.h(cands).max()))

    def penalized_objective(self, x, weight: float = 100.0) -> float:
        """``-log c`` plus ``weight`` times the squared spread of ``h``; smooth."""
        cands = self.to_points(x)
        bad = self.infeasibility(cands)
        if bad > 0:
            return 1e6 + bad
        h = self.h(cands)
        return -(self.log_derivative_scale(cands) - h.mean()) + weight * float(np.sum((h - h.mean()) ** 2))

    def dispersion(self, cands) -> float:
        h = self.h(cands)
        return float(np.sum((h[1:] - h[0]) ** 2))


def h_dispersion_objective(problem: ZeroProblem, cands, penalty: float = 1e6) -> float:
    """``sum_{j>=2} (h_j - h_1)^2`` from a full solve with the candidate zeros.

    Inadmissible candidates (outside the region, in a hole, within a node
    spacing of the boundary or of ``a``) get ``penalty`` plus a distance
    term and are not solved.
    """
    cands = [complex(z) for z in np.atleast_1d(cands)]
    bad = problem.infeasibility(cands)
    if bad > 0:
        return penalty + bad
    try:
        gamma = build_gamma(problem.ctx, cands, problem.aux)
        mu, _ = solve_mu(problem.ops, problem.ctx, gamma, problem.system)
        h, _, _ = compute_h(problem.ops, problem.ctx, gamma, mu, problem.system)
    except (ValueError, SolverError):
        return penalty
    return float(np.sum((h[1:] - h[0]) ** 2))


def _polish(problem: ZeroProblem, x0: np.ndarray):
    """Solve the Lagrange conditions for ``max log c`` subject to ``h_j = h_1``.

    Returns the refined point and the max-norm of the final residual.
    """
    k = problem.dim

    def pieces(x):
        cands = problem.to_points(x)
        h = problem.h(cands)
        jac_h = problem.h_jacobian(cands)
        u = problem.a - cands
        grad_scale = np.column_stack([-u.real, -u.imag]).ravel() / np.repeat(np.abs(u) ** 2, 2)
        grad = -(grad_scale - jac_h.mean(axis=0))
        return grad, h[1:] - h[0], jac_h[1:] - jac_h[0]

    grad, _, cjac = pieces(x0)
    lam0 = np.linalg.lstsq(cjac.T, -grad, rcond=None)[0]

    def kkt(y):
        g, c, cj = pieces(y[:k])
        return np.concatenate([g + cj.T @ y[k:], c])

    sol = scipy.optimize.root(kkt, np.concatenate([x0, lam0]), method="hybr",
                              options={"xtol": 1e-14})
    return sol.x[:k], float(np.abs(kkt(sol.x)).max())


def find_zeros(problem: ZeroProblem, config: ZeroSearchConfig | None = None) -> ZeroSearchResult:
    """Search for the zeros of the Ahlfors map other than ``a``.

    Deterministic: the initial simplex is built from the guesses alone.
    ``converged`` requires the simplex to have terminated and the returned
    candidates to make ``h`` uniform to ``config.tol``.
    """
    config = config or ZeroSearchConfig()
    b = problem.boundary
    initial = list(config.initial) if config.initial is not None else \
        default_initial_guesses(b, problem.a)
    if len(initial) != b.m - 1:
        raise ValueError(f"need {b.m - 1} initial guesses, got {len(initial)}")
    if problem.infeasibility(initial) > 0:
        raise ValueError(f"initial guesses {initial} are not admissible")

    x0 = problem.to_vector(initial)
    d = min(float(np.abs(b.eta - z).min()) for z in initial)
    d = min(d, min(abs(z - problem.a) for z in initial))
    step = 0.5 * d
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(problem.dim)])

    trace = []

    def record(xk):
        trace.append((len(trace) + 1, [complex(z) for z in problem.to_points(xk)],
                      problem.extremal_objective(xk)))

    res = scipy.optimize.minimize(
        problem.penalized_objective, x0, method="Nelder-Mead", callback=record,
        options={"initial_simplex": simplex, "xatol": config.xatol, "fatol": 1e-15,
                 "maxiter": config.max_iter, "maxfev": 4 * config.max_iter},
    )
    best = res.x
    iterations = int(res.nit)
    logger.info("simplex stage: %d iterations, penalized objective %.6e", iterations, res.fun)

    x_pol, residual = _polish(problem, best)
    if residual < 1e-9 and problem.infeasibility(problem.to_points(x_pol)) == 0 and \
            problem.extremal_objective(x_pol) <= problem.extremal_objective(best) + 1e-12:
        best = x_pol
        logger.info("polish stage accepted, residual %.2e", residual)
    else:
        logger.warning("polish stage rejected; keeping the simplex result")

    zeros = [complex(z) for z in problem.to_points(best)]
    objective = h_dispersion_objective(problem, zeros)
    converged = bool(res.success) and objective <= config.tol
    if not converged:
        logger.warning("zero search did not converge: %s, objective %.3e", res.message, objective)
    return ZeroSearchResult(zeros, objective, iterations, converged,
                            problem.log_c(zeros), [complex(z) for z in initial], trace)
