"""Riemann-Hilbert problem ``Re[A f] = gamma + h`` via the Neumann-kernel equation.

For known right-hand side ``gamma`` the boundary function ``mu = Im[A f]``
solves ``(I - N) mu = -M gamma``, the piecewise constant ``h`` is
``[M mu - (I - N) gamma] / 2`` and ``A f = gamma + h + i mu`` on the boundary.
Interior values of ``f`` follow from a discrete Cauchy integral.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .geometry import Location, ParametrizedBoundary, classify_points, winding_numbers
from .kernels import DiscreteOperators, DiscretizationContext, apply_M

__all__ = [
    "RHSolution",
    "SolverError",
    "NearBoundaryWarning",
    "build_gamma",
    "RHSystem",
    "solve_mu",
    "compute_h",
    "boundary_f",
    "cauchy_eval",
    "solve_rh",
]

MAX_CONDITION = 1e12
# Cauchy sums lose accuracy within a few node spacings of a curve
CAUCHY_NEAR_FACTOR = 5.0


class SolverError(RuntimeError):
    """The discrete integral equation is singular or too ill-conditioned."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class NearBoundaryWarning(UserWarning):
    """A Cauchy integral was evaluated too close to the boundary to be trusted."""


def build_gamma(ctx: DiscretizationContext, zeros: Sequence[complex] = (),
                aux: Sequence[complex] = ()) -> np.ndarray:
    """Known part of the boundary data for the Ahlfors map.

    ``gamma = -ln|eta - a| - sum ln|eta - a_j| + sum ln|eta - z_j|`` where the
    ``a_j`` are the other zeros (inside the region) and ``z_j`` lies in hole j.
    """
    b = ctx.boundary
    zeros = [complex(x) for x in zeros]
    aux = [complex(x) for x in aux]
    if len(zeros) != b.m - 1 or len(aux) != b.m - 1:
        raise ValueError(f"need {b.m - 1} zeros and {b.m - 1} auxiliary points, "
                         f"got {len(zeros)} and {len(aux)}")
    if zeros:
        wind = winding_numbers(b, aux)
        for j, z in enumerate(aux):
            if abs(wind[j, j] + 1.0) > 0.5 or abs(wind.sum(axis=0)[j]) > 0.5:
                raise ValueError(f"auxiliary point {j} = {z} is not inside hole {j}")
        loc = classify_points(b, zeros)
        for j, (z, where) in enumerate(zip(zeros, loc)):
            if where != Location.INSIDE:
                raise ValueError(f"zero {j} = {z} is not inside the region ({Location(where).label})")

    gamma = -np.log(np.abs(ctx.A))
    for aj, zj in zip(zeros, aux):
        gamma += np.log(np.abs(b.eta - zj)) - np.log(np.abs(b.eta - aj))
    return gamma


class RHSystem:
    """LU-factored ``I - N`` for one context, reusable for many right-hand sides."""

    def __init__(self, ops: DiscreteOperators):
        self.ops = ops
        size = ops.m * ops.n
        self.matrix = np.eye(size) - ops.N_mat
        self.condition = float(np.linalg.cond(self.matrix))
        if not np.isfinite(self.condition) or self.condition > MAX_CONDITION:
            raise SolverError("I - N is numerically singular; check the geometry and base point",
                              self.condition)
        self._lu = scipy.linalg.lu_factor(self.matrix)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, rhs)

    def mu(self, gamma: np.ndarray) -> np.ndarray:
        return self.solve(-apply_M(self.ops, gamma))

    def h_pointwise(self, gamma: np.ndarray, mu: np.ndarray) -> np.ndarray:
        return 0.5 * (apply_M(self.ops, mu) - self.matrix @ gamma)


def solve_mu(ops: DiscreteOperators, ctx: DiscretizationContext, gamma,
             system: RHSystem | None = None) -> tuple[np.ndarray, float]:
    """Solve ``(I - N) mu = -M gamma``; returns ``mu`` and the max-norm residual."""
    system = system or RHSystem(ops)
    gamma = np.asarray(gamma, dtype=float)
    mu = system.mu(gamma)
    residual = float(np.abs(system.matrix @ mu + apply_M(ops, gamma)).max())
    return mu, residual


def compute_h(ops: DiscreteOperators, ctx: DiscretizationContext, gamma, mu,
              system: RHSystem | None = None) -> tuple[np.ndarray, float, float]:
    """Per-curve values of ``h`` and two spread diagnostics.

    Returns ``(h, h_dispersion, h_raw_deviation)``: ``h`` holds the curve
    averages of the pointwise formula, ``h_dispersion = max_j |h_j - h_1|``
    and ``h_raw_deviation`` the largest deviation of a pointwise value from
    its curve average.
    """
    system = system or RHSystem(ops)
    pointwise = system.h_pointwise(np.asarray(gamma, dtype=float), np.asarray(mu, dtype=float))
    blocks = pointwise.reshape(ops.m, ops.n)
    h = blocks.mean(axis=1)
    raw = float(np.abs(blocks - h[:, None]).max())
    dispersion = float(np.abs(h - h[0]).max())
    return h, dispersion, raw


def boundary_f(ctx: DiscretizationContext, gamma, h, mu) -> np.ndarray:
    """Boundary values ``f = (gamma + h + i mu) / A``."""
    h_nodes = np.asarray(h, dtype=float)[ctx.boundary.component]
    return (np.asarray(gamma) + h_nodes + 1j * np.asarray(mu)) / ctx.A


def cauchy_eval(ctx: DiscretizationContext, f_boundary, z, plain: bool = False):
    """Interior values of ``f`` from its boundary values.

    By default the trapezoidal Cauchy sum is divided by the same sum applied
    to ``f = 1``, which is exact for constants and stays accurate close to
    the boundary.  ``plain=True`` uses the unnormalized sum.  Points outside
    the region raise ``ValueError``; points near a curve produce a
    :class:`NearBoundaryWarning`.
    """
    b = ctx.boundary
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    loc = classify_points(b, z)
    if np.any(loc == Location.OUTSIDE):
        bad = z[loc == Location.OUTSIDE][0]
        raise ValueError(f"point {bad} is outside the region")
    near = classify_points(b, z, spacing_factor=CAUCHY_NEAR_FACTOR) == Location.NEAR_BOUNDARY
    if np.any(near):
        warnings.warn(f"{int(near.sum())} point(s) within {CAUCHY_NEAR_FACTOR:g} node spacings "
                      "of the boundary", NearBoundaryWarning, stacklevel=2)

    f_boundary = np.asarray(f_boundary, dtype=complex)
    out = np.empty(z.size, dtype=complex)
    # chunked to bound memory for large point sets
    for start in range(0, z.size, 2048):
        zz = z[start:start + 2048]
        q = b.deta[None, :] / (b.eta[None, :] - zz[:, None])
        num = q @ f_boundary
        if plain:
            out[start:start + 2048] = num * b.weight / (2j * np.pi)
        else:
            out[start:start + 2048] = num / q.sum(axis=1)
    return out[0] if scalar else out


@dataclass(frozen=True, eq=False)
class RHSolution:
    """Solution of one Riemann-Hilbert problem on the discrete boundary."""

    gamma: np.ndarray
    mu: np.ndarray
    h: np.ndarray
    h_dispersion: float
    h_raw_deviation: float
    f_boundary: np.ndarray
    residual: float
    condition: float


def solve_rh(ops: DiscreteOperators, ctx: DiscretizationContext, gamma,
             system: RHSystem | None = None) -> RHSolution:
    """Run :func:`solve_mu`, :func:`compute_h` and :func:`boundary_f` in turn."""
    system = system or RHSystem(ops)
    gamma = np.asarray(gamma, dtype=float)
    mu, residual = solve_mu(ops, ctx, gamma, system)
    h, dispersion, raw = compute_h(ops, ctx, gamma, mu, system)
    f = boundary_f(ctx, gamma, h, mu)
    return RHSolution(gamma, mu, h, dispersion, raw, f, residual, system.condition)
