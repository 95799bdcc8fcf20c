"""Ahlfors map of a bounded multiply connected region.

The map is represented as

    omega(z) = c (z - a) prod (a - z_j)/(a - a_j) prod (z - a_j)/(z - z_j) exp((z - a) f(z))

where ``a`` and the ``a_j`` are its zeros, each ``z_j`` is a fixed point in
hole ``j`` and ``f`` is analytic.  ``|omega| = 1`` on the boundary turns into
a Riemann-Hilbert problem for ``f`` which :mod:`.rh_solver` handles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import Location, ParametrizedBoundary, classify_points
from .kernels import DiscreteOperators, DiscretizationContext, assemble
from .rh_solver import (NearBoundaryWarning, RHSolution, RHSystem, build_gamma,
                        cauchy_eval, solve_rh)

__all__ = [
    "AhlforsSolution",
    "CartesianGrid",
    "PolarGrid",
    "GridImage",
    "default_aux_points",
    "solve_ahlfors",
    "recover_c",
    "eval_omega",
    "boundary_omega",
    "zero_count",
    "derivative",
    "map_grid",
]


def default_aux_points(b: ParametrizedBoundary) -> list[complex]:
    """Node centroid of every hole."""
    return [b.hole_centroid(j) for j in range(b.m - 1)]


def recover_c(h, a: complex, zeros: Sequence[complex] = (), aux: Sequence[complex] = ()) -> float:
    """``c = omega'(a)`` from the mean of the per-curve constants ``h``."""
    log_c = -float(np.mean(h))
    for aj, zj in zip(zeros, aux):
        log_c -= np.log(abs(a - zj) / abs(a - aj))
    return float(np.exp(log_c))


@dataclass(frozen=True, eq=False)
class AhlforsSolution:
    ctx: DiscretizationContext
    ops: DiscreteOperators
    zeros: tuple
    aux: tuple
    rh: RHSolution
    c: float
    plain_cauchy: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def boundary(self) -> ParametrizedBoundary:
        return self.ctx.boundary

    @property
    def a(self) -> complex:
        return self.ctx.a

    def _prefactor(self, z):
        """``c (z-a) prod(...) prod(...)`` without the exponential."""
        a = self.a
        out = self.c * (z - a)
        for aj, zj in zip(self.zeros, self.aux):
            out = out * (a - zj) / (a - aj) * (z - aj) / (z - zj)
        return out

    def __call__(self, z):
        return eval_omega(self, z)


def solve_ahlfors(boundary: ParametrizedBoundary, a: complex,
                  zeros: Sequence[complex] = (), aux: Sequence[complex] | None = None,
                  plain_cauchy: bool = False, system: RHSystem | None = None,
                  ops: DiscreteOperators | None = None) -> AhlforsSolution:
    """Solve for the Ahlfors map with zeros ``a`` and ``zeros`` (known)."""
    ctx = DiscretizationContext(boundary, a)
    zeros = tuple(complex(z) for z in zeros)
    aux = tuple(complex(z) for z in (default_aux_points(boundary) if aux is None else aux))
    ops = ops or assemble(ctx)
    system = system or RHSystem(ops)
    gamma = build_gamma(ctx, zeros, aux)
    rh = solve_rh(ops, ctx, gamma, system)
    c = recover_c(rh.h, ctx.a, zeros, aux)
    sol = AhlforsSolution(ctx, ops, zeros, aux, rh, c, plain_cauchy)
    w = boundary_omega(sol)
    sol.diagnostics.update(
        boundary_modulus_error=float(np.abs(np.abs(w) - 1.0).max()),
        h_dispersion=rh.h_dispersion,
        h_raw_deviation=rh.h_raw_deviation,
        condition_estimate=rh.condition,
        residual=rh.residual,
    )
    return sol


def eval_omega(sol: AhlforsSolution, z):
    """Ahlfors map at interior points ``z`` (scalar or array)."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.size, dtype=complex)
    # exact zeros of the representation; skip the Cauchy sum there
    live = np.ones(z.size, dtype=bool)
    for root in (sol.a, *sol.zeros):
        live &= z != root
    if np.any(live):
        zz = z[live]
        f = cauchy_eval(sol.ctx, sol.rh.f_boundary, zz, plain=sol.plain_cauchy)
        out[live] = sol._prefactor(zz) * np.exp((zz - sol.a) * f)
    return out[0] if scalar else out


def boundary_omega(sol: AhlforsSolution, k=None):
    """Ahlfors map at boundary node(s) ``k`` (all nodes when ``None``).

    Uses the boundary values of ``f`` directly, so no quadrature is involved.
    """
    b = sol.boundary
    idx = np.arange(b.size) if k is None else k
    eta = b.eta[idx]
    af = sol.ctx.A[idx] * sol.rh.f_boundary[idx]
    return sol._prefactor(eta) * np.exp(af)


def zero_count(sol: AhlforsSolution) -> float:
    """Argument-principle count ``(1/2 pi i) \\oint omega'/omega``.

    ``d omega/dt`` along each curve comes from spectral (FFT) differentiation
    of the boundary values, the contour integral from the trapezoidal rule.
    """
    b = sol.boundary
    w = boundary_omega(sol).reshape(b.m, b.n)
    k = np.fft.fftfreq(b.n, 1.0 / b.n)
    k[b.n // 2] = 0.0  # drop the unpaired Nyquist mode
    dw = np.fft.ifft(1j * k * np.fft.fft(w, axis=1), axis=1)
    total = (dw / w).sum() * b.weight / (2j * np.pi)
    return float(total.real)


def derivative(sol: AhlforsSolution, z: complex, step: float | None = None) -> complex:
    """Centered difference ``omega'(z)`` with step ``1e-5 * diameter`` by default."""
    if step is None:
        step = 1e-5 * sol.boundary.diameter()
    return complex((eval_omega(sol, z + step) - eval_omega(sol, z - step)) / (2.0 * step))


@dataclass(frozen=True)
class CartesianGrid:
    """Horizontal and vertical lines over a box (the outer curve's bounding box by default)."""

    lines: int = 21
    points: int = 200
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def polylines(self, b: ParametrizedBoundary) -> list[np.ndarray]:
        outer = b.eta[b.curve(b.m - 1)]
        xlim = self.xlim or (outer.real.min(), outer.real.max())
        ylim = self.ylim or (outer.imag.min(), outer.imag.max())
        xs = np.linspace(*xlim, self.lines)
        ys = np.linspace(*ylim, self.lines)
        sx = np.linspace(*xlim, self.points)
        sy = np.linspace(*ylim, self.points)
        return [x + 1j * sy for x in xs] + [sx + 1j * y for y in ys]

    def to_dict(self) -> dict:
        out = {"kind": "cartesian", "lines": self.lines, "points": self.points}
        if self.xlim:
            out["xlim"] = list(self.xlim)
        if self.ylim:
            out["ylim"] = list(self.ylim)
        return out


@dataclass(frozen=True)
class PolarGrid:
    """Circles and rays about ``center`` between radii ``r_min`` and ``r_max``."""

    center: complex = 0j
    r_min: float = 0.0
    r_max: float = 1.0
    circles: int = 9
    rays: int = 24
    points: int = 200

    def polylines(self, b: ParametrizedBoundary) -> list[np.ndarray]:
        radii = self.r_min + (self.r_max - self.r_min) * np.arange(1, self.circles + 1) / (self.circles + 1)
        theta = 2 * np.pi * np.arange(self.points + 1) / self.points
        out = [self.center + r * np.exp(1j * theta) for r in radii]
        rr = np.linspace(self.r_min, self.r_max, self.points)
        for k in range(self.rays):
            out.append(self.center + rr * np.exp(2j * np.pi * k / self.rays))
        return out

    def to_dict(self) -> dict:
        return {"kind": "polar", "center": [self.center.real, self.center.imag],
                "r_min": self.r_min, "r_max": self.r_max, "circles": self.circles,
                "rays": self.rays, "points": self.points}


@dataclass
class GridImage:
    originals: list
    images: list
    dropped: int
    flagged: int


def _split_runs(line: np.ndarray, keep: np.ndarray) -> list[np.ndarray]:
    runs = []
    start = None
    for i, k in enumerate(np.append(keep, False)):
        if k and start is None:
            start = i
        elif not k and start is not None:
            if i - start >= 2:
                runs.append(line[start:i])
            start = None
    return runs


def map_grid(sol: AhlforsSolution, grid) -> GridImage:
    """Clip grid polylines to the region and map them through ``omega``.

    Points outside the region or within one node spacing of the boundary are
    dropped, splitting a polyline where needed.  ``flagged`` counts kept
    points close enough to the boundary to trigger a near-boundary warning.
    """
    b = sol.boundary
    originals, dropped = [], 0
    for line in grid.polylines(b):
        keep = classify_points(b, line) == Location.INSIDE
        dropped += int((~keep).sum())
        originals.extend(_split_runs(line, keep))
    if not originals:
        raise ValueError("grid has no points inside the region")
    flat = np.concatenate(originals)
    flagged = int((classify_points(b, flat, spacing_factor=5.0) == Location.NEAR_BOUNDARY).sum())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearBoundaryWarning)
        values = eval_omega(sol, flat)
    images = np.split(values, np.cumsum([len(p) for p in originals])[:-1])
    return GridImage(originals, images, dropped, flagged)
