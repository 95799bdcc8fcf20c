"""Generalized Neumann kernel, its conjugate kernel, and Nyström matrices.

With ``A(t) = eta(t) - a`` both kernels come from one complex bracket

    B(s, t) = A(s)/A(t) * eta'(t) / (eta(t) - eta(s)),

``N = Im(B)/pi`` (continuous) and ``M = Re(B)/pi`` (cotangent singular).
On each curve we split ``M(s,t) = -cot((s-t)/2)/(2 pi) + M1(s,t)`` with
``M1`` continuous, and treat the cotangent part by the odd-offset
(Wittich) conjugation rule.  All other integrals use the trapezoidal rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import Location, ParametrizedBoundary, point_in_region

__all__ = [
    "DiscretizationContext",
    "DiscreteOperators",
    "neumann_kernel",
    "m1_kernel",
    "conjugation_matrix",
    "conjugation_quadrature",
    "assemble",
    "apply_M",
]


@dataclass(frozen=True, eq=False)
class DiscretizationContext:
    """Boundary plus base point ``a``; ``A = eta - a`` at the nodes."""

    boundary: ParametrizedBoundary
    a: complex
    A: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = complex(self.a)
        object.__setattr__(self, "a", a)
        loc = point_in_region(self.boundary, a)
        if loc is not Location.INSIDE:
            raise ValueError(f"base point a={a} is not inside the region ({loc.label})")
        A = self.boundary.eta - a
        A.setflags(write=False)
        object.__setattr__(self, "A", A)


def _diagonal_limit(ctx: DiscretizationContext, k) -> np.ndarray:
    # constant term of B(t+d, t) as d -> 0, after removing the 1/(t-s) pole
    b = ctx.boundary
    return b.ddeta[k] / (2.0 * b.deta[k]) - b.deta[k] / ctx.A[k]


def _bracket(ctx: DiscretizationContext, s_idx: int, t_idx: int) -> complex:
    b = ctx.boundary
    return (ctx.A[s_idx] / ctx.A[t_idx]) * b.deta[t_idx] / (b.eta[t_idx] - b.eta[s_idx])


def neumann_kernel(ctx: DiscretizationContext, s_idx: int, t_idx: int) -> float:
    """``N(s_i, t_j)``, with the Taylor limit on the diagonal."""
    if s_idx == t_idx:
        return float(np.imag(_diagonal_limit(ctx, t_idx)) / np.pi)
    return float(np.imag(_bracket(ctx, s_idx, t_idx)) / np.pi)


def m1_kernel(ctx: DiscretizationContext, s_idx: int, t_idx: int) -> float:
    """Smooth remainder ``M(s,t) + cot((s-t)/2)/(2 pi)`` for nodes on one curve."""
    b = ctx.boundary
    if b.component[s_idx] != b.component[t_idx]:
        raise ValueError("m1_kernel is only defined for nodes on the same curve")
    if s_idx == t_idx:
        return float(np.real(_diagonal_limit(ctx, t_idx)) / np.pi)
    ds = (s_idx - t_idx) * b.weight
    M = np.real(_bracket(ctx, s_idx, t_idx)) / np.pi
    return float(M + 0.5 / np.tan(ds / 2.0) / np.pi)


@lru_cache(maxsize=16)
def _conjugation_matrix(n: int) -> np.ndarray:
    offsets = np.arange(n)
    # row i, column j depends on (i - j) mod n only
    diff = (offsets[:, None] - offsets[None, :]) % n
    odd = diff % 2 == 1
    K = np.zeros((n, n))
    K[odd] = (2.0 / n) / np.tan(np.pi * diff[odd] / n)
    K.setflags(write=False)
    return K


def conjugation_matrix(n: int) -> np.ndarray:
    """Matrix of the discrete conjugation operator on ``n`` periodic nodes.

    ``(K mu)(s) = (1/2 pi) p.v. int mu(t) cot((s-t)/2) dt``; the odd-offset
    rule is exact on trigonometric polynomials of degree below ``n/2``
    (``K cos(k.) = sin(k.)``, ``K sin(k.) = -cos(k.)``, ``K 1 = 0``).
    """
    if n % 2:
        raise ValueError(f"conjugation quadrature needs even n, got {n}")
    return _conjugation_matrix(int(n))


def conjugation_quadrature(samples, i: int) -> float:
    samples = np.asarray(samples, dtype=float)
    return float(conjugation_matrix(samples.size)[i] @ samples)


@dataclass(frozen=True, eq=False)
class DiscreteOperators:
    """Nyström matrices for one context.

    ``N_mat`` holds ``w*N(s_i, t_j)``.  ``M1_mat`` holds ``w*M1`` in the
    diagonal blocks and ``w*M`` (smooth there) in the off-diagonal blocks.
    ``K`` is the per-curve conjugation matrix.
    """

    N_mat: np.ndarray
    M1_mat: np.ndarray
    K: np.ndarray
    component: np.ndarray
    m: int
    n: int


def assemble(ctx: DiscretizationContext) -> DiscreteOperators:
    b = ctx.boundary
    eta, deta, A = b.eta, b.deta, ctx.A
    size = b.size
    w = b.weight

    diff = eta[None, :] - eta[:, None]
    diag = np.eye(size, dtype=bool)
    diff[diag] = 1.0
    B = (A[:, None] / A[None, :]) * deta[None, :] / diff
    B[diag] = _diagonal_limit(ctx, np.arange(size))

    N_mat = (w / np.pi) * B.imag
    M = B.real / np.pi

    same = b.component[:, None] == b.component[None, :]
    local = np.arange(size) % b.n
    ds = (local[:, None] - local[None, :]) * w
    off = same & ~diag
    M[off] += 0.5 / np.tan(ds[off] / 2.0) / np.pi
    M1_mat = w * M

    for arr in (N_mat, M1_mat):
        arr.setflags(write=False)
    return DiscreteOperators(N_mat, M1_mat, conjugation_matrix(b.n), b.component, b.m, b.n)


def apply_M(ops: DiscreteOperators, x) -> np.ndarray:
    """Apply the singular operator ``M`` to node values ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (ops.m * ops.n,):
        raise ValueError(f"expected {ops.m * ops.n} node values, got shape {x.shape}")
    out = ops.M1_mat @ x
    blocks = x.reshape(ops.m, ops.n)
    out -= (blocks @ ops.K.T).ravel()
    return out
