"""Boundary curves of a bounded multiply connected region and their sampling.

The boundary consists of ``m`` smooth Jordan curves, the last of which
encloses the others.  Every curve is parametrized on ``[0, 2*pi)`` and
sampled at the same ``n`` equidistant nodes; samples are stored
component-major, so curve ``j`` occupies ``slice(j*n, (j+1)*n)``.

Orientation follows the usual convention that the region lies to the left
of the boundary: the outer curve runs counterclockwise, holes clockwise.
Specs with the wrong direction are silently reversed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "CurveSpec",
    "ParametrizedBoundary",
    "Location",
    "GeometryError",
    "discretize",
    "winding_numbers",
    "point_in_region",
    "classify_points",
]

TWO_PI = 2.0 * np.pi


class GeometryError(ValueError):
    """Invalid curve specification or boundary configuration."""


@dataclass(frozen=True)
class CurveSpec:
    """One closed curve, as a circle, an ellipse or a trigonometric polynomial.

    Use the :meth:`circle`, :meth:`ellipse` and :meth:`trig` constructors.
    ``reversed`` flips the parameter direction before orientation is
    normalized; it only matters for reproducing a parametrization exactly.
    """

    kind: str
    center: complex = 0j
    radius: float = 1.0
    semi_axes: tuple[float, float] = (1.0, 1.0)
    rotation: float = 0.0
    # Fourier coefficients {k: c_k} of eta(t) = sum_k c_k exp(i k t)
    coefficients: tuple[tuple[int, complex], ...] = ()
    reversed: bool = False

    def __post_init__(self):
        if self.kind == "circle":
            if not self.radius > 0:
                raise GeometryError(f"circle radius must be positive, got {self.radius}")
        elif self.kind == "ellipse":
            if len(self.semi_axes) != 2 or not min(self.semi_axes) > 0:
                raise GeometryError(f"ellipse semi-axes must be two positive reals, got {self.semi_axes}")
        elif self.kind == "trig":
            if not self.coefficients or all(k == 0 for k, _ in self.coefficients):
                raise GeometryError("trig curve needs at least one non-constant coefficient")
        else:
            raise GeometryError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def circle(cls, center=0j, radius=1.0, reversed=False) -> "CurveSpec":
        return cls("circle", center=complex(center), radius=float(radius), reversed=reversed)

    @classmethod
    def ellipse(cls, center=0j, semi_axes=(1.0, 1.0), rotation=0.0, reversed=False) -> "CurveSpec":
        axes = tuple(float(s) for s in semi_axes)
        return cls("ellipse", center=complex(center), semi_axes=axes,
                   rotation=float(rotation), reversed=reversed)

    @classmethod
    def trig(cls, coefficients, reversed=False) -> "CurveSpec":
        """``coefficients`` is a mapping ``{k: c_k}`` or an iterable of pairs."""
        items = coefficients.items() if hasattr(coefficients, "items") else coefficients
        coeffs = tuple(sorted((int(k), complex(c)) for k, c in items))
        return cls("trig", coefficients=coeffs, reversed=reversed)

    def evaluate(self, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``eta(t)``, ``eta'(t)``, ``eta''(t)`` for the spec as written."""
        t = np.asarray(t, dtype=float)
        sign = -1.0 if self.reversed else 1.0
        s = sign * t
        if self.kind == "circle":
            e = np.exp(1j * s)
            eta = self.center + self.radius * e
            deta = 1j * self.radius * e
            ddeta = -self.radius * e
        elif self.kind == "ellipse":
            p, q = self.semi_axes
            rot = np.exp(1j * self.rotation)
            eta = self.center + rot * (p * np.cos(s) + 1j * q * np.sin(s))
            deta = rot * (-p * np.sin(s) + 1j * q * np.cos(s))
            ddeta = rot * (-p * np.cos(s) - 1j * q * np.sin(s))
        else:
            eta = np.zeros(t.shape, dtype=complex)
            deta = np.zeros(t.shape, dtype=complex)
            ddeta = np.zeros(t.shape, dtype=complex)
            for k, c in self.coefficients:
                e = c * np.exp(1j * k * s)
                eta += e
                deta += 1j * k * e
                ddeta -= k * k * e
        # chain rule for t -> -t
        return eta, sign * deta, ddeta

    def flipped(self) -> "CurveSpec":
        return replace(self, reversed=not self.reversed)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "circle":
            out.update(center=[self.center.real, self.center.imag], radius=self.radius)
        elif self.kind == "ellipse":
            out.update(center=[self.center.real, self.center.imag],
                       semi_axes=list(self.semi_axes), rotation=self.rotation)
        else:
            out["coefficients"] = [[k, [c.real, c.imag]] for k, c in self.coefficients]
        if self.reversed:
            out["reversed"] = True
        return out


def _signed_area(eta: np.ndarray, deta: np.ndarray) -> float:
    # trapezoidal rule for (1/2) Im of the integral of conj(eta) deta
    return 0.5 * float(np.mean(np.imag(np.conj(eta) * deta))) * TWO_PI


def _polygon_winding(nodes: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Winding number of the closed polygon through ``nodes`` about each ``z``."""
    d = nodes[None, :] - np.asarray(z, dtype=complex).reshape(-1, 1)
    turn = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(turn.sum(axis=1) / TWO_PI).astype(int)


@dataclass(frozen=True, eq=False)
class ParametrizedBoundary:
    """Node samples of ``eta``, ``eta'`` and ``eta''`` on all ``m`` curves.

    Attributes
    ----------
    m : int
        Connectivity; curve ``m-1`` (zero based) is the outer one.
    n : int
        Nodes per curve (even).
    eta, deta, ddeta : (m*n,) complex ndarray
        Component-major samples at ``t_i = 2*pi*i/n``.
    specs : tuple of CurveSpec
        Curve specs after orientation correction.
    """

    m: int
    n: int
    eta: np.ndarray
    deta: np.ndarray
    ddeta: np.ndarray
    specs: tuple = ()
    component: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "component", np.repeat(np.arange(self.m), self.n))
        for arr in (self.eta, self.deta, self.ddeta):
            arr.setflags(write=False)
        self.component.setflags(write=False)

    @property
    def size(self) -> int:
        return self.m * self.n

    @property
    def weight(self) -> float:
        """Trapezoidal weight ``2*pi/n``."""
        return TWO_PI / self.n

    @property
    def t(self) -> np.ndarray:
        """Parameter values of the ``n`` nodes (shared by every curve)."""
        return TWO_PI * np.arange(self.n) / self.n

    def curve(self, j: int) -> slice:
        return slice(j * self.n, (j + 1) * self.n)

    def speed_scale(self, j: int) -> float:
        """Largest ``|eta'|`` on curve ``j``."""
        return float(np.abs(self.deta[self.curve(j)]).max())

    def hole_centroid(self, j: int) -> complex:
        return complex(self.eta[self.curve(j)].mean())

    def diameter(self) -> float:
        outer = self.eta[self.curve(self.m - 1)]
        return float(np.abs(outer[:, None] - outer[None, :]).max())


def discretize(specs: Sequence[CurveSpec], n: int) -> ParametrizedBoundary:
    """Sample the curves at ``n`` equidistant nodes each.

    The last spec is the outer curve.  Orientation is corrected so that the
    region is on the left, and the nesting is checked: every hole must lie
    inside the outer curve and outside the other holes.
    """
    if isinstance(n, bool) or int(n) != n or n < 4 or n % 2:
        raise GeometryError(f"n must be an even integer >= 4, got {n}")
    n = int(n)
    specs = list(specs)
    if not specs:
        raise GeometryError("at least one curve is required")

    t = TWO_PI * np.arange(n) / n
    m = len(specs)
    fixed = []
    samples = []
    for j, spec in enumerate(specs):
        eta, deta, ddeta = spec.evaluate(t)
        if np.abs(deta).min() <= 1e-12 * max(1.0, np.abs(eta).max()):
            raise GeometryError(f"curve {j}: derivative vanishes at a node")
        area = _signed_area(eta, deta)
        want_ccw = j == m - 1
        if (area > 0) != want_ccw:
            spec = spec.flipped()
            eta, deta, ddeta = spec.evaluate(t)
        fixed.append(spec)
        samples.append((eta, deta, ddeta))

    outer = samples[-1][0]
    for j in range(m - 1):
        nodes = samples[j][0]
        if np.any(_polygon_winding(outer, nodes) != 1):
            raise GeometryError(f"curve {j} is not enclosed by the outer curve")
        for k in range(m - 1):
            if k != j and np.any(_polygon_winding(samples[k][0], nodes) != 0):
                raise GeometryError(f"curves {j} and {k} overlap or are nested")

    eta, deta, ddeta = (np.concatenate([s[i] for s in samples]) for i in range(3))
    return ParametrizedBoundary(m, n, eta, deta, ddeta, tuple(fixed))


class Location(enum.IntEnum):
    OUTSIDE = 0
    INSIDE = 1
    NEAR_BOUNDARY = 2

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")


def winding_numbers(b: ParametrizedBoundary, z) -> np.ndarray:
    """Trapezoidal approximation of ``(1/2 pi i) \\oint d eta / (eta - z)``.

    Returns an ``(m, len(z))`` real array, one row per curve.  Values are not
    rounded; near a curve they are unreliable.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty((b.m, z.size))
    for j in range(b.m):
        sl = b.curve(j)
        q = b.deta[sl][None, :] / (b.eta[sl][None, :] - z[:, None])
        out[j] = (q.sum(axis=1) * b.weight / (2j * np.pi)).real
    return out


def classify_points(b: ParametrizedBoundary, z, spacing_factor: float = 1.0) -> np.ndarray:
    """Vectorized :func:`point_in_region`; returns an int array of :class:`Location` codes.

    A point is near the boundary when it is closer to some curve ``j`` than
    ``spacing_factor * 2*pi*max|eta_j'|/n``, the node spacing on that curve.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    near = np.zeros(z.size, dtype=bool)
    for j in range(b.m):
        sl = b.curve(j)
        dist = np.abs(b.eta[sl][None, :] - z[:, None]).min(axis=1)
        near |= dist < spacing_factor * b.weight * b.speed_scale(j)
    with np.errstate(divide="ignore", invalid="ignore"):
        total = winding_numbers(b, z).sum(axis=0)
    out = np.full(z.size, int(Location.OUTSIDE))
    out[np.abs(total - 1.0) < 0.5] = Location.INSIDE
    out[near] = Location.NEAR_BOUNDARY
    return out


def point_in_region(b: ParametrizedBoundary, z: complex) -> Location:
    """Classify ``z`` as inside the region, outside it, or too near a curve."""
    return Location(classify_points(b, [z])[0])
