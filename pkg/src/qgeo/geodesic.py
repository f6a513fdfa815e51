"""Lift of the Bloch ball to the unit 3-sphere, great circles, and their
images under depolarization.

The lift ``P -> (sqrt(1 - |P|^2), P)`` turns the statistical line element
into the round metric of S^3, so geodesics are great circles
``a cos s + b sin s``. Depolarization contracts the spatial part by
``f = 1 - 4p/3`` and recomputes ``P^0`` so the image stays on S^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import contraction_factor
from .errors import (
    DegenerateSeedError,
    DimensionMismatchError,
    NegativeP0Error,
    SingularStateError,
    UnphysicalStateError,
)
from .hilbert import BLOCH_TOL, BlochVector
from .metric import EIGENVALUE_FLOOR

UNIT_TOL = 1e-12
RADICAND_CLAMP = 1e-12
DEGENERATE_TOL = 1e-10


def _vec4(v, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (4,):
        raise DimensionMismatchError(f"{name} must have 4 components, got {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class FourBlochVector:
    """Point ``(P0, P1, P2, P3)`` on the unit 3-sphere."""

    mu: np.ndarray

    def __post_init__(self) -> None:
        v = _vec4(self.mu, "four-vector").copy()
        n = math.sqrt(float(v @ v))
        if abs(n - 1.0) > UNIT_TOL:
            raise UnphysicalStateError(f"|P^mu| = {n!r} is not 1")
        v.setflags(write=False)
        object.__setattr__(self, "mu", v)

    @property
    def p0(self) -> float:
        return float(self.mu[0])

    @property
    def spatial(self) -> np.ndarray:
        return self.mu[1:]

    @property
    def physical(self) -> bool:
        return self.mu[0] >= -UNIT_TOL

    def __array__(self, dtype=None, copy=None):
        return self.mu if dtype is None else self.mu.astype(dtype)

    def __repr__(self) -> str:
        return f"FourBlochVector({self.mu.tolist()})"


@dataclass(frozen=True, eq=False)
class GeodesicFrame:
    """Orthonormal pair ``(a, b)`` spanning a great circle."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a, b = _vec4(self.a, "a").copy(), _vec4(self.b, "b").copy()
        if abs(a @ a - 1) > UNIT_TOL or abs(b @ b - 1) > UNIT_TOL or abs(a @ b) > UNIT_TOL:
            raise UnphysicalStateError("frame vectors must be orthonormal")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def lift(p) -> FourBlochVector:
    bv = p if isinstance(p, BlochVector) else BlochVector(p)
    m2 = float(bv.p @ bv.p)
    # BlochVector admits |P| up to 1 + BLOCH_TOL
    rad = 1.0 - m2
    if rad < -3 * BLOCH_TOL:
        raise UnphysicalStateError(f"|P|^2 = {m2!r} > 1")
    return FourBlochVector(np.concatenate(([math.sqrt(max(rad, 0.0))], bv.p)))


def project(v) -> BlochVector:
    mu = v.mu if isinstance(v, FourBlochVector) else FourBlochVector(v).mu
    if mu[0] < -UNIT_TOL:
        raise NegativeP0Error(f"P0 = {mu[0]!r} < 0 has no physical preimage")
    return BlochVector(mu[1:])


def lift_tangent(p, dp) -> np.ndarray:
    """Push a Bloch-ball displacement ``dP`` forward to the sphere.

    The fourth component is ``dP0 = -(P.dP) / sqrt(1 - |P|^2)``, so the
    Euclidean norm squared of the result equals the statistical line
    element at ``P``.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    den = 1.0 - float(p @ p)
    if den <= EIGENVALUE_FLOOR:
        raise SingularStateError("the lift is not differentiable on the boundary")
    return np.concatenate(([-float(p @ dp) / math.sqrt(den)], dp))


def frame_from_seed(u, v) -> GeodesicFrame:
    """Gram-Schmidt ``(u, v)`` into an orthonormal frame.

    Raises:
        DegenerateSeedError: ``u`` vanishes or ``v`` is (nearly) parallel to it.
    """
    u, v = _vec4(u, "u"), _vec4(v, "v")
    nu = np.linalg.norm(u)
    if nu < DEGENERATE_TOL:
        raise DegenerateSeedError("first seed vector is zero")
    a = u / nu
    w = v - (v @ a) * a
    nw = np.linalg.norm(w)
    if nw < DEGENERATE_TOL:
        raise DegenerateSeedError("seed vectors are linearly dependent")
    b = w / nw
    # one re-orthogonalization pass keeps a.b at rounding level
    b = b - (b @ a) * a
    b /= np.linalg.norm(b)
    return GeodesicFrame(a, b)


def geodesic_points(frame: GeodesicFrame, s) -> np.ndarray:
    """Array form of :func:`geodesic_point`: shape ``s.shape + (4,)``."""
    s = np.asarray(s, dtype=float)[..., None]
    return frame.a * np.cos(s) + frame.b * np.sin(s)


def geodesic_point(frame: GeodesicFrame, s: float) -> FourBlochVector:
    return FourBlochVector(geodesic_points(frame, s))


def deform_points(mu, prob: float) -> np.ndarray:
    """Array form of :func:`deform_point`, broadcasting over leading axes."""
    f = contraction_factor(prob)
    mu = np.asarray(mu, dtype=float)
    if mu.shape[-1:] != (4,):
        raise DimensionMismatchError(f"four-vectors expected, got {mu.shape}")
    p0 = mu[..., 0]
    # 1 - f^2 (1 - P0^2) rearranged so that small P0^2 survives rounding
    rad = p0 * p0 + (1.0 - f * f) * (1.0 - p0 * p0)
    if np.any(rad < -RADICAND_CLAMP):
        raise UnphysicalStateError("deformed P0 radicand is negative; input is off the sphere")
    out = np.empty_like(mu)
    out[..., 0] = np.sqrt(np.maximum(rad, 0.0))
    out[..., 1:] = f * mu[..., 1:]
    return out


def deform_point(v, prob: float) -> FourBlochVector:
    """Image of a sphere point under depolarization with error probability ``prob``:

        P'0 = sqrt(1 - f^2 (1 - P0^2)),   P'k = f Pk,   f = 1 - 4 prob / 3

    Points with ``P0 < 0`` are accepted; the image always has ``P'0 >= 0``.
    """
    mu = v.mu if isinstance(v, FourBlochVector) else FourBlochVector(v).mu
    return FourBlochVector(deform_points(mu, prob))


@dataclass(frozen=True)
class GeodesicSample:
    s: float
    undeformed: FourBlochVector
    deformed: FourBlochVector

    @property
    def physical(self) -> bool:
        return self.undeformed.physical


def arc_grid(count: int) -> np.ndarray:
    """``count`` arc-length values evenly spaced on ``[0, 2 pi)``."""
    if count < 2:
        raise ValueError(f"need at least 2 samples, got {count}")
    return 2.0 * np.pi * np.arange(count) / count


def sample_geodesic(frame: GeodesicFrame, prob: float, count: int) -> list[GeodesicSample]:
    s = arc_grid(count)
    und = geodesic_points(frame, s)
    dfm = deform_points(und, prob)
    return [
        GeodesicSample(float(si), FourBlochVector(u), FourBlochVector(d))
        for si, u, d in zip(s, und, dfm)
    ]


CSV_HEADER = ("s", "P0", "P1", "P2", "P3", "Q0", "Q1", "Q2", "Q3", "physical_flag")


def sample_rows(samples: list[GeodesicSample]) -> list[tuple]:
    """Flatten samples to CSV rows matching :data:`CSV_HEADER`."""
    return [
        (smp.s, *smp.undeformed.mu.tolist(), *smp.deformed.mu.tolist(), int(smp.physical))
        for smp in samples
    ]
