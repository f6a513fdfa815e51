"""Line elements on the qubit state space.

Three families live here:

* the statistical distinguishability metric ``tr[drho L_rho(drho)]``, in
  operator form (any dimension) and in closed Bloch-ball form, before and
  after depolarization;
* the Fubini-Study metric on pure states, both exact (overlap) and as the
  quadratic form in probability/phase coordinates;
* the qubit Bures distance and its infinitesimal version.

Tangent inputs are finite arrays and line elements are evaluated as exact
quadratic forms on them. The closed-form functions broadcast over leading
axes so that large samples can be evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import contraction_factor
from .errors import (
    DimensionMismatchError,
    NegativeRadicandError,
    QGeoError,
    SingularStateError,
    UnphysicalStateError,
    ZeroProbabilityError,
)
from .hilbert import (
    TRACE_TOL,
    DensityOperator,
    HermitianOperator,
    eigendecompose,
)

# Denominators p_j + p_k, 1 - m^2 and 1/4 - x^2 at or below this are singular.
EIGENVALUE_FLOOR = 1e-10
# Bures radicands (det rho, fidelity term) above -RADICAND_CLAMP round up to 0.
RADICAND_CLAMP = 1e-12
PROB_SUM_TOL = 1e-12


class TangentOperator(HermitianOperator):
    """Traceless Hermitian operator: a displacement ``drho`` of a state."""

    def __post_init__(self) -> None:
        super().__post_init__()
        tr = np.trace(self.matrix).real
        if abs(tr) > TRACE_TOL:
            raise QGeoError(f"tangent operator must be traceless, trace = {tr!r}")


def _check_dims(a: HermitianOperator, b: HermitianOperator) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension {a.dim} vs {b.dim}")


def raising(rho: HermitianOperator, form: HermitianOperator) -> HermitianOperator:
    """Map a 1-form ``B`` to the vector ``(rho B + B rho) / 2``."""
    _check_dims(rho, form)
    r, b = rho.matrix, form.matrix
    return HermitianOperator((r @ b + b @ r) / 2)


def lowering(rho: HermitianOperator, vec: HermitianOperator) -> HermitianOperator:
    """Inverse of :func:`raising`: solve ``(rho X + X rho) / 2 = A`` for ``X``.

    Solved in the eigenbasis of ``rho``, where ``X_jk = 2 A_jk / (p_j + p_k)``.

    Raises:
        SingularStateError: if ``rho`` has an eigenvalue at or below
            ``EIGENVALUE_FLOOR`` (the metric blows up on the boundary).
    """
    _check_dims(rho, vec)
    es = eigendecompose(rho)
    w = es.eigenvalues
    if w[0] <= EIGENVALUE_FLOOR:
        raise SingularStateError(
            f"smallest eigenvalue {w[0]:.3e} is at or below the floor {EIGENVALUE_FLOOR:g}"
        )
    u = es.eigenvectors
    a = u.conj().T @ vec.matrix @ u
    x = 2.0 * a / (w[:, None] + w[None, :])
    return HermitianOperator(u @ x @ u.conj().T)


def line_element_operator(rho: HermitianOperator, drho: HermitianOperator) -> float:
    """``tr[drho L_rho(drho)]`` for a state ``rho`` and displacement ``drho``."""
    x = lowering(rho, drho)
    val = float(np.trace(drho.matrix @ x.matrix).real)
    return max(val, 0.0)


def _as_vec3(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.shape[-1:] != (3,):
        raise DimensionMismatchError(f"{name} must have trailing dimension 3, got {arr.shape}")
    return arr


def _scalar_or_array(a: np.ndarray):
    return float(a) if np.ndim(a) == 0 else a


def line_element_bloch(p, dp):
    """``dP.dP + (P.dP)^2 / (1 - |P|^2)`` on the open Bloch ball.

    ``p`` and ``dp`` broadcast over leading axes; a scalar comes back for
    single points.
    """
    p = _as_vec3(p, "p")
    dp = _as_vec3(dp, "dp")
    m2 = np.sum(p * p, axis=-1)
    den = 1.0 - m2
    if np.any(den <= EIGENVALUE_FLOOR):
        raise SingularStateError("1 - |P|^2 is at or below the singularity floor")
    dd = np.sum(dp * dp, axis=-1)
    pd = np.sum(p * dp, axis=-1)
    return _scalar_or_array(dd + pd * pd / den)


def line_element_depolarized(p, dp, prob: float):
    """Line element between depolarized neighbours, written in the undeformed
    coordinates: with ``f = 1 - 4 prob / 3``,

        f^2 dP.dP + f^4 (P.dP)^2 / (1 - f^2 |P|^2).
    """
    f = contraction_factor(prob)
    p = _as_vec3(p, "p")
    dp = _as_vec3(dp, "dp")
    m2 = np.sum(p * p, axis=-1)
    if np.any(1.0 - m2 <= EIGENVALUE_FLOOR):
        raise SingularStateError("1 - |P|^2 is at or below the singularity floor")
    f2 = f * f
    den = 1.0 - f2 * m2
    if np.any(den <= EIGENVALUE_FLOOR):
        raise SingularStateError("1 - f^2 |P|^2 is at or below the singularity floor")
    dd = np.sum(dp * dp, axis=-1)
    pd = np.sum(p * dp, axis=-1)
    return _scalar_or_array(f2 * dd + f2 * f2 * pd * pd / den)


@dataclass(frozen=True, eq=False)
class PureStateChart:
    """Pure state ``sum_k sqrt(p_k) exp(i phi_k) |k>`` in (probability, phase)
    coordinates."""

    probs: np.ndarray
    phases: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float).reshape(-1)
        ph = np.array(self.phases, dtype=float).reshape(-1)
        if p.shape != ph.shape:
            raise DimensionMismatchError(f"{p.size} probabilities vs {ph.size} phases")
        if np.any(p < 0):
            raise UnphysicalStateError("negative probability in pure-state chart")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise UnphysicalStateError(f"probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "phases", ph)

    @property
    def dim(self) -> int:
        return self.probs.size

    def ket(self) -> np.ndarray:
        return np.sqrt(self.probs) * np.exp(1j * self.phases)

    def projector(self) -> np.ndarray:
        v = self.ket()
        return np.outer(v, v.conj())

    def perturbed(self, dprobs, dphases) -> PureStateChart:
        return PureStateChart(self.probs + np.asarray(dprobs, float), self.phases + np.asarray(dphases, float))


def _check_charts(a: PureStateChart, b: PureStateChart) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"chart dimension {a.dim} vs {b.dim}")


def fubini_study_overlap(psi: PureStateChart, psi2: PureStateChart) -> float:
    """``1 - |<psi2|psi>|^2``."""
    _check_charts(psi, psi2)
    ov = np.vdot(psi2.ket(), psi.ket())
    return float(min(max(1.0 - abs(ov) ** 2, 0.0), 1.0))


def fubini_study_quadratic(psi: PureStateChart, dprobs, dphases) -> float:
    """Quadratic Fubini-Study form in (probability, phase) coordinates:

        (1/4) sum dp_k^2 / p_k + sum p_k dphi_k^2 - (sum p_k dphi_k)^2

    Raises:
        ZeroProbabilityError: a nonzero ``dp_k`` is attached to ``p_k = 0``.
    """
    dp = np.asarray(dprobs, dtype=float).reshape(-1)
    dphi = np.asarray(dphases, dtype=float).reshape(-1)
    if dp.shape != (psi.dim,) or dphi.shape != (psi.dim,):
        raise DimensionMismatchError("perturbation length does not match chart dimension")
    if abs(dp.sum()) > PROB_SUM_TOL:
        raise QGeoError(f"probability perturbation must sum to 0, got {dp.sum()!r}")
    p = psi.probs
    zero = p == 0.0
    if np.any(zero & (dp != 0.0)):
        raise ZeroProbabilityError("dp_k != 0 where p_k = 0")
    fisher = np.sum(dp[~zero] ** 2 / p[~zero]) / 4.0
    mean_phase = np.sum(p * dphi)
    val = fisher + np.sum(p * dphi**2) - mean_phase**2
    return float(max(val, 0.0))


def pure_state_line_element(psi: PureStateChart, dpsi: PureStateChart) -> float:
    """``2 tr[(rho' - rho)^2]`` for the projectors onto two pure states."""
    _check_charts(psi, dpsi)
    d = dpsi.projector() - psi.projector()
    return float(2.0 * np.sum(np.abs(d) ** 2))


def pure_chart_from_bloch(p) -> PureStateChart:
    """Chart of the qubit pure state with unit Bloch vector ``p``.

    Uses ``|psi> = cos(t/2)|0> + exp(i phi) sin(t/2)|1>``; the phase is set
    to 0 at the poles where it is undefined.
    """
    x, y, z = _as_vec3(p, "p")
    m = math.sqrt(x * x + y * y + z * z)
    if abs(m - 1.0) > 1e-9:
        raise UnphysicalStateError(f"pure qubit states need |P| = 1, got {m!r}")
    z = min(max(z / m, -1.0), 1.0)
    phi = math.atan2(y, x) if (x != 0.0 or y != 0.0) else 0.0
    return PureStateChart([(1.0 + z) / 2.0, (1.0 - z) / 2.0], [0.0, phi])


def fubini_study_bloch(p, dp) -> float:
    """Overlap form ``1 - |<psi'|psi>|^2`` between the pure qubit states with
    Bloch vectors ``P`` and ``(P + dP) / |P + dP|``."""
    q = _as_vec3(p, "p") + _as_vec3(dp, "dp")
    nq = float(np.linalg.norm(q))
    if nq == 0.0:
        raise UnphysicalStateError("P + dP vanishes; the displaced state is undefined")
    return fubini_study_overlap(pure_chart_from_bloch(p), pure_chart_from_bloch(q / nq))


@dataclass(frozen=True, eq=False)
class BuresPoint:
    """Qubit state as ``I/2 + x.sigma`` together with ``b = sqrt(det rho)``."""

    x: np.ndarray
    b: float

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float).reshape(-1)
        if x.shape != (3,):
            raise DimensionMismatchError("Bures point needs a 3-vector x")
        if float(x @ x) > 0.25 + 1e-12:
            raise UnphysicalStateError(f"|x| = {math.sqrt(x @ x)!r} exceeds 1/2")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def from_x(cls, x) -> BuresPoint:
        x = np.asarray(x, dtype=float)
        return cls(x, math.sqrt(max(0.25 - float(x @ x), 0.0)))

    @classmethod
    def from_density(cls, rho: HermitianOperator) -> BuresPoint:
        x, b = _bures_coords(rho)
        return cls(x, b)


def _bures_coords(rho: HermitianOperator) -> tuple[np.ndarray, float]:
    m = np.asarray(rho)
    if m.shape != (2, 2):
        raise DimensionMismatchError(f"Bures distance is implemented for qubits only, got {m.shape}")
    x = np.array([m[0, 1].real, -m[0, 1].imag, (m[0, 0].real - m[1, 1].real) / 2.0])
    det = float((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real)
    if det < -RADICAND_CLAMP:
        raise NegativeRadicandError(f"det rho = {det!r} < 0")
    return x, math.sqrt(max(det, 0.0))


def bures_distance(r1: DensityOperator, r2: DensityOperator) -> float:
    """Closed-form qubit Bures distance.

    With ``x_k`` the half-Bloch vectors, ``b_k = sqrt(det rho_k)`` and
    ``alpha_k = sqrt(x_k^2 + b_k^2)``:

        d^2 = 2 (alpha_1 + alpha_2) - 2^{3/2} sqrt(alpha_1 alpha_2 + x_1.x_2 + b_1 b_2)
    """
    x1, b1 = _bures_coords(r1)
    x2, b2 = _bures_coords(r2)
    a1 = math.sqrt(float(x1 @ x1) + b1 * b1)
    a2 = math.sqrt(float(x2 @ x2) + b2 * b2)
    inner = a1 * a2 + float(x1 @ x2) + b1 * b2
    if inner < -RADICAND_CLAMP:
        raise NegativeRadicandError(f"fidelity radicand {inner!r} < 0")
    # A - B evaluated as (A^2 - B^2) / (A + B); for these coordinates
    # A^2 - B^2 = 4 (|x1 - x2|^2 + (b1 - b2)^2), so nearby states do not
    # lose their leading digits to cancellation.
    big = 2.0 * (a1 + a2) + 2.0**1.5 * math.sqrt(max(inner, 0.0))
    dx = x1 - x2
    chord2 = 4.0 * (float(dx @ dx) + (b1 - b2) ** 2)
    return math.sqrt(chord2 / big) if big > 0.0 else 0.0


def bures_line_element(pt, dx):
    """``dx.dx + (x.dx)^2 / (1/4 - x^2)``.

    ``pt`` is a :class:`BuresPoint` or a raw ``x`` array (broadcasting over
    leading axes like :func:`line_element_bloch`).
    """
    x = pt.x if isinstance(pt, BuresPoint) else _as_vec3(pt, "x")
    dx = _as_vec3(dx, "dx")
    den = 0.25 - np.sum(x * x, axis=-1)
    if np.any(den <= EIGENVALUE_FLOOR):
        raise SingularStateError("1/4 - x^2 is at or below the singularity floor")
    xd = np.sum(x * dx, axis=-1)
    return _scalar_or_array(np.sum(dx * dx, axis=-1) + xd * xd / den)


def bures_line_element_depolarized(x, dx, prob: float):
    """Bures line element between the depolarized images ``f x`` and ``f (x + dx)``."""
    f = contraction_factor(prob)
    return bures_line_element(f * _as_vec3(x, "x"), f * _as_vec3(dx, "dx"))
