"""Hermitian operator algebra on small dense Hilbert spaces.

Operators are immutable wrappers around read-only complex numpy arrays.
Everything downstream (metrics, channels, verification) consumes the types
defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, UnphysicalStateError

# Validation tolerances for density operators and Bloch vectors.
TRACE_TOL = 1e-12
EIGENVALUE_TOL = 1e-12
BLOCH_TOL = 1e-12

# Jacobi stops once the off-diagonal Frobenius norm drops below this
# (scaled by ||H||_F for matrices larger than unit norm).
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _s in _SIGMA:
    _s.setflags(write=False)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix. The stored matrix is exactly ``(M + M^H) / 2``."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
        m = (m + m.conj().T) / 2
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    def _coerce(self, other) -> np.ndarray:
        m = other.matrix if isinstance(other, HermitianOperator) else np.asarray(other)
        if m.shape != self.matrix.shape:
            raise DimensionMismatchError(f"shape {m.shape} vs {self.matrix.shape}")
        return m

    def __add__(self, other) -> HermitianOperator:
        return HermitianOperator(self.matrix + self._coerce(other))

    def __sub__(self, other) -> HermitianOperator:
        return HermitianOperator(self.matrix - self._coerce(other))

    def __neg__(self) -> HermitianOperator:
        return HermitianOperator(-self.matrix)

    def __mul__(self, scalar: float) -> HermitianOperator:
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise TypeError("only real scalars preserve Hermiticity")
        return HermitianOperator(self.matrix * float(np.real(scalar)))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> HermitianOperator:
        return self * (1.0 / scalar)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self._coerce(other), rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class DensityOperator(HermitianOperator):
    """Unit-trace positive semidefinite Hermitian operator."""

    def __post_init__(self) -> None:
        super().__post_init__()
        tr = np.trace(self.matrix).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise UnphysicalStateError(f"trace {tr!r} differs from 1")
        lo = eigendecompose(self).eigenvalues[0]
        if lo < -EIGENVALUE_TOL:
            raise UnphysicalStateError(f"negative eigenvalue {lo!r}")

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True, eq=False)
class BlochVector:
    """Real 3-vector inside the closed unit ball."""

    p: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.p, dtype=float).reshape(-1)
        if v.shape != (3,):
            raise DimensionMismatchError(f"Bloch vector needs 3 components, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise UnphysicalStateError("non-finite Bloch vector")
        if np.linalg.norm(v) > 1.0 + BLOCH_TOL:
            raise UnphysicalStateError(f"|P| = {np.linalg.norm(v)!r} lies outside the Bloch ball")
        object.__setattr__(self, "p", _frozen(v))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.p))

    @property
    def direction(self) -> np.ndarray:
        m = self.norm
        if m == 0.0:
            raise UnphysicalStateError("the centre of the ball has no direction")
        return self.p / m

    def __array__(self, dtype=None, copy=None):
        return self.p if dtype is None else self.p.astype(dtype)

    def __iter__(self):
        return iter(self.p.tolist())

    def __repr__(self) -> str:
        return f"BlochVector({self.p.tolist()})"


@dataclass(frozen=True, eq=False)
class Eigensystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def pauli_basis() -> tuple[HermitianOperator, HermitianOperator, HermitianOperator]:
    return tuple(HermitianOperator(s) for s in _SIGMA)


def pauli_dot(v) -> np.ndarray:
    """Return ``v . sigma`` as a 2x2 complex array (v real, length 3)."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[z, x - 1j * y], [x + 1j * y, -z]], dtype=complex)


def density_from_bloch(p) -> DensityOperator:
    """Qubit state ``(I + P . sigma) / 2``.

    Raises:
        UnphysicalStateError: if ``|P| > 1 + BLOCH_TOL``.
    """
    bv = p if isinstance(p, BlochVector) else BlochVector(p)
    return DensityOperator((np.eye(2) + pauli_dot(bv.p)) / 2)


def bloch_from_density(rho: HermitianOperator) -> BlochVector:
    m = np.asarray(rho)
    if m.shape != (2, 2):
        raise DimensionMismatchError(f"Bloch chart needs a 2x2 operator, got {m.shape}")
    return BlochVector([np.trace(s @ m).real for s in _SIGMA])


_BELL_ALIASES = {
    "phi+": "phi+", "φ+": "phi+", "phi_plus": "phi+",
    "phi-": "phi-", "φ-": "phi-", "φ−": "phi-", "phi_minus": "phi-",
    "psi+": "psi+", "ψ+": "psi+", "psi_plus": "psi+",
    "psi-": "psi-", "ψ-": "psi-", "ψ−": "psi-", "psi_minus": "psi-",
}
BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


def canonical_bell_kind(kind: str) -> str:
    """Normalize ``"φ+"``, ``"PHI+"``, ``"phi_plus"`` etc. to ``"phi+"``."""
    key = kind.strip()
    key = key.lower() if key.isascii() else key
    try:
        return _BELL_ALIASES[key]
    except KeyError:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}") from None


def bell_vector(kind: str) -> np.ndarray:
    key = canonical_bell_kind(kind)
    v = np.zeros(4, dtype=complex)
    # basis order |00>, |01>, |10>, |11>
    if key.startswith("phi"):
        v[0], v[3] = 1.0, (1.0 if key.endswith("+") else -1.0)
    else:
        v[1], v[2] = 1.0, (1.0 if key.endswith("+") else -1.0)
    return v / math.sqrt(2.0)


def bell_state(kind: str) -> DensityOperator:
    v = bell_vector(kind)
    return DensityOperator(np.outer(v, v.conj()))


def _offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def eigendecompose(h, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Eigensystem:
    """Cyclic complex Jacobi eigensolver for small Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a_pq`` and then
    applies the real symmetric Schur rotation. Sweeps continue until the
    off-diagonal Frobenius norm is below ``JACOBI_TOL * max(1, ||H||_F)``.

    Returns eigenvalues in ascending order with matching eigenvector columns.

    Raises:
        ConvergenceError: if ``max_sweeps`` sweeps do not reach the threshold.
    """
    a = np.array(h.matrix if isinstance(h, HermitianOperator) else h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))

    sweeps = 0
    while _offdiag_norm(a) >= tol:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_offdiag_norm(a):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ u
                a[p, q] = a[q, p] = 0.0
                a[p, p], a[q, q] = a[p, p].real, a[q, q].real
        sweeps += 1

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return Eigensystem(_frozen(w[order]), _frozen(v[:, order].copy()))


# JSON encodings shared by every CLI subcommand.

def operator_to_json(op: HermitianOperator) -> dict:
    m = np.asarray(op)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def operator_from_json(obj: Mapping, cls: type[HermitianOperator] = HermitianOperator) -> HermitianOperator:
    try:
        dim = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed operator JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(f"operator JSON declares dim={dim} but carries {re.shape}/{im.shape}")
    return cls(re + 1j * im)


def bloch_to_json(p: BlochVector) -> dict:
    return {"p": np.asarray(p, dtype=float).tolist()}


def bloch_from_json(obj: Mapping) -> BlochVector:
    try:
        comps: Iterable = obj["p"]
        return BlochVector([float(c) for c in comps])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Bloch JSON: {exc}") from exc
