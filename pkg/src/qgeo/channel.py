"""Qubit depolarizing channel: Kraus form, Bell-state action, Bloch contraction."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, ProbabilityRangeError
from .hilbert import (
    _SIGMA,
    BlochVector,
    DensityOperator,
    HermitianOperator,
    bell_state,
)

# Beyond this the contraction factor changes sign (the Bloch ball is inverted).
FULL_RANDOMIZATION = 0.75


def check_probability(prob: float) -> float:
    prob = float(prob)
    if not 0.0 <= prob <= 1.0:
        raise ProbabilityRangeError(f"error probability {prob!r} outside [0, 1]")
    return prob


def contraction_factor(prob: float) -> float:
    """``1 - 4 prob / 3``: the factor by which the Bloch vector shrinks."""
    return 1.0 - 4.0 * check_probability(prob) / 3.0


def kraus_operators(prob: float, *, dim: int = 2) -> list[np.ndarray]:
    """Kraus operators ``sqrt(1-p) I, sqrt(p/3) sigma_i`` acting on the first
    qubit of a ``dim``-dimensional space (``dim`` = 2 or 4)."""
    prob = check_probability(prob)
    ops = [np.sqrt(1.0 - prob) * np.eye(2)] + [np.sqrt(prob / 3.0) * s for s in _SIGMA]
    if dim == 2:
        return ops
    if dim == 4:
        return [np.kron(k, np.eye(2)) for k in ops]
    raise DimensionMismatchError(f"depolarizing acts on 2 or 4 dimensions, not {dim}")


def _apply_kraus(rho: np.ndarray, prob: float) -> np.ndarray:
    return sum(k @ rho @ k.conj().T for k in kraus_operators(prob, dim=rho.shape[0]))


def depolarize(rho: HermitianOperator, prob: float) -> DensityOperator:
    """``(1-p) rho + (p/3) sum_i sigma_i rho sigma_i`` for a qubit state."""
    prob = check_probability(prob)
    m = np.asarray(rho)
    if m.shape != (2, 2):
        raise DimensionMismatchError(f"qubit channel needs a 2x2 state, got {m.shape}")
    out = (1.0 - prob) * m + (prob / 3.0) * sum(s @ m @ s for s in _SIGMA)
    return DensityOperator(out)


def depolarize_bloch(p, prob: float) -> BlochVector:
    v = p if isinstance(p, BlochVector) else BlochVector(p)
    return BlochVector(contraction_factor(prob) * v.p)


def bell_closed_form(prob: float, kind: str = "phi+") -> np.ndarray:
    """``(4p/3) I/4 + (1 - 4p/3) rho_bell`` as a plain array."""
    f = contraction_factor(prob)
    return (1.0 - f) * np.eye(4) / 4.0 + f * bell_state(kind).matrix


def depolarize_bell_with_deviation(prob: float, kind: str = "phi+") -> tuple[DensityOperator, float]:
    """Depolarize qubit A of a Bell state through the full 4x4 Kraus sum
    with operators ``K_i (x) I``.

    Returns the output state together with its largest entrywise deviation
    from the closed randomization form.
    """
    out = _apply_kraus(bell_state(kind).matrix, prob)
    dev = float(np.max(np.abs(out - bell_closed_form(prob, kind))))
    return DensityOperator(out), dev


def depolarize_bell(prob: float, kind: str = "phi+") -> DensityOperator:
    state, dev = depolarize_bell_with_deviation(prob, kind)
    if dev > 1e-12:
        raise ArithmeticError(f"Kraus and closed-form Bell outputs differ by {dev:.3e}")
    return state
