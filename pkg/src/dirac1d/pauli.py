"""2x2 complex matrix algebra: Pauli matrices and their exponentials.

States are length-2 complex ndarrays, operators are (2, 2) complex
ndarrays.  The closed form

    exp(-i(a*I + b.sigma)) = e^{-ia} (cos|b| I - i sin|b| (b.sigma)/|b|)

is exactly unitary up to roundoff, which is what makes the split-step
propagator norm-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "IDENTITY2",
    "PauliCoeffs",
    "pauli_matrix",
    "pauli_exp",
    "rotation_components",
    "apply",
    "conjugate_by_exp_sigma1",
]

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

_SMALL_B = 1e-8


@dataclass(frozen=True)
class PauliCoeffs:
    """Coefficients of a*I + b1*sigma1 + b2*sigma2 + b3*sigma3."""

    a: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0


def pauli_matrix(j: int) -> np.ndarray:
    """sigma_j for j in {1, 2, 3} (fresh copy)."""
    if j == 1:
        return SIGMA1.copy()
    if j == 2:
        return SIGMA2.copy()
    if j == 3:
        return SIGMA3.copy()
    raise ValueError(f"Pauli index must be 1, 2 or 3, got {j}")


def rotation_components(a, b1, b2, b3):
    """Entries (m00, m01, m10, m11) of exp(-i(a*I + b.sigma)).

    Broadcasts over arrays, so one call builds the per-mode kinetic
    factors or the per-node potential factors for a whole grid.
    For |b| < 1e-8 the removable singularity in sin|b|/|b| is handled
    by the two-term series (cos -> 1, sin|b|/|b| -> 1).
    """
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    b3 = np.asarray(b3, dtype=float)
    r = np.sqrt(b1 * b1 + b2 * b2 + b3 * b3)
    small = r < _SMALL_B
    safe_r = np.where(small, 1.0, r)
    with np.errstate(all="ignore"):
        s = np.where(small, 1.0, np.sin(safe_r) / safe_r)
    c = np.where(small, 1.0, np.cos(r))
    phase = np.exp(-1j * np.asarray(a, dtype=float))
    m00 = phase * (c - 1j * s * b3)
    m01 = phase * (-1j * s * b1 - s * b2)
    m10 = phase * (-1j * s * b1 + s * b2)
    m11 = phase * (c + 1j * s * b3)
    return m00, m01, m10, m11


def pauli_exp(coeffs: PauliCoeffs) -> np.ndarray:
    """exp(-i(a*I + b.sigma)) as a (2, 2) unitary matrix."""
    m00, m01, m10, m11 = rotation_components(
        coeffs.a, coeffs.b1, coeffs.b2, coeffs.b3
    )
    return np.array([[m00, m01], [m10, m11]], dtype=complex)


def apply(matrix: np.ndarray, spinor: np.ndarray) -> np.ndarray:
    """Matrix-vector product M s."""
    return matrix @ spinor


def conjugate_by_exp_sigma1(g: float, j: int) -> np.ndarray:
    """e^{+i sigma1 g} sigma_j e^{-i sigma1 g} for j in {2, 3}.

    Computed as the literal triple product; because sigma_j
    anticommutes with sigma1 this equals sigma_j e^{-2i sigma1 g}.
    """
    if j not in (2, 3):
        raise ValueError(f"conjugation is defined for j in {{2, 3}}, got {j}")
    left = pauli_exp(PauliCoeffs(b1=-g))
    right = pauli_exp(PauliCoeffs(b1=g))
    return left @ pauli_matrix(j) @ right
