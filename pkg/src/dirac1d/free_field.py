"""Closed-form solutions of the free 1+1D Dirac equation.

A plane-wave mode is u(p) e^{i(p x - E t)} with (sigma1 p + sigma3 m) u
= E u and E = +-sqrt(p^2 + m^2).  Finite superpositions of such modes
stay exact under time evolution, which keeps the analytic side of every
solver comparison closed-form.

Phase convention (the eigenproblem fixes u only up to a phase): the
upper component is real and nonnegative on the positive branch, the
lower component on the negative branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigError, ValidationError

__all__ = [
    "Branch",
    "PlaneWaveMode",
    "FreeSolutionSpec",
    "dispersion",
    "plane_wave_spinor",
    "eval_free",
    "gaussian_packet",
    "grid_aligned_packet",
]

Branch = Literal["positive", "negative"]


def dispersion(p: float, m: float) -> float:
    """Relativistic energy +sqrt(p^2 + m^2); the caller applies the branch sign."""
    if m <= 0:
        raise ValidationError(f"mass must be positive, got {m}")
    return math.hypot(p, m)


def plane_wave_spinor(p: float, m: float, branch: Branch = "positive") -> np.ndarray:
    """Normalized eigenvector of sigma1 p + sigma3 m for the given branch."""
    e = dispersion(p, m)
    if branch == "positive":
        w = np.array([e + m, p], dtype=complex)
    elif branch == "negative":
        w = np.array([-p, e + m], dtype=complex)
    else:
        raise ValidationError(f"branch must be 'positive' or 'negative', got {branch!r}")
    return w / np.linalg.norm(w)


@dataclass(frozen=True)
class PlaneWaveMode:
    p: float
    m: float
    branch: Branch = "positive"
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if self.branch not in ("positive", "negative"):
            raise ValidationError(f"bad branch {self.branch!r}")
        if self.m <= 0:
            raise ValidationError(f"mass must be positive, got {self.m}")

    @property
    def energy(self) -> float:
        e = dispersion(self.p, self.m)
        return e if self.branch == "positive" else -e

    @property
    def spinor(self) -> np.ndarray:
        return plane_wave_spinor(self.p, self.m, self.branch)


class FreeSolutionSpec:
    """Finite superposition of plane-wave modes sharing one mass.

    Mode data is flattened into arrays at construction so pointwise
    evaluation is a single dot product.
    """

    def __init__(self, modes):
        modes = tuple(modes)
        if not modes:
            raise ValidationError("a free solution needs at least one mode")
        m = modes[0].m
        if any(mode.m != m for mode in modes):
            raise ValidationError("all modes must share the same mass")
        self.modes = modes
        self.m = m
        self._ps = np.array([mode.p for mode in modes])
        self._energies = np.array([mode.energy for mode in modes])
        self._amps = np.array([mode.amplitude for mode in modes], dtype=complex)
        self._spinors = np.array([mode.spinor for mode in modes])  # (K, 2)

    def __len__(self) -> int:
        return len(self.modes)


def eval_free(spec: FreeSolutionSpec, x: float, t: float) -> np.ndarray:
    """psi0(x, t) = sum_k amp_k u_k e^{i(p_k x - E_k t)} as a length-2 vector."""
    coeff = spec._amps * np.exp(1j * (spec._ps * x - spec._energies * t))
    return spec._spinors.T @ coeff


def _gaussian_weights(ps: np.ndarray, p_center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * (ps - p_center) ** 2 * width ** 2)


def _normalize_weights(weights: np.ndarray, dp: float) -> np.ndarray:
    # sum w^2 = dp / (2 pi) makes the spatial norm over one natural
    # period of the mode comb equal to 1
    target = dp / (2.0 * np.pi)
    return weights * math.sqrt(target / float(np.sum(weights ** 2)))


def gaussian_packet(
    p_center: float,
    width: float,
    n_modes: int,
    p_span: float,
    m: float,
    branch: Branch = "positive",
) -> FreeSolutionSpec:
    """Gaussian-weighted mode comb, uniformly spaced over p_center +- p_span.

    The weights are normalized so the spatial norm of the packet is ~1.
    n_modes == 1 degenerates to a single unit-amplitude plane wave.
    """
    if width <= 0:
        raise ConfigError(f"packet width must be positive, got {width}")
    if p_span <= 0:
        raise ConfigError(f"momentum span must be positive, got {p_span}")
    n_modes = int(n_modes)
    if n_modes < 1:
        raise ConfigError(f"need at least one mode, got {n_modes}")
    if n_modes == 1:
        return FreeSolutionSpec([PlaneWaveMode(p_center, m, branch)])
    ps = np.linspace(p_center - p_span, p_center + p_span, n_modes)
    weights = _normalize_weights(_gaussian_weights(ps, p_center, width), ps[1] - ps[0])
    return FreeSolutionSpec(
        [PlaneWaveMode(p, m, branch, w) for p, w in zip(ps, weights)]
    )


def grid_aligned_packet(
    grid,
    p_center: float,
    width: float,
    n_modes: int,
    m: float,
    branch: Branch = "positive",
) -> FreeSolutionSpec:
    """Gaussian packet whose momenta sit exactly on the grid's wavenumber
    lattice 2 pi j / L.

    With commensurate momenta the sampled field is exactly periodic on
    the domain and the spectral kinetic step propagates every mode with
    its exact phase, so free evolution is exact to roundoff.
    """
    if width <= 0:
        raise ConfigError(f"packet width must be positive, got {width}")
    n_modes = int(n_modes)
    if n_modes < 1:
        raise ConfigError(f"need at least one mode, got {n_modes}")
    dk = 2.0 * np.pi / (grid.x_max - grid.x_min)
    j_center = round(p_center / dk)
    js = j_center + np.arange(n_modes) - n_modes // 2
    ps = dk * js
    if n_modes == 1:
        return FreeSolutionSpec([PlaneWaveMode(ps[0], m, branch)])
    weights = _normalize_weights(_gaussian_weights(ps, p_center, width), dk)
    return FreeSolutionSpec(
        [PlaneWaveMode(p, m, branch, w) for p, w in zip(ps, weights)]
    )
