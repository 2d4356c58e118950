"""Verification procedures: identity suites, residual ladders, and
solver-versus-closed-form error measurements.

Everything here is deterministic (seeded RNG) and returns plain dicts
so the CLI can serialize results into machine-readable reports and the
test suite can assert on the same numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .exact import ExactSolutionSpec, eval_exact_field, pde_residual
from .pauli import (
    IDENTITY2,
    PauliCoeffs,
    SIGMA1,
    conjugate_by_exp_sigma1,
    pauli_exp,
    pauli_matrix,
)
from .potentials import potential_identity_residual
from .solver import (
    Grid1D,
    SolverConfig,
    StateField,
    evolve,
    norm,
    windowed_l2_error,
)

__all__ = [
    "identity_suite",
    "residual_ladder",
    "evolution_check",
    "dt_ladder",
    "observed_orders",
    "FLOOR",
]

FLOOR = "floor"
_FLOOR_THRESHOLD = 1e-9

IDENTITY_TOL = 1e-13
UNITARITY_TOL = 1e-14
RATIO_WINDOW = (12.0, 20.0)
ORDER_WINDOW_STRANG = (1.9, 2.1)
ORDER_WINDOW_CN = (1.8, 2.2)


def _max_abs(m) -> float:
    return float(np.max(np.abs(m)))


def identity_suite(n_draws: int = 1000, seed: int = 1) -> dict:
    """Algebraic identity residuals behind the exact solution.

    anticommutation must be exactly zero; the rotation identities are
    checked over random draws against 1e-13 / 1e-14 tolerances.
    """
    rng = np.random.default_rng(seed)

    anticomm = 0.0
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            s_i, s_j = pauli_matrix(i), pauli_matrix(j)
            target = 2.0 * IDENTITY2 if i == j else np.zeros((2, 2))
            anticomm = max(anticomm, _max_abs(s_i @ s_j + s_j @ s_i - target))

    gs = rng.uniform(-10.0, 10.0, n_draws)
    conjugation = 0.0
    euler = 0.0
    commutation = 0.0
    for g in gs:
        rot = pauli_exp(PauliCoeffs(b1=g))
        euler = max(
            euler, _max_abs(rot - (np.cos(g) * IDENTITY2 - 1j * np.sin(g) * SIGMA1))
        )
        commutation = max(commutation, _max_abs(rot @ SIGMA1 - SIGMA1 @ rot))
        double = pauli_exp(PauliCoeffs(b1=2.0 * g))
        for j in (2, 3):
            conjugation = max(
                conjugation,
                _max_abs(conjugate_by_exp_sigma1(g, j) - pauli_matrix(j) @ double),
            )

    coeffs = rng.uniform(-10.0, 10.0, (n_draws, 4))
    unitarity = 0.0
    for a, b1, b2, b3 in coeffs:
        m = pauli_exp(PauliCoeffs(a, b1, b2, b3))
        unitarity = max(unitarity, _max_abs(m.conj().T @ m - IDENTITY2))

    pot_gs = rng.uniform(-5.0, 5.0, n_draws)
    pot_ms = rng.uniform(0.1, 5.0, n_draws)
    potential_identity = max(
        potential_identity_residual(g, m) for g, m in zip(pot_gs, pot_ms)
    )

    passed = (
        anticomm == 0.0
        and conjugation <= IDENTITY_TOL
        and euler <= UNITARITY_TOL
        and commutation <= UNITARITY_TOL
        and unitarity <= UNITARITY_TOL
        and potential_identity <= IDENTITY_TOL
    )
    return {
        "draws": n_draws,
        "anticommutation_max": anticomm,
        "conjugation_max": conjugation,
        "euler_max": euler,
        "commutation_max": commutation,
        "unitarity_max": unitarity,
        "potential_identity_max": potential_identity,
        "tolerance": IDENTITY_TOL,
        "pass": bool(passed),
    }


def residual_ladder(
    spec: ExactSolutionSpec,
    hs: tuple[float, ...] = (1e-2, 5e-3, 2.5e-3),
    n_points: int = 200,
    seed: int = 2,
    x_fraction: float = 0.8,
    t_margin_fraction: float = 0.1,
) -> dict:
    """Finite-difference residual of the Dirac equation on the closed-form
    solution, over random interior points, for a ladder of stencil steps.

    The residual is pure 4th-order truncation, so each halving of h must
    shrink the max residual by roughly 16 (window [12, 20]).
    """
    rng = np.random.default_rng(seed)
    x_lo, x_hi = spec.generator.x_span
    t_lo, t_hi = spec.generator.t_span
    x_margin = 0.5 * (1.0 - x_fraction) * (x_hi - x_lo)
    t_margin = t_margin_fraction * (t_hi - t_lo)
    xs = rng.uniform(x_lo + x_margin, x_hi - x_margin, n_points)
    ts = rng.uniform(t_lo + t_margin, t_hi - t_margin, n_points)

    maxima = []
    for h in hs:
        maxima.append(
            max(pde_residual(spec, float(x), float(t), h) for x, t in zip(xs, ts))
        )
    ratios = [maxima[i] / maxima[i + 1] for i in range(len(maxima) - 1)]
    lo, hi = RATIO_WINDOW
    passed = all(lo <= r <= hi for r in ratios)
    return {
        "h": list(hs),
        "max_residual": maxima,
        "ratios": ratios,
        "ratio_window": [lo, hi],
        "points": n_points,
        "pass": bool(passed),
    }


def _checkpoint_steps(total_steps: int, n_checkpoints: int) -> list[int]:
    marks = sorted({round(total_steps * (i + 1) / n_checkpoints) for i in range(n_checkpoints)})
    return [s for s in marks if s > 0]


def evolution_check(
    spec: ExactSolutionSpec,
    grid: Grid1D,
    t0: float,
    t_end: float,
    dt: float,
    method: str = "strang_spectral",
    n_checkpoints: int = 4,
    window: float = 0.8,
) -> dict:
    """Evolve the sampled closed-form state and record interior-window L2
    errors against it at checkpoints, plus the norm-drift series."""
    config = SolverConfig(
        dt=dt, m=spec.m, method=method, generator=spec.generator, gauge=spec.gauge
    )
    state = eval_exact_field(spec, grid, t0)
    norm0 = norm(state)
    total_steps = round((t_end - t0) / dt)
    times, errors, drifts = [], [], []
    for mark in _checkpoint_steps(total_steps, n_checkpoints):
        t_mark = t0 + mark * dt if mark < total_steps else t_end
        state = evolve(state, config, t_mark, dt)
        reference = eval_exact_field(spec, grid, t_mark)
        times.append(t_mark)
        errors.append(windowed_l2_error(state, reference, window))
        drifts.append(abs(norm(state) - norm0) / norm0)
    return {
        "method": method,
        "dt": dt,
        "window_fraction": window,
        "checkpoint_times": times,
        "l2_error": errors,
        "norm_drift": drifts,
        "final_error": errors[-1],
    }


def observed_orders(errors: list[float]) -> list[float | str]:
    """log2 error ratios; rungs at the roundoff floor report 'floor'."""
    orders: list[float | str] = []
    for a, b in zip(errors, errors[1:]):
        if a < _FLOOR_THRESHOLD and b < _FLOOR_THRESHOLD:
            orders.append(FLOOR)
        else:
            orders.append(math.log2(a / b))
    return orders


def dt_ladder(
    spec: ExactSolutionSpec,
    grid: Grid1D,
    t0: float,
    t_end: float,
    dt0: float,
    rungs: int = 4,
    method: str = "strang_spectral",
    window: float = 0.8,
) -> dict:
    """Halve dt `rungs` times; report final-time interior L2 errors vs the
    closed form and the observed convergence orders."""
    initial = eval_exact_field(spec, grid, t0)
    reference = eval_exact_field(spec, grid, t_end)
    dts, errors = [], []
    for r in range(rungs):
        dt = dt0 / 2 ** r
        config = SolverConfig(
            dt=dt, m=spec.m, method=method, generator=spec.generator, gauge=spec.gauge
        )
        final = evolve(initial.copy(), config, t_end, dt)
        dts.append(dt)
        errors.append(windowed_l2_error(final, reference, window))
    return {
        "method": method,
        "dt": dts,
        "error": errors,
        "observed_order": observed_orders(errors),
        "window_fraction": window,
    }
