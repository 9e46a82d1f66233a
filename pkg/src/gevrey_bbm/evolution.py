"""Time evolution of the (fractional) BBM equation.

Two solvers are provided:

* ``step_rk4`` / ``simulate``: classical four-stage Runge-Kutta on the
  spectral ODE system u_t = -phi(D)(u + u^2/2).  The dispersive symbol is
  bounded, so the system is non-stiff and explicit stepping is adequate;
  this is the production integrator.
* ``picard_solve``: fixed-point iteration of the integral (Duhamel) form
  on a uniform time sub-grid with composite trapezoidal quadrature.  Used
  for verification over a single local-existence window, not for long runs.

The quadratic term is evaluated pseudospectrally and dealiased (2/3 rule);
linear multipliers need no dealiasing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BlowupDetected, InvalidInput, NoConvergence
from .multipliers import GevreyWeight, ModelParams, apply_I, phi_symbol, semigroup
from .norms import NormReport, hs_norm, norm_report
from .spectral import (
    Grid,
    SpectralField,
    dealias,
    forward_transform,
    inverse_transform,
    zero_nyquist,
)

BLOWUP_CAP = 1e12


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one simulation, times strictly increasing from 0."""

    times: np.ndarray
    states: list[SpectralField]
    params: ModelParams
    reports: list[NormReport] | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if len(times) != len(self.states):
            raise InvalidInput("times and states must have equal length")
        if len(times) == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise InvalidInput("times must start at 0 and strictly increase")
        object.__setattr__(self, "times", times)


@dataclass(frozen=True)
class PicardDiagnostics:
    """Per-iteration sup-in-time distances of the fixed-point iteration."""

    iterate_distances: list[float]
    contraction_factor: float
    converged: bool


def nonlinear_term(field: SpectralField) -> SpectralField:
    """u^2 computed pseudospectrally, dealiased, Nyquist zeroed."""
    samples = inverse_transform(field)
    squared = forward_transform(samples * samples, field.grid)
    return zero_nyquist(dealias(squared))


def rhs(field: SpectralField, alpha: float) -> SpectralField:
    """-phi(D)(u + u^2/2), the full spectral right-hand side."""
    combined = field.coeffs + 0.5 * nonlinear_term(field).coeffs
    symbol = phi_symbol(field.grid.wavenumbers, alpha)
    return field.with_coeffs(-symbol * combined)


def step_rk4(field: SpectralField, dt: float, alpha: float) -> SpectralField:
    """One classical RK4 step of the spectral ODE system."""
    if dt < 0:
        raise InvalidInput(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return field
    symbol_max = float(np.max(np.abs(phi_symbol(field.grid.wavenumbers, alpha))))
    if dt * symbol_max >= 1.0:
        warnings.warn(
            f"dt*max|phi| = {dt * symbol_max:.3g} >= 1; accuracy may degrade",
            stacklevel=2,
        )
    k1 = rhs(field, alpha)
    k2 = rhs(field.with_coeffs(field.coeffs + 0.5 * dt * k1.coeffs), alpha)
    k3 = rhs(field.with_coeffs(field.coeffs + 0.5 * dt * k2.coeffs), alpha)
    k4 = rhs(field.with_coeffs(field.coeffs + dt * k3.coeffs), alpha)
    new = field.coeffs + (dt / 6.0) * (
        k1.coeffs + 2.0 * k2.coeffs + 2.0 * k3.coeffs + k4.coeffs
    )
    return field.with_coeffs(new)


def lifespan(u0: SpectralField, weight: GevreyWeight, alpha: float, c: float) -> float:
    """Local-existence window 1 / (8 c ||I u0||_{H^{alpha/2}}).

    Returns +inf for zero initial data.  The constant c is never given
    numerically by the theory; feed the calibrated bilinear constant.
    """
    if not c > 0:
        raise InvalidInput(f"c must be positive, got {c}")
    norm = hs_norm(apply_I(u0, weight), alpha / 2.0)
    if not math.isfinite(norm):
        raise InvalidInput("||I u0|| is not finite")
    if norm == 0.0:
        return math.inf
    return 1.0 / (8.0 * c * norm)


def picard_solve(
    u0: SpectralField,
    delta: float,
    alpha: float,
    weight: GevreyWeight,
    tol: float = 1e-10,
    max_iter: int = 50,
    n_nodes: int = 64,
) -> tuple[Trajectory, PicardDiagnostics]:
    """Iterate the Duhamel map to a fixed point on [0, delta].

    Gamma(u)(t) = S(t) u0 - (1/2) int_0^t S(t-tau) phi(D)(u(tau)^2) dtau,
    with composite trapezoidal quadrature on n_nodes+1 uniform tau nodes.
    Successive iterates are compared in the sup-in-time H^{alpha/2} norm of
    the I-weighted difference (the metric of the contraction argument);
    stops when the distance drops below tol.
    """
    if not delta > 0:
        raise InvalidInput(f"delta must be positive, got {delta}")
    grid = u0.grid
    xi = grid.wavenumbers
    symbol = phi_symbol(xi, alpha)
    times = np.linspace(0.0, delta, n_nodes + 1)
    dtau = times[1] - times[0]
    # free-flow phases: phase[k] multiplies u0 to give S(t_k) u0
    free = np.exp(-np.outer(times, symbol))
    iterate = free * u0.coeffs[None, :]
    distances: list[float] = []
    converged = False
    for _ in range(max_iter):
        # phi(D)(u^2) at every node
        nl = np.empty_like(iterate)
        for k in range(len(times)):
            state = SpectralField(grid, iterate[k])
            nl[k] = symbol * nonlinear_term(state).coeffs
        new = free * u0.coeffs[None, :]
        # cumulative trapezoid in tau of S(t_k - tau_m) nl[m], m <= k
        for k in range(1, len(times)):
            phases = np.exp(-np.outer(times[k] - times[: k + 1], symbol))
            integrand = phases * nl[: k + 1]
            integral = dtau * (
                np.sum(integrand[1:-1], axis=0)
                + 0.5 * (integrand[0] + integrand[-1])
            )
            new[k] = new[k] - 0.5 * integral
        dist = max(
            hs_norm(apply_I(SpectralField(grid, new[k] - iterate[k]), weight),
                    alpha / 2.0)
            for k in range(len(times))
        )
        distances.append(dist)
        iterate = new
        if dist < tol:
            converged = True
            break
    ratios = [
        distances[i + 1] / distances[i]
        for i in range(len(distances) - 1)
        if distances[i] > 100.0 * tol
    ]
    factor = max(ratios) if ratios else 0.0
    diagnostics = PicardDiagnostics(distances, factor, converged)
    if not converged:
        raise NoConvergence(
            f"Picard iteration did not reach tol={tol} in {max_iter} iterations",
            diagnostics=diagnostics,
        )
    states = [SpectralField(grid, iterate[k]) for k in range(len(times))]
    traj = Trajectory(times, states, ModelParams(alpha, grid, dtau, delta))
    return traj, diagnostics


def simulate(
    u0: SpectralField,
    params: ModelParams,
    weight: GevreyWeight,
    sample_every: int = 1,
    linear: bool = False,
) -> Trajectory:
    """RK4 driver recording states and NormReports every sample_every steps.

    With linear=True the quadratic term is dropped and each sample is the
    exact free flow semigroup(t) u0 (a reference for estimator oracles).
    """
    if sample_every < 1:
        raise InvalidInput(f"sample_every must be >= 1, got {sample_every}")
    n_steps = int(round(params.t_end / params.dt))
    state = zero_nyquist(u0)
    if linear:
        sample_times = [0.0] + [
            step * params.dt for step in range(1, n_steps + 1)
            if step % sample_every == 0 or step == n_steps
        ]
        sample_times = sorted(set(sample_times))
        states = [semigroup(state, t, params.alpha) for t in sample_times]
        reports = [norm_report(s, weight, params.alpha) for s in states]
        return Trajectory(np.asarray(sample_times), states, params, reports)
    times = [0.0]
    states = [state]
    reports = [norm_report(state, weight, params.alpha)]
    for step in range(1, n_steps + 1):
        state = step_rk4(state, params.dt, params.alpha)
        coeffs = state.coeffs
        if not np.all(np.isfinite(coeffs)) or np.max(np.abs(coeffs)) > BLOWUP_CAP:
            raise BlowupDetected(step * params.dt)
        if step % sample_every == 0 or step == n_steps:
            t = step * params.dt
            if t > times[-1]:
                times.append(t)
                states.append(state)
                reports.append(norm_report(state, weight, params.alpha))
    return Trajectory(np.asarray(times), states, params, reports)


# --- initial-data library -------------------------------------------------


def gaussian_data(grid: Grid, amplitude: float = 1.0, width: float = 4.0,
                  center: float | None = None) -> SpectralField:
    """a * exp(-(x-x0)^2 / w^2), centered in the box by default."""
    x0 = grid.domain_length / 2.0 if center is None else center
    samples = amplitude * np.exp(-((grid.points - x0) ** 2) / width**2)
    return zero_nyquist(forward_transform(samples, grid))


def cosine_data(grid: Grid, amplitude: float = 1.0, mode: int = 1) -> SpectralField:
    """a * cos(2*pi*mode*x / L)."""
    samples = amplitude * np.cos(2.0 * np.pi * mode * grid.points / grid.domain_length)
    return zero_nyquist(forward_transform(samples, grid))


def sech2_data(grid: Grid, amplitude: float = 1.0, width: float = 4.0,
               center: float | None = None) -> SpectralField:
    """a * sech((x-x0)/w)^2, a solitary-wave-like profile."""
    x0 = grid.domain_length / 2.0 if center is None else center
    samples = amplitude / np.cosh((grid.points - x0) / width) ** 2
    return zero_nyquist(forward_transform(samples, grid))


INITIAL_DATA = {
    "gaussian": gaussian_data,
    "cosine": cosine_data,
    "sech2": sech2_data,
}
