"""Elastic single-electron scattering amplitude across the coupled branch.

The amplitude Z1(omega) for an electron of energy hbar*omega to traverse
the coupler without creating any excitation obeys a Volterra integral
equation driven by the diagonal EMP amplitude S_bb:

    omega B(omega) = S_bb(omega) - 1
                     + integral_0^omega B(w') (S_bb(w') - 1) dw',
    B(0+) = dS_bb/domega(0+),          Z1(omega) = 1 + integral_0^omega B.

The solver below steps this equation with a product-trapezoidal rule; the
apparent 1/omega singularity at the origin is resolved by the known initial
value of B.  Everything derived from the solution (inelastic probability,
group delay, time-domain kernel) lives here too.

Note: for a pure-delay S_bb = exp(i omega tau) this equation does not
return Z1 = exp(i omega tau) beyond second order in omega*tau.  The
equation is implemented as written; ``tests`` carry a characterization of
the pure-delay behaviour rather than an assertion either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coupler import CouplerModel
from .errors import ConvergenceError, DomainError, SolverHealthError, TableRangeError
from .numerics import ComplexTable, filon_fourier

__all__ = [
    "ElasticAmplitude",
    "solve_elastic_amplitude",
    "ballistic_amplitude",
    "picard_elastic_amplitude",
    "inelastic_probability",
    "wigner_smith_delay",
    "elastic_amplitude_time",
]


@dataclass
class ElasticAmplitude:
    """Tabulated elastic amplitude with its low-frequency group delay."""

    table: ComplexTable
    tau1: float
    source_model: CouplerModel | None = None
    solver_step: float = 0.0
    converged_delta: float = 0.0

    def __call__(self, omega):
        return self.table(omega)

    @property
    def omega_max(self) -> float:
        return self.table.omega_max

    def time_scale(self) -> float:
        """Characteristic propagation time used for defaults."""
        if self.source_model is not None:
            return self.source_model.transit_time()
        return max(abs(self.tau1), 10.0 / self.omega_max)


def _volterra_step(grid: np.ndarray, g: np.ndarray, b0: complex) -> np.ndarray:
    """Forward product-trapezoidal sweep of the integral equation for B."""
    n = grid.size
    b = np.empty(n, dtype=complex)
    b[0] = b0
    cum = 0.0 + 0.0j  # integral_0^{w_k} B g
    for k in range(1, n):
        h = grid[k] - grid[k - 1]
        rhs = g[k] + cum + 0.5 * h * b[k - 1] * g[k - 1]
        b[k] = rhs / (grid[k] - 0.5 * h * g[k])
        cum = cum + 0.5 * h * (b[k - 1] * g[k - 1] + b[k] * g[k])
    return b


def _cumtrapz(grid: np.ndarray, vals: np.ndarray) -> np.ndarray:
    out = np.empty(grid.size, dtype=complex)
    out[0] = 0.0
    np.cumsum(0.5 * np.diff(grid) * (vals[1:] + vals[:-1]), out=out[1:])
    return out


def _solve_on_grid(model: CouplerModel, omega_max: float, n_intervals: int):
    # the step must resolve the oscillation of S_bb, whose phase winds at
    # the transit-time rate: >= 16 points per 2 pi of phase
    step = omega_max / n_intervals
    if step * model.transit_time() > 2 * np.pi / 16:
        raise ConvergenceError(
            "step does not resolve the S_bb oscillation (needs >= 16 points "
            "per 2 pi of phase)"
        )
    grid = np.linspace(0.0, omega_max, n_intervals + 1)
    g = np.asarray(model.s_bb(grid), dtype=complex) - 1.0
    b = _volterra_step(grid, g, complex(model.dsbb_domega_zero()))
    z = 1.0 + _cumtrapz(grid, b)
    return grid, z


def solve_elastic_amplitude(model: CouplerModel, omega_max: float,
                            step: float | None = None,
                            sup_tol: float = 1e-6,
                            max_refinements: int = 6) -> ElasticAmplitude:
    """Solve for Z1 on [0, omega_max], refining the step until converged.

    Convergence criterion: halving the step changes Z1 by less than
    ``sup_tol`` in sup norm.  A modulus above 1 + 1e-6 anywhere aborts with
    ``SolverHealthError`` since |Z1| <= 1 is a physical bound; no silent
    clamping is performed.
    """
    if not omega_max > 0:
        raise DomainError("omega_max must be positive")
    if step is None:
        step = (2 * np.pi / 128.0) / model.transit_time()
    step = min(step, omega_max / 16)
    n = max(16, int(math.ceil(omega_max / step)))

    grid, z = _solve_on_grid(model, omega_max, n)
    delta = math.inf
    for _ in range(max_refinements):
        n *= 2
        fine_grid, fine_z = _solve_on_grid(model, omega_max, n)
        delta = float(np.max(np.abs(fine_z[::2] - z)))
        grid, z = fine_grid, fine_z
        if delta < sup_tol:
            break
    else:
        if max_refinements > 0:
            raise ConvergenceError(
                f"no step convergence below {sup_tol} (last change {delta:.3e})"
            )
    step = omega_max / n

    worst = float(np.max(np.abs(z)))
    if worst > 1.0 + 1e-6:
        raise SolverHealthError(
            f"|Z1| reached {worst - 1.0:.3e} above 1; model or solver defect"
        )
    amp = ElasticAmplitude(
        table=ComplexTable(grid, z),
        tau1=0.0,
        source_model=model,
        solver_step=step,
        converged_delta=delta,
    )
    amp.tau1 = wigner_smith_delay(amp)
    return amp


def picard_elastic_amplitude(model: CouplerModel, omega_max: float,
                             step: float, max_iter: int = 800,
                             z_tol: float = 1e-10) -> ElasticAmplitude:
    """Successive-substitution solution of the same discretized equation.

    Starts from B = (S_bb - 1)/omega and iterates the integral term until
    the induced change on Z1 (bounded by omega_max * sup|dB|) drops below
    ``z_tol``; an independent route to the stepping solver.
    """
    n = max(16, int(math.ceil(omega_max / step)))
    grid = np.linspace(0.0, omega_max, n + 1)
    g = np.asarray(model.s_bb(grid), dtype=complex) - 1.0
    b0 = complex(model.dsbb_domega_zero())
    inv_omega = np.empty(n + 1)
    inv_omega[0] = 0.0
    inv_omega[1:] = 1.0 / grid[1:]

    b = g * inv_omega
    b[0] = b0
    for _ in range(max_iter):
        integral = _cumtrapz(grid, b * g)
        new = (g + integral) * inv_omega
        new[0] = b0
        change = float(np.max(np.abs(new - b)))
        b = new
        if change * omega_max < z_tol:
            break
    else:
        raise ConvergenceError("Picard iteration did not converge")
    z = 1.0 + _cumtrapz(grid, b)
    amp = ElasticAmplitude(
        table=ComplexTable(grid, z),
        tau1=0.0,
        source_model=model,
        solver_step=step,
    )
    amp.tau1 = wigner_smith_delay(amp)
    return amp


def ballistic_amplitude(tau1: float, omega_max: float,
                        n_points: int = 4097) -> ElasticAmplitude:
    """Pure-phase amplitude exp(i omega tau1): lossless propagation."""
    grid = np.linspace(0.0, omega_max, n_points)
    return ElasticAmplitude(
        table=ComplexTable(grid, np.exp(1j * tau1 * grid)),
        tau1=tau1,
        source_model=None,
        solver_step=grid[1] - grid[0],
    )


def inelastic_probability(amp: ElasticAmplitude, omega) -> float:
    """sigma_in(omega) = 1 - |Z1(omega)|^2, clamped to [0, 1].

    Clamping only forgives rounding at the 1e-9 level; anything beyond that
    is rejected as a solver-health violation.
    """
    val = 1.0 - abs(amp(omega)) ** 2
    if val < -1e-6:
        raise SolverHealthError(f"sigma_in = {val:.3e} below zero")
    return float(min(1.0, max(0.0, val)))


def wigner_smith_delay(amp: ElasticAmplitude, rel_step: float = 4.0,
                       consistency_tol: float = 1e-3) -> float:
    """Low-frequency group delay d arg(Z1)/domega at omega = 0.

    Richardson-extrapolated forward differences of the phase; |Z1(0)| = 1
    so the phase is the whole story at the origin.
    """
    grid = amp.table.grid
    h = rel_step * (grid[1] - grid[0])

    def slope(step):
        return np.angle(amp(step)) / step

    d1, d2 = slope(h), slope(h / 2)
    first = (4 * d2 - d1) / 3
    d4 = slope(h / 4)
    second = (4 * d4 - d2) / 3
    scale = max(abs(first), abs(second), 1e-30)
    if abs(first - second) > consistency_tol * scale + 1e-30:
        raise ConvergenceError(
            "group-delay derivative is noisy; solve with a finer step"
        )
    return float((16 * second - first) / 15)


def _decimate(grid: np.ndarray, values: np.ndarray, tol: float = 1e-9):
    """Largest power-of-two stride whose spline still reproduces the table.

    Solver grids are refined for propagation accuracy, far beyond what the
    retained function needs for interpolation; transforms run much faster
    on the thinned table.
    """
    from scipy.interpolate import CubicSpline

    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return grid[:: max(1, grid.size // 16)], values[:: max(1, grid.size // 16)]
    stride = 1
    while (grid.size - 1) % (2 * stride) == 0 and (grid.size - 1) // (2 * stride) >= 32:
        cand = 2 * stride
        sub = slice(None, None, cand)
        spline = CubicSpline(grid[sub], values[sub])
        err = float(np.max(np.abs(spline(grid) - values)))
        if err > tol * scale:
            break
        stride = cand
    return grid[::stride], values[::stride]


def elastic_amplitude_time(amp: ElasticAmplitude, tau_grid,
                           eta: float | None = None) -> ComplexTable:
    """Time-domain kernel Z1(tau), the half-line transform of Z1(omega).

    A regularizer exp(-eta * omega) (default eta = 1e-3 of the propagation
    time) makes the non-decaying integrand summable.  Truncation at the
    table edge is negligible only when eta * omega_max >> 1; this routine
    is a diagnostic, the dc observables never go through it.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if eta is None:
        eta = 1e-3 * amp.time_scale()
    grid, values = _decimate(amp.table.grid, amp.table.values)
    damped = values * np.exp(-eta * grid)
    vals = filon_fourier(grid, damped, -tau_grid) / (2 * np.pi)
    return ComplexTable(tau_grid, vals)
