"""Radiation-coupler models.

A coupler is fully characterized by the 2x2 scattering matrix S(omega)
between the edge-magnetoplasmon modes of the interferometer branch (b) and
the modes of the radiation channel (a).  Built-in variants cover two
counter-propagating edge channels in total mutual influence, a classically
driven top gate, and a bare drive applied directly to the channel; measured
matrices can be loaded from CSV.

All internal formulas are expressed in the dimensionless group
X = omega * l / v_F; SI frequencies are converted at the call boundary.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import constants

from .errors import ConvergenceError, DomainError, SchemaError
from .numerics import ComplexTable, gauss_panel_nodes

__all__ = [
    "R_K",
    "CouplerParams",
    "CouplerModel",
    "CounterPropagatingCoupler",
    "TopGateCoupler",
    "DirectDriveCoupler",
    "TabulatedCoupler",
    "SMatrix",
    "s_matrix",
    "topgate_transmission",
    "admittance_from_t",
    "rc_expansion",
    "direct_drive_response",
    "gamma_ba",
    "effective_gate_voltage",
    "load_tabulated_coupler",
]

#: von Klitzing resistance h/e^2 (ohm)
R_K = constants.h / constants.e ** 2

_G0 = constants.e ** 2 / constants.h  # conductance quantum per spin-resolved channel


def phase_factor_f(x):
    """f(X) = (exp(iX) - 1) / (iX), continued by its Taylor series at X = 0.

    The series branch below |X| = 1e-3 avoids the 0/0 cancellation.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-3
    if np.any(small):
        z = 1j * x[small]
        # sum_{m>=0} z^m / (m+1)!
        acc = np.ones_like(z)
        term = np.ones_like(z)
        for m in range(1, 8):
            term = term * z / m
            acc = acc + term / (m + 1)
        out[small] = acc
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = (np.exp(1j * xb) - 1.0) / (1j * xb)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class CouplerParams:
    """Geometry of a capacitive coupler.

    length in meters, v_fermi in m/s, alpha the dimensionless coupling
    (quantum capacitance over geometric capacitance).
    """

    length: float
    v_fermi: float
    alpha: float

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError("coupler length must be positive")
        if not self.v_fermi > 0:
            raise DomainError("Fermi velocity must be positive")
        if self.alpha < 0:
            raise DomainError("coupling alpha must be non-negative")

    @property
    def transit_time(self) -> float:
        return self.length / self.v_fermi

    @property
    def quantum_capacitance(self) -> float:
        """C_q = e^2 l / (h v_F) of a single channel of this length."""
        return _G0 * self.transit_time


@dataclass(frozen=True)
class SMatrix:
    """EMP scattering matrix entries at a single angular frequency."""

    s_aa: complex
    s_ab: complex
    s_ba: complex
    s_bb: complex

    def row_norms(self):
        return (
            abs(self.s_aa) ** 2 + abs(self.s_ab) ** 2,
            abs(self.s_ba) ** 2 + abs(self.s_bb) ** 2,
        )


class CouplerModel:
    """Base class for coupler variants.

    Subclasses provide vectorized ``s_bb`` / ``s_ba`` and the analytic
    derivative of s_bb at zero frequency used by the decoherence solver.
    """

    def s_bb(self, omega):
        raise NotImplementedError

    def s_ba(self, omega):
        raise NotImplementedError

    def dsbb_domega_zero(self) -> complex:
        raise NotImplementedError

    def transit_time(self) -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class CounterPropagatingCoupler(CouplerModel):
    """Two counter-propagating edge channels in total mutual influence.

    S_ba = -iX f(X) / (2 + alpha f(X)) and S_bb = 1 - S_ba, which pins
    S_ba(omega) to the circle of radius 1/2 centered at 1/2.
    """

    def __init__(self, params: CouplerParams):
        self.params = params

    def s_ba(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0):
            raise DomainError("omega must be non-negative")
        x = omega * self.params.transit_time
        f = phase_factor_f(x)
        return (-1j * x * f) / (2.0 + self.params.alpha * f)

    def s_bb(self, omega):
        return 1.0 - self.s_ba(omega)

    def dsbb_domega_zero(self) -> complex:
        return 1j * self.params.transit_time / (2.0 + self.params.alpha)

    def transit_time(self) -> float:
        return self.params.transit_time

    def describe(self) -> dict:
        return {
            "variant": "counter_propagating",
            "l": self.params.length,
            "v_f": self.params.v_fermi,
            "alpha": self.params.alpha,
        }


class TopGateCoupler(CouplerModel):
    """Edge channel capacitively coupled to a classically driven top gate.

    The gate has no dynamical modes of its own: s_ba = 0 and s_bb is the
    unit-modulus transmission t(omega).
    """

    def __init__(self, params: CouplerParams):
        self.params = params

    def s_bb(self, omega):
        return topgate_transmission(self.params, omega)

    def s_ba(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0):
            raise DomainError("omega must be non-negative")
        out = np.zeros(omega.shape, dtype=complex)
        return out if out.ndim else 0j

    def dsbb_domega_zero(self) -> complex:
        return 1j * self.params.transit_time / (1.0 + self.params.alpha)

    def transit_time(self) -> float:
        return self.params.transit_time

    def describe(self) -> dict:
        return {
            "variant": "top_gate",
            "l": self.params.length,
            "v_f": self.params.v_fermi,
            "alpha": self.params.alpha,
        }


class DirectDriveCoupler(CouplerModel):
    """Drive applied directly to the electrons: ballistic EMP transmission."""

    def __init__(self, length: float, v_fermi: float):
        self.params = CouplerParams(length, v_fermi, 0.0)

    def s_bb(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0):
            raise DomainError("omega must be non-negative")
        out = np.exp(1j * omega * self.params.transit_time)
        return out if out.ndim else complex(out)

    def s_ba(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape, dtype=complex)
        return out if out.ndim else 0j

    def dsbb_domega_zero(self) -> complex:
        return 1j * self.params.transit_time

    def transit_time(self) -> float:
        return self.params.transit_time

    def describe(self) -> dict:
        return {
            "variant": "direct_drive",
            "l": self.params.length,
            "v_f": self.params.v_fermi,
        }


class TabulatedCoupler(CouplerModel):
    """Scattering matrix sampled on a frequency grid (e.g. from measurement).

    Unitarity of each row is validated to 1e-9 at construction.
    """

    def __init__(self, omega, s_bb, s_ba, transit_time_hint: float | None = None):
        omega = np.asarray(omega, dtype=float)
        s_bb = np.asarray(s_bb, dtype=complex)
        s_ba = np.asarray(s_ba, dtype=complex)
        norms = np.abs(s_bb) ** 2 + np.abs(s_ba) ** 2
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-9:
            raise SchemaError(
                f"tabulated scattering matrix violates unitarity by {worst:.2e}"
            )
        self._bb = ComplexTable(omega, s_bb)
        self._ba = ComplexTable(omega, s_ba)
        self._transit_hint = transit_time_hint

    def s_bb(self, omega):
        return self._bb(omega)

    def s_ba(self, omega):
        return self._ba(omega)

    def dsbb_domega_zero(self) -> complex:
        # forward finite difference at the base of the grid, Richardson refined
        g = self._bb.grid
        w0 = g[0]
        h = (g[-1] - g[0]) * 1e-3
        d1 = (self._bb(w0 + h) - self._bb(w0)) / h
        d2 = (self._bb(w0 + h / 2) - self._bb(w0)) / (h / 2)
        return complex(2 * d2 - d1)

    def transit_time(self) -> float:
        if self._transit_hint is not None:
            return self._transit_hint
        # steepest phase winding of s_bb across the table sets the
        # oscillation scale; fall back to one turn over the whole grid
        phases = np.unwrap(np.angle(self._bb.values))
        rates = np.abs(np.diff(phases) / np.diff(self._bb.grid))
        rate = float(np.max(rates)) if rates.size else 0.0
        return max(rate, 2 * np.pi / self._bb.omega_max)

    def grid(self):
        return self._bb.grid

    def describe(self) -> dict:
        return {
            "variant": "tabulated",
            "omega_min": self._bb.omega_min,
            "omega_max": self._bb.omega_max,
            "points": len(self._bb),
        }


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def s_matrix(model: CouplerModel, omega: float) -> SMatrix:
    """Full 2x2 scattering matrix of a coupler at one angular frequency.

    The built-in variants are reciprocal (s_ab = s_ba) and symmetric
    (s_aa = s_bb).
    """
    if omega < 0:
        raise DomainError("omega must be non-negative")
    bb = complex(model.s_bb(omega))
    ba = complex(model.s_ba(omega))
    return SMatrix(s_aa=bb, s_ab=ba, s_ba=ba, s_bb=bb)


def topgate_transmission(params: CouplerParams, omega):
    """t(omega) = exp(iX) (1 + alpha f*(X)) / (1 + alpha f(X)), |t| = 1."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    x = omega * params.transit_time
    f = phase_factor_f(x)
    out = np.exp(1j * x) * (1.0 + params.alpha * np.conj(f)) / (1.0 + params.alpha * f)
    return out if out.ndim else complex(out)


def admittance_from_t(t_of_omega: complex) -> complex:
    """Finite-frequency admittance Y = (e^2/h)(1 - t) of the gate dipole."""
    if abs(abs(t_of_omega) - 1.0) > 1e-6:
        raise DomainError("transmission amplitude must be unit modulus")
    return _G0 * (1.0 - t_of_omega)


def _relevant_admittance(model: CouplerModel, omega):
    """Admittance whose low-frequency expansion defines the RC equivalent."""
    if isinstance(model, (TopGateCoupler, DirectDriveCoupler)):
        return _G0 * (1.0 - model.s_bb(omega))
    ba = model.s_ba(omega)
    if np.max(np.abs(np.atleast_1d(ba))) == 0.0:
        return _G0 * (1.0 - model.s_bb(omega))
    return _G0 * ba


def rc_expansion(model: CouplerModel) -> dict:
    """Electrochemical capacitance and relaxation resistance of the coupler.

    Extracted from Y(omega) = -i C_mu omega + R C_mu^2 omega^2 + O(omega^3)
    by Richardson-extrapolated finite differences near omega = 0.
    """
    scale = 1.0 / model.transit_time()
    if isinstance(model, TabulatedCoupler):
        g = model.grid()
        if g[0] > 1e-3 * g[-1]:
            raise ConvergenceError(
                "tabulated grid does not reach low enough frequency for the "
                "RC expansion"
            )
        scale = min(scale, 0.02 * g[-1])

    def c_estimate(w):
        return -np.imag(_relevant_admittance(model, w)) / w

    def r_estimate(w, c_mu):
        return np.real(_relevant_admittance(model, w)) / (w ** 2 * c_mu ** 2)

    h = 1e-2 * scale
    # both estimators have even error series; two Richardson levels give O(h^6)
    def richardson(est):
        e1, e2, e3 = est(h), est(h / 2), est(h / 4)
        r1 = (4 * e2 - e1) / 3
        r2 = (4 * e3 - e2) / 3
        return (16 * r2 - r1) / 15

    c_mu = float(richardson(c_estimate))
    r = float(richardson(lambda w: r_estimate(w, c_mu)))
    return {"c_mu": c_mu, "r": r}


def direct_drive_response(length: float, v_fermi: float, omega: float) -> dict:
    """Ballistic transmission phase and dynamical quantum capacitance."""
    if omega < 0:
        raise DomainError("omega must be non-negative")
    params = CouplerParams(length, v_fermi, 0.0)
    x = omega * params.transit_time
    return {
        "phase": complex(np.exp(1j * x)),
        "c_q_dyn": complex(params.quantum_capacitance * phase_factor_f(x)),
    }


def gamma_ba(model: CouplerModel, tau_grid,
             omega_max_factor: float = 1000.0) -> ComplexTable:
    """Windowing kernel of the filtered charge seen by the radiation channel.

    Gamma(tau) = integral_0^inf [S_ba(omega)/(-i omega)] e^{-i omega tau}
    domega / 2pi + c.c., real by construction.  The 1/omega singularity is
    removable: the integrand is continued by S_ba'(0)/(-i) at omega -> 0.
    The slowly decaying upper tail is handled with a first-order
    integration-by-parts correction at the cutoff.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    t0 = model.transit_time()
    d0 = 1j * _ds_ba_domega_zero(model)

    def g(omega):
        omega = np.asarray(omega, dtype=float)
        out = np.empty(omega.shape, dtype=complex)
        small = omega < 1e-9 / t0
        if np.any(small):
            out[small] = d0
        big = ~small
        if np.any(big):
            wb = omega[big]
            out[big] = model.s_ba(wb) / (-1j * wb)
        return out

    lam = omega_max_factor / t0
    tau_max = float(np.max(np.abs(tau_grid)))
    # panel width limited by both the coupler's own oscillation (period
    # 2 pi / t0) and the e^{-i omega tau} factor at the largest |tau|
    width = (2 * np.pi / 8.0) / (t0 + tau_max)
    n_panels = int(math.ceil(lam / width))
    edges = np.linspace(0.0, lam, n_panels + 1)
    nodes, weights = gauss_panel_nodes(edges, order=8)
    gv = g(nodes) * weights

    phases = np.exp(-1j * np.outer(tau_grid, nodes))
    vals = phases @ gv
    # integration-by-parts tail: integral_lam^inf g e^{-i w tau} dw
    #   ~ g(lam) e^{-i lam tau} / (i tau)
    g_lam = complex(g(np.asarray([lam]))[0])
    safe = np.abs(tau_grid) > 1e-3 * t0
    tail = np.zeros_like(vals)
    tail[safe] = g_lam * np.exp(-1j * lam * tau_grid[safe]) / (1j * tau_grid[safe])
    gamma = (vals + tail) / (2 * np.pi)
    gamma = gamma + np.conj(gamma)
    return ComplexTable(tau_grid, gamma)


def _ds_ba_domega_zero(model: CouplerModel) -> complex:
    if isinstance(model, CounterPropagatingCoupler):
        return -1j * model.params.transit_time / (2.0 + model.params.alpha)
    if isinstance(model, (TopGateCoupler, DirectDriveCoupler)):
        return 0j
    h = 1e-6 / model.transit_time()
    d1 = (model.s_ba(h) - model.s_ba(0.0)) / h
    d2 = (model.s_ba(h / 2) - model.s_ba(0.0)) / (h / 2)
    return complex(2 * d2 - d1)


def effective_gate_voltage(params: CouplerParams, omega, v_g_spectrum):
    """Gate drive filtered by the coupler: U_eff = V_g / (1 + alpha f(X))."""
    omega = np.asarray(omega, dtype=float)
    v_g_spectrum = np.asarray(v_g_spectrum, dtype=complex)
    f = phase_factor_f(omega * params.transit_time)
    return v_g_spectrum / (1.0 + params.alpha * f)


# ---------------------------------------------------------------------------
# External interface: tabulated coupler CSV
# ---------------------------------------------------------------------------

_TABULATED_HEADER = ["omega", "s_bb_re", "s_bb_im", "s_ba_re", "s_ba_im"]


def load_tabulated_coupler(path) -> TabulatedCoupler:
    """Load a measured scattering matrix from CSV.

    Expected header: ``omega,s_bb_re,s_bb_im,s_ba_re,s_ba_im`` with omega in
    rad/s, strictly increasing.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty coupler file") from None
        if [h.strip() for h in header] != _TABULATED_HEADER:
            raise SchemaError(
                f"{path}: expected header {','.join(_TABULATED_HEADER)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise SchemaError(f"{path}:{lineno}: expected 5 columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    if len(rows) < 2:
        raise SchemaError(f"{path}: need at least two frequency samples")
    data = np.asarray(rows)
    omega = data[:, 0]
    if not np.all(np.diff(omega) > 0):
        raise SchemaError(f"{path}: omega column must be strictly increasing")
    s_bb = data[:, 1] + 1j * data[:, 2]
    s_ba = data[:, 3] + 1j * data[:, 4]
    return TabulatedCoupler(omega, s_bb, s_ba)
