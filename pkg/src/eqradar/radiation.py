"""Franck-Condon recoil factors of the supported radiation states.

The recoil factor F(t) is the average of the normal-ordered back-action
displacement operator in the incoming radiation state; it multiplies the
elastic amplitude in the effective scattering kernel and equals the ratio
of the interference signal with and without radiation.  Variants:

* vacuum           -> F = 1
* classical drive  -> pure phase, no decoherence
* narrowband squeezed vacuum -> periodic real factor, harmonics analytic
* Fock state / mixture in a Lorentzian EMP mode -> transient Laguerre factor

Single-EMP noise diagnostics (Wigner function of the excess current noise
and the instantaneous heat current) live here as well since they share the
truncated mode machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import constants

from .coupler import CouplerModel, DirectDriveCoupler, TopGateCoupler
from .errors import DomainError, SchemaError
from .numerics import (
    ComplexTable,
    bessel_i,
    filon_fourier,
    fourier_coeffs_periodic,
    gauss_panel_nodes,
    quad_panels,
)

__all__ = [
    "RadiationState",
    "Vacuum",
    "ClassicalDrive",
    "SqueezedNarrowband",
    "FockLorentzian",
    "FockMixture",
    "FranckCondonFactor",
    "UnitConstantF",
    "HarmonicsF",
    "TransientF",
    "fc_vacuum",
    "fc_classical",
    "photo_assisted_coefficients",
    "fc_squeezed_exact",
    "fc_squeezed_harmonics",
    "squeezing_effective_moments",
    "fc_gaussian",
    "TruncatedLorentzianMode",
    "fock_overlap_x",
    "fock_x_table",
    "fc_fock",
    "fc_mixture",
    "wigner_noise_single_emp",
    "heat_current",
    "franck_condon_factor",
    "squeezing_db_to_z",
]

_E = constants.e
_HBAR = constants.hbar


def squeezing_db_to_z(db: float) -> float:
    """Squeezing parameter |z| for a quoted noise reduction in dB.

    The quadrature compression factor of the squeezed vacuum is e^{-4|z|},
    so dB = -10 log10(e^{-4|z|}).
    """
    if db < 0:
        raise DomainError("squeezing dB must be non-negative")
    return db * math.log(10.0) / 40.0


# ---------------------------------------------------------------------------
# Radiation states
# ---------------------------------------------------------------------------

class RadiationState:
    pass


@dataclass(frozen=True)
class Vacuum(RadiationState):
    pass


@dataclass(frozen=True)
class ClassicalDrive(RadiationState):
    """Harmonic drive: tones (frequency Hz, amplitude V, phase rad)."""

    harmonics: tuple = ()
    time_series: ComplexTable | None = None

    def __post_init__(self):
        if not self.harmonics and self.time_series is None:
            raise DomainError("classical drive needs tones or a time series")


@dataclass(frozen=True)
class SqueezedNarrowband(RadiationState):
    """Two-mode squeezed noise concentrated around omega0 with Q0 > 1."""

    omega0: float
    q0: float
    z: complex
    s_ba_at_omega0: complex
    phi0: float | None = None  # override of 2 Arg(s_ba) + Arg(z)

    def __post_init__(self):
        if not self.q0 > 1:
            raise DomainError("narrowband state requires Q0 > 1")
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")

    @property
    def coupling_weight(self) -> float:
        """Lambda = |S_ba(omega0)|^2 / Q0."""
        return abs(self.s_ba_at_omega0) ** 2 / self.q0

    @property
    def phase(self) -> float:
        if self.phi0 is not None:
            return self.phi0
        return 2.0 * float(np.angle(self.s_ba_at_omega0)) + float(np.angle(self.z))


@dataclass(frozen=True)
class FockLorentzian(RadiationState):
    """N-photon Fock state in a Lorentzian EMP mode of width gamma0."""

    n: int
    omega0: float
    gamma0: float

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise DomainError("photon number must be a non-negative integer")
        if not (0 < self.gamma0 < self.omega0):
            raise DomainError("Lorentzian mode requires 0 < gamma0 < omega0")


@dataclass(frozen=True)
class FockMixture(RadiationState):
    """Statistical mixture sum_N p_N |N><N| in one Lorentzian mode."""

    probabilities: tuple
    omega0: float
    gamma0: float

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(float(np.sum(p)) - 1.0) > 1e-12:
            raise DomainError("probabilities must be non-negative and sum to 1")
        if not (0 < self.gamma0 < self.omega0):
            raise DomainError("Lorentzian mode requires 0 < gamma0 < omega0")

    @property
    def mean_n(self) -> float:
        p = np.asarray(self.probabilities, dtype=float)
        return float(np.sum(np.arange(p.size) * p))


# ---------------------------------------------------------------------------
# Franck-Condon factor variants
# ---------------------------------------------------------------------------

class FranckCondonFactor:
    def __call__(self, t):
        raise NotImplementedError


class UnitConstantF(FranckCondonFactor):
    """F = 1: no radiation back-action beyond the vacuum one."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones(t.shape, dtype=complex)
        return out if out.ndim else 1.0 + 0.0j

    def harmonics_view(self):
        return HarmonicsF(0.0, np.array([1.0 + 0.0j]))

    def transient_view(self, t_grid):
        t_grid = np.asarray(t_grid, dtype=float)
        return TransientF(ComplexTable(t_grid, np.ones_like(t_grid, dtype=complex)))


class HarmonicsF(FranckCondonFactor):
    """Periodic factor F(t) = sum_n F_n exp(-2 i n omega0 t)."""

    def __init__(self, omega0: float, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.size % 2 != 1:
            raise DomainError("harmonic list must be centered (odd length)")
        if coeffs.size > 1 and omega0 <= 0:
            raise DomainError("omega0 must be positive for a non-constant comb")
        self.omega0 = float(omega0)
        self.coeffs = coeffs
        self.n_max = (coeffs.size - 1) // 2

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.n_max + n])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        ns = np.arange(-self.n_max, self.n_max + 1)
        phases = np.exp(-2j * self.omega0 * np.outer(np.atleast_1d(t), ns))
        out = phases @ self.coeffs
        return out if t.ndim else complex(out[0])

    @property
    def period(self) -> float:
        if self.n_max == 0:
            return math.inf
        return math.pi / self.omega0


class TransientF(FranckCondonFactor):
    """Aperiodic factor tending to 1 at both ends of its table."""

    def __init__(self, table: ComplexTable):
        self.table = table

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t)
        inside = (flat >= self.table.omega_min) & (flat <= self.table.omega_max)
        out = np.ones(flat.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self.table(flat[inside])
        return out if t.ndim else complex(out[0])

    def excess_table(self) -> ComplexTable:
        """Table of F - 1, the part with a regular Fourier transform."""
        return ComplexTable(self.table.grid, self.table.values - 1.0)


# ---------------------------------------------------------------------------
# Vacuum and classical drives
# ---------------------------------------------------------------------------

def fc_vacuum() -> UnitConstantF:
    return UnitConstantF()


def _gate_kernel_spectrum(model: CouplerModel, omega):
    """Gamma(omega) = (t(omega) - 1)/(i omega) for transmission-type models."""
    if not isinstance(model, (TopGateCoupler, DirectDriveCoupler)):
        raise DomainError(
            "classical drive factors require a transmission coupler "
            "(top gate or direct drive)"
        )
    omega = np.asarray(omega, dtype=float)
    out = np.empty(omega.shape, dtype=complex)
    t0 = model.transit_time()
    small = np.abs(omega) * t0 < 1e-9
    if np.any(small):
        out[small] = model.dsbb_domega_zero() / 1j
    big = ~small
    if np.any(big):
        wb = omega[big]
        out[big] = (model.s_bb(np.abs(wb)) - 1.0) / (1j * wb)
        neg = wb < 0
        if np.any(neg):
            wneg = wb[neg]
            out[np.where(big)[0][neg]] = np.conj(
                (model.s_bb(-wneg) - 1.0) / (1j * (-wneg))
            )
    return out


def fc_classical(model: CouplerModel, drive: ClassicalDrive,
                 t_pad: float = 5.0) -> FranckCondonFactor:
    """Pure-phase recoil factor of a classically driven gate.

    The accumulated phase is the drive filtered by the gate response
    kernel; at alpha -> 0 this reduces to the plain electric phase picked
    up over the transit window [t - l/v_F, t].
    """
    if drive.harmonics:
        freqs = np.array([h[0] for h in drive.harmonics], dtype=float)
        amps = np.array([h[1] for h in drive.harmonics], dtype=float)
        phases = np.array([h[2] for h in drive.harmonics], dtype=float)
        nonzero = freqs[freqs > 0]
        if nonzero.size == 0:
            # static offset: constant phase factor
            gamma0 = complex(_gate_kernel_spectrum(model, np.array([0.0]))[0])
            theta = (_E / _HBAR) * gamma0 * float(np.sum(amps * np.cos(phases)))
            return HarmonicsF(0.0, np.array([np.exp(1j * theta)]))
        base = float(np.min(nonzero))
        ratios = nonzero / base
        if np.any(np.abs(ratios - np.round(ratios)) > 1e-9):
            raise DomainError("harmonic drive tones must share a fundamental")
        omegas = 2 * np.pi * freqs
        gammas = _gate_kernel_spectrum(model, omegas)
        # V(t) = sum_k A_k cos(w_k t + phi_k) = sum_k 2 Re[c_k e^{-i w_k t}]
        cs = 0.5 * amps * np.exp(-1j * phases)

        def theta(t):
            t = np.asarray(t, dtype=float)
            acc = np.zeros(t.shape, dtype=float)
            for wk, g, c in zip(omegas, gammas, cs):
                acc = acc + 2.0 * np.real(g * c * np.exp(-1j * wk * t))
            return (_E / _HBAR) * acc

        period = 1.0 / base
        coeffs = fourier_coeffs_periodic(lambda t: np.exp(1j * theta(t)), period)
        return HarmonicsF(np.pi * base, coeffs)

    # transient time series drive
    table = drive.time_series
    dt = float(np.min(np.diff(table.grid)))
    omega_hi = 0.5 * np.pi / dt
    v_spectrum_probe = filon_fourier(table.grid, table.values,
                                     np.array([omega_hi]))[0]
    v_scale = float(np.max(np.abs(table.values))) * (table.omega_max - table.omega_min)
    if v_scale > 0 and abs(v_spectrum_probe) > 1e-6 * v_scale:
        raise DomainError("drive spectrum exceeds the resolvable band of its grid")
    t0 = model.transit_time()
    edges = np.linspace(0.0, omega_hi, max(64, int(omega_hi * (t0 + dt) * 4)))
    nodes, weights = gauss_panel_nodes(edges, order=8)
    v_nodes = filon_fourier(table.grid, table.values, nodes)
    g_nodes = _gate_kernel_spectrum(model, nodes)
    t_grid = np.linspace(table.omega_min - t_pad * t0,
                         table.omega_max + t_pad * t0,
                         max(513, 8 * table.grid.size))
    kernel = weights * g_nodes * v_nodes
    phase = (np.exp(-1j * np.outer(t_grid, nodes)) @ kernel) / np.pi
    theta_vals = (_E / _HBAR) * np.real(phase)
    return TransientF(ComplexTable(t_grid, np.exp(1j * theta_vals)))


def photo_assisted_coefficients(f: FranckCondonFactor) -> np.ndarray:
    """Fourier amplitudes of a periodic recoil factor (n = -N .. N).

    For a unit-modulus factor the amplitudes satisfy sum |F_n|^2 = 1.
    """
    if isinstance(f, UnitConstantF):
        return np.array([1.0 + 0.0j])
    if isinstance(f, HarmonicsF):
        return f.coeffs.copy()
    raise DomainError("photo-assisted amplitudes require a periodic factor")


# ---------------------------------------------------------------------------
# Squeezed radiation
# ---------------------------------------------------------------------------

def fc_squeezed_exact(state: SqueezedNarrowband, t):
    """F(t) = exp{Lambda sinh(2|z|) [cosh(2|z|) cos(2 w0 t - phi0) - sinh(2|z|)]}."""
    t = np.asarray(t, dtype=float)
    zmod = abs(state.z)
    lam = state.coupling_weight
    s, c = math.sinh(2 * zmod), math.cosh(2 * zmod)
    out = np.exp(lam * s * (c * np.cos(2 * state.omega0 * t - state.phase) - s))
    return out.astype(complex) if out.ndim else complex(out)


def fc_squeezed_harmonics(state: SqueezedNarrowband,
                          coeff_tol: float = 1e-14) -> HarmonicsF:
    """Harmonic expansion F_n = e^{-L s^2} I_|n|(L c s) e^{i n phi0}."""
    zmod = abs(state.z)
    lam = state.coupling_weight
    s, c = math.sinh(2 * zmod), math.cosh(2 * zmod)
    a = lam * c * s
    prefactor = math.exp(-lam * s * s)
    coeffs = [prefactor * bessel_i(0, a)]  # n = 0
    n = 0
    while True:
        n += 1
        val = prefactor * bessel_i(n, a)
        if val < coeff_tol or n > 512:
            n -= 1
            break
        coeffs.append(val)
    mags = np.array(coeffs)
    ns = np.arange(-n, n + 1)
    out = mags[np.abs(ns)] * np.exp(1j * ns * state.phase)
    return HarmonicsF(state.omega0, out)


def squeezing_effective_moments(s_ba: Callable, nbar: Callable, xi: Callable,
                                omega0: float, half_band: float) -> dict:
    """Filtered photon number and pair correlation of a stationary-periodic
    narrowband noise.

        N_eff  = integral |S_ba(w)|^2 nbar(w) / w dw
        xi_eff = integral S_ba(w0+W) S_ba(w0-W) / sqrt(w0^2-W^2) xi(2W) dW

    ``half_band`` bounds the support of nbar around omega0 and of xi(2W).
    """
    if not 0 < half_band < omega0:
        raise DomainError("half_band must lie in (0, omega0)")

    def n_integrand(w):
        return np.abs(np.asarray(s_ba(w), dtype=complex)) ** 2 \
            * np.asarray(nbar(w), dtype=complex) / w

    lo, hi = omega0 - half_band, omega0 + half_band
    n_eff = quad_panels(n_integrand, np.linspace(lo, hi, 65), rel_tol=1e-10)

    def xi_integrand(big_omega):
        su = np.asarray(s_ba(omega0 + big_omega), dtype=complex)
        sv = np.asarray(s_ba(omega0 - big_omega), dtype=complex)
        return su * sv / np.sqrt(omega0 ** 2 - big_omega ** 2) \
            * np.asarray(xi(2.0 * big_omega), dtype=complex)

    xi_eff = quad_panels(xi_integrand,
                         np.linspace(-half_band, half_band, 65), rel_tol=1e-10)
    return {"n_eff": complex(n_eff), "xi_eff": complex(xi_eff)}


def fc_gaussian(n_eff: float, xi_eff: complex, omega0: float,
                coeff_tol: float = 1e-14) -> FranckCondonFactor:
    """Recoil factor of a Gaussian state with filtered moments (N_eff, xi_eff).

    |F(t)| = exp(Re[xi_eff e^{-2 i w0 t}] - N_eff); the mean-field phase is
    taken to zero (classical mean fields go through the classical route).
    """
    n_eff = float(np.real(n_eff))
    mag = abs(xi_eff)
    if mag == 0.0:
        return HarmonicsF(0.0, np.array([math.exp(-n_eff) + 0.0j]))
    prefactor = math.exp(-n_eff)
    coeffs = [prefactor * bessel_i(0, mag)]
    n = 0
    while True:
        n += 1
        val = prefactor * bessel_i(n, mag)
        if val < coeff_tol or n > 512:
            n -= 1
            break
        coeffs.append(val)
    mags = np.array(coeffs)
    ns = np.arange(-n, n + 1)
    phase = float(np.angle(xi_eff))
    out = mags[np.abs(ns)] * np.exp(1j * ns * phase)
    return HarmonicsF(omega0, out)


# ---------------------------------------------------------------------------
# Single-EMP (Fock) machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedLorentzianMode:
    """Lorentzian mode wavefunction truncated to [0, 2 omega0], renormalized.

    The symmetric window keeps the mean energy at exactly hbar*omega0,
    which the heat-current sum rule relies on.  ``renorm`` reports the
    1/sqrt(weight) factor applied after truncation.
    """

    omega0: float
    gamma0: float

    def __post_init__(self):
        if not (0 < self.gamma0 < self.omega0):
            raise DomainError("Lorentzian mode requires 0 < gamma0 < omega0")

    @property
    def window_weight(self) -> float:
        return (2.0 / math.pi) * math.atan(2.0 * self.omega0 / self.gamma0)

    @property
    def renorm(self) -> float:
        return 1.0 / math.sqrt(self.window_weight)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        inside = (omega >= 0.0) & (omega <= 2.0 * self.omega0)
        out = np.zeros(omega.shape, dtype=complex)
        out[inside] = (
            math.sqrt(self.gamma0) * self.renorm
            / (omega[inside] - self.omega0 + 0.5j * self.gamma0)
        )
        return out if out.ndim else complex(out)

    def support(self):
        return 0.0, 2.0 * self.omega0


def _emp_panel_edges(mode: TruncatedLorentzianMode, t_max: float,
                     dense_halfwidth: float = 40.0,
                     dense_step: float = 0.25):
    """Panel edges on the mode support: dense around the peak, capped by
    the oscillation of exp(-i w t) at the largest |t| elsewhere."""
    w0, g0 = mode.omega0, mode.gamma0
    lo, hi = mode.support()
    cap = min((3.0 / t_max) if t_max > 0 else math.inf, (hi - lo) / 48.0)
    cap = max(cap, 1e-12 * w0)
    a = max(lo, w0 - dense_halfwidth * g0)
    b = min(hi, w0 + dense_halfwidth * g0)
    edges = [np.linspace(a, b, int(math.ceil((b - a) / (dense_step * g0))) + 1)]
    if a > lo:
        edges.insert(0, np.linspace(lo, a, int(math.ceil((a - lo) / cap)) + 1))
    if b < hi:
        edges.append(np.linspace(b, hi, int(math.ceil((hi - b) / cap)) + 1))
    return np.unique(np.concatenate(edges))


def fock_overlap_x(model: CouplerModel, omega0: float, gamma0: float, t):
    """Filtered single-EMP noise parameter x(t) = 2 pi |<chi | S_ba* L_t>|^2.

    The overlap runs over the truncated, renormalized Lorentzian mode;
    x >= 0 and x -> 0 away from the mode's passage.
    """
    t = np.asarray(t, dtype=float)
    t_arr = np.atleast_1d(t)
    mode = TruncatedLorentzianMode(omega0, gamma0)
    t_max = float(np.max(np.abs(t_arr))) if t_arr.size else 0.0
    edges = _emp_panel_edges(mode, t_max)
    nodes, weights = gauss_panel_nodes(edges, order=8)
    amps = np.asarray(model.s_ba(nodes), dtype=complex) * mode(nodes) / np.sqrt(nodes)
    kernel = weights * amps
    overlap = -(np.exp(-1j * np.outer(t_arr, nodes)) @ kernel) / (2 * np.pi)
    x = 2 * np.pi * np.abs(overlap) ** 2
    return x if t.ndim else float(x[0])


def fock_x_table(model: CouplerModel, omega0: float, gamma0: float,
                 t_lo_factor: float = 6.0, t_hi_factor: float = 16.0,
                 points_per_cycle: int = 48) -> ComplexTable:
    """x(t) tabulated on the span used for transient recoil factors."""
    dt = (2 * np.pi / omega0) / points_per_cycle
    t_lo = -t_lo_factor / gamma0
    t_hi = t_hi_factor / gamma0
    n = int(math.ceil((t_hi - t_lo) / dt)) + 1
    t = np.linspace(t_lo, t_hi, n)
    return ComplexTable(t, fock_overlap_x(model, omega0, gamma0, t))


def _laguerre_array(n: int, x: np.ndarray) -> np.ndarray:
    if n == 0:
        return np.ones_like(x)
    prev = np.ones_like(x)
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def fc_fock(n: int, x_of_t: ComplexTable) -> FranckCondonFactor:
    """F(t) = L_n(x(t)) for an n-photon Fock state."""
    if n < 0 or n != int(n):
        raise DomainError("photon number must be a non-negative integer")
    if int(n) == 0:
        return UnitConstantF()
    x = np.real(x_of_t.values)
    return TransientF(ComplexTable(x_of_t.grid, _laguerre_array(int(n), x)))


def fc_mixture(probabilities, x_of_t: ComplexTable) -> FranckCondonFactor:
    """F(t) = sum_N p_N L_N(x(t)) for a photon-number mixture."""
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0) or abs(float(np.sum(p)) - 1.0) > 1e-12:
        raise DomainError("probabilities must be non-negative and sum to 1")
    x = np.real(x_of_t.values)
    acc = np.zeros_like(x, dtype=complex)
    prev = np.ones_like(x)
    cur = 1.0 - x
    for n, pn in enumerate(p):
        if n == 0:
            term = prev
        elif n == 1:
            term = cur
        else:
            k = n - 1
            prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            term = cur
        acc = acc + pn * term
    if p.size == 1:
        return UnitConstantF()
    return TransientF(ComplexTable(x_of_t.grid, acc))


# ---------------------------------------------------------------------------
# Single-EMP noise diagnostics
# ---------------------------------------------------------------------------

def wigner_noise_single_emp(omega0: float, gamma0: float, t: float,
                            omega: float, branch: str = "exact") -> float:
    """Wigner function of the excess current noise of one EMP (A^2 s).

    ``exact`` integrates the two-frequency coherence of the truncated mode;
    ``approx`` is the energy-resolved closed form
    Theta(t) (e^2 w0 / 2 pi) 4 g0 t sinc(2(|w|-w0) t) e^{-g0 t},
    valid for gamma0/omega0 <= 0.2.
    """
    mode = TruncatedLorentzianMode(omega0, gamma0)
    aw = abs(omega)
    if branch == "approx":
        if gamma0 / omega0 > 0.2:
            raise DomainError("approximate branch needs gamma0/omega0 <= 0.2")
        if t <= 0:
            return 0.0
        arg = 2.0 * (aw - omega0) * t
        sinc = 1.0 if arg == 0 else math.sin(arg) / arg
        return (_E ** 2 * omega0 / (2 * math.pi)) * 4 * gamma0 * t * sinc \
            * math.exp(-gamma0 * t)
    if branch != "exact":
        raise DomainError("branch must be 'exact' or 'approx'")

    lo, hi = mode.support()
    # the pair (|w| + W/2, |w| - W/2) must stay inside the mode support
    w_lo = max(-2 * aw, 2 * (lo - aw), 2 * (aw - hi))
    w_hi = min(2 * aw, 2 * (hi - aw), 2 * (aw - lo))
    if w_hi <= w_lo:
        return 0.0
    peaks = [2 * (omega0 - aw), 2 * (aw - omega0)]
    cap = min((3.0 / abs(t)) if t != 0 else math.inf, (w_hi - w_lo) / 32.0)
    cap = max(cap, 1e-9 * gamma0)
    edges = [np.linspace(w_lo, w_hi, int(math.ceil((w_hi - w_lo) / cap)) + 1)]
    for pk in peaks:
        a, b = max(w_lo, pk - 20 * gamma0), min(w_hi, pk + 20 * gamma0)
        if b > a:
            edges.append(np.linspace(a, b, int(math.ceil((b - a) / (gamma0 / 3))) + 1))
    all_edges = np.unique(np.concatenate(edges))
    nodes, weights = gauss_panel_nodes(all_edges, order=8)
    vals = (
        np.exp(-1j * nodes * t)
        * np.sqrt(aw ** 2 - 0.25 * nodes ** 2)
        * mode(aw + 0.5 * nodes) * np.conj(mode(aw - 0.5 * nodes))
    )
    integral = np.sum(weights * vals)
    return float((_E ** 2 / (2 * math.pi)) * np.real(integral) / (2 * math.pi))


def _heat_mode_transform(mode: TruncatedLorentzianMode, t):
    """g(t) = integral sqrt(w) chi(w) e^{-i w t} dw over the mode support."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    t_max = float(np.max(np.abs(t_arr))) if t_arr.size else 0.0
    edges = _emp_panel_edges(mode, t_max)
    nodes, weights = gauss_panel_nodes(edges, order=8)
    kernel = weights * np.sqrt(nodes) * mode(nodes)
    return np.exp(-1j * np.outer(t_arr, nodes)) @ kernel


def heat_current(state, t, method: str = "numeric"):
    """Average instantaneous heat current (W) carried into the coupler.

    ``numeric`` evaluates the truncated-mode expression whose time integral
    is <N> hbar omega0 up to the (symmetric, hence tiny) truncation error;
    ``lorentzian`` is the narrowband closed form
    <N> hbar omega0 Theta(t) gamma0 e^{-gamma0 t}.
    """
    if isinstance(state, FockLorentzian):
        mean_n, omega0, gamma0 = float(state.n), state.omega0, state.gamma0
    elif isinstance(state, FockMixture):
        mean_n, omega0, gamma0 = state.mean_n, state.omega0, state.gamma0
    else:
        raise DomainError("heat current defined for Fock states and mixtures")
    t = np.asarray(t, dtype=float)
    if method == "lorentzian":
        out = np.where(
            t > 0,
            mean_n * _HBAR * omega0 * gamma0 * np.exp(-gamma0 * np.clip(t, 0, None)),
            0.0,
        )
        return out if t.ndim else float(out)
    if method != "numeric":
        raise DomainError("method must be 'numeric' or 'lorentzian'")
    mode = TruncatedLorentzianMode(omega0, gamma0)
    g = _heat_mode_transform(mode, t)
    out = mean_n * (_HBAR / (4 * np.pi ** 2)) * np.abs(g) ** 2
    return out if t.ndim else float(out if np.isscalar(out) else out[0])


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def franck_condon_factor(state: RadiationState, model: CouplerModel,
                         **table_kwargs) -> FranckCondonFactor:
    """Build the recoil factor of any supported radiation state."""
    if isinstance(state, Vacuum):
        return fc_vacuum()
    if isinstance(state, ClassicalDrive):
        return fc_classical(model, state)
    if isinstance(state, SqueezedNarrowband):
        return fc_squeezed_harmonics(state)
    if isinstance(state, FockLorentzian):
        if state.n == 0:
            return fc_vacuum()
        x = fock_x_table(model, state.omega0, state.gamma0, **table_kwargs)
        return fc_fock(state.n, x)
    if isinstance(state, FockMixture):
        x = fock_x_table(model, state.omega0, state.gamma0, **table_kwargs)
        return fc_mixture(state.probabilities, x)
    raise DomainError(f"unsupported radiation state {type(state).__name__}")
