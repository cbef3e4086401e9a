"""Interference observable of the single-electron interferometer.

A Leviton of width tau_e injected at t_e probes the coupled branch; the dc
interference contrast is

    X+dc = integral F~(Omega) e^{-i Omega (t_e + tau_2)}
           f_{tau_e,tau_2}(Omega) dOmega / 2pi

where F~ is the Fourier transform of the recoil factor and the filter

    f(Omega) = 4 pi tau_e integral_{|Omega|/2}^inf Z1(w - Omega/2)
               e^{-2 w tau_e} e^{-i (w - Omega/2) tau_2} dw / 2pi

folds in electronic decoherence (through Z1) and the reference-branch
delay.  f at positive Omega follows from f(0) exactly; negative Omega
needs quadrature.  The recoil factor enters either as a harmonic comb, a
transient excess, or the constant 1 (vacuum); delta functions in F~ are
always handled symbolically.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import constants

from .decoherence import ElasticAmplitude
from .errors import DomainError, TableRangeError
from .numerics import (
    ComplexTable,
    filon_fourier,
    gauss_panel_nodes,
    integrate_table,
    quad_damped,
    quad_real_line,
)
from .radiation import (
    FranckCondonFactor,
    HarmonicsF,
    TransientF,
    UnitConstantF,
)

__all__ = [
    "LevitonProbe",
    "RadarResult",
    "LevitonRadar",
    "leviton_time_profile",
    "leviton_energy_profile",
    "filter_f",
    "filter_f_adiabatic",
    "vacuum_baseline",
    "optimize_tau2",
    "xplus_dc",
    "kernel_weight",
    "xplus_dc_kernel",
    "TimeDomainResult",
    "xplus_time_domain",
    "EffectiveScattering",
    "effective_scattering_frequency",
    "xplus_energy_resolved",
    "dc_current",
    "SweepPoint",
    "SweepResult",
    "contrast_sweep",
]

_E = constants.e

# the Leviton weight e^{-2 w tau_e} must be below ~1e-15 at the end of the
# solved Z1 table for truncated integrals to be trustworthy
_MIN_DAMPED_SPAN = 17.5


@dataclass(frozen=True)
class LevitonProbe:
    """Leviton wave packet: Lorentzian of width tau_e injected at t_e.

    Frequency profile sqrt(4 pi v_F tau_e) Theta(w) e^{-w tau_e} e^{i w t_e},
    unit-normalized under (1/v_F) int |phi|^2 dw / 2pi.
    """

    tau_e: float
    t_e: float = 0.0

    def __post_init__(self):
        if not self.tau_e > 0:
            raise DomainError("Leviton width must be positive")


def leviton_energy_profile(probe: LevitonProbe, v_fermi: float, omega):
    omega = np.asarray(omega, dtype=float)
    out = np.where(
        omega >= 0,
        math.sqrt(4 * math.pi * v_fermi * probe.tau_e)
        * np.exp(-omega * probe.tau_e) * np.exp(1j * omega * probe.t_e),
        0.0,
    )
    return out if out.ndim else complex(out)


def leviton_time_profile(probe: LevitonProbe, v_fermi: float, t):
    t = np.asarray(t, dtype=float)
    out = np.sqrt(probe.tau_e / (math.pi * v_fermi)) \
        / (probe.tau_e + 1j * (t - probe.t_e))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class RadarResult:
    """dc interference signal with its vacuum reference."""

    x_dc: complex
    baseline: complex
    relative: complex
    params: dict

    @property
    def contrast(self) -> float:
        return abs(self.x_dc)

    @property
    def relative_contrast(self) -> float:
        return abs(self.relative)


# ---------------------------------------------------------------------------
# Filter machinery
# ---------------------------------------------------------------------------

def _damped_z_integral(elastic: ElasticAmplitude, tau_e: float, tau_2: float,
                       shift: float = 0.0, rel_tol: float = 1e-9) -> complex:
    """integral_0^inf Z1(w + shift) e^{-2 w tau_e} e^{-i (w + shift) tau_2} dw."""
    omega_max = elastic.omega_max
    need = shift + _MIN_DAMPED_SPAN / tau_e
    if need > omega_max:
        raise TableRangeError(
            "elastic amplitude not solved far enough: needs omega_max >= "
            f"{need:.3e}, have {omega_max:.3e}"
        )
    upper = min(20.0 / tau_e, omega_max - shift)
    osc_time = abs(tau_2) + elastic.time_scale()
    hint = 2 * math.pi / osc_time if osc_time > 0 else None

    def integrand(w):
        return (elastic.table(w + shift) * np.exp(-2 * w * tau_e)
                * np.exp(-1j * (w + shift) * tau_2))

    # quad_damped truncates at 40/damping_rate; choose the rate so the
    # truncation lands exactly at the usable table span
    return quad_damped(integrand, 40.0 / upper, hint, rel_tol=rel_tol)


def vacuum_baseline(elastic: ElasticAmplitude, tau_e: float,
                    tau_2: float) -> complex:
    """dc contrast with only vacuum in the radiation channel.

    4 pi tau_e integral_0^inf Z1(w) e^{-2 w tau_e} e^{-i w tau_2} dw / 2pi;
    |result| <= 1 always, with equality only for a balanced lossless loop.
    """
    return 2 * tau_e * _damped_z_integral(elastic, tau_e, tau_2)


def filter_f(elastic: ElasticAmplitude, tau_e: float, tau_2: float,
             omega: float) -> complex:
    """Decoherence filter f(Omega), exact at all signs of Omega.

    f(Omega >= 0) = e^{-Omega tau_e} f(0) identically; the negative side is
    a shifted half-line integral over Z1.
    """
    if omega >= 0:
        return math.exp(-omega * tau_e) * vacuum_baseline(elastic, tau_e, tau_2)
    a = abs(omega)
    return 2 * tau_e * math.exp(-a * tau_e) \
        * _damped_z_integral(elastic, tau_e, tau_2, shift=a)


def filter_f_adiabatic(elastic: ElasticAmplitude, tau_e: float, tau_2: float,
                       omega: float) -> complex:
    """Slow-radiation approximation of the filter.

    f(Omega < 0) ~ e^{-|Omega| tau_e} e^{-i |Omega| tau_21} f(0) with
    tau_21 = tau_2 - tau_1; exact whenever Z1 is a pure delay.
    """
    f0 = vacuum_baseline(elastic, tau_e, tau_2)
    if omega >= 0:
        return math.exp(-omega * tau_e) * f0
    a = abs(omega)
    tau_21 = tau_2 - elastic.tau1
    return math.exp(-a * tau_e) * np.exp(-1j * a * tau_21) * f0


def optimize_tau2(elastic: ElasticAmplitude, tau_e: float,
                  span: tuple[float, float] | None = None,
                  coarse: int = 160) -> tuple[float, complex]:
    """Reference delay maximizing the vacuum contrast.

    Coarse scan over the span followed by golden-section refinement of the
    bracketing interval, to 1e-4 of the propagation time scale.
    """
    t_char = elastic.time_scale()
    if span is None:
        span = (0.0, 2.5 * max(t_char, elastic.tau1) + 8 * tau_e)
    lo, hi = span
    taus = np.linspace(lo, hi, coarse)
    mags = np.array([abs(vacuum_baseline(elastic, tau_e, t)) for t in taus])
    k = int(np.argmax(mags))
    a = taus[max(0, k - 1)]
    b = taus[min(coarse - 1, k + 1)]

    phi = (math.sqrt(5.0) - 1) / 2
    tol = 1e-4 * t_char
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc = abs(vacuum_baseline(elastic, tau_e, c))
    fd = abs(vacuum_baseline(elastic, tau_e, d))
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = abs(vacuum_baseline(elastic, tau_e, c))
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = abs(vacuum_baseline(elastic, tau_e, d))
    best = 0.5 * (a + b)
    return best, vacuum_baseline(elastic, tau_e, best)


# ---------------------------------------------------------------------------
# X+dc evaluation
# ---------------------------------------------------------------------------

class LevitonRadar:
    """Caches the filter data for one (Z1, tau_e, tau_2) configuration.

    Sweeps over injection time reuse the cached harmonic filters or the
    transient node set, so the expensive quadratures run once.
    """

    def __init__(self, elastic: ElasticAmplitude, tau_e: float, tau_2: float,
                 rel_tol: float = 1e-9, sweep_time_span: float | None = None):
        if not tau_e > 0:
            raise DomainError("tau_e must be positive")
        self.elastic = elastic
        self.tau_e = tau_e
        self.tau_2 = tau_2
        self.rel_tol = rel_tol
        self.sweep_time_span = sweep_time_span
        self.baseline = vacuum_baseline(elastic, tau_e, tau_2)
        self._harmonic_cache: dict = {}
        self._transient_cache: dict = {}

    # -- filters ---------------------------------------------------------

    def filter_at(self, omega: float, method: str = "exact") -> complex:
        if method == "exact":
            if omega >= 0:
                return math.exp(-omega * self.tau_e) * self.baseline
            a = abs(omega)
            return 2 * self.tau_e * math.exp(-a * self.tau_e) * _damped_z_integral(
                self.elastic, self.tau_e, self.tau_2, shift=a,
                rel_tol=self.rel_tol,
            )
        if method == "adiabatic":
            if omega >= 0:
                return math.exp(-omega * self.tau_e) * self.baseline
            a = abs(omega)
            tau_21 = self.tau_2 - self.elastic.tau1
            return math.exp(-a * self.tau_e) * complex(np.exp(-1j * a * tau_21)) \
                * self.baseline
        raise DomainError("method must be 'exact' or 'adiabatic'")

    def _harmonic_filters(self, f: HarmonicsF, method: str) -> np.ndarray:
        key = (id(f), method)
        hit = self._harmonic_cache.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        ns = np.arange(-f.n_max, f.n_max + 1)
        vals = np.array([
            self.filter_at(2 * n * f.omega0, method) for n in ns
        ])
        self._harmonic_cache[key] = (f, vals)
        return vals

    def _negative_filters_batch(self, omegas: np.ndarray,
                                method: str) -> np.ndarray:
        """Filter values at many negative frequencies on one shared rule.

        The shifted half-line integrals reuse a single composite Gauss rule,
        evaluated for all shifts at once; per-point adaptive quadrature
        would redo the same panel work thousands of times.
        """
        omegas = np.asarray(omegas, dtype=float)
        if method == "adiabatic":
            tau_21 = self.tau_2 - self.elastic.tau1
            return np.exp(omegas * self.tau_e) \
                * np.exp(1j * omegas * tau_21) * self.baseline
        shifts = -omegas
        need = float(np.max(shifts)) + _MIN_DAMPED_SPAN / self.tau_e
        if need > self.elastic.omega_max:
            raise TableRangeError(
                "elastic amplitude not solved far enough: needs omega_max >= "
                f"{need:.3e}, have {self.elastic.omega_max:.3e}"
            )
        upper = min(20.0 / self.tau_e,
                    self.elastic.omega_max - float(np.max(shifts)))
        osc = abs(self.tau_2) + self.elastic.time_scale()
        width = (2 * np.pi / 12.0) / osc if osc > 0 else upper / 64
        width = max(width, upper / 4096)
        # dense panels while the Leviton weight is alive, geometric growth
        # once it has decayed away
        dense_hi = min(upper, 4.5 / self.tau_e)
        edges = list(np.arange(0.0, dense_hi, width)) + [dense_hi]
        w = width
        pos = dense_hi
        while pos < upper:
            w *= 1.3
            pos = min(upper, pos + w)
            edges.append(pos)
        nodes, weights = gauss_panel_nodes(np.unique(edges), 8)
        damped = weights * np.exp(-2 * nodes * self.tau_e)
        out = np.empty(omegas.size, dtype=complex)
        chunk = max(1, (1 << 21) // nodes.size)
        for s in range(0, omegas.size, chunk):
            sh = shifts[s:s + chunk][:, None]
            zvals = self.elastic.table((nodes[None, :] + sh).ravel())
            zvals = zvals.reshape(sh.size, nodes.size)
            phase = np.exp(-1j * (nodes[None, :] + sh) * self.tau_2)
            out[s:s + chunk] = (zvals * phase) @ damped
        return 2 * self.tau_e * np.exp(omegas * self.tau_e) * out

    def _transient_nodes(self, f: TransientF, method: str):
        key = (id(f), method)
        hit = self._transient_cache.get(key)
        if hit is not None and hit[0] is f:
            return hit[1], hit[2], hit[3]
        from .decoherence import _decimate

        raw = f.excess_table()
        dg, dv = _decimate(raw.grid, raw.values, tol=1e-8)
        excess = ComplexTable(dg, dv) if dg.size < raw.grid.size else raw
        nodes, weights = self._build_omega_nodes(excess)
        df = filon_fourier(excess.grid, excess.values, nodes)
        fvals = np.empty(nodes.size, dtype=complex)
        neg = nodes < 0
        fvals[~neg] = np.exp(-nodes[~neg] * self.tau_e) * self.baseline
        if np.any(neg):
            fvals[neg] = self._negative_filters_batch(nodes[neg], method)
        self._transient_cache[key] = (f, nodes, weights * df * fvals, None)
        return nodes, weights * df * fvals, None

    def _build_omega_nodes(self, excess: ComplexTable):
        grid = excess.grid
        span = grid[-1] - grid[0]
        dt = float(np.min(np.diff(grid)))
        # bands beyond the resolvable table content, the Leviton damping
        # e^{-|Omega| tau_e}, or the solved filter range cannot contribute
        omega_cap = min(
            0.75 * math.pi / dt,
            28.0 / self.tau_e,
            max(self.elastic.omega_max - 18.5 / self.tau_e, 1.0 / span),
        )
        t_max = self.sweep_time_span
        if t_max is None:
            t_max = span
        cap = min(2.5 / t_max, omega_cap / 64)
        # probe the transform magnitude, weighted by the filter's own
        # exponential damping, to find the bands that can contribute
        probe = np.linspace(-omega_cap, omega_cap, 1025)
        mags = np.abs(filon_fourier(grid, excess.values, probe)) \
            * np.exp(-np.abs(probe) * self.tau_e)
        peak = float(np.max(mags))
        if peak == 0.0:
            nodes, weights = gauss_panel_nodes(np.linspace(-1.0, 1.0, 3), 8)
            return nodes, weights
        active = mags > 1e-9 * peak
        # pad the active probe bins and merge into intervals
        idx = np.where(active)[0]
        pad = 2
        intervals = []
        start = idx[0]
        prev = idx[0]
        for i in idx[1:]:
            if i > prev + 4:
                intervals.append((max(0, start - pad), min(probe.size - 1, prev + pad)))
                start = i
            prev = i
        intervals.append((max(0, start - pad), min(probe.size - 1, prev + pad)))
        edges = []
        feature = 2 * math.pi / span * 0.5
        width = min(cap, feature) if cap > 0 else feature
        for i0, i1 in intervals:
            a, b = probe[i0], probe[i1]
            n = max(8, int(math.ceil((b - a) / width)))
            edges.append(np.linspace(a, b, n + 1))
        all_edges = np.unique(np.concatenate(edges))
        return gauss_panel_nodes(all_edges, order=8)

    # -- signals ----------------------------------------------------------

    def xplus(self, fc: FranckCondonFactor, t_e: float,
              method: str = "exact") -> complex:
        if isinstance(fc, UnitConstantF):
            return self.baseline
        if isinstance(fc, HarmonicsF):
            if fc.n_max == 0:
                return complex(fc.coefficient(0)) * self.baseline
            filters = self._harmonic_filters(fc, method)
            ns = np.arange(-fc.n_max, fc.n_max + 1)
            phases = np.exp(-2j * ns * fc.omega0 * (t_e + self.tau_2))
            return complex(np.sum(fc.coeffs * phases * filters))
        if isinstance(fc, TransientF):
            nodes, kernel, _ = self._transient_nodes(fc, method)
            phase = np.exp(-1j * nodes * (t_e + self.tau_2))
            return self.baseline + complex(np.sum(kernel * phase)) / (2 * math.pi)
        raise DomainError(f"unsupported recoil factor {type(fc).__name__}")

    def result(self, fc: FranckCondonFactor, t_e: float,
               method: str = "exact") -> RadarResult:
        if isinstance(fc, UnitConstantF):
            x = self.baseline
            rel = 1.0 + 0.0j  # exact by construction for the vacuum
        else:
            x = self.xplus(fc, t_e, method)
            rel = x / self.baseline
        return RadarResult(
            x_dc=x,
            baseline=self.baseline,
            relative=rel,
            params={
                "tau_e": self.tau_e,
                "t_e": t_e,
                "tau_2": self.tau_2,
                "method": method,
            },
        )

    def maximize_over_te(self, fc: FranckCondonFactor, n_grid: int = 240,
                         method: str = "exact") -> tuple[float, complex]:
        """Injection time maximizing |X| (dense scan + parabolic refine)."""
        if isinstance(fc, UnitConstantF):
            return 0.0, self.baseline
        if isinstance(fc, HarmonicsF):
            if fc.n_max == 0:
                return 0.0, self.xplus(fc, 0.0, method)
            period = fc.period
            tes = np.linspace(0.0, period, n_grid, endpoint=False)
        else:
            g = fc.table.grid
            tes = np.linspace(g[0] - self.tau_2, g[-1] - self.tau_2, n_grid)
        mags = np.array([abs(self.xplus(fc, t, method)) for t in tes])
        k = int(np.argmax(mags))
        # parabolic refinement through the three bracketing samples
        t0 = tes[k]
        h = tes[1] - tes[0]
        ym = mags[(k - 1) % len(tes)] if isinstance(fc, HarmonicsF) else mags[max(k - 1, 0)]
        yp = mags[(k + 1) % len(tes)] if isinstance(fc, HarmonicsF) else mags[min(k + 1, len(tes) - 1)]
        y0 = mags[k]
        denom = ym - 2 * y0 + yp
        if denom < 0:
            t0 = t0 + 0.5 * h * (ym - yp) / denom
        return float(t0), self.xplus(fc, float(t0), method)


def xplus_dc(elastic: ElasticAmplitude, probe: LevitonProbe, tau_2: float,
             fc: FranckCondonFactor, method: str = "exact") -> RadarResult:
    """dc radar signal for one probe configuration and recoil factor."""
    radar = LevitonRadar(elastic, probe.tau_e, tau_2)
    return radar.result(fc, probe.t_e, method)


# ---------------------------------------------------------------------------
# Kernel (convolution) route
# ---------------------------------------------------------------------------

def kernel_weight(tau, tau_e: float, tau_21: float):
    """Temporal blurring kernel of the recoil factor, unit integral."""
    tau = np.asarray(tau, dtype=float)
    a = tau_e + 0.5j * tau_21
    out = (1.0 / math.pi) * a / (a * a + (tau - 0.5 * tau_21) ** 2)
    return out if out.ndim else complex(out)


def _kernel_transform(omega: float, tau_e: float, tau_21: float) -> complex:
    """Closed-form Fourier transform of kernel_weight."""
    if omega >= 0:
        return complex(math.exp(-omega * tau_e))
    a = abs(omega)
    return complex(math.exp(-a * tau_e) * np.exp(-1j * a * tau_21))


def xplus_dc_kernel(elastic: ElasticAmplitude, probe: LevitonProbe,
                    tau_2: float, fc: FranckCondonFactor) -> complex:
    """Convolution form: X = baseline * (K * F)(t_e + tau_2).

    Valid in the adiabatic radiation regime; agrees with the adiabatic
    filter route identically for harmonic factors.
    """
    base = vacuum_baseline(elastic, probe.tau_e, tau_2)
    tau_21 = tau_2 - elastic.tau1
    s = probe.t_e + tau_2
    if isinstance(fc, UnitConstantF):
        return base
    if isinstance(fc, HarmonicsF):
        ns = np.arange(-fc.n_max, fc.n_max + 1)
        acc = 0.0 + 0.0j
        for n, coeff in zip(ns, fc.coeffs):
            acc += coeff * _kernel_transform(2 * n * fc.omega0, probe.tau_e, tau_21) \
                * complex(np.exp(-2j * n * fc.omega0 * s))
        return base * acc
    if isinstance(fc, TransientF):
        scale = max(probe.tau_e, abs(tau_21), 1e-3 * elastic.time_scale())

        def integrand(tau):
            return kernel_weight(tau, probe.tau_e, tau_21) * fc(s - tau)

        conv = quad_real_line(integrand, center=0.5 * tau_21, scale=scale,
                              rel_tol=1e-10)
        return base * conv
    raise DomainError(f"unsupported recoil factor {type(fc).__name__}")


# ---------------------------------------------------------------------------
# Time-domain diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeDomainResult:
    table: ComplexTable
    dc: complex
    eta_error_estimate: float


def xplus_time_domain(z_time: ComplexTable, fc: FranckCondonFactor,
                      wavepacket: Callable, v_fermi: float, tau_2: float,
                      t_grid, eta: float = 0.0,
                      tau_e_hint: float | None = None) -> TimeDomainResult:
    """Time-resolved signal X(t) = v_F F(t) phi*(t - tau_2) (Z1 * phi)(t).

    ``z_time`` is the regularized time kernel of the elastic amplitude; its
    regularizer eta biases the dc integral by roughly eta / (2 tau_e),
    reported (and warned about above 1 %).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    zg, zv = z_time.grid, z_time.values
    # trapezoidal convolution: both tables are required to resolve their
    # integrands, so the composite rule is already at grid accuracy
    trap_w = np.empty(zg.size)
    trap_w[0] = 0.5 * (zg[1] - zg[0])
    trap_w[-1] = 0.5 * (zg[-1] - zg[-2])
    trap_w[1:-1] = 0.5 * (zg[2:] - zg[:-2])
    kernel = trap_w * zv
    conv = np.empty(t_grid.size, dtype=complex)
    for k, t in enumerate(t_grid):
        conv[k] = np.dot(kernel, np.asarray(wavepacket(t - zg)))
    vals = v_fermi * np.asarray(fc(t_grid)) * np.conj(wavepacket(t_grid - tau_2)) * conv
    table = ComplexTable(t_grid, vals)
    dc = integrate_table(t_grid, vals)
    if tau_e_hint and eta:
        estimate = eta / (2 * tau_e_hint + eta)
    else:
        estimate = float("nan")
    if estimate == estimate and estimate > 0.01:
        warnings.warn(
            f"eta regularization error estimate {estimate:.2%} exceeds 1%",
            stacklevel=2,
        )
    return TimeDomainResult(table=table, dc=complex(dc),
                            eta_error_estimate=estimate)


# ---------------------------------------------------------------------------
# Frequency-domain forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EffectiveScattering:
    """R~(w+, w-) split into a symbolic comb and a continuous part.

    ``comb`` maps the harmonic index n (transfer w- -> w- + 2 n w0) to its
    weight; the delta factors 2 pi delta(w+ - w- - 2 n w0) stay symbolic.
    """

    continuous: complex
    comb: dict | None
    omega0: float | None

    def comb_weight(self, n: int) -> complex:
        if not self.comb:
            return 0.0 + 0.0j
        return self.comb.get(n, 0.0 + 0.0j)


def effective_scattering_frequency(elastic: ElasticAmplitude,
                                   fc: FranckCondonFactor,
                                   omega_plus: float,
                                   omega_minus: float) -> EffectiveScattering:
    """Energy-transfer amplitude R~(w+, w-) = F~(w+ - w-) Z1(w-)."""
    if omega_minus < 0:
        raise DomainError("omega_minus must be non-negative")
    zb = complex(elastic(omega_minus))
    if isinstance(fc, UnitConstantF):
        return EffectiveScattering(continuous=0.0 + 0.0j, comb={0: zb}, omega0=0.0)
    if isinstance(fc, HarmonicsF):
        comb = {int(n): complex(c) * zb
                for n, c in zip(range(-fc.n_max, fc.n_max + 1), fc.coeffs)}
        return EffectiveScattering(continuous=0.0 + 0.0j, comb=comb,
                                   omega0=fc.omega0)
    if isinstance(fc, TransientF):
        excess = fc.excess_table()
        df = complex(filon_fourier(excess.grid, excess.values,
                                   np.array([omega_plus - omega_minus]))[0])
        return EffectiveScattering(continuous=df * zb, comb={0: zb}, omega0=0.0)
    raise DomainError(f"unsupported recoil factor {type(fc).__name__}")


def xplus_energy_resolved(elastic: ElasticAmplitude, fc: FranckCondonFactor,
                          omega_e: float, gamma_e: float, tau_2: float,
                          omega: float) -> EffectiveScattering:
    """Narrow Gaussian-probe limit of the frequency-resolved signal.

    X~(omega) ~ (gamma_e / sqrt(pi)) e^{-i omega_e tau_2}
    R~(omega + omega_e, omega_e); the same comb/continuous split as
    ``effective_scattering_frequency``, scaled by the probe prefactor.
    """
    if gamma_e > 0.1 * abs(omega_e):
        warnings.warn(
            "energy-resolved limit needs gamma_e << |omega_e|", stacklevel=2
        )
    r = effective_scattering_frequency(elastic, fc, omega + omega_e, omega_e)
    scale = (gamma_e / math.sqrt(math.pi)) * complex(np.exp(-1j * omega_e * tau_2))
    comb = None
    if r.comb is not None:
        comb = {n: scale * w for n, w in r.comb.items()}
    return EffectiveScattering(continuous=scale * r.continuous, comb=comb,
                               omega0=r.omega0)


# ---------------------------------------------------------------------------
# Measured current
# ---------------------------------------------------------------------------

def dc_current(x_dc: complex, f_m: float, phi_ab: float,
               t_a: float = 0.5, t_b: float = 0.5) -> float:
    """Average dc current (A) of repeated single-electron experiments.

    <i> = -e f_m [ R_A R_B + T_A T_B
                   + 2 sqrt(R_A T_A R_B T_B) Re(e^{i phi_AB} X+dc) ].
    """
    for t in (t_a, t_b):
        if not 0.0 <= t <= 1.0:
            raise DomainError("splitter transmissions must lie in [0, 1]")
    r_a, r_b = 1.0 - t_a, 1.0 - t_b
    interference = 2 * math.sqrt(r_a * t_a * r_b * t_b) \
        * float(np.real(np.exp(1j * phi_ab) * x_dc))
    return -_E * f_m * (r_a * r_b + t_a * t_b + interference)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    value: float
    t_e: float
    result: RadarResult


@dataclass(frozen=True)
class SweepResult:
    variable: str
    points: tuple
    summaries: dict


_SWEEP_VARIABLES = ("t_e", "tau_e", "tau_2", "z", "omega0")


@dataclass
class _SweepTask:
    """One sweep point; picklable so pools can fan the work out.

    A per-task memo keeps the radar (and with it the cached filters) alive
    across points that share the probe configuration, which is what makes
    injection-time sweeps cheap after the first point.
    """

    variable: str
    elastic: ElasticAmplitude
    tau_e: float
    tau_2: float | str
    fc_builder: Callable
    t_e: float | str
    method: str
    sweep_time_span: float | None

    def __post_init__(self):
        self._radar_memo: dict = {}
        self._fc_memo = None
        self._tau2_memo = None

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_radar_memo"] = {}
        state["_fc_memo"] = None
        state["_tau2_memo"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def _radar(self, tau_e: float, tau_2: float) -> "LevitonRadar":
        key = (tau_e, tau_2)
        radar = self._radar_memo.get(key)
        if radar is None:
            radar = LevitonRadar(self.elastic, tau_e, tau_2,
                                 sweep_time_span=self.sweep_time_span)
            self._radar_memo.clear()  # only the live configuration is kept
            self._radar_memo[key] = radar
        return radar

    def run(self, value: float) -> SweepPoint:
        tau_e = value if self.variable == "tau_e" else self.tau_e
        if self.variable == "t_e":
            if self._fc_memo is None:
                self._fc_memo = self.fc_builder(value)
            fc = self._fc_memo
        else:
            fc = self.fc_builder(value)
        if self.variable == "tau_2":
            tau_2 = value
        elif self.tau_2 == "maximize":
            if self._tau2_memo is None or self.variable == "tau_e":
                self._tau2_memo, _ = optimize_tau2(self.elastic, tau_e)
            tau_2 = self._tau2_memo
        else:
            tau_2 = float(self.tau_2)
        radar = self._radar(tau_e, tau_2)
        if self.variable == "t_e":
            t_e = value
        elif self.t_e == "maximize":
            t_e, _ = radar.maximize_over_te(fc, method=self.method)
        else:
            t_e = float(self.t_e)
        return SweepPoint(value=value, t_e=t_e,
                          result=radar.result(fc, t_e, self.method))


_WORKER_TASK: "_SweepTask | None" = None


def _init_worker(task):
    global _WORKER_TASK
    _WORKER_TASK = task


def _run_value(value):
    return _WORKER_TASK.run(value)


def contrast_sweep(variable: str, values, elastic: ElasticAmplitude,
                   tau_e: float, tau_2, fc_builder: Callable,
                   t_e=0.0, method: str = "exact", jobs: int = 1,
                   sweep_time_span: float | None = None) -> SweepResult:
    """Deterministic sweep of the radar signal over one scan variable.

    ``fc_builder(value)`` supplies the recoil factor per point (constant
    builders just ignore the value).  ``tau_2`` and ``t_e`` accept numbers
    or "maximize".  Points are independent; with jobs > 1 they are fanned
    out to a process pool (one task per worker so caches persist) and
    re-assembled in scan order.
    """
    if variable not in _SWEEP_VARIABLES:
        raise DomainError(f"scan variable must be one of {_SWEEP_VARIABLES}")
    values = [float(v) for v in values]
    task = _SweepTask(variable=variable, elastic=elastic, tau_e=tau_e,
                      tau_2=tau_2, fc_builder=fc_builder, t_e=t_e,
                      method=method, sweep_time_span=sweep_time_span)
    if jobs > 1:
        chunk = max(1, math.ceil(len(values) / jobs))
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(task,)) as pool:
            points = list(pool.map(_run_value, values, chunksize=chunk))
    else:
        points = [task.run(v) for v in values]

    rel = np.array([abs(p.result.relative) for p in points])
    base = np.array([abs(p.result.baseline) for p in points])
    summaries = {
        "max_relative": {"value": float(np.max(rel)),
                         "at": values[int(np.argmax(rel))]},
        "min_relative": {"value": float(np.min(rel)),
                         "at": values[int(np.argmin(rel))]},
        "max_baseline": {"value": float(np.max(base)),
                         "at": values[int(np.argmax(base))]},
    }
    return SweepResult(variable=variable, points=tuple(points),
                       summaries=summaries)
