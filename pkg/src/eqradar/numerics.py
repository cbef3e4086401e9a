"""Shared numerical kernel.

Everything downstream reduces to a handful of primitives implemented here:
exponentially damped semi-infinite quadrature, Fourier coefficients of
periodic signals, Filon-type Fourier transforms of tabulated transients,
real-line quadrature, and the two special functions the model formulas use
(Laguerre polynomials and modified Bessel functions).

Integrands passed to the quadrature routines must accept numpy arrays.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .errors import (
    DomainError,
    EvaluationError,
    QuadratureError,
    TableRangeError,
)

__all__ = [
    "ComplexTable",
    "laguerre",
    "bessel_i",
    "quad_damped",
    "quad_panels",
    "quad_real_line",
    "fourier_coeffs_periodic",
    "fourier_transform_transient",
    "filon_fourier",
    "integrate_table",
    "gauss_panel_nodes",
]


# ---------------------------------------------------------------------------
# Tabulated complex functions
# ---------------------------------------------------------------------------

class ComplexTable:
    """Complex samples on a strictly increasing real grid.

    Evaluation uses a cubic spline through the real and imaginary parts.
    Queries outside the grid raise ``TableRangeError``: extrapolating a
    scattering amplitude or a recoil factor silently corrupts everything
    downstream, so the policy is deliberate.
    """

    __slots__ = ("grid", "values", "_spline")

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=complex)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("table grid must be a 1-d array with >= 2 points")
        if values.shape != grid.shape:
            raise DomainError("table grid and values must have the same shape")
        if not np.all(np.diff(grid) > 0):
            raise DomainError("table grid must be strictly increasing")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise DomainError("table entries must be finite")
        grid.flags.writeable = False
        values.flags.writeable = False
        self.grid = grid
        self.values = values
        self._spline = None

    @property
    def omega_min(self) -> float:
        return float(self.grid[0])

    @property
    def omega_max(self) -> float:
        return float(self.grid[-1])

    def _ensure_spline(self):
        if self._spline is None:
            self._spline = CubicSpline(self.grid, self.values, extrapolate=False)
        return self._spline

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        slack = 1e-12 * (self.omega_max - self.omega_min)
        lo, hi = self.omega_min - slack, self.omega_max + slack
        if np.any(x < lo) or np.any(x > hi):
            raise TableRangeError(
                f"query outside table range [{self.omega_min!r}, {self.omega_max!r}]"
            )
        out = self._ensure_spline()(np.clip(x, self.omega_min, self.omega_max))
        return out if out.ndim else complex(out)

    def __len__(self):
        return self.grid.size


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the three-term recurrence.

    (k+1) L_{k+1}(x) = (2k+1-x) L_k(x) - k L_{k-1}(x), L_0 = 1, L_1 = 1-x.
    """
    if n != int(n) or n < 0:
        raise DomainError("order must be a non-negative integer")
    n = int(n)
    if n > 10_000:
        raise DomainError("order capped at 10^4")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("argument must be finite")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
        if not math.isfinite(cur):
            raise EvaluationError(f"Laguerre recurrence overflowed at order {k + 1}")
    return cur


def bessel_i(n: int, x: float) -> float:
    """Modified Bessel function of the first kind I_n(x) for x >= 0."""
    if n != int(n) or n < 0:
        raise DomainError("order must be a non-negative integer")
    x = float(x)
    if x < 0:
        raise DomainError("argument must be non-negative")
    if x > 700.0:
        raise DomainError("argument above pre-exponential range (x <= 700)")
    return float(special.iv(int(n), x))


# ---------------------------------------------------------------------------
# Gauss-Kronrod panel quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1]
# (standard QUADPACK abscissae; Gauss nodes sit at the odd indices).
_GK_X = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_GK_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(order: int):
    try:
        return _LEGGAUSS_CACHE[order]
    except KeyError:
        nw = np.polynomial.legendre.leggauss(order)
        _LEGGAUSS_CACHE[order] = nw
        return nw


def gauss_panel_nodes(edges, order: int = 8):
    """Gauss-Legendre nodes and weights on a sequence of panels.

    ``edges`` is an increasing 1-d array of panel boundaries.  Returns flat
    (nodes, weights) covering every panel.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = _leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _gk15_panel(f: Callable, a: float, b: float):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _GK_X), dtype=complex)
    kron = half * np.sum(_GK_WK * vals)
    gauss = half * np.sum(_GK_WG * vals[1::2])
    return kron, abs(kron - gauss)


def quad_panels(f: Callable, edges, rel_tol: float = 1e-8,
                abs_tol: float = 0.0, max_panels: int = 4000) -> complex:
    """Adaptive GK15 quadrature over an initial panelization.

    Bisects the worst panel until the summed error estimate meets
    ``max(abs_tol, rel_tol * |integral|)``.  Raises ``QuadratureError`` with
    the achieved estimate if the panel budget runs out.
    """
    import heapq

    edges = np.asarray(edges, dtype=float)
    panels = []  # entries: (-err, a, b, value)
    total = 0.0 + 0.0j
    scale = 0.0
    counter = 0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _gk15_panel(f, a, b)
        total += val
        scale += abs(val)
        heapq.heappush(panels, (-err, counter, a, b, val))
        counter += 1
    max_panels = max(max_panels, 2 * (edges.size - 1))
    while True:
        tot_err = sum(-e for e, *_ in panels)
        tol = max(abs_tol, rel_tol * max(abs(total), 1e-16 * scale))
        if tot_err <= tol:
            return total
        if len(panels) >= max_panels:
            raise QuadratureError(
                f"no convergence with {max_panels} panels "
                f"(error estimate {tot_err:.3e}, tolerance {tol:.3e})",
                value=total, estimate=tot_err,
            )
        _, _, a, b, val = heapq.heappop(panels)
        mid = 0.5 * (a + b)
        v1, e1 = _gk15_panel(f, a, mid)
        v2, e2 = _gk15_panel(f, mid, b)
        total += v1 + v2 - val
        scale += abs(v1) + abs(v2)
        heapq.heappush(panels, (-e1, counter, a, mid, v1))
        counter += 1
        heapq.heappush(panels, (-e2, counter, mid, b, v2))
        counter += 1


def quad_damped(f: Callable, damping_rate: float,
                oscillation_period_hint: float | None = None,
                rel_tol: float = 1e-8, max_panels: int = 4000) -> complex:
    """Integral of f over [0, inf) for integrands damped like exp(-r*w).

    The upper limit is truncated at 40 / damping_rate, where the damping
    weight is below 1e-17.  The initial panels are never wider than the
    oscillation hint, which guarantees >= 8 quadrature nodes per period
    before adaptive refinement starts.
    """
    if not damping_rate > 0:
        raise DomainError("damping_rate must be positive")
    upper = 40.0 / damping_rate
    width = upper / 8
    if oscillation_period_hint is not None and oscillation_period_hint > 0:
        width = min(width, oscillation_period_hint)
    # cap the initial panel count; adaptive refinement supplies the rest
    n = int(np.clip(math.ceil(upper / width), 8, 2048))
    edges = np.linspace(0.0, upper, n + 1)
    return quad_panels(f, edges, rel_tol=rel_tol, max_panels=max_panels)


def quad_real_line(f: Callable, center: float = 0.0, scale: float = 1.0,
                   rel_tol: float = 1e-9, max_panels: int = 4000) -> complex:
    """Integral of f over the whole real line via t = center + scale*tan(u).

    Handles slowly decaying tails (1/t^2 and faster) exactly on the compact
    u-interval.  ``scale`` should match the width of the integrand's core.
    """
    if not scale > 0:
        raise DomainError("scale must be positive")
    eps = 1e-12

    def g(u):
        t = center + scale * np.tan(u)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(f(t), dtype=complex) * scale / np.cos(u) ** 2
        return np.where(np.isfinite(vals), vals, 0.0)

    edges = np.linspace(-0.5 * np.pi + eps, 0.5 * np.pi - eps, 33)
    return quad_panels(g, edges, rel_tol=rel_tol, max_panels=max_panels)


# ---------------------------------------------------------------------------
# Fourier analysis
# ---------------------------------------------------------------------------

def fourier_coeffs_periodic(f: Callable, period: float,
                            coeff_tol: float = 1e-14,
                            max_samples: int = 1 << 20) -> np.ndarray:
    """Fourier coefficients of a function with the given period.

    With w0 = pi / period, returns F_n for n in [-N, N] (as an array ordered
    n = -N..N) such that f(t) = sum_n F_n exp(-2i n w0 t), i.e.

        F_n = (1/T) * integral_0^T f(t) exp(+2i n w0 t) dt.

    N adapts until the last retained coefficient magnitude drops below
    ``coeff_tol``; uniform sampling makes the quadrature spectrally accurate.
    """
    if not period > 0:
        raise DomainError("period must be positive")
    m = 256
    prev = None
    while m <= max_samples:
        t = np.arange(m) * (period / m)
        samples = np.asarray(f(t), dtype=complex)
        if samples.shape != t.shape:
            raise DomainError("periodic function must evaluate numpy arrays")
        coeffs = np.fft.ifft(samples)  # coeffs[n] = (1/M) sum f_j e^{2pi i n j / M}
        mags = np.abs(coeffs)
        # largest usable index before aliasing becomes a concern
        n_cap = m // 4
        n_max = 0
        for n in range(1, n_cap + 1):
            if mags[n] >= coeff_tol or mags[m - n] >= coeff_tol:
                n_max = n
        tail_clean = n_max < n_cap
        if tail_clean and prev is not None:
            # compare against the coarser pass for stability
            stable = True
            for n in range(-n_max, n_max + 1):
                if abs(coeffs[n % m] - prev[n % prev.size]) > 1e-13:
                    stable = False
                    break
            if stable:
                out = np.empty(2 * n_max + 1, dtype=complex)
                for idx, n in enumerate(range(-n_max, n_max + 1)):
                    out[idx] = coeffs[n % m]
                return out
        prev = coeffs
        m *= 2
    raise QuadratureError("periodic Fourier coefficients did not stabilize")


def _filon_moments_block(omega_col: np.ndarray, h_row: np.ndarray):
    """Moments M_p = integral_0^h u^p exp(i omega u) du for p = 0..3.

    Vectorized over a (n_omega, 1) column of frequencies and a (1, n_h) row
    of interval widths: upward recurrence away from |omega*h| ~ 0, power
    series near it (the recurrence cancels catastrophically there).
    """
    z = 1j * omega_col * h_row
    # the upward recurrence loses ~|z|^-4 digits to cancellation; below
    # |z| = 0.15 that would exceed ~1e-12 relative, so switch to the series
    small = np.abs(z) < 0.15
    with np.errstate(divide="ignore", invalid="ignore"):
        iw = 1j * omega_col
        e = np.exp(z)
        m = [(e - 1.0) / iw]
        for p in range(1, 4):
            m.append((h_row ** p * e - p * m[p - 1]) / iw)
    if np.any(small):
        # series branch M_p = h^{p+1} sum_m z^m / (m! (p+m+1)), evaluated
        # only where the recurrence would cancel
        zs = z[small]
        hs = np.broadcast_to(h_row, z.shape)[small]
        term = np.ones_like(zs)
        acc = [np.full(zs.shape, 1.0 / (p + 1), dtype=complex) for p in range(4)]
        for mm in range(1, 15):
            term = term * zs / mm
            for p in range(4):
                acc[p] += term / (p + mm + 1)
        for p in range(4):
            m[p][small] = acc[p] * hs ** (p + 1)
    return m


def filon_fourier(grid, values, omegas) -> np.ndarray:
    """integral f(t) exp(i omega t) dt over the table support, per omega.

    The table is replaced by its cubic spline and the oscillatory factor is
    integrated exactly against each local cubic, so accuracy is set by how
    well the grid resolves f itself, not by the query frequency.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    spline = CubicSpline(grid, values)
    c = spline.c  # (4, n-1), highest degree first, in (t - t_i)
    h = np.diff(grid)[None, :]
    t0 = grid[:-1][None, :]
    out = np.empty(omegas.size, dtype=complex)
    chunk = max(1, (1 << 21) // max(1, h.size))
    for s in range(0, omegas.size, chunk):
        w = omegas[s:s + chunk][:, None]
        m0, m1, m2, m3 = _filon_moments_block(w, h)
        panel = c[0][None, :] * m3 + c[1][None, :] * m2 \
            + c[2][None, :] * m1 + c[3][None, :] * m0
        out[s:s + chunk] = np.sum(np.exp(1j * w * t0) * panel, axis=1)
    return out


def integrate_table(grid, values) -> complex:
    """Integral of tabulated values over the grid via the cubic spline."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    spline = CubicSpline(grid, values)
    return complex(spline.integrate(grid[0], grid[-1]))


def fourier_transform_transient(f: ComplexTable, omega_grid,
                                require_decay: bool = True) -> ComplexTable:
    """Fourier transform integral f(t) exp(i Omega t) dt of a transient table.

    The table must decay at both ends (|f| < 1e-6 of its peak) so that the
    missing tails are negligible.  Pass ``require_decay=False`` only when a
    grid end coincides with the exact support edge of the function (a
    Heaviside-type turn-on), where no tail exists to truncate.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    peak = float(np.max(np.abs(f.values)))
    if require_decay and peak > 0.0:
        edge = max(abs(f.values[0]), abs(f.values[-1]))
        if edge >= 1e-6 * peak:
            raise DomainError(
                "transient table does not decay at its grid ends "
                f"(edge/peak = {edge / peak:.2e})"
            )
    vals = filon_fourier(f.grid, f.values, omega_grid)
    return ComplexTable(omega_grid, vals)
