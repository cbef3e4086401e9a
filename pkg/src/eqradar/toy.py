"""Closed-form warm-up models of interferometric sensing.

Order-of-magnitude collision phase between co-flying electrons, the
single-particle interferometer driven by a classical voltage, and the
generalized bomb-testing detector with partial back-action.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import constants

from .errors import DomainError
from .numerics import quad_real_line

__all__ = [
    "ALPHA_QED",
    "CollisionGeometry",
    "collision_phase",
    "classical_mzi_pq",
    "short_pulse_phase",
    "elitzur_vaidman",
]

ALPHA_QED = 1.0 / 137.035999


@dataclass(frozen=True)
class CollisionGeometry:
    """Two counter-propagating channels interacting over length l at gap d."""

    length: float
    separation: float
    eps_r: float
    v_fermi: float

    def __post_init__(self):
        for name in ("length", "separation", "eps_r", "v_fermi"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")


def collision_phase(geometry: CollisionGeometry) -> dict:
    """Coulomb phase picked up during a fly-by collision.

    alpha_eff = (alpha_qed / eps_r)(c / v_F) and
    delta_phi = alpha_eff * arcsinh(l / d).
    """
    alpha_eff = (ALPHA_QED / geometry.eps_r) * (constants.c / geometry.v_fermi)
    delta_phi = alpha_eff * math.asinh(geometry.length / geometry.separation)
    return {"alpha_eff": alpha_eff, "delta_phi": delta_phi}


def classical_mzi_pq(wavepacket: Callable, v_fermi: float, drive: Callable,
                     tau_1: float, tau_2: float, t_a: float = 0.5,
                     t_b: float = 0.5, phi_ab: float = 0.0,
                     rel_tol: float = 1e-9) -> dict:
    """Single-particle interferometer with a classical drive on branch 1.

    The electron accumulates the electric phase of the drive over its
    transit window [t - tau_1, t]; the interference term is

        P_q = 2 sqrt(R_A T_A R_B T_B)
              Re(e^{i phi_AB} v_F integral phi(t - tau_1)
                 e^{i theta(t)} phi*(t - tau_2) dt).

    Returns p(1out) = R_A R_B + T_A T_B + P_q together with P_q and the
    complex overlap itself.
    """
    for t in (t_a, t_b):
        if not 0.0 <= t <= 1.0:
            raise DomainError("splitter transmissions must lie in [0, 1]")
    e_over_hbar = constants.e / constants.hbar

    # theta(t) = (e/hbar) integral_{t-tau_1}^{t} U, via a fixed-order
    # Gauss rule per evaluation (the drive is smooth on the transit scale)
    gl_x, gl_w = np.polynomial.legendre.leggauss(24)

    def theta(t):
        t = np.asarray(t, dtype=float)
        half = 0.5 * tau_1
        mid = t - half
        nodes = mid[..., None] + half * gl_x
        return e_over_hbar * half * np.sum(
            gl_w * np.asarray(drive(nodes)), axis=-1
        )

    def integrand(t):
        return (np.asarray(wavepacket(t - tau_1)) * np.exp(1j * theta(t))
                * np.conj(np.asarray(wavepacket(t - tau_2))))

    scale = max(abs(tau_1 - tau_2), tau_1, 1e-15)
    overlap = v_fermi * quad_real_line(integrand, center=tau_2, scale=scale,
                                       rel_tol=rel_tol)
    r_a, r_b = 1.0 - t_a, 1.0 - t_b
    p_q = 2 * math.sqrt(r_a * t_a * r_b * t_b) \
        * float(np.real(np.exp(1j * phi_ab) * overlap))
    return {
        "p_1out": r_a * r_b + t_a * t_b + p_q,
        "p_q": p_q,
        "overlap": complex(overlap),
    }


def short_pulse_phase(drive: Callable, t_e: float, tau_1: float) -> float:
    """Electric phase of an idealized point-like probe emitted at t_e.

    Diagnostic for the short-pulse limit; the full interference integral is
    the quantitative statement.
    """
    gl_x, gl_w = np.polynomial.legendre.leggauss(48)
    half = 0.5 * tau_1
    nodes = t_e + half + half * gl_x
    return float(constants.e / constants.hbar * half
                 * np.sum(gl_w * np.asarray(drive(nodes))))


def elitzur_vaidman(a1: complex, bomb_overlap: complex = 1.0,
                    photon_overlap: complex = 1.0,
                    phi_ab: float = 0.0) -> dict:
    """Generalized bomb-testing probabilities with a fizzle amplitude a1.

    p(no particle) = (1 - |a1|^2)/2 and the two outputs split
    (1 + |a1|^2)/4 -/+ P_q with
    P_q = Re(a1 e^{i phi_AB} <Idle|Fizzled> <Psi|Psi'>)/2.
    """
    mag = abs(a1)
    if mag > 1.0 + 1e-12:
        raise DomainError("|a1| must not exceed 1")
    p_q = 0.5 * float(np.real(a1 * np.exp(1j * phi_ab)
                              * bomb_overlap * photon_overlap))
    p_none = 0.5 * (1.0 - mag ** 2)
    base = 0.25 * (1.0 + mag ** 2)
    return {
        "p_none": p_none,
        "p_1out": base - p_q,
        "p_2out": base + p_q,
    }
