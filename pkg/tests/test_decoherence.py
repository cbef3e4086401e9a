import numpy as np
import pytest

from eqradar.coupler import (
    CouplerParams,
    CounterPropagatingCoupler,
    TabulatedCoupler,
    TopGateCoupler,
)
from eqradar.decoherence import (
    ballistic_amplitude,
    elastic_amplitude_time,
    inelastic_probability,
    picard_elastic_amplitude,
    solve_elastic_amplitude,
    wigner_smith_delay,
    _solve_on_grid,
)
from eqradar.errors import TableRangeError

L = 1e-5
VF = 1e5
T0 = L / VF
W_UNIT = VF / L  # one dimensionless frequency unit in rad/s


def cp(alpha):
    return CounterPropagatingCoupler(CouplerParams(L, VF, alpha))


def make_unit_sbb_model(phase_fn, omega_max, n=20001):
    """Tabulated model with |S_bb| = 1 and S_ba = 0."""
    omega = np.linspace(0.0, omega_max, n)
    s_bb = np.exp(1j * phase_fn(omega))
    return TabulatedCoupler(omega, s_bb, np.zeros_like(omega, dtype=complex))


# ---------------------------------------------------------------------------
# solve_elastic_amplitude
# ---------------------------------------------------------------------------

def test_free_propagation_is_identity():
    model = make_unit_sbb_model(lambda w: np.zeros_like(w), 20 * W_UNIT)
    amp = solve_elastic_amplitude(model, 10 * W_UNIT)
    q = np.linspace(0, 10 * W_UNIT, 50)
    assert np.max(np.abs(amp(q) - 1.0)) < 1e-12
    assert inelastic_probability(amp, 5 * W_UNIT) == 0.0


def test_first_born_weak_coupling_oracle():
    # |S_bb - 1| ~ 1e-3: first-order result Z1 = 1 + int (S_bb-1)/w dw
    eps = 1e-3
    model = make_unit_sbb_model(lambda w: eps * np.sin(w / W_UNIT), 25 * W_UNIT)
    amp = solve_elastic_amplitude(model, 20 * W_UNIT)

    from scipy.special import sici
    q = np.linspace(0.5, 19.5, 40) * W_UNIT
    # (e^{i eps sin x} - 1)/w ~ i eps sin(x)/w  with x = w/W_UNIT
    si = sici(q / W_UNIT)[0]
    first_born = 1.0 + 1j * eps * si
    # the residual is the genuine second-order term, O(eps^2)
    assert np.max(np.abs(amp(q) - first_born)) < 10 * eps ** 2


def test_health_bound_holds_on_solved_grid():
    for alpha in (0.2, 1.0, 15.0):
        amp = solve_elastic_amplitude(cp(alpha), 30 * W_UNIT)
        assert float(np.max(np.abs(amp.table.values))) <= 1.0 + 1e-9
        assert abs(complex(amp(0.0)) - 1.0) < 1e-12


def test_stronger_decoherence_at_small_alpha():
    # inelastic probability grows faster with omega in the weakly coupled
    # regime than deep in the Coulomb-dominated one
    amp_small = solve_elastic_amplitude(cp(0.2), 8 * W_UNIT)
    amp_large = solve_elastic_amplitude(cp(15.0), 8 * W_UNIT)
    for x in (2.0, 4.0, 6.0):
        s_small = inelastic_probability(amp_small, x * W_UNIT)
        s_large = inelastic_probability(amp_large, x * W_UNIT)
        assert s_small > s_large


def test_sigma_in_interior_value():
    amp = solve_elastic_amplitude(cp(1.0), 8 * W_UNIT)
    val = inelastic_probability(amp, 5 * W_UNIT)
    assert 0.0 < val < 1.0
    with pytest.raises(TableRangeError):
        inelastic_probability(amp, 9 * W_UNIT)


def test_picard_route_matches_stepping():
    for alpha in (0.2, 1.0):
        model = cp(alpha)
        step = (2 * np.pi / 256.0) / model.transit_time()
        direct = solve_elastic_amplitude(model, 20 * W_UNIT, step=step,
                                         max_refinements=0, sup_tol=np.inf)
        picard = picard_elastic_amplitude(model, 20 * W_UNIT, step=step)
        diff = np.max(np.abs(direct.table.values - picard.table.values))
        assert diff < 1e-8


def test_step_halving_convergence_order():
    model = cp(1.0)
    h = (2 * np.pi / 64.0) / model.transit_time()
    n0 = int(np.ceil(10 * W_UNIT / h))
    sols = []
    for n in (n0, 2 * n0, 4 * n0):
        grid, z = _solve_on_grid(model, 10 * W_UNIT, n)
        sols.append((grid, z))
    d1 = np.max(np.abs(sols[1][1][::2] - sols[0][1]))
    d2 = np.max(np.abs(sols[2][1][::2] - sols[1][1]))
    order = np.log2(d1 / d2)
    assert order >= 1.8


# ---------------------------------------------------------------------------
# wigner_smith_delay
# ---------------------------------------------------------------------------

def test_delay_of_pure_phase_table():
    tau = 3.3e-11
    amp = ballistic_amplitude(tau, 20 * W_UNIT)
    assert wigner_smith_delay(amp) == pytest.approx(tau, rel=1e-8)


def test_delay_of_identity_is_zero():
    amp = ballistic_amplitude(0.0, 20 * W_UNIT)
    assert wigner_smith_delay(amp) == pytest.approx(0.0, abs=1e-16)


def test_delay_counter_propagating_scale():
    # initial condition gives Z1'(0) = S_bb'(0), so tau1 = t0/(2+alpha)
    alpha = 0.2
    amp = solve_elastic_amplitude(cp(alpha), 10 * W_UNIT)
    expected = T0 / (2 + alpha)
    assert amp.tau1 == pytest.approx(expected, rel=1e-4)
    assert amp.tau1 > 0


# ---------------------------------------------------------------------------
# elastic_amplitude_time
# ---------------------------------------------------------------------------

def test_time_kernel_zero():
    grid = np.linspace(0, 10 * W_UNIT, 257)
    from eqradar.decoherence import ElasticAmplitude
    from eqradar.numerics import ComplexTable
    amp = ElasticAmplitude(ComplexTable(grid, np.zeros_like(grid, complex)), 0.0)
    tau = np.linspace(-T0, T0, 21)
    out = elastic_amplitude_time(amp, tau, eta=1e-3 * T0)
    assert np.max(np.abs(out.values)) == 0.0


def test_time_kernel_identity_closed_form():
    # Z1 = 1 with regularizer eta: kernel 1/(2 pi (eta + i tau));
    # the table must extend to eta * omega_max >> 1 for the closed form
    eta = 1e-3 * T0
    omega_max = 45.0 / eta
    amp = ballistic_amplitude(0.0, omega_max, n_points=120001)
    tau = np.linspace(-3 * T0, 3 * T0, 31)
    out = elastic_amplitude_time(amp, tau, eta=eta)
    expected = 1.0 / (2 * np.pi * (eta + 1j * tau))
    assert np.allclose(out.values, expected, rtol=1e-6)


def test_time_kernel_shift_theorem():
    eta = 1e-3 * T0
    omega_max = 45.0 / eta
    tau0 = 0.7 * T0
    amp = ballistic_amplitude(tau0, omega_max, n_points=240001)
    tau = np.linspace(tau0 - T0, tau0 + T0, 41)
    out = elastic_amplitude_time(amp, tau, eta=eta)
    expected = 1.0 / (2 * np.pi * (eta + 1j * (tau - tau0)))
    assert np.allclose(out.values, expected, rtol=1e-5)


# ---------------------------------------------------------------------------
# pure-delay characterization
# ---------------------------------------------------------------------------

def test_pure_delay_sbb_characterization():
    """For S_bb = e^{i omega tau} the integral equation is implemented as
    written; its solution agrees with e^{i omega tau} through second order
    at small omega*tau but departs from it at larger phases.
    """
    tau = 0.5 * T0
    model = make_unit_sbb_model(lambda w: tau * w, 40 * W_UNIT)
    amp = solve_elastic_amplitude(model, 30 * W_UNIT)

    # small-phase agreement: relative deviation is cubic or smaller
    w_small = 0.1 / tau
    assert abs(complex(amp(w_small)) - np.exp(1j * w_small * tau)) < 5e-4

    # the delay at the origin is exactly tau
    assert amp.tau1 == pytest.approx(tau, rel=1e-6)

    # characterization: at omega*tau = 10 the solution is NOT the pure phase
    w_big = 10.0 / tau
    dev = abs(complex(amp(w_big)) - np.exp(1j * w_big * tau))
    assert dev > 0.01
    # and it stays physical
    assert abs(complex(amp(w_big))) <= 1.0 + 1e-9
