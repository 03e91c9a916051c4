import math

import numpy as np
import pytest

from qcvz.mixer import DriveEnvelope
from qcvz.qubit import (
    FitError,
    FitModel,
    QubitParams,
    StepSizeError,
    evolve,
    excited_state,
    fit_curve,
    free_evolve,
    ground_state,
    rabi_analytic,
    validate_density_matrix,
)

TWO_PI = 2.0 * math.pi
F_Q = 4.53202e9


def flat_drive(f_rabi_hz, tau_s, carrier_hz=F_Q, rate_hz=1e9):
    n = max(int(round(tau_s * rate_hz)), 1)
    return DriveEnvelope(carrier_hz, np.full(n, f_rabi_hz, dtype=complex), rate_hz)


def test_t2_relation():
    q = QubitParams(F_Q, t1_s=25.3e-6, tphi_s=50.0e-6)
    assert q.t2_s == pytest.approx(1.0 / (1.0 / (2 * 25.3e-6) + 1.0 / 50.0e-6))
    q2 = QubitParams.from_t2(F_Q, 25.3e-6, 17.0e-6)
    assert q2.t2_s == pytest.approx(17.0e-6, rel=1e-12)
    assert q2.t1_s == 25.3e-6
    closed = q2.closed()
    assert math.isinf(closed.t1_s) and math.isinf(closed.tphi_s)


def test_validate_density_matrix():
    validate_density_matrix(ground_state())
    validate_density_matrix(excited_state())
    with pytest.raises(Exception):
        validate_density_matrix(np.array([[0.7, 0.0], [0.0, 0.7]]))
    with pytest.raises(Exception):
        validate_density_matrix(np.array([[0.5, 0.9], [0.9, 0.5]]))


def test_rabi_analytic_pi_pulse():
    omega = TWO_PI * 1e6
    assert rabi_analytic(omega, 0.0, 0.5e-6) == pytest.approx(1.0)
    assert rabi_analytic(omega, 0.0, 0.25e-6) == pytest.approx(0.5)
    # detuned oscillation is bounded by omega^2/(omega^2+delta^2)
    delta = TWO_PI * 2e6
    t = np.linspace(0.0, 2e-6, 400)
    p1 = rabi_analytic(omega, delta, t)
    assert np.max(p1) <= omega**2 / (omega**2 + delta**2) + 1e-12
    assert np.all((p1 >= 0.0) & (p1 <= 1.0))


def test_evolve_matches_analytic_on_resonance():
    q = QubitParams(F_Q)
    f_rabi = 1e6
    drive = flat_drive(f_rabi, 2e-6)
    dt = 1.0 / (200.0 * f_rabi)
    traj = evolve(q, drive, ground_state(), dt)
    ana = rabi_analytic(TWO_PI * f_rabi, 0.0, traj.times_s)
    assert np.max(np.abs(traj.p1 - ana)) < 1e-6
    validate_density_matrix(traj.rho_final)


def test_evolve_matches_analytic_detuned():
    q = QubitParams(F_Q)
    f_rabi, df = 1e6, 2.5e6
    f_gen = math.hypot(f_rabi, df)
    drive = flat_drive(f_rabi, 1e-6, carrier_hz=F_Q + df)
    traj = evolve(q, drive, ground_state(), 1.0 / (200.0 * f_gen))
    ana = rabi_analytic(TWO_PI * f_rabi, TWO_PI * df, traj.times_s)
    assert np.max(np.abs(traj.p1 - ana)) < 1e-6


def test_evolve_step_size_guard():
    q = QubitParams(F_Q)
    drive = flat_drive(10e6, 1e-7)
    with pytest.raises(StepSizeError):
        evolve(q, drive, ground_state(), 1e-8)


def test_evolve_t1_decay():
    q = QubitParams(F_Q, t1_s=10e-6)
    drive = flat_drive(0.0, 5e-6)  # idle line
    traj = evolve(q, drive, excited_state(), 5e-9)
    expect = np.exp(-traj.times_s / 10e-6)
    assert np.max(np.abs(traj.p1 - expect)) < 1e-7


def test_free_evolve_closed_form():
    q = QubitParams(F_Q, t1_s=20e-6, tphi_s=30e-6)
    rho = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    t = 7e-6
    delta = TWO_PI * 0.3e6
    out = free_evolve(q, rho, t, delta)
    assert out[1, 1].real == pytest.approx(0.5 * math.exp(-t / 20e-6), rel=1e-12)
    coh = 0.5 * np.exp(-1j * delta * t) * math.exp(-t / q.t2_s)
    assert out[0, 1] == pytest.approx(coh)
    assert out[1, 0] == pytest.approx(np.conj(coh))
    assert np.trace(out) == pytest.approx(1.0)
    validate_density_matrix(out)


def test_free_evolve_matches_evolve():
    q = QubitParams(F_Q, t1_s=12e-6, tphi_s=9e-6)
    rho = np.array([[0.75, 0.25 - 0.3j], [0.25 + 0.3j, 0.25]], dtype=complex)
    t = 2e-6
    traj = evolve(q, flat_drive(0.0, t), rho, 1e-9)
    direct = free_evolve(q, rho, t)
    assert np.max(np.abs(traj.rho_final - direct)) < 1e-8


def test_fit_exp_decay():
    t = np.linspace(0.0, 80e-6, 41)
    y = 0.93 * np.exp(-t / 25.3e-6) + 0.02
    fit = fit_curve(FitModel.EXP_DECAY, t, y)
    assert fit.params["tau"] == pytest.approx(25.3e-6, rel=1e-6)
    assert fit.params["a"] == pytest.approx(0.93, rel=1e-6)
    assert fit.residual < 1e-9


def test_fit_damped_cosine():
    t = np.linspace(0.0, 30e-6, 91)
    y = 0.5 * np.exp(-t / 17e-6) * np.cos(TWO_PI * 0.34e6 * t) + 0.5
    fit = fit_curve("damped_cosine", t, y)
    assert fit.params["f"] == pytest.approx(0.34e6, rel=1e-6)
    assert fit.params["tau"] == pytest.approx(17e-6, rel=1e-4)


def test_fit_rabi_sinusoid():
    t = np.linspace(0.0, 2e-6, 80)
    y = 0.4 * np.cos(TWO_PI * 2.2e6 * t + 0.3) + 0.5
    fit = fit_curve(FitModel.RABI_SINUSOID, t, y)
    assert fit.params["f"] == pytest.approx(2.2e6, rel=1e-6)


def test_fit_needs_enough_points():
    t = np.linspace(0.0, 1e-6, 8)
    with pytest.raises(FitError):
        fit_curve(FitModel.EXP_DECAY, t, np.exp(-t / 1e-6))
