"""Single-qubit experiment suite: Rabi chevron, coherence runs, virtual-Z
Ramsey, and execution of compiled TDM schedules through the full
mixer-plus-qubit chain.

Free evolution between pulses uses the exact drive-free Lindblad solution;
pulses themselves run through the RK4 integrator.
"""
from __future__ import annotations

import math
from dataclasses import replace
from enum import Enum

import numpy as np

from . import qubit as qb
from .calibration import CalibratedPulse, pulse_drive
from .compiler import Program, Schedule, ideal_unitary
from .demux import ChannelTone
from .mixer import BitTimeline, MixerConfig, amplitude_map, baseband_output
from .qubit import QubitParams, Trajectory
from .signals import CycleSpec, Envelope, EnvelopeShape, make_if_program

TWO_PI = 2.0 * math.pi


class ExperimentError(RuntimeError):
    pass


class ExperimentKind(str, Enum):
    T1 = "t1"
    RAMSEY = "ramsey"
    ECHO = "echo"
    VZ_RAMSEY = "vz_ramsey"


def chevron(
    q: QubitParams,
    cfg: MixerConfig,
    f_lo_hz: float,
    f_if_grid,
    tau_grid,
    mixer_on: bool = True,
    a_if: float = 1.0,
) -> np.ndarray:
    """Final excited-state population over (f_if, tau).

    Each f_if column runs one flat-envelope pulse of the maximum duration
    from the ground state; populations at intermediate tau values are read
    off the same trajectory (a flat pulse of length tau is a prefix of the
    longer one).
    """
    f_if_grid = np.asarray(f_if_grid, dtype=float)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if f_if_grid.size == 0 or tau_grid.size == 0:
        raise ExperimentError("empty sweep grid")
    cfg = replace(cfg, channel=ChannelTone(f_lo_hz, cfg.channel.amp, cfg.channel.phase_rad))
    tau_max = float(tau_grid.max())
    f_max = max(
        amplitude_map(cfg, a_if),
        float(np.max(np.abs((f_lo_hz - f_if_grid) - q.f_qubit_hz))),
        1.0 / tau_max,
    )
    dt = 1.0 / (100.0 * f_max)
    out = np.empty((len(f_if_grid), len(tau_grid)))
    env = Envelope(EnvelopeShape.FLAT, tau_max, a_if)
    for i, f_if in enumerate(f_if_grid):
        prog = make_if_program(f_if, tau_max, [CycleSpec(0.0, env)], quantized=True)
        drive = baseband_output(cfg, prog, BitTimeline((1 if mixer_on else 0,)))
        traj = qb.evolve(q, drive, qb.ground_state(), dt)
        out[i] = np.interp(tau_grid, traj.times_s, traj.p1)
    return out


def _apply_pulse(
    q: QubitParams,
    cfg: MixerConfig,
    pulse: CalibratedPulse,
    rho: np.ndarray,
    theta_if_deg: float = 0.0,
    f_if_hz: float | None = None,
) -> np.ndarray:
    drive = pulse_drive(cfg, pulse, theta_if_deg=theta_if_deg, f_if_hz=f_if_hz)
    f_max = max(drive.peak_hz, abs(drive.carrier_hz - q.f_qubit_hz), 1e-12)
    dt = min(1.0 / (100.0 * f_max), pulse.tau_if_s / 32.0)
    return qb.evolve(q, drive, rho, dt).rho_final


def run_experiment(
    kind: ExperimentKind | str,
    q: QubitParams,
    cfg: MixerConfig,
    x90: CalibratedPulse,
    x180: CalibratedPulse | None = None,
    delays_s=None,
    detuning_hz: float = 0.0,
    dtheta_deg=None,
    vz_delay_s: float = 1e-8,
):
    """Coherence and virtual-Z experiment driver.

    t1: X180 then delay. ramsey: X90, delay, X90 with the drive carrier
    detuned by ``detuning_hz``. echo: X90, delay/2, X180, delay/2, X90.
    vz_ramsey: two X90 pulses with the second pulse's theta_if shifted by
    each value of ``dtheta_deg`` across a fixed short delay; returns
    (dtheta_deg, p1) arrays instead of a Trajectory.
    """
    kind = ExperimentKind(kind)
    if kind is ExperimentKind.VZ_RAMSEY:
        if dtheta_deg is None:
            raise ExperimentError("vz_ramsey needs a dtheta grid")
        thetas = np.asarray(dtheta_deg, dtype=float)
        p1 = np.empty_like(thetas)
        for i, dth in enumerate(thetas):
            rho = _apply_pulse(q, cfg, x90, qb.ground_state(), theta_if_deg=0.0)
            rho = qb.free_evolve(q, rho, vz_delay_s)
            rho = _apply_pulse(q, cfg, x90, rho, theta_if_deg=float(dth))
            p1[i] = rho[1, 1].real
        return thetas, p1

    if delays_s is None:
        raise ExperimentError(f"{kind.value} needs a delay grid")
    delays = np.asarray(delays_s, dtype=float)
    if kind is not ExperimentKind.T1 and x90 is None:
        raise ExperimentError("missing calibrated pi/2 pulse")
    if kind in (ExperimentKind.T1, ExperimentKind.ECHO) and x180 is None:
        raise ExperimentError("missing calibrated pi pulse")

    # Ramsey detuning is realized by shifting f_if so the carrier moves to
    # f_qubit + detuning; delta is then constant through pulses and delays.
    delta = TWO_PI * detuning_hz
    f_if_det = None
    if detuning_hz:
        f_if_det = x90.f_lo_hz - (q.f_qubit_hz + detuning_hz)

    p1 = np.empty_like(delays)
    for i, d in enumerate(delays):
        if kind is ExperimentKind.T1:
            rho = _apply_pulse(q, cfg, x180, qb.ground_state())
            rho = qb.free_evolve(q, rho, float(d))
        elif kind is ExperimentKind.RAMSEY:
            rho = _apply_pulse(q, cfg, x90, qb.ground_state(), f_if_hz=f_if_det)
            rho = qb.free_evolve(q, rho, float(d), delta)
            rho = _apply_pulse(q, cfg, x90, rho, f_if_hz=f_if_det)
        else:  # echo
            rho = _apply_pulse(q, cfg, x90, qb.ground_state())
            rho = qb.free_evolve(q, rho, 0.5 * float(d))
            rho = _apply_pulse(q, cfg, x180, rho)
            rho = qb.free_evolve(q, rho, 0.5 * float(d))
            rho = _apply_pulse(q, cfg, x90, rho)
        p1[i] = rho[1, 1].real
    return Trajectory(delays, np.clip(p1, 0.0, 1.0))


def simulate_schedule(
    sched: Schedule,
    program: Program,
    q_list: list[QubitParams],
    cfg_list: list[MixerConfig],
    x90_list: list[CalibratedPulse],
    cycle_period_s: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Execute a compiled schedule through mixer and qubit models.

    The shared IF line carries a full-width flat envelope in every emitted
    cycle; each mixer's bit timeline gates its own pulses. Returns
    (simulated final p1 per qubit, ideal |<1|U|0>|^2 per qubit).
    """
    n = sched.n_qubits
    if not (len(q_list) == len(cfg_list) == len(x90_list) == n):
        raise ExperimentError("schedule/qubit/mixer/pulse counts disagree")
    sim = np.empty(n)
    ideal = np.empty(n)
    for k in range(n):
        pulse = x90_list[k]
        env = Envelope(EnvelopeShape.FLAT, pulse.tau_if_s, pulse.a_if)
        cycles = [CycleSpec(c.theta_if_deg, env) for c in sched.cycles]
        bits = BitTimeline(tuple(1 if k in c.fired else 0 for c in sched.cycles))
        prog = make_if_program(pulse.f_if_hz, cycle_period_s, cycles, quantized=False)
        cfg = replace(
            cfg_list[k],
            channel=ChannelTone(pulse.f_lo_hz, cfg_list[k].channel.amp, cfg_list[k].channel.phase_rad),
        )
        drive = baseband_output(cfg, prog, bits)
        dt = 1.0 / (100.0 * max(drive.peak_hz, 1e-12))
        traj = qb.evolve(q_list[k], drive, qb.ground_state(), dt)
        sim[k] = traj.p1[-1]
        u = ideal_unitary(program.gates[k])
        ideal[k] = abs(u[1, 0]) ** 2
    return sim, ideal
