"""Behavioral model of one cryogenic interference mixer.

The mixer heterodynes its channel LO tone with the shared IF program and
emits a complex baseband envelope at the difference frequency f_lo - f_if.
The envelope magnitude is the instantaneous Rabi rate in Hz and the phase
follows -theta_if (plus the channel LO phase). Switching is digital: a
per-cycle bit of 0 leaves a coherent residual eps = 10^(-R/20) set by the
configured on/off ratio R.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .demux import ChannelTone
from .signals import IfProgram, SignalError, EnvelopeShape

# Reported maximum mixer output power; metadata for resource tables only.
MAX_OUTPUT_POWER_PW = 4.11
MAX_OUTPUT_POWER_DBM = -83.9


class MixerError(ValueError):
    """Invalid mixer configuration or drive request."""


class Nonlinearity(str, Enum):
    LINEAR = "linear"
    SINE_SATURATING = "sine_saturating"


@dataclass(frozen=True)
class MixerConfig:
    channel: ChannelTone
    gain_hz_per_unit: float
    on_off_ratio_db: float = 28.5
    nonlinearity: Nonlinearity = Nonlinearity.SINE_SATURATING
    bpf_stopband_db: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "nonlinearity", Nonlinearity(self.nonlinearity))
        if self.gain_hz_per_unit <= 0:
            raise MixerError(f"gain must be positive, got {self.gain_hz_per_unit}")
        if self.on_off_ratio_db <= 0:
            raise MixerError(f"on/off ratio must be positive, got {self.on_off_ratio_db}")
        if self.bpf_stopband_db < 0:
            raise MixerError(f"stopband must be non-negative, got {self.bpf_stopband_db}")

    @property
    def off_leakage(self) -> float:
        """Coherent off-state amplitude scale eps = 10^(-R/20)."""
        return 10.0 ** (-self.on_off_ratio_db / 20.0)


@dataclass(frozen=True)
class BitTimeline:
    """Per-cycle on/off bits; the companion fixed input is always logic 1."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise MixerError("bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class DriveEnvelope:
    """Complex baseband envelope at the difference frequency.

    ``samples`` are in Hz (instantaneous Rabi rate); evaluation between
    samples is linear interpolation, zero outside the sampled span.
    """

    carrier_hz: float
    samples: np.ndarray
    envelope_rate_hz: float
    t0_s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))
        if self.carrier_hz <= 0:
            raise MixerError(f"carrier must be positive, got {self.carrier_hz}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.envelope_rate_hz

    @property
    def peak_hz(self) -> float:
        return float(np.max(np.abs(self.samples))) if len(self.samples) else 0.0

    def value(self, t):
        """Complex envelope at absolute time t (array-aware).

        Linear interpolation between samples; the final sample is held to the
        end of the nominal duration so an m-sample flat pulse spans exactly
        m / envelope_rate seconds.
        """
        tq = np.asarray(t, dtype=float) - self.t0_s
        n = len(self.samples)
        ts = np.append(np.arange(n) / self.envelope_rate_hz, n / self.envelope_rate_hz)
        vals = np.append(self.samples, self.samples[-1] if n else 0.0)
        re = np.interp(tq, ts, vals.real, left=0.0, right=0.0)
        im = np.interp(tq, ts, vals.imag, left=0.0, right=0.0)
        return re + 1j * im


def amplitude_map(cfg: MixerConfig, a_if: float) -> float:
    """Peak Rabi rate (Hz) produced at IF amplitude a_if in [0, 1].

    Linear mode: gain * a_if. Saturating mode: gain * sin(pi a_if / 2),
    monotone and concave with saturation at a_if = 1.
    """
    a = np.asarray(a_if, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise MixerError(f"a_if must be in [0, 1], got {a_if}")
    if cfg.nonlinearity is Nonlinearity.LINEAR:
        out = cfg.gain_hz_per_unit * a
    else:
        out = cfg.gain_hz_per_unit * np.sin(0.5 * math.pi * a)
    return float(out) if np.isscalar(a_if) else out


def inverse_amplitude_map(cfg: MixerConfig, rabi_hz: float) -> float:
    """Inverse of amplitude_map; raises if the rate is unreachable at a_if <= 1."""
    if rabi_hz < 0 or rabi_hz > cfg.gain_hz_per_unit * (1 + 1e-12):
        raise MixerError(f"Rabi rate {rabi_hz} Hz unreachable with gain {cfg.gain_hz_per_unit}")
    x = min(rabi_hz / cfg.gain_hz_per_unit, 1.0)
    if cfg.nonlinearity is Nonlinearity.LINEAR:
        return x
    return 2.0 / math.pi * math.asin(x)


def baseband_output(
    cfg: MixerConfig,
    prog: IfProgram,
    bits: BitTimeline,
    samples_per_cycle: int = 256,
) -> DriveEnvelope:
    """Mix the channel tone with the IF program into a drive envelope.

    For cycle i: env(t) = s(a_i) * amplitude_map(A_i(t)) * exp(1j*(-theta_i + phi_ch))
    with s(1) = 1 and s(0) = off_leakage. Carrier is f_lo - f_if.
    """
    if len(bits) != len(prog.cycles):
        raise MixerError(
            f"bit timeline length {len(bits)} does not match {len(prog.cycles)} cycles"
        )
    carrier = cfg.channel.freq_hz - prog.f_if_hz
    if carrier <= 0:
        raise MixerError(
            f"difference frequency {carrier} Hz is not positive (f_if >= f_lo)"
        )
    rate = samples_per_cycle / prog.cycle_period_s
    tloc = np.arange(samples_per_cycle) / rate
    chunks = []
    for i, cyc in enumerate(prog.cycles):
        if cyc.idle:
            chunks.append(np.zeros(samples_per_cycle, dtype=complex))
            continue
        scale = 1.0 if bits.bits[i] else cfg.off_leakage
        amp = amplitude_map(cfg, cyc.envelope.value(tloc))
        phase = -prog.theta_rad(i) + cfg.channel.phase_rad
        chunks.append(scale * amp * np.exp(1j * phase))
    samples = np.concatenate(chunks) if chunks else np.zeros(0, dtype=complex)
    return DriveEnvelope(carrier, samples, rate)


def output_spectrum(
    cfg: MixerConfig,
    prog: IfProgram,
    bits: BitTimeline,
    rate_hz: float,
) -> list[tuple[float, float]]:
    """CW tone table for a flat-envelope program: (freq_hz, power_db rel. carrier).

    The difference tone sits at 0 dB when on and at -on_off_ratio_db when
    off; LO, IF and sum components sit at -bpf_stopband_db.
    """
    if not prog.cycles:
        raise MixerError("empty program has no CW spectrum")
    active = [c for c in prog.cycles if not c.idle]
    if not active or any(c.envelope.shape is not EnvelopeShape.FLAT for c in active):
        raise MixerError("CW spectrum analysis requires flat envelopes")
    if len(set(bits.bits)) != 1:
        raise MixerError("CW spectrum analysis requires a uniform bit timeline")
    f_lo = cfg.channel.freq_hz
    f_if = prog.f_if_hz
    if rate_hz <= 2.0 * (f_lo + f_if):
        raise SignalError(f"rate {rate_hz} Hz violates Nyquist for {f_lo + f_if} Hz content")
    diff_db = 0.0 if bits.bits[0] else -cfg.on_off_ratio_db
    return [
        (f_lo - f_if, diff_db),
        (f_if, -cfg.bpf_stopband_db),
        (f_lo, -cfg.bpf_stopband_db),
        (f_lo + f_if, -cfg.bpf_stopband_db),
    ]
