"""Resonator array demultiplexing the multi-tone LO line into per-mixer channels.

Each resonator is a single-pole Lorentzian band-pass: on resonance it passes
its tone untouched, off resonance it attenuates, which is what isolates the
channels and sets the crosstalk floor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import MultiToneLo, SignalError


@dataclass(frozen=True)
class Resonator:
    f_r_hz: float
    q: float

    def __post_init__(self):
        if self.f_r_hz <= 0:
            raise SignalError(f"resonance frequency must be positive, got {self.f_r_hz}")
        if self.q <= 0:
            raise SignalError(f"quality factor must be positive, got {self.q}")

    @property
    def linewidth_hz(self) -> float:
        return self.f_r_hz / self.q


@dataclass(frozen=True)
class ChannelTone:
    """One LO tone as seen by a mixer after its resonator."""

    freq_hz: float
    amp: float
    phase_rad: float


def resonator_gain(r: Resonator, f_hz: float) -> complex:
    """Complex transfer of the resonator at frequency f.

    gain = 1 / (1 + 2j Q (f - f_r) / f_r); unity on resonance, |gain| <= 1.
    """
    if np.any(np.asarray(f_hz) <= 0):
        raise SignalError("frequency must be positive")
    return 1.0 / (1.0 + 2.0j * r.q * (np.asarray(f_hz) - r.f_r_hz) / r.f_r_hz)


def demux(
    resonators: list[Resonator], lo: MultiToneLo
) -> tuple[list[tuple[ChannelTone, ...]], np.ndarray]:
    """Filter the LO line through each resonator.

    Returns ``(channels, crosstalk_db)``: ``channels[k]`` holds every LO tone
    weighted by resonator k (amplitude and phase of the complex gain applied),
    ``crosstalk_db[k, j]`` is 20 log10 |gain of tone j through resonator k|.
    """
    if not resonators:
        raise SignalError("resonator list is empty")
    channels: list[tuple[ChannelTone, ...]] = []
    xtalk = np.empty((len(resonators), len(lo.tones)))
    for k, r in enumerate(resonators):
        ch = []
        for j, tone in enumerate(lo.tones):
            g = resonator_gain(r, tone.freq_hz)
            ch.append(
                ChannelTone(
                    freq_hz=tone.freq_hz,
                    amp=tone.amp * abs(g),
                    phase_rad=tone.phase_rad + float(np.angle(g)),
                )
            )
            xtalk[k, j] = 20.0 * np.log10(abs(g))
        channels.append(tuple(ch))
    return channels, xtalk


def matched_channel(
    resonators: list[Resonator], lo: MultiToneLo, k: int
) -> ChannelTone:
    """Channel tone for mixer k: the LO tone closest to resonator k."""
    channels, _ = demux(resonators, lo)
    freqs = np.array([t.freq_hz for t in lo.tones])
    j = int(np.argmin(np.abs(freqs - resonators[k].f_r_hz)))
    return channels[k][j]
