import math

import numpy as np
import pytest

from qcvz.demux import ChannelTone, Resonator, demux, matched_channel, resonator_gain
from qcvz.signals import MultiToneLo, SignalError, Tone

# Three readout-band resonators and their matched LO tones.
F_R = (7.74225e9, 7.98575e9, 8.23350e9)
Q = 1.0e4


def test_resonator_validation():
    with pytest.raises(SignalError):
        Resonator(-1.0, Q)
    with pytest.raises(SignalError):
        Resonator(8e9, 0.0)
    assert Resonator(8e9, 1e4).linewidth_hz == pytest.approx(0.8e6)


def test_gain_on_resonance_and_half_linewidth():
    r = Resonator(8.0e9, Q)
    assert resonator_gain(r, r.f_r_hz) == pytest.approx(1.0 + 0.0j)
    # at half a linewidth detuning the magnitude is 1/sqrt(2)
    f = r.f_r_hz + 0.5 * r.linewidth_hz
    assert abs(resonator_gain(r, f)) == pytest.approx(1.0 / math.sqrt(2.0))


def test_gain_magnitude_oracle():
    r = Resonator(8.0e9, Q)
    for df in (0.0, 1e5, 1e6, 5e7, -3e6):
        g = resonator_gain(r, r.f_r_hz + df)
        expect = 1.0 / math.sqrt(1.0 + (2.0 * Q * df / r.f_r_hz) ** 2)
        assert abs(g) == pytest.approx(expect, rel=1e-12)


def test_demux_selects_matched_tones():
    resonators = [Resonator(f, Q) for f in F_R]
    lo = MultiToneLo(tuple(Tone(f, 0.5) for f in F_R))
    channels, xtalk = demux(resonators, lo)
    assert xtalk.shape == (3, 3)
    for k in range(3):
        # matched tone passes with unity gain, neighbors are suppressed
        assert xtalk[k, k] == pytest.approx(0.0, abs=1e-9)
        for j in range(3):
            if j != k:
                assert xtalk[k, j] < -40.0
        ch = channels[k][k]
        assert isinstance(ch, ChannelTone)
        assert ch.freq_hz == F_R[k]
        assert ch.amp == pytest.approx(0.5)


def test_demux_gain_linear_in_amp():
    resonators = [Resonator(8.0e9, Q)]
    for amp in (0.1, 0.5, 1.0):
        lo = MultiToneLo((Tone(8.0e9 + 2e6, amp),))
        channels, _ = demux(resonators, lo)
        g = abs(resonator_gain(resonators[0], 8.0e9 + 2e6))
        assert channels[0][0].amp == pytest.approx(amp * g, rel=1e-12)


def test_matched_channel():
    resonators = [Resonator(f, Q) for f in F_R]
    lo = MultiToneLo(tuple(Tone(f, 0.5) for f in F_R))
    ch = matched_channel(resonators, lo, 1)
    assert ch.freq_hz == F_R[1]
    assert ch.amp == pytest.approx(0.5)
