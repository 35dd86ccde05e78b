import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcihome import blink, dsp
from bcihome.blink import BlinkConfig, BlinkEvent
from bcihome.dsp import SignalWindow
from bcihome.errors import InvalidInputError
from bcihome.synth import Scenario, generate_blink_channel

FS = 512
CFG = BlinkConfig()


def trace(widths, onsets=(2.5, 3.3, 4.1), seconds=6.0, seed=1, noise=1.0):
    sc = Scenario(duration_s=seconds, blink_script=tuple(zip(onsets, widths)),
                  noise_rms=noise, rng_seed=seed)
    return generate_blink_channel(sc)


class TestThreshold:
    def test_constant_magnitude(self):
        w = SignalWindow(np.array([1.0, -1.0] * 512), FS)
        assert blink.blink_threshold(w, CFG) == 5.0

    def test_zero(self):
        assert blink.blink_threshold(SignalWindow(np.zeros(1024), FS), CFG) == 0.0

    def test_direct_summation(self):
        raw = trace((250.0, 250.0, 250.0))
        filt = dsp.apply_filter(dsp.design_bandpass(4, 1.0, 10.0, FS), raw)
        total = 0.0
        for v in filt.samples.tolist():
            total += abs(v)
        expect = 5.0 * total / filt.n
        assert blink.blink_threshold(filt, CFG) == pytest.approx(expect, rel=1e-12)


class TestDetect:
    def test_three_blinks(self):
        events = blink.detect_blinks(trace((250.0, 250.0, 250.0)), CFG)
        assert len(events) == 3
        assert all(e.width_ms > 200.0 for e in events)
        onsets = [e.onset_s for e in events]
        assert onsets == sorted(onsets)
        for got, want in zip(onsets, (2.5, 3.3, 4.1)):
            assert want <= got < want + 0.25

    def test_short_spikes_ignored(self):
        assert blink.detect_blinks(trace((150.0, 150.0, 150.0)), CFG) == []

    def test_zero(self):
        assert blink.detect_blinks(SignalWindow(np.zeros(2048), FS), CFG) == []

    def test_biphasic_lobes_merge(self):
        p1 = dsp.Peak(0, 50, 0.0, 1.0)
        p2 = dsp.Peak(80, 120, 0.0, 2.0)
        (m,) = blink.merge_peaks([p1, p2], FS, 100.0)
        assert (m.start_index, m.end_index, m.apex_value) == (0, 120, 2.0)
        assert m.width_ms == pytest.approx(121 / FS * 1000)
        far = dsp.Peak(200, 210, 0.0, 1.0)
        assert len(blink.merge_peaks([p1, far], FS, 100.0)) == 2

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 10.0), st.integers(0, 1000))
    def test_positive_scaling_keeps_events(self, alpha, seed):
        raw = trace((250.0, 150.0, 250.0), seed=seed)
        base = blink.detect_blinks(raw, CFG)
        scaled = blink.detect_blinks(raw.scaled(alpha), CFG)
        assert [(e.onset_s, e.width_ms) for e in base] == [(e.onset_s, e.width_ms) for e in scaled]

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(120.0, 320.0), min_size=1, max_size=3), st.integers(0, 1000))
    def test_every_event_wider_than_rule(self, widths, seed):
        onsets = (2.5, 3.3, 4.1)[: len(widths)]
        for e in blink.detect_blinks(trace(widths, onsets, seed=seed), CFG):
            assert e.width_ms > 200.0

    @settings(max_examples=20, deadline=None)
    @given(st.floats(1.0, 8.0), st.floats(0.1, 4.0), st.integers(0, 1000))
    def test_count_monotone_in_c_prime(self, c_lo, delta, seed):
        raw = trace((250.0, 230.0, 260.0), seed=seed)
        lo = blink.detect_blinks(raw, BlinkConfig(sensitivity_c_prime=c_lo))
        hi = blink.detect_blinks(raw, BlinkConfig(sensitivity_c_prime=c_lo + delta))
        assert len(hi) <= len(lo)


class TestConfirm:
    def ev(self, *onsets):
        return [BlinkEvent(t, 250.0, 1.0) for t in onsets]

    def test_three_inside(self):
        assert blink.confirm(self.ev(0.5, 1.5, 2.5), 0.0, CFG)

    def test_two(self):
        assert not blink.confirm(self.ev(0.5, 1.5), 0.0, CFG)

    def test_third_late(self):
        assert not blink.confirm(self.ev(0.5, 1.5, 4.2), 0.0, CFG)

    def test_window_edges_inclusive(self):
        assert blink.confirm(self.ev(10.0, 12.0, 14.0), 10.0, CFG)

    @given(st.lists(st.floats(-2.0, 6.0), max_size=8), st.floats(-2.0, 6.0))
    def test_monotone_in_events(self, onsets, extra):
        events = self.ev(*sorted(onsets))
        more = self.ev(*sorted(onsets + [extra]))
        if blink.confirm(events, 0.0, CFG):
            assert blink.confirm(more, 0.0, CFG)


def test_config_validation():
    with pytest.raises(InvalidInputError):
        BlinkConfig(confirm_count=0)
    with pytest.raises(InvalidInputError):
        BlinkConfig(sensitivity_c_prime=-1.0)
