import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcihome import ssvep
from bcihome.dsp import SignalWindow
from bcihome.errors import FrequencyRangeError, FrequencySpacingError, InvalidInputError
from bcihome.synth import Scenario, generate_ssvep_channel

TABLE = ssvep.validate_frequencies([(1, 6.0), (2, 8.2)])
FS = 512


def sine(freq, seconds, amp=1.0, fs=FS, phase=0.3):
    t = np.arange(int(seconds * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t + phase)


def onset_windows(x_tail, seconds_total=4.0, noise=None):
    """4 s window whose last len(x_tail) samples carry x_tail; returns (w2, w4)."""
    n = int(seconds_total * FS)
    x = np.zeros(n) if noise is None else noise.copy()
    x[n - len(x_tail):] += x_tail
    w4 = SignalWindow(x, FS, "O2", 0.0)
    return w4.tail(2.0), w4


class TestValidate:
    def test_default_pair_valid(self):
        t = ssvep.validate_frequencies([(1, 6.0), (2, 8.2)])
        assert t.m == 2 and t.sensitivity_c == 2.0

    def test_spacing_error_names_pair(self):
        with pytest.raises(FrequencySpacingError) as exc:
            ssvep.validate_frequencies([(1, 6.0), (2, 6.1)])
        assert "6.0" in str(exc.value) and "6.1" in str(exc.value)

    def test_range_error(self):
        with pytest.raises(FrequencyRangeError) as exc:
            ssvep.validate_frequencies([(1, 25.0)])
        assert exc.value.frequency == 25.0

    def test_spacing_boundary_allowed(self):
        ssvep.validate_frequencies([(1, 6.0), (2, 6.2)])

    @pytest.mark.parametrize("entries", [[], [(1, 6.0), (1, 8.0)], [(2, 6.0)]])
    def test_bad_ids(self, entries):
        with pytest.raises(InvalidInputError):
            ssvep.validate_frequencies(entries)


class TestScore:
    def test_six_hz_wins(self):
        rng = np.random.default_rng(0)
        w = SignalWindow(sine(6.0, 2) + 0.05 * rng.standard_normal(1024), FS)
        (c1, a1), (c2, a2) = ssvep.score(w, TABLE)
        assert (c1, c2) == (1, 2) and a1 > a2

    def test_zero(self):
        assert [a for _, a in ssvep.score(SignalWindow(np.zeros(1024), FS), TABLE)] == [0.0, 0.0]

    def test_harmonic_only(self):
        w = SignalWindow(sine(12.0, 2), FS)
        (_, a1), (_, a2) = ssvep.score(w, TABLE)
        assert a1 > 0 and a1 > 10 * a2

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            ssvep.score(SignalWindow(np.zeros(1000), FS), TABLE)


class TestThreshold:
    def test_arithmetic(self):
        assert ssvep.tau_from_scores([(1, 10.0), (2, 30.0)], 2.0) == 40.0

    def test_c_one_is_mean(self):
        assert ssvep.tau_from_scores([(1, 3.0), (2, 5.0), (3, 10.0)], 1.0) == 6.0

    def test_zero(self):
        assert ssvep.threshold(SignalWindow(np.zeros(2048), FS), TABLE) == 0.0

    def test_matches_scores_of_long_window(self):
        w4 = SignalWindow(sine(8.2, 4), FS)
        expect = 2.0 * np.mean([a for _, a in ssvep._target_scores(w4, TABLE)])
        assert ssvep.threshold(w4, TABLE) == pytest.approx(expect, rel=1e-15)

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            ssvep.threshold(SignalWindow(np.zeros(1024), FS), TABLE)


class TestDecide:
    def test_equal_scores_rejected(self):
        scores = ((1, 5.0), (2, 5.0))
        assert ssvep.select(scores, ssvep.tau_from_scores(scores, 2.0)) is None

    def test_tie_goes_to_lowest_id(self):
        assert ssvep.select(((2, 5.0), (1, 5.0)), 1.0) == 1

    def test_strict_inequality(self):
        assert ssvep.select(((1, 4.0), (2, 1.0)), 4.0) is None

    def test_strong_onset_selects_class_1(self):
        w2, w4 = onset_windows(sine(6.0, 1.0, amp=2.0))
        d = ssvep.decide(w2, w4, TABLE)
        assert d.selected == 1
        assert d.window_end == w4.end_time

    def test_generated_stimulus(self):
        sc = Scenario(duration_s=8.0, gaze_script=((4.0, 8.0, 2),), noise_rms=1.0,
                      ssvep_amplitude=2.0, rng_seed=3)
        ch = generate_ssvep_channel(sc, TABLE)
        d = ssvep.decide(ch.tail(2.0, 5.0), ch.tail(4.0, 5.0), TABLE)
        assert d.selected == 2

    def test_scaling_by_3_7(self):
        rng = np.random.default_rng(5)
        w2, w4 = onset_windows(sine(6.0, 0.5, amp=2.0), noise=rng.standard_normal(2048))
        d = ssvep.decide(w2, w4, TABLE)
        d2 = ssvep.decide(w2.scaled(3.7), w4.scaled(3.7), TABLE)
        assert d.selected == d2.selected
        for (_, a), (_, b) in zip(d.scores, d2.scores):
            assert b == pytest.approx(3.7**2 * a, rel=1e-9)
        assert d2.threshold_tau == pytest.approx(3.7**2 * d.threshold_tau, rel=1e-9)

    def test_all_zero_never_selects(self):
        w4 = SignalWindow(np.zeros(2048), FS)
        assert ssvep.decide(w4.tail(2.0), w4, TABLE).selected is None

    def test_window_mismatch(self):
        w4 = SignalWindow(np.zeros(2048), FS)
        with pytest.raises(InvalidInputError):
            ssvep.decide(w4.segment(0.0, 2.0), w4, TABLE)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31), st.floats(0.5, 6.0), st.floats(0.5, 4.0))
    def test_larger_c_never_turns_reject_into_select(self, seed, c_lo, delta):
        rng = np.random.default_rng(seed)
        w4 = SignalWindow(rng.standard_normal(2048), FS)
        lo = ssvep.validate_frequencies(TABLE.entries, c_lo)
        hi = ssvep.validate_frequencies(TABLE.entries, c_lo + delta)
        if ssvep.decide(w4.tail(2.0), w4, lo).selected is None:
            assert ssvep.decide(w4.tail(2.0), w4, hi).selected is None

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.floats(0.01, 100.0))
    def test_uniform_scores_rejected_when_c_at_least_m(self, m, a):
        scores = tuple((i + 1, a) for i in range(m))
        for c in (float(m), m + 0.5, 2.0 * m):
            assert ssvep.select(scores, ssvep.tau_from_scores(scores, c)) is None
