"""SSVEP target scoring, adaptive threshold and class selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .dsp import SignalWindow, autocorrelate, band_power, power_spectrum
from .errors import FrequencyRangeError, FrequencySpacingError, InvalidInputError

MIN_FREQ_HZ = 6.0
MAX_FREQ_HZ = 24.0
MIN_SPACING_HZ = 0.2
BAND_HALF_WIDTH_HZ = 0.05
SCORE_WINDOW_S = 2.0
THRESHOLD_WINDOW_S = 4.0
# absorbs float noise in window-length and spacing comparisons
_TOL = 1e-9


@dataclass(frozen=True)
class StimulusTable:
    entries: tuple[tuple[int, float], ...]
    sensitivity_c: float = 2.0

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def class_ids(self) -> tuple[int, ...]:
        return tuple(cid for cid, _ in self.entries)

    def frequency(self, class_id: int) -> float:
        for cid, f in self.entries:
            if cid == class_id:
                return f
        raise InvalidInputError(f"class {class_id} not in stimulus table")


@dataclass(frozen=True)
class SsvepDecision:
    scores: tuple[tuple[int, float], ...]
    threshold_tau: float
    selected: int | None
    window_start: float
    window_end: float


def validate_frequencies(entries, sensitivity_c: float = 2.0) -> StimulusTable:
    entries = tuple((int(cid), float(f)) for cid, f in entries)
    if not entries:
        raise InvalidInputError("stimulus table needs at least one entry")
    if sensitivity_c <= 0:
        raise InvalidInputError(f"sensitivity c must be positive, got {sensitivity_c}")
    ids = [cid for cid, _ in entries]
    if sorted(ids) != list(range(1, len(ids) + 1)):
        raise InvalidInputError(f"class ids must be unique and contiguous from 1, got {ids}")
    for cid, f in entries:
        if not (MIN_FREQ_HZ <= f <= MAX_FREQ_HZ):
            raise FrequencyRangeError(cid, f, MIN_FREQ_HZ, MAX_FREQ_HZ)
    for a, b in itertools.combinations(entries, 2):
        gap = abs(a[1] - b[1])
        if gap < MIN_SPACING_HZ - _TOL:
            raise FrequencySpacingError((a, b), gap, MIN_SPACING_HZ)
    return StimulusTable(entries, float(sensitivity_c))


def _target_scores(w: SignalWindow, table: StimulusTable) -> tuple[tuple[int, float], ...]:
    spectrum = power_spectrum(autocorrelate(w))
    return tuple(
        (cid, band_power(spectrum, f, BAND_HALF_WIDTH_HZ)
         + band_power(spectrum, 2 * f, BAND_HALF_WIDTH_HZ))
        for cid, f in table.entries
    )


def score(w: SignalWindow, table: StimulusTable) -> tuple[tuple[int, float], ...]:
    """Band power around each target and its second harmonic, per class."""
    if w.duration < SCORE_WINDOW_S - _TOL:
        raise InvalidInputError(f"scoring needs >= {SCORE_WINDOW_S} s, got {w.duration} s")
    return _target_scores(w, table)


def threshold(w4: SignalWindow, table: StimulusTable) -> float:
    """``c`` times the mean class score over the long window."""
    if w4.duration < THRESHOLD_WINDOW_S - _TOL:
        raise InvalidInputError(
            f"threshold needs >= {THRESHOLD_WINDOW_S} s, got {w4.duration} s"
        )
    return tau_from_scores(_target_scores(w4, table), table.sensitivity_c)


def tau_from_scores(scores, c: float) -> float:
    values = [a for _, a in scores]
    return c * sum(values) / len(values)


def select(scores, tau: float) -> int | None:
    """Argmax class if its score strictly exceeds ``tau``; ties go to the lowest id."""
    best_id, best = None, None
    for cid, a in sorted(scores):
        if best is None or a > best:
            best_id, best = cid, a
    if best is not None and best > tau:
        return best_id
    return None


def decide(w2: SignalWindow, w4: SignalWindow, table: StimulusTable) -> SsvepDecision:
    if abs(w2.end_time - w4.end_time) > 0.5 / w2.sample_rate or w2.start_time < w4.start_time - _TOL:
        raise InvalidInputError("short window must be the trailing part of the long window")
    scores = score(w2, table)
    tau = threshold(w4, table)
    return SsvepDecision(scores, tau, select(scores, tau), w2.start_time, w2.end_time)
