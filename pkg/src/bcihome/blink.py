"""Voluntary eye-blink detection and three-blink confirmation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dsp import FilterSpec, Peak, SignalWindow, apply_filter, design_bandpass, extract_peaks
from .errors import InvalidInputError


@dataclass(frozen=True)
class BlinkConfig:
    sensitivity_c_prime: float = 5.0
    min_width_ms: float = 200.0
    confirm_count: int = 3
    confirm_window_s: float = 4.0
    min_gap_ms: float = 100.0
    filter_order: int = 4
    low_cut: float = 1.0
    high_cut: float = 10.0

    def __post_init__(self):
        for name in ("sensitivity_c_prime", "min_width_ms", "confirm_window_s", "min_gap_ms"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        if self.confirm_count < 1:
            raise InvalidInputError("confirm_count must be >= 1")


@dataclass(frozen=True)
class BlinkEvent:
    onset_s: float
    width_ms: float
    apex_value: float


@lru_cache(maxsize=16)
def _bandpass(order: int, low: float, high: float, fs: int) -> FilterSpec:
    return design_bandpass(order, low, high, fs)


def blink_threshold(w: SignalWindow, cfg: BlinkConfig) -> float:
    """``c'`` times the mean rectified amplitude of the filtered window."""
    if w.n == 0:
        raise InvalidInputError("empty window")
    return cfg.sensitivity_c_prime * float(np.mean(np.abs(w.samples)))


def merge_peaks(peaks: list[Peak], sample_rate: int, min_gap_ms: float) -> list[Peak]:
    """Join runs separated by fewer than ``min_gap_ms`` of sub-threshold samples."""
    merged: list[Peak] = []
    for p in peaks:
        if merged:
            prev = merged[-1]
            gap_ms = (p.start_index - prev.end_index - 1) / sample_rate * 1000.0
            if gap_ms < min_gap_ms:
                merged[-1] = Peak(
                    prev.start_index,
                    p.end_index,
                    (p.end_index - prev.start_index + 1) / sample_rate * 1000.0,
                    max(prev.apex_value, p.apex_value),
                )
                continue
        merged.append(p)
    return merged


def detect_blinks(raw: SignalWindow, cfg: BlinkConfig = BlinkConfig()) -> list[BlinkEvent]:
    """Band-pass, threshold the rectified signal, merge biphasic lobes, apply the width rule."""
    spec = _bandpass(cfg.filter_order, cfg.low_cut, cfg.high_cut, raw.sample_rate)
    filtered = apply_filter(spec, raw)
    sigma = blink_threshold(filtered, cfg)
    rectified = SignalWindow(np.abs(filtered.samples), raw.sample_rate, raw.channel, raw.start_time)
    peaks = merge_peaks(extract_peaks(rectified, sigma), raw.sample_rate, cfg.min_gap_ms)
    return [
        BlinkEvent(raw.start_time + p.start_index / raw.sample_rate, p.width_ms, p.apex_value)
        for p in peaks
        if p.width_ms > cfg.min_width_ms
    ]


def confirm(events, window_start_s: float, cfg: BlinkConfig = BlinkConfig()) -> bool:
    end = window_start_s + cfg.confirm_window_s
    inside = sum(1 for e in events if window_start_s <= e.onset_s <= end)
    return inside >= cfg.confirm_count
