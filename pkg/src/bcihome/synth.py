"""Synthetic EEG channels and beacon traffic with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsp import DEFAULT_FS, SignalWindow
from .errors import InvalidInputError
from .localization import (
    RSSI_MAX_DBM,
    RSSI_MIN_DBM,
    BeaconReading,
    format_reading,
    simulate_rssi,
)
from .ssvep import StimulusTable

# independent random streams derived from one scenario seed
_SSVEP_STREAM = 1
_BLINK_STREAM = 2
_BEACON_STREAM = 3

BLINK_AMPLITUDE_FACTOR = 50.0


@dataclass(frozen=True)
class Beacon:
    beacon_id: str
    room_id: str
    distance_m: float


@dataclass(frozen=True)
class Scenario:
    """One simulated trial. Times are seconds from session start.

    ``blink_script`` holds blinks at fixed times. ``feedback_blinks`` holds
    ``(offset_s, width_ms)`` pairs placed relative to the feedback instant,
    which is only known once a selection happens.
    """

    duration_s: float
    fs: int = DEFAULT_FS
    gaze_script: tuple[tuple[float, float, int | None], ...] = ()
    blink_script: tuple[tuple[float, float], ...] = ()
    feedback_blinks: tuple[tuple[float, float], ...] = ()
    ssvep_amplitude: float = 2.0
    harmonic_ratio: float = 0.5
    noise_rms: float = 1.0
    rng_seed: int = 0
    user_room: str | None = None
    beacons: tuple[Beacon, ...] = ()
    rssi_noise_db: float = 2.0
    cue_s: float = 4.0

    def __post_init__(self):
        if self.fs <= 0 or self.duration_s <= 0:
            raise InvalidInputError("fs and duration_s must be positive")
        if not 0.0 <= self.harmonic_ratio <= 2.0:
            raise InvalidInputError("harmonic_ratio must lie in [0, 2]")
        if self.noise_rms < 0:
            raise InvalidInputError("noise_rms must be non-negative")
        spans = sorted((s, e) for s, e, _ in self.gaze_script)
        for s, e in spans:
            if not 0.0 <= s < e <= self.duration_s:
                raise InvalidInputError(f"gaze interval ({s}, {e}) outside [0, {self.duration_s}]")
        for (_, e0), (s1, _) in zip(spans, spans[1:]):
            if s1 < e0:
                raise InvalidInputError("gaze intervals overlap")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s * self.fs))

    @property
    def stimulus_onset(self) -> float | None:
        starts = [s for s, _, cid in self.gaze_script if cid is not None]
        return min(starts) if starts else None

    def intended_class(self) -> int | None:
        for _, _, cid in sorted(self.gaze_script):
            if cid is not None:
                return cid
        return None


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([stream, seed])


def generate_ssvep_channel(sc: Scenario, table: StimulusTable) -> SignalWindow:
    """Background noise plus a sinusoid and second harmonic during each gaze interval."""
    rng = _rng(sc.rng_seed, _SSVEP_STREAM)
    n = sc.n_samples
    t = np.arange(n) / sc.fs
    x = np.zeros(n)
    for start, end, cid in sc.gaze_script:
        phase, phase2 = rng.uniform(0.0, 2 * np.pi, size=2)
        if cid is None:
            continue
        f = table.frequency(cid)
        i0, i1 = int(round(start * sc.fs)), int(round(end * sc.fs))
        seg = t[i0:i1]
        x[i0:i1] += sc.ssvep_amplitude * np.sin(2 * np.pi * f * seg + phase)
        x[i0:i1] += (sc.harmonic_ratio * sc.ssvep_amplitude
                     * np.sin(2 * np.pi * 2 * f * seg + phase2))
    if sc.noise_rms > 0:
        x += sc.noise_rms * rng.standard_normal(n)
    return SignalWindow(x, sc.fs, "O2", 0.0)


def blink_pulse(width_ms: float, fs: int, amplitude: float = 1.0) -> np.ndarray:
    """Raised-cosine (Hann) bump whose support spans ``width_ms``."""
    m = max(1, int(round(width_ms / 1000.0 * fs)))
    i = np.arange(m)
    return amplitude * 0.5 * (1.0 - np.cos(2 * np.pi * (i + 0.5) / m))


def _blink_times(sc: Scenario, feedback_s: float | None):
    pulses = list(sc.blink_script)
    if feedback_s is not None:
        pulses += [(feedback_s + off, w) for off, w in sc.feedback_blinks]
    return sorted(pulses)


def generate_blink_channel(sc: Scenario, feedback_s: float | None = None) -> SignalWindow:
    """Background noise plus one raised-cosine pulse per scripted blink.

    Pulses from ``feedback_blinks`` are included only when ``feedback_s`` is given.
    """
    pulses = _blink_times(sc, feedback_s)
    for (o0, w0), (o1, _) in zip(pulses, pulses[1:]):
        if o1 < o0 + w0 / 1000.0:
            raise InvalidInputError(f"blink pulses at {o0} s and {o1} s overlap")
    rng = _rng(sc.rng_seed, _BLINK_STREAM)
    n = sc.n_samples
    x = np.zeros(n)
    amp = BLINK_AMPLITUDE_FACTOR * sc.noise_rms if sc.noise_rms > 0 else 1.0
    for onset, width in pulses:
        if onset < 0 or width <= 0:
            raise InvalidInputError(f"bad blink ({onset} s, {width} ms)")
        p = blink_pulse(width, sc.fs, amp)
        i0 = int(round(onset * sc.fs))
        if i0 >= n:
            continue
        take = min(len(p), n - i0)
        x[i0:i0 + take] += p[:take]
    if sc.noise_rms > 0:
        x += sc.noise_rms * rng.standard_normal(n)
    return SignalWindow(x, sc.fs, "Fp2", 0.0)


def generate_beacon_readings(sc: Scenario, interval_ms: int,
                             start_ms: int = 0) -> list[BeaconReading]:
    if interval_ms <= 0:
        raise InvalidInputError("interval_ms must be positive")
    rng = _rng(sc.rng_seed, _BEACON_STREAM)
    out = []
    total_ms = int(round(sc.duration_s * 1000))
    for tick in range(0, total_ms, interval_ms):
        for k, b in enumerate(sc.beacons):
            rssi = simulate_rssi(b.distance_m, rng, sc.rssi_noise_db)
            rssi = round(min(max(rssi, RSSI_MIN_DBM), RSSI_MAX_DBM), 2)
            # 1 ms stagger keeps timestamps strictly increasing within a tick
            out.append(BeaconReading(b.beacon_id, b.room_id, rssi, start_ms + tick + k))
    return out


def generate_beacon_stream(sc: Scenario, interval_ms: int, start_ms: int = 0) -> list[str]:
    """Protocol lines (without newlines) for every beacon at each interval tick."""
    return [format_reading(r) for r in generate_beacon_readings(sc, interval_ms, start_ms)]


@dataclass(frozen=True)
class Geometry:
    """Beacon placement used to derive per-trial distances."""

    beacons: tuple[tuple[str, str], ...] = (("b_a", "room_a"), ("b_b", "room_b"))
    near_m: float = 2.0
    far_m: float = 6.0

    def distances(self, user_room: str) -> tuple[Beacon, ...]:
        return tuple(
            Beacon(bid, room, self.near_m if room == user_room else self.far_m)
            for bid, room in self.beacons
        )


@dataclass(frozen=True)
class ScenarioTemplate:
    """Trial protocol shared by all trials of a session."""

    fs: int = DEFAULT_FS
    preroll_s: float = 4.0
    gaze_s: float = 3.0
    tail_s: float = 8.0
    ssvep_amplitude: float = 2.0
    harmonic_ratio: float = 0.5
    noise_rms: float = 1.0
    rssi_noise_db: float = 2.0
    feedback_blinks: tuple[tuple[float, float], ...] = ((0.5, 250.0), (1.3, 250.0), (2.1, 250.0))
    blink_script: tuple[tuple[float, float], ...] = field(default=())

    def scenario(self, room: str, class_id: int | None, seed: int, geometry: Geometry) -> Scenario:
        cue = self.preroll_s
        gaze = ((cue, cue + self.gaze_s, class_id),) if class_id is not None else ()
        return Scenario(
            duration_s=cue + self.gaze_s + self.tail_s,
            fs=self.fs,
            gaze_script=gaze,
            blink_script=self.blink_script,
            feedback_blinks=self.feedback_blinks,
            ssvep_amplitude=self.ssvep_amplitude,
            harmonic_ratio=self.harmonic_ratio,
            noise_rms=self.noise_rms,
            rng_seed=seed,
            user_room=room,
            beacons=geometry.distances(room),
            rssi_noise_db=self.rssi_noise_db,
            cue_s=cue,
        )
