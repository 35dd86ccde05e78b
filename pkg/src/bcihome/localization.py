"""Room-level localization from beacon RSSI reports.

Beacons relay readings as text lines::

    RSSI <beacon_id> <room_id> <rssi_dbm> <timestamp_ms>

The user is placed in the room whose beacon reports the strongest fresh
signal.
"""

from __future__ import annotations

import logging
import math
import re
import threading
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from .errors import (
    InvalidInputError,
    ParseError,
    RssiRangeError,
    UnknownDeviceError,
    UnknownRecordError,
)

log = logging.getLogger(__name__)

RSSI_MIN_DBM = -120.0
RSSI_MAX_DBM = 0.0
DEFAULT_STALENESS_MS = 2000

REF_POWER_DBM = -40.0
PATH_LOSS_EXPONENT = 2.5
NOISE_SIGMA_DB = 2.0

_TOKEN = re.compile(r"[A-Za-z0-9_]+")
_DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")
_INTEGER = re.compile(r"\d+")


@dataclass(frozen=True)
class BeaconReading:
    beacon_id: str
    room_id: str
    rssi_dbm: float
    timestamp_ms: int

    def __post_init__(self):
        if not math.isfinite(self.rssi_dbm):
            raise InvalidInputError("rssi_dbm must be finite")
        if self.timestamp_ms < 0:
            raise InvalidInputError("timestamp_ms must be >= 0")


@dataclass(frozen=True)
class RoomFix:
    room_id: str | None
    winning_rssi: float
    readings_considered: int
    resolved_at_ms: int


def _format_decimal(x: float) -> str:
    # shortest repr that round-trips, forced into positional notation
    text = format(Decimal(repr(float(x))), "f")
    return text if "." in text else text + ".0"


def format_reading(r: BeaconReading) -> str:
    return f"RSSI {r.beacon_id} {r.room_id} {_format_decimal(r.rssi_dbm)} {r.timestamp_ms}"


def parse_reading(line: str) -> BeaconReading:
    """Parse one protocol line (a trailing newline is tolerated)."""
    if line.endswith("\n"):
        line = line[:-1]
    fields = line.split(" ")
    offsets = []
    pos = 0
    for f in fields:
        offsets.append(len(line[:pos].encode()))
        pos += len(f) + 1

    if fields[0] != "RSSI":
        raise UnknownRecordError(f"unknown record type {fields[0]!r}", 0, line)
    if len(fields) != 5:
        where = offsets[5] if len(fields) > 5 else len(line.encode())
        raise ParseError(f"expected 5 space-separated fields, got {len(fields)}", where, line)
    _, beacon, room, rssi_text, ts_text = fields
    for idx, tok in ((1, beacon), (2, room)):
        if not _TOKEN.fullmatch(tok):
            raise ParseError(f"bad identifier {tok!r}", offsets[idx], line)
    if not _DECIMAL.fullmatch(rssi_text):
        raise ParseError(f"bad rssi value {rssi_text!r}", offsets[3], line)
    if not _INTEGER.fullmatch(ts_text):
        raise ParseError(f"bad timestamp {ts_text!r}", offsets[4], line)
    rssi = float(rssi_text)
    if not (RSSI_MIN_DBM <= rssi <= RSSI_MAX_DBM):
        raise RssiRangeError(f"rssi {rssi} dBm outside [{RSSI_MIN_DBM}, {RSSI_MAX_DBM}]")
    return BeaconReading(beacon, room, rssi, int(ts_text))


def iter_readings(lines):
    """Parse a stream of protocol lines, skipping blank lines and unknown records."""
    for line in lines:
        if not line.strip():
            continue
        try:
            yield parse_reading(line)
        except UnknownRecordError as exc:
            log.warning("skipping line: %s", exc)


def resolve(readings, now_ms: int, staleness_ms: int = DEFAULT_STALENESS_MS) -> RoomFix:
    latest: dict[str, BeaconReading] = {}
    for r in readings:
        age = now_ms - r.timestamp_ms
        if age < 0 or age > staleness_ms:
            continue
        cur = latest.get(r.beacon_id)
        # equal timestamps: keep the stronger report so the result is order-independent
        if cur is None or (r.timestamp_ms, r.rssi_dbm) > (cur.timestamp_ms, cur.rssi_dbm):
            latest[r.beacon_id] = r
    if not latest:
        return RoomFix(None, float("-inf"), 0, now_ms)
    winner = min(latest.values(), key=lambda r: (-r.rssi_dbm, r.beacon_id))
    return RoomFix(winner.room_id, winner.rssi_dbm, len(latest), now_ms)


class ReadingStore:
    """Hand-off buffer between an ingesting task and the resolver."""

    def __init__(self, retention_ms: int = 10 * DEFAULT_STALENESS_MS):
        self._lock = threading.Lock()
        self._readings: list[BeaconReading] = []
        self.retention_ms = retention_ms

    def add(self, reading: BeaconReading) -> None:
        with self._lock:
            self._readings.append(reading)

    def extend(self, readings) -> None:
        with self._lock:
            self._readings.extend(readings)

    def snapshot(self, now_ms: int | None = None) -> tuple[BeaconReading, ...]:
        with self._lock:
            if now_ms is not None:
                cutoff = now_ms - self.retention_ms
                self._readings = [r for r in self._readings if r.timestamp_ms >= cutoff]
                return tuple(r for r in self._readings if r.timestamp_ms <= now_ms)
            return tuple(self._readings)

    def resolve(self, now_ms: int, staleness_ms: int = DEFAULT_STALENESS_MS) -> RoomFix:
        return resolve(self.snapshot(now_ms), now_ms, staleness_ms)


def simulate_rssi(distance_m: float, rng=None, noise_db: float = NOISE_SIGMA_DB) -> float:
    """Log-distance path loss with Gaussian shadowing; ``noise_db=0`` is noise-free.

    ``rng`` may be a seed or a ``numpy.random.Generator``.
    """
    if not distance_m > 0:
        raise InvalidInputError(f"distance must be positive, got {distance_m}")
    rssi = REF_POWER_DBM - 10.0 * PATH_LOSS_EXPONENT * math.log10(distance_m)
    if noise_db > 0:
        rssi += noise_db * np.random.default_rng(rng).standard_normal()
    return float(rssi)


def device_for(room_id: str, class_id: int, registry) -> str:
    """Device addressed by stimulus class ``class_id`` inside ``room_id``."""
    try:
        return registry.devices[(room_id, class_id)].device_id
    except KeyError:
        raise UnknownDeviceError(f"no device for room {room_id!r}, class {class_id}") from None
