"""Home-automation state machine: select, pause the LED, wait for blinks, toggle.

A :class:`Controller` owns its :class:`HomeModel` and phase; it is not
thread-safe. Concurrent producers should push events onto a queue and let
the owner call :meth:`Controller.drain`.
"""

from __future__ import annotations

import json
import logging
import queue
from dataclasses import dataclass, field

from .errors import InvalidInputError
from .localization import RoomFix, device_for
from .ssvep import SsvepDecision, StimulusTable

log = logging.getLogger(__name__)

CONFIRM_WINDOW_S = 4.0


@dataclass
class Device:
    device_id: str
    power_on: bool = False

    @property
    def power_state(self) -> str:
        return "on" if self.power_on else "off"


@dataclass
class LedCluster:
    frequency_hz: float
    flickering: bool = True


@dataclass
class HomeModel:
    rooms: tuple[str, ...]
    class_labels: dict[int, str]
    devices: dict[tuple[str, int], Device]
    led_clusters: dict[tuple[str, int], LedCluster]

    @classmethod
    def build(cls, rooms, table: StimulusTable, labels: dict[int, str]) -> HomeModel:
        rooms = tuple(rooms)
        if len(set(rooms)) != len(rooms) or not rooms:
            raise InvalidInputError(f"room ids must be unique and non-empty: {rooms}")
        missing = set(table.class_ids) - set(labels)
        if missing:
            raise InvalidInputError(f"no label for classes {sorted(missing)}")
        devices, leds = {}, {}
        for room in rooms:
            suffix = room[5:] if room.startswith("room_") else room
            for cid, freq in table.entries:
                devices[(room, cid)] = Device(f"{labels[cid]}_{suffix}")
                leds[(room, cid)] = LedCluster(freq)
        ids = [d.device_id for d in devices.values()]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("device ids collide; use distinct room ids and labels")
        return cls(rooms, {cid: labels[cid] for cid in table.class_ids}, devices, leds)

    @property
    def device_count(self) -> int:
        return len(self.devices)

    def device(self, device_id: str) -> Device:
        for d in self.devices.values():
            if d.device_id == device_id:
                return d
        raise KeyError(device_id)

    def paused_clusters(self) -> list[tuple[str, int]]:
        return [key for key, led in self.led_clusters.items() if not led.flickering]


@dataclass(frozen=True)
class Idle:
    name = "Idle"


@dataclass(frozen=True)
class AwaitConfirm:
    class_id: int
    room_id: str
    feedback_time_s: float
    device_id: str
    name = "AwaitConfirm"

    @property
    def deadline_s(self) -> float:
        return self.feedback_time_s + CONFIRM_WINDOW_S


@dataclass(frozen=True)
class LogRecord:
    time_s: float
    kind: str
    room: str | None = None
    class_id: int | None = None
    device: str | None = None
    detail: str = ""

    def to_line(self) -> str:
        return json.dumps(
            {
                "time_s": round(self.time_s, 6),
                "kind": self.kind,
                "room": self.room,
                "class": self.class_id,
                "device": self.device,
                "detail": self.detail,
            },
            sort_keys=False,
        )


@dataclass
class Controller:
    home: HomeModel
    confirm_window_s: float = CONFIRM_WINDOW_S
    phase: Idle | AwaitConfirm = field(default_factory=Idle)
    log: list[LogRecord] = field(default_factory=list)

    def _record(self, *args, **kwargs) -> LogRecord:
        rec = LogRecord(*args, **kwargs)
        self.log.append(rec)
        return rec

    def _deadline(self, phase: AwaitConfirm) -> float:
        return phase.feedback_time_s + self.confirm_window_s

    def _release(self, phase: AwaitConfirm) -> None:
        self.home.led_clusters[(phase.room_id, phase.class_id)].flickering = True
        self.phase = Idle()

    def on_ssvep(self, decision: SsvepDecision, fix: RoomFix):
        now = decision.window_end
        if isinstance(self.phase, AwaitConfirm):
            if decision.selected is not None:
                self._record(now, "select_ignored", class_id=decision.selected,
                             detail="awaiting confirmation")
            return self.phase
        if decision.selected is None:
            return self.phase
        if fix.room_id is None:
            log.warning("selection of class %s at %.3f s without a room fix", decision.selected, now)
            self._record(now, "no_fix", class_id=decision.selected, detail="selection dropped")
            return self.phase
        device = device_for(fix.room_id, decision.selected, self.home)
        self.phase = AwaitConfirm(decision.selected, fix.room_id, now, device)
        self.home.led_clusters[(fix.room_id, decision.selected)].flickering = False
        self._record(now, "select", fix.room_id, decision.selected, device, "flicker paused")
        return self.phase

    def on_blinks(self, confirmed: bool, now_s: float):
        phase = self.phase
        if not isinstance(phase, AwaitConfirm):
            log.warning("blink result at %.3f s while idle; ignored", now_s)
            return phase
        deadline = self._deadline(phase)
        if confirmed and now_s <= deadline:
            dev = self.home.devices[(phase.room_id, phase.class_id)]
            dev.power_on = not dev.power_on
            self._release(phase)
            self._record(now_s, "toggle", phase.room_id, phase.class_id, dev.device_id,
                         dev.power_state)
        elif now_s >= deadline:
            self._release(phase)
            self._record(now_s, "abort", phase.room_id, phase.class_id, phase.device_id,
                         "confirmation window elapsed")
        return self.phase

    def tick(self, now_s: float):
        phase = self.phase
        if isinstance(phase, AwaitConfirm) and now_s > self._deadline(phase):
            self._release(phase)
            self._record(now_s, "abort", phase.room_id, phase.class_id, phase.device_id,
                         "timeout")
        return self.phase

    def dispatch(self, event):
        """Apply one queued event: ``("ssvep", decision, fix)``, ``("blinks", ok, t)`` or ``("tick", t)``."""
        kind, *args = event
        if kind == "ssvep":
            return self.on_ssvep(*args)
        if kind == "blinks":
            return self.on_blinks(*args)
        if kind == "tick":
            return self.tick(*args)
        raise InvalidInputError(f"unknown controller event {kind!r}")

    def drain(self, events: queue.SimpleQueue):
        while True:
            try:
                event = events.get_nowait()
            except queue.Empty:
                return self.phase
            self.dispatch(event)

    def log_lines(self) -> str:
        return "".join(rec.to_line() + "\n" for rec in self.log)
