"""Session configuration and scenario files (TOML).

Session config layout, every table optional::

    [stimulus]
    c = 2.0
    classes = [{id = 1, label = "lamp", freq = 6.0}, {id = 2, label = "fan", freq = 8.2}]

    [blink]
    c_prime = 5.0
    min_width_ms = 200.0
    confirm_count = 3
    confirm_window_s = 4.0
    min_gap_ms = 100.0
    context_s = 2.0

    [home]
    rooms = ["room_a", "room_b"]
    beacons = [{id = "b_a", room = "room_a"}, {id = "b_b", room = "room_b"}]
    near_m = 2.0
    far_m = 6.0
    interval_ms = 500
    staleness_ms = 2000
    rssi_noise_db = 2.0

    [signal]
    fs = 512
    ssvep_amplitude = 2.0
    noise_rms = 1.0
    harmonic_ratio = 0.5

    [protocol]
    preroll_s = 4.0
    gaze_s = 3.0
    stride_s = 1.0
    selection_timeout_s = 1.0
    feedback_blinks = [{offset_s = 0.5, width_ms = 250.0}, ...]

    [session]
    trials = 500
    seed = 0
    idle_fraction = 0.0
    jobs = 1

Scenario files describe a single trial::

    duration_s = 12.0
    fs = 512
    cue_s = 4.0
    ssvep_amplitude = 2.0
    harmonic_ratio = 0.5
    noise_rms = 1.0
    rng_seed = 7
    rssi_noise_db = 2.0
    user_room = "room_a"

    [[beacon]]
    id = "b_a"
    room = "room_a"
    distance_m = 2.0

    [[gaze]]
    start_s = 4.0
    end_s = 7.0
    class = 1          # omit for "looking at nothing"

    [[blink]]          # fixed-time blinks
    onset_s = 1.0
    width_ms = 150.0

    [[feedback_blink]] # relative to the feedback instant
    offset_s = 0.5
    width_ms = 250.0
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .blink import BlinkConfig
from .errors import InvalidInputError
from .ssvep import StimulusTable, validate_frequencies
from .synth import Beacon, Geometry, Scenario, ScenarioTemplate

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_LABELS = {1: "lamp", 2: "fan"}


@dataclass(frozen=True)
class SessionConfig:
    table: StimulusTable = field(
        default_factory=lambda: validate_frequencies([(1, 6.0), (2, 8.2)], 2.0)
    )
    labels: dict[int, str] = field(default_factory=lambda: dict(DEFAULT_LABELS))
    blink: BlinkConfig = field(default_factory=BlinkConfig)
    blink_context_s: float = 2.0
    rooms: tuple[str, ...] = ("room_a", "room_b")
    geometry: Geometry = field(default_factory=Geometry)
    beacon_interval_ms: int = 500
    staleness_ms: int = 2000
    template: ScenarioTemplate = field(default_factory=ScenarioTemplate)
    stride_s: float = 1.0
    selection_timeout_s: float = 1.0
    trials: int = 500
    seed: int = 0
    idle_fraction: float = 0.0
    jobs: int = 1

    def __post_init__(self):
        if self.stride_s <= 0 or self.selection_timeout_s < self.stride_s:
            raise InvalidInputError("need 0 < stride_s <= selection_timeout_s")
        if not 0.0 <= self.idle_fraction <= 1.0:
            raise InvalidInputError("idle_fraction must lie in [0, 1]")
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        rooms_with_beacon = {room for _, room in self.geometry.beacons}
        if not set(self.rooms) <= rooms_with_beacon:
            raise InvalidInputError("every room needs a beacon")
        if self.template.preroll_s < 4.0:
            raise InvalidInputError("preroll_s must cover the 4 s threshold window")

    def as_dict(self) -> dict:
        return {
            "stimulus": {
                "c": self.table.sensitivity_c,
                "classes": [
                    {"id": cid, "label": self.labels[cid], "freq": f}
                    for cid, f in self.table.entries
                ],
            },
            "blink": {**asdict(self.blink), "context_s": self.blink_context_s},
            "home": {
                "rooms": list(self.rooms),
                "beacons": [{"id": b, "room": r} for b, r in self.geometry.beacons],
                "near_m": self.geometry.near_m,
                "far_m": self.geometry.far_m,
                "interval_ms": self.beacon_interval_ms,
                "staleness_ms": self.staleness_ms,
                "rssi_noise_db": self.template.rssi_noise_db,
            },
            "signal": {
                "fs": self.template.fs,
                "ssvep_amplitude": self.template.ssvep_amplitude,
                "noise_rms": self.template.noise_rms,
                "harmonic_ratio": self.template.harmonic_ratio,
            },
            "protocol": {
                "preroll_s": self.template.preroll_s,
                "gaze_s": self.template.gaze_s,
                "stride_s": self.stride_s,
                "selection_timeout_s": self.selection_timeout_s,
                "feedback_blinks": [
                    {"offset_s": o, "width_ms": w} for o, w in self.template.feedback_blinks
                ],
            },
            "session": {
                "trials": self.trials,
                "seed": self.seed,
                "idle_fraction": self.idle_fraction,
            },
        }


def _pairs(items, a, b):
    return tuple((float(it[a]), float(it[b])) for it in items)


def config_from_dict(data: dict) -> SessionConfig:
    stim = data.get("stimulus", {})
    classes = stim.get("classes")
    if classes is None:
        entries, labels = [(1, 6.0), (2, 8.2)], dict(DEFAULT_LABELS)
    else:
        entries = [(int(c["id"]), float(c["freq"])) for c in classes]
        labels = {int(c["id"]): str(c.get("label", f"class{c['id']}")) for c in classes}
    table = validate_frequencies(entries, float(stim.get("c", 2.0)))

    bl = dict(data.get("blink", {}))
    context_s = float(bl.pop("context_s", 2.0))
    if "c_prime" in bl:
        bl["sensitivity_c_prime"] = bl.pop("c_prime")
    blink = BlinkConfig(**bl)

    home = data.get("home", {})
    rooms = tuple(home.get("rooms", ("room_a", "room_b")))
    beacons = home.get("beacons")
    if beacons is None:
        beacons = [{"id": f"b_{r[5:] if r.startswith('room_') else r}", "room": r} for r in rooms]
    geometry = Geometry(
        tuple((str(b["id"]), str(b["room"])) for b in beacons),
        float(home.get("near_m", 2.0)),
        float(home.get("far_m", 6.0)),
    )

    sig = data.get("signal", {})
    proto = data.get("protocol", {})
    tkw = {}
    if "feedback_blinks" in proto:
        tkw["feedback_blinks"] = _pairs(proto["feedback_blinks"], "offset_s", "width_ms")
    template = ScenarioTemplate(
        fs=int(sig.get("fs", 512)),
        preroll_s=float(proto.get("preroll_s", 4.0)),
        gaze_s=float(proto.get("gaze_s", 3.0)),
        ssvep_amplitude=float(sig.get("ssvep_amplitude", 2.0)),
        harmonic_ratio=float(sig.get("harmonic_ratio", 0.5)),
        noise_rms=float(sig.get("noise_rms", 1.0)),
        rssi_noise_db=float(home.get("rssi_noise_db", 2.0)),
        **tkw,
    )
    sess = data.get("session", {})
    return SessionConfig(
        table=table,
        labels=labels,
        blink=blink,
        blink_context_s=context_s,
        rooms=rooms,
        geometry=geometry,
        beacon_interval_ms=int(home.get("interval_ms", 500)),
        staleness_ms=int(home.get("staleness_ms", 2000)),
        template=template,
        stride_s=float(proto.get("stride_s", 1.0)),
        selection_timeout_s=float(proto.get("selection_timeout_s", 1.0)),
        trials=int(sess.get("trials", 500)),
        seed=int(sess.get("seed", 0)),
        idle_fraction=float(sess.get("idle_fraction", 0.0)),
        jobs=int(sess.get("jobs", 1)),
    )


def load_config(path) -> SessionConfig:
    with open(path, "rb") as fh:
        return config_from_dict(tomllib.load(fh))


def scenario_from_dict(data: dict) -> Scenario:
    gaze = tuple(
        (float(g["start_s"]), float(g["end_s"]), int(g["class"]) if "class" in g else None)
        for g in data.get("gaze", [])
    )
    beacons = tuple(
        Beacon(str(b["id"]), str(b["room"]), float(b["distance_m"])) for b in data.get("beacon", [])
    )
    return Scenario(
        duration_s=float(data["duration_s"]),
        fs=int(data.get("fs", 512)),
        gaze_script=gaze,
        blink_script=_pairs(data.get("blink", []), "onset_s", "width_ms"),
        feedback_blinks=_pairs(data.get("feedback_blink", []), "offset_s", "width_ms"),
        ssvep_amplitude=float(data.get("ssvep_amplitude", 2.0)),
        harmonic_ratio=float(data.get("harmonic_ratio", 0.5)),
        noise_rms=float(data.get("noise_rms", 1.0)),
        rng_seed=int(data.get("rng_seed", 0)),
        user_room=data.get("user_room"),
        beacons=beacons,
        rssi_noise_db=float(data.get("rssi_noise_db", 2.0)),
        cue_s=float(data.get("cue_s", 4.0)),
    )


def load_scenario(path) -> Scenario:
    with open(Path(path), "rb") as fh:
        return scenario_from_dict(tomllib.load(fh))
