"""Trial runner and session metrics."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import blink, ssvep
from .config import SessionConfig
from .controller import AwaitConfirm, Controller, HomeModel
from .errors import InvalidInputError
from .localization import ReadingStore
from .ssvep import StimulusTable
from .synth import (
    Scenario,
    generate_beacon_readings,
    generate_blink_channel,
    generate_ssvep_channel,
)

_EPS = 1e-9


@dataclass(frozen=True)
class TrialOutcome:
    intended_class: int | None
    intended_room: str | None
    selected_class: int | None
    selected_room: str | None
    confirmed: bool
    toggled_device: str | None
    response_time_s: float | None
    blink_attempt: bool = False
    selection_time_s: float | None = None
    seed: int | None = None

    @property
    def selection_correct(self) -> bool:
        return self.intended_class is not None and self.selected_class == self.intended_class


@dataclass(frozen=True)
class SessionMetrics:
    ssvep_accuracy_pct: float | None
    blink_accuracy_pct: float | None
    mean_response_time_s: float | None
    transfer_rate_cmd_per_min: float
    false_selection_pct: float | None = None
    room_accuracy_pct: float | None = None
    n_trials: int = 0
    n_toggles: int = 0


def _labels_for(table: StimulusTable, cfg: SessionConfig) -> dict[int, str]:
    return {cid: cfg.labels.get(cid, f"class{cid}") for cid in table.class_ids}


def run_trial(sc: Scenario, table: StimulusTable, cfg: SessionConfig) -> TrialOutcome:
    """Stream one scenario through detection, localization and the controller."""
    rooms = tuple(cfg.rooms)
    rooms += tuple(dict.fromkeys(b.room_id for b in sc.beacons if b.room_id not in rooms))
    home = HomeModel.build(rooms, table, _labels_for(table, cfg))
    ctl = Controller(home, cfg.blink.confirm_window_s)

    ssvep_ch = generate_ssvep_channel(sc, table)
    store = ReadingStore()
    store.extend(generate_beacon_readings(sc, cfg.beacon_interval_ms))

    cue = sc.cue_s
    if cue < ssvep.THRESHOLD_WINDOW_S:
        raise InvalidInputError("cue must leave a full threshold window of history")
    n_steps = int(math.floor(cfg.selection_timeout_s / cfg.stride_s + _EPS))
    for step in range(1, n_steps + 1):
        t = cue + step * cfg.stride_s
        if t > ssvep_ch.end_time + _EPS:
            break
        w4 = ssvep_ch.tail(ssvep.THRESHOLD_WINDOW_S, t)
        w2 = ssvep_ch.tail(ssvep.SCORE_WINDOW_S, t)
        decision = ssvep.decide(w2, w4, table)
        fix = store.resolve(int(round(t * 1000)), cfg.staleness_ms)
        if isinstance(ctl.on_ssvep(decision, fix), AwaitConfirm):
            break

    phase = ctl.phase
    if not isinstance(phase, AwaitConfirm):
        return TrialOutcome(sc.intended_class(), sc.user_room, None, None, False, None, None,
                            seed=sc.rng_seed)

    feedback = phase.feedback_time_s
    close = feedback + cfg.blink.confirm_window_s
    blink_ch = generate_blink_channel(sc, feedback_s=feedback)
    start = max(blink_ch.start_time, feedback - cfg.blink_context_s)
    raw = blink_ch.segment(start, min(close, blink_ch.end_time))
    events = blink.detect_blinks(raw, cfg.blink)
    confirmed = blink.confirm(events, feedback, cfg.blink)
    # the window is evaluated once, when it closes
    ctl.on_blinks(confirmed, close)

    toggled = None
    response = None
    if confirmed:
        toggled = phase.device_id
        onset = sc.stimulus_onset if sc.stimulus_onset is not None else cue
        response = close - onset
    return TrialOutcome(
        intended_class=sc.intended_class(),
        intended_room=sc.user_room,
        selected_class=phase.class_id,
        selected_room=phase.room_id,
        confirmed=confirmed,
        toggled_device=toggled,
        response_time_s=response,
        blink_attempt=bool(sc.feedback_blinks),
        selection_time_s=feedback,
        seed=sc.rng_seed,
    )


def _pct(num: int, den: int) -> float | None:
    return 100.0 * num / den if den else None


def aggregate(outcomes) -> SessionMetrics:
    outcomes = list(outcomes)
    if not outcomes:
        raise InvalidInputError("no trial outcomes to aggregate")
    stim = [o for o in outcomes if o.intended_class is not None]
    idle = [o for o in outcomes if o.intended_class is None]
    attempts = [o for o in outcomes if o.selected_class is not None and o.blink_attempt]
    toggled = [o for o in outcomes if o.response_time_s is not None]
    located = [o for o in outcomes if o.selected_room is not None and o.intended_room is not None]

    mean_rt = sum(o.response_time_s for o in toggled) / len(toggled) if toggled else None
    return SessionMetrics(
        ssvep_accuracy_pct=_pct(sum(o.selection_correct for o in stim), len(stim)),
        blink_accuracy_pct=_pct(sum(o.confirmed for o in attempts), len(attempts)),
        mean_response_time_s=mean_rt,
        transfer_rate_cmd_per_min=60.0 / mean_rt if mean_rt else 0.0,
        false_selection_pct=_pct(sum(o.selected_class is not None for o in idle), len(idle)),
        room_accuracy_pct=_pct(sum(o.selected_room == o.intended_room for o in located),
                               len(located)),
        n_trials=len(outcomes),
        n_toggles=len(toggled),
    )


def trial_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def plan_trials(cfg: SessionConfig, n_trials: int, seed: int) -> list[Scenario]:
    """Deterministic trial list cycling over every (room, class) pair."""
    combos = [(room, cid) for cid in cfg.table.class_ids for room in cfg.rooms]
    picker = np.random.default_rng([0, seed])
    idle_mask = picker.random(n_trials) < cfg.idle_fraction
    plans = []
    for i in range(n_trials):
        room, cid = combos[i % len(combos)]
        plans.append(cfg.template.scenario(
            room, None if idle_mask[i] else cid, trial_seed(seed, i), cfg.geometry))
    return plans


def _run_one(args):
    sc, cfg = args
    return run_trial(sc, cfg.table, cfg)


def run_session(cfg: SessionConfig, n_trials: int | None = None, seed: int | None = None,
                jobs: int | None = None) -> list[TrialOutcome]:
    n_trials = cfg.trials if n_trials is None else n_trials
    seed = cfg.seed if seed is None else seed
    jobs = cfg.jobs if jobs is None else jobs
    plans = plan_trials(cfg, n_trials, seed)
    if jobs <= 1:
        return [run_trial(sc, cfg.table, cfg) for sc in plans]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [(sc, cfg) for sc in plans], chunksize=16))


def _clean(value):
    if isinstance(value, float):
        return round(value, 9)
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def build_report(cfg: SessionConfig, outcomes, n_trials: int, seed: int) -> str:
    metrics = aggregate(outcomes)
    doc = {
        "config": cfg.as_dict(),
        "run": {"trials": n_trials, "seed": seed},
        "metrics": asdict(metrics),
        "trials": [asdict(o) for o in outcomes],
    }
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
