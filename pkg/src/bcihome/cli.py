"""Command-line entry point: ``bcihome <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or file error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import blink, dsp, localization, session, ssvep, synth
from .config import SessionConfig, load_config, load_scenario
from .errors import InvalidInputError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("bcihome")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _freq_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated frequency list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty frequency list")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bcihome", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, freqs=True):
        sp.add_argument("--config", type=Path, help="session config (TOML)")
        if freqs:
            sp.add_argument("--freqs", type=_freq_list, help="target frequencies, e.g. 6,8.2")
            sp.add_argument("--c", type=float, dest="c", help="SSVEP threshold sensitivity")
        sp.add_argument("--out", type=Path, help="write the report here instead of stdout")

    sp = sub.add_parser("simulate", help="run seeded trials and write a JSON metrics report")
    common(sp)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--c-prime", type=float, dest="c_prime")
    sp.add_argument("--idle-fraction", type=float, dest="idle_fraction")
    sp.add_argument("--jobs", type=int, default=None)

    sp = sub.add_parser("detect", help="SSVEP decisions over a signal file")
    common(sp)
    sp.add_argument("signal", type=Path)
    sp.add_argument("--stride", type=float, default=0.5)

    sp = sub.add_parser("blinks", help="blink detection on a signal file")
    common(sp, freqs=False)
    sp.add_argument("signal", type=Path)
    sp.add_argument("--c-prime", type=float, dest="c_prime")
    sp.add_argument("--window-start", type=float, default=None,
                    help="confirmation window start (s); default: file start")

    sp = sub.add_parser("spectrum", help="per-class band powers of a signal file")
    common(sp)
    sp.add_argument("signal", type=Path)
    sp.add_argument("--window", type=float, default=ssvep.SCORE_WINDOW_S,
                    help="trailing window length in seconds")

    sp = sub.add_parser("locate", help="resolve the room from RSSI protocol lines")
    sp.add_argument("readings", type=Path)
    sp.add_argument("--now", type=int, default=None, help="resolution time (ms); default: newest")
    sp.add_argument("--staleness", type=int, default=localization.DEFAULT_STALENESS_MS)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("generate", help="write synthetic channels from a scenario file")
    sp.add_argument("scenario", type=Path)
    sp.add_argument("--config", type=Path)
    sp.add_argument("--ssvep-out", type=Path, dest="ssvep_out")
    sp.add_argument("--blink-out", type=Path, dest="blink_out")
    sp.add_argument("--beacons-out", type=Path, dest="beacons_out")
    sp.add_argument("--feedback", type=float, default=None,
                    help="place feedback-relative blinks at this time (s)")
    return p


def _session_config(args) -> SessionConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else SessionConfig()
    table = cfg.table
    freqs = getattr(args, "freqs", None)
    c = getattr(args, "c", None)
    if freqs is not None or c is not None:
        entries = ([(i + 1, f) for i, f in enumerate(freqs)] if freqs is not None
                   else list(table.entries))
        table = ssvep.validate_frequencies(entries, c if c is not None else table.sensitivity_c)
        labels = {cid: cfg.labels.get(cid, f"class{cid}") for cid in table.class_ids}
        cfg = replace(cfg, table=table, labels=labels)
    if getattr(args, "c_prime", None) is not None:
        cfg = replace(cfg, blink=replace(cfg.blink, sensitivity_c_prime=args.c_prime))
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_simulate(args) -> int:
    cfg = _session_config(args)
    if args.idle_fraction is not None:
        cfg = replace(cfg, idle_fraction=args.idle_fraction)
    n = cfg.trials if args.trials is None else args.trials
    seed = cfg.seed if args.seed is None else args.seed
    if n < 1:
        raise UsageError("--trials must be >= 1")
    outcomes = session.run_session(cfg, n, seed, args.jobs)
    _emit(session.build_report(cfg, outcomes, n, seed), args.out)
    return EXIT_OK


def _decision_doc(d: ssvep.SsvepDecision, table) -> dict:
    return {
        "window_end_s": round(d.window_end, 6),
        "scores": {str(cid): a for cid, a in d.scores},
        "threshold_tau": d.threshold_tau,
        "selected_class": d.selected,
        "selected_freq_hz": table.frequency(d.selected) if d.selected is not None else None,
    }


def cmd_detect(args) -> int:
    cfg = _session_config(args)
    w = dsp.read_signal(args.signal)
    if w.duration < ssvep.THRESHOLD_WINDOW_S:
        raise InvalidInputError(f"{args.signal}: need at least {ssvep.THRESHOLD_WINDOW_S} s of signal")
    decisions = []
    t = ssvep.THRESHOLD_WINDOW_S
    while t <= w.duration + 1e-9:
        d = ssvep.decide(w.tail(ssvep.SCORE_WINDOW_S, t), w.tail(ssvep.THRESHOLD_WINDOW_S, t),
                         cfg.table)
        decisions.append(d)
        t += args.stride
    first = next((d for d in decisions if d.selected is not None), None)
    doc = {
        "file": str(args.signal),
        "frequencies": {str(cid): f for cid, f in cfg.table.entries},
        "first_selection": _decision_doc(first, cfg.table) if first else None,
        "decisions": [_decision_doc(d, cfg.table) for d in decisions],
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_blinks(args) -> int:
    cfg = _session_config(args)
    w = dsp.read_signal(args.signal)
    events = blink.detect_blinks(w, cfg.blink)
    start = w.start_time if args.window_start is None else args.window_start
    doc = {
        "file": str(args.signal),
        "events": [asdict(e) for e in events],
        "count": len(events),
        "confirmed": blink.confirm(events, start, cfg.blink),
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _session_config(args)
    w = dsp.read_signal(args.signal)
    win = w.tail(min(args.window, w.duration))
    spectrum = dsp.power_spectrum(dsp.autocorrelate(win))
    bands = []
    for cid, f in cfg.table.entries:
        fund = dsp.band_power(spectrum, f, ssvep.BAND_HALF_WIDTH_HZ)
        harm = dsp.band_power(spectrum, 2 * f, ssvep.BAND_HALF_WIDTH_HZ)
        bands.append({"class": cid, "freq_hz": f, "fundamental": fund, "harmonic": harm,
                      "score": fund + harm})
    doc = {"file": str(args.signal), "window_s": win.duration,
           "bin_width_hz": spectrum.bin_width, "bands": bands}
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_locate(args) -> int:
    with open(args.readings, encoding="utf-8") as fh:
        readings = list(localization.iter_readings(fh))
    now = args.now if args.now is not None else max((r.timestamp_ms for r in readings), default=0)
    fix = localization.resolve(readings, now, args.staleness)
    doc = {
        "room": fix.room_id,
        "result": "fix" if fix.room_id is not None else "no fix",
        "winning_rssi": fix.winning_rssi if fix.room_id is not None else None,
        "readings_considered": fix.readings_considered,
        "resolved_at_ms": fix.resolved_at_ms,
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = load_config(args.config) if args.config else SessionConfig()
    sc = load_scenario(args.scenario)
    if args.ssvep_out:
        dsp.write_signal(args.ssvep_out, synth.generate_ssvep_channel(sc, cfg.table))
    if args.blink_out:
        dsp.write_signal(args.blink_out, synth.generate_blink_channel(sc, args.feedback))
    if args.beacons_out:
        lines = synth.generate_beacon_stream(sc, cfg.beacon_interval_ms)
        args.beacons_out.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "detect": cmd_detect,
    "blinks": cmd_blinks,
    "spectrum": cmd_spectrum,
    "locate": cmd_locate,
    "generate": cmd_generate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bcihome: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        name = exc.filename if exc.filename is not None else ""
        print(f"bcihome: cannot access {name}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, KeyError, TypeError) as exc:
        print(f"bcihome: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
