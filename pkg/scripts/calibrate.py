"""Sweep SSVEP amplitude and decision schedule; write docs/calibration.md.

Usage: python scripts/calibrate.py [--trials N] [--out docs/calibration.md]
"""

import argparse
import time
from dataclasses import replace
from pathlib import Path

from bcihome.config import SessionConfig
from bcihome.session import aggregate, run_session

SCHEDULES = [(0.5, 0.5), (1.0, 1.0), (0.5, 1.0), (0.5, 1.5), (0.5, 2.0)]
AMPLITUDES = [1.0, 1.5, 2.0, 3.0]
IDLE_SEEDS = (101, 102, 103)


def sweep(n_trials: int, jobs: int):
    base = SessionConfig()
    rows = []
    for stride, timeout in SCHEDULES:
        cfg = replace(base, stride_s=stride, selection_timeout_s=timeout)
        idle = [aggregate(run_session(replace(cfg, idle_fraction=1.0), n_trials, s, jobs))
                .false_selection_pct for s in IDLE_SEEDS]
        for amp in AMPLITUDES:
            c = replace(cfg, template=replace(cfg.template, ssvep_amplitude=amp))
            m = aggregate(run_session(c, n_trials, 7, jobs))
            rows.append((stride, timeout, amp, m.ssvep_accuracy_pct, m.mean_response_time_s,
                         max(idle), sum(idle) / len(idle)))
    return rows


def render(rows, n_trials, elapsed) -> str:
    out = [
        "# Operating-point calibration",
        "",
        f"Generated by `python scripts/calibrate.py --trials {n_trials}` in {elapsed:.0f} s.",
        "Noise RMS is 1, classes are 6.0 and 8.2 Hz, c = 2, c' = 5.",
        "Accuracy uses seed 7 with every trial gazing at a target.",
        f"False selection uses idle trials (no gaze) over seeds {', '.join(map(str, IDLE_SEEDS))};",
        "the worst and mean seeds are shown.",
        "",
        "| stride s | timeout s | amplitude | accuracy % | mean response s | false sel. worst % | false sel. mean % |",
        "|---|---|---|---|---|---|---|",
    ]
    for stride, timeout, amp, acc, rt, worst, mean in rows:
        rt_txt = f"{rt:.2f}" if rt is not None else "n/a"
        out.append(f"| {stride} | {timeout} | {amp} | {acc:.1f} | {rt_txt} | {worst:.1f} | {mean:.1f} |")
    out += [
        "",
        "## Chosen operating point",
        "",
        "The default config makes one decision 1.0 s after the cue (stride 1.0 s, timeout 1.0 s)",
        "at amplitude 2 (twice the noise RMS).",
        "Each extra decision window adds its own chance of a false selection on idle input,",
        "so schedules with two or more windows drift toward or past the 5% ceiling.",
        "The threshold window spans 4 s, which doubles the long-window score under steady gaze.",
        "Selection therefore only succeeds while the gaze onset is still inside the 4 s window",
        "but the 2 s window is mostly filled, which a single look at +1.0 s hits reliably.",
        "",
    ]
    return "\n".join(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("docs/calibration.md"))
    args = ap.parse_args()
    t0 = time.perf_counter()
    rows = sweep(args.trials, args.jobs)
    text = render(rows, args.trials, time.perf_counter() - t0)
    args.out.write_text(text, encoding="utf-8")
    print(text)


if __name__ == "__main__":
    main()
