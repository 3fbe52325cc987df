"""Regenerate the squeezing curves and switch-time sweeps for N = 100 and 600.

Writes CSVs under results/ (created next to this script's parent directory
unless an output directory is given as the only argument).  chi is set to
1/N throughout so the dimensionless clock N chi t equals t.
"""

import json
import os
import sys
import time

from spinsqueeze import (
    best_squeezing,
    build_schedule,
    run_protocol,
    sweep_switch_time,
)
from spinsqueeze.cli import write_curve_csv, write_json, write_sweep_csv

T_MAX = 12.0
T_CYCLE = 0.04

RUNS = {
    "PlainOAT": {},
    "OptimalOAT": {},
    "EmulatedTACT": {"t_cycle": T_CYCLE},
    "Combined": {"t_cycle": T_CYCLE},
}

SWITCH_FOR_CURVE = {100: 1.5, 600: 3.0}
SWEEP_GRIDS = {100: (1.5, 2.0, 2.5), 600: (2.5, 3.0, 3.5)}


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "results"
    )
    os.makedirs(out_dir, exist_ok=True)
    summary = {}

    for n in (100, 600):
        chi = 1.0 / n
        for label, kwargs in RUNS.items():
            kwargs = dict(kwargs)
            if label == "Combined":
                kwargs["t_switch"] = SWITCH_FOR_CURVE[n]
            start = time.perf_counter()
            series, final = run_protocol(
                build_schedule(label, n, chi, T_MAX, **kwargs)
            )
            elapsed = time.perf_counter() - start
            path = os.path.join(out_dir, f"curve_{label.lower()}_n{n}.csv")
            write_curve_csv(path, series)
            best = best_squeezing(series)
            summary[f"{label}_n{n}"] = {
                "best_xi2_dB": best.xi2_db,
                "best_Nchi_t": best.nchi_t,
                "final_norm": final.norm(),
            }
            print(
                f"{label:13s} N={n:4d}  best {best.xi2_db:8.3f} dB "
                f"at N chi t = {best.nchi_t:7.3f}   ({elapsed:.1f}s)  -> {path}"
            )

        rows = sweep_switch_time(
            n, chi, T_MAX, T_CYCLE, SWEEP_GRIDS[n], sample_spacing=0.01
        )
        path = os.path.join(out_dir, f"sweep_combined_n{n}.csv")
        write_sweep_csv(path, rows)
        for t_switch, best in rows:
            print(
                f"  switch {t_switch:4.2f}       best {best.xi2_db:8.3f} dB "
                f"at N chi t = {best.nchi_t:7.3f}"
            )
        summary[f"sweep_n{n}"] = [
            {"Nchi_t_switch": ts, "best_xi2_dB": b.xi2_db, "best_Nchi_t": b.nchi_t}
            for ts, b in rows
        ]

    write_json(os.path.join(out_dir, "curves_summary.json"), summary)
    print(f"summary -> {os.path.join(out_dir, 'curves_summary.json')}")


if __name__ == "__main__":
    main()
