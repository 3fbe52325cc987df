"""Export Q-function snapshots of the four protocols as CSV grids and PGM maps.

All snapshots use N = 100 with chi = 1/N.  The times are chosen where each
protocol's phase-space picture is most distinctive: the driven protocol near
its optimum, plain twisting far past it (wrapped S shape), and the pulsed
protocols near their respective optima.  PGMs land in docs/, CSVs in
results/.
"""

import os
import sys

from spinsqueeze import build_schedule, q_function, run_protocol, sphere_integral
from spinsqueeze.cli import write_pgm, write_qfunc_csv

N = 100
SNAPSHOTS = [
    ("oat-optimal", "OptimalOAT", 4.5, {}),
    ("plain-oat", "PlainOAT", 16.0, {}),
    ("tact-emulation", "EmulatedTACT", 10.0, {"t_cycle": 0.04}),
    ("combined", "Combined", 6.7, {"t_cycle": 0.04, "t_switch": 1.5}),
]


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    results = sys.argv[1] if len(sys.argv) > 1 else os.path.join(root, "results")
    docs = os.path.join(root, "docs")
    os.makedirs(results, exist_ok=True)
    os.makedirs(docs, exist_ok=True)

    chi = 1.0 / N
    for tag, label, t_snap, kwargs in SNAPSHOTS:
        schedule = build_schedule(label, N, chi, t_snap, **kwargs)
        _, final = run_protocol(schedule)
        grid = q_function(final)
        integral = sphere_integral(grid)
        csv_path = os.path.join(results, f"qfunc_{tag}_n{N}.csv")
        pgm_path = os.path.join(docs, f"qfunc_{tag}_n{N}.pgm")
        write_qfunc_csv(csv_path, grid)
        write_pgm(pgm_path, grid)
        print(
            f"{label:13s} at N chi t = {t_snap:5.2f}  peak {grid.values.max():6.3f}  "
            f"integral {integral:.6f}  -> {pgm_path}"
        )


if __name__ == "__main__":
    main()
