"""Command-line interface: run squeezing protocols, sweep switch times, export Q-functions.

All times on the command line are dimensionless N chi t values; chi only
sets the physical clock.  Outputs are plain CSV (12 significant digits, LF
line endings, written atomically), a JSON summary embedding the resolved
configuration for exact reruns, and optionally a binary PGM heatmap of the
Q-function.

Exit status: 0 on success, 2 for configuration or output-path errors,
1 for numerical failures.
"""

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, fields

import numpy as np

from .husimi import q_function, sphere_integral
from .protocols import (
    best_squeezing,
    build_schedule,
    run_protocol,
    sweep_switch_time,
)

CURVE_HEADER = "Nchi_t,xi2,xi2_dB,Vyy,Vzz,Vyz,ellipse_angle_rad,Jx,Jy,Jz"
SWEEP_HEADER = "Nchi_t_switch,best_Nchi_t,best_xi2,best_xi2_dB"
QFUNC_HEADER = "theta_rad,phi_rad,q"

PROTOCOL_NAMES = {
    "plain-oat": "PlainOAT",
    "oat-optimal": "OptimalOAT",
    "tact-emulation": "EmulatedTACT",
    "combined": "Combined",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved options for one invocation; every time is in N chi t units."""

    protocol: str = ""
    n: int = 0
    chi: float = 1.0
    t_max: float = -1.0
    t_cycle: float | None = None
    t_switch: float | None = None
    sample_spacing: float = 0.01
    snapshot: float | None = None
    switch_grid: tuple = ()
    theta_points: int = 181
    phi_points: int = 360
    out_csv: str = ""
    out_summary: str = ""
    out_pgm: str | None = None

    def time_scale(self):
        return self.n * self.chi

    def validate_common(self):
        if self.protocol not in PROTOCOL_NAMES:
            raise ConfigError(
                f"unknown protocol {self.protocol!r}; choose from "
                f"{', '.join(sorted(PROTOCOL_NAMES))}"
            )
        if self.n < 1:
            raise ConfigError(f"--n must be a positive particle count, got {self.n}")
        if not (math.isfinite(self.chi) and self.chi > 0):
            raise ConfigError(f"--chi must be positive and finite, got {self.chi}")
        if not (math.isfinite(self.t_max) and self.t_max >= 0):
            raise ConfigError(f"--t-max must be nonnegative, got {self.t_max}")
        if self.sample_spacing <= 0:
            raise ConfigError(
                f"--sample-spacing must be positive, got {self.sample_spacing}"
            )
        label = PROTOCOL_NAMES[self.protocol]
        if label in ("EmulatedTACT", "Combined"):
            if self.t_cycle is None or self.t_cycle <= 0:
                raise ConfigError(f"{self.protocol} needs a positive --t-cycle")
        if label == "Combined":
            if self.t_switch is None or self.t_switch < 0:
                raise ConfigError("combined needs a nonnegative --t-switch")
            if self.t_switch > self.t_max:
                raise ConfigError(
                    f"--t-switch {self.t_switch} exceeds --t-max {self.t_max}"
                )

    def build(self):
        scale = self.time_scale()
        label = PROTOCOL_NAMES[self.protocol]
        return build_schedule(
            label,
            self.n,
            self.chi,
            self.t_max / scale,
            t_cycle=None if self.t_cycle is None else self.t_cycle / scale,
            t_switch=None if self.t_switch is None else self.t_switch / scale,
            sample_spacing=self.sample_spacing / scale,
        )

    def echo(self):
        """JSON-ready dict that reproduces this run when fed back as --config."""
        d = asdict(self)
        d["switch_grid"] = list(self.switch_grid)
        return d


_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def _format(x):
    return f"{x:.12g}"


def _atomic_write(path, data, binary=False):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    mode = "wb" if binary else "w"
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, mode, **({} if binary else {"newline": "\n"})) as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def write_curve_csv(path, series):
    lines = [CURVE_HEADER]
    for r in series.records:
        lines.append(
            ",".join(
                _format(v)
                for v in (
                    r.nchi_t,
                    r.xi2,
                    r.xi2_db,
                    r.vyy,
                    r.vzz,
                    r.vyz,
                    r.ellipse_angle,
                    r.mean_spin[0],
                    r.mean_spin[1],
                    r.mean_spin[2],
                )
            )
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_sweep_csv(path, rows):
    lines = [SWEEP_HEADER]
    for nchi_switch, best in rows:
        lines.append(
            ",".join(_format(v) for v in (nchi_switch, best.nchi_t, best.xi2, best.xi2_db))
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_qfunc_csv(path, grid):
    lines = [QFUNC_HEADER]
    for i, th in enumerate(grid.theta):
        for j, ph in enumerate(grid.phi):
            lines.append(f"{_format(th)},{_format(ph)},{_format(grid.values[i, j])}")
    _atomic_write(path, "\n".join(lines) + "\n")


def write_pgm(path, grid):
    """8-bit binary PGM, rows from theta = 0 down, columns from phi = 0."""
    peak = grid.values.max()
    scaled = grid.values / peak if peak > 0 else grid.values
    pixels = np.round(255 * scaled).astype(np.uint8)
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    _atomic_write(path, header + pixels.tobytes(), binary=True)


def write_json(path, payload):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _report_dict(r):
    return {
        "Nchi_t": r.nchi_t,
        "xi2": r.xi2,
        "xi2_dB": r.xi2_db,
        "ellipse_angle_rad": r.ellipse_angle,
        "Vyy": r.vyy,
        "Vzz": r.vzz,
        "Vyz": r.vyz,
        "mean_spin": list(r.mean_spin),
    }


def _check_series_finite(series):
    arr = np.array([[r.xi2, r.vyy, r.vzz, r.vyz] for r in series.records])
    if not np.all(np.isfinite(arr)):
        raise ArithmeticError("non-finite values in computed series")


def cmd_run(config):
    config.validate_common()
    schedule = config.build()
    series, final = run_protocol(schedule)
    _check_series_finite(series)
    write_curve_csv(config.out_csv, series)
    best = best_squeezing(series)
    summary = {
        "command": "run",
        "config": config.echo(),
        "samples": len(series.records),
        "best": _report_dict(best),
        "final_norm": final.norm(),
    }
    if schedule.t_switch is not None:
        summary["t_switch_used"] = schedule.t_switch * config.time_scale()
    write_json(config.out_summary, summary)
    return 0


def cmd_sweep(config):
    if config.protocol == "":
        config.protocol = "combined"
    if config.protocol != "combined":
        raise ConfigError("sweep only applies to the combined protocol")
    if not config.switch_grid:
        raise ConfigError("sweep needs a nonempty --switch-grid")
    config.t_switch = min(config.switch_grid)
    config.validate_common()
    if max(config.switch_grid) > config.t_max:
        raise ConfigError("switch grid entries must not exceed --t-max")
    scale = config.time_scale()
    rows = sweep_switch_time(
        config.n,
        config.chi,
        config.t_max / scale,
        config.t_cycle / scale,
        [s / scale for s in config.switch_grid],
        sample_spacing=config.sample_spacing / scale,
    )
    rows_nchi = [(ts * scale, best) for ts, best in rows]
    for _, best in rows_nchi:
        if not math.isfinite(best.xi2):
            raise ArithmeticError("non-finite sweep result")
    write_sweep_csv(config.out_csv, rows_nchi)
    overall = min(rows_nchi, key=lambda row: row[1].xi2)
    summary = {
        "command": "sweep",
        "config": config.echo(),
        "rows": [
            {"Nchi_t_switch": ts, "best": _report_dict(best)} for ts, best in rows_nchi
        ],
        "best_overall": {
            "Nchi_t_switch": overall[0],
            **_report_dict(overall[1]),
        },
    }
    write_json(config.out_summary, summary)
    return 0


def _snap_to_cycles(config):
    """Snapshot time snapped to the cycle grid for pulse-based protocols."""
    snap = config.t_max if config.snapshot is None else config.snapshot
    if snap > config.t_max:
        raise ConfigError(f"--snapshot {snap} exceeds --t-max {config.t_max}")
    label = PROTOCOL_NAMES[config.protocol]
    if label == "EmulatedTACT":
        return round(snap / config.t_cycle) * config.t_cycle
    if label == "Combined":
        if snap > config.t_switch:
            cycles = round((snap - config.t_switch) / config.t_cycle)
            return config.t_switch + cycles * config.t_cycle
    return snap


def cmd_qfunc(config):
    config.validate_common()
    if config.theta_points < 2 or config.phi_points < 1:
        raise ConfigError("Q-function grid needs theta_points >= 2, phi_points >= 1")
    snap = _snap_to_cycles(config)
    overrides = {"t_max": snap, "snapshot": None}
    if PROTOCOL_NAMES[config.protocol] == "Combined" and snap < config.t_switch:
        overrides["t_switch"] = snap  # snapshot inside the rotating stage
    run_cfg = RunConfig(**{**config.echo(), **overrides})
    schedule = run_cfg.build()
    series, final = run_protocol(schedule)
    grid = q_function(final, config.theta_points, config.phi_points)
    integral = sphere_integral(grid)
    if not math.isfinite(integral) or abs(integral - 1.0) > 1e-3:
        raise ArithmeticError(f"Q-function integral {integral} deviates from 1")
    write_qfunc_csv(config.out_csv, grid)
    if config.out_pgm:
        write_pgm(config.out_pgm, grid)
    peak_idx = np.unravel_index(np.argmax(grid.values), grid.values.shape)
    summary = {
        "command": "qfunc",
        "config": config.echo(),
        "snapshot_used": snap,
        "sphere_integral": integral,
        "peak": {
            "theta_rad": float(grid.theta[peak_idx[0]]),
            "phi_rad": float(grid.phi[peak_idx[1]]),
            "q": float(grid.values[peak_idx]),
        },
        "state_metrics": _report_dict(series.records[-1]),
    }
    write_json(config.out_summary, summary)
    return 0


def _parse_switch_grid(text):
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad --switch-grid {text!r}: {exc}") from exc
    if not values:
        raise ConfigError("empty --switch-grid")
    return values


def _load_config_file(path):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = set(payload) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"config {path} has unknown keys: {sorted(unknown)}")
    return payload


_DEFAULT_OUT = {
    "run": {"out_csv": "curve.csv", "out_summary": "summary.json"},
    "sweep": {"out_csv": "sweep.csv", "out_summary": "sweep_summary.json"},
    "qfunc": {"out_csv": "qfunc.csv", "out_summary": "qfunc_summary.json"},
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Spin-squeezing protocol simulator on the Dicke ladder",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with defaults for any option")
        p.add_argument("--protocol", choices=sorted(PROTOCOL_NAMES))
        p.add_argument("--n", type=int, help="particle count")
        p.add_argument("--chi", type=float, help="twisting strength (default 1)")
        p.add_argument("--t-max", type=float, dest="t_max", help="horizon in N chi t")
        p.add_argument("--t-cycle", type=float, dest="t_cycle", help="cycle period in N chi t")
        p.add_argument("--t-switch", type=float, dest="t_switch", help="switch time in N chi t")
        p.add_argument(
            "--sample-spacing",
            type=float,
            dest="sample_spacing",
            help="metric sampling step in N chi t (default 0.01)",
        )
        p.add_argument("--out-csv", dest="out_csv")
        p.add_argument("--out-summary", dest="out_summary")

    run_p = sub.add_parser("run", help="evolve one protocol and write the squeezing curve")
    add_common(run_p)

    sweep_p = sub.add_parser("sweep", help="scan combined-protocol switch times")
    add_common(sweep_p)
    sweep_p.add_argument(
        "--switch-grid",
        dest="switch_grid",
        help="comma-separated switch times in N chi t",
    )

    q_p = sub.add_parser("qfunc", help="evolve to a snapshot and export the Q-function")
    add_common(q_p)
    q_p.add_argument("--snapshot", type=float, help="snapshot time in N chi t (default t-max)")
    q_p.add_argument("--theta-points", type=int, dest="theta_points")
    q_p.add_argument("--phi-points", type=int, dest="phi_points")
    q_p.add_argument("--out-pgm", dest="out_pgm", help="grayscale heatmap output path")
    return parser


def _resolve_config(args):
    merged = {}
    if args.config:
        merged.update(_load_config_file(args.config))
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    if isinstance(merged.get("switch_grid"), str):
        merged["switch_grid"] = _parse_switch_grid(merged["switch_grid"])
    elif isinstance(merged.get("switch_grid"), list):
        merged["switch_grid"] = tuple(float(x) for x in merged["switch_grid"])
    for key, default in _DEFAULT_OUT[args.command].items():
        merged.setdefault(key, default)
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "qfunc": cmd_qfunc}
    try:
        config = _resolve_config(args)
        return handlers[args.command](config)
    except ValueError as exc:  # ConfigError included; library validation too
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
