"""Squeezing protocols, schedules, and metrics.

Four protocols over N spin-1/2 particles, all starting (by default) from the
coherent state along +x:

- PlainOAT: free evolution under chi Jz^2.
- OptimalOAT: evolution under (N chi / 2) Jx + chi Jz^2; the drive keeps the
  squeezing ellipse at its optimal orientation so xi^2 initially decays as
  exp(-N chi t).
- EmulatedTACT: repeated cycles [free 2/3 t_cycle, pulse exp(+i pi/2 Jy),
  free 1/3 t_cycle, pulse exp(-i pi/2 Jy)], which time-averages to
  counter-twisting at 2/3 the one-axis rate.
- Combined: OptimalOAT until t_switch, then EmulatedTACT cycles.

Times inside schedules are physical; reports also carry the dimensionless
clock N chi t.  Cycle protocols are sampled only at cycle ends, where the
state is back at the equator; mid-cycle it sits at a pole and the transverse
(y, z) variance plane does not describe the squeezing.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dicke import (
    CollectiveOperators,
    DickeState,
    FrameRotation,
    frame_rotation_for,
    make_coherent_state,
)
from .propagators import (
    build_spectral_cache,
    evolve_oat,
    evolve_rotating_oat,
    rotate_state,
)

PROTOCOL_LABELS = ("PlainOAT", "OptimalOAT", "EmulatedTACT", "Combined")

#: default metric sampling step on the N chi t clock
DEFAULT_SAMPLE_SPACING = 0.01

_CYCLE_PROTOCOLS = ("EmulatedTACT", "Combined")


@dataclass(frozen=True)
class ProtocolSegment:
    """One stage of a schedule.

    kind is 'free_oat' (chi Jz^2 for duration), 'rotating_oat'
    (omega_x Jx + chi Jz^2 for duration), or 'pulse' (instantaneous rotation,
    duration 0).  record_end marks segments whose endpoint is a metric
    sample; interior samples are taken only inside continuous segments.
    """

    kind: str
    duration: float
    chi: float = 0.0
    omega_x: float = 0.0
    axis: str = ""
    angle: float = 0.0
    record_end: bool = False


@dataclass(frozen=True)
class ProtocolSchedule:
    label: str
    n_particles: int
    chi: float
    segments: tuple
    sample_times: tuple
    t_cycle: float | None = None
    t_switch: float | None = None

    @property
    def t_total(self):
        return sum(seg.duration for seg in self.segments)


@dataclass(frozen=True)
class SqueezingReport:
    """Squeezing metrics of one state, measured in its mean-spin frame.

    vyy, vzz, vyz are the transverse variance matrix entries with the mean
    spin rotated to +x; v_minus is its smaller eigenvalue, xi2 = 4 v_minus/N.
    ellipse_angle is the direction of the minimal-variance axis measured
    from +z toward -y, folded into (-pi/2, pi/2], so early one-axis
    twisting gives +pi/4.  mean_spin is the lab-frame mean.
    """

    t: float
    nchi_t: float
    vyy: float
    vzz: float
    vyz: float
    v_minus: float
    xi2: float
    xi2_db: float
    ellipse_angle: float
    mean_spin: tuple

    @property
    def variance_matrix(self):
        return np.array([[self.vyy, self.vyz], [self.vyz, self.vzz]])


@dataclass(frozen=True)
class TimeSeries:
    label: str
    n_particles: int
    chi: float
    records: tuple
    t_cycle: float | None = None
    t_switch: float | None = None

    @property
    def nchi_times(self):
        return np.array([r.nchi_t for r in self.records])

    @property
    def xi2(self):
        return np.array([r.xi2 for r in self.records])

    @property
    def xi2_db(self):
        return np.array([r.xi2_db for r in self.records])


def _moments(state):
    """Mean vector and symmetrised second-moment tensor M_ab = <{Ja,Jb}/2>."""
    ops = CollectiveOperators.for_particles(state.n_particles)
    psi = state.amplitudes
    applied = [ops.apply(a, psi) for a in ("x", "y", "z")]
    mean = np.array([np.real(np.vdot(psi, v)) for v in applied])
    second = np.empty((3, 3))
    for a in range(3):
        for b in range(a, 3):
            second[a, b] = second[b, a] = np.real(np.vdot(applied[a], applied[b]))
    return mean, second


def _frame_matrix(frame):
    ca, sa = np.cos(frame.z_angle), np.sin(frame.z_angle)
    cb, sb = np.cos(frame.y_angle), np.sin(frame.y_angle)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    return ry @ rz


def variance_matrix(state, in_mean_spin_frame=True):
    """Transverse 2x2 variance matrix over (y, z); returns (matrix, frame).

    With in_mean_spin_frame the central second-moment tensor is rotated by
    the mean-spin frame (mean spin to +x) before the (y, z) block is taken;
    the rotation acts on the 3x3 tensor, the state itself is never rotated.
    Otherwise the lab-frame (y, z) block is returned with frame None.
    """
    mean, second = _moments(state)
    central = second - np.outer(mean, mean)
    if not in_mean_spin_frame:
        return central[1:, 1:].copy(), None
    frame = frame_rotation_for(mean)
    rot = _frame_matrix(frame)
    central_f = rot @ central @ rot.T
    return central_f[1:, 1:].copy(), frame


def _transverse_eigen(v):
    """Eigenvalues and minimal-variance direction of a symmetric 2x2 matrix."""
    a, c, b = v[0, 0], v[0, 1], v[1, 1]
    half_tr = (a + b) / 2
    disc = math.hypot((a - b) / 2, c)
    v_minus = half_tr - disc
    v_plus = half_tr + disc
    w1 = np.array([c, v_minus - a])
    w2 = np.array([v_minus - b, c])
    w = w1 if np.linalg.norm(w1) >= np.linalg.norm(w2) else w2
    nw = np.linalg.norm(w)
    if nw == 0.0:  # isotropic: direction is arbitrary, pick +z
        w = np.array([0.0, 1.0])
        nw = 1.0
    return v_minus, v_plus, w / nw


def _fold_half_circle(angle):
    while angle > np.pi / 2:
        angle -= np.pi
    while angle <= -np.pi / 2:
        angle += np.pi
    return angle


def squeezing_parameter(state, t=0.0, nchi_t=0.0):
    """SqueezingReport of a state: xi^2 = 4 V_minus / N and friends."""
    mean, second = _moments(state)
    frame = frame_rotation_for(mean)
    rot = _frame_matrix(frame)
    central_f = rot @ (second - np.outer(mean, mean)) @ rot.T
    v = central_f[1:, 1:]
    v_minus, _, direction = _transverse_eigen(v)
    n = state.n_particles
    xi2 = 4 * v_minus / n
    xi2_db = 10 * np.log10(max(xi2, 1e-300))
    # direction = (vy, vz); angle from +z toward -y
    angle = _fold_half_circle(np.arctan2(-direction[0], direction[1]))
    return SqueezingReport(
        t=float(t),
        nchi_t=float(nchi_t),
        vyy=float(v[0, 0]),
        vzz=float(v[1, 1]),
        vyz=float(v[0, 1]),
        v_minus=float(v_minus),
        xi2=float(xi2),
        xi2_db=float(xi2_db),
        ellipse_angle=float(angle),
        mean_spin=tuple(float(x) for x in mean),
    )


def _cycle_segments(chi, t_cycle, count):
    segs = []
    for _ in range(count):
        segs.append(ProtocolSegment(kind="free_oat", duration=2 * t_cycle / 3, chi=chi))
        segs.append(ProtocolSegment(kind="pulse", duration=0.0, axis="y", angle=-np.pi / 2))
        segs.append(ProtocolSegment(kind="free_oat", duration=t_cycle / 3, chi=chi))
        segs.append(
            ProtocolSegment(
                kind="pulse", duration=0.0, axis="y", angle=np.pi / 2, record_end=True
            )
        )
    return segs


def _grid_times(t_end, spacing):
    """Multiples of spacing in (0, t_end], always ending exactly at t_end."""
    if t_end <= 0:
        return []
    count = int(math.floor(t_end / spacing + 1e-9))
    times = [i * spacing for i in range(1, count + 1)]
    if not times or times[-1] < t_end - 1e-9 * max(t_end, 1.0):
        times.append(t_end)
    else:
        times[-1] = t_end
    return times


def build_schedule(
    label,
    n_particles,
    chi,
    t_max,
    t_cycle=None,
    t_switch=None,
    sample_spacing=None,
):
    """Assemble the segment list and sample times for one protocol run.

    All times are physical.  sample_spacing defaults to 0.01 / (N chi) and
    applies to continuous stretches only; cycle stretches are sampled at
    cycle ends.  For Combined, t_switch is snapped to the sample grid and
    the cycle grid starts exactly there.  Cycle stretches always run a whole
    number of cycles, so the schedule may overshoot t_max by part of a cycle.
    """
    if label not in PROTOCOL_LABELS:
        raise ValueError(f"unknown protocol label {label!r}; use one of {PROTOCOL_LABELS}")
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    if not np.isfinite(chi) or chi < 0:
        raise ValueError(f"chi must be finite and nonnegative, got {chi}")
    if not np.isfinite(t_max) or t_max < 0:
        raise ValueError(f"t_max must be finite and nonnegative, got {t_max}")
    needs_spacing = label in ("PlainOAT", "OptimalOAT", "Combined")
    if sample_spacing is None:
        if needs_spacing and chi == 0:
            raise ValueError("chi = 0 needs an explicit sample_spacing")
        sample_spacing = (
            DEFAULT_SAMPLE_SPACING / (n_particles * chi) if needs_spacing else None
        )
    elif sample_spacing <= 0:
        raise ValueError(f"sample_spacing must be positive, got {sample_spacing}")

    segments = []
    samples = [0.0]

    if label in ("PlainOAT", "OptimalOAT"):
        omega = n_particles * chi / 2 if label == "OptimalOAT" else 0.0
        if t_max > 0:
            kind = "rotating_oat" if label == "OptimalOAT" else "free_oat"
            segments.append(
                ProtocolSegment(
                    kind=kind, duration=t_max, chi=chi, omega_x=omega, record_end=True
                )
            )
            samples.extend(_grid_times(t_max, sample_spacing))
        return ProtocolSchedule(
            label=label,
            n_particles=n_particles,
            chi=chi,
            segments=tuple(segments),
            sample_times=tuple(samples),
        )

    if t_cycle is None or not np.isfinite(t_cycle) or t_cycle <= 0:
        raise ValueError(f"{label} needs a positive t_cycle, got {t_cycle}")

    if label == "EmulatedTACT":
        n_cycles = max(0, int(math.ceil(t_max / t_cycle - 1e-9)))
        segments.extend(_cycle_segments(chi, t_cycle, n_cycles))
        samples.extend((k + 1) * t_cycle for k in range(n_cycles))
        return ProtocolSchedule(
            label=label,
            n_particles=n_particles,
            chi=chi,
            segments=tuple(segments),
            sample_times=tuple(samples),
            t_cycle=t_cycle,
        )

    # Combined
    if t_switch is None or not np.isfinite(t_switch) or t_switch < 0:
        raise ValueError(f"Combined needs a nonnegative t_switch, got {t_switch}")
    if t_switch > t_max:
        raise ValueError(f"t_switch {t_switch} exceeds t_max {t_max}")
    snapped = round(t_switch / sample_spacing) * sample_spacing
    t_switch = min(snapped, t_max)
    if t_switch > 0:
        segments.append(
            ProtocolSegment(
                kind="rotating_oat",
                duration=t_switch,
                chi=chi,
                omega_x=n_particles * chi / 2,
                record_end=True,
            )
        )
        samples.extend(_grid_times(t_switch, sample_spacing))
    n_cycles = max(0, int(math.ceil((t_max - t_switch) / t_cycle - 1e-9)))
    segments.extend(_cycle_segments(chi, t_cycle, n_cycles))
    samples.extend(t_switch + (k + 1) * t_cycle for k in range(n_cycles))
    return ProtocolSchedule(
        label="Combined",
        n_particles=n_particles,
        chi=chi,
        segments=tuple(segments),
        sample_times=tuple(samples),
        t_cycle=t_cycle,
        t_switch=t_switch,
    )


def run_protocol(schedule, initial_state=None):
    """Evolve through a schedule, recording metrics; returns (TimeSeries, state).

    Within a continuous segment every sample is propagated directly from the
    segment-start state, so spectral-cache roundoff does not accumulate over
    samples.  The first record is always at t = 0.
    """
    n = schedule.n_particles
    if initial_state is None:
        state = make_coherent_state(n, np.pi / 2, 0.0)
    else:
        if initial_state.n_particles != n:
            raise ValueError("initial state particle number does not match schedule")
        state = initial_state

    caches = {}

    def _advance(seg, psi, dt):
        if seg.kind == "free_oat":
            return evolve_oat(psi, seg.chi, dt)
        if seg.kind == "rotating_oat":
            key = (seg.omega_x, seg.chi)
            if key not in caches:
                caches[key] = build_spectral_cache(n, seg.omega_x, seg.chi)
            return evolve_rotating_oat(psi, caches[key], dt)
        raise ValueError(f"segment kind {seg.kind!r} cannot advance in time")

    pending = list(schedule.sample_times)
    tol = 1e-9 * max(1.0, schedule.t_total)
    records = []
    idx = 0
    t_now = 0.0

    def _record(psi, t):
        records.append(squeezing_parameter(psi, t=t, nchi_t=n * schedule.chi * t))

    if pending and abs(pending[0]) <= tol:
        _record(state, 0.0)
        idx = 1

    for seg in schedule.segments:
        if seg.kind == "pulse":
            state = rotate_state(state, seg.axis, seg.angle)
        else:
            t_end = t_now + seg.duration
            while idx < len(pending) and pending[idx] < t_end - tol:
                s = pending[idx]
                _record(_advance(seg, state, s - t_now), s)
                idx += 1
            state = _advance(seg, state, seg.duration)
            t_now = t_end
        if seg.record_end and idx < len(pending) and abs(pending[idx] - t_now) <= tol:
            _record(state, pending[idx])
            idx += 1

    if idx != len(pending):
        raise ArithmeticError(
            f"schedule walk consumed {idx} of {len(pending)} sample times"
        )

    series = TimeSeries(
        label=schedule.label,
        n_particles=n,
        chi=schedule.chi,
        records=tuple(records),
        t_cycle=schedule.t_cycle,
        t_switch=schedule.t_switch,
    )
    return series, state


def asymptote_curve(n_particles, chi, times):
    """Reference envelope exp(-N chi t) for the optimally oriented protocol."""
    return np.exp(-n_particles * chi * np.asarray(times, dtype=float))


def best_squeezing(series):
    """Record with the smallest xi^2 (earliest wins ties)."""
    if not series.records:
        raise ValueError("empty time series")
    return min(series.records, key=lambda r: (r.xi2, r.t))


def sweep_switch_time(
    n_particles,
    chi,
    t_max,
    t_cycle,
    switch_times,
    sample_spacing=None,
):
    """Run Combined for each switch time; returns [(t_switch, best record)].

    The returned switch times are the snapped values actually used.
    """
    rows = []
    for t_switch in switch_times:
        schedule = build_schedule(
            "Combined",
            n_particles,
            chi,
            t_max,
            t_cycle=t_cycle,
            t_switch=t_switch,
            sample_spacing=sample_spacing,
        )
        series, _ = run_protocol(schedule)
        rows.append((schedule.t_switch, best_squeezing(series)))
    return rows
