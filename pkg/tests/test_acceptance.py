"""End-to-end acceptance runs for the four squeezing protocols.

Every test prints one [PASS]/[FAIL] line (run with -s to see them) stating
the measured numbers next to the gate, then asserts.  Heavy evolutions are
shared module-scope fixtures; all quoted times are dimensionless N chi t and
all depths are dB of xi^2.
"""

import time

import numpy as np
import pytest

import spinsqueeze as sq

from oracles import (
    dense_oat,
    dense_rotating_oat,
    dense_rotation,
    random_state_vector,
)

T_MAX = 12.0


def _verdict(ok, label, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def _timed_run(label, n, t_max, **kwargs):
    chi = 1.0 / n  # makes N chi t coincide with t
    start = time.perf_counter()
    schedule = sq.build_schedule(label, n, chi, t_max, **kwargs)
    series, final = sq.run_protocol(schedule)
    return series, final, time.perf_counter() - start


@pytest.fixture(scope="module")
def emu100():
    return _timed_run("EmulatedTACT", 100, T_MAX, t_cycle=0.04)


@pytest.fixture(scope="module")
def comb100():
    return _timed_run("Combined", 100, T_MAX, t_cycle=0.04, t_switch=1.5)


@pytest.fixture(scope="module")
def emu600_coarse():
    return _timed_run("EmulatedTACT", 600, T_MAX, t_cycle=0.04)


@pytest.fixture(scope="module")
def comb600_coarse():
    return _timed_run("Combined", 600, T_MAX, t_cycle=0.04, t_switch=3.0)


@pytest.fixture(scope="module")
def emu600_fine():
    return _timed_run("EmulatedTACT", 600, T_MAX, t_cycle=0.004)


@pytest.fixture(scope="module")
def comb600_fine():
    return _timed_run("Combined", 600, T_MAX, t_cycle=0.004, t_switch=2.0)


def _best(series):
    record = sq.best_squeezing(series)
    return record.xi2_db, record.nchi_t


def test_emulation_n100_depth_and_location(emu100):
    db, loc = _best(emu100[0])
    ok = abs(db + 17.5) <= 0.3 and abs(loc - 7.4) <= 0.15
    _verdict(
        ok,
        "tact emulation, N=100, cycle 0.04",
        f"best {db:.2f} dB at {loc:.2f} (gate -17.5+-0.3 dB at 7.4+-0.15)",
    )


def test_combined_n100_depth_and_location(comb100):
    db, loc = _best(comb100[0])
    ok = abs(db + 17.5) <= 0.3 and abs(loc - 6.7) <= 0.15
    _verdict(
        ok,
        "combined, N=100, switch 1.5",
        f"best {db:.2f} dB at {loc:.2f} (gate -17.5+-0.3 dB at 6.7+-0.15)",
    )


def test_emulation_n600_coarse_cycle(emu600_coarse):
    series, _, elapsed = emu600_coarse
    db, loc = _best(series)
    ok = abs(db + 23.6) <= 0.3 and abs(loc - 9.45) <= 0.2 and elapsed < 60
    _verdict(
        ok,
        "tact emulation, N=600, cycle 0.04",
        f"best {db:.2f} dB at {loc:.2f} in {elapsed:.1f}s "
        "(gate -23.6+-0.3 dB at 9.45+-0.2, under 60s)",
    )


def test_combined_n600_coarse_cycle(comb600_coarse):
    db, loc = _best(comb600_coarse[0])
    ok = abs(db + 24.0) <= 0.3 and abs(loc - 7.96) <= 0.2
    _verdict(
        ok,
        "combined, N=600, switch 3.0",
        f"best {db:.2f} dB at {loc:.2f} (gate -24.0+-0.3 dB at 7.96+-0.2)",
    )


def test_fine_cycle_n600_converges_to_ideal(emu600_fine, comb600_fine):
    emu_series, _, emu_elapsed = emu600_fine
    comb_series, _, comb_elapsed = comb600_fine
    emu_db, emu_loc = _best(emu_series)
    comb_db, comb_loc = _best(comb_series)
    elapsed = emu_elapsed + comb_elapsed
    ok = (
        abs(emu_db + 25.17) <= 0.3
        and abs(emu_loc - 10.14) <= 0.2
        and abs(comb_db + 25.17) <= 0.3
        and abs(comb_loc - 9.14) <= 0.2
        and abs(emu_db - comb_db) <= 0.1
        and elapsed < 600
    )
    _verdict(
        ok,
        "fine cycle 0.004, N=600, emulation vs combined (switch 2.0)",
        f"emulation {emu_db:.2f} dB at {emu_loc:.2f}, combined {comb_db:.2f} dB "
        f"at {comb_loc:.2f}, gap {abs(emu_db - comb_db):.3f} dB, {elapsed:.1f}s "
        "(gate both -25.17+-0.3 dB at 10.14/9.14+-0.2, gap <= 0.1 dB, under 600s)",
    )


def test_early_decay_rates_n600():
    opt_series, _, _ = _timed_run("OptimalOAT", 600, 0.5)
    emu_series, _, _ = _timed_run("EmulatedTACT", 600, 0.5, t_cycle=0.04)

    def fitted_slope(series):
        x = np.asarray(series.nchi_times)
        y = np.log(np.asarray(series.xi2))
        return np.polyfit(x, y, 1)[0]

    opt_slope = fitted_slope(opt_series)
    emu_slope = fitted_slope(emu_series)
    ok = abs(opt_slope + 1.0) <= 0.05 and abs(emu_slope + 2 / 3) <= 2 / 30
    _verdict(
        ok,
        "early ln xi^2 decay rates, N=600",
        f"driven rate {opt_slope:.4f} (gate -1+-5%), "
        f"emulated rate {emu_slope:.4f} (gate -2/3+-10%)",
    )


def test_property_spot_checks(emu100, comb100, emu600_coarse, comb600_coarse,
                              emu600_fine, comb600_fine):
    failures = []

    norm_err = max(
        abs(run[1].norm() - 1)
        for run in (emu100, comb100, emu600_coarse, comb600_coarse,
                    emu600_fine, comb600_fine)
    )
    if norm_err > 1e-10:
        failures.append(f"final norm drift {norm_err:.1e} > 1e-10")

    algebra_err = 0.0
    casimir_err = 0.0
    rng = np.random.default_rng(11)
    for n in range(1, 13):
        ops = sq.CollectiveOperators.for_particles(n)
        vec = random_state_vector(n, rng)
        comm = ops.apply_jx(ops.apply_jy(vec)) - ops.apply_jy(ops.apply_jx(vec))
        algebra_err = max(algebra_err, np.abs(comm - 1j * ops.apply_jz(vec)).max())
        total = sum(
            np.vdot(vec, ops.apply(name, ops.apply(name, vec))).real
            for name in ("x", "y", "z")
        )
        casimir_err = max(casimir_err, abs(total - n / 2 * (n / 2 + 1)))
    if algebra_err > 1e-12:
        failures.append(f"commutator residue {algebra_err:.1e} > 1e-12")
    if casimir_err > 1e-10:
        failures.append(f"total-spin residue {casimir_err:.1e} > 1e-10")

    prop_err = 0.0
    for n in (2, 5, 8):
        psi = random_state_vector(n, rng)
        for axis in ("x", "y", "z"):
            angle = float(rng.uniform(-3, 3))
            got = sq.rotate_state(sq.DickeState(n, psi), axis, angle).amplitudes
            prop_err = max(prop_err, np.abs(got - dense_rotation(n, axis, angle) @ psi).max())
        got = sq.evolve_oat(sq.DickeState(n, psi), 0.3, 1.1).amplitudes
        prop_err = max(prop_err, np.abs(got - dense_oat(n, 0.3, 1.1) @ psi).max())
        cache = sq.build_spectral_cache(n, 0.7, 0.3)
        got = sq.evolve_rotating_oat(sq.DickeState(n, psi), cache, 1.1).amplitudes
        prop_err = max(prop_err, np.abs(got - dense_rotating_oat(n, 0.7, 0.3, 1.1) @ psi).max())
    if prop_err > 1e-8:
        failures.append(f"propagator vs dense exponential {prop_err:.1e} > 1e-8")

    tilted = sq.rotate_state(sq.make_coherent_state(25, 1.2, 0.7), "y", 0.4)
    idle = sq.build_schedule("EmulatedTACT", 25, 0.0, t_max=0.3, t_cycle=0.3)
    _, back = sq.run_protocol(idle, initial_state=tilted)
    pulse_err = np.abs(back.amplitudes - tilted.amplitudes).max()
    if pulse_err > 1e-10:
        failures.append(f"zero-twisting cycle residue {pulse_err:.1e} > 1e-10")

    integral = sq.sphere_integral(sq.q_function(comb100[1]))
    if abs(integral - 1) > 1e-3:
        failures.append(f"Q integral {integral:.6f} off unity by > 1e-3")

    _verdict(
        not failures,
        "conservation and oracle spot checks",
        "; ".join(failures) if failures else
        f"norms {norm_err:.1e}, algebra {algebra_err:.1e}/{casimir_err:.1e}, "
        f"propagators {prop_err:.1e}, idle cycle {pulse_err:.1e}, "
        f"Q integral {integral:.6f}",
    )


def test_driven_protocol_holds_ellipse_at_quarter_pi():
    series, _, _ = _timed_run("OptimalOAT", 600, 1.5)
    angles = np.degrees(
        [r.ellipse_angle for r in series.records if 0.2 <= r.nchi_t <= 1.5]
    )
    worst = np.abs(angles - 45.0).max()
    ok = worst <= 5.0
    _verdict(
        ok,
        "driven-protocol ellipse orientation, N=600",
        f"max deviation from 45 deg over N chi t in [0.2, 1.5]: {worst:.2f} deg "
        "(gate 5 deg)",
    )
