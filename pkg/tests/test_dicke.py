import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import comb

import spinsqueeze as sq
from spinsqueeze.dicke import frame_rotation_for

from oracles import dense_rotation, dense_spin, random_state_vector


class TestCoherentState:
    def test_plus_x_is_binomial_profile(self):
        state = sq.make_coherent_state(4, np.pi / 2, 0.0)
        expected = np.sqrt([comb(4, k) for k in range(5)]) / 4
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_poles_are_ladder_ends(self):
        up = sq.make_coherent_state(6, 0.0, 0.3)
        down = sq.make_coherent_state(6, np.pi, 0.3)
        assert abs(abs(up.amplitudes[-1]) - 1) < 1e-12
        assert np.abs(up.amplitudes[:-1]).max() < 1e-12
        assert abs(abs(down.amplitudes[0]) - 1) < 1e-10
        assert np.abs(down.amplitudes[1:]).max() < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=60),
        theta=st.floats(min_value=0.0, max_value=np.pi),
        phi=st.floats(min_value=0.0, max_value=2 * np.pi, exclude_max=True),
    )
    def test_mean_spin_points_along_bloch_direction(self, n, theta, phi):
        state = sq.make_coherent_state(n, theta, phi)
        direction = np.array(
            [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
        )
        np.testing.assert_allclose(
            sq.mean_spin_vector(state), (n / 2) * direction, atol=1e-9 * max(1, n)
        )

    @pytest.mark.parametrize("n", [3, 8, 17])
    def test_matches_rotated_pole_state(self, n):
        # independent construction: |theta, phi> = Rz(phi) Ry(theta) |+z pole>,
        # equal up to a global phase
        rng = np.random.default_rng(7 + n)
        for _ in range(4):
            theta = rng.uniform(0, np.pi)
            phi = rng.uniform(0, 2 * np.pi)
            pole = np.zeros(n + 1, dtype=complex)
            pole[-1] = 1.0
            ref = dense_rotation(n, "z", phi) @ (dense_rotation(n, "y", theta) @ pole)
            state = sq.make_coherent_state(n, theta, phi)
            overlap = np.vdot(ref, state.amplitudes)
            assert abs(abs(overlap) - 1) < 1e-10

    def test_large_n_stays_finite(self):
        state = sq.make_coherent_state(2000, 1.1, 4.0)
        assert abs(state.norm() - 1) < 1e-12
        mean = sq.mean_spin_vector(state)
        assert abs(np.linalg.norm(mean) - 1000) < 1e-6

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            sq.make_coherent_state(0, 1.0, 0.0)
        with pytest.raises(ValueError):
            sq.make_coherent_state(5, np.nan, 0.0)
        with pytest.raises(ValueError):
            sq.make_coherent_state(5, 0.0, np.inf)


class TestDickeState:
    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            sq.DickeState(3, np.ones(3) / np.sqrt(3))

    def test_rejects_unnormalised(self):
        with pytest.raises(ValueError):
            sq.DickeState(2, np.array([1.0, 1.0, 1.0]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            sq.DickeState(1, np.array([np.nan, 1.0]))

    def test_amplitudes_are_read_only(self):
        state = sq.make_coherent_state(4, 1.0, 0.5)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0

    def test_overlap_requires_matching_n(self):
        a = sq.make_coherent_state(4, 1.0, 0.0)
        b = sq.make_coherent_state(5, 1.0, 0.0)
        with pytest.raises(ValueError):
            a.overlap(b)


class TestCollectiveOperators:
    def test_ladder_elements_for_two_particles(self):
        ops = sq.CollectiveOperators.for_particles(2)
        np.testing.assert_allclose(ops.jz_diagonal, [-1.0, 0.0, 1.0])
        np.testing.assert_allclose(ops.jplus_offdiagonal, [np.sqrt(2), np.sqrt(2)])

    @pytest.mark.parametrize("n", range(1, 13))
    def test_commutator_and_casimir(self, n):
        ops = sq.CollectiveOperators.for_particles(n)
        dim = n + 1
        eye = np.eye(dim, dtype=complex)
        mats = {a: np.column_stack([ops.apply(a, eye[:, k]) for k in range(dim)])
                for a in ("x", "y", "z")}
        comm = mats["x"] @ mats["y"] - mats["y"] @ mats["x"]
        assert np.abs(comm - 1j * mats["z"]).max() < 1e-12
        casimir = sum(mats[a] @ mats[a] for a in ("x", "y", "z"))
        j = n / 2
        assert np.abs(casimir - j * (j + 1) * np.eye(dim)).max() < 1e-10

    def test_apply_rejects_wrong_length(self):
        ops = sq.CollectiveOperators.for_particles(4)
        with pytest.raises(ValueError):
            ops.apply_jx(np.zeros(4))


class TestExpectation:
    NAMES = ("jx", "jy", "jz", "jx2", "jy2", "jz2", "jxjy", "jyjz", "jzjx")

    @pytest.mark.parametrize("n", [2, 5, 9])
    def test_matches_dense_symmetrised_moments(self, n):
        jx, jy, jz = dense_spin(n)
        dense = {"x": jx, "y": jy, "z": jz}
        rng = np.random.default_rng(n)
        for _ in range(5):
            psi = random_state_vector(n, rng)
            state = sq.DickeState(n, psi)
            for name in self.NAMES:
                if len(name) == 2:
                    ref = np.vdot(psi, dense[name[1]] @ psi).real
                elif name.endswith("2"):
                    a = dense[name[1]]
                    ref = np.vdot(psi, a @ (a @ psi)).real
                else:
                    a, b = dense[name[1]], dense[name[3]]
                    ref = np.vdot(psi, (a @ b + b @ a) @ psi).real / 2
                assert sq.expectation(state, name) == pytest.approx(ref, abs=1e-10)

    def test_coherent_plus_x_values(self):
        n = 10
        state = sq.make_coherent_state(n, np.pi / 2, 0.0)
        assert sq.expectation(state, "jx") == pytest.approx(n / 2, abs=1e-10)
        assert sq.expectation(state, "jy") == pytest.approx(0.0, abs=1e-10)
        assert sq.expectation(state, "jz") == pytest.approx(0.0, abs=1e-10)
        # transverse variance of a coherent state is N/4
        assert sq.expectation(state, "jz2") == pytest.approx(n / 4, abs=1e-10)

    def test_rejects_unknown_operator(self):
        state = sq.make_coherent_state(3, 1.0, 0.0)
        with pytest.raises(ValueError):
            sq.expectation(state, "jw")


class TestMeanSpinFrame:
    def _tilted_squeezed_state(self, n):
        state = sq.make_coherent_state(n, np.pi / 2, 0.0)
        state = sq.evolve_oat(state, chi=1.0, duration=0.08)
        state = sq.rotate_state(state, "y", -0.6)
        return sq.rotate_state(state, "z", 0.9)

    def test_frame_lands_mean_on_plus_x(self):
        state = self._tilted_squeezed_state(14)
        rotated, frame = sq.rotate_to_mean_spin_frame(state)
        mean = sq.mean_spin_vector(rotated)
        r = np.linalg.norm(mean)
        assert abs(mean[1]) < 1e-9 * r
        assert abs(mean[2]) < 1e-9 * r
        assert mean[0] > 0

    def test_frame_angles_reproduce_rotation_via_dense_oracle(self):
        n = 14
        state = self._tilted_squeezed_state(n)
        rotated, frame = sq.rotate_to_mean_spin_frame(state)
        ref = dense_rotation(n, "y", frame.y_angle) @ (
            dense_rotation(n, "z", frame.z_angle) @ state.amplitudes
        )
        np.testing.assert_allclose(rotated.amplitudes, ref, atol=1e-10)

    def test_norm_preserved(self):
        rotated, _ = sq.rotate_to_mean_spin_frame(self._tilted_squeezed_state(30))
        assert abs(rotated.norm() - 1) < 1e-10

    def test_zero_mean_spin_raises(self):
        n = 6
        amps = np.zeros(n + 1, dtype=complex)
        amps[0] = amps[-1] = 1 / np.sqrt(2)
        state = sq.DickeState(n, amps)
        with pytest.raises(ValueError):
            sq.rotate_to_mean_spin_frame(state)

    def test_frame_rotation_for_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            frame_rotation_for(np.zeros(3))
