"""States and collective operators for N spin-1/2 particles in the symmetric subspace.

The symmetric (maximal j = N/2) subspace is spanned by the Dicke ladder
|j, m> with m = -j .. j.  Amplitude index k = 0 .. N corresponds to
m = k - N/2, ascending.  All operators act on this (N+1)-dimensional space,
so states and matrix-free operator applications stay O(N) or O(N^2).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

NORM_TOL = 1e-10

_LOG_FLOOR = 1e-300  # clip before log so 0 * log(0) terms vanish instead of NaN


@dataclass(frozen=True)
class DickeState:
    """Pure state of N spin-1/2 particles, amplitudes over m = -N/2 .. N/2."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError(f"need at least one particle, got {self.n_particles}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.n_particles + 1,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, "
                f"expected ({self.n_particles + 1},)"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("non-finite amplitude")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def j(self):
        return self.n_particles / 2

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        """<self|other>, states must share n_particles."""
        if other.n_particles != self.n_particles:
            raise ValueError("particle numbers differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class CollectiveOperators:
    """Matrix-free J_a applications on amplitude vectors.

    jz_diagonal holds the m values.  jplus_offdiagonal holds
    c_k = sqrt(j(j+1) - m_k(m_k+1)); J+ maps index k to k+1.
    """

    n_particles: int
    jz_diagonal: np.ndarray
    jplus_offdiagonal: np.ndarray

    @classmethod
    def for_particles(cls, n_particles):
        if n_particles < 1:
            raise ValueError(f"need at least one particle, got {n_particles}")
        j = n_particles / 2
        m = np.arange(n_particles + 1) - j
        cp = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
        m.setflags(write=False)
        cp.setflags(write=False)
        return cls(n_particles=n_particles, jz_diagonal=m, jplus_offdiagonal=cp)

    def _check(self, vec):
        if vec.shape != (self.n_particles + 1,):
            raise ValueError(
                f"vector length {vec.shape} does not match N={self.n_particles}"
            )

    def apply_jz(self, vec):
        self._check(vec)
        return self.jz_diagonal * vec

    def apply_jplus(self, vec):
        self._check(vec)
        out = np.zeros_like(vec)
        out[1:] = self.jplus_offdiagonal * vec[:-1]
        return out

    def apply_jminus(self, vec):
        self._check(vec)
        out = np.zeros_like(vec)
        out[:-1] = self.jplus_offdiagonal * vec[1:]
        return out

    def apply_jx(self, vec):
        return (self.apply_jplus(vec) + self.apply_jminus(vec)) / 2

    def apply_jy(self, vec):
        return (self.apply_jplus(vec) - self.apply_jminus(vec)) / 2j

    def apply(self, name, vec):
        return getattr(self, f"apply_j{name}")(vec)


def _log_binomial_half(n_particles):
    k = np.arange(n_particles + 1)
    return 0.5 * (gammaln(n_particles + 1) - gammaln(k + 1) - gammaln(n_particles - k + 1))


def coherent_amplitudes(n_particles, theta, phi):
    """Unnormalised-in-principle coherent amplitudes, computed in log space.

    a_k = sqrt(C(N,k)) cos(theta/2)^k sin(theta/2)^(N-k) e^{i (N-k) phi},
    stable for N in the thousands because binomials never materialise.
    """
    k = np.arange(n_particles + 1)
    half_c = np.cos(theta / 2)
    half_s = np.sin(theta / 2)
    log_mag = (
        _log_binomial_half(n_particles)
        + k * np.log(np.clip(abs(half_c), _LOG_FLOOR, None))
        + (n_particles - k) * np.log(np.clip(abs(half_s), _LOG_FLOOR, None))
    )
    mag = np.exp(log_mag)
    if abs(half_c) < _LOG_FLOOR:
        mag = np.where(k > 0, 0.0, mag)
    if abs(half_s) < _LOG_FLOOR:
        mag = np.where(k < n_particles, 0.0, mag)
    sign = np.sign(half_c) ** k * np.sign(half_s) ** (n_particles - k)
    return sign * mag * np.exp(1j * (n_particles - k) * phi)


def make_coherent_state(n_particles, theta, phi):
    """Spin coherent state pointing along (theta, phi); theta = pi/2, phi = 0 is +x."""
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise ValueError("angles must be finite")
    amps = coherent_amplitudes(n_particles, theta, phi)
    amps = amps / np.linalg.norm(amps)
    return DickeState(n_particles=n_particles, amplitudes=amps)


_FIRST_MOMENTS = ("x", "y", "z")
_SECOND_MOMENTS = {
    "jx2": ("x", "x"),
    "jy2": ("y", "y"),
    "jz2": ("z", "z"),
    "jxjy": ("x", "y"),
    "jyjz": ("y", "z"),
    "jzjx": ("z", "x"),
}


def expectation(state, operator):
    """<operator> for operator in jx, jy, jz, jx2, jy2, jz2, jxjy, jyjz, jzjx.

    Products are symmetrised, e.g. jyjz means <(JyJz + JzJy)/2>.  Values are
    returned as exact reals: <A> = Re<psi|A psi> for Hermitian A, and the
    quadratic forms are built from inner products that are real by construction.
    """
    ops = CollectiveOperators.for_particles(state.n_particles)
    psi = state.amplitudes
    name = operator.lower()
    if name in ("jx", "jy", "jz"):
        val = np.vdot(psi, ops.apply(name[1], psi))
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise ArithmeticError(f"<{operator}> has imaginary residue {val.imag}")
        return float(val.real)
    if name in _SECOND_MOMENTS:
        a, b = _SECOND_MOMENTS[name]
        va = ops.apply(a, psi)
        vb = va if a == b else ops.apply(b, psi)
        return float(np.real(np.vdot(va, vb)))
    raise ValueError(f"unknown operator {operator!r}")


def mean_spin_vector(state):
    """(<Jx>, <Jy>, <Jz>) in the lab frame."""
    ops = CollectiveOperators.for_particles(state.n_particles)
    psi = state.amplitudes
    return np.array(
        [np.real(np.vdot(psi, ops.apply(a, psi))) for a in _FIRST_MOMENTS]
    )


@dataclass(frozen=True)
class FrameRotation:
    """Rotation taking the lab frame to the mean-spin frame.

    Applied to a state as rotate about z by z_angle first, then about y by
    y_angle; afterwards the mean spin lies along +x and the transverse plane
    is spanned by (y, z).
    """

    z_angle: float
    y_angle: float


def frame_rotation_for(mean_spin):
    """FrameRotation sending the given lab-frame mean vector to +x."""
    r = np.linalg.norm(mean_spin)
    if r < 1e-9:
        raise ValueError("mean spin is zero, mean-spin frame undefined")
    theta = np.arccos(np.clip(mean_spin[2] / r, -1.0, 1.0))
    phi = np.arctan2(mean_spin[1], mean_spin[0])
    return FrameRotation(z_angle=-phi, y_angle=np.pi / 2 - theta)


def rotate_to_mean_spin_frame(state):
    """Rotate so the mean spin points along +x; returns (state, FrameRotation)."""
    from .propagators import rotate_state

    frame = frame_rotation_for(mean_spin_vector(state))
    rotated = rotate_state(state, "z", frame.z_angle)
    rotated = rotate_state(rotated, "y", frame.y_angle)
    return rotated, frame
