"""Exact propagators on the Dicke ladder.

Sign convention throughout: evolving under H for time t applies
exp(-i H t); rotating by angle a about axis n applies exp(-i a n.J).
Twisting about z and rotation about z are diagonal, rotation about y is a
real orthogonal matrix built once per (N, angle) and cached, rotation about
x is composed from z and y rotations.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .dicke import CollectiveOperators, DickeState, _log_binomial_half, _LOG_FLOOR

ORTHO_TOL = 1e-10


def evolve_oat(state, chi, duration):
    """Evolve under the twisting Hamiltonian chi * Jz^2 for the given time."""
    if duration < 0:
        raise ValueError(f"duration must be nonnegative, got {duration}")
    if not np.isfinite(chi) or not np.isfinite(duration):
        raise ValueError("chi and duration must be finite")
    m = CollectiveOperators.for_particles(state.n_particles).jz_diagonal
    phases = np.exp(-1j * chi * duration * m**2)
    return DickeState(state.n_particles, phases * state.amplitudes)


def _rotation_y_sign_pattern(n_particles, beta):
    """Signs and log magnitudes of column m' = -j of exp(-i beta Jy)."""
    k = np.arange(n_particles + 1)
    half_c = np.cos(beta / 2)
    half_s = np.sin(beta / 2)
    log_mag = (
        _log_binomial_half(n_particles)
        + (n_particles - k) * np.log(np.clip(abs(half_c), _LOG_FLOOR, None))
        + k * np.log(np.clip(abs(half_s), _LOG_FLOOR, None))
    )
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    if half_c < 0:
        sign = sign * np.where((n_particles - k) % 2 == 0, 1.0, -1.0)
    if half_s < 0:
        sign = sign * np.where(k % 2 == 0, 1.0, -1.0)
    return sign, log_mag


@lru_cache(maxsize=8)
def rotation_matrix_y(n_particles, beta):
    """Real orthogonal matrix of exp(-i beta Jy) in the ascending-m basis.

    Built from the eigenvectors of T = cos(beta) Jz + sin(beta) Jx, whose
    spectrum is exactly m' = -j .. j: column m' of the rotation matrix is the
    T-eigenvector with eigenvalue m'.  eigh_tridiagonal leaves each column's
    overall sign arbitrary, so signs are fixed against the analytic first
    column d_{k,0} = (-1)^k sqrt(C(N,k)) cos(beta/2)^(N-k) sin(beta/2)^k and
    then propagated up the ladder with the rotated raising operator
    J+' = cos(beta) Jx - sin(beta) Jz + (J+ - J-)/2, whose matrix elements
    <m'+1|J+'|m'> are strictly positive.  A direct three-term recursion on
    the same ladder loses orthogonality past N of a few hundred, while the
    eigensolver stays at machine precision beyond N = 2000.
    """
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    ops = CollectiveOperators.for_particles(n_particles)
    m = ops.jz_diagonal
    cp = ops.jplus_offdiagonal
    cos_b = np.cos(beta)
    sin_b = np.sin(beta)
    _, vecs = eigh_tridiagonal(cos_b * m, sin_b * cp / 2)

    sign, log_mag = _rotation_y_sign_pattern(n_particles, beta)
    anchor = int(np.argmax(log_mag))
    if vecs[anchor, 0] * sign[anchor] < 0:
        vecs[:, 0] *= -1.0

    # J+' is real tridiagonal: diagonal -sin_b * m, lower (cos_b+1)/2 * cp,
    # upper (cos_b-1)/2 * cp.
    diag = -sin_b * m
    lower = (cos_b + 1) / 2 * cp
    upper = (cos_b - 1) / 2 * cp
    for i in range(n_particles):
        v = vecs[:, i]
        raised = diag * v
        raised[1:] += lower * v[:-1]
        raised[:-1] += upper * v[1:]
        if raised @ vecs[:, i + 1] < 0:
            vecs[:, i + 1] *= -1.0

    gram_err = np.abs(vecs.T @ vecs - np.eye(n_particles + 1)).max()
    if gram_err > ORTHO_TOL:
        raise ArithmeticError(
            f"rotation matrix orthonormality error {gram_err:.3e} at "
            f"N={n_particles}, beta={beta}"
        )
    vecs.setflags(write=False)
    return vecs


def _apply_real_matrix(mat, vec):
    # real @ complex without materialising a complex copy of mat
    return mat @ vec.real + 1j * (mat @ vec.imag)


def rotate_state(state, axis, angle):
    """Rotate by angle about a lab axis: applies exp(-i angle J_axis)."""
    if not np.isfinite(angle):
        raise ValueError("angle must be finite")
    axis = axis.lower()
    if axis == "z":
        m = CollectiveOperators.for_particles(state.n_particles).jz_diagonal
        return DickeState(state.n_particles, np.exp(-1j * angle * m) * state.amplitudes)
    if axis == "y":
        d = rotation_matrix_y(state.n_particles, float(angle))
        return DickeState(state.n_particles, _apply_real_matrix(d, state.amplitudes))
    if axis == "x":
        # exp(-i a Jx) = exp(+i (pi/2) Jz) exp(-i a Jy) exp(-i (pi/2) Jz)
        out = rotate_state(state, "z", np.pi / 2)
        out = rotate_state(out, "y", angle)
        return rotate_state(out, "z", -np.pi / 2)
    raise ValueError(f"axis must be one of x, y, z, got {axis!r}")


@dataclass(frozen=True)
class TridiagonalSpectralCache:
    """Eigendecomposition of H = omega_x Jx + chi Jz^2, reusable across times.

    H is real symmetric tridiagonal in the ascending-m basis: diagonal
    chi m^2, off-diagonal (omega_x / 2) c_k.  eigenvectors has the
    orthonormal eigenvectors as columns.
    """

    n_particles: int
    omega_x: float
    chi: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def build_spectral_cache(n_particles, omega_x, chi):
    """Diagonalise omega_x Jx + chi Jz^2; validates the decomposition."""
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    if not (np.isfinite(omega_x) and np.isfinite(chi)):
        raise ValueError("omega_x and chi must be finite")
    ops = CollectiveOperators.for_particles(n_particles)
    diag = chi * ops.jz_diagonal**2
    off = (omega_x / 2) * ops.jplus_offdiagonal
    vals, vecs = eigh_tridiagonal(diag, off)

    scale = max(np.abs(diag).max(), 2 * np.abs(off).max(), 1e-300)
    applied = diag[:, None] * vecs
    applied[1:] += off[:, None] * vecs[:-1]
    applied[:-1] += off[:, None] * vecs[1:]
    resid = np.abs(applied - vecs * vals[None, :]).max()
    if resid > 1e-9 * scale:
        raise ArithmeticError(f"eigen residual {resid:.3e} exceeds tolerance")
    gram_err = np.abs(vecs.T @ vecs - np.eye(n_particles + 1)).max()
    if gram_err > ORTHO_TOL:
        raise ArithmeticError(f"eigenvector orthonormality error {gram_err:.3e}")

    vals.setflags(write=False)
    vecs.setflags(write=False)
    return TridiagonalSpectralCache(
        n_particles=n_particles,
        omega_x=float(omega_x),
        chi=float(chi),
        eigenvalues=vals,
        eigenvectors=vecs,
    )


def evolve_rotating_oat(state, cache, duration):
    """Evolve under omega_x Jx + chi Jz^2 using a prebuilt spectral cache."""
    if duration < 0:
        raise ValueError(f"duration must be nonnegative, got {duration}")
    if cache.n_particles != state.n_particles:
        raise ValueError("cache and state particle numbers differ")
    v = cache.eigenvectors
    coeffs = _apply_real_matrix(v.T, state.amplitudes)
    coeffs *= np.exp(-1j * cache.eigenvalues * duration)
    return DickeState(state.n_particles, _apply_real_matrix(v, coeffs))
