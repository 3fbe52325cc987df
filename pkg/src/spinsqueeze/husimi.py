"""Husimi Q-function of Dicke states on a spherical grid.

Q(theta, phi) = (N+1)/(4 pi) |<coherent(theta, phi)|psi>|^2, normalised so
the integral over the sphere is 1.  The overlap row for every theta is a
real nonnegative profile (binomial amplitudes, evaluated in log space), and
the phi dependence enters only through e^{i k phi}, so the whole grid is two
dense products instead of a coherent state per node.
"""

from dataclasses import dataclass

import numpy as np

from .dicke import _LOG_FLOOR, _log_binomial_half

#: one-degree default resolution
DEFAULT_THETA_POINTS = 181
DEFAULT_PHI_POINTS = 360


@dataclass(frozen=True)
class QFunctionGrid:
    """Q values on the outer product of polar and azimuthal sample angles.

    theta runs from 0 to pi inclusive; phi covers [0, 2 pi) uniformly
    without the endpoint.  values[i, j] = Q(theta[i], phi[j]).
    """

    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("theta", "phi", "values"):
            arr = getattr(self, name)
            arr = np.asarray(arr, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.values.shape != (len(self.theta), len(self.phi)):
            raise ValueError("values shape does not match the angle grids")


def _theta_profile(n_particles, thetas):
    """Rows of coherent-state magnitudes b_k(theta), poles handled exactly."""
    k = np.arange(n_particles + 1)
    half_c = np.cos(thetas[:, None] / 2)
    half_s = np.sin(thetas[:, None] / 2)
    log_mag = (
        _log_binomial_half(n_particles)[None, :]
        + k[None, :] * np.log(np.clip(half_c, _LOG_FLOOR, None))
        + (n_particles - k)[None, :] * np.log(np.clip(half_s, _LOG_FLOOR, None))
    )
    prof = np.exp(log_mag)
    prof = np.where((half_c < _LOG_FLOOR) & (k[None, :] > 0), 0.0, prof)
    prof = np.where((half_s < _LOG_FLOOR) & (k[None, :] < n_particles), 0.0, prof)
    return prof


def q_function(state, theta_points=DEFAULT_THETA_POINTS, phi_points=DEFAULT_PHI_POINTS):
    """Evaluate the Q-function of a state on a regular (theta, phi) grid."""
    if theta_points < 2:
        raise ValueError(f"need at least two polar samples, got {theta_points}")
    if phi_points < 1:
        raise ValueError(f"need at least one azimuthal sample, got {phi_points}")
    n = state.n_particles
    thetas = np.linspace(0.0, np.pi, theta_points)
    phis = np.linspace(0.0, 2 * np.pi, phi_points, endpoint=False)
    profile = _theta_profile(n, thetas)
    # <coh|psi> = e^{-i N phi} sum_k b_k(theta) psi_k e^{i k phi}; the global
    # phase drops out of |.|^2
    phases = np.exp(1j * np.outer(np.arange(n + 1), phis))
    overlaps = (profile * state.amplitudes[None, :]) @ phases
    values = (n + 1) / (4 * np.pi) * np.abs(overlaps) ** 2
    return QFunctionGrid(theta=thetas, phi=phis, values=values)


def sphere_integral(grid):
    """Integral of Q over the sphere: trapezoid in theta, periodic sum in phi.

    The phi direction is uniform and periodic, so the plain Riemann sum
    there is spectrally accurate; theta carries the sin(theta) area weight.
    """
    dphi = 2 * np.pi / len(grid.phi)
    ring = grid.values.sum(axis=1) * dphi * np.sin(grid.theta)
    return float(np.trapezoid(ring, grid.theta))
