"""Quadratic collective-spin Hamiltonians described as symmetric twisting tensors.

H = sum_ab chi_ab (J_a J_b + J_b J_a)/2 + sum_a omega_a J_a is parametrised
by a symmetric 3x3 coefficient matrix and a linear drive vector.  Adding a
multiple of the identity to the coefficients only shifts the energy by a
Casimir term, so the physics lives in the eigenvalue spread; the canonical
form fixes that gauge by shifting the middle eigenvalue to zero.
"""

from dataclasses import dataclass, field

import numpy as np

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class TwistingTensor:
    """Symmetric quadratic coefficients plus a linear drive field."""

    coefficients: np.ndarray
    drive: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        coeff = np.array(self.coefficients, dtype=float)
        drv = np.array(self.drive, dtype=float)
        if coeff.shape != (3, 3):
            raise ValueError(f"coefficients must be 3x3, got shape {coeff.shape}")
        if drv.shape != (3,):
            raise ValueError(f"drive must be a 3-vector, got shape {drv.shape}")
        if not (np.all(np.isfinite(coeff)) and np.all(np.isfinite(drv))):
            raise ValueError("non-finite tensor entries")
        scale = max(np.abs(coeff).max(), 1.0)
        if np.abs(coeff - coeff.T).max() > _SYM_TOL * scale:
            raise ValueError("coefficient matrix must be symmetric")
        coeff = (coeff + coeff.T) / 2
        coeff.setflags(write=False)
        drv.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)
        object.__setattr__(self, "drive", drv)


_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def oat_tensor(chi, axis="z"):
    """One-axis twisting chi * J_axis^2."""
    coeff = np.zeros((3, 3))
    i = _AXIS_INDEX[axis]
    coeff[i, i] = chi
    return TwistingTensor(coefficients=coeff)


def tact_tensor(chi, plus_axis="z", minus_axis="y"):
    """Two-axis counter-twisting chi * (J_plus_axis^2 - J_minus_axis^2)."""
    if plus_axis == minus_axis:
        raise ValueError("counter-twisting needs two distinct axes")
    coeff = np.zeros((3, 3))
    coeff[_AXIS_INDEX[plus_axis], _AXIS_INDEX[plus_axis]] = chi
    coeff[_AXIS_INDEX[minus_axis], _AXIS_INDEX[minus_axis]] = -chi
    return TwistingTensor(coefficients=coeff)


def effective_cycle_tensor(chi):
    """Time average of the pulsed emulation cycle.

    The cycle spends 2/3 of the period twisting about z and 1/3 twisting
    about x, so the average tensor carries (2/3) chi along z and (1/3) chi
    along x.  After the canonical shift this is counter-twisting with rates
    (-chi/3, 0, +chi/3).
    """
    coeff = np.diag([chi / 3, 0.0, 2 * chi / 3])
    return TwistingTensor(coefficients=coeff)


@dataclass(frozen=True)
class CanonicalForm:
    """Eigenvalue gauge of a twisting tensor.

    rates are the coefficient eigenvalues ascending with the middle one
    shifted to exactly zero; axes has the matching orthonormal eigenvectors
    as columns and determinant +1; shift is the removed middle eigenvalue,
    so coefficients = axes @ diag(rates) @ axes.T + shift * I.
    """

    rates: np.ndarray
    axes: np.ndarray
    shift: float


def canonicalize(tensor):
    """Principal-axis form with the middle rate pinned to zero."""
    vals, vecs = np.linalg.eigh(tensor.coefficients)
    shift = float(vals[1])
    rates = vals - shift
    rates[1] = 0.0
    if np.linalg.det(vecs) < 0:
        vecs = vecs.copy()
        vecs[:, 1] *= -1.0  # flip the middle axis, keeps the extremal axes
    rates.setflags(write=False)
    vecs.setflags(write=False)
    return CanonicalForm(rates=rates, axes=vecs, shift=shift)


def classify(tensor, rel_tol=1e-9):
    """One of 'isotropic', 'oat', 'tact', 'generic' from the canonical rates.

    The split is relative to the rate spread: 'oat' when one extremal rate
    vanishes (doubly degenerate tensor), 'tact' when the extremal rates are
    exactly opposite, 'isotropic' when the spread itself vanishes relative
    to the overall scale.
    """
    form = canonicalize(tensor)
    low, _, high = form.rates
    spread = high - low
    overall = max(spread, abs(form.shift), 1e-300)
    if spread <= rel_tol * overall:
        return "isotropic"
    if min(-low, high) <= rel_tol * spread:
        return "oat"
    if abs(low + high) <= rel_tol * spread:
        return "tact"
    return "generic"


def max_squeezing_rate(tensor, n_particles):
    """Largest initial decay rate of the squeezing parameter, N * rate spread."""
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    form = canonicalize(tensor)
    return n_particles * float(form.rates[2] - form.rates[0])
