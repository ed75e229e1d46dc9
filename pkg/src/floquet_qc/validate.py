"""Time-stepping check of the static effective description.

The rotating-frame Hamiltonian H_r(t) (bounded Peierls phases, period
T = 2pi/omega) is evolved over one full period with midpoint exponential
steps,

    U(T) = prod_{j = n_steps..1} exp(-i H_r(t_j) dt),   t_j = (j - 1/2) dt,

a second-order scheme whose discretization error shrinks by ~4x per step
doubling.  Quasienergies E_j = i ln(u_j) / T (principal branch, Re folded
into [-omega/2, omega/2), Im kept) are then matched against the spectrum of
the static effective Hamiltonian with Bessel-dressed hopping; the matched
distances measure the quality of the high-frequency approximation, which the
caller inspects rather than asserts against a universal bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import DriveConfig, LatticeConfig, ModelSpec
from .errors import ConfigError, MissingOmega, StepTooLarge
from .hamiltonian import build_real_space, build_rotating_frame
from .numerics import eig_dense, expm_multiply_step, matrix_inf_norm

#: fewest midpoint steps accepted for one period
MIN_STEPS = 256
#: largest allowed ||H_r|| * dt per exponential step
MAX_STEP_NORM = 0.5


@dataclass(frozen=True)
class PropagatorReport:
    """One-period propagator, its quasienergies, and the matched distances.

    ``comparison[j]`` is the complex distance from ``quasienergies[j]`` to
    the static-spectrum eigenvalue it was matched with (a bijection).
    ``n_steps`` is 0 when the propagator was supplied externally.
    """

    U: np.ndarray
    quasienergies: np.ndarray
    comparison: np.ndarray
    n_steps: int

    @property
    def max_distance(self) -> float:
        return float(np.max(self.comparison)) if len(self.comparison) else 0.0


def one_period_propagator(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    n_steps: int = MIN_STEPS,
) -> np.ndarray:
    """Midpoint-stepped propagator U(T) of the rotating-frame Hamiltonian.

    Requires ``drive.omega``; raises :class:`StepTooLarge` when n_steps is
    too small for the norm bound ||H_r|| * dt <= 0.5 (the norm is
    time-independent: the drive only attaches unimodular phases).
    """
    if drive.omega is None:
        raise MissingOmega("one-period propagation requires drive.omega")
    if n_steps < MIN_STEPS:
        raise ConfigError(f"n_steps must be at least {MIN_STEPS}", key="validate.n_steps")
    T = 2.0 * math.pi / drive.omega
    dt = T / n_steps
    norm = matrix_inf_norm(build_rotating_frame(spec, lattice, drive, 0.0).matrix)
    if norm * dt > MAX_STEP_NORM * (1.0 + 1e-12):
        raise StepTooLarge(
            f"||H_r|| * dt = {norm * dt:.3f} exceeds {MAX_STEP_NORM}; "
            f"need n_steps >= {int(math.ceil(norm * T / MAX_STEP_NORM))}"
        )
    L = lattice.L
    U = np.eye(L, dtype=np.complex128)
    for j in range(1, n_steps + 1):
        t = (j - 0.5) * dt
        H = build_rotating_frame(spec, lattice, drive, t).matrix
        U = expm_multiply_step(H, dt) @ U
    return U


def _fold_real(re: np.ndarray, omega: float) -> np.ndarray:
    return np.remainder(re + 0.5 * omega, omega) - 0.5 * omega


def compare_quasienergies(
    U: np.ndarray, T: float, H_eff: np.ndarray, n_steps: int = 0
) -> PropagatorReport:
    """Match U(T)'s quasienergies against the spectrum of H_eff.

    Quasienergies are E_j = i ln(u_j)/T with Re E folded to
    [-omega/2, omega/2) and Im E kept.  Matching is greedy on the global
    distance matrix: repeatedly pair the closest remaining (quasienergy,
    eigenvalue) couple, yielding a bijection.  ``n_steps`` is recorded into
    the report unchanged.
    """
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != np.asarray(H_eff).shape:
        raise ValueError("U and H_eff must have identical shape")
    if not T > 0.0:
        raise ValueError("period T must be positive")
    omega = 2.0 * math.pi / T
    u = eig_dense(U).values
    if np.any(np.abs(u) < 1e-300):
        raise ValueError("propagator has a numerically zero eigenvalue")
    re = _fold_real(-np.angle(u) / T, omega)
    im = np.log(np.abs(u)) / T
    quasienergies = re + 1j * im
    order = np.lexsort((quasienergies.imag, quasienergies.real))
    quasienergies = quasienergies[order]

    eps = eig_dense(np.asarray(H_eff, dtype=np.complex128)).values
    dist = np.abs(quasienergies[:, None] - eps[None, :])
    L = len(quasienergies)
    comparison = np.empty(L)
    free_rows = np.ones(L, dtype=bool)
    free_cols = np.ones(L, dtype=bool)
    work = dist.copy()
    for _ in range(L):
        masked = np.where(free_rows[:, None] & free_cols[None, :], work, np.inf)
        r, c = np.unravel_index(int(np.argmin(masked)), masked.shape)
        comparison[r] = dist[r, c]
        free_rows[r] = False
        free_cols[c] = False
    return PropagatorReport(U=U, quasienergies=quasienergies, comparison=comparison, n_steps=n_steps)


def validate_high_frequency(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    n_steps: int = MIN_STEPS,
) -> PropagatorReport:
    """Propagate one period and compare against the static dressed spectrum."""
    U = one_period_propagator(spec, lattice, drive, n_steps)
    T = 2.0 * math.pi / drive.omega
    H_eff = build_real_space(spec, lattice, drive).matrix
    return compare_quasienergies(U, T, H_eff, n_steps=n_steps)
