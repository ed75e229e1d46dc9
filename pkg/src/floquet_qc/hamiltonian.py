"""Dense Hamiltonian builders for the five chains.

Three representations are produced:

* **real space** -- nearest-neighbor hopping (Bessel-dressed) plus the
  quasiperiodic diagonal, with open, periodic, or twisted boundaries;
* **momentum space** -- the exact discrete-Fourier dual available for M1-M3
  when alpha = p/L with gcd(p, L) = 1: the quasiperiodic potential turns into
  (possibly nonreciprocal) hopping between momentum modes and the kinetic term
  becomes the diagonal 2 J J0(K/omega) cos(2 pi alpha n);
* **rotating frame** -- the time-dependent chain with undressed hoppings
  carrying the oscillating Peierls phase e^{-i f(t)}, f(t) = (K/omega) sin(omega t),
  uniformly on every link (including the periodic wrap).  Its one-period
  average reproduces the real-space effective Hamiltonian.

Twisted boundaries implement each model's winding-loop construction:
M2/M4/M5 shift the potential argument by theta/L, M3 phases its corner
hoppings by e^{-i theta} (top-right) / e^{+i theta} (bottom-left), and M1 --
whose canonical twist lives in momentum space, see :mod:`floquet_qc.winding`
-- gets the same corner-phase convention as M3 in real space as an
exploratory variant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Boundary,
    BoundaryKind,
    DriveConfig,
    LatticeConfig,
    Model,
    ModelSpec,
    effective_hopping,
    onsite_potential_array,
    quasiperiodic_angles,
)
from .errors import ConfigError, MissingOmega, UnsupportedModel


class Representation(enum.Enum):
    REAL_SPACE = "real_space"
    MOMENTUM_SPACE = "momentum_space"
    ROTATING_FRAME = "rotating_frame"


@dataclass(frozen=True)
class HamiltonianBuild:
    """A dense L x L matrix plus the provenance needed to interpret it."""

    matrix: np.ndarray
    representation: Representation
    spec: ModelSpec
    lattice: LatticeConfig
    drive: DriveConfig
    twist_theta: float | None = None
    time: float | None = None


def _hopping_pair(spec: ModelSpec, dressing: complex) -> tuple[complex, complex]:
    """(super-diagonal, sub-diagonal) hopping amplitudes, already dressed.

    The super-diagonal carries the rightward amplitude J_R (J e^{-gamma} for
    M3), the sub-diagonal the leftward J_L (J e^{+gamma} for M3); all other
    models hop symmetrically.
    """
    if spec.model_id is Model.M3:
        return spec.J * math.exp(-spec.gamma) * dressing, spec.J * math.exp(spec.gamma) * dressing
    return spec.J * dressing, spec.J * dressing


def build_real_space(
    spec: ModelSpec, lattice: LatticeConfig, drive: DriveConfig, arg_shift: float = 0.0
) -> HamiltonianBuild:
    """Effective Hamiltonian in the lattice basis.

    Off-diagonals carry J * J0(K/omega) (split into J_{L,R} * J0 for M3); the
    diagonal is the model's onsite potential.  Periodic boundaries add the two
    wrap corners; twisted boundaries apply the model's twist convention (see
    module docstring).

    ``arg_shift`` offsets the quasiperiodic argument uniformly: the diagonal
    is evaluated at 2 pi alpha n + arg_shift.  All offsets describe the same
    chain in the infinite-size limit, but finite rings care: with alpha = p/L
    and L even, the product of the onsite phases around the ring flips sign
    between site-mirror-symmetric sampling (shift 0) and bond-mirror-symmetric
    sampling (shift pi/L), and only the latter keeps the extended-phase
    spectrum real -- the former splits every exactly degenerate +-k Bloch pair
    into a conjugate pair with |Im| ~ sqrt(V^L / spectral-gap-product).
    """
    L = lattice.L
    boundary = lattice.boundary
    twisted = boundary.kind is BoundaryKind.TWISTED
    theta = boundary.theta if twisted else 0.0

    # M2/M4/M5 realize the twist as a shift of the potential argument
    if twisted and spec.model_id in (Model.M2, Model.M4, Model.M5):
        arg_shift = arg_shift + theta / L
    diag = onsite_potential_array(spec, lattice, np.arange(1, L + 1), arg_shift=arg_shift)

    dressing = effective_hopping(1.0, drive.K_over_omega)
    hop_super, hop_sub = _hopping_pair(spec, dressing)

    H = np.zeros((L, L), dtype=np.complex128)
    np.fill_diagonal(H, diag)
    if L > 1:
        idx = np.arange(L - 1)
        H[idx, idx + 1] = hop_super
        H[idx + 1, idx] = hop_sub
        if boundary.kind is not BoundaryKind.OPEN:
            corner_phase = 1.0 + 0.0j
            if twisted and spec.model_id in (Model.M1, Model.M3):
                corner_phase = complex(math.cos(theta), -math.sin(theta))
            # wrap of c^dag_L c_1 carries the rightward amplitude, and vice versa
            H[0, L - 1] = hop_sub * corner_phase
            H[L - 1, 0] = hop_super * np.conj(corner_phase)
    return HamiltonianBuild(
        matrix=H,
        representation=Representation.REAL_SPACE,
        spec=spec,
        lattice=lattice,
        drive=drive,
        twist_theta=theta if twisted else None,
    )


def build_momentum_space(
    spec: ModelSpec, lattice: LatticeConfig, drive: DriveConfig
) -> HamiltonianBuild:
    """Exact momentum-space dual of M1/M2/M3 (periodic boundary, q = L).

    The kinetic term becomes the diagonal 2 J J0(K/omega) cos(2 pi alpha n)
    (with the complex shift -i gamma for M3); the potential becomes hopping:

    * M1: amplitude V on the sub-diagonal and its cyclic wrap (top-right),
    * M2: (V/2) e^{+gamma} below / (V/2) e^{-gamma} above the diagonal,
    * M3: V/2 on both off-diagonals.

    Raises :class:`UnsupportedModel` for M4/M5 (their potentials have no
    finite-band momentum representation).
    """
    if spec.model_id in (Model.M4, Model.M5):
        raise UnsupportedModel(
            f"{spec.model_id.value} has no momentum-space dual (unbounded harmonics)"
        )
    if lattice.boundary.kind is not BoundaryKind.PERIODIC:
        raise ConfigError("momentum-space builds require periodic boundaries")

    L = lattice.L
    jeff2 = 2.0 * effective_hopping(spec.J, drive.K_over_omega)
    angles = quasiperiodic_angles(lattice, np.arange(1, L + 1))
    if spec.model_id is Model.M3:
        diag = jeff2 * np.cos(angles - 1j * spec.gamma)
    else:
        diag = jeff2 * np.cos(angles) + 0j

    if spec.model_id is Model.M1:
        below, above = spec.V + 0j, 0j
    elif spec.model_id is Model.M2:
        below = 0.5 * spec.V * math.exp(spec.gamma)
        above = 0.5 * spec.V * math.exp(-spec.gamma)
    else:
        below = above = 0.5 * spec.V + 0j

    H = np.zeros((L, L), dtype=np.complex128)
    np.fill_diagonal(H, diag)
    if L > 1:
        idx = np.arange(L - 1)
        H[idx + 1, idx] = below
        H[idx, idx + 1] = above
        # cyclic wraps of the two shift operators
        H[0, L - 1] = below
        H[L - 1, 0] = above
    return HamiltonianBuild(
        matrix=H,
        representation=Representation.MOMENTUM_SPACE,
        spec=spec,
        lattice=lattice,
        drive=drive,
    )


def build_rotating_frame(
    spec: ModelSpec, lattice: LatticeConfig, drive: DriveConfig, t: float
) -> HamiltonianBuild:
    """Time-dependent rotating-frame Hamiltonian H_r(t).

    Hoppings are undressed (no Bessel factor) but carry the Peierls phase
    e^{-i f(t)} rightward / e^{+i f(t)} leftward with
    f(t) = (K/omega) sin(omega t), applied uniformly to every link including
    the periodic wrap; the diagonal is the static potential.  Averaging over
    one period reproduces :func:`build_real_space`.
    """
    if drive.omega is None:
        raise MissingOmega("build_rotating_frame needs drive.omega")
    if lattice.boundary.kind is BoundaryKind.TWISTED:
        raise ConfigError("rotating-frame builds support open/periodic boundaries only")

    L = lattice.L
    f = drive.K_over_omega * math.sin(drive.omega * t)
    peierls = complex(math.cos(f), -math.sin(f))  # e^{-i f(t)}
    hop_super, hop_sub = _hopping_pair(spec, 1.0)
    hop_super = hop_super * peierls
    hop_sub = hop_sub * np.conj(peierls)

    diag = onsite_potential_array(spec, lattice, np.arange(1, L + 1))
    H = np.zeros((L, L), dtype=np.complex128)
    np.fill_diagonal(H, diag)
    if L > 1:
        idx = np.arange(L - 1)
        H[idx, idx + 1] = hop_super
        H[idx + 1, idx] = hop_sub
        if lattice.boundary.kind is BoundaryKind.PERIODIC:
            H[0, L - 1] = hop_sub
            H[L - 1, 0] = hop_super
    return HamiltonianBuild(
        matrix=H,
        representation=Representation.ROTATING_FRAME,
        spec=spec,
        lattice=lattice,
        drive=drive,
        time=t,
    )
