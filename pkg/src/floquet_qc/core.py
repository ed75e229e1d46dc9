"""Domain types and scalar formulas shared by every other module.

Five tight-binding chains with quasiperiodic (generally complex) onsite
potentials are supported.  With amplitude ``V``, inverse-period ``alpha`` and
site index ``n`` the potentials are

* ``M1``:  V * exp(-i 2 pi alpha n)
* ``M2``:  V * cos(2 pi alpha n + i gamma)
* ``M3``:  V * cos(2 pi alpha n)             (non-Hermiticity sits in the
  hopping instead: J_L = J e^{+gamma} leftward, J_R = J e^{-gamma} rightward)
* ``M4``:  V * tan(pi alpha n + i gamma)     (Maryland-type, unbounded)
* ``M5``:  V / (1 - eta * exp(i 2 pi alpha n))

A sinusoidal force of amplitude ``K`` and frequency ``omega`` dresses every
hopping amplitude by the Bessel factor J0(K/omega): the high-frequency
effective Hamiltonian keeps the static potential and multiplies nearest-
neighbor hoppings by J0(K/omega) (photon-dressed hopping).

Site indices run n = 1 ... L; site L doubles as site 0 for the symmetry checks
(all potentials are periodic with period L once alpha = p/L is rational).
Complex energies and potentials are carried as plain Python/numpy complex
numbers; matrices are dense complex128 numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import ConfigError, InvalidEta, SingularPotential

#: denominator magnitude below which M4/M5 potentials count as singular
SINGULAR_POTENTIAL_TOL = 1e-12

#: default production lattice (consecutive Fibonacci numbers)
PRODUCTION_L, PRODUCTION_ALPHA = 610, (377, 610)
#: default desk-scale test lattice
TEST_L, TEST_ALPHA = 89, (55, 89)


class Model(enum.Enum):
    """The five chain models."""

    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    M4 = "M4"
    M5 = "M5"


class BoundaryKind(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"
    TWISTED = "twisted"


@dataclass(frozen=True)
class Boundary:
    """Boundary condition: open, periodic, or periodic with a twist angle.

    The meaning of the twist angle theta is model specific (it reproduces the
    twist entering each model's winding-number construction):

    * M1: corner hoppings acquire phases e^{-i theta} (top-right) and
      e^{+i theta} (bottom-left) -- exploratory real-space variant, see
      :mod:`floquet_qc.winding`;
    * M2, M4, M5: the potential argument is shifted by theta / L;
    * M3: corner hoppings become J_L J0 e^{-i theta} / J_R J0 e^{+i theta}.
    """

    kind: BoundaryKind
    theta: float = 0.0

    def __post_init__(self):
        if self.kind is not BoundaryKind.TWISTED and self.theta != 0.0:
            raise ConfigError("theta is only meaningful for twisted boundaries")
        if not math.isfinite(self.theta):
            raise ConfigError("twist angle theta must be finite")

    @staticmethod
    def open() -> "Boundary":
        return Boundary(BoundaryKind.OPEN)

    @staticmethod
    def periodic() -> "Boundary":
        return Boundary(BoundaryKind.PERIODIC)

    @staticmethod
    def twisted(theta: float) -> "Boundary":
        return Boundary(BoundaryKind.TWISTED, float(theta))


OPEN = Boundary.open()
PERIODIC = Boundary.periodic()


@dataclass(frozen=True)
class ModelSpec:
    """Which model plus its physical parameters.

    Parameters unused by a model must be left at zero (``gamma`` is used by
    M2/M3/M4, ``eta`` only by M5).  ``J = 0`` is permitted -- the Hamiltonian
    degenerates to its diagonal -- and is exposed through
    :attr:`is_diagonal_only` rather than rejected.
    """

    model_id: Model
    J: float
    V: float
    gamma: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("J", "V", "gamma", "eta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"model parameter {name} must be finite", key=f"model.{name}")
        uses_gamma = self.model_id in (Model.M2, Model.M3, Model.M4)
        if not uses_gamma and self.gamma != 0.0:
            raise ConfigError(
                f"gamma is not a parameter of {self.model_id.value}", key="model.gamma"
            )
        if self.model_id is Model.M5:
            if not (self.eta > 0.0) or self.eta == 1.0:
                raise InvalidEta(self.eta)
        elif self.eta != 0.0:
            raise ConfigError(
                f"eta is not a parameter of {self.model_id.value}", key="model.eta"
            )

    @property
    def is_diagonal_only(self) -> bool:
        """True when J = 0, i.e. the chain carries no hopping at all."""
        return self.J == 0.0


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice length and the rational quasiperiodicity approximant alpha = p/q.

    ``gcd(p, q) = 1`` and ``p < q`` always; periodic and twisted runs require
    ``q = L`` so the discrete Fourier duality between real- and momentum-space
    representations is exact.
    """

    L: int
    alpha_num: int
    alpha_den: int
    boundary: Boundary = PERIODIC

    def __post_init__(self):
        if self.L < 1:
            raise ConfigError("lattice length L must be a positive integer", key="lattice.L")
        p, q = self.alpha_num, self.alpha_den
        if p < 1 or q < 1:
            raise ConfigError("alpha = p/q needs positive integers p, q", key="lattice.alpha")
        if p >= q:
            raise ConfigError("alpha = p/q requires p < q", key="lattice.alpha")
        if gcd(p, q) != 1:
            raise ConfigError("alpha = p/q must be in lowest terms", key="lattice.alpha")
        if self.boundary.kind is not BoundaryKind.OPEN and q != self.L:
            raise ConfigError(
                "periodic/twisted boundaries require alpha denominator q = L",
                key="lattice.alpha",
            )

    @property
    def alpha(self) -> float:
        return self.alpha_num / self.alpha_den


@dataclass(frozen=True)
class DriveConfig:
    """Drive amplitude/frequency ratio K/omega, and optionally omega itself.

    Only the ratio enters the effective Hamiltonian; the frequency is needed
    just for real-time propagation (the rotating-frame validator).
    """

    K_over_omega: float = 0.0
    omega: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.K_over_omega) or self.K_over_omega < 0.0:
            raise ConfigError(
                "K_over_omega must be finite and >= 0", key="drive.K_over_omega"
            )
        if self.omega is not None and not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ConfigError("omega must be finite and > 0 when given", key="drive.omega")


STATIC_DRIVE = DriveConfig(0.0)


# ---------------------------------------------------------------------------
# scalar formulas
# ---------------------------------------------------------------------------


def effective_hopping(J: float, k_over_w: float) -> float:
    """Photon-dressed hopping amplitude J * J0(K/omega).

    Averaging the oscillating Peierls phase over one drive period renormalizes
    every nearest-neighbor hopping by the order-zero Bessel function of the
    drive ratio.  Even in ``k_over_w``, linear in ``J``.
    """
    from .numerics import bessel_j0

    return J * bessel_j0(k_over_w)


def quasiperiodic_angles(
    lattice: LatticeConfig, n: np.ndarray, *, half: bool = False, shift: float = 0.0
) -> np.ndarray:
    """Return (2 pi alpha n + shift) -- or (pi alpha n + shift) when ``half``.

    Computed through the exact integer residue (p * n) mod q, so the result is
    bit-identical under n -> n + L and never loses precision at large n.
    """
    p, q = lattice.alpha_num, lattice.alpha_den
    residues = (p * n.astype(np.int64)) % q
    base = math.pi if half else 2.0 * math.pi
    return base * residues / q + shift


def onsite_potential_array(
    spec: ModelSpec,
    lattice: LatticeConfig,
    n: np.ndarray,
    arg_shift: float = 0.0,
) -> np.ndarray:
    """Vectorized onsite potentials V_n for the sites in ``n`` (1-based).

    ``arg_shift`` adds a constant to the quasiperiodic argument (2 pi alpha n
    or, for M4, pi alpha n); the twisted-boundary constructions of M2/M4/M5
    use it with ``arg_shift = theta / L``.

    Raises :class:`SingularPotential` when an M4/M5 denominator falls below
    ``SINGULAR_POTENTIAL_TOL``.
    """
    n = np.asarray(n)
    m = spec.model_id
    V = spec.V
    if m is Model.M1:
        return V * np.exp(-1j * quasiperiodic_angles(lattice, n, half=False, shift=arg_shift))
    if m is Model.M2:
        return V * np.cos(quasiperiodic_angles(lattice, n, half=False, shift=arg_shift) + 1j * spec.gamma)
    if m is Model.M3:
        return V * np.cos(quasiperiodic_angles(lattice, n, half=False, shift=arg_shift)) + 0j
    if m is Model.M4:
        z = quasiperiodic_angles(lattice, n, half=True, shift=arg_shift) + 1j * spec.gamma
        cos_z = np.cos(z)
        bad = np.abs(cos_z) < SINGULAR_POTENTIAL_TOL
        if np.any(bad):
            site = int(n[np.argmax(bad)])
            raise SingularPotential("M4", site, float(np.min(np.abs(cos_z))))
        return V * np.sin(z) / cos_z
    if m is Model.M5:
        denom = 1.0 - spec.eta * np.exp(1j * quasiperiodic_angles(lattice, n, half=False, shift=arg_shift))
        bad = np.abs(denom) < SINGULAR_POTENTIAL_TOL
        if np.any(bad):
            site = int(n[np.argmax(bad)])
            raise SingularPotential("M5", site, float(np.min(np.abs(denom))))
        return V / denom
    raise AssertionError(f"unreachable model {m}")


def onsite_potential(spec: ModelSpec, lattice: LatticeConfig, n: int) -> complex:
    """Onsite potential V_n at a single site n (1 <= n <= L)."""
    if not 1 <= n <= lattice.L:
        raise ConfigError(f"site index n={n} outside 1..L={lattice.L}")
    return complex(onsite_potential_array(spec, lattice, np.array([n]))[0])
