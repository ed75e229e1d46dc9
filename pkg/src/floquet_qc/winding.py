"""Spectral winding numbers over boundary-twist loops.

The winding number of the determinant det[H(theta) - E_B] around a base
quasienergy E_B, as theta traverses one twist cycle, is the integer

    w = (1/2pi) * (unwrapped total change of arg det[H(theta) - E_B]).

Each model carries its own twist construction:

* M1 -- momentum representation; the top-right corner element acquires a
  phase e^{-i theta}, theta in [0, 2pi).  (A real-space corner twist is
  exposed behind ``real_space_twist=True`` as an experimental variant; the
  two integers are not asserted to agree.)
* M2, M5 -- the potential argument is shifted by theta/L, theta in [0, 2pi).
* M4 -- the potential argument is shifted by theta/L, theta in [0, pi); the
  tangent potential has period pi in its argument, so this is one full
  cycle.  The accumulated phase is still divided by 2pi.
* M3 -- real-space corner phases e^{-i theta} / e^{+i theta}, theta in
  [0, 2pi).

Base energies: E_0 = 0 for M1/M2/M3; the dual pair E_1 = iV and
E_2 = 2 J J0(K/omega) + iV for M4, each displaced by -i*eps off the
spectral arc they nominally sit on; E_c + i*offset for M5 (the mobility
edge shifted off the real axis).

Phase increments are accumulated on a theta grid (default 256 points) and
unwrapped step by step; the grid is doubled (up to 4096) whenever a single
step reaches pi/2 or the total misses an integer by 0.05 or more.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Boundary, BoundaryKind, DriveConfig, LatticeConfig, Model, ModelSpec, effective_hopping
from .errors import BaseOnSpectrum, ConfigError, NonIntegerWinding, SingularMatrix, UnsupportedModel
from .hamiltonian import build_momentum_space, build_real_space
from .numerics import det_phase_and_log_abs, eig_dense
from .observables import mobility_edge_m5

#: base considered to sit on the spectrum below this distance
ON_SPECTRUM_TOL = 1e-8
#: adaptive refinement cap for the theta grid
MAX_N_THETA = 4096
#: acceptance threshold for |total/2pi - nearest integer|
RESIDUAL_TOL = 0.05

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WindingResult:
    """Winding integers of one model at its canonical base energies."""

    model_id: Model
    base_energies: tuple[complex, ...]
    windings: tuple[int, ...]
    n_theta: int
    max_phase_step: float


def _require_loop_lattice(lattice: LatticeConfig) -> None:
    if lattice.boundary.kind is not BoundaryKind.PERIODIC:
        raise ConfigError(
            "winding loops start from a periodic lattice (the twist is applied internally)",
            key="lattice.boundary",
        )


def _theta_range(model_id: Model) -> float:
    return math.pi if model_id is Model.M4 else _TWO_PI


def _loop_builder(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    real_space_twist: bool,
) -> Callable[[float], np.ndarray]:
    """Return a closure theta -> H(theta) for the model's twist construction."""
    if spec.model_id is Model.M1 and not real_space_twist:
        H0 = build_momentum_space(spec, lattice, drive).matrix
        corner = H0[0, -1]

        def at_theta(theta: float) -> np.ndarray:
            H = H0.copy()
            H[0, -1] = corner * cmath.exp(-1j * theta)
            return H

        return at_theta

    def at_theta(theta: float) -> np.ndarray:
        twisted = dataclasses.replace(lattice, boundary=Boundary.twisted(theta))
        return build_real_space(spec, twisted, drive).matrix

    return at_theta


def _winding_engine(
    at_theta: Callable[[float], np.ndarray],
    bases: Sequence[complex],
    n_theta: int,
    theta_range: float,
) -> tuple[tuple[int, ...], int, float]:
    """Unwrapped determinant-phase winding of several bases over one loop.

    All bases share the theta grid (and each H(theta) build); the grid is
    refined until every base has sub-pi/2 steps and a near-integer total.
    """
    if n_theta < 64:
        raise ConfigError("n_theta must be at least 64", key="winding.n_theta")
    H0 = at_theta(0.0)
    values = eig_dense(H0).values
    for base in bases:
        gap = float(np.min(np.abs(values - base)))
        if gap < ON_SPECTRUM_TOL:
            raise BaseOnSpectrum(
                f"base {base} lies on the spectrum (distance {gap:.3e} at theta=0)"
            )

    n = n_theta
    while True:
        thetas = np.linspace(0.0, theta_range, n + 1)
        phases = np.empty((len(bases), n + 1))
        for k, theta in enumerate(thetas):
            H = at_theta(theta)
            diag = np.diag_indices(H.shape[0])
            for b, base in enumerate(bases):
                A = H.copy()
                A[diag] -= base
                try:
                    phases[b, k], _ = det_phase_and_log_abs(A)
                except SingularMatrix as exc:
                    raise BaseOnSpectrum(
                        f"det[H(theta) - base] singular at theta={theta:.6f} for base {base}"
                    ) from exc
        deltas = np.remainder(np.diff(phases, axis=1) + math.pi, _TWO_PI) - math.pi
        max_step = float(np.max(np.abs(deltas)))
        totals = deltas.sum(axis=1)
        raw = totals / _TWO_PI
        residual = float(np.max(np.abs(raw - np.round(raw))))
        if max_step < math.pi / 2.0 and residual < RESIDUAL_TOL:
            return tuple(int(round(x)) for x in raw), n, max_step
        if n >= MAX_N_THETA:
            raise NonIntegerWinding(
                f"no integer winding at n_theta={n}: residual={residual:.3f}, "
                f"max step={max_step:.3f} rad"
            )
        n = min(2 * n, MAX_N_THETA)


def winding_number(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    base: complex,
    n_theta: int = 256,
    real_space_twist: bool = False,
) -> int:
    """Winding of det[H(theta) - base] over the model's twist loop.

    ``real_space_twist`` applies only to M1 and swaps its canonical
    momentum-corner twist for the experimental real-space corner variant.
    """
    _require_loop_lattice(lattice)
    at_theta = _loop_builder(spec, lattice, drive, real_space_twist)
    windings, _, _ = _winding_engine(at_theta, [complex(base)], n_theta, _theta_range(spec.model_id))
    return windings[0]


def _m4_windings(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    n_theta: int,
) -> tuple[tuple[int, ...], int, float, tuple[complex, ...]]:
    """Engine run at the M4 dual bases, displaced off the spectral arc.

    The nominal bases E1 = iV and E2 = 2 J J0 + iV lie ON the spectrum by
    construction whenever the extended arc 2 J J0 cos(beta) + iV is
    occupied: E2 is its endpoint (hit exactly whenever 4 | L puts beta = 0
    on the quasimomentum grid) and E1 its midpoint (beta = pi/2).  Even
    when the coincidence is inexact, the twist flow carries eigenvalues
    *along* the arc, sweeping past a base at distances far below any
    useful on-spectrum threshold and poisoning the accumulated phase.
    A point on the arc encloses no area of its own, so the integer is the
    common value of every infinitesimal displacement; both bases are
    therefore always evaluated at E - i * 1e-4 * max(1, |E2|) -- a finite
    stand-in for -i0+, above eigenvalue noise yet far below loop scales --
    which cannot change the integer of a base strictly off the spectrum.
    """
    jeff = effective_hopping(spec.J, drive.K_over_omega)
    nominal = (1j * spec.V, 2.0 * jeff + 1j * spec.V)
    shift = -1j * 1e-4 * max(1.0, abs(nominal[1]))
    bases = (nominal[0] + shift, nominal[1] + shift)
    at_theta = _loop_builder(spec, lattice, drive, real_space_twist=False)
    windings, n_used, max_step = _winding_engine(
        at_theta, bases, n_theta, _theta_range(Model.M4)
    )
    return windings, n_used, max_step, bases


def winding_pair_m4(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    n_theta: int = 256,
) -> tuple[int, int]:
    """The M4 pair (w1, w2) at bases E1 = iV and E2 = 2 J J0 + iV.

    (1, 1) marks the localized phase, (0, 1) the mobility-edge phase and
    (0, 0) the extended phase.  Both bases sit on the extended spectral arc
    by construction, so they are evaluated at a small negative imaginary
    displacement off it (see :func:`_m4_windings`).
    """
    if spec.model_id is not Model.M4:
        raise UnsupportedModel(f"winding_pair_m4 applies to M4 only, got {spec.model_id.value}")
    _require_loop_lattice(lattice)
    windings, _, _, _ = _m4_windings(spec, lattice, drive, n_theta)
    return windings[0], windings[1]


def default_offset_im(spec: ModelSpec, drive: DriveConfig) -> float:
    """Default imaginary offset lifting the M5 base off the real axis."""
    return 1e-4 * max(1.0, abs(mobility_edge_m5(spec, drive)))


def winding_m5(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    offset_im: float | None = None,
    n_theta: int = 256,
) -> int:
    """M5 winding at the base E_c + i*offset_im; 1 in the mobility-edge phase.

    ``offset_im`` defaults to 1e-4 * max(1, |E_c|): a finite stand-in for the
    infinitesimal i0+, above eigenvalue noise yet below loop scales.
    """
    if spec.model_id is not Model.M5:
        raise UnsupportedModel(f"winding_m5 applies to M5 only, got {spec.model_id.value}")
    _require_loop_lattice(lattice)
    if offset_im is None:
        offset_im = default_offset_im(spec, drive)
    if not offset_im > 0.0:
        raise ConfigError("offset_im must be positive", key="winding.offset_im")
    base = mobility_edge_m5(spec, drive) + 1j * offset_im
    at_theta = _loop_builder(spec, lattice, drive, real_space_twist=False)
    windings, _, _ = _winding_engine(at_theta, [base], n_theta, _theta_range(Model.M5))
    return windings[0]


def compute_winding(
    spec: ModelSpec,
    lattice: LatticeConfig,
    drive: DriveConfig,
    n_theta: int = 256,
    real_space_twist: bool = False,
    base_override: complex | None = None,
    offset_im: float | None = None,
) -> WindingResult:
    """Winding numbers at the model's canonical base energies.

    M1/M2/M3 use the single base E_0 = 0 (or ``base_override``); M4 the dual
    pair (iV, 2JJ0 + iV); M5 the shifted mobility edge E_c + i*offset_im.
    """
    _require_loop_lattice(lattice)
    m = spec.model_id
    if m is Model.M4:
        windings, n_used, max_step, bases = _m4_windings(spec, lattice, drive, n_theta)
        return WindingResult(
            model_id=m,
            base_energies=bases,
            windings=windings,
            n_theta=n_used,
            max_phase_step=max_step,
        )
    if m is Model.M5:
        if offset_im is None:
            offset_im = default_offset_im(spec, drive)
        if not offset_im > 0.0:
            raise ConfigError("offset_im must be positive", key="winding.offset_im")
        bases = [mobility_edge_m5(spec, drive) + 1j * offset_im]
    else:
        bases = [0.0 + 0.0j if base_override is None else complex(base_override)]
    at_theta = _loop_builder(spec, lattice, drive, real_space_twist)
    windings, n_used, max_step = _winding_engine(at_theta, bases, n_theta, _theta_range(m))
    return WindingResult(
        model_id=m,
        base_energies=tuple(bases),
        windings=windings,
        n_theta=n_used,
        max_phase_step=max_step,
    )
