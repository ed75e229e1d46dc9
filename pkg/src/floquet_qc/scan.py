"""Parallel two-parameter sweeps producing phase-diagram grids.

A scan fixes a model template and varies two of {V, gamma, eta,
K_over_omega} over a rectangular grid.  Every cell diagonalizes its
effective Hamiltonian, records the spectrum summaries (max |Im E|, IPR
extremes), the sign of the closed-form Lyapunov exponent (M1-M3), the
analytic phase label, and optionally the winding number(s).

Determinism contract: cells are generated and assembled in row-major order
(axis1 outer, axis2 inner) into a preallocated sequence, each cell pins its
linear-algebra backend to one thread, and worker count never influences the
numbers -- serializing the same grid with 1 or 8 workers yields identical
bytes.  Per-cell failures are recorded in the cell's ``error`` field and
never abort the grid.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from . import winding as winding_mod
from .core import DriveConfig, LatticeConfig, Model, ModelSpec
from .errors import ConfigError, FloquetQCError, HoppingZero
from .observables import classify_phase, lyapunov_analytic, spectrum_report

#: parameters an axis may sweep
AXIS_PARAMETERS = ("V", "gamma", "eta", "K_over_omega")

_GAMMA_MODELS = (Model.M2, Model.M3, Model.M4)
_LYAPUNOV_SIGN_MODELS = (Model.M1, Model.M2, Model.M3)


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: name, closed range, and point count.

    A single-point axis (n_points = 1) pins the parameter at ``min``.
    """

    parameter: str
    min: float
    max: float
    n_points: int

    def __post_init__(self) -> None:
        if self.parameter not in AXIS_PARAMETERS:
            raise ConfigError(
                f"axis parameter must be one of {AXIS_PARAMETERS}, got {self.parameter!r}",
                key="scan.axis",
            )
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError("axis bounds must be finite", key="scan.axis")
        if self.max < self.min:
            raise ConfigError("axis max must be >= min", key="scan.axis")
        if self.n_points < 1:
            raise ConfigError("axis n_points must be >= 1", key="scan.axis")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n_points)


@dataclass(frozen=True)
class ScanConfig:
    """Template point plus two swept axes and per-cell measurement flags."""

    spec: ModelSpec
    lattice: LatticeConfig
    drive: DriveConfig
    axis1: AxisSpec
    axis2: AxisSpec
    compute_winding: bool = False
    n_theta: int = 256
    compute_ipr: bool = True

    def __post_init__(self) -> None:
        if self.axis1.parameter == self.axis2.parameter:
            raise ConfigError("the two axes must sweep distinct parameters", key="scan.axis2")
        for axis in (self.axis1, self.axis2):
            p = axis.parameter
            if p == "gamma" and self.spec.model_id not in _GAMMA_MODELS:
                raise ConfigError(
                    f"gamma is not a parameter of {self.spec.model_id.value}", key="scan.axis"
                )
            if p == "eta" and self.spec.model_id is not Model.M5:
                raise ConfigError(
                    f"eta is not a parameter of {self.spec.model_id.value}", key="scan.axis"
                )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.n_points, self.axis2.n_points)


@dataclass(frozen=True)
class CellResult:
    """Measurements of one grid point; ``error`` records a per-cell failure."""

    index1: int
    index2: int
    param1: float
    param2: float
    max_abs_im: float = float("nan")
    min_ipr: float = float("nan")
    max_ipr: float = float("nan")
    lyapunov_sign: int | None = None
    windings: tuple[int, ...] | None = None
    phase_label: str | None = None
    conflict: str | None = None
    error: str | None = None


@dataclass(frozen=True)
class PhaseGrid:
    """Row-major cell results (axis1 outer) plus the full config echo."""

    config: ScanConfig
    cells: tuple[CellResult, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.config.shape

    def cell(self, i1: int, i2: int) -> CellResult:
        n1, n2 = self.shape
        if not (0 <= i1 < n1 and 0 <= i2 < n2):
            raise IndexError(f"cell ({i1}, {i2}) outside grid {self.shape}")
        return self.cells[i1 * n2 + i2]


def _apply_parameter(
    spec: ModelSpec, drive: DriveConfig, name: str, value: float
) -> tuple[ModelSpec, DriveConfig]:
    if name == "K_over_omega":
        return spec, dataclasses.replace(drive, K_over_omega=value)
    return dataclasses.replace(spec, **{name: value}), drive


def _lyapunov_sign(spec: ModelSpec, drive: DriveConfig) -> int | None:
    if spec.model_id not in _LYAPUNOV_SIGN_MODELS:
        return None
    try:
        lam = lyapunov_analytic(spec, drive)
    except HoppingZero:
        # dressed hopping vanished: the potential always wins
        return 1
    if lam == 0.0:
        return 0
    return 1 if lam > 0.0 else -1


@dataclass(frozen=True)
class _CellTask:
    """One cell's inputs; ``config_error`` short-circuits the computation."""

    index1: int
    index2: int
    param1: float
    param2: float
    spec: ModelSpec | None
    lattice: LatticeConfig
    drive: DriveConfig | None
    compute_ipr: bool
    compute_winding: bool
    n_theta: int
    config_error: str | None = None


def _compute_cell(task: _CellTask) -> CellResult:
    i1, i2, v1, v2 = task.index1, task.index2, task.param1, task.param2
    if task.config_error is not None:
        return CellResult(index1=i1, index2=i2, param1=v1, param2=v2, error=task.config_error)
    spec, lattice, drive = task.spec, task.lattice, task.drive
    compute_ipr, want_winding, n_theta = task.compute_ipr, task.compute_winding, task.n_theta
    with threadpool_limits(limits=1):
        try:
            report = spectrum_report(spec, lattice, drive, want_vectors=compute_ipr)
            classified = classify_phase(spec, drive, report)
            windings = None
            if want_winding:
                result = winding_mod.compute_winding(spec, lattice, drive, n_theta=n_theta)
                windings = result.windings
            return CellResult(
                index1=i1,
                index2=i2,
                param1=v1,
                param2=v2,
                max_abs_im=report.max_abs_im,
                min_ipr=report.min_ipr,
                max_ipr=report.max_ipr,
                lyapunov_sign=_lyapunov_sign(spec, drive),
                windings=windings,
                phase_label=classified.phase.value,
                conflict=classified.conflict,
            )
        except FloquetQCError as exc:
            return CellResult(
                index1=i1,
                index2=i2,
                param1=v1,
                param2=v2,
                error=f"{type(exc).__name__}: {exc}",
            )


def _tasks(config: ScanConfig) -> list[_CellTask]:
    vals1 = config.axis1.values()
    vals2 = config.axis2.values()
    tasks = []
    for i1, v1 in enumerate(vals1):
        for i2, v2 in enumerate(vals2):
            spec, drive, err = None, None, None
            try:
                spec, drive = _apply_parameter(
                    config.spec, config.drive, config.axis1.parameter, float(v1)
                )
                spec, drive = _apply_parameter(spec, drive, config.axis2.parameter, float(v2))
            except FloquetQCError as exc:
                err = f"{type(exc).__name__}: {exc}"
            tasks.append(
                _CellTask(
                    index1=i1,
                    index2=i2,
                    param1=float(v1),
                    param2=float(v2),
                    spec=spec,
                    lattice=config.lattice,
                    drive=drive,
                    compute_ipr=config.compute_ipr,
                    compute_winding=config.compute_winding,
                    n_theta=config.n_theta,
                    config_error=err,
                )
            )
    return tasks


def run_scan(config: ScanConfig, workers: int = 1) -> PhaseGrid:
    """Evaluate every grid cell, serially or across ``workers`` processes.

    The task list, the per-cell computation, and the assembly order are all
    independent of ``workers``; only wall time changes.
    """
    if workers < 1:
        raise ConfigError("workers must be >= 1", key="workers")
    tasks = _tasks(config)
    if workers == 1 or len(tasks) == 1:
        results = [_compute_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_compute_cell, tasks, chunksize=1))
    return PhaseGrid(config=config, cells=tuple(results))
