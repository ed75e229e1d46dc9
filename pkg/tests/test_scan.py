"""Two-parameter scan engine: determinism, classification, error capture."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from threadpoolctl import threadpool_limits

from floquet_qc import (
    AxisSpec,
    DriveConfig,
    LatticeConfig,
    Model,
    ModelSpec,
    PhaseGrid,
    ScanConfig,
    STATIC_DRIVE,
    bessel_j0,
    classify_phase,
    compute_winding,
    m4_boundaries,
    run_scan,
    spectrum_report,
)
from floquet_qc.errors import ConfigError

BESSEL_ZERO = 2.404825557695773


def m1_config(lat, **kwargs) -> ScanConfig:
    defaults = dict(
        spec=ModelSpec(Model.M1, J=1.0, V=1.0),
        lattice=lat,
        drive=STATIC_DRIVE,
        axis1=AxisSpec("V", 0.5, 1.5, 3),
        axis2=AxisSpec("K_over_omega", 0.0, 2.0, 3),
    )
    defaults.update(kwargs)
    return ScanConfig(**defaults)


class TestAxisAndConfigValidation:
    def test_unknown_parameter(self):
        with pytest.raises(ConfigError):
            AxisSpec("omega", 0.0, 1.0, 5)

    def test_reversed_bounds(self):
        with pytest.raises(ConfigError):
            AxisSpec("V", 2.0, 1.0, 5)

    def test_nonfinite_bounds(self):
        with pytest.raises(ConfigError):
            AxisSpec("V", 0.0, float("inf"), 5)

    def test_zero_points(self):
        with pytest.raises(ConfigError):
            AxisSpec("V", 0.0, 1.0, 0)

    def test_single_point_axis_allowed(self):
        axis = AxisSpec("V", 0.7, 0.7, 1)
        assert axis.values().tolist() == [0.7]

    def test_duplicate_axes_rejected(self, lat34):
        with pytest.raises(ConfigError):
            m1_config(lat34, axis1=AxisSpec("V", 0.0, 1.0, 3), axis2=AxisSpec("V", 0.0, 2.0, 3))

    def test_gamma_axis_needs_gamma_model(self, lat34):
        with pytest.raises(ConfigError):
            m1_config(lat34, axis2=AxisSpec("gamma", 0.0, 1.0, 3))

    def test_eta_axis_needs_m5(self, lat34):
        with pytest.raises(ConfigError):
            m1_config(
                lat34,
                spec=ModelSpec(Model.M2, J=1.0, V=1.0, gamma=0.3),
                axis2=AxisSpec("eta", 0.1, 0.9, 3),
            )

    def test_workers_validated(self, lat34):
        with pytest.raises(ConfigError):
            run_scan(m1_config(lat34), workers=0)


class TestGridGeometry:
    def test_row_major_order_and_indexing(self, lat34):
        grid = run_scan(m1_config(lat34))
        assert isinstance(grid, PhaseGrid)
        assert grid.shape == (3, 3)
        assert len(grid.cells) == 9
        v_vals = np.linspace(0.5, 1.5, 3)
        k_vals = np.linspace(0.0, 2.0, 3)
        for i1 in range(3):
            for i2 in range(3):
                cell = grid.cell(i1, i2)
                assert cell.index1 == i1 and cell.index2 == i2
                assert cell.param1 == v_vals[i1]
                assert cell.param2 == k_vals[i2]
                # row-major: linear position i1 * n2 + i2
                assert grid.cells[i1 * 3 + i2] is cell

    def test_out_of_range_indexing(self, lat34):
        grid = run_scan(m1_config(lat34, axis1=AxisSpec("V", 0.5, 1.5, 2)))
        with pytest.raises(IndexError):
            grid.cell(2, 0)
        with pytest.raises(IndexError):
            grid.cell(0, -1)


class TestSinglePointGrid:
    def test_one_by_one_matches_direct_computation(self, lat89):
        spec = ModelSpec(Model.M1, J=1.0, V=1.5)
        drive = DriveConfig(K_over_omega=0.5)
        config = ScanConfig(
            spec=ModelSpec(Model.M1, J=1.0, V=1.0),
            lattice=lat89,
            drive=STATIC_DRIVE,
            axis1=AxisSpec("V", 1.5, 1.5, 1),
            axis2=AxisSpec("K_over_omega", 0.5, 0.5, 1),
            compute_winding=True,
        )
        grid = run_scan(config)
        assert grid.shape == (1, 1)
        cell = grid.cell(0, 0)
        # the cell pins its linear algebra to one thread; mirror that here so
        # the comparison is bit-exact, not merely close
        with threadpool_limits(limits=1):
            report = spectrum_report(spec, lat89, drive)
            classified = classify_phase(spec, drive, report)
            winding = compute_winding(spec, lat89, drive)
        assert cell.error is None
        assert cell.max_abs_im == report.max_abs_im
        assert cell.min_ipr == report.min_ipr
        assert cell.max_ipr == report.max_ipr
        assert cell.windings == winding.windings == (-1,)
        assert cell.phase_label == classified.phase.value == "Localized"
        assert cell.conflict == classified.conflict
        assert cell.lyapunov_sign == 1

    def test_lyapunov_sign_when_hopping_dressed_away(self, lat34):
        config = ScanConfig(
            spec=ModelSpec(Model.M1, J=1.0, V=1.0),
            lattice=lat34,
            drive=STATIC_DRIVE,
            axis1=AxisSpec("V", 1.0, 1.0, 1),
            axis2=AxisSpec("K_over_omega", BESSEL_ZERO, BESSEL_ZERO, 1),
        )
        cell = run_scan(config).cell(0, 0)
        assert cell.error is None
        assert cell.lyapunov_sign == 1
        assert cell.phase_label == "Localized"
        assert cell.conflict is None
        assert cell.min_ipr == pytest.approx(1.0, abs=1e-6)


class TestDeterminism:
    def test_worker_count_never_changes_results(self, lat34):
        config = m1_config(lat34, compute_winding=True)
        serial = run_scan(config, workers=1)
        parallel = run_scan(config, workers=2)
        assert serial == parallel
        assert repr(serial.cells) == repr(parallel.cells)


class TestPhysicsAcrossRows:
    def test_m1_alternation_along_fixed_v_row(self, lat89):
        # |J J0(K/w)| crosses V = 0.3 twice on K/w in [0, 4]: the label
        # sequence collapses to Extended -> Localized -> Extended
        config = ScanConfig(
            spec=ModelSpec(Model.M1, J=1.0, V=1.0),
            lattice=lat89,
            drive=STATIC_DRIVE,
            axis1=AxisSpec("V", 0.3, 0.3, 1),
            axis2=AxisSpec("K_over_omega", 0.0, 4.0, 41),
        )
        grid = run_scan(config)
        labels = [grid.cell(0, i).phase_label for i in range(41)]
        assert all(grid.cell(0, i).error is None for i in range(41))
        collapsed = [labels[0]]
        for lab in labels[1:]:
            if lab != collapsed[-1]:
                collapsed.append(lab)
        assert collapsed == ["Extended", "Localized", "Extended"]
        # away from the crossings each label follows the dressed-hopping rule,
        # and the closed-form Lyapunov sign agrees with it
        for i in range(41):
            cell = grid.cell(0, i)
            margin = abs(abs(bessel_j0(cell.param2)) - 0.3)
            if margin < 0.02:
                continue
            expected = "Extended" if abs(bessel_j0(cell.param2)) > 0.3 else "Localized"
            assert cell.phase_label == expected, f"cell K/w={cell.param2}"
            assert (cell.lyapunov_sign > 0) == (expected == "Localized")

    def test_m4_winding_regions_track_boundaries(self, lat89):
        spec = ModelSpec(Model.M4, J=2.0, V=1.0, gamma=0.3)
        config = ScanConfig(
            spec=spec,
            lattice=lat89,
            drive=STATIC_DRIVE,
            axis1=AxisSpec("gamma", 0.1, 0.55, 10),
            axis2=AxisSpec("K_over_omega", 0.0, 0.0, 1),
            compute_winding=True,
        )
        grid = run_scan(config)
        b = m4_boundaries(spec, STATIC_DRIVE)
        step = (0.55 - 0.1) / 9
        allowed = {(1, 1), (0, 1), (0, 0)}
        for i in range(10):
            cell = grid.cell(i, 0)
            assert cell.error is None
            assert cell.windings in allowed
            assert cell.lyapunov_sign is None
            g = cell.param1
            if g < b.gamma1 - step:
                assert cell.windings == (1, 1) and cell.phase_label == "Localized"
            elif b.gamma1 + step < g < b.gamma2 - step:
                assert cell.windings == (0, 1) and cell.phase_label == "MobilityEdge"
            elif g > b.gamma2 + step:
                assert cell.windings == (0, 0) and cell.phase_label == "Extended"


class TestErrorCapture:
    def test_invalid_cell_recorded_not_raised(self, lat34):
        # the eta sweep steps through the excluded point eta = 1
        config = ScanConfig(
            spec=ModelSpec(Model.M5, J=1.0, V=1.0, eta=0.5),
            lattice=lat34,
            drive=STATIC_DRIVE,
            axis1=AxisSpec("eta", 0.5, 1.5, 3),
            axis2=AxisSpec("K_over_omega", 0.0, 0.0, 1),
        )
        grid = run_scan(config)
        good_low, bad, good_high = (grid.cell(i, 0) for i in range(3))
        assert bad.error is not None and "InvalidEta" in bad.error
        assert math.isnan(bad.max_abs_im)
        assert bad.phase_label is None and bad.windings is None
        for cell in (good_low, good_high):
            assert cell.error is None
            assert cell.phase_label is not None
            assert math.isfinite(cell.max_abs_im)

    def test_skipping_vectors_skips_iprs_only(self, lat34):
        config = m1_config(lat34, compute_ipr=False)
        for cell in run_scan(config).cells:
            assert cell.error is None
            assert math.isnan(cell.min_ipr) and math.isnan(cell.max_ipr)
            assert cell.phase_label in ("Extended", "Localized")
            assert math.isfinite(cell.max_abs_im)


class TestRuntimeScaling:
    def test_cell_cost_flat_in_grid_size(self, lat89):
        # per-cell average time must not grow with cell count (superlinear
        # scaling guard); a warmup scan absorbs one-time library setup
        def per_cell_seconds(n: int) -> float:
            config = ScanConfig(
                spec=ModelSpec(Model.M1, J=1.0, V=1.0),
                lattice=lat89,
                drive=STATIC_DRIVE,
                axis1=AxisSpec("V", 0.5, 1.5, n),
                axis2=AxisSpec("K_over_omega", 0.0, 2.0, n),
            )
            t0 = time.perf_counter()
            grid = run_scan(config)
            elapsed = time.perf_counter() - t0
            assert all(c.error is None for c in grid.cells)
            return elapsed / (n * n)

        per_cell_seconds(2)  # warmup
        small = per_cell_seconds(4)
        large = per_cell_seconds(8)
        assert large <= 1.3 * small, f"per-cell time grew {large / small:.2f}x"
