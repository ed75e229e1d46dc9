"""Command-line front end.

    floquet-qc {spectrum|scan|winding|validate|lyapunov}
               --config <path> [--out <path>] [--format csv|json]
               [--svg] [--workers N]

Exit codes: 0 success (including scans with per-cell failures, which are
flagged in the grid and counted as warnings), 2 configuration errors, 3
numerical failures.  Every subcommand writes its outputs plus a small run
manifest (tool version, config digest, wall time, output paths, warnings);
the data files themselves are bit-reproducible, the manifest carries the
only nondeterministic field (wall time).  ``FLOQUET_QC_WORKERS`` supplies a
worker count when ``--workers`` is absent.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from typing import Callable

import numpy as np

from ._version import __version__
from .config import (
    Config,
    config_digest,
    drive_from_config,
    lattice_from_config,
    load_config,
    model_spec_from_config,
    scan_config_from_config,
    unknown_prefix_warnings,
)
from .core import Model
from .errors import ConfigError, FloquetQCError, HoppingZero, NumericalError, UnsupportedModel
from .observables import lyapunov_analytic, lyapunov_transfer_matrix, spectrum_report
from .output import (
    HEATMAP_QUANTITIES,
    grid_payload,
    render_heatmap_svg,
    write_grid_csv,
    write_json,
    write_spectrum_csv,
    write_svg,
)
from .scan import run_scan
from .validate import validate_high_frequency
from .winding import compute_winding

_ENV_WORKERS = "FLOQUET_QC_WORKERS"


def _guarded(work: Callable[[], None]) -> int:
    try:
        work()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except FloquetQCError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


def _write_manifest(
    path: str, digest: str, outputs: list[str], warnings: list[str], started: float
) -> None:
    write_json(
        path,
        {
            "kind": "run_manifest",
            "tool": "floquet-qc",
            "version": __version__,
            "config_digest": digest,
            "wall_time_s": time.perf_counter() - started,
            "outputs": outputs,
            "warnings": warnings,
        },
    )


def _point_comments(cfg: Config, digest: str) -> list[str]:
    spec = model_spec_from_config(cfg)
    lattice = lattice_from_config(cfg)
    drive = drive_from_config(cfg)
    omega_text = "none" if drive.omega is None else f"{drive.omega:g}"
    return [
        f"config_digest = {digest}",
        f"model = {spec.model_id.value}, J = {spec.J:g}, V = {spec.V:g}, "
        f"gamma = {spec.gamma:g}, eta = {spec.eta:g}",
        f"L = {lattice.L}, alpha = {lattice.alpha_num}/{lattice.alpha_den}, "
        f"boundary = {lattice.boundary.kind.value}",
        f"K_over_omega = {drive.K_over_omega:g}, omega = {omega_text}",
    ]


def cmd_spectrum(config_path: str, output_path: str | None = None, format: str = "csv") -> int:
    """Diagonalize one parameter point and write eigenvalues plus IPRs."""

    def work() -> None:
        started = time.perf_counter()
        if format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {format!r}")
        cfg = load_config(config_path)
        spec = model_spec_from_config(cfg)
        lattice = lattice_from_config(cfg)
        drive = drive_from_config(cfg)
        report = spectrum_report(spec, lattice, drive, want_vectors=True)
        digest = config_digest(cfg)
        out = output_path or f"spectrum.{format}"
        if format == "csv":
            comments = ["floquet-qc spectrum"] + _point_comments(cfg, digest)
            write_spectrum_csv(out, report, comments)
        else:
            write_json(
                out,
                {
                    "kind": "spectrum",
                    "config_digest": digest,
                    "model": spec.model_id.value,
                    "L": lattice.L,
                    "alpha": f"{lattice.alpha_num}/{lattice.alpha_den}",
                    "K_over_omega": drive.K_over_omega,
                    "eigenvalues": report.eigenvalues,
                    "iprs": report.iprs,
                    "max_abs_im": report.max_abs_im,
                    "min_ipr": report.min_ipr,
                    "max_ipr": report.max_ipr,
                },
            )
        _write_manifest(out + ".manifest.json", digest, [out], unknown_prefix_warnings(cfg), started)

    return _guarded(work)


def cmd_scan(
    config_path: str, output_dir: str = "scan_out", emit_svg: bool = False, workers: int = 1
) -> int:
    """Run a two-parameter sweep; write grid.csv, grid.json, optional SVGs."""

    def work() -> None:
        started = time.perf_counter()
        cfg = load_config(config_path)
        scan_config = scan_config_from_config(cfg)
        digest = config_digest(cfg)
        grid = run_scan(scan_config, workers=workers)
        os.makedirs(output_dir, exist_ok=True)
        csv_path = os.path.join(output_dir, "grid.csv")
        json_path = os.path.join(output_dir, "grid.json")
        write_grid_csv(csv_path, grid, digest)
        write_json(json_path, grid_payload(grid, digest))
        outputs = [csv_path, json_path]
        if emit_svg:
            requested = cfg.get_str("output.svg_quantities", "max_abs_im")
            for quantity in (q.strip() for q in requested.split(",")):
                if quantity not in HEATMAP_QUANTITIES:
                    raise ConfigError(
                        f"key 'output.svg_quantities': unknown quantity {quantity!r} "
                        f"(one of {', '.join(HEATMAP_QUANTITIES)})",
                        key="output.svg_quantities",
                    )
                svg_path = os.path.join(output_dir, f"heatmap_{quantity}.svg")
                write_svg(svg_path, render_heatmap_svg(grid, quantity))
                outputs.append(svg_path)
        warnings = unknown_prefix_warnings(cfg)
        n_failed = sum(1 for c in grid.cells if c.error is not None)
        if n_failed:
            warnings.append(f"{n_failed} of {len(grid.cells)} cells failed (see error column)")
        n_conflict = sum(1 for c in grid.cells if c.conflict is not None)
        if n_conflict:
            warnings.append(f"{n_conflict} cells report analytic/IPR classification conflicts")
        _write_manifest(os.path.join(output_dir, "manifest.json"), digest, outputs, warnings, started)

    return _guarded(work)


def cmd_winding(
    config_path: str,
    base_re: float | None = None,
    base_im: float | None = None,
    output_path: str | None = None,
) -> int:
    """Winding number(s) at the model's base energies; JSON output.

    For M1/M2/M3 the base defaults to 0 and may be moved via arguments or the
    ``winding.base_re``/``winding.base_im`` config keys; M4 always uses its
    dual pair, M5 its shifted mobility edge (``winding.offset_im``).
    """

    def work() -> None:
        started = time.perf_counter()
        cfg = load_config(config_path)
        spec = model_spec_from_config(cfg)
        lattice = lattice_from_config(cfg)
        drive = drive_from_config(cfg)
        re = cfg.get_float("winding.base_re", 0.0) if base_re is None else base_re
        im = cfg.get_float("winding.base_im", 0.0) if base_im is None else base_im
        result = compute_winding(
            spec,
            lattice,
            drive,
            n_theta=cfg.get_int("winding.n_theta", 256),
            base_override=complex(re, im),
            offset_im=cfg.get_float("winding.offset_im", None),
        )
        payload: dict = {"kind": "winding", "model": spec.model_id.value}
        if spec.model_id is Model.M4:
            payload["w1"], payload["w2"] = result.windings
        else:
            payload["w"] = result.windings[0]
        payload.update(
            {
                "windings": list(result.windings),
                "base_energies": list(result.base_energies),
                "n_theta": result.n_theta,
                "max_phase_step": result.max_phase_step,
            }
        )
        digest = config_digest(cfg)
        out = output_path or "winding.json"
        payload["config_digest"] = digest
        write_json(out, payload)
        _write_manifest(out + ".manifest.json", digest, [out], unknown_prefix_warnings(cfg), started)

    return _guarded(work)


def cmd_validate(config_path: str, output_path: str | None = None) -> int:
    """One-period propagation versus the static dressed spectrum; JSON."""

    def work() -> None:
        started = time.perf_counter()
        cfg = load_config(config_path)
        spec = model_spec_from_config(cfg)
        lattice = lattice_from_config(cfg)
        drive = drive_from_config(cfg)
        n_steps = cfg.get_int("validate.n_steps", 256)
        report = validate_high_frequency(spec, lattice, drive, n_steps=n_steps)
        gram = report.U.conj().T @ report.U
        defect = float(np.linalg.norm(gram - np.eye(gram.shape[0])))
        digest = config_digest(cfg)
        out = output_path or "validate.json"
        write_json(
            out,
            {
                "kind": "validate",
                "config_digest": digest,
                "model": spec.model_id.value,
                "n_steps": report.n_steps,
                "max_quasienergy_distance": report.max_distance,
                "unitarity_defect": defect,
            },
        )
        _write_manifest(out + ".manifest.json", digest, [out], unknown_prefix_warnings(cfg), started)

    return _guarded(work)


def cmd_lyapunov(config_path: str, output_path: str | None = None) -> int:
    """Closed-form and transfer-matrix Lyapunov exponents side by side.

    A vanishing dressed hopping is reported as a saturated value rather than
    failing; models without one of the two routes leave that field null.
    """

    def work() -> None:
        started = time.perf_counter()
        cfg = load_config(config_path)
        spec = model_spec_from_config(cfg)
        lattice = lattice_from_config(cfg)
        drive = drive_from_config(cfg)
        E = complex(cfg.get_float("lyapunov.E_re", 0.0), cfg.get_float("lyapunov.E_im", 0.0))
        warnings = unknown_prefix_warnings(cfg)

        analytic: float | None = None
        saturated = False
        saturation_value: float | None = None
        try:
            analytic = lyapunov_analytic(
                spec, drive, E if spec.model_id is Model.M4 else None
            )
        except HoppingZero as exc:
            saturated = True
            saturation_value = None if math.isinf(exc.saturation_value) else exc.saturation_value
            warnings.append(f"dressed hopping is zero: {exc}")
        except UnsupportedModel as exc:
            warnings.append(f"no closed form: {exc}")

        transfer: float | None = None
        if not saturated:
            transfer = lyapunov_transfer_matrix(
                spec,
                lattice,
                drive,
                E,
                N_sites=cfg.get_int("lyapunov.N_sites", 100_000),
                seed=cfg.get_int("lyapunov.seed", None),
            )

        finite_pair = analytic is not None and transfer is not None and math.isfinite(analytic)
        digest = config_digest(cfg)
        out = output_path or "lyapunov.json"
        write_json(
            out,
            {
                "kind": "lyapunov",
                "config_digest": digest,
                "model": spec.model_id.value,
                "E": E,
                "analytic": analytic,
                "transfer_matrix": transfer,
                "difference": abs(analytic - transfer) if finite_pair else None,
                "saturated": saturated,
                "saturation_value": saturation_value,
            },
        )
        _write_manifest(out + ".manifest.json", digest, [out], warnings, started)

    return _guarded(work)


def _workers_from_env() -> int:
    raw = os.environ.get(_ENV_WORKERS)
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{_ENV_WORKERS} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"{_ENV_WORKERS} must be >= 1, got {workers}")
    return workers


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="floquet-qc",
        description="Spectra, localization, Lyapunov exponents, winding numbers, "
        "and drive validation for five quasiperiodic lattice models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "spectrum": "diagonalize one parameter point (eigenvalues + IPRs)",
        "scan": "two-parameter phase-diagram sweep (grid.csv / grid.json / SVG)",
        "winding": "winding number(s) at the model's base energies",
        "validate": "one-period time stepping vs the static dressed spectrum",
        "lyapunov": "analytic and transfer-matrix Lyapunov exponents",
    }
    for name, help_text in helps.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", default=None, help="output file (directory for scan)")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="spectrum output format (default csv)")
        p.add_argument("--svg", action="store_true", help="scan only: emit SVG heatmaps")
        p.add_argument("--workers", type=int, default=None,
                       help=f"scan only: parallel processes (default ${_ENV_WORKERS} or 1)")
    args = parser.parse_args(argv)

    if args.workers is not None:
        workers = args.workers
        if workers < 1:
            print("config error: --workers must be >= 1", file=sys.stderr)
            return 2
    else:
        try:
            workers = _workers_from_env()
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2

    if args.command == "spectrum":
        return cmd_spectrum(args.config, args.out, args.format)
    if args.command == "scan":
        return cmd_scan(args.config, args.out or "scan_out", emit_svg=args.svg, workers=workers)
    if args.command == "winding":
        return cmd_winding(args.config, output_path=args.out)
    if args.command == "validate":
        return cmd_validate(args.config, args.out)
    return cmd_lyapunov(args.config, args.out)


if __name__ == "__main__":
    sys.exit(main())
