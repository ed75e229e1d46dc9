"""Deterministic serialization: JSON, CSV, and SVG heatmaps.

All three formats are rendered from data alone -- no timestamps, locales, or
environment details ever enter the bytes, so identical inputs give identical
files on any platform.  JSON carries 17 significant digits (machine
interchange, ``schema_version`` 1 at the top level), CSV carries 12 (human
facing, ``#``-prefixed header comments).  SVG heatmaps use a fixed
perceptually uniform color ramp over [0, max] and overlay analytic
phase-boundary polylines where the model provides a closed form (M1-M4; the
M5 boundary depends on the spectrum itself and is not overlaid).
"""

from __future__ import annotations

import json
import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DriveConfig, Model, ModelSpec, effective_hopping
from .errors import FloquetQCError
from .scan import PhaseGrid, ScanConfig, _apply_parameter

SCHEMA_VERSION = 1

#: per-cell quantities a heatmap may render
HEATMAP_QUANTITIES = ("max_abs_im", "min_ipr", "max_ipr", "lyapunov_sign")

# ---------------------------------------------------------------------------
# JSON


def _format_float_json(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return f"{x:.16e}"


def _json_fragment(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float_json(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return f'{{"re": {_format_float_json(z.real)}, "im": {_format_float_json(z.imag)}}}'
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_json_fragment(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        return "[" + ", ".join(_json_fragment(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def to_json_text(payload: dict) -> str:
    """Serialize with schema_version injected first; floats at 17 digits."""
    versioned = {"schema_version": SCHEMA_VERSION}
    versioned.update(payload)
    return _json_fragment(versioned) + "\n"


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_json_text(payload))


# ---------------------------------------------------------------------------
# CSV


def _format_float_csv(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.11e}"


def _sanitize_text(text: str) -> str:
    """Keep CSV single-line and comma-free: errors/labels become ;-joined."""
    return text.replace(",", ";").replace("\n", "; ").replace("\r", "")


def write_csv(
    path: str,
    comments: Sequence[str],
    header: Sequence[str],
    rows: Iterable[Sequence[str]],
) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def spectrum_rows(report) -> list[list[str]]:
    rows = []
    for k, value in enumerate(report.eigenvalues):
        ipr_text = "" if report.iprs is None else _format_float_csv(report.iprs[k])
        rows.append(
            [str(k), _format_float_csv(value.real), _format_float_csv(value.imag), ipr_text]
        )
    return rows


def write_spectrum_csv(path: str, report, comments: Sequence[str]) -> None:
    all_comments = list(comments) + [
        f"max_abs_im = {_format_float_csv(report.max_abs_im)}",
        f"min_ipr = {_format_float_csv(report.min_ipr)}",
        f"max_ipr = {_format_float_csv(report.max_ipr)}",
    ]
    write_csv(path, all_comments, ["index", "re_E", "im_E", "ipr"], spectrum_rows(report))


GRID_COLUMNS = (
    "param1",
    "param2",
    "max_abs_im",
    "min_ipr",
    "max_ipr",
    "lyapunov_sign",
    "winding_1",
    "winding_2",
    "phase",
    "error",
)


def _grid_row(cell) -> list[str]:
    w1 = w2 = ""
    if cell.windings is not None:
        if len(cell.windings) >= 1:
            w1 = str(cell.windings[0])
        if len(cell.windings) >= 2:
            w2 = str(cell.windings[1])
    return [
        _format_float_csv(cell.param1),
        _format_float_csv(cell.param2),
        _format_float_csv(cell.max_abs_im),
        _format_float_csv(cell.min_ipr),
        _format_float_csv(cell.max_ipr),
        "" if cell.lyapunov_sign is None else str(cell.lyapunov_sign),
        w1,
        w2,
        "" if cell.phase_label is None else _sanitize_text(cell.phase_label),
        "" if cell.error is None else _sanitize_text(cell.error),
    ]


def write_grid_csv(path: str, grid: PhaseGrid, digest: str) -> None:
    cfg = grid.config
    comments = [
        "floquet-qc phase grid (row-major: axis1 outer, axis2 inner)",
        f"config_digest = {digest}",
        f"model = {cfg.spec.model_id.value}, L = {cfg.lattice.L}, "
        f"alpha = {cfg.lattice.alpha_num}/{cfg.lattice.alpha_den}",
        f"axis1 = {cfg.axis1.parameter} in [{cfg.axis1.min:g}, {cfg.axis1.max:g}], "
        f"{cfg.axis1.n_points} points",
        f"axis2 = {cfg.axis2.parameter} in [{cfg.axis2.min:g}, {cfg.axis2.max:g}], "
        f"{cfg.axis2.n_points} points",
        "columns: axis values; spectrum summaries; sign of the closed-form Lyapunov",
        "exponent (M1-M3); winding integers (second entry M4 only); phase label;",
        "per-cell error (empty when the cell succeeded)",
    ]
    write_csv(path, comments, GRID_COLUMNS, (_grid_row(c) for c in grid.cells))


def _scan_config_payload(cfg: ScanConfig) -> dict:
    return {
        "model": {
            "id": cfg.spec.model_id.value,
            "J": cfg.spec.J,
            "V": cfg.spec.V,
            "gamma": cfg.spec.gamma,
            "eta": cfg.spec.eta,
        },
        "lattice": {
            "L": cfg.lattice.L,
            "alpha": f"{cfg.lattice.alpha_num}/{cfg.lattice.alpha_den}",
            "boundary": cfg.lattice.boundary.kind.value,
        },
        "drive": {"K_over_omega": cfg.drive.K_over_omega, "omega": cfg.drive.omega},
        "axis1": _axis_payload(cfg.axis1),
        "axis2": _axis_payload(cfg.axis2),
        "compute_winding": cfg.compute_winding,
        "n_theta": cfg.n_theta,
        "compute_ipr": cfg.compute_ipr,
    }


def _axis_payload(axis) -> dict:
    return {
        "parameter": axis.parameter,
        "min": axis.min,
        "max": axis.max,
        "n_points": axis.n_points,
    }


def grid_payload(grid: PhaseGrid, digest: str) -> dict:
    cells = []
    for c in grid.cells:
        cells.append(
            {
                "index1": c.index1,
                "index2": c.index2,
                "param1": c.param1,
                "param2": c.param2,
                "max_abs_im": c.max_abs_im,
                "min_ipr": c.min_ipr,
                "max_ipr": c.max_ipr,
                "lyapunov_sign": c.lyapunov_sign,
                "windings": None if c.windings is None else list(c.windings),
                "phase": c.phase_label,
                "conflict": c.conflict,
                "error": c.error,
            }
        )
    return {
        "kind": "phase_grid",
        "config_digest": digest,
        "config": _scan_config_payload(grid.config),
        "shape": list(grid.shape),
        "cells": cells,
    }


# ---------------------------------------------------------------------------
# SVG heatmap

_VIRIDIS = (
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
)
_MISSING_FILL = "#888888"

_MARGIN_LEFT = 70.0
_MARGIN_RIGHT = 30.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 52.0
_PLOT_W = 480.0
_PLOT_H = 480.0


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_VIRIDIS, _VIRIDIS[1:]):
        if t <= t1:
            f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*_VIRIDIS[-1][1])


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _boundary_functions(cfg: ScanConfig) -> list[Callable[[float, float], float]]:
    """Signed functions whose zero sets are the analytic phase boundaries."""

    def point(v1: float, v2: float) -> tuple[ModelSpec, DriveConfig] | None:
        try:
            spec, drive = _apply_parameter(cfg.spec, cfg.drive, cfg.axis1.parameter, v1)
            return _apply_parameter(spec, drive, cfg.axis2.parameter, v2)
        except FloquetQCError:
            return None

    model = cfg.spec.model_id

    def hopping_gap(v1: float, v2: float) -> float:
        at = point(v1, v2)
        if at is None:
            return float("nan")
        spec, drive = at
        jeff = effective_hopping(spec.J, drive.K_over_omega)
        if model is Model.M1:
            return abs(spec.V) - abs(jeff)
        if model is Model.M2:
            return abs(spec.V) * math.exp(abs(spec.gamma)) - 2.0 * abs(jeff)
        return abs(spec.V) - 2.0 * abs(jeff) * math.exp(abs(spec.gamma))

    if model in (Model.M1, Model.M2, Model.M3):
        return [hopping_gap]

    if model is Model.M4:
        from .observables import m4_boundaries

        def against(attr: str) -> Callable[[float, float], float]:
            def f(v1: float, v2: float) -> float:
                at = point(v1, v2)
                if at is None:
                    return float("nan")
                spec, drive = at
                try:
                    bounds = m4_boundaries(spec, drive)
                except FloquetQCError:
                    return float("nan")
                return abs(spec.gamma) - getattr(bounds, attr)

            return f

        return [against("gamma1"), against("gamma2")]

    return []  # M5: the boundary depends on the spectrum, not on a closed form


def _marching_segments(
    f: Callable[[float, float], float],
    v1_grid: np.ndarray,
    v2_grid: np.ndarray,
) -> list[tuple[float, float, float, float]]:
    """Zero-level segments of f on the grid, in parameter coordinates."""
    values = np.array([[f(float(a), float(b)) for b in v2_grid] for a in v1_grid])
    segments = []
    for i in range(len(v1_grid) - 1):
        for j in range(len(v2_grid) - 1):
            corners = (
                (values[i, j], v1_grid[i], v2_grid[j]),
                (values[i + 1, j], v1_grid[i + 1], v2_grid[j]),
                (values[i + 1, j + 1], v1_grid[i + 1], v2_grid[j + 1]),
                (values[i, j + 1], v1_grid[i], v2_grid[j + 1]),
            )
            if any(math.isnan(c[0]) for c in corners):
                continue
            crossings = []
            for (fa, xa, ya), (fb, xb, yb) in zip(corners, corners[1:] + corners[:1]):
                if (fa < 0.0) != (fb < 0.0):
                    t = fa / (fa - fb)
                    crossings.append((xa + t * (xb - xa), ya + t * (yb - ya)))
            # 2 crossings: one segment; 4 (saddle): pair them deterministically
            for k in range(0, len(crossings) - 1, 2):
                (x1, y1), (x2, y2) = crossings[k], crossings[k + 1]
                segments.append((x1, y1, x2, y2))
    return segments


def render_heatmap_svg(grid: PhaseGrid, quantity: str) -> str:
    """A self-contained SVG heatmap of one per-cell quantity.

    axis1 runs along x, axis2 along y (upward); analytic boundary curves are
    overlaid in white (solid first curve, dashed second).
    """
    if quantity not in HEATMAP_QUANTITIES:
        raise ValueError(f"quantity must be one of {HEATMAP_QUANTITIES}, got {quantity!r}")
    cfg = grid.config
    n1, n2 = grid.shape
    cw, ch = _PLOT_W / n1, _PLOT_H / n2
    width = _MARGIN_LEFT + _PLOT_W + _MARGIN_RIGHT
    height = _MARGIN_TOP + _PLOT_H + _MARGIN_BOTTOM

    raw = np.full((n1, n2), np.nan)
    for c in grid.cells:
        value = getattr(c, quantity)
        if value is not None and c.error is None:
            raw[c.index1, c.index2] = float(value)
    finite = raw[np.isfinite(raw)]
    vmax = float(finite.max()) if len(finite) else 0.0

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="#ffffff"/>',
        f"<title>{_esc(quantity)}</title>",
    ]
    for i1 in range(n1):
        for i2 in range(n2):
            value = raw[i1, i2]
            if math.isnan(value):
                fill = _MISSING_FILL
            else:
                fill = _ramp_color(value / vmax if vmax > 0.0 else 0.0)
            x = _MARGIN_LEFT + i1 * cw
            y = _MARGIN_TOP + (n2 - 1 - i2) * ch
            parts.append(
                f'<rect x="{x:.3f}" y="{y:.3f}" width="{cw + 0.35:.3f}" '
                f'height="{ch + 0.35:.3f}" fill="{fill}"/>'
            )

    if n1 > 1 and n2 > 1 and cfg.axis1.max > cfg.axis1.min and cfg.axis2.max > cfg.axis2.min:

        def px(p: float) -> float:
            s = (p - cfg.axis1.min) / (cfg.axis1.max - cfg.axis1.min)
            return _MARGIN_LEFT + (s * (n1 - 1) + 0.5) * cw

        def py(p: float) -> float:
            s = (p - cfg.axis2.min) / (cfg.axis2.max - cfg.axis2.min)
            return _MARGIN_TOP + _PLOT_H - (s * (n2 - 1) + 0.5) * ch

        refine = 4
        v1_grid = np.linspace(cfg.axis1.min, cfg.axis1.max, (n1 - 1) * refine + 1)
        v2_grid = np.linspace(cfg.axis2.min, cfg.axis2.max, (n2 - 1) * refine + 1)
        dashes = ("none", "6,4")
        for idx, f in enumerate(_boundary_functions(cfg)):
            segments = _marching_segments(f, v1_grid, v2_grid)
            if not segments:
                continue
            d = " ".join(
                f"M {px(x1):.2f} {py(y1):.2f} L {px(x2):.2f} {py(y2):.2f}"
                for x1, y1, x2, y2 in segments
            )
            dash = dashes[min(idx, len(dashes) - 1)]
            parts.append(
                f'<path d="{d}" fill="none" stroke="#ffffff" stroke-width="1.6" '
                f'stroke-dasharray="{dash}"/>'
            )

    label_y = _MARGIN_TOP + _PLOT_H
    parts.extend(
        [
            f'<text x="{_MARGIN_LEFT + _PLOT_W / 2:.1f}" y="{height - 14:.1f}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="15">'
            f"{_esc(cfg.axis1.parameter)}</text>",
            f'<text x="{_MARGIN_LEFT:.1f}" y="{label_y + 18:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{cfg.axis1.min:g}</text>',
            f'<text x="{_MARGIN_LEFT + _PLOT_W:.1f}" y="{label_y + 18:.1f}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">{cfg.axis1.max:g}</text>',
            f'<text x="18" y="{_MARGIN_TOP + _PLOT_H / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15" '
            f'transform="rotate(-90 18 {_MARGIN_TOP + _PLOT_H / 2:.1f})">'
            f"{_esc(cfg.axis2.parameter)}</text>",
            f'<text x="{_MARGIN_LEFT - 8:.1f}" y="{label_y:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{cfg.axis2.min:g}</text>',
            f'<text x="{_MARGIN_LEFT - 8:.1f}" y="{_MARGIN_TOP + 10:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{cfg.axis2.max:g}</text>',
            f'<text x="{_MARGIN_LEFT + _PLOT_W / 2:.1f}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_esc(quantity)}'
            f" (model {_esc(cfg.spec.model_id.value)})</text>",
        ]
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
