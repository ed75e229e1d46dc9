"""Flat ``key = value`` configuration files with dotted sections.

Grammar (one statement per line):

* blank lines and lines whose first non-space character is ``#`` are ignored;
* every other line is ``key = value`` with a dotted identifier key
  (``model.J``, ``scan.axis1_min``, ...);
* a value is either a bare token or a double-quoted string -- the lattice
  modulation is always quoted as an exact fraction, ``lattice.alpha =
  "377/610"``, never a float;
* duplicate keys are rejected.

``canonical_text`` re-serializes the parsed mapping with sorted keys and
normalized quoting; its SHA-256 is the config digest recorded in run
manifests, stable across platforms and cosmetic whitespace.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

from .core import Boundary, DriveConfig, LatticeConfig, Model, ModelSpec
from .errors import ConfigError

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_BARE_VALUE_RE = re.compile(r"^[^\s\"#]+$")

#: top-level key prefixes any subcommand may consume
KNOWN_PREFIXES = ("model", "lattice", "drive", "scan", "winding", "validate", "lyapunov", "output")

_REQUIRED = object()


@dataclass(frozen=True)
class Config:
    """Parsed key/value mapping with typed, key-naming accessors."""

    values: dict[str, str]

    def has(self, key: str) -> bool:
        return key in self.values

    def _raw(self, key: str, default):
        """Stored string, the default, or ConfigError when required."""
        if key in self.values:
            return self.values[key]
        if default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r}", key=key)
        return _MISSING

    def get_str(self, key: str, default=_REQUIRED):
        raw = self._raw(key, default)
        return default if raw is _MISSING else raw

    def get_int(self, key: str, default=_REQUIRED):
        raw = self._raw(key, default)
        if raw is _MISSING:
            return default
        try:
            return int(raw, 10)
        except ValueError:
            raise ConfigError(f"key {key!r}: expected an integer, got {raw!r}", key=key) from None

    def get_float(self, key: str, default=_REQUIRED):
        raw = self._raw(key, default)
        if raw is _MISSING:
            return default
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"key {key!r}: expected a number, got {raw!r}", key=key) from None
        if not math.isfinite(value):
            raise ConfigError(f"key {key!r}: value must be finite, got {raw!r}", key=key)
        return value

    def get_bool(self, key: str, default=_REQUIRED):
        raw = self._raw(key, default)
        if raw is _MISSING:
            return default
        text = raw.lower()
        if text in ("true", "1", "yes"):
            return True
        if text in ("false", "0", "no"):
            return False
        raise ConfigError(f"key {key!r}: expected true/false, got {raw!r}", key=key)

    def get_fraction(self, key: str, default=_REQUIRED):
        """An exact ``p/q`` fraction as an (int, int) pair."""
        raw = self._raw(key, default)
        if raw is _MISSING:
            return default
        parts = raw.split("/")
        if len(parts) == 2:
            try:
                num, den = int(parts[0], 10), int(parts[1], 10)
            except ValueError:
                num = den = 0
            if num > 0 and den > 0:
                return num, den
        raise ConfigError(
            f"key {key!r}: expected a positive fraction like \"377/610\", got {raw!r}", key=key
        )


#: sentinel distinguishing "absent with default" from any real value
_MISSING = object()


def parse_config_text(text: str) -> Config:
    """Parse config text into a :class:`Config`, naming offending keys/lines."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: invalid key {key!r}", key=key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", key=key)
        if len(raw) >= 2 and raw.startswith('"') and raw.endswith('"'):
            value = raw[1:-1]
        elif _BARE_VALUE_RE.match(raw):
            value = raw
        else:
            raise ConfigError(
                f"line {lineno}: key {key!r}: value must be a bare token or double-quoted",
                key=key,
            )
        values[key] = value
    return Config(values=values)


def load_config(path: str) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config_text(text)


def canonical_text(cfg: Config) -> str:
    """Sorted-key serialization; parsing it back reproduces ``cfg`` exactly."""
    lines = []
    for key in sorted(cfg.values):
        value = cfg.values[key]
        if _BARE_VALUE_RE.match(value) and not value.startswith('"'):
            lines.append(f"{key} = {value}")
        else:
            lines.append(f'{key} = "{value}"')
    return "\n".join(lines) + "\n"


def config_digest(cfg: Config) -> str:
    """SHA-256 hex digest of the canonical serialization."""
    return hashlib.sha256(canonical_text(cfg).encode("utf-8")).hexdigest()


def unknown_prefix_warnings(cfg: Config) -> list[str]:
    """One warning per key whose top-level section is not recognized."""
    warnings = []
    for key in sorted(cfg.values):
        if key.split(".", 1)[0] not in KNOWN_PREFIXES:
            warnings.append(f"unknown config key {key!r} ignored")
    return warnings


def model_spec_from_config(cfg: Config) -> ModelSpec:
    raw_id = cfg.get_str("model.id")
    try:
        model = Model(raw_id)
    except ValueError:
        valid = ", ".join(m.value for m in Model)
        raise ConfigError(f"key 'model.id': unknown model {raw_id!r} (one of {valid})", key="model.id") from None
    return ModelSpec(
        model,
        J=cfg.get_float("model.J"),
        V=cfg.get_float("model.V"),
        gamma=cfg.get_float("model.gamma", 0.0),
        eta=cfg.get_float("model.eta", 0.0),
    )


def lattice_from_config(cfg: Config) -> LatticeConfig:
    L = cfg.get_int("lattice.L")
    num, den = cfg.get_fraction("lattice.alpha")
    raw_boundary = cfg.get_str("lattice.boundary", "periodic").lower()
    if raw_boundary == "periodic":
        boundary = Boundary.periodic()
    elif raw_boundary == "open":
        boundary = Boundary.open()
    else:
        raise ConfigError(
            f"key 'lattice.boundary': expected periodic or open, got {raw_boundary!r}",
            key="lattice.boundary",
        )
    return LatticeConfig(L=L, alpha_num=num, alpha_den=den, boundary=boundary)


def drive_from_config(cfg: Config) -> DriveConfig:
    return DriveConfig(
        K_over_omega=cfg.get_float("drive.K_over_omega", 0.0),
        omega=cfg.get_float("drive.omega", None),
    )


def scan_config_from_config(cfg: Config):
    """Assemble a ScanConfig; imported lazily to keep config parsing light."""
    from .scan import AxisSpec, ScanConfig

    def axis(prefix: str) -> AxisSpec:
        return AxisSpec(
            parameter=cfg.get_str(f"{prefix}"),
            min=cfg.get_float(f"{prefix}_min"),
            max=cfg.get_float(f"{prefix}_max"),
            n_points=cfg.get_int(f"{prefix}_points"),
        )

    return ScanConfig(
        spec=model_spec_from_config(cfg),
        lattice=lattice_from_config(cfg),
        drive=drive_from_config(cfg),
        axis1=axis("scan.axis1"),
        axis2=axis("scan.axis2"),
        compute_winding=cfg.get_bool("scan.compute_winding", False),
        n_theta=cfg.get_int("scan.n_theta", 256),
        compute_ipr=cfg.get_bool("scan.compute_ipr", True),
    )
