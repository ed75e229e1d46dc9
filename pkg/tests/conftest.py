"""Shared fixtures: standard lattices and drives used across the suite."""

from __future__ import annotations

import pytest

from floquet_qc import STATIC_DRIVE, Boundary, DriveConfig, LatticeConfig


@pytest.fixture(scope="session")
def lat89() -> LatticeConfig:
    """Periodic Fibonacci ring L = 89, alpha = 55/89 (default test lattice)."""
    return LatticeConfig(89, 55, 89)


@pytest.fixture(scope="session")
def lat144() -> LatticeConfig:
    return LatticeConfig(144, 89, 144)


@pytest.fixture(scope="session")
def lat34() -> LatticeConfig:
    return LatticeConfig(34, 21, 34)


@pytest.fixture(scope="session")
def lat21() -> LatticeConfig:
    return LatticeConfig(21, 13, 21)


@pytest.fixture(scope="session")
def lat610() -> LatticeConfig:
    """Deep approximant alpha = 377/610 used for transfer-matrix chains."""
    return LatticeConfig(610, 377, 610)


@pytest.fixture(scope="session")
def lat89_open() -> LatticeConfig:
    return LatticeConfig(89, 55, 89, Boundary.open())


@pytest.fixture(scope="session")
def drive0() -> DriveConfig:
    """Undriven point K/omega = 0."""
    return STATIC_DRIVE
