"""Shared test utilities: spectral distances and independent oracles."""

from __future__ import annotations

import subprocess
import sys

import numpy as np
from scipy.optimize import linear_sum_assignment


def assignment_max_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Worst matched |a_i - b_sigma(i)| under the optimal pairing.

    Two equal multisets of complex numbers compare to ~eps under this metric
    regardless of ordering instabilities.  Plain lexicographic sort is not
    usable for that purpose: conjugate pairs +-bi whose real parts differ by
    one ulp between the two sets flip their (re, im) order and produce O(|b|)
    spurious differences.
    """
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def char_poly_roots(H: np.ndarray) -> np.ndarray:
    """Eigenvalue oracle via Faddeev-LeVerrier coefficients + np.roots.

    Builds the characteristic polynomial by trace recursion and finds its
    roots through the companion matrix -- an evaluation path independent of
    diagonalizing H itself.
    """
    H = np.asarray(H, dtype=np.complex128)
    dim = H.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.eye(dim, dtype=np.complex128)
    for k in range(1, dim + 1):
        Mk = H @ Mk
        ck = -np.trace(Mk) / k
        coeffs.append(ck)
        Mk = Mk + ck * np.eye(dim)
    return np.roots(coeffs)


def run_cli(args: list[str], cwd: str, env: dict | None = None) -> subprocess.CompletedProcess:
    """Run the command-line tool in a subprocess and capture its output."""
    import os

    full_env = dict(os.environ)
    full_env.pop("FLOQUET_QC_WORKERS", None)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "floquet_qc", *args],
        cwd=cwd,
        env=full_env,
        capture_output=True,
        text=True,
        timeout=600,
    )
