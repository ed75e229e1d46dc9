"""Hot-loop kernels with a compiled core and a NumPy fallback.

The transfer-matrix product is the only O(N) inner loop in the package.  At
import time this module picks the compiled extension (``_kernels``, built
from Cython) when it is available, and otherwise a vectorized NumPy
tree-reduction that computes the same product.  Setting the environment
variable ``FLOQUET_QC_FORCE_FALLBACK=1`` skips the extension even when built
(used by the benchmark and tests to compare both paths).

Both paths return the same mathematical object -- matrix products are
associative, so only rounding differs between the sequential and the
tree-reduced evaluation.
"""

from __future__ import annotations

import math
import os

import numpy as np

if os.environ.get("FLOQUET_QC_FORCE_FALLBACK", "") not in ("", "0"):
    _impl = None
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None

#: which implementation this process selected: "compiled" or "fallback"
BACKEND = "compiled" if _impl is not None else "fallback"

#: sites folded into one tree reduction at a time (fallback path)
_CHUNK = 1 << 17


def _tm_log_growth_numpy(
    pot: np.ndarray, E: complex, j_eff: complex, renorm_every: int
) -> tuple[float, np.ndarray]:
    """Tree-reduced product of T_n = [[(E - V_n)/j_eff, -1], [1, 0]].

    Pairs of neighbouring matrices are multiplied level by level; after each
    level every partial product is rescaled to unit Frobenius norm and the
    logs are accumulated, so no entry ever overflows.  Odd levels are padded
    with the identity (its log is accumulated like any other factor).
    ``renorm_every`` is accepted for signature parity with the sequential
    kernel; the tree path renormalizes once per level instead.
    """
    log_sum = 0.0
    P = np.eye(2, dtype=np.complex128)
    for start in range(0, len(pot), _CHUNK):
        a = (E - pot[start : start + _CHUNK]) / j_eff
        stack = np.zeros((len(a), 2, 2), dtype=np.complex128)
        stack[:, 0, 0] = a
        stack[:, 0, 1] = -1.0
        stack[:, 1, 0] = 1.0
        while len(stack) > 1:
            if len(stack) % 2:
                pad = np.zeros((1, 2, 2), dtype=np.complex128)
                pad[0, 0, 0] = pad[0, 1, 1] = 1.0
                stack = np.concatenate([stack, pad])
            # right factor is the earlier-site product: P_[2i, 2i+1] = M_{2i+1} @ M_{2i}
            stack = np.matmul(stack[1::2], stack[0::2])
            norms = np.sqrt(np.sum(np.abs(stack) ** 2, axis=(1, 2)))
            log_sum += float(np.log(norms).sum())
            stack /= norms[:, None, None]
        if len(stack):
            P = stack[0] @ P
            nrm = float(np.linalg.norm(P))
            log_sum += math.log(nrm)
            P = P / nrm
    return log_sum, P


def tm_log_growth(
    potential: np.ndarray,
    E: complex,
    j_eff: complex,
    renorm_every: int = 16,
) -> tuple[float, np.ndarray]:
    """Accumulated log-magnitude and rescaled tail of the transfer product.

    Returns ``(log_sum, P)`` such that the full ordered product
    T_N ... T_2 T_1 equals ``exp(log_sum) * P`` with ``P`` of order-one norm;
    the Lyapunov exponent is ``(log_sum + ln ||P||) / N``.
    """
    pot = np.ascontiguousarray(potential, dtype=np.complex128)
    if renorm_every < 1:
        raise ValueError("renorm_every must be positive")
    if _impl is not None:
        log_sum, P = _impl.tm_log_growth(pot, complex(E), complex(j_eff), int(renorm_every))
        return float(log_sum), np.asarray(P)
    return _tm_log_growth_numpy(pot, complex(E), complex(j_eff), int(renorm_every))
