# cython: boundscheck=False, wraparound=False, cdivision=True
"""Sequential compiled kernel for the 2x2 transfer-matrix product.

Multiplies T_n = [[(E - V_n)/j_eff, -1], [1, 0]] left-to-right over the
site index, rescaling the running product to unit Frobenius norm every
``renorm_every`` steps and accumulating the logs of the rescaling factors.
"""

from libc.math cimport log, sqrt

import numpy as np


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def tm_log_growth(const double complex[::1] potential,
                  double complex E,
                  double complex j_eff,
                  int renorm_every=16):
    """Return (log_sum, P) with T_N...T_1 = exp(log_sum) * P."""
    cdef Py_ssize_t n = potential.shape[0]
    cdef double complex p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0
    cdef double complex a, q00, q01
    cdef double log_sum = 0.0, nrm
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            a = (E - potential[i]) / j_eff
            # P <- T_i @ P with T_i = [[a, -1], [1, 0]]
            q00 = a * p00 - p10
            q01 = a * p01 - p11
            p10 = p00
            p11 = p01
            p00 = q00
            p01 = q01
            if (i + 1) % renorm_every == 0:
                nrm = sqrt(_abs2(p00) + _abs2(p01) + _abs2(p10) + _abs2(p11))
                log_sum += log(nrm)
                p00 = p00 / nrm
                p01 = p01 / nrm
                p10 = p10 / nrm
                p11 = p11 / nrm
    P = np.empty((2, 2), dtype=np.complex128)
    P[0, 0] = p00
    P[0, 1] = p01
    P[1, 0] = p10
    P[1, 1] = p11
    return log_sum, P
