"""Cyclic Jacobi rotation sweep, NumPy backend.

Same rotation formulas and update order as the compiled kernel in
_jacobi.pyx; row and column updates are vectorized but element-wise
identical, so parity tests can hold the two backends side by side.
"""

import math

import numpy as np


def cyclic_jacobi(B, V, max_sweeps, off_target):
    """Run cyclic Jacobi sweeps on the symmetric matrix B in place.

    Rotations accumulate into V (the caller passes the identity).  The
    sweep loop stops once the off-diagonal Frobenius norm measured at the
    top of a sweep is at or below ``off_target``.  Returns the number of
    completed sweeps; the caller re-checks the final off-diagonal norm.
    """
    n = B.shape[0]
    for sweep in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(B, 1) ** 2)))
        if off <= off_target:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if apq == 0.0:
                    continue
                app = B[p, p]
                aqq = B[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                bp = B[:, p].copy()
                bq = B[:, q].copy()
                B[:, p] = c * bp - s * bq
                B[:, q] = s * bp + c * bq
                bp = B[p, :].copy()
                bq = B[q, :].copy()
                B[p, :] = c * bp - s * bq
                B[q, :] = s * bp + c * bq
                # Stable closed forms for the rotated 2x2 block; also
                # pins B exactly symmetric with an exact zero at (p, q).
                B[p, p] = app - t * apq
                B[q, q] = aqq + t * apq
                B[p, q] = 0.0
                B[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return max_sweeps
