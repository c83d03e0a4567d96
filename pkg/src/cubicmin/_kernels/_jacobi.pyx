# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic Jacobi rotation sweep, compiled backend.

The arithmetic mirrors _jacobi_py.py operation for operation (same
rotation formulas, same update order, fused multiply-add disabled at
compile time) so the two backends can be compared in parity tests.
"""

from libc.math cimport sqrt


def cyclic_jacobi(double[:, ::1] B, double[:, ::1] V, int max_sweeps, double off_target):
    """Run cyclic Jacobi sweeps on the symmetric matrix B in place.

    Rotations accumulate into V (the caller passes the identity).  The
    sweep loop stops once the off-diagonal Frobenius norm measured at the
    top of a sweep is at or below ``off_target``.  Returns the number of
    completed sweeps; the caller re-checks the final off-diagonal norm.
    """
    cdef Py_ssize_t n = B.shape[0]
    cdef Py_ssize_t p, q, i
    cdef int sweep
    cdef double apq, app, aqq, tau, t, c, s, xp, xq, off

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += B[p, q] * B[p, q]
        off = sqrt(2.0 * off)
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
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    xp = B[i, p]
                    xq = B[i, q]
                    B[i, p] = c * xp - s * xq
                    B[i, q] = s * xp + c * xq
                for i in range(n):
                    xp = B[p, i]
                    xq = B[q, i]
                    B[p, i] = c * xp - s * xq
                    B[q, i] = s * xp + c * xq
                # Stable closed forms for the rotated 2x2 block; also
                # pins B exactly symmetric with an exact zero at (p, q).
                B[p, p] = app - t * apq
                B[q, q] = aqq + t * apq
                B[p, q] = 0.0
                B[q, p] = 0.0
                for i in range(n):
                    xp = V[i, p]
                    xq = V[i, q]
                    V[i, p] = c * xp - s * xq
                    V[i, q] = s * xp + c * xq
    return max_sweeps
