"""Dense symmetric linear algebra: eigendecomposition and shifted solves.

Everything in this module is deterministic for a fixed input: the Jacobi
sweep order is fixed, eigenvalue ties are broken by index after a stable
sort, and eigenvector signs are normalized.  All returned arrays are
marked read-only so values can be shared freely across threads.
"""

import math

import numpy as np

from cubicmin._kernels import cyclic_jacobi
from cubicmin.exceptions import (
    ConvergenceError,
    ExcitedSingularMode,
    InconsistentSystem,
)

# Single source of truth for "pole" detection: |mu_i + lambda| at or below
# this is treated as a singular mode, here and in the secular-equation code.
SINGULAR_MODE_TOL = 1e-12

_SYMMETRY_RTOL = 1e-12
_JACOBI_MAX_SWEEPS = 100
_JACOBI_OFF_RTOL = 1e-12


def _freeze(a):
    a.setflags(write=False)
    return a


class SymmetricMatrix:
    """A validated, symmetrized n-by-n real matrix.

    Parameters
    ----------
    entries : array_like
        Square matrix with ``|a_ij - a_ji| <= 1e-12 * (1 + |a_ij|)``.
        Stored symmetrized as ``(A + A^T) / 2`` and marked read-only.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        gap = np.abs(a - a.T) - _SYMMETRY_RTOL * (1.0 + np.abs(a))
        if np.any(gap > 0):
            i, j = np.unravel_index(np.argmax(gap), a.shape)
            raise ValueError(
                f"entry ({i},{j}) = {a[i, j]!r} differs from ({j},{i}) = "
                f"{a[j, i]!r} beyond the symmetry tolerance"
            )
        self.entries = _freeze((a + a.T) / 2.0)
        self.n = a.shape[0]

    @property
    def max_abs(self):
        """Largest entry magnitude, used for relative tolerances."""
        return float(np.max(np.abs(self.entries)))

    def __repr__(self):
        return f"SymmetricMatrix(n={self.n})"


class EigenDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix.

    Attributes
    ----------
    values : ndarray, shape (n,)
        Eigenvalues ``mu_1 <= ... <= mu_n``.
    vectors : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns, aligned with ``values``.
    """

    def __init__(self, values, vectors):
        self.values = _freeze(np.asarray(values, dtype=float))
        self.vectors = _freeze(np.asarray(vectors, dtype=float))
        self.n = self.values.shape[0]

    def __repr__(self):
        return f"EigenDecomposition(n={self.n}, values={self.values!r})"


def sym_eigen(A):
    """Eigendecompose a SymmetricMatrix with cyclic Jacobi rotations.

    Parameters
    ----------
    A : SymmetricMatrix

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending; ties broken by index order; each
        eigenvector's largest-magnitude entry made positive.

    Raises
    ------
    ConvergenceError
        If the off-diagonal norm has not dropped to
        ``1e-12 * ||A||_F`` within 100 sweeps.
    """
    n = A.n
    B = np.array(A.entries, dtype=float, order="C")
    V = np.eye(n, dtype=float, order="C")
    fro = float(np.linalg.norm(B, "fro"))
    target = _JACOBI_OFF_RTOL * fro
    sweeps = cyclic_jacobi(B, V, _JACOBI_MAX_SWEEPS, target)
    off = math.sqrt(2.0 * float(np.sum(np.triu(B, 1) ** 2)))
    if off > target:
        raise ConvergenceError(
            f"Jacobi sweep limit reached after {sweeps} sweeps: "
            f"off-diagonal norm {off:.3e} > target {target:.3e}"
        )
    values = np.diag(B).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = V[:, order].copy()
    for j in range(n):
        i = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[i, j] < 0.0:
            vectors[:, j] = -vectors[:, j]
    return EigenDecomposition(values, vectors)


def solve_shifted(eig, lam, b):
    """Solve ``(Q + lam*I) x = b`` through an eigendecomposition of Q.

    Modes with ``|mu_i + lam| <= SINGULAR_MODE_TOL`` are admissible only
    when the right-hand side does not load them (``|v_i^T b| <= 1e-12``);
    such unloaded singular modes contribute zero to the solution.

    Raises
    ------
    ExcitedSingularMode
        If a singular mode carries ``|v_i^T b| > 1e-12``; this is how
        callers detect the hard case.
    """
    b = np.asarray(b, dtype=float)
    denom = eig.values + lam
    proj = eig.vectors.T @ b
    singular = np.abs(denom) <= SINGULAR_MODE_TOL
    excited = singular & (np.abs(proj) > 1e-12)
    if np.any(excited):
        raise ExcitedSingularMode(int(np.argmax(excited)))
    coeff = np.zeros_like(proj)
    ok = ~singular
    coeff[ok] = proj[ok] / denom[ok]
    return eig.vectors @ coeff


def pseudo_solve_shifted(eig, lam, b):
    """Minimum-norm solve of ``(Q + lam*I) x = b`` at a singular shift.

    Returns
    -------
    (x, null_basis) : (ndarray, list of ndarray)
        ``x`` is the minimum-norm solution restricted to non-null modes;
        ``null_basis`` lists the orthonormal eigenvectors of the
        (near-)null space of ``Q + lam*I`` in ascending eigenvalue order.

    Raises
    ------
    InconsistentSystem
        If a null mode carries ``|v_i^T b| > 1e-10 * ||b||``.
    """
    b = np.asarray(b, dtype=float)
    denom = eig.values + lam
    proj = eig.vectors.T @ b
    singular = np.abs(denom) <= SINGULAR_MODE_TOL
    load_tol = 1e-10 * float(np.linalg.norm(b))
    bad = singular & (np.abs(proj) > load_tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise InconsistentSystem(
            f"null mode {i} carries load {abs(proj[i]):.3e} > {load_tol:.3e}"
        )
    coeff = np.zeros_like(proj)
    ok = ~singular
    coeff[ok] = proj[ok] / denom[ok]
    x = eig.vectors @ coeff
    null_basis = [eig.vectors[:, i].copy() for i in np.flatnonzero(singular)]
    return x, null_basis
