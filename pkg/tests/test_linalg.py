"""Eigendecomposition and shifted-solve contracts."""

import numpy as np
import pytest

from cubicmin.exceptions import ExcitedSingularMode, InconsistentSystem
from cubicmin.linalg import (
    EigenDecomposition,
    SymmetricMatrix,
    pseudo_solve_shifted,
    solve_shifted,
    sym_eigen,
)


def _eig_of(entries):
    return sym_eigen(SymmetricMatrix(entries))


class TestSymmetricMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            SymmetricMatrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SymmetricMatrix(np.zeros((0, 0)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            SymmetricMatrix([[1.0, np.nan], [np.nan, 1.0]])

    def test_rejects_asymmetry_beyond_tolerance(self):
        with pytest.raises(ValueError, match="symmetry"):
            SymmetricMatrix([[1.0, 2.0], [2.1, 1.0]])

    def test_symmetrizes_within_tolerance(self):
        a = SymmetricMatrix([[1.0, 2.0], [2.0 + 1e-13, 1.0]])
        assert a.entries[0, 1] == a.entries[1, 0]
        assert not a.entries.flags.writeable

    def test_max_abs(self):
        assert SymmetricMatrix([[1.0, -7.0], [-7.0, 3.0]]).max_abs == 7.0


class TestSymEigen:
    def test_identity(self):
        eig = _eig_of(np.eye(3))
        assert np.array_equal(eig.values, np.ones(3))
        assert np.array_equal(eig.vectors, np.eye(3))

    def test_diagonal_sorted_ascending(self):
        eig = _eig_of(np.diag([3.0, -2.0, -1.0]))
        assert np.array_equal(eig.values, [-2.0, -1.0, 3.0])
        # eigenvector for mu = -2 is the second axis, etc.
        assert np.array_equal(np.abs(eig.vectors), np.eye(3)[:, [1, 2, 0]])

    def test_vector_sign_normalization(self):
        eig = _eig_of(np.diag([-2.0, 5.0]))
        for j in range(2):
            col = eig.vectors[:, j]
            assert col[np.argmax(np.abs(col))] > 0

    def test_random_reconstruction_6x6(self):
        rng = np.random.default_rng(42)
        a = rng.uniform(-5.0, 5.0, size=(6, 6))
        a = (a + a.T) / 2.0
        A = SymmetricMatrix(a)
        eig = sym_eigen(A)
        recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
        assert np.max(np.abs(recon - A.entries)) <= 1e-8 * (1.0 + A.max_abs)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(5, 5))
        a = (a + a.T) / 2.0
        e1 = _eig_of(a)
        e2 = _eig_of(a)
        assert np.array_equal(e1.values, e2.values)
        assert np.array_equal(e1.vectors, e2.vectors)

    @pytest.mark.parametrize("seed", range(200))
    def test_invariants_random(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 17))
        a = rng.uniform(-5.0, 5.0, size=(n, n))
        a = (a + a.T) / 2.0
        A = SymmetricMatrix(a)
        eig = sym_eigen(A)
        assert np.all(np.diff(eig.values) >= 0)
        recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
        assert np.max(np.abs(recon - A.entries)) <= 1e-8 * (1.0 + A.max_abs)
        assert abs(np.sum(eig.values) - np.trace(A.entries)) <= 1e-9 * (
            1.0 + abs(np.trace(A.entries))
        )
        fro2 = np.linalg.norm(A.entries, "fro") ** 2
        assert abs(np.sum(eig.values**2) - fro2) <= 1e-8 * (1.0 + fro2)
        gram = eig.vectors.T @ eig.vectors
        assert np.max(np.abs(gram - np.eye(n))) <= 1e-10
        ref = np.linalg.eigvalsh(A.entries)
        assert np.max(np.abs(eig.values - ref)) <= 1e-8 * (1.0 + A.max_abs)


class TestSolveShifted:
    def test_identity_like(self):
        eig = _eig_of(np.diag([1.0, 2.0]))
        x = solve_shifted(eig, 0.0, np.array([1.0, 2.0]))
        assert np.allclose(x, [1.0, 1.0], atol=1e-12)

    def test_zero_rhs(self):
        eig = _eig_of(np.diag([1.0, 2.0]))
        assert np.array_equal(solve_shifted(eig, 0.5, np.zeros(2)), np.zeros(2))

    def test_indefinite_shift(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        x = solve_shifted(eig, 4.0, np.array([1.0, 5.0]))
        assert np.allclose(x, [1.0, 1.0], atol=1e-12)

    def test_excited_singular_mode(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        with pytest.raises(ExcitedSingularMode):
            solve_shifted(eig, 3.0, np.array([1.0, 0.0]))

    def test_unloaded_singular_mode_passes(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        x = solve_shifted(eig, 3.0, np.array([0.0, 4.0]))
        assert np.allclose(x, [0.0, 1.0], atol=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_residual_random(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(1, 9))
        a = rng.uniform(-5.0, 5.0, size=(n, n))
        a = (a + a.T) / 2.0
        A = SymmetricMatrix(a)
        eig = sym_eigen(A)
        b = rng.uniform(-5.0, 5.0, size=n)
        # keep the shift at least 0.1 away from every pole -mu_i
        for _ in range(100):
            lam = float(rng.uniform(-10.0, 10.0))
            if np.min(np.abs(eig.values + lam)) >= 0.1:
                break
        x = solve_shifted(eig, lam, b)
        res = np.linalg.norm((A.entries + lam * np.eye(n)) @ x - b)
        assert res <= 1e-8 * (1.0 + np.linalg.norm(b))


class TestPseudoSolveShifted:
    def test_consistent_singular_system(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        x, null = pseudo_solve_shifted(eig, 3.0, np.array([0.0, 4.0]))
        assert np.allclose(x, [0.0, 1.0], atol=1e-12)
        assert len(null) == 1
        assert np.allclose(np.abs(null[0]), [1.0, 0.0], atol=1e-12)

    def test_zero_rhs_keeps_null_space(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        x, null = pseudo_solve_shifted(eig, 3.0, np.zeros(2))
        assert np.array_equal(x, np.zeros(2))
        assert len(null) == 1

    def test_negative_load(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        x, null = pseudo_solve_shifted(eig, 3.0, np.array([0.0, -2.0]))
        assert np.allclose(x, [0.0, -0.5], atol=1e-12)

    def test_inconsistent_system(self):
        eig = _eig_of(np.diag([-3.0, 1.0]))
        with pytest.raises(InconsistentSystem):
            pseudo_solve_shifted(eig, 3.0, np.array([1.0, 0.0]))

    def test_no_singular_modes_means_plain_solve(self):
        eig = _eig_of(np.diag([2.0, 5.0]))
        x, null = pseudo_solve_shifted(eig, 1.0, np.array([3.0, 6.0]))
        assert np.allclose(x, [1.0, 1.0], atol=1e-12)
        assert null == []


def test_eigendecomposition_repr_mentions_n():
    eig = EigenDecomposition(np.array([1.0]), np.eye(1))
    assert "n=1" in repr(eig)
