"""The cubic-regularized quadratic model and its global-optimality test.

The model is ``m(s) = c^T s + 1/2 s^T Q s + (sigma/3) ||s||^3`` with
``sigma > 0``.  A point is stationary when ``(Q + lam*I) s = -c`` with
``lam = sigma * ||s||``, and it is the global minimizer exactly when, in
addition, ``Q + lam*I`` is positive semidefinite.
"""

from dataclasses import dataclass

import numpy as np

from cubicmin import linalg
from cubicmin.linalg import SymmetricMatrix


class CubicModel:
    """The data triple (c, Q, sigma) defining the cubic model.

    Parameters
    ----------
    c : array_like, shape (n,)
        Linear coefficients.
    Q : SymmetricMatrix or array_like, shape (n, n)
        Symmetric quadratic coefficients.
    sigma : float
        Regularization weight, strictly positive.

    The eigendecomposition of Q is computed lazily and cached; instances
    are immutable and safe to share across threads.
    """

    def __init__(self, c, Q, sigma):
        if not isinstance(Q, SymmetricMatrix):
            Q = SymmetricMatrix(Q)
        c = np.array(c, dtype=float).reshape(-1)
        if c.shape[0] != Q.n:
            raise ValueError(f"c has length {c.shape[0]}, Q has dimension {Q.n}")
        if not np.all(np.isfinite(c)):
            raise ValueError("c entries must be finite")
        sigma = float(sigma)
        if not sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        c.setflags(write=False)
        self.c = c
        self.Q = Q
        self.sigma = sigma
        self.n = Q.n
        self._eig = None

    @property
    def eig(self):
        """EigenDecomposition of Q, computed on first use."""
        if self._eig is None:
            self._eig = linalg.sym_eigen(self.Q)
        return self._eig

    @property
    def norm_c(self):
        return float(np.linalg.norm(self.c))

    def default_tol_grad(self):
        """Default stationarity tolerance, relative to the model scale."""
        return 1e-8 * (1.0 + self.norm_c)

    def default_tol_psd(self):
        """Default semidefiniteness tolerance, relative to the model scale."""
        return 1e-8 * (1.0 + self.Q.max_abs)

    def _check_dim(self, s):
        s = np.asarray(s, dtype=float).reshape(-1)
        if s.shape[0] != self.n:
            raise ValueError(f"point has length {s.shape[0]}, model dimension is {self.n}")
        return s

    def __repr__(self):
        return f"CubicModel(n={self.n}, sigma={self.sigma})"


@dataclass(frozen=True)
class StationaryPoint:
    """A candidate stationary point with its derived quantities.

    ``lam`` is always recomputed as ``sigma * ||s||``, never supplied, so
    the norm coupling holds by construction and only the gradient
    residual remains to be checked.
    """

    s: np.ndarray
    lam: float
    objective: float
    residual: float

    @classmethod
    def from_vector(cls, model, s):
        s = np.array(model._check_dim(s))
        s.setflags(write=False)
        return cls(
            s=s,
            lam=model.sigma * float(np.linalg.norm(s)),
            objective=eval_model(model, s),
            residual=float(np.linalg.norm(grad(model, s))),
        )


@dataclass(frozen=True)
class GlobalCertificate:
    """Outcome of the two-part global-optimality test.

    ``psd_margin`` is the smallest eigenvalue of ``Q + sigma*||s||*I``;
    the point is certified global when the gradient residual and the
    margin both pass their tolerances.
    """

    psd_margin: float
    residual: float
    is_global: bool
    tol_grad: float
    tol_psd: float


def eval_model(model, s):
    """Evaluate ``m(s) = c^T s + 1/2 s^T Q s + (sigma/3) ||s||^3``."""
    s = model._check_dim(s)
    norm_s = float(np.linalg.norm(s))
    return float(
        model.c @ s
        + 0.5 * s @ (model.Q.entries @ s)
        + (model.sigma / 3.0) * norm_s**3
    )


def grad(model, s):
    """Evaluate ``grad m(s) = c + Q s + sigma ||s|| s``."""
    s = model._check_dim(s)
    norm_s = float(np.linalg.norm(s))
    return model.c + model.Q.entries @ s + model.sigma * norm_s * s


def hess(model, s):
    """Evaluate ``hess m(s) = Q + sigma ||s|| I + sigma s s^T / ||s||``.

    At ``s = 0`` the rank-one and shift terms vanish in the limit, so the
    Hessian is Q itself.
    """
    s = model._check_dim(s)
    norm_s = float(np.linalg.norm(s))
    if norm_s == 0.0:
        return model.Q
    h = (
        model.Q.entries
        + model.sigma * norm_s * np.eye(model.n)
        + (model.sigma / norm_s) * np.outer(s, s)
    )
    return SymmetricMatrix(h)


def is_global(model, s, tol_grad=None, tol_psd=None):
    """Test whether ``s`` is the certified global minimizer of the model.

    Parameters
    ----------
    tol_grad, tol_psd : float, optional
        Positive tolerances; default to ``1e-8 * (1 + ||c||)`` and
        ``1e-8 * (1 + max|Q|)``.

    Returns
    -------
    GlobalCertificate
        With ``psd_margin = mu_1 + sigma * ||s||`` and
        ``is_global = (residual <= tol_grad) and (psd_margin >= -tol_psd)``.
    """
    if tol_grad is None:
        tol_grad = model.default_tol_grad()
    if tol_psd is None:
        tol_psd = model.default_tol_psd()
    if not (tol_grad > 0.0 and tol_psd > 0.0):
        raise ValueError("tolerances must be positive")
    s = model._check_dim(s)
    residual = float(np.linalg.norm(grad(model, s)))
    psd_margin = float(model.eig.values[0] + model.sigma * np.linalg.norm(s))
    return GlobalCertificate(
        psd_margin=psd_margin,
        residual=residual,
        is_global=(residual <= tol_grad) and (psd_margin >= -tol_psd),
        tol_grad=tol_grad,
        tol_psd=tol_psd,
    )
