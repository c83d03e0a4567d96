"""Armijo-descent local minimization of the cubic model.

Finds a point with ``||grad m(s)|| <= eps`` from an arbitrary start:
backtracked steepest descent, switching to a regularized Newton step
once the residual is small and the Hessian is positive definite.  The
model is coercive (sigma > 0), so descent sequences stay bounded; a run
that exhausts its iteration budget reports rather than raises.
"""

from dataclasses import dataclass, field

import numpy as np

from cubicmin import linalg, model as model_mod


@dataclass(frozen=True)
class LocalSolveOptions:
    """Knobs for local_minimize.

    ``eps_grad = None`` resolves to the model-relative default
    ``1e-8 * (1 + ||c||)`` at solve time.
    """

    eps_grad: float = None
    max_iters: int = 5000
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    newton_threshold: float = 1e-2
    track_iterates: bool = False

    def __post_init__(self):
        if self.eps_grad is not None and not self.eps_grad > 0.0:
            raise ValueError("eps_grad must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack factor must be in (0, 1)")
        if not 0.0 < self.armijo_c < 1.0:
            raise ValueError("armijo_c must be in (0, 1)")


@dataclass(frozen=True)
class LocalSolveReport:
    """Outcome of one local solve.

    ``objective_trace`` is the non-increasing objective history of the
    descent phase.  A final Newton polish may move the point within the
    objective's float resolution after the last trace entry, so the
    trace's last value matches ``m(s)`` only to roundoff.
    """

    s: np.ndarray
    residual: float
    iterations: int
    objective_trace: list
    converged: bool
    iterates: list = field(default_factory=list)


def _newton_step(m, s, g):
    """Regularized Newton direction from the spectral factorization."""
    H = model_mod.hess(m, s)
    eigh = linalg.sym_eigen(H)
    w_min = float(eigh.values[0])
    if w_min <= 0.0:
        return None
    eta = max(0.0, 1e-10 - w_min) + 1e-12
    coeff = (eigh.vectors.T @ -g) / (eigh.values + eta)
    return eigh.vectors @ coeff


def local_minimize(m, s0, opts=None):
    """Descend the cubic model to an approximately stationary point.

    Parameters
    ----------
    m : CubicModel
    s0 : array_like, shape (n,)
    opts : LocalSolveOptions, optional

    Returns
    -------
    LocalSolveReport
        ``converged`` is true when the gradient residual reached
        ``eps_grad``; otherwise the best iterate found is reported with
        ``converged = False``.  Deterministic for fixed inputs.
    """
    if opts is None:
        opts = LocalSolveOptions()
    eps = opts.eps_grad if opts.eps_grad is not None else m.default_tol_grad()
    s = np.array(m._check_dim(s0), dtype=float)
    f = model_mod.eval_model(m, s)
    trace = [f]
    iterates = [s.copy()] if opts.track_iterates else []
    step0 = 1.0 / (1.0 + m.Q.max_abs + m.sigma * float(np.linalg.norm(s)))
    # Accepted gradient steps seed the next trial length, so the line
    # search does not re-pay the full backtrack on every iteration.
    t_carry = step0

    iterations = 0
    flat_steps = 0
    for iterations in range(1, opts.max_iters + 1):
        g = model_mod.grad(m, s)
        residual = float(np.linalg.norm(g))
        if residual <= eps:
            return LocalSolveReport(
                s=s, residual=residual, iterations=iterations - 1,
                objective_trace=trace, converged=True, iterates=iterates,
            )

        candidates = []
        if residual < opts.newton_threshold:
            d_newton = _newton_step(m, s, g)
            if d_newton is not None:
                candidates.append(("newton", d_newton, 1.0))
        candidates.append(("gradient", -g, t_carry))

        moved = False
        for kind, direction, t0 in candidates:
            slope = float(g @ direction)
            if slope >= 0.0:
                continue
            t = t0
            for _ in range(60):
                f_new = model_mod.eval_model(m, s + t * direction)
                if f_new <= f + opts.armijo_c * t * slope:
                    flat_steps = flat_steps + 1 if f_new == f else 0
                    s = s + t * direction
                    f = f_new
                    moved = True
                    if kind == "gradient":
                        t_carry = 2.0 * t
                    break
                t *= opts.backtrack
            if moved:
                break
        if not moved or flat_steps >= 3:
            # Either no candidate achieved sufficient decrease at any step
            # size, or accepted steps stopped changing the objective:
            # stalled at the objective's float resolution.
            break
        trace.append(f)
        if opts.track_iterates:
            iterates.append(s.copy())

    g = model_mod.grad(m, s)
    residual = float(np.linalg.norm(g))
    # Newton polish.  Near a strict minimiser the remaining decrease sits
    # below float resolution, so objective-based tests cannot certify the
    # last few steps.  Full Newton steps accepted on gradient-norm
    # contraction finish the solve without touching the monotone trace.
    for _ in range(4):
        if residual <= eps:
            break
        d = _newton_step(m, s, g)
        if d is None:
            break
        s_try = s + d
        g_try = model_mod.grad(m, s_try)
        r_try = float(np.linalg.norm(g_try))
        if r_try < 0.5 * residual:
            s, g, residual = s_try, g_try, r_try
        else:
            break
    return LocalSolveReport(
        s=s, residual=residual, iterations=iterations,
        objective_trace=trace, converged=residual <= eps, iterates=iterates,
    )
