"""Global subproblem solves by repeated escapes, and the outer optimizer.

Two strategies live here.  ``solve_via_escapes`` minimizes one cubic
model globally by alternating a local descent with a closed-form escape
from any non-global stationary point; the escape count is bounded, so
the loop is finite.  ``arc_plus_minimize`` wraps either that solver
(variant ARC_PLUS) or the plain local solve (variant ARC) inside an
adaptive cubic-regularization outer loop for general smooth objectives.
"""

from dataclasses import dataclass, field

import numpy as np

from . import escape as escape_mod
from . import model as model_mod
from .exceptions import BoundExceeded, ConvergenceError, EmptyInput, ThresholdNotMet, ToleranceFloor
from .local_solver import LocalSolveOptions, local_minimize
from .model import CubicModel, GlobalCertificate
from .stationary import GlobalSolution, count_bound

__all__ = [
    "ARC",
    "ARC_PLUS",
    "ArcOptions",
    "OuterReport",
    "SubproblemTrace",
    "ProfileTable",
    "solve_via_escapes",
    "arc_plus_minimize",
    "cauchy_step",
    "performance_profile",
]

ARC = "ARC"
ARC_PLUS = "ARC_PLUS"

_MAX_TIGHTENINGS = 6
_EPS_FLOOR = 1e-15


def _inner_opts(eps):
    # Subproblem gradients span many scales, so the driver attempts the
    # regularized Newton step whenever the model Hessian is positive
    # definite instead of waiting for a fixed residual threshold.
    return LocalSolveOptions(eps_grad=eps, newton_threshold=float("inf"))


@dataclass(frozen=True)
class SubproblemTrace:
    """History of one solve_via_escapes run.

    ``steps`` holds one (s_bar, case_tag, objective) triple per local
    solve that reached an escape decision; objectives are strictly
    decreasing along the list.  ``escape_count`` counts actual moves,
    excluding the final NONE_GLOBAL certificate.
    """

    steps: list
    solution: GlobalSolution
    escape_count: int


@dataclass(frozen=True)
class OuterReport:
    """Outcome of one outer-optimizer run.

    ``sigma_history`` records the regularization weight used at each
    iteration; ``f_history`` the objective after each accepted step.
    ``accepted_psd_margins`` has one entry per accepted step: the
    subproblem certificate margin for ARC_PLUS steps, None for steps
    without a certificate.
    """

    x_final: np.ndarray
    f_final: float
    grad_inf_norm: float
    iterations: int
    sigma_history: list
    variant: str
    converged: bool
    f_history: list = field(default_factory=list)
    accepted_psd_margins: list = field(default_factory=list)


@dataclass(frozen=True)
class ArcOptions:
    """Outer-loop controls.

    The acceptance and sigma-update constants are standard adaptive
    cubic-regularization defaults: accept when rho >= eta1, halve sigma
    when rho >= eta2, double it on rejection.  ``cauchy_start`` seeds
    each subproblem from the Cauchy point instead of a random sphere
    point.  ``seed`` drives all subproblem starting points.
    """

    tol_grad_inf: float = 1e-5
    max_iters: int = 100000
    sigma0: float = 1.0
    eta1: float = 0.1
    eta2: float = 0.9
    sigma_min: float = 1e-8
    cauchy_start: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.tol_grad_inf > 0.0:
            raise ValueError("tol_grad_inf must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.eta1 <= self.eta2 < 1.0:
            raise ValueError("need 0 < eta1 <= eta2 < 1")
        if not self.sigma0 > 0.0:
            raise ValueError("sigma0 must be positive")


def _adaptive_eps_curv(eps_grad, s_bar):
    # Curvature threshold paired with the gradient residual; capped so
    # accepted certificates keep psd_margin >= -1e-6.
    return min(10.0 * eps_grad / max(float(np.linalg.norm(s_bar)), 1e-8), 1e-6)


def solve_via_escapes(m, s0, eps_grad=None, eps_curv=None):
    """Globally minimize a cubic model by local solves plus escapes.

    Parameters
    ----------
    m : CubicModel
    s0 : array_like, shape (n,)
        Starting point for the first local solve.
    eps_grad : float, optional
        Residual tolerance for each local solve; defaults to the
        model's gradient tolerance.
    eps_curv : float, optional
        Curvature threshold for the approximate escape tests.  When
        omitted, a per-point threshold 10*eps_grad/max(||s_bar||, 1e-8)
        capped at 1e-6 is used.

    Returns
    -------
    (GlobalSolution, SubproblemTrace)
        The solution's certificate is evaluated at the tolerances the
        final point actually met.

    Raises
    ------
    BoundExceeded
        More escapes fired than the stationary-count bound allows.
    ToleranceFloor
        Repeated threshold failures pushed eps_grad below 1e-15.
    """
    if eps_grad is None:
        eps_grad = m.default_tol_grad()
    eps_grad = float(eps_grad)
    if not eps_grad > 0.0:
        raise ValueError("eps_grad must be positive")
    if eps_curv is not None and not float(eps_curv) > 0.0:
        raise ValueError("eps_curv must be positive")

    cap = count_bound(m) + 2
    eps = eps_grad
    s = np.array(m._check_dim(s0), dtype=float)
    steps = []
    escapes = 0
    tightenings = 0
    while True:
        rep = local_minimize(m, s, _inner_opts(eps))
        if not rep.converged:
            raise ConvergenceError(
                f"local solve stalled at residual {rep.residual:.3e} "
                f"(target {eps:.3e})"
            )
        s_bar = rep.s
        ec = float(eps_curv) if eps_curv is not None else _adaptive_eps_curv(eps, s_bar)
        try:
            out = escape_mod.escape_approx(
                m, s_bar, escape_mod.ApproxTolerances(eps_grad=eps, eps_curv=ec)
            )
        except ThresholdNotMet:
            if tightenings >= _MAX_TIGHTENINGS or eps / 10.0 < _EPS_FLOOR:
                raise ToleranceFloor(
                    f"no escape threshold held down to eps_grad = {eps:.3e}"
                )
            tightenings += 1
            eps = eps / 10.0
            s = s_bar
            continue
        steps.append((s_bar, out.case_tag, model_mod.eval_model(m, s_bar)))
        if out.case_tag == escape_mod.CASE_NONE_GLOBAL:
            lam = m.sigma * float(np.linalg.norm(s_bar))
            residual = float(np.linalg.norm(model_mod.grad(m, s_bar)))
            psd_margin = float(m.eig.values[0]) + lam
            cert = GlobalCertificate(
                psd_margin=psd_margin,
                residual=residual,
                is_global=residual <= eps and psd_margin >= -ec,
                tol_grad=eps,
                tol_psd=ec,
            )
            sol = GlobalSolution(
                s_star=s_bar,
                lambda_star=lam,
                objective=model_mod.eval_model(m, s_bar),
                certificate=cert,
                hard_case=False,
                trace=[t[1] for t in steps],
            )
            return sol, SubproblemTrace(steps=steps, solution=sol, escape_count=escapes)
        escapes += 1
        if escapes > cap:
            raise BoundExceeded(
                f"{escapes} escapes exceed the stationary-count cap {cap}"
            )
        s = out.s_hat


def cauchy_step(m, g=None):
    """Exact minimizer of the cubic model along -grad.

    ``g`` defaults to the model gradient at 0 (that is, c).  Returns
    the step vector -t* g with the closed-form positive root t*.
    """
    if g is None:
        g = m.c
    g = np.asarray(g, dtype=float)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        return np.zeros(m.n)
    b = float(g @ (m.Q.entries @ g))
    disc = float(np.sqrt(b * b + 4.0 * m.sigma * gnorm**5))
    if b <= 0.0:
        t = (-b + disc) / (2.0 * m.sigma * gnorm**3)
    else:
        t = 2.0 * gnorm**2 / (b + disc)
    return -t * g


def _sphere_start(rng, n, sigma):
    v = rng.normal(size=n)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        v = np.ones(n)
        nv = float(np.linalg.norm(v))
    return (min(1.0, 1.0 / sigma) / nv) * v


def arc_plus_minimize(f, x0, variant=ARC_PLUS, opts=None):
    """Adaptive cubic-regularization outer loop.

    Parameters
    ----------
    f : ObjectiveFunction
    x0 : array_like, shape (n,), optional
        Defaults to the starting point registered on ``f``.
    variant : {"ARC", "ARC_PLUS"}
        ARC minimizes each subproblem locally from a seeded random
        start; ARC_PLUS solves it globally via escape moves.
    opts : ArcOptions, optional

    Returns
    -------
    OuterReport
        ``converged`` is true when the gradient sup-norm reached the
        outer tolerance within the iteration cap; otherwise the report
        carries the last iterate with ``converged = False``.

    Both variants safeguard the subproblem step against the Cauchy
    point, so every accepted step decreases the model at least that
    much.  Fixed options imply an identical report on replay.
    """
    if variant not in (ARC, ARC_PLUS):
        raise ValueError(f"unknown variant {variant!r}")
    if opts is None:
        opts = ArcOptions()
    if x0 is None:
        x0 = f.x0
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != f.n:
        raise ValueError(f"x0 has length {x.shape[0]}, expected {f.n}")
    rng = np.random.default_rng(opts.seed)

    sigma = opts.sigma0
    fx = f.f(x)
    sigma_history = []
    f_history = [fx]
    margins = []
    iterations = 0
    converged = False
    g = f.grad(x)
    ginf = float(np.max(np.abs(g))) if x.size else 0.0

    while iterations < opts.max_iters:
        if ginf <= opts.tol_grad_inf:
            converged = True
            break
        iterations += 1
        sigma_history.append(sigma)
        m = CubicModel(g, f.hess(x), sigma)
        gnorm = float(np.linalg.norm(g))
        eps_inner = max(min(0.01, 0.1 * gnorm) * gnorm, 1e-12)
        s0 = cauchy_step(m) if opts.cauchy_start else _sphere_start(rng, f.n, sigma)

        margin = None
        if variant == ARC:
            rep = local_minimize(m, s0, _inner_opts(eps_inner))
            s = rep.s
        else:
            sol, _ = solve_via_escapes(m, s0, eps_grad=eps_inner)
            s = sol.s_star
            margin = sol.certificate.psd_margin
        s_c = cauchy_step(m)
        if model_mod.eval_model(m, s_c) < model_mod.eval_model(m, s):
            s = s_c
            margin = None

        mval = model_mod.eval_model(m, s)
        if not mval < 0.0:
            sigma = 2.0 * sigma
            continue
        f_new = f.f(x + s)
        rho = (fx - f_new) / (-mval)
        if rho >= opts.eta1:
            x = x + s
            fx = f_new
            f_history.append(fx)
            margins.append(margin)
            g = f.grad(x)
            ginf = float(np.max(np.abs(g)))
            if rho >= opts.eta2:
                sigma = max(sigma / 2.0, opts.sigma_min)
        else:
            sigma = 2.0 * sigma

    return OuterReport(
        x_final=x,
        f_final=fx,
        grad_inf_norm=ginf,
        iterations=iterations,
        sigma_history=sigma_history,
        variant=variant,
        converged=converged,
        f_history=f_history,
        accepted_psd_margins=margins,
    )


@dataclass(frozen=True)
class ProfileTable:
    """Sampled performance-profile curves.

    ``taus`` is the ratio grid; ``curves`` maps each variant to its
    fraction-solved values aligned with ``taus``.
    """

    taus: list
    curves: dict


def performance_profile(reports):
    """Dolan-More profile over (problem, variant, iterations) triples.

    ``iterations`` may be None (or inf) to mark a failed run; failed
    runs get an infinite ratio.  Only problems with an entry for every
    variant participate.

    Raises
    ------
    EmptyInput
        No problem carries results for at least two variants.
    """
    table = {}
    variants = []
    for problem, variant, iters in reports:
        if variant not in variants:
            variants.append(variant)
        cost = np.inf if iters is None else float(iters)
        if not cost > 0.0:
            raise ValueError(f"nonpositive iteration count for {problem!r}")
        table.setdefault(problem, {})[variant] = cost
    problems = [p for p, row in table.items() if len(row) == len(variants)]
    if len(variants) < 2 or not problems:
        raise EmptyInput("need at least one problem with every variant present")

    ratios = {v: [] for v in variants}
    for p in problems:
        row = table[p]
        best = min(row.values())
        for v in variants:
            if np.isinf(row[v]):
                ratios[v].append(np.inf)
            elif np.isinf(best):
                ratios[v].append(np.inf)
            else:
                ratios[v].append(row[v] / best)

    finite = [r for rs in ratios.values() for r in rs if np.isfinite(r)]
    tau_max = max(finite) if finite else 1.0
    n_steps = int(np.ceil((tau_max - 1.0) / 0.05 - 1e-12)) + 1
    taus = [1.0 + 0.05 * i for i in range(max(n_steps, 1))]
    if taus[-1] < tau_max - 1e-12:
        taus.append(tau_max)
    count = float(len(problems))
    curves = {
        v: [sum(1 for r in ratios[v] if r <= t + 1e-12) / count for t in taus]
        for v in variants
    }
    return ProfileTable(taus=taus, curves=curves)
