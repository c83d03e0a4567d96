"""Secular-equation analysis of the cubic model.

Stationary points s with multiplier lam = sigma*||s|| correspond to
roots lam > 0 of the secular equation g(lam) = 1/sigma^2, where
``g(lam) = (1/lam^2) * sum_i beta_i^2 / (mu_i + lam)^2`` and
``beta = -V^T c``.  g is strictly convex on every subinterval cut by its
positive poles, so each bounded subinterval holds at most two roots and
the unbounded rightmost one exactly one (when c is not zero); the number
of distinct multipliers is at most 2(k+1) with k the number of distinct
negative eigenvalues of Q.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from cubicmin import model as model_mod
from cubicmin.exceptions import (
    CertificateFailure,
    NormMismatch,
    PoleEvaluation,
)
from cubicmin.linalg import SINGULAR_MODE_TOL
from cubicmin.model import CubicModel, GlobalCertificate, StationaryPoint

_POLE_OFFSET_REL = 1e-9
_ZERO_EDGE_OFFSET = 1e-11
_GOLDEN_TOL = 1e-12
_BISECT_G_RTOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_EPS = float(np.finfo(float).eps)


class SecularProblem:
    """Spectral data of the secular equation for one cubic model.

    Attributes
    ----------
    eig : EigenDecomposition of Q.
    beta : ndarray
        ``-V^T c``, the eigenbasis loads of the linear term.
    sigma : float
    poles : ndarray
        Sorted values ``-mu_i`` restricted to coupled indices
        (``|beta_i| > pole_tol``), deduplicated within 1e-10.  Where the
        coupling vanishes g extends continuously across ``-mu_i``, so
        such points are not treated as poles.
    """

    def __init__(self, eig, beta, sigma, pole_tol, model=None):
        self.eig = eig
        self.beta = np.asarray(beta, dtype=float)
        self.sigma = float(sigma)
        self.pole_tol = float(pole_tol)
        self._model = model
        raw = sorted(-eig.values[np.abs(self.beta) > self.pole_tol])
        poles = []
        for p in raw:
            if not poles or p - poles[-1] > 1e-10:
                poles.append(p)
        self.poles = np.array(poles, dtype=float)

    @classmethod
    def from_model(cls, m):
        eig = m.eig
        beta = -(eig.vectors.T @ m.c)
        pole_tol = 1e-10 * (1.0 + m.norm_c)
        return cls(eig, beta, m.sigma, pole_tol, model=m)

    @property
    def model(self):
        """The source CubicModel, reconstructed from spectra if needed."""
        if self._model is None:
            V = self.eig.vectors
            c = -(V @ self.beta)
            Q = V @ np.diag(self.eig.values) @ V.T
            self._model = CubicModel(c, (Q + Q.T) / 2.0, self.sigma)
        return self._model

    def __repr__(self):
        return f"SecularProblem(n={self.eig.n}, sigma={self.sigma}, poles={self.poles!r})"


@dataclass(frozen=True)
class LambdaRoot:
    """One stationary multiplier with its host subinterval.

    ``note`` is "regular" for solutions of g(lam) = 1/sigma^2 away from
    poles, and "boundary" for degenerate multipliers sitting exactly on
    an uncoupled eigenvalue shift (hard-case stationary families).  The
    secular identity g(lam) = 1/sigma^2 holds for regular roots only.
    """

    lam: float
    lo: float
    hi: float
    note: str = "regular"


@dataclass(frozen=True)
class GlobalSolution:
    """Certified global minimizer of a cubic model."""

    s_star: np.ndarray
    lambda_star: float
    objective: float
    certificate: GlobalCertificate
    hard_case: bool
    trace: list = field(default_factory=list)


def g_eval(sp, lam):
    """Evaluate the secular function ``(1/lam^2) sum beta_i^2/(mu_i+lam)^2``.

    Raises
    ------
    PoleEvaluation
        If ``lam`` is within 1e-12 of zero or of a pole.
    """
    lam = float(lam)
    if abs(lam) <= SINGULAR_MODE_TOL:
        raise PoleEvaluation(f"lambda = {lam!r} is at the lambda = 0 pole")
    if sp.poles.size and float(np.min(np.abs(sp.poles - lam))) <= SINGULAR_MODE_TOL:
        raise PoleEvaluation(f"lambda = {lam!r} is at a pole of g")
    denom = sp.eig.values + lam
    loaded = sp.beta != 0.0
    if np.any(loaded & (denom == 0.0)):
        raise PoleEvaluation(f"lambda = {lam!r} hits an eigenvalue shift exactly")
    terms = (sp.beta[loaded] / denom[loaded]) ** 2
    return float(np.sum(terms) / lam**2)


def subintervals(sp):
    """The subintervals of (0, inf) cut by the positive poles of g.

    Returns a list of ``(lo, hi)`` pairs ascending, the last with
    ``hi = math.inf``.
    """
    cuts = [0.0] + [float(p) for p in sp.poles if p > 0.0]
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        out.append((lo, hi))
    out.append((cuts[-1], math.inf))
    return out


def _left_offset(lo):
    if lo == 0.0:
        return _ZERO_EDGE_OFFSET
    return _POLE_OFFSET_REL * (1.0 + lo)


def _golden_min(sp, a, b):
    """Locate the minimum of the strictly convex g on [a, b]."""
    tol = max(_GOLDEN_TOL, 8.0 * _EPS * max(abs(a), abs(b), 1.0))
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1 = g_eval(sp, x1)
    f2 = g_eval(sp, x2)
    for _ in range(400):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = g_eval(sp, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = g_eval(sp, x2)
    xm = 0.5 * (a + b)
    return xm, g_eval(sp, xm)


def _bisect(sp, xa, xb, target):
    """Bisect for g = target on [xa, xb]; g - target changes sign there."""
    ga = g_eval(sp, xa)
    for _ in range(300):
        mid = 0.5 * (xa + xb)
        gm = g_eval(sp, mid)
        if abs(gm - target) <= _BISECT_G_RTOL * target or (xb - xa) <= 16.0 * _EPS * max(
            1.0, abs(mid)
        ):
            return mid
        if (gm > target) == (ga > target):
            xa, ga = mid, gm
        else:
            xb = mid
    return 0.5 * (xa + xb)


def _roots_in_bounded(sp, lo, hi, target):
    """Both roots of g = target inside the bounded subinterval (lo, hi).

    g diverges at both ends and is strictly convex, so the roots (0, 1,
    or 2 of them) straddle the interior minimum found by golden section.
    """
    a = lo + _left_offset(lo)
    b = hi - _POLE_OFFSET_REL * (1.0 + hi)
    if a >= b:
        return []
    lam_min, g_min = _golden_min(sp, a, b)
    if g_min >= target:
        if abs(g_min - target) <= _BISECT_G_RTOL * target:
            return [LambdaRoot(lam=lam_min, lo=lo, hi=hi)]
        return []
    out = []
    if g_eval(sp, a) > target:
        out.append(LambdaRoot(lam=_bisect(sp, a, lam_min, target), lo=lo, hi=hi))
    if g_eval(sp, b) > target:
        out.append(LambdaRoot(lam=_bisect(sp, lam_min, b, target), lo=lo, hi=hi))
    return out


def _root_rightmost(sp, cut, target):
    """The single root in (cut, inf), where g decreases from +inf to 0."""
    lo = cut + _left_offset(cut)
    g_lo = g_eval(sp, lo)
    if g_lo <= target:
        # The root is squeezed against the pole; pull the offset in.
        base = _left_offset(cut)
        for k in range(1, 7):
            cand = cut + base / 10.0**k
            if cand <= cut or cand - cut <= 4.0 * SINGULAR_MODE_TOL:
                break
            g_cand = g_eval(sp, cand)
            if g_cand > target:
                lo, g_lo = cand, g_cand
                break
        else:
            return []
        if g_lo <= target:
            return []
    hi = max(2.0 * lo, lo + 1.0)
    for _ in range(200):
        if g_eval(sp, hi) < target:
            break
        hi *= 2.0
    else:
        return []
    return [LambdaRoot(lam=_bisect(sp, lo, hi, target), lo=cut, hi=math.inf)]


def enumerate_lambda(sp):
    """All roots lam > 0 of g(lam) = 1/sigma^2, ascending.

    Returns an empty list when c = 0 (no couplings): then only s = 0 can
    be stationary, and only because the gradient at the origin is c.
    """
    if not np.any(np.abs(sp.beta) > sp.pole_tol):
        return []
    target = 1.0 / sp.sigma**2
    roots = []
    intervals = subintervals(sp)
    for lo, hi in intervals[:-1]:
        roots.extend(_roots_in_bounded(sp, lo, hi, target))
    roots.extend(_root_rightmost(sp, intervals[-1][0], target))
    roots.sort(key=lambda r: r.lam)
    return roots


def _mode_coefficients(sp, lam):
    """Eigenbasis coefficients a with (mu_i + lam) a_i = beta_i.

    Singular modes must be unloaded (boundary roots); they get a_i = 0.
    """
    denom = sp.eig.values + lam
    singular = np.abs(denom) <= SINGULAR_MODE_TOL
    if np.any(singular & (np.abs(sp.beta) > sp.pole_tol)):
        i = int(np.argmax(singular & (np.abs(sp.beta) > sp.pole_tol)))
        raise PoleEvaluation(f"multiplier {lam!r} sits on the coupled pole {-sp.eig.values[i]!r}")
    coeff = np.zeros_like(sp.beta)
    ok = ~singular
    coeff[ok] = sp.beta[ok] / denom[ok]
    return coeff, singular


def stationary_from_lambda(sp, root):
    """Stationary point(s) carrying the multiplier of one root.

    Regular roots produce the single point ``s = V a`` with
    ``a_i = beta_i / (mu_i + lam)``.  Boundary roots (uncoupled
    eigenvalue shifts) produce the two representatives
    ``V a +/- tau v_i`` with tau chosen so ``||s|| = lam / sigma``; the
    full continuum they stand for shares one objective value.

    Raises
    ------
    NormMismatch
        If a boundary root has ``||V a|| > lam/sigma`` beyond tolerance.
    """
    m = sp.model
    lam = root.lam
    coeff, singular = _mode_coefficients(sp, lam)
    base = sp.eig.vectors @ coeff
    if root.note != "boundary":
        return [StationaryPoint.from_vector(m, base)]
    radius = lam / sp.sigma
    norm_base = float(np.linalg.norm(base))
    if norm_base > radius + 1e-8 * (1.0 + radius):
        raise NormMismatch(
            f"boundary multiplier {lam!r}: ||V a|| = {norm_base!r} exceeds lam/sigma = {radius!r}"
        )
    if not np.any(singular):
        raise NormMismatch(f"boundary multiplier {lam!r} has no null mode")
    tau = math.sqrt(max(0.0, radius**2 - norm_base**2))
    v = sp.eig.vectors[:, int(np.argmax(singular))]
    return [
        StationaryPoint.from_vector(m, base + tau * v),
        StationaryPoint.from_vector(m, base - tau * v),
    ]


def _c_is_zero(m):
    return m.norm_c <= 1e-12 * (1.0 + m.Q.max_abs)


def _boundary_roots(m, sp):
    """Degenerate multipliers lam = -mu_i: uncoupled and norm-feasible."""
    out = []
    vals = sp.eig.values
    seen = []
    for i in range(m.n):
        if vals[i] >= 0.0:
            continue
        lam = -float(vals[i])
        if any(abs(lam - s) <= SINGULAR_MODE_TOL for s in seen):
            continue
        seen.append(lam)
        cluster = np.abs(vals + lam) <= SINGULAR_MODE_TOL
        if np.any(cluster & (np.abs(sp.beta) > sp.pole_tol)):
            continue
        coeff, _ = _mode_coefficients(sp, lam)
        if float(np.linalg.norm(coeff)) > lam / sp.sigma + 1e-8 * (1.0 + lam / sp.sigma):
            continue
        spread = _POLE_OFFSET_REL * (1.0 + lam)
        out.append(LambdaRoot(lam=lam, lo=lam - spread, hi=lam + spread, note="boundary"))
    return out


def enumerate_stationary(m):
    """Every stationary point of the model, ascending in multiplier.

    The union of: the origin when c = 0; one point per regular secular
    root; two representatives per degenerate boundary multiplier.  The
    number of distinct multipliers is bounded by ``count_bound(m)``.
    """
    points = []
    if _c_is_zero(m):
        points.append(StationaryPoint.from_vector(m, np.zeros(m.n)))
    sp = SecularProblem.from_model(m)
    for root in enumerate_lambda(sp):
        points.extend(stationary_from_lambda(sp, root))
    for root in _boundary_roots(m, sp):
        points.extend(stationary_from_lambda(sp, root))
    points.sort(key=lambda p: p.lam)
    return points


def count_bound(m):
    """The bound 2(k+1) on distinct stationary multipliers.

    k counts distinct negative eigenvalues of Q, with distinctness
    tolerance ``1e-9 * (1 + |mu_1|)``.
    """
    vals = m.eig.values
    tol = 1e-9 * (1.0 + abs(float(vals[0])))
    k = 0
    last = None
    for v in vals:
        if v >= 0.0:
            continue
        if last is None or abs(v - last) > tol:
            k += 1
        last = float(v)
    return 2 * (k + 1)


def _gap_function(m, beta):
    """Return gap(lam) = ||s(lam)|| - lam/sigma with s(lam) solving the shift.

    Unloaded singular modes contribute zero, mirroring the solver.
    """
    vals = m.eig.values

    def gap(lam):
        denom = vals + lam
        ok = np.abs(denom) > SINGULAR_MODE_TOL
        norm_s = float(np.linalg.norm(beta[ok] / denom[ok]))
        return norm_s - lam / m.sigma

    return gap


def global_minimize(m):
    """Certified global minimization of the cubic model.

    Finds the multiplier ``lam* >= max(0, -mu_1)`` with
    ``||s(lam*)|| = lam*/sigma``: by bisection on the monotone gap
    ``||(Q+lam I)^{-1} c|| - lam/sigma`` when a root exists beyond
    ``-mu_1``, otherwise through the hard case ``lam* = -mu_1`` with a
    free component along the bottom eigenvector.  The two-part
    certificate (stationarity plus positive semidefiniteness of
    ``Q + lam* I``) is verified before returning.

    Raises
    ------
    CertificateFailure
        If the computed point fails its own certificate; indicates a
        tolerance bug and must not occur in practice.
    """
    trace = []
    eig = m.eig
    mu1 = float(eig.values[0])
    sigma = m.sigma
    beta = -(eig.vectors.T @ m.c)

    if _c_is_zero(m):
        if mu1 >= 0.0:
            trace.append("c = 0 and Q is positive semidefinite: s* = 0")
            s_star = np.zeros(m.n)
            hard = False
        else:
            tau = -mu1 / sigma
            s_star = tau * eig.vectors[:, 0]
            hard = True
            trace.append(f"c = 0 pure eigenstep: lam* = {-mu1!r}, tau = {tau!r}")
        return _finish_global(m, s_star, hard, trace)

    gap = _gap_function(m, beta)
    base = max(0.0, -mu1)
    offset = max(1e-8, 1e-8 * abs(mu1))
    lo = base + offset
    g_lo = gap(lo)
    if g_lo <= 0.0:
        for k in range(1, 7):
            cand = base + offset / 10.0**k
            if cand - base <= 4.0 * SINGULAR_MODE_TOL:
                break
            if gap(cand) > 0.0:
                lo, g_lo = cand, gap(cand)
                break

    if g_lo > 0.0:
        cap = 10.0 * math.sqrt(sigma * m.norm_c) + 10.0 * m.Q.max_abs + lo
        hi = max(2.0 * lo, lo + 1.0)
        for _ in range(300):
            if gap(hi) < 0.0:
                break
            if hi > 4.0 * cap:
                raise CertificateFailure(
                    f"gap bracketing passed the bound {cap!r} without a sign change"
                )
            hi *= 2.0
        trace.append(f"regular root bracketed in [{lo!r}, {hi!r}]")
        resid_target = 1e-9 * (1.0 + m.norm_c)
        lam = 0.5 * (lo + hi)
        for _ in range(300):
            lam = 0.5 * (lo + hi)
            g_mid = gap(lam)
            norm_s = g_mid + lam / sigma
            if sigma * abs(g_mid) * max(1.0, norm_s) <= resid_target:
                break
            if (hi - lo) <= 8.0 * _EPS * max(1.0, lam):
                break
            if g_mid > 0.0:
                lo = lam
            else:
                hi = lam
        denom = eig.values + lam
        ok = np.abs(denom) > SINGULAR_MODE_TOL
        coeff = np.zeros_like(beta)
        coeff[ok] = beta[ok] / denom[ok]
        s_star = eig.vectors @ coeff
        trace.append(f"bisection converged at lam = {lam!r}")
        return _finish_global(m, s_star, False, trace)

    # Hard case: no root beyond -mu_1; the minimizer sits at lam* = -mu_1.
    lam_star = base
    trace.append(f"hard case: lam* = max(0, -mu_1) = {lam_star!r}")
    denom = eig.values + lam_star
    singular = np.abs(denom) <= SINGULAR_MODE_TOL
    coeff = np.zeros_like(beta)
    ok = ~singular
    coeff[ok] = beta[ok] / denom[ok]
    base_vec = eig.vectors @ coeff
    radius = lam_star / sigma
    tau_sq = radius**2 - float(np.sum(coeff**2))
    if tau_sq < -1e-8 * (1.0 + radius**2):
        raise CertificateFailure(
            f"hard-case norm equation infeasible: tau^2 = {tau_sq!r}"
        )
    if not np.any(singular):
        raise CertificateFailure("hard case detected but no null mode at lam* = -mu_1")
    tau = math.sqrt(max(0.0, tau_sq))
    v = eig.vectors[:, int(np.argmax(singular))]
    s_star = base_vec + tau * v
    trace.append(f"hard-case free component tau = {tau!r}")
    return _finish_global(m, s_star, True, trace)


def _finish_global(m, s_star, hard, trace):
    cert = model_mod.is_global(m, s_star)
    if not cert.is_global:
        raise CertificateFailure(
            f"certificate failed: residual = {cert.residual!r} (tol {cert.tol_grad!r}), "
            f"psd margin = {cert.psd_margin!r} (tol {cert.tol_psd!r})"
        )
    s_star = np.array(s_star)
    s_star.setflags(write=False)
    return GlobalSolution(
        s_star=s_star,
        lambda_star=m.sigma * float(np.linalg.norm(s_star)),
        objective=model_mod.eval_model(m, s_star),
        certificate=cert,
        hard_case=hard,
        trace=trace,
    )
