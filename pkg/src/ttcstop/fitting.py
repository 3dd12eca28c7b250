"""Curve fitting for accuracy projection and TTC extrapolation.

Accuracy is in percentage points ([0, 100]) throughout. Two models are
fitted by damped Gauss-Newton (Levenberg-Marquardt) with analytic
Jacobians:

* exponential saturation over training FLOPs, ``a*(1 - exp(-b*x)) + c``,
  projecting the validation accuracy a run would reach at full budget;
* a sigmoid over the sample count K, ``L / (1 + exp(-k*(K - x0)))``,
  extrapolating accuracy under repeated-sampling inference.

Validation accuracy fluctuates during training, so ``monotone_filter``
keeps only points at or above the running maximum before the saturation
fit; the fit then tracks the achievable ceiling rather than the noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, NonConvergence, NonMonotoneInput, TooFewPoints

ACC_MAX = 100.0
# Invariant slack on a + c <= 100 for fitted parameters.
_SUM_TOL = 1e-6


@dataclass(frozen=True)
class AccuracyPoint:
    """One observation: abscissa (FLOPs or sample count K) and accuracy (pp)."""

    x: float
    y: float

    def __post_init__(self):
        if self.x < 0:
            raise ValueError("x must be >= 0")
        if not 0.0 <= self.y <= 100.0:
            raise ValueError("y must be in [0, 100] percentage points")


@dataclass(frozen=True)
class FitOptions:
    """Optimizer and filter settings.

    ``tolerance`` is the relative residual-sum-of-squares improvement per
    accepted step below which the fit counts as converged; damping grows
    x10 on a rejected step and shrinks /10 on an accepted one.
    """

    tolerance: float = 1e-12
    max_iter: int = 200
    gtol: float = 1e-10
    damping_init: float = 1e-3
    b_floor: float = 1e-30
    b_max: float = 1.0
    k_floor: float = 1e-9
    k_max: float = 10.0
    filter_tolerance: float = 0.0


@dataclass(frozen=True)
class ExpSatParams:
    """Fitted exponential saturation parameters with fit diagnostics.

    ``a`` is the accuracy gain scale (pp), ``b`` the convergence rate
    (per FLOP), ``c`` the base accuracy at initialization (pp).
    ``degenerate`` flags a flat-data fallback (a=0, c=mean y) that the
    caller should not extrapolate from with confidence.
    """

    a: float
    b: float
    c: float
    rss: float
    n_points: int
    degenerate: bool = False

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be >= 0")
        if self.b <= 0:
            raise ValueError("b must be > 0")
        if not 0.0 <= self.c <= ACC_MAX:
            raise ValueError("c must be in [0, 100]")
        if self.a + self.c > ACC_MAX + _SUM_TOL:
            raise ValueError("a + c may not exceed 100 beyond numerical slack")
        if self.rss < 0:
            raise ValueError("rss must be >= 0")


@dataclass(frozen=True)
class SigmoidParams:
    """Fitted TTC sigmoid parameters with fit diagnostics.

    ``L`` is the maximum achievable TTC accuracy (pp), ``k`` the growth
    rate per sample, ``x0`` the inflection point in samples (may sit
    below 1 when accuracy at K=1 already exceeds L/2). ``degenerate``
    flags flat input where no unique sigmoid exists.
    """

    L: float
    k: float
    x0: float
    rss: float
    n_points: int
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 < self.L <= ACC_MAX:
            raise ValueError("L must be in (0, 100]")
        if self.k <= 0:
            raise ValueError("k must be > 0")
        if self.rss < 0:
            raise ValueError("rss must be >= 0")


def monotone_filter(
    points: list[AccuracyPoint], tolerance: float = 0.0
) -> list[AccuracyPoint]:
    """Keep points whose accuracy is at or above the running maximum.

    The comparison is >= against the maximum of all earlier input points
    (so the first point always survives); ``tolerance`` relaxes it to
    ``y >= running_max - tolerance``. With the default zero tolerance the
    output is nondecreasing and the filter is idempotent.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    for prev, cur in zip(points, points[1:]):
        if cur.x <= prev.x:
            raise ValueError("points must be ordered by strictly increasing x")
    kept: list[AccuracyPoint] = []
    running = -math.inf
    for p in points:
        if p.y >= running - tolerance:
            kept.append(p)
        running = max(running, p.y)
    return kept


def _levenberg_marquardt(model_jac, y, p0, project, opts: FitOptions):
    """Minimize ||model(p) - y||^2 from ``p0`` under bound projection.

    ``model_jac(p) -> (yhat, J)`` with analytic ``J``; every linear solve
    counts against ``opts.max_iter``. Returns ``(p, rss)``; raises
    NonConvergence only when the cap is hit with the gradient still above
    ``opts.gtol``.
    """
    p = project(np.asarray(p0, dtype=float))
    yhat, jac = model_jac(p)
    resid = yhat - y
    rss = float(resid @ resid)
    lam = opts.damping_init
    n_solves = 0
    while n_solves < opts.max_iter:
        grad = jac.T @ resid
        if np.max(np.abs(grad)) <= opts.gtol:
            return p, rss
        normal = jac.T @ jac
        diag = np.diag(normal).copy()
        diag[diag <= 0.0] = 1.0
        accepted = False
        improvement = 0.0
        while n_solves < opts.max_iter:
            n_solves += 1
            try:
                step = np.linalg.solve(normal + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(normal + lam * np.diag(diag), -grad, rcond=None)[0]
            p_new = project(p + step)
            yhat_new, jac_new = model_jac(p_new)
            resid_new = yhat_new - y
            rss_new = float(resid_new @ resid_new)
            if rss_new < rss:
                lam = max(lam / 10.0, 1e-14)
                improvement = rss - rss_new
                p, jac, resid, rss = p_new, jac_new, resid_new, rss_new
                accepted = True
                break
            lam *= 10.0
            if lam > 1e16:
                # No descent direction at machine precision: local optimum.
                return p, rss
        if not accepted:
            break
        if improvement <= opts.tolerance * max(rss, 1e-300):
            return p, rss
    grad = jac.T @ resid
    if np.max(np.abs(grad)) > opts.gtol:
        raise NonConvergence(
            f"no convergence in {opts.max_iter} iterations (|grad|={np.max(np.abs(grad)):.3e})"
        )
    return p, rss


def _project_expsat(p: np.ndarray, opts: FitOptions, x_scale: float) -> np.ndarray:
    a = min(max(p[0], 0.0), ACC_MAX)
    c = min(max(p[2], 0.0), ACC_MAX)
    if a + c > ACC_MAX:
        shift = (a + c - ACC_MAX) / 2.0
        a -= shift
        c -= shift
        if a < 0.0:
            c += a
            a = 0.0
        if c < 0.0:
            a += c
            c = 0.0
    b = min(max(p[1], opts.b_floor * x_scale), opts.b_max * x_scale)
    return np.array([a, b, c])


def fit_exp_saturation(
    points: list[AccuracyPoint], opts: FitOptions | None = None
) -> ExpSatParams:
    """Least-squares fit of ``a*(1 - exp(-b*x)) + c`` to accuracy points.

    Needs >= 3 points with unequal x. Flat y returns a flagged degenerate
    result (a=0, c=mean) instead of raising so a controlling caller can
    continue. Internally x is rescaled by max(x) for conditioning; bounds
    (a, c in [0, 100] with a+c <= 100, b in [b_floor, b_max]) are applied
    by projection after every step and results are in external units.
    The prescribed initialization is tried first, then a deterministic
    ladder of rate multipliers; the lowest-rss fit wins.
    """
    opts = opts or FitOptions()
    pts = sorted(points, key=lambda p: p.x)
    if len(pts) < 3:
        raise TooFewPoints(f"need >= 3 points, got {len(pts)}")
    x = np.array([p.x for p in pts], dtype=float)
    y = np.array([p.y for p in pts], dtype=float)
    if np.ptp(x) == 0.0:
        raise DegenerateInput("x values are all equal")
    if np.ptp(y) == 0.0:
        return ExpSatParams(
            a=0.0, b=opts.b_floor, c=float(y[0]), rss=0.0,
            n_points=len(pts), degenerate=True,
        )

    x_scale = float(x.max())
    xs = x / x_scale

    def model_jac(p):
        a, b, c = p
        decay = np.exp(-b * xs)
        yhat = a * (1.0 - decay) + c
        jac = np.column_stack([1.0 - decay, a * xs * decay, np.ones_like(xs)])
        return yhat, jac

    def proj(p):
        return _project_expsat(p, opts, x_scale)

    c0 = float(y[0])
    a0 = min(max((float(y.max()) - c0) / (1.0 - math.exp(-1.0)), 0.0), ACC_MAX)
    span = float(x.max() - x.min())
    b0 = x_scale / (span + 1e-9 * x_scale)  # 1/(x_max - x_min) in scaled units

    best = None
    for mult in (1.0, 0.1, 10.0, 100.0, 0.01):
        try:
            p_fit, rss = _levenberg_marquardt(
                model_jac, y, np.array([a0, b0 * mult, c0]), proj, opts
            )
        except NonConvergence:
            continue
        if best is None or rss < best[1]:
            best = (p_fit, rss)
    if best is None:
        raise NonConvergence("exponential saturation fit failed from every start")
    (a, b_int, c), rss = best
    return ExpSatParams(
        a=float(a), b=float(b_int / x_scale), c=float(c),
        rss=float(rss), n_points=len(pts),
    )


def project(params: ExpSatParams, budget: float) -> float:
    """Projected accuracy (pp) at training FLOPs ``budget``, clamped to [0, 100]."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    value = params.a * (1.0 - math.exp(-params.b * budget)) + params.c
    return min(max(value, 0.0), ACC_MAX)


def _sigmoid_curve(x: np.ndarray, L: float, k: float, x0: float) -> np.ndarray:
    z = np.clip(-k * (x - x0), -500.0, 500.0)
    return L / (1.0 + np.exp(z))


def fit_sigmoid(
    points: list[AccuracyPoint], opts: FitOptions | None = None
) -> SigmoidParams:
    """Least-squares fit of ``L / (1 + exp(-k*(K - x0)))`` over sample counts.

    Needs >= 3 points at distinct K. Raises NonMonotoneInput when the
    accuracies decrease anywhere (the caller should fall back to measured
    values); flat input returns a flagged degenerate result since no
    unique sigmoid exists. With exactly 3 points the fit interpolates
    whenever a valid sigmoid through them exists.
    """
    opts = opts or FitOptions()
    pts = sorted(points, key=lambda p: p.x)
    if len(pts) < 3 or len({p.x for p in pts}) < 3:
        raise TooFewPoints(f"need >= 3 points with distinct K, got {len(pts)}")
    x = np.array([p.x for p in pts], dtype=float)
    y = np.array([p.y for p in pts], dtype=float)
    if np.any(np.diff(y) < 0):
        raise NonMonotoneInput("accuracy not nondecreasing in K")
    if np.ptp(y) == 0.0:
        mean_y = float(y[0])
        return SigmoidParams(
            L=min(max(2.0 * mean_y, 1e-9), ACC_MAX), k=opts.k_floor,
            x0=float(np.median(x)), rss=0.0, n_points=len(pts), degenerate=True,
        )

    def model_jac(p):
        L, k, x0 = p
        z = np.clip(k * (x - x0), -500.0, 500.0)
        sig = 1.0 / (1.0 + np.exp(-z))
        yhat = L * sig
        dsig = sig * (1.0 - sig)
        jac = np.column_stack([sig, L * dsig * (x - x0), -L * dsig * k])
        return yhat, jac

    def proj(p):
        return np.array([
            min(max(p[0], 1e-9), ACC_MAX),
            min(max(p[1], opts.k_floor), opts.k_max),
            p[2],
        ])

    l0 = min(1.05 * float(y.max()), ACC_MAX)
    x00 = float(np.median(x))
    # Growth rate solved from the two extreme points: ln(L/y - 1) is
    # linear in K with slope -k.
    y_lo = min(max(float(y[0]), 1e-6), l0 * (1.0 - 1e-9))
    y_hi = min(max(float(y[-1]), 1e-6), l0 * (1.0 - 1e-9))
    z_lo = math.log(l0 / y_lo - 1.0)
    z_hi = math.log(l0 / y_hi - 1.0)
    k0 = min(max((z_lo - z_hi) / (x[-1] - x[0]), opts.k_floor), opts.k_max)

    best = None
    for l_init, k_mult in ((l0, 1.0), (l0, 0.3), (l0, 3.0), (min(1.5 * float(y.max()), ACC_MAX), 1.0), (ACC_MAX, 1.0)):
        try:
            p_fit, rss = _levenberg_marquardt(
                model_jac, y, np.array([l_init, k0 * k_mult, x00]), proj, opts
            )
        except NonConvergence:
            continue
        if best is None or rss < best[1]:
            best = (p_fit, rss)
    if best is None:
        raise NonConvergence("sigmoid fit failed from every start")
    (L, k, x0), rss = best
    return SigmoidParams(
        L=float(L), k=float(k), x0=float(x0), rss=float(rss), n_points=len(pts)
    )


def predict_ttc(params: SigmoidParams, k: float) -> float:
    """Predicted TTC accuracy (pp) at sample count ``k``, clamped to [0, 100].

    Strictly increasing in k for any fitted growth rate.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    z = min(max(-params.k * (k - params.x0), -500.0), 500.0)
    value = params.L / (1.0 + math.exp(z))
    return min(max(value, 0.0), ACC_MAX)
