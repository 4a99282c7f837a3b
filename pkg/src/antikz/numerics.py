"""Generic numerical kernels: adaptive Dormand-Prince integration, adaptive
Gauss-Kronrod quadrature and a grid-seeded golden-section minimizer.

The ODE stepper is compiled with numba.  Right-hand sides use the in-place
signature ``rhs(t, y, p, out)`` where ``p`` is a parameter array, so the inner
loop does not allocate.  Plain Python callables ``rhs(t, y) -> dy`` are
accepted by :func:`integrate_ode` and run through the uncompiled twin of the
same stepper.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit
from numba.extending import is_jitted

from .errors import BracketError, ConvergenceError, MaxStepsError, StepUnderflowError

__all__ = [
    "OdeProblem",
    "OdeStats",
    "OdeSolution",
    "integrate_ode",
    "quad_adaptive",
    "minimize_scalar",
]

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAXSTEPS = 2

_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA


def _dopri_impl(rhs, t0, t1, y0, p, rtol, atol, h0, max_steps, t_eval):
    n = y0.shape[0]
    d = 1.0 if t1 >= t0 else -1.0
    t = t0
    y = y0.copy()
    yn = np.empty_like(y)
    ys = np.empty_like(y)
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    k5 = np.empty_like(y)
    k6 = np.empty_like(y)
    k7 = np.empty_like(y)
    samples = np.empty((t_eval.shape[0], n), dtype=y.dtype)
    nfev = 0
    rhs(t, y, p, k1)
    nfev += 1

    span = abs(t1 - t0)
    if h0 > 0.0:
        h = h0
    else:
        d0 = 0.0
        d1 = 0.0
        for i in range(n):
            sc = atol + rtol * abs(y[i])
            d0 += (abs(y[i]) / sc) ** 2
            d1 += (abs(k1[i]) / sc) ** 2
        d0 = np.sqrt(d0 / n)
        d1 = np.sqrt(d1 / n)
        if d0 < 1e-5 or d1 < 1e-5:
            h = 1e-6
        else:
            h = 0.01 * d0 / d1
    h = min(h, span) if span > 0 else 0.0

    isample = 0
    # samples sitting exactly at the start
    while isample < t_eval.shape[0] and t_eval[isample] == t0:
        for i in range(n):
            samples[isample, i] = y[i]
        isample += 1

    errold = 1e-4
    nacc = 0
    nrej = 0
    err_sum = 0.0
    status = STATUS_OK
    while d * (t1 - t) > 0.0:
        if nacc + nrej >= max_steps:
            status = STATUS_MAXSTEPS
            break
        target = t1
        if isample < t_eval.shape[0]:
            target = t_eval[isample]
        hmax = abs(target - t)
        clipped = False
        hs_abs = h
        if hs_abs >= hmax:
            hs_abs = hmax
            clipped = True
        if hs_abs <= 1e-14 * max(abs(t), 1.0) and not clipped:
            status = STATUS_UNDERFLOW
            break
        hs = d * hs_abs
        for i in range(n):
            ys[i] = y[i] + hs * A21 * k1[i]
        rhs(t + C2 * hs, ys, p, k2)
        for i in range(n):
            ys[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
        rhs(t + C3 * hs, ys, p, k3)
        for i in range(n):
            ys[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs(t + C4 * hs, ys, p, k4)
        for i in range(n):
            ys[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        rhs(t + C5 * hs, ys, p, k5)
        for i in range(n):
            ys[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        tn = t + hs
        if clipped:
            tn = target
        rhs(tn, ys, p, k6)
        for i in range(n):
            yn[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
        rhs(tn, yn, p, k7)
        nfev += 6
        s = 0.0
        emax = 0.0
        for i in range(n):
            e = abs(hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            s += (e / sc) ** 2
            if e > emax:
                emax = e
        err = np.sqrt(s / n)
        if err <= 1.0:
            t = tn
            for i in range(n):
                y[i] = yn[i]
                k1[i] = k7[i]
            nacc += 1
            err_sum += emax
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** (-_ALPHA) * errold ** _BETA
            fac = min(5.0, max(0.2, fac))
            errold = max(err, 1e-4)
            hnew = hs_abs * fac
            if clipped:
                # do not let a forced short step shrink the controller's step
                hnew = max(hnew, h)
            h = hnew
            if clipped and isample < t_eval.shape[0] and t == t_eval[isample]:
                while isample < t_eval.shape[0] and t_eval[isample] == t:
                    for i in range(n):
                        samples[isample, i] = y[i]
                    isample += 1
        else:
            nrej += 1
            h = hs_abs * max(0.2, 0.9 * err ** -0.2)
    return y, samples, status, nacc, nrej, nfev, err_sum, t


_dopri = njit(cache=True, nogil=True)(_dopri_impl)


@dataclass(frozen=True)
class OdeProblem:
    """Initial value problem y' = rhs(t, y) on [t0, t1].

    ``rhs`` is either a plain callable ``rhs(t, y) -> dy`` or a numba-jitted
    in-place kernel ``rhs(t, y, p, out)``; in the latter case ``params`` is
    handed over as ``p``.
    """

    rhs: Callable
    y0: np.ndarray
    t0: float
    t1: float
    rtol: float = 1e-10
    atol: float = 1e-12
    params: np.ndarray = field(default_factory=lambda: np.zeros(1))


@dataclass(frozen=True)
class OdeStats:
    n_accepted: int
    n_rejected: int
    n_rhs: int
    error_estimate: float  # sum of accepted local error norms (max-abs)


@dataclass(frozen=True)
class OdeSolution:
    y: np.ndarray
    t_eval: np.ndarray
    samples: np.ndarray
    stats: OdeStats


def _check_status(status, t, nacc):
    if status == STATUS_UNDERFLOW:
        raise StepUnderflowError(f"step size underflow at t={t:.6g} after {nacc} steps")
    if status == STATUS_MAXSTEPS:
        raise MaxStepsError(f"step budget exhausted at t={t:.6g}")


def run_dopri(rhs, t0, t1, y0, params, rtol, atol, t_eval=None, max_steps=50_000_000, h0=0.0):
    """Thin wrapper over the compiled stepper for jitted kernels.

    Returns ``(y_final, samples, OdeStats)`` and raises on failure.
    """
    te = np.empty(0) if t_eval is None else np.ascontiguousarray(t_eval, dtype=np.float64)
    y0 = np.ascontiguousarray(y0)
    y, samples, status, nacc, nrej, nfev, err_sum, t = _dopri(
        rhs, float(t0), float(t1), y0, params, float(rtol), float(atol), float(h0), int(max_steps), te
    )
    _check_status(status, t, nacc)
    return y, samples, OdeStats(int(nacc), int(nrej), int(nfev), float(err_sum))


def integrate_ode(problem: OdeProblem, t_eval=None, max_steps=10_000_000) -> OdeSolution:
    """Integrate ``problem`` with adaptive Dormand-Prince 5(4).

    Sample points in ``t_eval`` must be ordered in the direction of
    integration and lie within [t0, t1]; the stepper lands on them exactly.
    Works for complex or real states and for backward integration.
    """
    if not (np.isfinite(problem.t0) and np.isfinite(problem.t1)):
        raise ValueError("integration bounds must be finite")
    y0 = np.array(problem.y0)
    if y0.dtype.kind not in "fc":
        y0 = y0.astype(np.float64)
    te = np.empty(0) if t_eval is None else np.asarray(t_eval, dtype=np.float64)
    if te.size:
        lo, hi = sorted((problem.t0, problem.t1))
        if te.min() < lo or te.max() > hi:
            raise ValueError("t_eval outside the integration interval")
        step = np.diff(te) * (1.0 if problem.t1 >= problem.t0 else -1.0)
        if np.any(step < 0):
            raise ValueError("t_eval must be ordered along the direction of integration")

    if is_jitted(problem.rhs):
        p = np.asarray(problem.params)
        y, samples, stats = run_dopri(
            problem.rhs, problem.t0, problem.t1, y0, p, problem.rtol, problem.atol, te, max_steps
        )
    else:
        user = problem.rhs

        def rhs(t, y, p, out):
            out[:] = user(t, y)

        y, samples, status, nacc, nrej, nfev, err_sum, t = _dopri_impl(
            rhs, float(problem.t0), float(problem.t1), y0, None,
            float(problem.rtol), float(problem.atol), 0.0, int(max_steps), te,
        )
        _check_status(status, t, nacc)
        stats = OdeStats(int(nacc), int(nrej), int(nfev), float(err_sum))
    return OdeSolution(y=y, t_eval=te, samples=samples, stats=stats)


# -- quadrature ---------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
# full 15-point node set on [-1, 1] and matching weights
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_WK15 = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_WG7 = np.zeros(15)
_WG7[[1, 3, 5]] = _WG[:3]
_WG7[7] = _WG[3]
_WG7[[9, 11, 13]] = _WG[:3][::-1]


def _gk15(f, a, b):
    """Kronrod estimates and |K15 - G7| on a batch of intervals.

    A vector-valued integrand returns shape (m, npoints); the estimates then
    have shape (m, nintervals) and the error is summed over components.
    """
    c = 0.5 * (a + b)
    r = 0.5 * (b - a)
    x = c[:, None] + r[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()))
    fx = fx.reshape(fx.shape[:-1] + x.shape)
    k = (fx @ _WK15) * r
    g = (fx @ _WG7) * r
    e = np.abs(k - g)
    if e.ndim > 1:
        e = e.sum(axis=0)
    return k, e


def quad_adaptive(f, a, b, tol=1e-10, *, tail_exponent=None, tail_coeff=1.0, tail_start=1.0,
                  n_initial=1, breakpoints=None, max_intervals=400_000):
    """Globally adaptive Gauss-Kronrod (7, 15) quadrature of ``f`` over [a, b].

    ``f`` must accept a 1-D array of abscissae and return values of the same
    shape (real or complex).  An infinite endpoint requires an algebraic tail
    bound |f(x)| <= tail_coeff * |x|**tail_exponent for |x| >= tail_start with
    tail_exponent < -1.  The domain is then truncated where the bound on the
    discarded tail drops below tol/10; that bound is added to the error.

    ``breakpoints`` (finite range only) fixes the initial partition, which
    helps with oscillatory integrands.  Vector-valued integrands returning
    shape (m, n) give an m-vector value.  ``tol`` is absolute.

    Returns ``(value, error_estimate)``.
    """
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    tail_err = 0.0
    infinite = [not np.isfinite(a), not np.isfinite(b)]
    if any(infinite):
        if tail_exponent is None or tail_exponent >= -1:
            raise ValueError("infinite range needs tail_exponent < -1")
        p1 = -tail_exponent - 1.0
        # C X^{-p1}/p1 <= tol/10
        X = max(tail_start, (10.0 * tail_coeff / (p1 * tol)) ** (1.0 / p1))
        if infinite[0]:
            a = -X
            tail_err += tail_coeff * X ** (-p1) / p1
        if infinite[1]:
            b = X
            tail_err += tail_coeff * X ** (-p1) / p1
        # log-spaced initial partition spreads effort over decades
        edges = _initial_edges(a, b, max(n_initial, 8))
    elif breakpoints is not None:
        edges = np.unique(np.concatenate([[a, b], np.asarray(breakpoints, float)]))
        edges = edges[(edges >= a) & (edges <= b)]
    else:
        edges = np.linspace(a, b, n_initial + 1)

    lo = edges[:-1].astype(float)
    hi = edges[1:].astype(float)
    val, err = _gk15(f, lo, hi)
    target = tol - tail_err if tol > 2 * tail_err else 0.5 * tol
    while True:
        total_err = err.sum()
        if total_err <= target:
            break
        if lo.size >= max_intervals:
            raise ConvergenceError(
                f"quadrature did not converge: error {total_err:.3g} > {target:.3g} with {lo.size} intervals"
            )
        # split the intervals carrying the upper half of the error mass
        order = np.argsort(err)[::-1]
        csum = np.cumsum(err[order])
        nsplit = int(np.searchsorted(csum, 0.5 * total_err)) + 1
        nsplit = min(nsplit, max_intervals - lo.size)
        pick = order[:nsplit]
        keep = np.ones(lo.size, bool)
        keep[pick] = False
        mid = 0.5 * (lo[pick] + hi[pick])
        if np.any((mid <= lo[pick]) | (mid >= hi[pick])):
            raise ConvergenceError("quadrature interval underflow")
        nlo = np.concatenate([lo[pick], mid])
        nhi = np.concatenate([mid, hi[pick]])
        nv, ne = _gk15(f, nlo, nhi)
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        val = np.concatenate([val[..., keep], nv], axis=-1)
        err = np.concatenate([err[keep], ne])
    total = val.sum(axis=-1)
    return sign * total, float(err.sum() + tail_err)


def _initial_edges(a, b, n):
    """Partition [a, b] with geometric spacing away from the origin."""
    if a < 0 < b:
        neg = -_geom(0.0, -a, n)[::-1]
        pos = _geom(0.0, b, n)
        return np.concatenate([neg[:-1], pos])
    if a >= 0:
        return _geom(a, b, n)
    return -_geom(-b, -a, n)[::-1]


def _geom(a, b, n):
    # a >= 0; first cell [a, a+1] then geometric growth
    if b - a <= 2.0:
        return np.linspace(a, b, n + 1)
    inner = a + np.geomspace(1.0, b - a, n)
    return np.concatenate([[a], inner])


# -- minimization -------------------------------------------------------------

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar(f, lo, hi, tol=1e-6, n_grid=33, log_grid=True, max_iter=200):
    """Minimize a scalar function on [lo, hi].

    A coarse grid (logarithmic when ``log_grid`` and lo > 0) locates the best
    cell, then golden-section search refines it to relative width ``tol``.
    Raises BracketError if the smallest grid value sits at an endpoint, i.e.
    the bracket contains no interior minimum.

    Returns ``(x_min, f_min)``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if log_grid and lo > 0:
        grid = np.geomspace(lo, hi, n_grid)
    else:
        grid = np.linspace(lo, hi, n_grid)
    vals = np.array([f(x) for x in grid], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("objective is not finite on the coarse grid")
    i = int(np.argmin(vals))
    if i == 0 or i == n_grid - 1:
        raise BracketError(
            f"no interior minimum on [{lo:.6g}, {hi:.6g}]: coarse grid minimum at the endpoint x={grid[i]:.6g}"
        )
    a, b = grid[i - 1], grid[i + 1]
    if log_grid and lo > 0:
        # search in log x so that tol is relative
        g = lambda u: f(np.exp(u))
        a, b = np.log(a), np.log(b)
        u, fu = _golden(g, a, b, tol, max_iter)
        x, fx = float(np.exp(u)), fu
    else:
        x, fx = _golden(f, a, b, tol * max(abs(grid[i]), 1.0), max_iter)
    if fx > vals[i]:
        return float(grid[i]), float(vals[i])
    return x, fx


def _golden(f, a, b, tol, max_iter):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    if fc < fd:
        return float(c), float(fc)
    return float(d), float(fd)
