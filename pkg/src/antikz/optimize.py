"""Optimal sweep rate of the noisy Ising chain.

Slow sweeps suppress Kibble-Zurek defects but let the noise heat the chain
for longer; n(kappa) = 1/(pi sqrt(2 kappa)) + 4 lambda kappa is minimal at
kappa_opt = (2^7 pi^2 lambda^2)^{-1/3}, i.e. v_opt/J^2 proportional to
lambda^{2/3}.  All rates are reported as v/J^2 = 1/kappa (J = 1).
"""

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError
from .ising import IsingParams, defect_closed, defect_density
from .numerics import minimize_scalar

__all__ = [
    "OptResult",
    "kappa_opt_first",
    "kappa_opt_second",
    "v_opt_closed",
    "epsilon",
    "zeta",
    "xi",
    "deviation_metrics",
    "v_opt_numeric",
]


@dataclass(frozen=True)
class OptResult:
    kappa_opt: float
    v_opt_over_J2: float
    n_min: float
    method: str
    n_evals: int = 0


def _check(lam):
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError("lambda must be finite and > 0")


def kappa_opt_first(lam):
    """Stationary point (2^7 pi^2 lambda^2)^{-1/3} of the first-order density."""
    _check(lam)
    return (2.0 ** 7 * math.pi ** 2 * lam * lam) ** (-1.0 / 3.0)


def epsilon(lam):
    """Relative shift (1/3)(pi^4 lambda / 2^4)^{1/3} of the second-order optimum."""
    _check(lam)
    return (math.pi ** 4 * lam / 2.0 ** 4) ** (1.0 / 3.0) / 3.0


def zeta(lam):
    """(pi^4 lambda / (2^4 3^3))^{1/3}: relative gap between the two closed-form rates."""
    _check(lam)
    return (math.pi ** 4 * lam / (2.0 ** 4 * 27.0)) ** (1.0 / 3.0)


def xi(lam):
    """(pi^4 lambda / (2^10 3^3))^{1/3} = zeta / 4."""
    _check(lam)
    return (math.pi ** 4 * lam / (2.0 ** 10 * 27.0)) ** (1.0 / 3.0)


def deviation_metrics(lam):
    return zeta(lam), xi(lam)


def kappa_opt_second(lam, exact=False):
    """Minimizer of the second-order density.

    By default the first-order perturbation kappa_1 (1 + epsilon); ``exact``
    solves d n^2nd / d kappa = 0 on the branch continued from kappa_1.
    """
    k1 = kappa_opt_first(lam)
    if not exact:
        return k1 * (1.0 + epsilon(lam))

    def dn(k):
        return -1.0 / (math.pi * (2.0 * k) ** 1.5) + 4.0 * lam - 4.0 * math.pi ** 2 * lam * lam * k

    hi = k1
    while dn(hi) <= 0:
        hi *= 1.5
        if hi > 1e3 * k1:
            raise DomainError("second-order density has no interior minimum")
    return brentq(dn, 0.5 * k1, hi, xtol=1e-14, rtol=1e-14)


def v_opt_closed(kind, lam):
    """Closed-form optimal v/J^2 (first or second order in lambda)."""
    _check(lam)
    v1 = (2.0 ** 7 * math.pi ** 2 * lam * lam) ** (1.0 / 3.0)
    if kind == "first":
        return v1
    if kind == "second":
        v2 = v1 - 2.0 * math.pi ** 2 * lam / 3.0
        if v2 <= 0:
            raise DomainError("second-order rate is not positive at this lambda")
        return v2
    raise ValueError(f"unknown kind {kind!r}")


def v_opt_numeric(lam, objective="inf_order", n_spins=100, window=(-200.0, 200.0),
                  threads=1, tol=None, rtol=1e-8, cache=None):
    """Minimize a defect density over kappa in [0.5, 10 lambda^{-2/3}].

    objective ``inf_order`` uses the closed all-orders density;
    ``master_numeric`` sums per-mode master-equation solutions.  ``cache``
    (a dict) memoizes the expensive objective across calls.
    """
    _check(lam)
    lo, hi = 0.5, 10.0 * lam ** (-2.0 / 3.0)
    evals = [0]
    if objective == "inf_order":
        def f(k):
            evals[0] += 1
            return defect_closed("inf_order", k, lam)

        x, fx = minimize_scalar(f, lo, hi, tol=tol or 1e-8)
    elif objective == "master_numeric":
        store = {} if cache is None else cache

        def f(k):
            key = (round(float(k), 12), lam, n_spins, tuple(window), rtol)
            if key not in store:
                evals[0] += 1
                p = IsingParams(float(k), lam, n_spins, window[0], window[1])
                store[key] = defect_density(p, threads=threads, rtol=rtol, atol=rtol * 1e-2).defect_density
            return store[key]

        x, fx = minimize_scalar(f, lo, hi, tol=tol or 1e-2, n_grid=13)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    return OptResult(x, 1.0 / x, fx, objective, evals[0])
