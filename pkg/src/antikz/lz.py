"""Landau-Zener sweep with a white-noise dephasing term.

Dimensionless units: tau = sqrt(v) t, kappa = J^2/v, lambda = W^2/J.  The
noise-averaged density matrix obeys

    d rho/d tau = -i [H(tau), rho] + (lambda sqrt(kappa)/2) [[sigma_z, rho], sigma_z],
    H(tau) = (tau/2) sigma_z + sqrt(kappa) sigma_x,

with the Liouville vector ordered (rho11, rho12, rho21, rho22).  State |up>
(index 1) is the diabatic state that starts in the ground state at
tau -> -infinity, so rho11(tau_f) is the transition probability.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.optimize import brentq

from . import specfun
from .errors import DomainError
from .numerics import quad_adaptive, run_dopri

__all__ = [
    "LZParams",
    "DensityMatrix2",
    "Propagator",
    "from_physical",
    "liouvillian",
    "evolve_master",
    "master_trajectory",
    "lz_propagator",
    "evolve_interaction",
    "x_kappa",
    "y_kappa",
    "prob_first_order",
    "dominance_terms",
    "dominance_crossover",
    "p_closed",
    "noise_trajectory_oracle",
]

KAPPA_EDGE = 1e-6


@dataclass(frozen=True)
class LZParams:
    kappa: float
    lam: float = 0.0
    tau_i: float = -200.0
    tau_f: float = 200.0

    def __post_init__(self):
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise DomainError("kappa must be finite and >= 0")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise DomainError("lambda must be finite and >= 0")
        if not self.tau_i < self.tau_f:
            raise DomainError("need tau_i < tau_f")

    @property
    def dephasing(self):
        """Decay rate 2 lambda sqrt(kappa) of the coherences."""
        return 2.0 * self.lam * math.sqrt(self.kappa)


def from_physical(J, v, W):
    """(kappa, lambda) from coupling J, sweep rate v and noise strength W."""
    if J <= 0 or v <= 0 or W < 0:
        raise DomainError("need J > 0, v > 0, W >= 0")
    return J * J / v, W * W / J


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 density matrix; ``m[0, 0]`` is the |up> population."""

    m: np.ndarray

    @classmethod
    def up(cls):
        return cls(np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex))

    @classmethod
    def from_vec(cls, v):
        return cls(np.asarray(v, dtype=complex).reshape(2, 2).copy())

    def vec(self):
        return self.m.reshape(4).astype(complex)

    @property
    def p_up(self):
        return float(self.m[0, 0].real)

    def check(self, herm_tol=1e-10, trace_tol=1e-9, eig_floor=-1e-8):
        """Raise ValueError unless Hermitian, unit-trace and positive."""
        m = self.m
        if abs(m[1, 0] - np.conj(m[0, 1])) > herm_tol or abs(m[0, 0].imag) > herm_tol or abs(m[1, 1].imag) > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > trace_tol:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < eig_floor:
            raise ValueError("density matrix has a negative eigenvalue")
        return self


@dataclass(frozen=True)
class Propagator:
    """U = [[f, -g*], [g, f*]] for the coherent sweep from tau_i to tau."""

    f: complex
    g: complex
    kappa: float
    tau: float
    tau_i: float

    @property
    def matrix(self):
        f, g = self.f, self.g
        return np.array([[f, -np.conj(g)], [g, np.conj(f)]])

    @property
    def unitarity_defect(self):
        return abs(abs(self.f) ** 2 + abs(self.g) ** 2 - 1.0)


def liouvillian(params, tau):
    """4x4 generator acting on (rho11, rho12, rho21, rho22)."""
    s = math.sqrt(params.kappa)
    g = params.dephasing
    return np.array([
        [0, 1j * s, -1j * s, 0],
        [1j * s, -1j * tau - g, 0, -1j * s],
        [-1j * s, 0, 1j * tau - g, 1j * s],
        [0, -1j * s, 1j * s, 0],
    ], dtype=complex)


# -- Schroedinger-picture master equation --------------------------------------


@njit(cache=True, nogil=True)
def _master_rhs(t, y, p, out):
    sk = p[0]
    g = p[1]
    a = 1j * sk * (y[1] - y[2])
    b = 1j * sk * (y[0] - y[3])
    out[0] = a
    out[1] = b + (-1j * t - g) * y[1]
    out[2] = -b + (1j * t - g) * y[2]
    out[3] = -a


def _rho0(rho0):
    if rho0 is None:
        return DensityMatrix2.up()
    if not isinstance(rho0, DensityMatrix2):
        rho0 = DensityMatrix2(np.asarray(rho0, dtype=complex))
    return rho0.check()


def master_trajectory(params, taus, rho0=None, rtol=1e-10, atol=1e-12):
    """rho(tau) at the sample points ``taus`` (ascending within the window)."""
    rho0 = _rho0(rho0)
    p = np.array([math.sqrt(params.kappa), params.dephasing])
    taus = np.asarray(taus, dtype=float)
    _, samples, _ = run_dopri(_master_rhs, params.tau_i, params.tau_f, rho0.vec(), p, rtol, atol, taus)
    return [DensityMatrix2.from_vec(s) for s in samples]


def evolve_master(params, rho0=None, rtol=1e-10, atol=1e-12):
    """rho(tau_f) from the master equation in the Schroedinger picture."""
    rho0 = _rho0(rho0)
    p = np.array([math.sqrt(params.kappa), params.dephasing])
    y, _, _ = run_dopri(_master_rhs, params.tau_i, params.tau_f, rho0.vec(), p, rtol, atol)
    # the generator keeps the trace and Hermiticity; clean the round-off
    m = y.reshape(2, 2)
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix2(m)


# -- analytic propagator -------------------------------------------------------


@njit(cache=True, nogil=True)
def _fg(kappa, ai, bi, a, b):
    """f, g from scaled pair values at tau_i (ai, bi) and tau (a, b)."""
    f = ai * a.conjugate() + kappa * bi.conjugate() * b
    g = (0.7071067811865476 + 0.7071067811865476j) * math.sqrt(kappa) * (ai * b.conjugate() - bi.conjugate() * a)
    return f, g


def lz_propagator(kappa, tau, tau_i=-200.0):
    """Analytic propagator from tau_i to tau (scalar tau) as a Propagator.

    f = e^{-pi k/2}[D_{ik}(e^{-i pi/4} tau_i) D_{-ik}(e^{i pi/4} tau)
                    + k D_{-ik-1}(e^{i pi/4} tau_i) D_{ik-1}(e^{-i pi/4} tau)]
    g = e^{-pi k/2} e^{i pi/4} sqrt(k)[D_{ik}(e^{-i pi/4} tau_i) D_{-ik-1}(e^{i pi/4} tau)
                    - D_{-ik-1}(e^{i pi/4} tau_i) D_{ik}(e^{-i pi/4} tau)]
    """
    f, g = lz_fg(kappa, np.array([float(tau)]), tau_i)
    return Propagator(complex(f[0]), complex(g[0]), float(kappa), float(tau), float(tau_i))


def lz_fg(kappa, taus, tau_i=-200.0):
    """Vectorized f, g over an array of tau."""
    a, b = specfun.pcf_pair(kappa, taus)
    ai, bi = specfun.pcf_pair(kappa, np.array([float(tau_i)]))
    ai, bi = ai[0], bi[0]
    f = ai * np.conj(a) + kappa * np.conj(bi) * b
    g = np.exp(0.25j * np.pi) * np.sqrt(kappa) * (ai * np.conj(b) - np.conj(bi) * a)
    return f, g


# -- interaction picture -------------------------------------------------------


@njit(cache=True, nogil=True)
def _interaction_rhs(t, y, p, out):
    # p = [kappa, lambda*sqrt(kappa), A(tau_i), B(tau_i), pair table ...]
    kappa = p[0].real
    c = p[1].real
    tab = p[4:]
    a, b = specfun._pair_eval(tab, t)
    f, g = _fg(kappa, p[2], p[3], a, b)
    # sigma_z~ = U^dag sigma_z U with U = [[f, -g*], [g, f*]]
    fa = abs(f) ** 2
    ga = abs(g) ** 2
    s11 = fa - ga
    s12 = -2.0 * f.conjugate() * g.conjugate()
    s21 = s12.conjugate()
    s22 = -s11
    r11 = y[0]
    r12 = y[1]
    r21 = y[2]
    r22 = y[3]
    # d rho/dtau = c (S rho S - rho), S^2 = 1
    m11 = s11 * r11 + s12 * r21
    m12 = s11 * r12 + s12 * r22
    m21 = s21 * r11 + s22 * r21
    m22 = s21 * r12 + s22 * r22
    out[0] = c * (m11 * s11 + m12 * s21 - r11)
    out[1] = c * (m11 * s12 + m12 * s22 - r12)
    out[2] = c * (m21 * s11 + m22 * s21 - r21)
    out[3] = c * (m21 * s12 + m22 * s22 - r22)


def evolve_interaction(params, rho0=None, rtol=1e-10, atol=1e-12, return_tilde=False):
    """rho(tau_f) obtained in the interaction picture of the coherent sweep.

    Integrates d rho~/d tau = (lambda sqrt(kappa)/2)[s~, [rho~, s~]] with
    s~ = U^dag sigma_z U built from the analytic propagator, then maps back
    with U(tau_f, tau_i).
    """
    rho0 = _rho0(rho0)
    kappa = params.kappa
    tab = specfun.pair_table(kappa)
    ai, bi = specfun.pcf_pair(kappa, np.array([params.tau_i]))
    coeff = params.lam * math.sqrt(kappa)
    if coeff == 0.0:
        y = rho0.vec()
    else:
        p = np.concatenate([np.array([kappa, coeff, ai[0], bi[0]], dtype=complex), tab])
        y, _, _ = run_dopri(_interaction_rhs, params.tau_i, params.tau_f, rho0.vec(), p, rtol, atol)
    rt = y.reshape(2, 2)
    if return_tilde:
        return DensityMatrix2(rt)
    u = lz_propagator(kappa, params.tau_f, params.tau_i).matrix
    m = u @ rt @ u.conj().T
    return DensityMatrix2(0.5 * (m + m.conj().T))


# -- first order in lambda -----------------------------------------------------


def x_kappa(kappa, tau):
    """X_k(tau) = k e^{-pi k/2} D_{-ik-1}(e^{i pi/4} tau) D_{ik-1}(-e^{-i pi/4} tau)."""
    tau = np.asarray(tau, dtype=float)
    _, bp = specfun.pcf_pair(kappa, tau)
    _, bm = specfun.pcf_pair(kappa, -tau)
    return kappa * np.conj(bp) * bm


def y_kappa(kappa, tau):
    """Y_k(tau) = (k/2) e^{-pi k/2}(|D_{ik-1}(e^{-i pi/4} tau)|^2 + |D_{ik-1}(-e^{-i pi/4} tau)|^2)."""
    tau = np.asarray(tau, dtype=float)
    _, bp = specfun.pcf_pair(kappa, tau)
    _, bm = specfun.pcf_pair(kappa, -tau)
    return 0.5 * kappa * (np.abs(bp) ** 2 + np.abs(bm) ** 2)


def _prefactors(kappa):
    # 2 e^{-2 pi k}/(1 - e^{-2 pi k}) and 2 e^{-pi k}/(1 - e^{-2 pi k})
    den = -math.expm1(-2.0 * math.pi * kappa)
    return 2.0 * math.exp(-2.0 * math.pi * kappa) / den, 2.0 * math.exp(-math.pi * kappa) / den


def truncation(kappa):
    """Half-width T of the tau window used for the first-order integrals."""
    return max(200.0, 20.0 * math.sqrt(kappa))


def _x_integrals(kappa, tol=1e-10, T=None):
    """int |X|^2, int (Re X)^2, int Re X Y over the real line.

    The integrands are even in tau, so [0, T] is integrated and doubled.
    Beyond T the smooth part of |X|^2 is k(1 - e^{-2 pi k})(1 - 4k/tau^2)/tau^2
    (from the large-argument forms of the two D factors) and (Re X)^2
    averages to half of it.  Re X also carries a phase-locked piece
    -k e^{-pi k}/tau^2 (small exponential of D at -tau times the conjugate
    at +tau).  It meets Y -> (1 - e^{-2 pi k})/2 directly, and once more
    through the interference term of |D(-tau)|^2 in Y beating against the
    oscillating part of Re X, so Re X Y has the smooth tail
    -k e^{-pi k}(1 - e^{-2 pi k})/tau^2.  These tails are added analytically; the oscillatory
    remainders are O(T^-2) and go into the error bound.
    """
    if T is None:
        T = truncation(kappa)
    # panels of roughly constant phase tau^2/2
    n = int(math.ceil(T * T / 8.0))
    edges = np.sqrt(np.linspace(0.0, T * T, n + 1))

    def integrand(t):
        _, bp = specfun.pcf_pair(kappa, t)
        _, bm = specfun.pcf_pair(kappa, -t)
        x = kappa * np.conj(bp) * bm
        y = 0.5 * kappa * (np.abs(bp) ** 2 + np.abs(bm) ** 2)
        return np.stack([np.abs(x) ** 2, x.real ** 2, x.real * y])

    out, err = quad_adaptive(integrand, 0.0, T, tol, breakpoints=edges)
    amp = kappa * -math.expm1(-2.0 * math.pi * kappa)
    t1 = 2.0 * amp * (1.0 / T - 4.0 * kappa / (3.0 * T ** 3))
    t3 = -2.0 * kappa * math.exp(-math.pi * kappa) * -math.expm1(-2.0 * math.pi * kappa) / T
    tails = np.array([t1, 0.5 * t1, t3])
    # next smooth order ~ k^3/T^5 and the oscillatory remainders ~ (1 + k)/T^2
    tail_err = 2.0 * (1.0 + kappa) / T ** 2 + amp * kappa ** 2 / T ** 5
    return 2.0 * out + tails, 2.0 * err + tail_err


def prob_first_order(params, tol=1e-10, return_error=False):
    """Transition probability to first order in lambda for tau_i -> -inf, tau_f -> inf.

    P = e^{-2 pi k} + 4 lambda sqrt(k) int [|X|^2 + c2 (Re X)^2 + c3 Re X Y] d tau.
    For kappa < 1e-6 the prefactors are singular and 1 is returned.
    """
    kappa, lam = params.kappa, params.lam
    if kappa < KAPPA_EDGE:
        return (1.0, 0.0) if return_error else 1.0
    p0 = math.exp(-2.0 * math.pi * kappa)
    if lam == 0.0:
        return (p0, 0.0) if return_error else p0
    (i1, i2, i3), e = _x_integrals(kappa, tol)
    c2, c3 = _prefactors(kappa)
    w = 4.0 * lam * math.sqrt(kappa)
    p = p0 + w * (i1 + c2 * i2 + c3 * i3)
    err = w * (1.0 + c2 + c3) * e
    return (p, err) if return_error else p


def dominance_terms(kappa, tol=1e-10):
    """(Z_k, b1, b2, b3) of the small-kappa / large-kappa dominance analysis.

    Z_k = 4 int [|X|^2 + c2 (Re X)^2 + c3 Re X Y], so that the first-order
    probability reads e^{-2 pi k} + lambda sqrt(k) Z_k, and
    b1 = 4 sqrt(k) int |X|^2, b2 = 4 sqrt(k) c2 int (Re X)^2,
    b3 = 4 sqrt(k) c3 int Re X Y, hence b1 + b2 + b3 = sqrt(k) Z_k.
    """
    if kappa <= 0:
        raise DomainError("kappa must be > 0")
    (i1, i2, i3), _ = _x_integrals(kappa, tol)
    c2, c3 = _prefactors(kappa)
    sk = math.sqrt(kappa)
    b1 = 4.0 * sk * i1
    b2 = 4.0 * sk * c2 * i2
    b3 = 4.0 * sk * c3 * i3
    z = 4.0 * (i1 + c2 * i2 + c3 * i3)
    return z, b1, b2, b3


def dominance_crossover(lam_sqrt_kappa, lo=0.05, hi=3.0, tol=1e-4):
    """kappa at which lambda sqrt(k) Z_k equals e^{-2 pi k} for fixed lambda sqrt(k)."""
    def h(k):
        return math.log(lam_sqrt_kappa * dominance_terms(k, tol=1e-8)[0]) + 2.0 * math.pi * k

    return brentq(h, lo, hi, xtol=tol)


# -- closed forms --------------------------------------------------------------


def p_closed(kind, params):
    """Closed-form transition probabilities.

    non_ad: e^{-2 pi k}; ad: (1 - e^{-4 pi lambda k})/2; combined: their sum;
    kayanuma: (1 - e^{-4 pi k})/2.
    """
    k, lam = params.kappa, params.lam
    non_ad = math.exp(-2.0 * math.pi * k)
    ad = -0.5 * math.expm1(-4.0 * math.pi * lam * k)
    if kind == "non_ad":
        return non_ad
    if kind == "ad":
        return ad
    if kind == "combined":
        return non_ad + ad
    if kind == "kayanuma":
        return -0.5 * math.expm1(-4.0 * math.pi * k)
    raise ValueError(f"unknown kind {kind!r}")


# -- Monte-Carlo trajectories --------------------------------------------------


@njit(cache=True, nogil=True)
def _trajectory(sk, tau_i, dt, nsteps, gam):
    """|<up|psi(tau_f)>|^2 under piecewise-constant noise, exact 2x2 steps.

    Each step uses H = (tau_mid/2 + gamma_k) sigma_z + sqrt(k) sigma_x.
    """
    u = 1.0 + 0j
    d = 0j
    for k in range(nsteps):
        tm = tau_i + (k + 0.5) * dt
        hz = 0.5 * tm + gam[k]
        hx = sk
        w = math.sqrt(hz * hz + hx * hx)
        c = math.cos(w * dt)
        s = math.sin(w * dt) / w if w > 0 else dt
        # exp(-i dt (hz sz + hx sx)) = c - i s (hz sz + hx sx)
        nu = (c - 1j * s * hz) * u - 1j * s * hx * d
        nd = -1j * s * hx * u + (c + 1j * s * hz) * d
        u = nu
        d = nd
    return abs(u) ** 2


def noise_trajectory_oracle(params, n_traj=2000, dt=None, seed=0):
    """Monte-Carlo average of |<up|psi(tau_f)>|^2 over noise realizations.

    gamma is constant on each step with variance lambda sqrt(k)/dt; the
    stream of trajectory i is seeded by (seed, i), so the result does not
    depend on how trajectories are scheduled.  Returns (mean, stderr).
    """
    kappa, lam = params.kappa, params.lam
    if dt is None:
        dt = 1e-3 / math.sqrt(max(kappa, 1e-12))
    span = params.tau_f - params.tau_i
    nsteps = int(math.ceil(span / dt))
    dt = span / nsteps
    var = lam * math.sqrt(kappa) / dt
    if lam * math.sqrt(kappa) * dt > 0.01:
        raise DomainError("dt too large: need lambda sqrt(kappa) dt <= 0.01")
    sk = math.sqrt(kappa)
    sd = math.sqrt(var)
    vals = np.empty(n_traj)
    for i in range(n_traj):
        rng = np.random.default_rng([seed, i])
        gam = sd * rng.standard_normal(nsteps) if lam > 0 else np.zeros(nsteps)
        vals[i] = _trajectory(sk, params.tau_i, dt, nsteps, gam)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_traj))
