"""Transverse-field Ising chain swept through its critical point with noise.

After the Jordan-Wigner map each momentum pair (q, -q), q = (2n-1)pi/N, is a
two-level system swept like the Landau-Zener problem with gap parameter
kappa_q = kappa sin^2 q, while the dephasing rate lambda sqrt(kappa) is the
same for every mode (equivalently lambda_eff = lambda/|sin q| on kappa_q).
The defect density is n = (2/N) sum_{q>0} P_q.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import specfun
from .errors import DomainError
from .lz import LZParams, evolve_master
from .numerics import quad_adaptive, run_dopri

__all__ = [
    "IsingParams",
    "ModeSpectrum",
    "mode_grid",
    "mode_params",
    "mode_transition",
    "defect_density",
    "defect_closed",
    "full_chain_oracle",
    "ChainResult",
]

MAX_CHAIN = 6


@dataclass(frozen=True)
class IsingParams:
    kappa: float
    lam: float = 0.0
    n_spins: int = 100
    tau_i: float = -200.0
    tau_f: float = 200.0

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise DomainError("kappa must be finite and > 0")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise DomainError("lambda must be finite and >= 0")
        if self.n_spins < 2 or self.n_spins % 2:
            raise DomainError("n_spins must be even and >= 2")
        if not self.tau_i < self.tau_f:
            raise DomainError("need tau_i < tau_f")

    @classmethod
    def from_physical(cls, J, v, W, **kw):
        if J <= 0 or v <= 0 or W < 0:
            raise DomainError("need J > 0, v > 0, W >= 0")
        return cls(J * J / v, W * W / J, **kw)


@dataclass(frozen=True)
class ModeSpectrum:
    q: np.ndarray
    probabilities: np.ndarray
    defect_density: float


def mode_grid(n_spins):
    """Positive momenta (2n-1)pi/N, n = 1..N/2."""
    n_spins = int(n_spins)
    if n_spins < 2 or n_spins % 2:
        raise DomainError("n_spins must be even and >= 2")
    return (2.0 * np.arange(1, n_spins // 2 + 1) - 1.0) * math.pi / n_spins


def mode_params(params, q, shift=False):
    """Landau-Zener parameters of mode q.

    ``shift=True`` keeps the finite offset tau -> tau + 2 sqrt(kappa) cos q of
    the mode Hamiltonian, which only matters on a finite window.
    """
    if not 0.0 < q < math.pi:
        raise DomainError("q must lie in (0, pi)")
    s = math.sin(q)
    off = 2.0 * math.sqrt(params.kappa) * math.cos(q) if shift else 0.0
    return LZParams(params.kappa * s * s, params.lam / s, params.tau_i + off, params.tau_f + off)


def _l_non_ad(kappa, q):
    return np.exp(-2.0 * math.pi * kappa * np.sin(q) ** 2)


def _l_ad(kappa, lam, q):
    return -0.5 * np.expm1(-4.0 * math.pi * lam * kappa * np.abs(np.sin(q)))


def mode_transition(params, q, method="numeric", shift=False, rtol=1e-10, atol=1e-12):
    """Final |up>_q population of mode q."""
    if not 0.0 < q < math.pi:
        raise DomainError("q must lie in (0, pi)")
    if method == "closed":
        return float(_l_non_ad(params.kappa, q) + _l_ad(params.kappa, params.lam, q))
    if method == "numeric":
        return evolve_master(mode_params(params, q, shift), rtol=rtol, atol=atol).p_up
    raise ValueError(f"unknown method {method!r}")


def defect_density(params, method="numeric_sum", threads=1, rtol=1e-8, atol=1e-10, tol=1e-12):
    """Defect density from the discrete mode sum or the continuum integral.

    ``numeric_sum`` integrates each mode's master equation.  Modes q and
    pi - q share kappa_q, so only one of each pair is integrated.  Results are
    reduced in q order and do not depend on ``threads``.
    """
    if method == "numeric_sum":
        qs = mode_grid(params.n_spins)
        m = len(qs)
        half = (m + 1) // 2

        def run(q):
            return mode_transition(params, q, "numeric", rtol=rtol, atol=atol)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                first = list(ex.map(run, qs[:half]))
        else:
            first = [run(q) for q in qs[:half]]
        probs = np.array(first + first[: m - half][::-1])
        return ModeSpectrum(qs, probs, float(2.0 * math.fsum(probs) / params.n_spins))
    if method == "thermo_integral":
        k, lam = params.kappa, params.lam

        def f(q):
            return _l_non_ad(k, q) + _l_ad(k, lam, q)

        val, _ = quad_adaptive(f, 0.0, 0.5 * math.pi, tol=tol, n_initial=8)
        return ModeSpectrum(np.array([]), np.array([]), 2.0 * val / math.pi)
    raise ValueError(f"unknown method {method!r}")


def defect_closed(kind, kappa, lam=0.0):
    """Closed-form defect densities.

    kzm: e^{-pi k} I0(pi k); kzm_asymptotic: 1/(pi sqrt(2k));
    noise: (1 - (I0 - L0)(4 pi lambda k))/2; inf_order: kzm_asymptotic + noise;
    first_order: 1/(pi sqrt(2k)) + 4 lambda k; second_order: first_order -
    2 pi^2 lambda^2 k^2; kayanuma: 1/2 - 1/(4 pi sqrt(k)); reciprocal:
    kzm_asymptotic + 1/2 - 1/(4 pi^2 lambda k).
    """
    if not (kappa > 0 and math.isfinite(kappa)):
        raise DomainError("kappa must be finite and > 0")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    kzm_asym = 1.0 / (math.pi * math.sqrt(2.0 * kappa))
    lk = lam * kappa
    if kind == "kzm":
        return float(specfun.bessel_i0_scaled(math.pi * kappa))
    if kind == "kzm_asymptotic":
        return kzm_asym
    if kind == "noise":
        return 0.5 * (1.0 - float(specfun.i0_minus_l0(4.0 * math.pi * lk)))
    if kind == "inf_order":
        return kzm_asym + defect_closed("noise", kappa, lam)
    if kind == "first_order":
        return kzm_asym + 4.0 * lk
    if kind == "second_order":
        return kzm_asym + 4.0 * lk - 2.0 * math.pi ** 2 * lk * lk
    if kind == "kayanuma":
        return 0.5 - 1.0 / (4.0 * math.pi * math.sqrt(kappa))
    if kind == "reciprocal":
        if lk == 0:
            raise DomainError("reciprocal form needs lambda kappa > 0")
        return kzm_asym + 0.5 - 1.0 / (4.0 * math.pi ** 2 * lk)
    raise ValueError(f"unknown kind {kind!r}")


# -- full chain ----------------------------------------------------------------


@dataclass(frozen=True)
class ChainResult:
    """Full-chain defect density and mode occupations <c_q^dag c_q>, q > 0."""

    defect_density: float
    q: np.ndarray
    occupations: np.ndarray
    rho: np.ndarray


def _chain_basis(n):
    """Even-parity sector: bit j set means spin j points down (a fermion)."""
    states = np.array([s for s in range(1 << n) if bin(s).count("1") % 2 == 0], dtype=np.int64)
    index = -np.ones(1 << n, dtype=np.int64)
    index[states] = np.arange(len(states))
    nb = np.empty((len(states), n), dtype=np.int64)
    for k, s in enumerate(states):
        for j in range(n):
            nb[k, j] = index[s ^ (1 << j) ^ (1 << ((j + 1) % n))]
    down = np.array([bin(s).count("1") for s in states], dtype=np.float64)
    return states, nb, down


@njit(cache=True, nogil=True)
def _chain_rhs(t, y, p, out):
    # p = [sqrt(kappa), gamma, N, dim, sz_k (dim), nb (dim*N)]
    sk = p[0].real
    gam = p[1].real
    n = int(p[2].real)
    dim = int(p[3].real)
    for k in range(dim):
        sz_k = p[4 + k].real
        for l in range(dim):
            sz_l = p[4 + l].real
            i = k * dim + l
            hop = 0j
            for j in range(n):
                hop += y[int(p[4 + dim + k * n + j].real) * dim + l]
                hop -= y[k * dim + int(p[4 + dim + l * n + j].real)]
            da = 0.5 * (sz_k - sz_l)
            out[i] = -1j * (-0.25 * t * (sz_k - sz_l) * y[i] - 0.5 * sk * hop) - gam * da * da * y[i]


def _pair_occupations(rho, states, n, qs):
    """<c_q^dag c_q> from <c_j^dag c_l> with Jordan-Wigner strings."""
    index = {int(s): k for k, s in enumerate(states)}
    corr = np.zeros((n, n), dtype=complex)
    for j in range(n):
        corr[j, j] = sum(rho[k, k] for k, s in enumerate(states) if s >> j & 1)
    for j in range(n):
        for l in range(j + 1, n):
            # c_j^dag c_l = -sigma^-_j prod_{j<m<l}(-sigma^z_m) sigma^+_l
            mid = ((1 << l) - 1) ^ ((1 << (j + 1)) - 1)
            acc = 0j
            for k, s in enumerate(states):
                if s >> l & 1 and not s >> j & 1:
                    t = int(s) ^ (1 << l) ^ (1 << j)
                    ups = l - j - 1 - bin(int(s) & mid).count("1")
                    acc -= (-1.0) ** ups * rho[k, index[t]]
            corr[j, l] = acc
            corr[l, j] = np.conj(acc)
    js = np.arange(n)
    out = []
    for q in qs:
        ph = np.exp(1j * q * js)
        out.append(float((ph.conj() @ corr @ ph).real) / n)
    return np.array(out)


def full_chain_oracle(n_spins, kappa, lam=0.0, window=(-50.0, 50.0), rtol=1e-10, atol=1e-12):
    """Averaged master equation of the whole chain (N <= 6), all spins down at tau_i.

    H = -(1/2) sum_j [(tau/2) sigma^z_j + sqrt(kappa) sigma^x_j sigma^x_{j+1}]
    with periodic boundaries and dissipator (lambda sqrt(kappa)/2)[[A, rho], A],
    A = (1/2) sum_j sigma^z_j.
    """
    n = int(n_spins)
    if n > MAX_CHAIN:
        raise DomainError(f"full chain limited to N <= {MAX_CHAIN}")
    if n < 2 or n % 2:
        raise DomainError("n_spins must be even and >= 2")
    if not (kappa > 0 and lam >= 0):
        raise DomainError("need kappa > 0 and lambda >= 0")
    states, nb, down = _chain_basis(n)
    dim = len(states)
    sz = n - 2.0 * down
    p = np.concatenate([[math.sqrt(kappa), 0.5 * lam * math.sqrt(kappa), n, dim], sz, nb.ravel()]).astype(complex)
    rho0 = np.zeros((dim, dim), dtype=complex)
    start = int(np.argmax(down))
    rho0[start, start] = 1.0
    y, _, _ = run_dopri(_chain_rhs, window[0], window[1], rho0.ravel(), p, rtol, atol)
    rho = y.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    density = float(np.real(np.diag(rho)) @ down) / n
    qs = mode_grid(n)
    return ChainResult(density, qs, _pair_occupations(rho, states, n, qs), rho)
