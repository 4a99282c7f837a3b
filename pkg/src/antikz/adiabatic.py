"""Adiabatic description of the noisy Landau-Zener Liouvillian.

The generator of ``lz.liouvillian`` is diagonalised at fixed time.  With
z = tau / (2 sqrt(kappa)) and s = sqrt(z^2 + 1) the eigenvalues are, to
first order in lambda,

    chi1 = 0,  chi2 = -2 lambda sqrt(kappa) / s^2,
    chi3,4 = -sqrt(kappa) (+-2i s + (2 z^2 + 1) lambda / s^2).

chi1 carries the trace, chi2 the population imbalance and chi3,4 the
coherences.  Slow sweeps (kappa >> 1) follow the instantaneous eigenvectors
and only chi2 acts on the populations.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegeneracyError, DomainError
from .lz import DensityMatrix2
from .numerics import quad_adaptive

__all__ = [
    "LiouvilleSpectrum",
    "AdiabaticMetrics",
    "spectrum_perturbative",
    "spectrum_numeric",
    "derivative_matrix",
    "adiabatic_metrics",
    "adiabatic_state",
    "adiabatic_final_state",
    "chi2_numeric",
    "chi2_integral_check",
]

LAMBDA_MAX_PERT = 0.1
DEGENERACY_TOL = 1e-10

# traceless subspace basis: (rho11 - rho22)/sqrt2, rho12, rho21
_E = np.array([
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [-1.0, 0.0, 0.0],
]) * np.array([1.0 / math.sqrt(2.0), 1.0, 1.0])
_CHI1 = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class LiouvilleSpectrum:
    """Eigen-decomposition at one instant.

    ``right[:, a]`` is |chi_a> and ``left[a, :]`` is <chi^_a|, so that
    ``left @ right`` is the identity.
    """

    kappa: float
    lam: float
    z: float
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def tau(self):
        return 2.0 * math.sqrt(self.kappa) * self.z

    def biorthonormality_defect(self):
        return float(np.abs(self.left @ self.right - np.eye(4)).max())


@dataclass(frozen=True)
class AdiabaticMetrics:
    """l[a, b] = max_z |<chi^_a| d/dtau |chi_b>|, r[a, b] = min_z |chi_a - chi_b|."""

    kappa: float
    lam: float
    l: np.ndarray
    r: np.ndarray

    def ratio(self):
        """l / r off the diagonal (0 where l vanishes)."""
        out = np.zeros((4, 4))
        mask = self.l > 0
        out[mask] = self.l[mask] / self.r[mask]
        return out


def _check(kappa, lam):
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise DomainError("kappa must be finite and >= 0")
    if not (lam >= 0 and math.isfinite(lam)):
        raise DomainError("lambda must be finite and >= 0")


def _pert_eigenvalues(kappa, lam, z):
    sk = math.sqrt(kappa)
    s2 = z * z + 1.0
    s = math.sqrt(s2)
    damp = (2.0 * z * z + 1.0) * lam / s2
    return np.array([
        0.0,
        -sk * 2.0 * lam / s2,
        -sk * (2j * s + damp),
        -sk * (-2j * s + damp),
    ], dtype=complex)


def _pert_vectors(lam, z):
    s2 = z * z + 1.0
    s = math.sqrt(s2)
    r2 = math.sqrt(2.0)
    w = s2 * s2
    c2 = 1.0 / (r2 * s)
    d2 = 1j * lam * z * s / (r2 * w)
    v2 = [z / (r2 * s), c2 + d2, c2 - d2, -z / (r2 * s)]
    e = 1j * lam * (4 * z * z + 1) / (8 * w)
    v3 = [
        1 / (2 * s) + e,
        -0.5 * (1 + z / s) + 1j * lam * (3 * z + s) / (8 * w),
        0.5 * (1 - z / s) + 1j * lam * (3 * z - s) / (8 * w),
        -1 / (2 * s) - e,
    ]
    v4 = [
        1 / (2 * s) - e,
        0.5 * (1 - z / s) - 1j * lam * (3 * z - s) / (8 * w),
        -0.5 * (1 + z / s) - 1j * lam * (3 * z + s) / (8 * w),
        -1 / (2 * s) + e,
    ]
    return np.array([_CHI1, v2, v3, v4], dtype=complex).T


def spectrum_perturbative(kappa, lam, z):
    """First-order-in-lambda eigenvalues and eigenvectors at z."""
    _check(kappa, lam)
    if lam > LAMBDA_MAX_PERT:
        raise DomainError(f"perturbative spectrum needs lambda <= {LAMBDA_MAX_PERT}")
    R = _pert_vectors(lam, float(z))
    return LiouvilleSpectrum(kappa, lam, float(z), _pert_eigenvalues(kappa, lam, float(z)),
                             R, np.linalg.inv(R))


def _reduced(kappa, lam, z):
    """Generator restricted to the invariant traceless subspace."""
    sk = math.sqrt(kappa)
    tau = 2.0 * sk * z
    g = 2.0 * lam * sk
    a = math.sqrt(2.0) * 1j * sk
    return np.array([
        [0.0, a, -a],
        [a, -1j * tau - g, 0.0],
        [-a, 0.0, 1j * tau - g],
    ], dtype=complex)


def spectrum_numeric(kappa, lam, z):
    """Exact eigen-decomposition, branches labelled like the perturbative one.

    chi1 = 0 with right vector (1, 0, 0, 1)/sqrt2 is exact because the trace
    is conserved; the other three come from the traceless block.  Branches are
    matched to the first-order vectors by maximal overlap and each right
    vector is scaled so that its overlap with the matching first-order left
    vector is 1.
    """
    _check(kappa, lam)
    z = float(z)
    w, V = np.linalg.eig(_reduced(kappa, lam, z))
    gaps = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() < DEGENERACY_TOL:
        raise DegeneracyError(f"coinciding eigenvalues at kappa={kappa}, lambda={lam}, z={z}")
    R3 = _E @ V
    ref = np.linalg.inv(_pert_vectors(min(lam, LAMBDA_MAX_PERT), z))[1:]
    ov = ref @ R3
    weight = np.abs(ov) / np.linalg.norm(R3, axis=0)
    rows, cols = linear_sum_assignment(-weight)
    order = cols[np.argsort(rows)]
    R = np.empty((4, 4), dtype=complex)
    R[:, 0] = _CHI1
    chi = np.zeros(4, dtype=complex)
    for a, c in enumerate(order):
        R[:, a + 1] = R3[:, c] / ov[a, c]
        chi[a + 1] = w[c]
    return LiouvilleSpectrum(kappa, lam, z, chi, R, np.linalg.inv(R))


def derivative_matrix(kappa, lam, z):
    """First-order <chi^_a| d/dtau |chi_b> for the perturbative eigenvectors."""
    z = np.asarray(z, dtype=float)
    s2 = z * z + 1.0
    a = 1.0 / (math.sqrt(2.0) * s2)
    b = lam * (8 * z * z - 3) / (4 * math.sqrt(2.0) * s2 ** 2.5)
    c = lam * z / (4 * s2 ** 2.5)
    m = np.zeros(z.shape + (4, 4), dtype=complex)
    m[..., 1, 2] = -a - 1j * b
    m[..., 1, 3] = -a + 1j * b
    m[..., 2, 1] = a + 1j * b
    m[..., 3, 1] = a - 1j * b
    m[..., 2, 3] = -1j * c
    m[..., 3, 2] = 1j * c
    return m / (2.0 * math.sqrt(kappa))


def _z_grid(z_max=10.0, n=2001):
    # stationary points of |l_23|, |l_24| (z=0) and |l_34| (z=+-1/2)
    return np.unique(np.concatenate([np.linspace(-z_max, z_max, n), [0.0, -0.5, 0.5]]))


def adiabatic_metrics(kappa, lam, z_max=10.0, n=2001):
    """Extremal couplings and gaps entering the adiabatic condition."""
    _check(kappa, lam)
    if kappa <= 0:
        raise DomainError("metrics need kappa > 0")
    if lam > LAMBDA_MAX_PERT:
        raise DomainError(f"metrics need lambda <= {LAMBDA_MAX_PERT}")
    zs = _z_grid(z_max, n)
    l = np.abs(derivative_matrix(kappa, lam, zs)).max(axis=0)
    chi = np.array([_pert_eigenvalues(kappa, lam, z) for z in zs])
    r = np.abs(chi[:, :, None] - chi[:, None, :]).min(axis=0)
    return AdiabaticMetrics(kappa, lam, l, r)


def _decay_exponent(kappa, lam, z, z_i):
    return 4.0 * lam * kappa * (math.atan(z) - math.atan(z_i))


def adiabatic_state(kappa, lam, tau, tau_i=-math.inf):
    """Density matrix following chi1 and chi2 from a |up> start at tau_i."""
    _check(kappa, lam)
    if kappa <= 0:
        raise DomainError("adiabatic state needs kappa > 0")
    sk = math.sqrt(kappa)
    z = tau / (2.0 * sk)
    z_i = -math.inf if math.isinf(tau_i) else tau_i / (2.0 * sk)
    f = math.exp(-_decay_exponent(kappa, lam, z, z_i))
    s2 = z * z + 1.0
    s = math.sqrt(s2)
    coh = -0.5 * (1.0 / s + 1j * lam * z / (s2 * s)) * f
    m = np.array([
        [0.5 * (1.0 - z / s * f), coh],
        [np.conj(coh), 0.5 * (1.0 + z / s * f)],
    ])
    return DensityMatrix2(m)


def adiabatic_final_state(kappa, lam):
    """Populations (1 -+ e^{-4 pi lambda kappa})/2 after an infinite sweep."""
    _check(kappa, lam)
    if kappa < 1:
        warnings.warn("adiabatic approximation assumes kappa >> 1", RuntimeWarning, stacklevel=2)
    p = -0.5 * math.expm1(-4.0 * math.pi * lam * kappa)
    return DensityMatrix2(np.array([[p, 0.0], [0.0, 1.0 - p]], dtype=complex))


def chi2_numeric(kappa, lam, z):
    """Exact population-decay eigenvalue on an array of z (real part)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    sk = math.sqrt(kappa)
    a = math.sqrt(2.0) * 1j * sk
    g = 2.0 * lam * sk
    M = np.zeros(z.shape + (3, 3), dtype=complex)
    M[..., 0, 1] = a
    M[..., 0, 2] = -a
    M[..., 1, 0] = a
    M[..., 2, 0] = -a
    M[..., 1, 1] = -2j * sk * z - g
    M[..., 2, 2] = 2j * sk * z - g
    w = np.linalg.eigvals(M)
    idx = np.argmin(np.abs(w.imag), axis=-1)
    return np.take_along_axis(w, idx[..., None], axis=-1)[..., 0].real


def chi2_integral_check(kappa, lam, z_max=50.0, tol=1e-9):
    """Integral of Re chi2 over all tau, to be compared with -4 pi lambda kappa.

    The range |z| <= z_max is integrated numerically; beyond it the
    large-z expansion chi2 = -sqrt(kappa)(2 lambda/z^2 - 2(lambda + lambda^3)/z^4)
    is integrated in closed form.  dtau = 2 sqrt(kappa) dz.
    """
    _check(kappa, lam)
    if lam == 0 or kappa == 0:
        return 0.0
    sk = math.sqrt(kappa)
    scale = 2.0 * lam * sk
    inner, _ = quad_adaptive(lambda z: chi2_numeric(kappa, lam, z) / scale, -z_max, z_max,
                             tol=tol, breakpoints=np.linspace(-z_max, z_max, 41))
    tail = -2.0 * (1.0 / z_max - (1.0 + lam * lam) / (3.0 * z_max ** 3))
    return 2.0 * sk * scale * (inner + tail)

