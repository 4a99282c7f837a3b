import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antikz import ising
from antikz.errors import DomainError
from antikz.ising import IsingParams
from antikz.lz import LZParams, evolve_master, p_closed


def test_params():
    with pytest.raises(DomainError):
        IsingParams(1.0, n_spins=5)
    with pytest.raises(DomainError):
        IsingParams(0.0)
    p = IsingParams.from_physical(2.0, 0.5, 0.1)
    assert p.kappa == 8.0 and p.lam == pytest.approx(0.005)


def test_mode_grid():
    assert np.allclose(ising.mode_grid(2), [math.pi / 2])
    assert np.allclose(ising.mode_grid(4), [math.pi / 4, 3 * math.pi / 4])
    q = ising.mode_grid(100)
    assert len(q) == 50 and q[0] == pytest.approx(math.pi / 100) and q[-1] == pytest.approx(0.99 * math.pi)
    assert np.all(np.diff(q) > 0)
    with pytest.raises(DomainError):
        ising.mode_grid(7)


def test_mode_params_mapping():
    p = IsingParams(10.0, 1e-3)
    mp = ising.mode_params(p, math.pi / 6)
    assert mp.kappa == pytest.approx(2.5)
    # the dissipator rate lambda sqrt(kappa) is common to all modes
    assert mp.dephasing == pytest.approx(LZParams(10.0, 1e-3).dephasing)
    with pytest.raises(DomainError):
        ising.mode_params(p, 0.0)


def test_mode_transition_closed():
    p = IsingParams(2.0, 1e-3)
    v = ising.mode_transition(p, math.pi / 2, "closed")
    assert v == pytest.approx(p_closed("combined", LZParams(2.0, 1e-3)), abs=1e-15)
    assert ising.mode_transition(p, 1e-9, "closed") == pytest.approx(1.0, abs=1e-9)


def test_mode_transition_numeric_vs_closed():
    p = IsingParams(10.0, 1e-3)
    a = ising.mode_transition(p, math.pi / 2, "numeric")
    b = ising.mode_transition(p, math.pi / 2, "closed")
    assert a == pytest.approx(b, rel=0.05)
    assert a == pytest.approx(evolve_master(LZParams(10.0, 1e-3)).p_up, abs=1e-9)


@given(st.floats(0.01, 3.1), st.floats(0.1, 100.0), st.floats(0.0, 0.05))
def test_closed_integrand_symmetry(q, kappa, lam):
    p = IsingParams(kappa, lam)
    a = ising.mode_transition(p, q, "closed")
    b = ising.mode_transition(p, math.pi - q, "closed")
    assert abs(a - b) < 1e-12
    # the two closed pieces are added, so the sum is bounded by 3/2, not 1
    assert 0.0 <= a <= 1.5


@pytest.mark.parametrize("q", [0.3, 1.1])
def test_numeric_mode_symmetry(q):
    p = IsingParams(5.0, 2e-3, tau_i=-100.0, tau_f=100.0)
    a = ising.mode_transition(p, q)
    b = ising.mode_transition(p, math.pi - q)
    assert abs(a - b) < 1e-6


def test_thermo_integral():
    n = ising.defect_density(IsingParams(10.0), "thermo_integral").defect_density
    # exact Bessel form; its kappa >> 1 asymptote is 1/(pi sqrt 20) = 0.07118
    assert n == pytest.approx(0.071464703260244153365, abs=1e-11)
    assert n == pytest.approx(1 / (math.pi * math.sqrt(20)), rel=5e-3)
    assert ising.defect_closed("kzm", 10.0) == pytest.approx(n, abs=1e-11)
    # strong noise heats every mode with sin q >> 1/(lambda kappa) to 1/2
    big = ising.defect_density(IsingParams(50.0, 10.0), "thermo_integral").defect_density
    assert big == pytest.approx(0.5 + ising.defect_closed("kzm", 50.0), abs=1e-3)
    hot = ising.defect_density(IsingParams(1e4, 1.0), "thermo_integral").defect_density
    assert hot == pytest.approx(0.5, abs=3e-3)


def test_numeric_sum_small():
    p = IsingParams(10.0, 1e-3)
    spec = ising.defect_density(p, rtol=1e-8)
    assert len(spec.probabilities) == 50
    assert spec.defect_density == pytest.approx(2 * math.fsum(spec.probabilities) / 100, abs=1e-15)
    assert np.all(spec.probabilities >= 0) and np.all(spec.probabilities <= 1 + 1e-9)
    inf = ising.defect_closed("inf_order", 10.0, 1e-3)
    assert abs(spec.defect_density - inf) / spec.defect_density < 0.05
    assert spec.defect_density == pytest.approx(0.1085725, abs=2e-6)
    big = ising.defect_density(IsingParams(10.0, 1e-3, n_spins=200), rtol=1e-8).defect_density
    assert abs(big - spec.defect_density) <= 2e-3
    threaded = ising.defect_density(p, threads=4, rtol=1e-8)
    assert threaded.defect_density == spec.defect_density


def test_closed_examples():
    lam = 1e-3
    k = 1 / (2 ** 7 * math.pi ** 2 * lam ** 2) ** (1 / 3)
    assert ising.defect_closed("first_order", k, lam) == pytest.approx(12 * lam * k, rel=1e-12)
    assert ising.defect_closed("first_order", k, lam) == pytest.approx(0.1110, abs=1e-4)
    assert ising.defect_closed("noise", 5.0, 0.0) == 0.0
    assert ising.defect_closed("kayanuma", 4.0) == pytest.approx(0.5 - 1 / (8 * math.pi))
    assert ising.defect_closed("kayanuma", 4.0) == pytest.approx(0.46021, abs=1e-5)
    assert ising.defect_closed("second_order", 4.0, 1e-3) < ising.defect_closed("first_order", 4.0, 1e-3)
    with pytest.raises(DomainError):
        ising.defect_closed("kzm", 0.0)
    with pytest.raises(DomainError):
        ising.defect_closed("reciprocal", 1.0, 0.0)
    with pytest.raises(ValueError):
        ising.defect_closed("bogus", 1.0)


@pytest.mark.parametrize("kappa", [5.0, 20.0, 50.0])
def test_taylor_consistency(kappa):
    f = lambda lam: ising.defect_closed("inf_order", kappa, lam)
    h = 1e-6
    assert (f(2 * h) - f(0.0)) / (2 * h) == pytest.approx(4 * kappa, rel=1e-3)
    second = (f(2 * h) - 2 * f(h) + f(0.0)) / h ** 2
    assert second == pytest.approx(-4 * math.pi ** 2 * kappa ** 2, rel=1e-2)


@given(st.floats(50.0, 1e5), st.floats(1e-3, 1.0))
def test_reciprocal_asymptote(x, lam):
    kappa = x / (4 * math.pi * lam)
    lk = lam * kappa
    r = (ising.defect_closed("inf_order", kappa, lam) - 0.5 - ising.defect_closed("kzm_asymptotic", kappa)
         + 1 / (4 * math.pi ** 2 * lk))
    assert abs(r) <= 1.0 / lk ** 2


def test_full_chain_noiseless():
    res = ising.full_chain_oracle(4, 1.0, 0.0)
    p = IsingParams(1.0, 0.0, 4, -50.0, 50.0)
    modes = [ising.mode_transition(p, q, shift=True) for q in ising.mode_grid(4)]
    assert res.defect_density == pytest.approx(2 * sum(modes) / 4, abs=1e-7)
    assert np.allclose(res.occupations, modes, atol=1e-7)
    assert abs(np.trace(res.rho) - 1.0) < 1e-9


def test_full_chain_noisy_marginals():
    res = ising.full_chain_oracle(4, 1.0, 1e-2)
    p = IsingParams(1.0, 1e-2, 4, -50.0, 50.0)
    modes = [ising.mode_transition(p, q, shift=True) for q in ising.mode_grid(4)]
    assert np.allclose(res.occupations, modes, atol=1e-6)
    assert 0.0 <= res.defect_density <= 1.0


def test_full_chain_initial_state():
    # all spins start in the tau -> -inf ground state; in the final-time basis every spin is a defect
    res = ising.full_chain_oracle(2, 1.0, 0.0, window=(-50.0, -49.999))
    assert res.defect_density == pytest.approx(1.0, abs=1e-3)


def test_full_chain_cap():
    with pytest.raises(DomainError):
        ising.full_chain_oracle(8, 1.0)
    with pytest.raises(DomainError):
        ising.full_chain_oracle(3, 1.0)
