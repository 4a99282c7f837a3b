import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from antikz import optimize as opt
from antikz.errors import DomainError
from antikz.ising import defect_closed


def test_kappa_opt_first():
    assert opt.kappa_opt_first(1e-3) == pytest.approx(9.25, abs=0.01)
    assert opt.kappa_opt_first(5e-3) == pytest.approx(3.16, abs=0.01)
    with pytest.raises(DomainError):
        opt.kappa_opt_first(0.0)


@given(st.floats(1e-6, 1e-1))
def test_kappa_opt_scaling(lam):
    assert opt.kappa_opt_first(4 * lam) / opt.kappa_opt_first(lam) == pytest.approx(4 ** (-2 / 3), rel=1e-12)


@given(st.floats(1e-6, 1e-1), st.floats(1e-6, 1e-1))
def test_v_first_slope(a, b):
    if abs(math.log(a / b)) < 1e-3:
        return
    s = math.log(opt.v_opt_closed("first", a) / opt.v_opt_closed("first", b)) / math.log(a / b)
    assert s == pytest.approx(2 / 3, abs=1e-9)


def test_v_closed_values():
    assert opt.v_opt_closed("first", 1e-3) == pytest.approx(0.10808, abs=5e-5)
    assert opt.v_opt_closed("first", 1e-3) == pytest.approx(0.1081027076025, rel=1e-12)
    ratio = opt.v_opt_closed("second", 1e-3) / opt.v_opt_closed("first", 1e-3)
    assert ratio == pytest.approx(1 - opt.zeta(1e-3), rel=1e-12)
    assert ratio == pytest.approx(0.939, abs=1e-3)
    with pytest.raises(DomainError):
        opt.v_opt_closed("second", 10.0)
    with pytest.raises(ValueError):
        opt.v_opt_closed("third", 1e-3)


def test_deviation_metrics():
    z, x = opt.deviation_metrics(1e-3)
    assert z == pytest.approx(0.0609, abs=1e-3) and x == pytest.approx(0.0152, abs=5e-4)
    z, x = opt.deviation_metrics(5e-3)
    assert z == pytest.approx(0.104, abs=2e-3) and x == pytest.approx(0.0260, abs=5e-4)


@given(st.floats(1e-8, 1.0))
def test_zeta_xi_ratio(lam):
    assert opt.zeta(lam) / opt.xi(lam) == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("lam", [1e-4, 1e-3, 5e-3])
def test_stationarity(lam):
    k = opt.kappa_opt_first(lam)
    h = 1e-4 * k
    n = defect_closed("first_order", k, lam)
    d = (defect_closed("first_order", k + h, lam) - defect_closed("first_order", k - h, lam)) / (2 * h)
    assert abs(d) <= 1e-8 * n


@given(st.floats(1e-5, 5e-3))
def test_second_order_ordering(lam):
    assert opt.v_opt_closed("second", lam) < opt.v_opt_closed("first", lam)
    k1, k2 = opt.kappa_opt_first(lam), opt.kappa_opt_second(lam)
    assert defect_closed("second_order", k2, lam) < defect_closed("first_order", k1, lam)


def test_second_order_exact():
    lam = 1e-3
    k = opt.kappa_opt_second(lam, exact=True)
    h = 1e-4 * k
    d = (defect_closed("second_order", k + h, lam) - defect_closed("second_order", k - h, lam)) / (2 * h)
    assert abs(d) < 1e-10
    # the perturbative shift kappa_1 (1 + eps) approximates the exact stationary point
    assert opt.kappa_opt_second(lam) == pytest.approx(k, rel=3 * opt.epsilon(lam) ** 2)
    # the epsilon shift moves the minimum to larger kappa (slower sweeps)
    assert k > opt.kappa_opt_first(lam)


def test_v_opt_numeric_inf_order():
    r = opt.v_opt_numeric(1e-3)
    assert r.kappa_opt == pytest.approx(9.868497, rel=1e-6)
    assert r.v_opt_over_J2 == pytest.approx(1 / r.kappa_opt)
    assert 0 < r.n_min < 1
    for f in (0.5, 1.5):
        assert defect_closed("inf_order", f * r.kappa_opt, 1e-3) > r.n_min
    r5 = opt.v_opt_numeric(5e-3)
    assert r5.kappa_opt == pytest.approx(3.552872, rel=1e-6)
    assert r5.kappa_opt == pytest.approx(opt.kappa_opt_first(5e-3) * (1 + opt.epsilon(5e-3)), rel=0.05)


@pytest.mark.xfail(strict=True, reason="inf_order optimum is kappa = 9.868 at lambda = 1e-3, 6.7% above 9.25")
def test_v_opt_numeric_first_order_target():
    assert opt.v_opt_numeric(1e-3).kappa_opt == pytest.approx(9.25, rel=0.05)


@pytest.mark.xfail(strict=True, reason="v_inf lies 0.1-0.6% below the closed second-order rate; "
                                       "it stays above the exact second-order minimizer")
@pytest.mark.parametrize("lam", [5e-4, 1e-3, 5e-3])
def test_v_opt_numeric_between_closed(lam):
    v = opt.v_opt_numeric(lam).v_opt_over_J2
    assert opt.v_opt_closed("second", lam) <= v <= 1.05 * opt.v_opt_closed("first", lam)


@pytest.mark.parametrize("lam", [5e-4, 1e-3, 5e-3])
def test_v_opt_numeric_between_exact(lam):
    v = opt.v_opt_numeric(lam).v_opt_over_J2
    assert 1 / opt.kappa_opt_second(lam, exact=True) <= v <= opt.v_opt_closed("first", lam)


def test_master_numeric_cache():
    cache = {}
    r = opt.v_opt_numeric(5e-3, "master_numeric", n_spins=20, window=(-60.0, 60.0), cache=cache, rtol=1e-6)
    assert 0 < r.n_evals <= 60
    # the short chain is a different objective; only check it is a sampled minimum
    assert all(v >= r.n_min for v in cache.values())
    again = opt.v_opt_numeric(5e-3, "master_numeric", n_spins=20, window=(-60.0, 60.0), cache=cache, rtol=1e-6)
    assert again.n_evals == 0 and again.kappa_opt == r.kappa_opt
    with pytest.raises(ValueError):
        opt.v_opt_numeric(1e-3, "bogus")
