import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ibm_lifetime.exit_laws import interval_survival
from ibm_lifetime.predictors import predict_bounded
from ibm_lifetime.quadrature import Estimate
from ibm_lifetime.subordination import (
    TailLaw,
    btbm_survival_density,
    btbm_survival_tail,
    factor_two_holds,
    ibm_survival,
    log_scaled,
    scaled_for,
    scaled_ratio,
    tail_from_config,
    tail_prediction,
)


def sym_survival(u, t):
    return interval_survival(0.5, t / (4 * u * u)).value


def test_time_zero_is_certain(unit_interval):
    assert ibm_survival(unit_interval, 0.5, 0.0).log_value == 0.0
    assert btbm_survival_density(unit_interval, 0.5, 0.0).log_value == 0.0
    assert btbm_survival_tail(TailLaw.polynomial(2.0), 0.0).log_value == 0.0


@pytest.mark.parametrize("t", [-1.0, math.inf, math.nan])
def test_bad_times_rejected(unit_interval, t):
    with pytest.raises(ValueError):
        ibm_survival(unit_interval, 0.5, t)
    with pytest.raises(ValueError):
        btbm_survival_density(unit_interval, 0.5, t)


def test_reference_values(unit_interval):
    assert ibm_survival(unit_interval, 0.5, 0.1).value == pytest.approx(0.16221, abs=5e-5)
    assert btbm_survival_density(unit_interval, 0.5, 0.1).value == pytest.approx(0.23049, abs=5e-5)


def test_monotone_in_time(unit_interval):
    ts = [0.01, 0.1, 1.0, 10.0]
    ibm = [ibm_survival(unit_interval, 0.5, t).log_value for t in ts]
    btbm = [btbm_survival_density(unit_interval, 0.5, t).log_value for t in ts]
    assert all(b < a for a, b in zip(ibm, ibm[1:]))
    assert all(b < a for a, b in zip(btbm, btbm[1:]))
    assert all(v <= 0 for v in ibm + btbm)


@pytest.mark.parametrize("t", [0.1, 3.0])
def test_symmetric_form_agrees(unit_interval, t):
    full = ibm_survival(unit_interval, 0.5, t)
    half = ibm_survival(unit_interval, 0.5, t, symmetric=True)
    assert half.log_value == pytest.approx(full.log_value, abs=1e-9)


@pytest.mark.parametrize("t", [0.1, 30.0])
def test_wider_cutoffs_do_not_move_the_value(unit_interval, t):
    base = ibm_survival(unit_interval, 0.5, t)
    wide = ibm_survival(unit_interval, 0.5, t, cutoff_factor=2.0)
    assert abs(wide.log_value - base.log_value) <= base.abs_error_log + wide.abs_error_log
    b0 = btbm_survival_density(unit_interval, 0.5, t)
    b1 = btbm_survival_density(unit_interval, 0.5, t, cutoff_factor=2.0)
    assert abs(b1.log_value - b0.log_value) <= b0.abs_error_log + b1.abs_error_log


def test_asymmetric_start(unit_interval):
    """Starting off-centre lowers survival, and mirrored starts agree."""
    t = 1.0
    centre = ibm_survival(unit_interval, 0.5, t).log_value
    left = ibm_survival(unit_interval, 0.2, t).log_value
    right = ibm_survival(unit_interval, 0.8, t).log_value
    assert left < centre
    assert left == pytest.approx(right, abs=1e-8)


def test_btbm_density_route_against_scipy(unit_interval):
    from ibm_lifetime.exit_laws import bm_exit_density
    t = 2.0
    # The eigen series density is valid from u = 0.05; below it the inner survival is under 1e-80.
    val, _ = quad(lambda u: sym_survival(u, t) * bm_exit_density(unit_interval, 0.5, u), 0.05, 40.0, limit=200, epsabs=1e-15, epsrel=1e-11, points=[0.5, 1.0, 2.0])
    assert btbm_survival_density(unit_interval, 0.5, t).value == pytest.approx(val, rel=1e-7)


@pytest.mark.parametrize("t", [0.5, 5.0, 50.0])
def test_exponential_tail_matches_direct_integral(t):
    lam = 2.0
    tail = TailLaw.exponential(lam, lam)
    direct, _ = quad(lambda u: sym_survival(u, t) * lam * math.exp(-lam * u), 0, 80, limit=400,
                     points=[0.1, 0.5, 1, 2, 4, 8], epsabs=0, epsrel=1e-12)
    assert btbm_survival_tail(tail, t).value == pytest.approx(direct, rel=1e-7)


@pytest.mark.parametrize("t", [0.5, 4.0])
def test_step_tail_is_fixed_interval(t):
    assert btbm_survival_tail(TailLaw.step(1.5), t).value == pytest.approx(sym_survival(1.5, t), rel=1e-14)


@pytest.mark.parametrize("t", [1e2, 1e4, 1e6])
def test_inverse_square_tail_gives_inverse_time(t):
    """With P[tau > u] = u^-2 the survival is E[min(1, eta/t)] and E[eta_(-1,1)] = 1.

    The gap to 1/t is of order P[eta_(-1,1) > t], below 1e-50 from t = 100.
    """
    assert btbm_survival_tail(TailLaw.polynomial(2.0), t).value == pytest.approx(1 / t, rel=1e-7)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_factor_two_bound(unit_interval, t):
    ibm = ibm_survival(unit_interval, 0.5, t)
    btbm = btbm_survival_density(unit_interval, 0.5, t)
    assert factor_two_holds(ibm, btbm)


def test_factor_two_detects_violation():
    assert not factor_two_holds(Estimate(0.0, 1e-9, 1), Estimate(math.log(0.3), 1e-9, 1))


def test_scaled_ratio_round_trip(unit_interval):
    pred = predict_bounded(unit_interval, 0.5)["ibm_sharp"]
    t = 1e3
    target = 7.5
    logp = math.log(target) + 0.5 * math.log(t) + pred.rate * t ** (1 / 3)
    assert scaled_ratio(Estimate(logp, 0.0, 1), t, pred) == pytest.approx(target, rel=1e-12)
    with pytest.raises(ValueError):
        scaled_ratio(Estimate(logp, 0.0, 1), t, predict_bounded(unit_interval, 0.5)["ibm_log"])


@pytest.mark.slow
def test_bounded_interval_ratio_trend(unit_interval):
    pred = predict_bounded(unit_interval, 0.5)["ibm_sharp"]
    ratios = [scaled_ratio(ibm_survival(unit_interval, 0.5, t), t, pred) / pred.prefactor_constant
              for t in (1e2, 1e3, 1e4)]
    assert all(r > 0 for r in ratios)
    assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert ratios[2] == pytest.approx(1.0, abs=0.02)


def test_log_scaled():
    est = Estimate(-42.0, 0.0, 1)
    assert log_scaled(est, 10.0, 0.0, 0.0) == -42.0
    assert log_scaled(est, 1e3, 1 / 3, 0.0) == pytest.approx(-4.2, rel=1e-12)
    with pytest.raises(ValueError):
        log_scaled(est, 2.0, 0.0, 0.0)


def test_tail_predictions():
    assert tail_prediction(TailLaw.polynomial(3.0)).rate == -1.5
    pred = tail_prediction(TailLaw.stretched_log(1.0, 2.0))
    assert pred.rate == pytest.approx(-4.21618, abs=1e-5)
    assert pred.log_power == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        tail_prediction(TailLaw.step(1.0))


@pytest.mark.slow
def test_stretched_tail_trend():
    tail = TailLaw.stretched_log(1.0, 2.0)
    pred = tail_prediction(tail)
    values = [scaled_for(btbm_survival_tail(tail, t), t, pred) for t in (1e4, 1e6, 1e8)]
    assert all(v < 0 for v in values)
    assert abs(values[2] - pred.rate) < abs(values[1] - pred.rate) < abs(values[0] - pred.rate)


def test_algebraic_tail_converges_to_derived_constant():
    tail = TailLaw.algebraic_log(1.0, 0.5, 0.0)
    pred = tail_prediction(tail)
    values = [scaled_for(btbm_survival_tail(tail, t), t, pred) / pred.rate for t in (1e8, 1e16, 1e24)]
    assert abs(values[2] - 1) < abs(values[0] - 1)
    assert values[2] == pytest.approx(1.0, abs=0.01)


tails = st.one_of(
    st.builds(TailLaw.exponential, st.floats(0.1, 5.0), st.floats(0.1, 5.0)),
    st.builds(TailLaw.polynomial, st.floats(0.2, 5.0)),
    st.builds(TailLaw.stretched_log, st.floats(0.1, 5.0), st.floats(0.3, 4.0)),
    st.builds(TailLaw.algebraic_log, st.floats(0.1, 5.0), st.floats(0.05, 0.95), st.floats(-2.0, 2.0)),
    st.builds(TailLaw.step, st.floats(0.1, 5.0)),
)


@given(tails)
def test_tail_is_a_survival_function(tail):
    u = np.geomspace(1e-3, 1e6, 400)
    lt = tail.log_tail(u)
    assert np.all(lt <= 0)
    assert np.all(np.diff(np.exp(lt)) <= 1e-12)
    assert np.all(lt[u < tail.splice] == 0)


@given(tails)
def test_tail_config_round_trip(tail):
    assert tail_from_config({"kind": tail.kind, **tail.to_config()}) == tail


@pytest.mark.parametrize("cfg", [
    {"kind": "polynomial"},
    {"kind": "polynomial", "C": -1},
    {"kind": "weird", "C": 1},
    {"kind": "algebraic_log", "C": 1, "alpha": 1.5, "beta": 0},
    {"kind": "polynomial", "C": 1, "colour": 3},
])
def test_tail_config_rejects(cfg):
    with pytest.raises(ValueError):
        tail_from_config(cfg)
