import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ibm_lifetime.tauberian import (
    LaplaceLaw,
    SmallBallLaw,
    debruijn_forward,
    interval_exit_small_ball,
    log_interval_exit_transform,
    power_law_log_transform,
    power_law_transform_table,
    stretched_small_ball_constant,
)


def test_interval_exit_maps_to_sqrt_two():
    law = debruijn_forward(interval_exit_small_ball())
    assert law.exponent_power == 0.5 and law.log_power == 0.0
    assert law.constant == pytest.approx(math.sqrt(2), rel=1e-15)


@pytest.mark.parametrize("lam", [1e4, 1e6])
def test_interval_exit_transform_matches(lam):
    law = debruijn_forward(interval_exit_small_ball())
    ratio = float(log_interval_exit_transform(lam) / law.log_transform(lam))
    assert ratio == pytest.approx(1.0, abs=1e-2)
    assert ratio == pytest.approx(1 - math.log(2) / math.sqrt(2 * lam), abs=1e-12)


def test_unit_constant():
    assert debruijn_forward(SmallBallLaw(1.0, 0.0, 1.0)).constant == pytest.approx(2.0, rel=1e-15)


@given(st.floats(0.2, 5.0), st.floats(-2.0, 2.0), st.floats(0.1, 10.0))
def test_constant_scales_with_C(alpha, beta, C):
    one = debruijn_forward(SmallBallLaw(alpha, beta, C)).constant
    two = debruijn_forward(SmallBallLaw(alpha, beta, 2 * C)).constant
    assert two / one == pytest.approx(2 ** (1 / (1 + alpha)), rel=1e-12)


def test_half_power_gives_cube_root():
    law = debruijn_forward(SmallBallLaw(0.5, 0.0, 1.0))
    assert law.exponent_power == pytest.approx(1 / 3, rel=1e-15)


def test_stretched_constant_is_forward_map():
    for C, p in ((1.0, 2.0), (0.7, 1.0), (3.0, 0.5)):
        direct = stretched_small_ball_constant(C, p)
        via = debruijn_forward(SmallBallLaw(0.5, -2 / p, C * 2 ** (2 / p)))
        assert direct.constant == pytest.approx(via.constant, rel=1e-13)
        assert direct.log_power == pytest.approx(via.log_power, rel=1e-13)


def test_stretched_constant_value():
    law = stretched_small_ball_constant(1.0, 2.0)
    assert law.constant == pytest.approx(1.5 ** (5 / 3) * 2, rel=1e-14)
    assert law.log_power == pytest.approx(-2 / 3, rel=1e-15)


def test_exact_power_law_at_c_two():
    lam = np.array([2.0, 10.0, 1e3])
    exact = np.log((1 - np.exp(-lam)) / lam)
    assert np.allclose(power_law_log_transform(2.0, lam), exact, rtol=1e-14)


@pytest.mark.parametrize("c", [0.5, 2.0, 6.0])
def test_power_law_table(c):
    rows = power_law_transform_table(c, np.geomspace(10, 1e12, 12))
    for row in rows:
        assert row.lower <= row.ratio + 1e-12
        assert row.ratio <= row.upper + 1e-12
    errs = [abs(r.ratio + c / 2) for r in rows]
    assert errs[-1] < errs[0]
    assert errs[-1] < 0.1 * c


def test_invalid_arguments():
    with pytest.raises(ValueError):
        SmallBallLaw(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        LaplaceLaw(1.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        power_law_transform_table(2.0, [0.5])
    with pytest.raises(ValueError):
        stretched_small_ball_constant(-1.0, 2.0)
