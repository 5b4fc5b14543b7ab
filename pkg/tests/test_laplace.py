import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ibm_lifetime.laplace import (
    LaplaceProblem,
    asym_cosine_moment,
    asym_saddle,
    asym_saddle_moment,
    asym_x_plus_inv_sq,
    laplace_point,
    numeric_oracle,
    ratio_to_asymptotic,
    saddle_exponent_coefficient,
    saddle_point,
)


def test_gaussian_oracle():
    est = numeric_oracle("gaussian", None, 1.0)
    assert math.exp(est.log_value) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)


def test_laplace_point_gaussian_is_exact():
    prob = LaplaceProblem(h=lambda x: 1.0, f=lambda x: -x * x, x0=0.0, f2=-2.0)
    assert laplace_point(prob, 3.0) == pytest.approx(math.sqrt(math.pi / 3.0), rel=1e-15)


def test_laplace_point_inverse_square_problem():
    prob = LaplaceProblem(h=lambda x: 1.0, f=lambda x: -(x + x ** -2), x0=2 ** (1 / 3), f2=-6 / 2 ** (4 / 3))
    for lam in (1.0, 10.0, 1e3):
        assert laplace_point(prob, lam, log=True) == pytest.approx(asym_x_plus_inv_sq(lam, log=True), rel=1e-14)


def test_laplace_point_scales_with_lambda():
    prob = LaplaceProblem(h=lambda x: 2.0, f=lambda x: math.cos(x) - 1, x0=0.0, f2=-1.0)
    # f(x0) = 0 so quadrupling lam halves the value.
    assert laplace_point(prob, 4 * 7.0) == pytest.approx(laplace_point(prob, 7.0) / 2, rel=1e-15)


@pytest.mark.parametrize("prob", [
    LaplaceProblem(h=lambda x: 1.0, f=lambda x: x * x, x0=0.0, f2=2.0),
    LaplaceProblem(h=lambda x: 0.0, f=lambda x: -x * x, x0=0.0, f2=-2.0),
])
def test_laplace_point_rejects_degenerate(prob):
    with pytest.raises(ValueError):
        laplace_point(prob, 1.0)


def test_laplace_problem_probe_detects_wrong_maximum():
    prob = LaplaceProblem(h=lambda x: 1.0, f=lambda x: -(x - 1) ** 2, x0=0.0, f2=-2.0)
    with pytest.raises(ValueError):
        prob.check(np.linspace(-2, 2, 41))


@pytest.mark.parametrize("lam", [1e2, 1e3, 1e4])
def test_inverse_square_ratio(lam):
    assert ratio_to_asymptotic("x_plus_inv_sq", None, lam) == pytest.approx(1.0, abs=10 / lam)


def test_inverse_square_ratio_improves():
    errs = [abs(ratio_to_asymptotic("x_plus_inv_sq", None, lam) - 1) for lam in (10.0, 1e2, 1e3, 1e4)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(1.0, 1e6))
def test_substitution_identity(a, b, t):
    """u = (at/b)^{1/3} x maps the saddle integral onto the x + x^-2 integral."""
    lam = a ** (1 / 3) * b ** (2 / 3) * t ** (1 / 3)
    lhs = asym_saddle(a, b, t, log=True)
    rhs = math.log(a * t / b) / 3 + asym_x_plus_inv_sq(lam, log=True)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_saddle_oracle_against_riemann_sum():
    u = np.linspace(1e-6, 60.0, 1_000_001)
    vals = np.exp(-1.0 / u ** 2 - u)
    riemann = float(np.sum(vals) * (u[1] - u[0]))
    assert math.exp(numeric_oracle("saddle", {"a": 1.0, "b": 1.0}, 1.0).log_value) == pytest.approx(riemann, rel=1e-8)


@pytest.mark.parametrize("kind", ["saddle", "saddle_moment"])
@pytest.mark.parametrize("a,b", [(1.0, 1.0), (math.pi ** 2 / 2, 0.3), (0.2, 5.0)])
def test_saddle_ratios_tend_to_one(kind, a, b):
    ratios = [ratio_to_asymptotic(kind, {"a": a, "b": b}, t) for t in (1e3, 1e6, 1e9)]
    assert abs(ratios[-1] - 1) < 2e-3
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1)


def test_exponent_coefficient():
    assert saddle_exponent_coefficient(1.0, 1.0) == pytest.approx(3 * 2 ** (-2 / 3), rel=1e-14)
    a, b = math.pi ** 2 / 8, math.pi ** 2 / 2
    assert saddle_exponent_coefficient(a, b) == pytest.approx(3 * (a * b * b / 4) ** (1 / 3), rel=1e-14)


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0), st.floats(1.0, 1e6))
def test_saddle_point_maximises_exponent(a, b, t):
    u0 = saddle_point(a, b, t)
    g = lambda u: -a * t / u ** 2 - b * u
    assert g(u0) >= max(g(u0 * 0.999), g(u0 * 1.001))
    assert g(u0) == pytest.approx(-saddle_exponent_coefficient(a, b) * t ** (1 / 3), rel=1e-12)


def test_log_form_reaches_underflow_region():
    logv = asym_saddle(1.0, 1.0, 1e9, log=True)
    assert math.isfinite(logv) and logv < -900
    assert asym_saddle(1.0, 1.0, 1e9) == 0.0


@pytest.mark.parametrize("t", [1e3, 1e4])
def test_cosine_moment_K0(t):
    assert ratio_to_asymptotic("cosine_moment", {"K": 0.0, "lam_d": math.pi ** 2 / 2}, t) == pytest.approx(1.0, abs=0.02)


def test_cosine_moment_K_dependence_fades():
    """At moderate t the cosine matters; far out it does not."""
    lam_d = math.pi ** 2 / 2
    near = ratio_to_asymptotic("cosine_moment", {"K": 5.0, "lam_d": lam_d}, 1e4)
    far = ratio_to_asymptotic("cosine_moment", {"K": 5.0, "lam_d": lam_d}, 1e8)
    assert abs(far - 1) < 1e-3 < abs(near - 1)


def test_cosine_moment_formula_independent_of_K():
    assert asym_cosine_moment(0.0, 2.0, 1e5) == asym_cosine_moment(7.0, 2.0, 1e5)
    with pytest.raises(ValueError):
        asym_cosine_moment(-1.0, 2.0, 1e5)


@pytest.mark.parametrize("bad", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)])
def test_saddle_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        asym_saddle(*bad)
    with pytest.raises(ValueError):
        asym_saddle_moment(*bad)


def test_oracle_rejects_unknown_kind_and_tolerance():
    with pytest.raises(ValueError):
        numeric_oracle("nope", None, 1.0)
    with pytest.raises(ValueError):
        numeric_oracle("gaussian", None, 1.0, rtol=1e-12)
