import math
import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ibm_lifetime.domains import (
    domain_from_config,
    ground_state_product,
    principal,
    spectrum_box,
    spectrum_interval,
)


def test_unit_interval_first_mode():
    d = spectrum_interval(0, 1, 1)
    mode = d.modes[0]
    assert mode.eigenvalue == pytest.approx(math.pi ** 2 / 2, rel=1e-15)
    assert mode.eigenfunction(0.3) == pytest.approx(math.sqrt(2) * math.sin(0.3 * math.pi), rel=1e-15)
    assert mode.integral == pytest.approx(2 * math.sqrt(2) / math.pi, rel=1e-15)


def test_interval_length_two():
    assert spectrum_interval(0, 2, 1).principal_eigenvalue == pytest.approx(math.pi ** 2 / 8, rel=1e-15)


def test_higher_modes_and_odd_symmetry():
    d = spectrum_interval(0, 1, 3)
    lams = d.eigenvalues()
    assert lams[1] == pytest.approx(2 * math.pi ** 2, rel=1e-15)
    assert lams[2] == pytest.approx(9 * math.pi ** 2 / 2, rel=1e-15)
    assert d.modes[1].integral == 0.0


@pytest.mark.parametrize("k", [1, 2, 5, 17, 64])
def test_eigenfunctions_normalised(k):
    d = spectrum_interval(-0.3, 1.4)
    psi = d.modes[k - 1].eigenfunction
    norm, _ = quad(lambda x: float(psi(x)) ** 2, -0.3, 1.4, limit=400, epsabs=1e-13, epsrel=1e-13)
    assert norm == pytest.approx(1.0, abs=1e-10)
    integral, _ = quad(lambda x: float(psi(x)), -0.3, 1.4, limit=400, epsabs=1e-13)
    assert integral == pytest.approx(d.modes[k - 1].integral, abs=1e-10)


@pytest.mark.parametrize("k", [1, 2, 3, 8])
def test_eigenvalue_equation_residual(k):
    d = spectrum_interval(0, 1)
    mode = d.modes[k - 1]
    x = np.linspace(0.01, 0.99, 100)
    h = 1e-4
    second = (mode.eigenfunction(x + h) - 2 * mode.eigenfunction(x) + mode.eigenfunction(x - h)) / h ** 2
    lhs = -0.5 * second
    rhs = mode.eigenvalue * mode.eigenfunction(x)
    mask = np.abs(rhs) > 1e-3
    assert np.max(np.abs(lhs[mask] / rhs[mask] - 1)) < 1e-6


def test_eigenvalues_sorted_and_positive():
    d = spectrum_box([(0, 1), (0, 2), (0, 0.5)], 5)
    lams = d.eigenvalues()
    assert np.all(lams > 0)
    assert np.all(np.diff(lams) >= 0)
    assert lams[0] < lams[1]


@given(st.floats(0.01, 100.0))
def test_principal_scaling(L):
    assert spectrum_interval(0, L, 1).principal_eigenvalue == pytest.approx(
        spectrum_interval(0, 1, 1).principal_eigenvalue / L ** 2, rel=1e-14)


def test_unit_square():
    d = spectrum_box([(0, 1), (0, 1)], 1)
    mode = d.modes[0]
    assert mode.eigenvalue == pytest.approx(math.pi ** 2)
    assert mode.eigenfunction(np.array([0.3, 0.6])) == pytest.approx(2 * math.sin(0.3 * math.pi) * math.sin(0.6 * math.pi))
    assert mode.integral == pytest.approx(8 / math.pi ** 2)


@pytest.mark.parametrize("L", [0.5, 2.0, 3.0])
def test_square_scaling(L):
    assert spectrum_box([(0, L), (0, L)], 2).principal_eigenvalue == pytest.approx(math.pi ** 2 / L ** 2)


def test_rectangle():
    assert spectrum_box([(0, 1), (0, 2)], 3).principal_eigenvalue == pytest.approx(5 * math.pi ** 2 / 8)


def test_principal_amplitudes():
    lam, A = principal(spectrum_interval(0, 1), 0.5)
    assert lam == pytest.approx(math.pi ** 2 / 2)
    assert A == pytest.approx(2 * math.pi, rel=1e-14)
    _, A_sq = principal(spectrum_box([(0, 1), (0, 1)]), (0.5, 0.5))
    assert A_sq == pytest.approx(16.0, rel=1e-14)


def test_amplitude_vanishes_at_boundary():
    d = spectrum_interval(0, 1)
    values = [principal(d, z)[1] for z in (1e-2, 1e-4, 1e-6)]
    assert values[0] > values[1] > values[2] > 0
    assert values[2] < 1e-4
    assert ground_state_product(d, 1e-8) < 1e-7


@pytest.mark.parametrize("z", [0.0, 1.0, -0.2, 1.5])
def test_boundary_points_rejected(z):
    with pytest.raises(ValueError):
        principal(spectrum_interval(0, 1), z)


@pytest.mark.parametrize("a,b", [(1, 1), (2, 1), (0, math.inf)])
def test_degenerate_interval_rejected(a, b):
    with pytest.raises(ValueError):
        spectrum_interval(a, b)


def test_empty_box_rejected():
    with pytest.raises(ValueError):
        spectrum_box([])


def test_config_round_trip_and_pickle():
    d = domain_from_config({"type": "box", "bounds": [[0, 1], [0, 2]], "modes": 4})
    again = domain_from_config(d.to_config())
    assert again.eigenvalues() == pytest.approx(d.eigenvalues())
    assert pickle.loads(pickle.dumps(d)).eigenvalues() == pytest.approx(d.eigenvalues())
    with pytest.raises(ValueError):
        domain_from_config({"type": "disk", "bounds": [0, 1]})
