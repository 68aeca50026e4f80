import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kndirac.errors import KappaTooSmall, NegativeDiscriminant
from kndirac.operator_model import (
    OperatorParams, coefficient_c, coefficient_s, exact_eigenvalue_equal_coupling,
    exact_eigenvalue_zero, predicted_rate, validate_params,
)

kappas = st.one_of(st.floats(0.5, 10), st.floats(-10, -0.5))
indices = st.integers(-20, 20).filter(lambda n: n != 0)


@pytest.mark.parametrize("kappa", [0.5, -0.5, 1.5, -3.5, 100.0])
def test_admissible_kappa_passes(kappa):
    p = OperatorParams(kappa, 0.3, -0.2)
    assert validate_params(p) is p


@pytest.mark.parametrize("kappa", [0.0, 0.4, -0.49999, 0.5 - 1e-15])
def test_small_kappa_rejected(kappa):
    with pytest.raises(KappaTooSmall):
        validate_params(OperatorParams(kappa))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        validate_params(OperatorParams(1.5, float("nan")))
    with pytest.raises(ValueError):
        validate_params(OperatorParams(float("inf")))


def test_coefficients_at_midpoint():
    p = OperatorParams(1.5, 0.25, 0.75)
    assert coefficient_c(p, math.pi / 2) == pytest.approx(0.0, abs=1e-16)
    assert coefficient_s(p, math.pi / 2) == pytest.approx(2.25)
    t = np.array([0.3, 1.1, 2.9])
    np.testing.assert_allclose(coefficient_s(p, t), 1.5 / np.sin(t) + 0.75 * np.sin(t))


def test_zero_coupling_values():
    assert exact_eigenvalue_zero(1.5, 1) == 2.0
    assert exact_eigenvalue_zero(1.5, -1) == -2.0
    assert exact_eigenvalue_zero(-3.5, 2) == 5.0
    assert exact_eigenvalue_zero(0.5, 1) == 1.0


def test_equal_coupling_known_values():
    assert exact_eigenvalue_equal_coupling(1.5, 0.25, 1, 1) == pytest.approx(2.25)
    # lambda_2 at the same point bounds the gap used by the pollution check
    assert exact_eigenvalue_equal_coupling(1.5, 0.25, 1, 2) == pytest.approx(3.1575, abs=1e-4)
    assert exact_eigenvalue_equal_coupling(3.0, 0.25, 1, 1) == pytest.approx(3.75)
    assert exact_eigenvalue_equal_coupling(0.75, 0.25, 1, 1) == pytest.approx(1.5)


def test_index_zero_rejected():
    with pytest.raises(ValueError):
        exact_eigenvalue_zero(1.5, 0)


@given(kappas, st.floats(-50, 50), st.sampled_from([1, -1]), indices)
def test_equal_coupling_radicand_never_negative(kappa, am, sign, n):
    # completing the square bounds the radicand below by (|kappa| + |n| - 1)^2 - kappa^2 >= 0
    lam = exact_eigenvalue_equal_coupling(kappa, am, sign, n)
    assert math.isfinite(lam)


@given(kappas, indices)
def test_equal_coupling_reduces_to_zero_coupling(kappa, n):
    assert exact_eigenvalue_equal_coupling(kappa, 0.0, 1, n) == pytest.approx(
        exact_eigenvalue_zero(kappa, n), rel=1e-12, abs=1e-12)
    assert exact_eigenvalue_equal_coupling(kappa, 0.0, -1, n) == pytest.approx(
        exact_eigenvalue_zero(kappa, n), rel=1e-12, abs=1e-12)


@given(kappas, indices)
def test_zero_coupling_sign_and_magnitude(kappa, n):
    lam = exact_eigenvalue_zero(kappa, n)
    assert math.copysign(1, lam) == math.copysign(1, n)
    assert abs(lam) >= abs(n) - 1e-12


@given(kappas, st.floats(-3, 3), st.sampled_from([1, -1]), st.integers(1, 10))
def test_equal_coupling_ordered_in_n(kappa, am, sign, n):
    try:
        lo = exact_eigenvalue_equal_coupling(kappa, am, sign, n)
        hi = exact_eigenvalue_equal_coupling(kappa, am, sign, n + 1)
    except NegativeDiscriminant:
        return
    assert hi > lo


def test_predicted_rates():
    assert predicted_rate(3.0, "conjectured") == 1.0
    assert predicted_rate(3.0, "proven") == 0.5
    assert predicted_rate(0.75, "conjectured") == pytest.approx(0.25)
    assert predicted_rate(1.0, "conjectured") == 1.0
    assert predicted_rate(-1.25, "proven") == pytest.approx(0.375)
    with pytest.raises(KappaTooSmall):
        predicted_rate(0.5)
    with pytest.raises(ValueError):
        predicted_rate(2.0, "observed")


@given(st.floats(0.5001, 20))
def test_proven_rate_is_half_conjectured(k):
    assert predicted_rate(k, "proven") == pytest.approx(predicted_rate(k, "conjectured") / 2)
    assert 0 < predicted_rate(k, "conjectured") <= 1
