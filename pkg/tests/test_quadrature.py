from __future__ import annotations

import math

import numpy as np
import pytest

from ringlab.errors import QuadratureError
from ringlab.quadrature import adaptive_quad


def test_polynomial_exact():
    val, err = adaptive_quad(lambda x: 3 * x**2, 0.0, 2.0, 1e-12)
    assert val == pytest.approx(8.0, rel=1e-15)
    assert err <= 1e-12


def test_peaked_integrand_meets_tolerance():
    s = 1e-3
    val, _ = adaptive_quad(lambda t: s / (s * s + t * t), 0.0, 1.0, 1e-10)
    assert abs(val - math.atan(1 / s)) < 1e-10


def test_reversed_and_empty_interval():
    assert adaptive_quad(np.sin, 1.0, 1.0, 1e-10) == (0.0, 0.0)
    fwd, _ = adaptive_quad(np.sin, 0.0, 1.0, 1e-12)
    bwd, _ = adaptive_quad(np.sin, 1.0, 0.0, 1e-12)
    assert bwd == pytest.approx(-fwd, rel=1e-14)


def test_failure_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        adaptive_quad(lambda x: np.sign(np.sin(1.0 / np.maximum(x, 1e-300))), 0.0, 1.0, 1e-14)
    assert math.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_rejects_nonpositive_tol():
    with pytest.raises(ValueError):
        adaptive_quad(np.cos, 0.0, 1.0, 0.0)
