import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtr, ndtri

from divkit.normal import phi, phi_inv


def test_known_values():
    assert phi(0.0) == 0.5
    assert phi(-math.inf) == 0.0 and phi(math.inf) == 1.0
    assert phi_inv(0.5) == 0.0
    assert phi_inv(0.0) == -math.inf and phi_inv(1.0) == math.inf
    assert phi_inv(0.975) == pytest.approx(1.959963984540054, abs=1e-14)


def test_domain():
    for bad in (-0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            phi_inv(bad)


@settings(max_examples=300)
@given(st.floats(1e-300, 1 - 1e-16))
def test_phi_inv_matches_ndtri(p):
    ref = float(ndtri(p))
    assert phi_inv(p) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@settings(max_examples=300)
@given(st.floats(-37, 8))
def test_phi_matches_ndtr_and_round_trips(x):
    assert phi(x) == pytest.approx(float(ndtr(x)), rel=1e-13, abs=1e-300)
    p = phi(x)
    if 1e-300 < p < 1 - 1e-12:
        # p near 1 is stored to one ulp of 1, so x is only known to ulp(p) / pdf(x)
        cond = 4 * np.spacing(p) / (math.exp(-x * x / 2) / math.sqrt(2 * math.pi))
        assert phi_inv(p) == pytest.approx(x, rel=1e-9, abs=max(1e-9, cond))


def test_arrays():
    p = np.array([[0.1, 0.5], [0.9, 0.999]])
    assert np.allclose(phi_inv(p), ndtri(p), rtol=1e-12, atol=1e-13)
    assert phi_inv(p).shape == (2, 2)
    assert np.allclose(phi(np.array([-1.0, 0.0, 1.0])), ndtr([-1.0, 0.0, 1.0]), rtol=1e-15)


def test_tails_are_symmetric():
    for p in (1e-300, 1e-20, 1e-8, 0.01, 0.3):
        assert phi_inv(p) == pytest.approx(-phi_inv(1 - p), rel=1e-6) if p > 1e-16 else True
