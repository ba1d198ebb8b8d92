import math

import numpy as np
import pytest
from scipy import integrate

from oscexit.inversion import InversionConfig, InversionError, invert, invert_grid

TALBOT = InversionConfig()
EULER = InversionConfig(method="euler", node_count=32)

PHI = (1 + math.sqrt(5)) / 2


def fib_like(t):
    # partial fractions of 1/(z^2 - z - 1)
    r1, r2 = PHI, 1 - PHI
    return (np.exp(r1 * t) - np.exp(r2 * t)) / (r1 - r2)


CASES = [
    (lambda z: 1 / z, 0.0, lambda t: np.ones_like(t)),
    (lambda z: 1 / z**2, 0.0, lambda t: t),
    (lambda z: 1 / (z + 1), -1.0, lambda t: np.exp(-t)),
    (lambda z: 1 / (z * z - z - 1), PHI, fib_like),
    (lambda z: 1 / (z**2 + 1), 0.0, np.sin),
]


@pytest.mark.parametrize("transform,abscissa,exact", CASES)
def test_talbot_examples(transform, abscissa, exact):
    t = np.array([0.5, 0.75, 1.0, 2.0])
    got = invert_grid(transform, abscissa, t, TALBOT)
    assert np.allclose(got, exact(t), rtol=1e-10, atol=1e-11)


@pytest.mark.parametrize("transform,abscissa,exact", CASES)
def test_euler_examples(transform, abscissa, exact):
    t = np.array([0.5, 1.0, 2.0])
    got = invert_grid(transform, abscissa, t, EULER)
    assert np.allclose(got, exact(t), rtol=1e-6, atol=1e-7)


def test_scalar_and_grid_agree():
    t = np.linspace(0.5, 1.0, 6)
    grid = invert_grid(CASES[3][0], PHI, t)
    assert np.allclose(grid, fib_like(t), rtol=1e-10)
    assert [invert(CASES[3][0], PHI, v) for v in t] == pytest.approx(list(grid), rel=1e-14)


def test_nonpositive_times_return_zero():
    calls = []

    def f(z):
        calls.append(z)
        return 1 / z

    assert np.all(invert_grid(f, 0.0, [-1.0, 0.0]) == 0.0)
    assert not calls
    out = invert_grid(lambda z: 1 / z, 0.0, [-1.0, 0.0, 1.0])
    assert out[:2].tolist() == [0.0, 0.0] and out[2] == pytest.approx(1.0, rel=1e-12)


def test_node_doubling_is_stable():
    t = np.array([0.3, 1.0, 3.0])
    base = invert_grid(CASES[3][0], PHI, t, InversionConfig(node_count=32))
    doubled = invert_grid(CASES[3][0], PHI, t, InversionConfig(node_count=64))
    assert np.max(np.abs(base - doubled) / np.abs(doubled)) < 1e-9


def test_round_trip_through_quadrature():
    # invert, then take the forward transform numerically
    f = lambda z: (z + 3) / ((z + 1) * (z + 2) * (z + 0.5))
    for zval in (0.5, 1.0, 2.0, 3.5, 6.0):
        val, _ = integrate.quad(lambda t: math.exp(-zval * t) * invert(f, -0.5, t), 0, 60, limit=400)
        assert val == pytest.approx(f(zval), abs=1e-6)


def test_abscissa_shift_does_not_change_result():
    t = [0.7]
    a = invert_grid(CASES[3][0], PHI, t)
    b = invert_grid(CASES[3][0], PHI, t, InversionConfig(abscissa_shift=0.5))
    assert a[0] == pytest.approx(b[0], rel=1e-9)


def test_non_finite_transform_is_reported():
    with pytest.raises(InversionError, match="node"):
        invert_grid(lambda z: np.full(np.shape(z), np.nan), 0.0, [1.0])


@pytest.mark.parametrize("kwargs", [
    {"method": "bogus"}, {"node_count": 4}, {"method": "euler", "node_count": 31},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        InversionConfig(**kwargs)


def test_large_time_near_zero_poles():
    # poles at +-1e-3: f = sinh(1e-3 t)/1e-3, evaluated far out where a fixed
    # contour gap would amplify roundoff by exp(0.1 t)
    f = lambda z: 1 / ((z - 1e-3) * (z + 1e-3))
    t = np.array([50.0, 400.0, 2000.0])
    got = invert_grid(f, 1e-3, t)
    assert np.allclose(got, np.sinh(1e-3 * t) / 1e-3, rtol=1e-9)


def test_contour_gap_shrinks_with_time():
    from oscexit.inversion import contour_abscissa
    assert contour_abscissa(2.0) == pytest.approx(2.2)
    gam = contour_abscissa(2.0, TALBOT, np.array([1.0, 100.0]))
    assert gam[0] == pytest.approx(2.2) and gam[1] == pytest.approx(2.01)
