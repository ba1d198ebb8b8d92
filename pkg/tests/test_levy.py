import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscexit.levy import (
    Component,
    DomainError,
    Erlang,
    Exponential,
    HyperExponential,
    model_from_dict,
    cramer_root,
    laplace_exponent,
    load_model,
    moment_rates,
    save_model,
    OscillatingModel,
)

from conftest import ALL_COMPONENTS, ZERO_MEAN_EXP

GOLDEN = (1 + math.sqrt(5)) / 2


def test_exponent_at_zero_vanishes():
    for comp in ALL_COMPONENTS:
        assert laplace_exponent(comp, 0.0) == 0.0


def test_exponent_exponential_value():
    assert laplace_exponent(ZERO_MEAN_EXP, 1.0) == pytest.approx(0.5, abs=1e-15)
    # k(z) = z^2 / (1 + z) for this model
    z = np.linspace(0.1, 5, 7)
    assert np.allclose(laplace_exponent(ZERO_MEAN_EXP, z), z**2 / (1 + z), rtol=1e-14)


def test_exponent_slope_at_zero():
    h = 1e-6
    slope = (laplace_exponent(ZERO_MEAN_EXP, h) - laplace_exponent(ZERO_MEAN_EXP, -h)) / (2 * h)
    assert abs(slope) < 1e-9


def test_exponent_domain_error():
    with pytest.raises(DomainError):
        laplace_exponent(ZERO_MEAN_EXP, -1.5)
    with pytest.raises(DomainError):
        laplace_exponent(ZERO_MEAN_EXP, -1.0 + 2j)


def test_exponent_real_on_real_axis_and_complex_off_it():
    assert np.isrealobj(laplace_exponent(ZERO_MEAN_EXP, np.array([0.5, 1.0])))
    assert np.iscomplexobj(laplace_exponent(ZERO_MEAN_EXP, 0.5 + 1j))


def test_cramer_root_examples():
    assert cramer_root(ZERO_MEAN_EXP, 1.0) == pytest.approx(GOLDEN, rel=1e-13)
    assert cramer_root(ZERO_MEAN_EXP, 2.0) == pytest.approx(1 + math.sqrt(3), rel=1e-13)
    roots = [cramer_root(ZERO_MEAN_EXP, s) for s in (1e-2, 1e-4, 1e-6)]
    assert roots[0] > roots[1] > roots[2] and roots[2] < 2e-3


def test_cramer_root_rejects_nonpositive_s():
    with pytest.raises(ValueError):
        cramer_root(ZERO_MEAN_EXP, 0.0)


@pytest.mark.parametrize("comp", ALL_COMPONENTS)
@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_root_residual(comp, s):
    c = cramer_root(comp, s)
    assert c > 0
    assert abs(laplace_exponent(comp, c) - s) <= 1e-10 * s


@pytest.mark.parametrize("comp", ALL_COMPONENTS)
def test_exponent_convex(comp):
    z = np.linspace(0, 20, 401)
    k = laplace_exponent(comp, z)
    assert np.all(k[2:] - 2 * k[1:-1] + k[:-2] >= -1e-8)


@pytest.mark.parametrize("comp", ALL_COMPONENTS)
def test_cramer_root_increasing(comp):
    s = np.linspace(0.05, 10, 60)
    c = np.array([cramer_root(comp, v) for v in s])
    assert np.all(np.diff(c) > 0)


@pytest.mark.parametrize("comp", ALL_COMPONENTS)
def test_mean_rate_is_minus_exponent_slope(comp):
    h = 1e-6
    slope = (laplace_exponent(comp, h) - laplace_exponent(comp, -h)) / (2 * h)
    assert abs(comp.mean_rate + slope) < 1e-4


def test_moment_rates_examples():
    assert moment_rates(ZERO_MEAN_EXP) == pytest.approx((0.0, 2.0))
    assert moment_rates(Component(1.0, 0.0)) == (-1.0, 0.0)
    assert moment_rates(Component(1.0, 1.0, Erlang(2, 2.0))) == pytest.approx((0.0, 1.5))


@pytest.mark.parametrize("law", [
    Exponential(1.7), HyperExponential((0.3, 0.7), (0.5, 4.0)), Erlang(3, 2.5)
])
def test_jump_law_invariants(law):
    assert law.lst(0.0) == pytest.approx(1.0)
    assert law.m1 > 0 and law.m2 > law.m1**2
    z = np.linspace(0, 30, 301)
    phi = law.lst(z)
    # completely monotone implies decreasing and convex on the positive axis
    assert np.all(np.diff(phi) < 0) and np.all(np.diff(phi, 2) > 0)
    w = np.array([0.0, 1.0, 3.0])[:, None] + 1j * np.linspace(-50, 50, 11)[None, :]
    assert np.all(np.abs(law.lst(w)) <= 1 + 1e-15)
    num, den = law.lst_polys()
    assert np.allclose(np.polynomial.polynomial.polyval(z, num)
                       / np.polynomial.polynomial.polyval(z, den), phi, rtol=1e-13)


def test_jump_law_moments_match_samples():
    rng = np.random.default_rng(3)
    for law in (Exponential(2.0), HyperExponential((0.4, 0.6), (1.0, 3.0)), Erlang(2, 2.0)):
        x = law.sample(rng, 400_000)
        assert x.mean() == pytest.approx(law.m1, rel=1e-2)
        assert (x**2).mean() == pytest.approx(law.m2, rel=2e-2)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        HyperExponential((0.5, 0.6), (1.0, 2.0))
    with pytest.raises(ValueError):
        Erlang(0, 1.0)
    with pytest.raises(ValueError):
        Component(0.0, 1.0)
    with pytest.raises(ValueError):
        OscillatingModel(ZERO_MEAN_EXP, ZERO_MEAN_EXP, math.inf)


def test_model_json_round_trip(tmp_path):
    d = {
        "comp1": {"a": 1.0, "lambda": 1.0, "jumps": {"kind": "exponential", "mu": 1.0}},
        "comp2": {"a": 1.5, "lambda": 2.0,
                  "jumps": {"kind": "hyperexponential", "p": [0.4, 0.6], "mu": [1.0, 3.0]}},
        "b": 0.5,
    }
    model = model_from_dict(d)
    assert model.comp2.jumps == HyperExponential((0.4, 0.6), (1.0, 3.0))
    path = tmp_path / "m.json"
    save_model(model, path)
    assert load_model(path) == model
    assert json.loads(path.read_text()) == d


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(0.2, 5.0),
    lam=st.floats(0.0, 5.0),
    mu=st.floats(0.2, 5.0),
    s=st.floats(1e-3, 20.0),
)
def test_root_residual_property(a, lam, mu, s):
    comp = Component(a, lam, Exponential(mu))
    c = cramer_root(comp, s)
    assert abs(laplace_exponent(comp, c) - s) <= 1e-10 * (1 + s)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.2, 5.0), lam=st.floats(0.0, 5.0), n=st.integers(1, 4), mu=st.floats(0.5, 5.0))
def test_shifted_polys_reproduce_exponent(a, lam, n, mu):
    comp = Component(a, lam, Erlang(n, mu))
    P, D = comp.shifted_polys(0.7)
    z = np.array([0.1, 1.0, 3.0, 0.5 + 2j])
    lhs = np.polynomial.polynomial.polyval(z, P) / np.polynomial.polynomial.polyval(z, D)
    assert np.allclose(lhs, laplace_exponent(comp, z) - 0.7, rtol=1e-10, atol=1e-10)
