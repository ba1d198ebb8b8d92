import pytest

from oscexit.levy import Component, Erlang, Exponential, HyperExponential, OscillatingModel

ZERO_MEAN_EXP = Component(1.0, 1.0, Exponential(1.0))
HYPER = Component(1.5, 2.0, HyperExponential((0.4, 0.6), (1.0, 3.0)))
ERLANG = Component(1.0, 1.0, Erlang(2, 2.0))

ALL_COMPONENTS = [ZERO_MEAN_EXP, HYPER, ERLANG, Component(2.0, 1.0, Erlang(3, 1.2))]


@pytest.fixture
def exp_comp():
    return ZERO_MEAN_EXP


@pytest.fixture
def homogeneous():
    return OscillatingModel(ZERO_MEAN_EXP, ZERO_MEAN_EXP, 0.5)


@pytest.fixture
def oscillating():
    return OscillatingModel(ZERO_MEAN_EXP, HYPER, 0.5)
