import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscexit.asymptotics import (
    DiffusionLimitParams,
    ch,
    convergence_study,
    convergence_violations,
    limit_c_factor,
    limit_cross_up,
    limit_exit_interval,
    limit_f_kernel,
    limit_k_frak,
    limit_kernel,
    limit_passage_down,
    limit_resolvent,
    sh,
    write_convergence_csv,
)
from oscexit.functionals import GeometryError
from oscexit.validation import HOMOGENEOUS, OSCILLATING, ZERO_MEAN_OSC

P = DiffusionLimitParams(1.3, 0.8, 0.7)


def test_params():
    assert P.s1 * P.sigma1 == pytest.approx(math.sqrt(1.4))
    assert P.s2 * P.sigma2 == pytest.approx(math.sqrt(1.4))
    with pytest.raises(ValueError):
        DiffusionLimitParams(1.0, 0.0, 1.0)
    fm = DiffusionLimitParams.from_model(HOMOGENEOUS, 1.0)
    assert fm.sigma1 == pytest.approx(math.sqrt(2.0))


def test_stable_hyperbolics():
    for y in (-3.0, 0.0, 0.4, 20.0):
        assert sh(y) == pytest.approx(math.sinh(y), rel=1e-14, abs=1e-300)
        assert ch(y) == pytest.approx(math.cosh(y), rel=1e-14)
    # huge arguments stay finite in ratios
    big = DiffusionLimitParams(1.0, 1.0, 1e6)
    assert 0 <= limit_cross_up(big, 0.5, 0.5, 1.0) < 1e-100


def test_cross_up_examples():
    assert limit_cross_up(P, 1.2, 0.5, 1.2) == pytest.approx(1.0)
    g1, g2, s2 = P.sigma1, P.sigma2, P.s2
    ref = g1 / (g1 * math.cosh(0.7 * s2) + g2 * math.sinh(0.7 * s2))
    assert limit_cross_up(P, 0.5, 0.5, 1.2) == pytest.approx(ref)
    eps = 1e-9
    assert limit_cross_up(P, 0.5 - eps, 0.5, 1.2) == pytest.approx(
        limit_cross_up(P, 0.5 + eps, 0.5, 1.2), abs=1e-7)
    same = DiffusionLimitParams(1.1, 1.1, 0.7)
    assert limit_cross_up(same, 0.5, 0.5, 1.2) == pytest.approx(math.exp(-0.7 * same.s1))
    with pytest.raises(GeometryError):
        limit_cross_up(P, 1.0, 0.5, 0.9)


def test_passage_down_examples():
    assert limit_passage_down(P, 0.1, 0.5, 0.1) == pytest.approx(1.0)
    eps = 1e-9
    assert limit_passage_down(P, 0.5 - eps, 0.5, 0.0) == pytest.approx(
        limit_passage_down(P, 0.5 + eps, 0.5, 0.0), abs=1e-7)
    same = DiffusionLimitParams(0.9, 0.9, 2.0)
    for x in (0.5, 0.8, 1.7):
        assert limit_passage_down(same, x, 0.5, 0.1) == pytest.approx(
            math.exp(-(x - 0.1) * same.s1), rel=1e-12)
    with pytest.raises(GeometryError):
        limit_passage_down(P, 0.2, 0.5, 0.3)


def test_exit_interval_examples():
    d, u = limit_exit_interval(P, 1e-12, 0.4)
    assert d == pytest.approx(1.0) and u == pytest.approx(0.0, abs=1e-10)
    eps = 1e-9
    left = limit_exit_interval(P, 0.4 - eps, 0.4)
    right = limit_exit_interval(P, 0.4 + eps, 0.4)
    assert left == pytest.approx(right, abs=1e-7)
    with pytest.raises(GeometryError):
        limit_exit_interval(P, 1.0, 0.5)


@settings(max_examples=80, deadline=None)
@given(
    x=st.floats(0.01, 0.99), b=st.floats(0.01, 0.99),
    g1=st.floats(0.2, 5.0), g2=st.floats(0.2, 5.0),
)
def test_exit_sums_to_one_as_s_vanishes(x, b, g1, g2):
    p = DiffusionLimitParams(g1, g2, 1e-10)
    d, u = limit_exit_interval(p, x, b)
    assert abs(d + u - 1.0) < 1e-6
    assert d == pytest.approx(1 - x, abs=1e-4)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.01, 0.99), b=st.floats(0.01, 0.99), s=st.floats(0.01, 50.0))
def test_exit_values_in_unit_interval(x, b, s):
    d, u = limit_exit_interval(DiffusionLimitParams(1.4, 0.6, s), x, b)
    assert 0 < d < 1 and 0 < u < 1 and d + u <= 1 + 1e-12


def _brownian_exit(sigma, s, x):
    w = math.sqrt(2 * s) / sigma
    return math.sinh((1 - x) * w) / math.sinh(w), math.sinh(x * w) / math.sinh(w)


@pytest.mark.parametrize("x", [0.2, 0.6])
def test_equal_sigmas_collapse_to_brownian(x):
    p = DiffusionLimitParams(1.2, 1.2, 0.9)
    assert limit_exit_interval(p, x, 0.4) == pytest.approx(_brownian_exit(1.2, 0.9, x), rel=1e-12)


@pytest.mark.parametrize("x", [0.2, 0.6])
def test_switch_level_at_edges_collapses(x):
    # b -> 0: only component 2 is seen; b -> 1: only component 1
    p = DiffusionLimitParams(1.7, 0.6, 0.9)
    assert limit_exit_interval(p, x, 1e-12) == pytest.approx(_brownian_exit(0.6, 0.9, x), abs=1e-9)
    assert limit_exit_interval(p, x, 1 - 1e-12) == pytest.approx(_brownian_exit(1.7, 0.9, x), abs=1e-9)


def test_limit_kernels():
    assert limit_resolvent(1.3, 0.7, -0.5) == 0.0
    assert limit_kernel(P, -0.5, 0.3) == 0.0
    assert limit_kernel(P, -0.2, 0.5) == pytest.approx(limit_resolvent(P.sigma2, P.s, 0.3))
    assert limit_k_frak(P, -0.6, 0.2) == 1.0
    assert limit_c_factor(P, 0.0) == pytest.approx(1.0)
    assert limit_c_factor(P, -0.3) == pytest.approx(math.exp(-0.3 * P.s2))
    assert limit_f_kernel(P, 0.0) == pytest.approx(P.sigma1**2 / P.sigma2**2)


def test_convergence_study_rows():
    rows = convergence_study(ZERO_MEAN_OSC)
    names = {r.functional for r in rows}
    assert {"resolvent_1", "cramer_2", "kernel_neg", "k_frak_pos", "c_factor_pos",
            "f_kernel", "exit_up_above", "passage_down_below"} <= names
    assert len(rows) == 3 * len(names)
    assert convergence_violations(rows) == []
    by = {(r.functional, r.B): r for r in rows}
    for name in names:
        assert by[(name, 250.0)].abs_err < by[(name, 10.0)].abs_err


def test_convergence_resolvent_example():
    rows = convergence_study(HOMOGENEOUS, s=1.0)
    errs = [r.abs_err for r in rows if r.functional == "resolvent_1"]
    assert errs[0] > errs[1] > errs[2]
    lim = 2 / (math.sqrt(2) * math.sqrt(2)) * math.sinh(1.0)
    assert rows[0].limit_value == pytest.approx(lim)


def test_convergence_rejects_nonzero_mean():
    with pytest.raises(ValueError, match="mean"):
        convergence_study(OSCILLATING)


def test_violation_detection():
    from oscexit.asymptotics import ConvergenceRow
    rows = [ConvergenceRow("f", B, 0.0, 0.0, e) for B, e in ((10, 1.0), (50, 1.5), (250, 0.2))]
    assert convergence_violations(rows) == ["f"]
    rows = [ConvergenceRow("g", B, 0.0, 0.0, e) for B, e in ((10, 1.0), (50, 1.05), (250, 0.9))]
    assert convergence_violations(rows) == []


def test_csv_output(tmp_path):
    rows = convergence_study(ZERO_MEAN_OSC, B_list=(10.0, 20.0))
    path = tmp_path / "c.csv"
    write_convergence_csv(path, rows)
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"functional,B,finite_value,limit_value,abs_err"
    assert b"\r" not in path.read_bytes()
    assert len(lines) == len(rows) + 2
