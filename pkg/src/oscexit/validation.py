"""Standard Monte Carlo validation grid: closed forms against exact simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import functionals as fn
from .levy import Component, Erlang, Exponential, HyperExponential, OscillatingModel
from .simulation import (
    DOWN,
    Down,
    Interval,
    McEstimate,
    PathSampler,
    Up,
    estimate_lt,
)

Z_LIMIT = 3.5

ZERO_MEAN_EXP = Component(1.0, 1.0, Exponential(1.0))
HOMOGENEOUS = OscillatingModel(ZERO_MEAN_EXP, ZERO_MEAN_EXP, 0.5)
OSCILLATING = OscillatingModel(
    ZERO_MEAN_EXP, Component(1.5, 2.0, HyperExponential((0.4, 0.6), (1.0, 3.0))), 0.5
)
OSCILLATING_ERLANG = OscillatingModel(
    Component(2.0, 1.0, Erlang(2, 1.0)), ZERO_MEAN_EXP, 1.0
)
ZERO_MEAN_OSC = OscillatingModel(ZERO_MEAN_EXP, Component(1.0, 1.0, Erlang(2, 2.0)), 0.5)


@dataclass(frozen=True)
class Cell:
    functional: str
    params: str
    closed_form: Callable[[], float]
    estimate: Callable[[int, int, int], McEstimate]


@dataclass(frozen=True)
class ValidationRow:
    functional: str
    params: str
    closed_form: float
    mc_value: float
    stderr: float
    z_score: float
    passed: bool


def _cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def exit_probability(
    sampler: PathSampler, x: float, geometry, side: str, n: int, t_max: float = 1e3
) -> McEstimate:
    """Frequency of exits through ``side``; unfinished paths count as misses."""
    out = sampler.sample_exit(x, geometry, n, t_max=t_max)
    hits = (out.side == (DOWN if side == "down" else 2)).astype(float)
    p = float(hits.mean())
    timeouts = float(np.mean(out.side == 0))
    return McEstimate(p, math.sqrt(p * (1 - p) / (n - 1)), n, timeouts)


def _osc_cells(tag: str, m: OscillatingModel, down, up, interval) -> list[Cell]:
    cells = []
    b = m.b
    for x, r, s in down:
        cells.append(Cell(
            "osc_passage_down", f"model={tag};b={b:g};x={x:g};r={r:g};s={s:g}",
            lambda m=m, x=x, r=r, s=s: fn.osc_passage_down_lt(m, x, r, s),
            lambda n, seed, w, m=m, x=x, r=r, s=s: estimate_lt(
                PathSampler(m, seed, workers=w), x, Down(r), s, n=n),
        ))
    for x, k, z, s in up:
        cells.append(Cell(
            "osc_cross_up", f"model={tag};b={b:g};x={x:g};k={k:g};z={z:g};s={s:g}",
            lambda m=m, x=x, k=k, z=z, s=s: fn.osc_cross_up_lt(m, x, k, z, s),
            lambda n, seed, w, m=m, x=x, k=k, z=z, s=s: estimate_lt(
                PathSampler(m, seed, workers=w), x, Up(k), s, z=z, n=n),
        ))
    for x, B, z, s in interval:
        for i, side in enumerate(("down", "up")):
            cells.append(Cell(
                f"osc_exit_{side}", f"model={tag};b={b:g};x={x:g};B={B:g};z={z:g};s={s:g}",
                lambda m=m, x=x, B=B, z=z, s=s, i=i: fn.osc_exit_interval_lt(m, x, B, z, s)[i],
                lambda n, seed, w, m=m, x=x, B=B, z=z, s=s, side=side: estimate_lt(
                    PathSampler(m, seed, workers=w), x, Interval(B), s, z=z, side=side, n=n),
            ))
    return cells


def standard_cells(model: OscillatingModel | None = None) -> list[Cell]:
    c = ZERO_MEAN_EXP
    cells = [
        Cell("passage_down", "model=exp;x=1;s=1",
             lambda: fn.passage_down_lt(c, 1.0, 1.0),
             lambda n, seed, w: estimate_lt(PathSampler(c, seed, workers=w), 1.0, Down(0.0), 1.0, n=n)),
        Cell("cross_up", "model=exp;x=1;z=0.3;s=1",
             lambda: fn.cross_up_lt(c, 1.0, 0.3, 1.0),
             lambda n, seed, w: estimate_lt(PathSampler(c, seed, workers=w), 0.0, Up(1.0), 1.0, z=0.3, n=n)),
    ]
    for i, side in enumerate(("down", "up")):
        cells.append(Cell(
            f"exit_{side}", "model=exp;x=0.5;d=1;z=0;s=1",
            lambda i=i: fn.exit_interval_lt(c, 0.5, 1.0, 0.0, 1.0)[i],
            lambda n, seed, w, side=side: estimate_lt(
                PathSampler(c, seed, workers=w), 0.5, Interval(1.0), 1.0, side=side, n=n),
        ))
    cells.append(Cell(
        "exit_probability_down", "model=exp;x=0.5;B=1;s=0",
        lambda: (1.0 - 0.5 + 1.0) / (1.0 + 1.0),
        lambda n, seed, w: exit_probability(PathSampler(c, seed, workers=w), 0.5, Interval(1.0), "down", n),
    ))
    cells += _osc_cells("hom", HOMOGENEOUS, [(1.0, 0.0, 1.0)], [(0.2, 1.0, 0.3, 1.0)],
                        [(0.5, 1.0, 0.0, 1.0)])
    cells += _osc_cells(
        "osc", OSCILLATING,
        [(1.0, 0.2, 1.0), (0.3, 0.0, 1.0)],
        [(0.3, 1.5, 0.0, 1.0), (0.8, 1.5, 0.5, 0.5)],
        [(0.3, 1.0, 0.4, 1.0), (0.8, 1.5, 0.0, 0.5)],
    )
    cells += _osc_cells(
        "erl", OSCILLATING_ERLANG,
        [(1.5, 0.5, 1.0)], [(0.5, 2.0, 0.2, 1.0)], [(1.4, 2.0, 0.0, 1.0)],
    )
    if model is not None:
        b = model.b
        interval = [(b / 2, b + 1.0, 0.0, 1.0)] if b >= 0 else []
        cells += _osc_cells("user", model, [(b + 0.5, b - 0.3, 1.0)],
                            [(b - 0.2, b + 1.0, 0.3, 1.0)], interval)
    return cells


def run_validation(
    n: int = 1_000_000, seed: int = 42, model: OscillatingModel | None = None, workers: int = 1
) -> list[ValidationRow]:
    rows = []
    for i, cell in enumerate(standard_cells(model)):
        cf = float(cell.closed_form())
        est = cell.estimate(n, _cell_seed(seed, i), workers)
        z = est.z_score(cf)
        ok = abs(est.value - cf) <= Z_LIMIT * est.stderr + est.truncation_bound
        rows.append(ValidationRow(cell.functional, cell.params, cf, est.value, est.stderr, z, ok))
    return rows
