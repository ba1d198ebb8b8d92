"""Brownian limits of the exit functionals and finite-B convergence studies.

For zero-mean components with variance rates ``sigma_i**2``, space is scaled by
``B`` and time by ``B**2``. Exit transforms then converge to sinh/cosh
expressions in ``s_i = sqrt(2 s) / sigma_i``.

Hyperbolic expressions are evaluated through :func:`_ratio`, which factors
``exp(|y|)`` out of every sinh/cosh so that large arguments (B-scaling makes
them large) neither overflow nor cancel.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence


from .functionals import (
    GeometryError,
    osc_cross_up_lt,
    osc_exit_interval_lt,
    osc_passage_down_lt,
)
from .levy import OscillatingModel
from .scale import KernelHandle, resolvent_handle


@dataclass(frozen=True)
class DiffusionLimitParams:
    sigma1: float
    sigma2: float
    s: float

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0 and self.s > 0):
            raise ValueError(f"need positive sigma1, sigma2, s; got {self}")

    @property
    def s1(self) -> float:
        return math.sqrt(2.0 * self.s) / self.sigma1

    @property
    def s2(self) -> float:
        return math.sqrt(2.0 * self.s) / self.sigma2

    @classmethod
    def from_model(cls, model: OscillatingModel, s: float) -> "DiffusionLimitParams":
        return cls(
            math.sqrt(model.comp1.variance_rate), math.sqrt(model.comp2.variance_rate), s
        )


# A term is (coefficient, [(kind, argument), ...]) with kind in {"sh", "ch", "exp"}.
def _scaled(kind: str, y: float) -> tuple[float, float]:
    if kind == "exp":
        return 1.0, y
    ay = abs(y)
    tail = -math.expm1(-2.0 * ay) if kind == "sh" else 1.0 + math.exp(-2.0 * ay)
    sign = math.copysign(1.0, y) if kind == "sh" else 1.0
    return 0.5 * sign * tail, ay


def _term(coef, factors):
    m, e = coef, 0.0
    for kind, y in factors:
        mi, ei = _scaled(kind, y)
        m *= mi
        e += ei
    return m, e


def _ratio(num, den) -> float:
    nt = [_term(*t) for t in num]
    dt = [_term(*t) for t in den]
    e_ref = max(e for _, e in dt)
    top = sum(m * math.exp(e - e_ref) for m, e in nt)
    bottom = sum(m * math.exp(e - e_ref) for m, e in dt)
    return top / bottom


def sh(y: float) -> float:
    m, e = _scaled("sh", y)
    return m * math.exp(e)


def ch(y: float) -> float:
    m, e = _scaled("ch", y)
    return m * math.exp(e)


def limit_cross_up(p: DiffusionLimitParams, x: float, b: float, k: float) -> float:
    if k < max(x, b):
        raise GeometryError(f"need k >= max(x, b); got k={k}, x={x}, b={b}")
    s1, s2, g1, g2 = p.s1, p.s2, p.sigma1, p.sigma2
    d = k - b
    den = [(g1, [("ch", d * s2)]), (g2, [("sh", d * s2)])]
    if x <= b:
        return _ratio([(g1, [("exp", -(b - x) * s1)])], den)
    return _ratio([(g1, [("ch", (x - b) * s2)]), (g2, [("sh", (x - b) * s2)])], den)


def limit_passage_down(p: DiffusionLimitParams, x: float, b: float, r: float) -> float:
    if r > min(x, b):
        raise GeometryError(f"need r <= min(x, b); got r={r}, x={x}, b={b}")
    s1, s2, g1, g2 = p.s1, p.s2, p.sigma1, p.sigma2
    den = [(g1, [("sh", (b - r) * s1)]), (g2, [("ch", (b - r) * s1)])]
    if x >= b:
        return _ratio([(g2, [("exp", -(x - b) * s2)])], den)
    return _ratio([(g1, [("sh", (b - x) * s1)]), (g2, [("ch", (b - x) * s1)])], den)


def limit_exit_interval(p: DiffusionLimitParams, x: float, b: float) -> tuple[float, float]:
    """Limits of the lower- and upper-exit transforms from ``[0, 1]``."""
    if not (0 < x < 1 and 0 < b < 1):
        raise GeometryError(f"need x, b in (0, 1); got x={x}, b={b}")
    s1, s2, g1, g2 = p.s1, p.s2, p.sigma1, p.sigma2
    bb = 1.0 - b
    den = [
        (g1, [("sh", b * s1), ("ch", bb * s2)]),
        (g2, [("sh", bb * s2), ("ch", b * s1)]),
    ]
    if x <= b:
        down = _ratio(
            [(g1, [("sh", (b - x) * s1), ("ch", bb * s2)]),
             (g2, [("sh", bb * s2), ("ch", (b - x) * s1)])],
            den,
        )
        up = _ratio([(g1, [("sh", x * s1)])], den)
    else:
        up = _ratio(
            [(g1, [("sh", b * s1), ("ch", (x - b) * s2)]),
             (g2, [("sh", (x - b) * s2), ("ch", b * s1)])],
            den,
        )
        down = _ratio([(g2, [("sh", (1.0 - x) * s2)])], den)
    return down, up


def limit_resolvent(sigma: float, s: float, x: float) -> float:
    si = math.sqrt(2.0 * s) / sigma
    return 2.0 / (sigma * math.sqrt(2.0 * s)) * sh(max(x, 0.0) * si)


def limit_kernel(p: DiffusionLimitParams, x: float, u: float) -> float:
    s1, s2, g1, g2 = p.s1, p.s2, p.sigma1, p.sigma2
    root = math.sqrt(2.0 * p.s)
    if x <= 0:
        return 2.0 / (g2 * root) * sh(max(x + u, 0.0) * s2)
    return 2.0 / (g2**2 * root) * (g1 * sh(x * s1) * ch(u * s2) + g2 * sh(u * s2) * ch(x * s1))


def limit_k_frak(p: DiffusionLimitParams, x: float, u: float) -> float:
    s1, s2 = p.s1, p.s2
    if x <= 0:
        return ch(max(x + u, 0.0) * s2)
    return p.sigma1 / p.sigma2 * sh(x * s1) * sh(u * s2) + ch(u * s2) * ch(x * s1)


def limit_f_kernel(p: DiffusionLimitParams, u: float) -> float:
    g1, g2, s2 = p.sigma1, p.sigma2, p.s2
    return g1 / g2**2 * (g1 * ch(u * s2) + g2 * sh(u * s2))


def limit_c_factor(p: DiffusionLimitParams, x: float) -> float:
    if x <= 0:
        return math.exp(x * p.s2)
    return p.sigma1 / p.sigma2 * sh(x * p.s1) + ch(x * p.s1)


@dataclass(frozen=True)
class StudyGeometry:
    """Unscaled arguments; every level is multiplied by ``B`` in the finite-B model."""

    b: float = 0.5
    x_below: float = 0.3
    x_above: float = 0.7
    k: float = 1.0
    r: float = 0.0
    x_resolvent: float = 1.0
    x_kernel_neg: float = -0.2
    x_kernel_pos: float = 0.3
    u: float = 0.4


@dataclass(frozen=True)
class ConvergenceRow:
    functional: str
    B: float
    finite_value: float
    limit_value: float
    abs_err: float


def _finite_and_limit(model: OscillatingModel, g: StudyGeometry, s: float, B: float):
    sb = s / B**2
    p = DiffusionLimitParams.from_model(model, s)
    mB = model.with_level(g.b * B)
    r1 = resolvent_handle(model.comp1, sb)
    r2 = resolvent_handle(model.comp2, sb)
    h = KernelHandle(mB, sb)
    xr, u = g.x_resolvent, g.u
    out = [
        ("resolvent_1", r1(xr * B) / B, limit_resolvent(p.sigma1, s, xr)),
        ("resolvent_2", r2(xr * B) / B, limit_resolvent(p.sigma2, s, xr)),
        ("cramer_1", B * r1.c, p.s1),
        ("cramer_2", B * r2.c, p.s2),
    ]
    for tag, x in (("neg", g.x_kernel_neg), ("pos", g.x_kernel_pos)):
        out += [
            (f"kernel_{tag}", h.k_kernel(x * B, u * B) / B, limit_kernel(p, x, u)),
            (f"k_frak_{tag}", h.k_frak(x * B, u * B, 0.0).real, limit_k_frak(p, x, u)),
            (f"c_factor_{tag}", r1.c_factor(r2.c, x * B).real, limit_c_factor(p, x)),
        ]
    out.append(("f_kernel", h.f_kernel(u * B), limit_f_kernel(p, u)))
    for tag, x in (("below", g.x_below), ("above", g.x_above)):
        out.append((
            f"cross_up_{tag}",
            osc_cross_up_lt(mB, x * B, g.k * B, 0.0, sb),
            limit_cross_up(p, x, g.b, g.k),
        ))
        out.append((
            f"passage_down_{tag}",
            osc_passage_down_lt(mB, x * B, g.r * B, sb),
            limit_passage_down(p, x, g.b, g.r),
        ))
        down, up = osc_exit_interval_lt(mB, x * B, B, 0.0, sb)
        ld, lu = limit_exit_interval(p, x, g.b)
        out.append((f"exit_down_{tag}", down, ld))
        out.append((f"exit_up_{tag}", up, lu))
    return out


def convergence_study(
    model: OscillatingModel,
    geometry: StudyGeometry = StudyGeometry(),
    s: float = 1.0,
    B_list: Sequence[float] = (10.0, 50.0, 250.0),
) -> list[ConvergenceRow]:
    for i, comp in enumerate((model.comp1, model.comp2), 1):
        if abs(comp.mean_rate) > 1e-12:
            raise ValueError(f"component {i} has mean rate {comp.mean_rate}, need 0")
    if list(B_list) != sorted(B_list) or len(set(B_list)) != len(B_list):
        raise ValueError("B_list must be strictly increasing")
    by_name: dict[str, list[ConvergenceRow]] = {}
    for B in B_list:
        for name, fin, lim in _finite_and_limit(model, geometry, s, float(B)):
            row = ConvergenceRow(name, float(B), float(fin), float(lim), abs(float(fin) - lim))
            by_name.setdefault(name, []).append(row)
    return [row for rows in by_name.values() for row in rows]


def convergence_violations(rows: Iterable[ConvergenceRow], slack: float = 0.10) -> list[str]:
    """Functionals whose error grows by more than ``slack`` after the first B,
    or is not smaller at the largest B than at the smallest."""
    by_name: dict[str, list[ConvergenceRow]] = {}
    for row in rows:
        by_name.setdefault(row.functional, []).append(row)
    bad = []
    for name, rs in by_name.items():
        errs = [r.abs_err for r in sorted(rs, key=lambda r: r.B)]
        grows = any(errs[i] > (1.0 + slack) * errs[i - 1] for i in range(1, len(errs)))
        if grows or (len(errs) > 1 and not errs[-1] < errs[0]):
            bad.append(name)
    return bad


def write_convergence_csv(path, rows: Sequence[ConvergenceRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["functional", "B", "finite_value", "limit_value", "abs_err"])
        for r in rows:
            w.writerow([r.functional] + [f"{v:.17g}" for v in
                                        (r.B, r.finite_value, r.limit_value, r.abs_err)])


def rows_as_dicts(rows: Sequence[ConvergenceRow]) -> list[dict]:
    return [asdict(r) for r in rows]
