"""Laplace transforms of exit functionals.

Single components (starting at 0 unless noted):

* ``passage_down_lt``:   E exp(-s tau^-(x)), first passage of level -x.
* ``cross_up_lt``:       E exp(-s tau^+(x) - z T^+(x)), crossing above x with overshoot.
* ``exit_interval_lt``:  exit of x + xi from [0, d] through either side.

Oscillating process ``xi(x, t)`` switching at ``model.b``:

* ``osc_passage_down_lt``:   E exp(-s tau), tau the first time at or below r.
* ``osc_cross_up_lt``:       E exp(-s tau - z overshoot) for the crossing above k.
* ``osc_exit_interval_lt``:  exit from [0, B], split by side.

The ``homogeneous_*`` functions are the closed forms for ``comp1 == comp2``
and depend on the resolvent alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .levy import Component, OscillatingModel
from .scale import kernel_handle, resolvent_handle


class GeometryError(ValueError):
    pass


def _check_s(s):
    if not s > 0:
        raise ValueError(f"transform variable s must be positive, got {s}")


# Below this the near-double pole of 1/(k - s) at 0 makes the kernels
# ill-conditioned (relative error grows like 1e-16 / s); use the diffusion limits.
MIN_KERNEL_S = 1e-6


def _check_kernel_s(s):
    if not s >= MIN_KERNEL_S:
        raise ValueError(
            f"s={s} is below {MIN_KERNEL_S:g}; small-s values of the oscillating "
            "functionals come from the diffusion limits in oscexit.asymptotics"
        )


def _real_if_real(z, value):
    return float(np.real(value)) if np.imag(z) == 0 else complex(value)


def passage_down_lt(comp: Component, x: float, s: float) -> float:
    if x < 0:
        raise GeometryError(f"passage level depth must be >= 0, got {x}")
    _check_s(s)
    return float(np.exp(-x * resolvent_handle(comp, s).c))


def cross_up_lt(comp: Component, x: float, z, s: float):
    if x < 0:
        raise GeometryError(f"crossing level must be >= 0, got {x}")
    _check_s(s)
    # C^x(z) - R(x) (k(z)-s)/(z-c), with the exp(c x) terms cancelled exactly
    return _real_if_real(z, resolvent_handle(comp, s).crossing(z, x))


def exit_interval_lt(comp: Component, x: float, d: float, z, s: float):
    """``(lower-exit transform, upper-exit transform with overshoot)``."""
    if not 0 <= x <= d or d <= 0:
        raise GeometryError(f"need 0 <= x <= d, d > 0; got x={x}, d={d}")
    _check_s(s)
    r = resolvent_handle(comp, s)
    ratio = r(d - x) / r(d)
    up = cross_up_lt(comp, d - x, z, s) - ratio * cross_up_lt(comp, d, z, s)
    return float(ratio), up


def osc_passage_down_lt(model: OscillatingModel, x: float, r: float, s: float) -> float:
    b = model.b
    if r > min(x, b):
        raise GeometryError(f"need r <= min(x, b); got r={r}, x={x}, b={b}")
    _check_s(s)
    r1 = resolvent_handle(model.comp1, s)
    c2 = resolvent_handle(model.comp2, s).c
    return float(np.real(r1.c_factor(c2, b - x) / r1.c_factor(c2, b - r)))


def osc_cross_up_lt(model: OscillatingModel, x: float, k: float, z, s: float):
    """Crossing above ``k``: ``KF_{b-x}^{d2}(z) - K_{b-x}(d2)/F(d2) FF^{d2}(z)``, ``d2 = k - b``.

    Evaluated by :meth:`KernelHandle.crossing`, which keeps every term bounded;
    at ``z = 0`` this is the ``1 + s int R1 + s int K - ratio (s/c1 + s int F)``
    expression with its growing parts cancelled in closed form.
    """
    b = model.b
    if k < max(x, b):
        raise GeometryError(f"need k >= max(x, b); got k={k}, x={x}, b={b}")
    _check_kernel_s(s)
    val = kernel_handle(model, s).crossing(b - x, k - b, z)
    return _real_if_real(z, val)


def osc_exit_interval_lt(model: OscillatingModel, x: float, B: float, z, s: float):
    """``(down, up)`` for the exit from ``[0, B]``.

    ``down = K_{b-x}(B-b) / K_b(B-b)``, taken from the mode split so that the
    common ``exp(c1 b + c2 (B-b))`` growth never has to be represented. The upper part
    ``KF_{b-x} - down KF_b`` is rearranged, by adding and subtracting the
    F-terms, into ``U(x) - down U(0)`` where ``U`` is the crossing above ``B``.
    """
    b = model.b
    if not (0 <= x <= B and 0 <= b <= B):
        raise GeometryError(f"need x, b in [0, B]; got x={x}, b={b}, B={B}")
    _check_kernel_s(s)
    h = kernel_handle(model, s)
    d2 = B - b
    down = h.kernel_ratio(b - x, b, d2)
    up = h.crossing(b - x, d2, z) - down * h.crossing(b, d2, z)
    return float(down), _real_if_real(z, up)


def osc_exit_interval_direct(model: OscillatingModel, x: float, B: float, z, s: float):
    """The exit pair straight from ``KF_{b-x} - down KF_b``.

    Loses accuracy once ``exp(c(s) B)`` is large; kept as a cross-check.
    """
    b = model.b
    h = kernel_handle(model, s)
    d2 = B - b
    down = h.k_kernel(b - x, d2) / h.k_kernel(b, d2)
    up = h.k_frak(b - x, d2, z) - down * h.k_frak(b, d2, z)
    return float(down), _real_if_real(z, up)


def osc_cross_up_direct(model: OscillatingModel, x: float, k: float, z, s: float):
    """The crossing transform straight from the kernel integrals (cross-check)."""
    b = model.b
    h = kernel_handle(model, s)
    d2 = k - b
    ratio = h.k_kernel(b - x, d2) / h.f_kernel(d2)
    if complex(z) == 0:
        val = (
            1.0
            + s * h.r1.integral(b - x).real
            + s * h.kernel_integral(b - x, d2).real
            - ratio * (s / h.c1 + s * h.f_integral(d2).real)
        )
        return float(val)
    return _real_if_real(z, h.k_frak(b - x, d2, z) - ratio * h.f_frak(d2, z))


def homogeneous_passage_down(comp: Component, x: float, r: float, s: float) -> float:
    return float(np.exp(-(x - r) * resolvent_handle(comp, s).c))


def homogeneous_cross_up(comp: Component, x: float, k: float, z, s: float):
    """``C^{k-x}(z) - R(k-x) (k(z)-s)/(z-c)`` from the resolvent residues."""
    return _real_if_real(z, resolvent_handle(comp, s).crossing(z, k - x))


def homogeneous_exit_interval(comp: Component, x: float, B: float, z, s: float):
    """``R(B-x)/R(B)`` and ``C^{B-x}(z) - R(B-x)/R(B) C^B(z)``.

    The ``exp(c y)`` parts of the two C-factors are matched with the resolvent
    ratio term by term, which keeps large ``c(s) B`` accurate.
    """
    r = resolvent_handle(comp, s)
    ratio = r(B - x) / r(B)
    # the R-multiples of (k(z)-s)/(z-c) cancel since ratio R(B) = R(B-x)
    up = r.crossing(z, B - x) - ratio * r.crossing(z, B)
    return float(ratio), _real_if_real(z, up)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    abs_err: float


def pecherskii_rogozin_rhs(comp: Component, z, s: float, p: float):
    r = resolvent_handle(comp, s)
    c = r.c
    kp = comp.exponent(p) - s
    return (1.0 - (p - c) / kp * r.deflated(z, 0)) / (p - z)


def verify_pecherskii_rogozin(
    comp: Component, z, s: float, p: float, x_max: float | None = None, tail_tol: float = 1e-10
) -> IdentityCheck:
    """Level transform of the crossing functional: quadrature versus closed form.

    The integrand is bounded by ``exp(-p x)``, so ``x_max`` must make that tail
    smaller than ``tail_tol``.
    """
    _check_s(s)
    c = resolvent_handle(comp, s).c
    if not p > c:
        raise ValueError(f"need p > c(s) = {c}, got p={p}")
    if p == z:
        raise ValueError("p must differ from z")
    if x_max is None:
        x_max = np.log(1.0 / tail_tol) / p
    tail = np.exp(-p * x_max) / p
    if tail > tail_tol:
        raise ValueError(f"x_max={x_max} leaves a tail bound {tail:.3g} > {tail_tol:.3g}")

    def integrand(x, part):
        v = np.exp(-p * x) * cross_up_lt(comp, x, z, s)
        return np.real(v) if part == 0 else np.imag(v)

    re = integrate.quad(integrand, 0.0, x_max, args=(0,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    im = 0.0
    if np.imag(z) != 0:
        im = integrate.quad(integrand, 0.0, x_max, args=(1,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    lhs = re + 1j * im
    rhs = complex(pecherskii_rogozin_rhs(comp, z, s, p))
    return IdentityCheck(lhs, rhs, float(abs(lhs - rhs)))
