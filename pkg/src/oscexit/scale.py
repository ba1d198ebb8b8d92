"""Resolvents (scale functions) and the kernels of the oscillating process.

The resolvent ``R`` of a component is defined by
``int_0^inf exp(-x z) R(x) dx = 1 / (k(z) - s)`` and vanishes for ``x < 0``.
For phase-type jumps ``1/(k - s) = D / P`` is rational, so ``R`` is a finite sum
``sum_j A_j exp(rho_j x)`` over the roots of ``P``. The same residues give

    C^x(z) = exp(zx) (1 - (k(z) - s) int_0^x exp(-uz) R(u) du)
           = sum_j A_j exp(rho_j x) (k(z) - s) / (z - rho_j),        x >= 0,

where each ratio ``(k(z) - s)/(z - rho_j)`` is a deflated polynomial over ``D``.
That form has no removable singularities and no ``exp(zx)`` cancellation, so it
is also safe on inversion contours.

The kernels ``K_x(u)`` and ``F(u)`` of the oscillating process are recovered by
contour inversion of their rational transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as npoly

from .inversion import DEFAULT_CONFIG, InversionConfig, invert_grid
from .levy import Component, OscillatingModel, roots_sorted

GAUSS_POINTS = 64
_GL_X, _GL_W = legendre.leggauss(GAUSS_POINTS)


def _exprel(w, x):
    """``(exp(w x) - 1) / w``, continuous through ``w = 0``."""
    w = np.asarray(w, dtype=complex)
    wx = w * x
    small = np.abs(wx) < 1e-8
    safe = np.where(small, 1.0, w)
    return np.where(small, x * (1.0 + 0.5 * wx), np.expm1(wx) / safe)


def _deflate(coeffs, root):
    """Quotient of the ascending-coefficient polynomial by ``(z - root)``; the
    remainder is dropped (the caller guarantees ``root`` is a zero)."""
    desc = np.asarray(coeffs, dtype=complex)[::-1]
    if len(desc) < 2:
        return np.zeros(1, dtype=complex)
    out = [desc[0]]
    for c in desc[1:-1]:
        out.append(c + root * out[-1])
    return np.array(out[::-1])


def _initial_value(num, den):
    """``lim z num(z)/den(z)`` as ``z -> oo``: the value at ``0+`` of the inverse."""
    num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
    den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
    if len(num) == len(den) - 1:
        return float(np.real(num[-1] / den[-1]))
    return 0.0


def gauss_nodes(lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (hi - lo)
    return lo + half * (_GL_X + 1.0), half * _GL_W


@dataclass
class Resolvent:
    """Resolvent of one component at fixed ``s > 0``.

    ``method="exact"`` evaluates the partial-fraction sum; ``"inversion"`` inverts
    ``1/(k - s)`` on a contour right of ``c(s)`` instead.
    """

    comp: Component
    s: float
    method: str = "exact"
    cfg: InversionConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"resolvent needs s > 0, got {self.s}")
        if self.method not in ("exact", "inversion"):
            raise ValueError(f"unknown resolvent method {self.method!r}")
        self.c = self.comp.cramer_root(self.s)
        self.P, self.D = self.comp.shifted_polys(self.s)
        self.lead = self.P[-1]
        rho = roots_sorted(self.P).astype(complex)
        dP = npoly.polyder(self.P)
        for _ in range(3):
            rho = rho - npoly.polyval(rho, self.P) / npoly.polyval(rho, dP)
        i0 = int(np.argmin(np.abs(rho - self.c)))
        rho[i0] = self.c
        rho = np.concatenate([rho[i0 : i0 + 1], np.delete(rho, i0)])
        gaps = np.abs(rho[:, None] - rho[None, :]) + np.eye(len(rho))
        if np.min(gaps) < 1e-10 * max(1.0, np.max(np.abs(rho))):
            raise ValueError(f"repeated poles of 1/(k(z)-s) at s={self.s}: {rho}")
        self.poles = rho
        self.residues = npoly.polyval(rho, self.D) / npoly.polyval(rho, dP)
        self.residues[0] = 1.0 / self.comp.exponent_prime(self.c)

    @property
    def abscissa(self) -> float:
        return self.c

    def shifted_exponent(self, z):
        """``k(z) - s`` as a rational function (valid off the LST half-plane too)."""
        return npoly.polyval(z, self.P) / npoly.polyval(z, self.D)

    def inverse_transform(self, z):
        return npoly.polyval(z, self.D) / npoly.polyval(z, self.P)

    def deflated(self, z, j: int = 0):
        """``(k(z) - s) / (z - rho_j)``; ``j = 0`` is the Cramer root."""
        z = np.asarray(z, dtype=complex)
        num = np.full(z.shape, self.lead, dtype=complex)
        for i, r in enumerate(self.poles):
            if i != j:
                num = num * (z - r)
        return num / npoly.polyval(z, self.D)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.method == "inversion":
            flat = np.atleast_1d(x)
            out = np.zeros(flat.shape)
            pos = flat > 0
            out[flat == 0] = 1.0 / self.comp.a
            if np.any(pos):
                out[pos] = invert_grid(self.inverse_transform, self.c, flat[pos], self.cfg)
            return out.reshape(x.shape) if x.ndim else float(out[0])
        xx = np.maximum(x, 0.0)[..., None]
        val = np.real(np.sum(self.residues * np.exp(self.poles * xx), axis=-1))
        val = np.where(x < 0, 0.0, val)
        return val if x.ndim else float(val)

    def integral(self, x: float, z=0.0):
        """``int_0^x exp(-u z) R(u) du`` from the exponential sum; 0 for ``x <= 0``."""
        z = np.asarray(z, dtype=complex)
        if x <= 0:
            return np.zeros(z.shape, dtype=complex) if z.ndim else 0.0 + 0.0j
        w = self.poles - z[..., None]
        val = np.sum(self.residues * _exprel(w, x), axis=-1)
        return val if z.ndim else complex(val)

    def c_factor(self, z, x: float):
        """``C^x(z, s)``; equals ``exp(zx)`` for ``x < 0``."""
        z = np.asarray(z, dtype=complex)
        if x < 0:
            out = np.exp(z * x)
        else:
            out = np.zeros(z.shape, dtype=complex)
            for j, (a_j, r) in enumerate(zip(self.residues, self.poles)):
                out = out + a_j * np.exp(r * x) * self.deflated(z, j)
        return out if z.ndim else complex(out)

    def tail(self, x):
        """``R(x) - A_0 exp(c x)``: the part of the resolvent that does not grow."""
        x = np.asarray(x, dtype=float)
        xx = x[..., None]
        val = np.real(np.sum(self.residues[1:] * np.exp(self.poles[1:] * xx), axis=-1))
        return val if x.ndim else float(val)

    def c_factor_tail(self, z, x: float):
        """``C^x(z)`` without its ``exp(c x)`` mode, for ``x >= 0``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for j in range(1, len(self.poles)):
            out = out + self.residues[j] * np.exp(self.poles[j] * x) * self.deflated(z, j)
        return out if z.ndim else complex(out)

    def crossing(self, z, x: float):
        """``C^x(z) - R(x) (k(z) - s)/(z - c)`` with the growing mode cancelled exactly."""
        z = np.asarray(z, dtype=complex)
        q0 = self.deflated(z, 0)
        out = np.zeros(z.shape, dtype=complex)
        for j in range(1, len(self.poles)):
            out = out + self.residues[j] * np.exp(self.poles[j] * x) * (self.deflated(z, j) - q0)
        return out if z.ndim else complex(out)

    def c_factor_direct(self, z, x: float):
        """``C^x(z, s)`` from the defining expression; used as a cross-check."""
        if x < 0:
            return np.exp(z * x)
        return np.exp(z * x) * (1.0 - self.shifted_exponent(z) * self.integral(x, z))


@dataclass
class KernelHandle:
    """``K_x(u)``, ``F(u)`` and the derived functions for one model at fixed ``s``.

    Transforms (Re z right of both Cramer roots)::

        KK_x(z) = (k1 - s)/(k2 - s) int_0^inf exp(-uz) R1(x + u) du = C1^x(z) / (k2(z) - s)
        FF(z)   = (k1 - s) / ((z - c1)(k2 - s))
    """

    model: OscillatingModel
    s: float
    cfg: InversionConfig = field(default=DEFAULT_CONFIG)
    short_circuit: bool = True

    def __post_init__(self):
        self.r1 = resolvent_handle(self.model.comp1, self.s)
        self.r2 = resolvent_handle(self.model.comp2, self.s)
        self.abscissa = max(self.r1.c, self.r2.c)
        self._cache: dict = {}
        self._split_modes()

    def _split_modes(self):
        # K_x = sum_j A_j exp(rho_j x) K_j with KK_j = q1_j / (k2 - s); F is K_0.
        # Each K_j(u) = kappa_j exp(c2 u) + (decaying remainder).
        r1, r2 = self.r1, self.r2
        p2_rest = r2.lead * npoly.polyfromroots(r2.poles[1:]) if len(r2.poles) > 1 else np.array([r2.lead])
        den = npoly.polymul(r1.D, p2_rest)
        kappa, nums = [], []
        for j in range(len(r1.poles)):
            others = np.delete(r1.poles, j)
            num = r1.lead * npoly.polymul(npoly.polyfromroots(others) if len(others) else [1.0], r2.D)
            k_j = npoly.polyval(r2.c, num) / npoly.polyval(r2.c, den)
            rest = npoly.polysub(num, k_j * den)
            kappa.append(k_j)
            nums.append(_deflate(rest, r2.c))
        self.kappa = np.array(kappa, dtype=complex)
        self._tail_nums = nums
        self._tail_den = den
        sing = [r.real for r in roots_sorted(r1.D)] + [r.real for r in r2.poles[1:]]
        self._tail_abscissa = max(sing, default=-1.0)

    def mode_tail_transform(self, j: int, z):
        return npoly.polyval(z, self._tail_nums[j]) / npoly.polyval(z, self._tail_den)

    def mode_tail(self, j: int, u):
        """``K_j(u) - kappa_j exp(c2 u)``, by inversion of the deflated transform."""
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        out = invert_grid(lambda z: self.mode_tail_transform(j, z), self._tail_abscissa, flat, self.cfg)
        out = np.where(flat == 0, _initial_value(self._tail_nums[j], self._tail_den), out)
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def mode_kernel(self, x: float, u):
        """``K_x(u)`` for ``x >= 0`` rebuilt from the mode split."""
        u = np.asarray(u, dtype=float)
        parts = [
            self.r1.residues[j] * np.exp(self.r1.poles[j] * x)
            * (self.kappa[j] * np.exp(self.c2 * u) + self.mode_tail(j, u))
            for j in range(len(self.kappa))
        ]
        return np.real(sum(parts))

    def scaled_kernel(self, x: float, d: float) -> tuple[float, float]:
        """``(m, e)`` with ``K_x(d) = m exp(e)``, from the mode split."""
        if d < 0:
            raise ValueError("scaled_kernel needs d >= 0")
        damp = np.exp(-self.c2 * d)
        if x < 0:
            r2 = self.r2
            m = r2.residues[0] * np.exp(r2.c * x) + r2.tail(x + d) * damp if x + d >= 0 else 0.0
            return float(np.real(m)), self.c2 * d
        r1 = self.r1
        m = 0.0j
        for j in range(len(self.kappa)):
            m += r1.residues[j] * np.exp((r1.poles[j] - r1.c) * x) * (
                self.kappa[j] + self.mode_tail(j, d) * damp
            )
        return float(np.real(m)), self.c2 * d + r1.c * x

    def kernel_ratio(self, x: float, y: float, d: float) -> float:
        """``K_x(d) / K_y(d)`` without forming either kernel."""
        mx, ex = self.scaled_kernel(x, d)
        my, ey = self.scaled_kernel(y, d)
        return mx / my * float(np.exp(ex - ey))

    def _tail_on_nodes(self, j: int, hi: float):
        key = ("T", j, hi)
        if key not in self._cache:
            v, w = gauss_nodes(0.0, hi)
            self._cache[key] = (v, w, self.mode_tail(j, v))
        return self._cache[key]

    def _tail_frak(self, j: int, d: float, z):
        z = complex(z)
        inner = self.mode_tail_transform(j, z)
        if d > 0:
            v, w, tv = self._tail_on_nodes(j, d)
            inner = inner - np.sum(w * tv * np.exp(-z * v))
        return np.exp(d * z) * self.r2.shifted_exponent(z) * inner

    def _against_f(self, g0, g_tail, g_frak, d: float, z):
        # G-frak - G(d)/F(d) * F-frak with the exp(c2 d) mode cancelled analytically
        f0 = self.kappa[0]
        f_tail = self.mode_tail(0, d)
        damp = np.exp(-self.c2 * d)
        f_scaled = f0 + f_tail * damp
        ratio = (g0 + g_tail * damp) / f_scaled
        lead = self.r2.deflated(z, 0) * (g0 * f_tail - f0 * g_tail) / f_scaled
        return lead + g_frak - ratio * self._tail_frak(0, d, z)

    def crossing(self, x: float, d: float, z=0.0) -> complex:
        """``KF_x^d(z) - K_x(d) / F(d) * FF^d(z)``, evaluated without cancellation.

        The ``j = 0`` component of ``K_x`` is proportional to ``F`` and drops out
        exactly; the ``exp(c2 u)`` mode of every other component is handled in
        closed form, so no term grows with ``c1 x`` or ``c2 d``.
        """
        if d < 0:
            raise ValueError("crossing needs d >= 0")
        z = complex(z)
        if x < 0:
            w = x + d
            if w < 0:
                raise ValueError("crossing needs x + d >= 0")
            r2 = self.r2
            g0 = r2.residues[0] * np.exp(r2.c * x)
            return complex(self._against_f(g0, r2.tail(w), r2.c_factor_tail(z, w), d, z))
        total = 0.0j
        for j in range(1, len(self.kappa)):
            weight = self.r1.residues[j] * np.exp(self.r1.poles[j] * x)
            total += weight * self._against_f(
                self.kappa[j], self.mode_tail(j, d), self._tail_frak(j, d, z), d, z
            )
        return complex(total)

    @property
    def c1(self) -> float:
        return self.r1.c

    @property
    def c2(self) -> float:
        return self.r2.c

    def k_transform(self, z, x: float):
        z = np.asarray(z, dtype=complex)
        return self.r1.c_factor(z, x) / self.r2.shifted_exponent(z)

    def f_transform(self, z):
        return self.r1.deflated(z, 0) / self.r2.shifted_exponent(z)

    def k_kernel(self, x: float, u):
        """``K_x(u)`` for ``u >= 0``; ``K_x(u) = R2(x + u)`` when ``x <= 0``."""
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        if np.any(flat < 0):
            raise ValueError("k_kernel needs u >= 0")
        if x <= 0:
            if self.short_circuit:
                out = self.r2(x + flat)
            else:
                # exp(xz) is a pure delay: invert 1/(k2 - s) at the shifted argument
                out = invert_grid(self.r2.inverse_transform, self.r2.c, x + flat, self.cfg)
                out = np.where(x + flat == 0, 1.0 / self.model.comp2.a, out)
        else:
            out = np.empty(flat.shape)
            zero = flat == 0
            out[zero] = self.model.comp1.a * self.r1(x) / self.model.comp2.a
            if np.any(~zero):
                out[~zero] = invert_grid(
                    lambda z: self.k_transform(z, x), self.abscissa, flat[~zero], self.cfg
                )
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def f_kernel(self, u):
        u = np.asarray(u, dtype=float)
        flat = np.atleast_1d(u)
        if np.any(flat < 0):
            raise ValueError("f_kernel needs u >= 0")
        out = np.empty(flat.shape)
        zero = flat == 0
        out[zero] = self.model.comp1.a / self.model.comp2.a
        if np.any(~zero):
            out[~zero] = invert_grid(self.f_transform, self.abscissa, flat[~zero], self.cfg)
        return out.reshape(u.shape) if u.ndim else float(out[0])

    def _k_on_nodes(self, x: float, lo: float, hi: float):
        key = ("K", x, lo, hi)
        if key not in self._cache:
            v, w = gauss_nodes(lo, hi)
            self._cache[key] = (v, w, self.k_kernel(x, v))
        return self._cache[key]

    def _f_on_nodes(self, hi: float):
        key = ("F", hi)
        if key not in self._cache:
            v, w = gauss_nodes(0.0, hi)
            self._cache[key] = (v, w, self.f_kernel(v))
        return self._cache[key]

    def kernel_integral(self, x: float, u: float, z=0.0):
        """``int_0^u exp(-vz) K_x(v) dv``."""
        z = np.asarray(z, dtype=complex)
        if u <= 0:
            return np.zeros(z.shape, dtype=complex) if z.ndim else 0.0j
        if x <= 0:
            # K_x(v) = R2(x + v) vanishes for v < -x
            val = np.exp(x * z) * self.r2.integral(x + u, z)
        else:
            v, w, kv = self._k_on_nodes(x, 0.0, u)
            val = np.sum(w * kv * np.exp(-np.multiply.outer(z, v)), axis=-1)
        return val if z.ndim else complex(val)

    def f_integral(self, u: float, z=0.0):
        """``int_0^u exp(-vz) F(v) dv``."""
        z = np.asarray(z, dtype=complex)
        if u <= 0:
            return np.zeros(z.shape, dtype=complex) if z.ndim else 0.0j
        v, w, fv = self._f_on_nodes(u)
        val = np.sum(w * fv * np.exp(-np.multiply.outer(z, v)), axis=-1)
        return val if z.ndim else complex(val)

    def k_frak(self, x: float, u: float, z=0.0):
        """``exp(uz) (C1^x(z) - (k2(z) - s) int_0^u exp(-vz) K_x(v) dv)``.

        At ``z = 0`` this is ``1 + s int_0^x R1 + s int_0^u K_x``.
        """
        if u < 0:
            raise ValueError("k_frak needs u >= 0")
        z = complex(z)
        if z == 0:
            return complex(
                1.0 + self.s * self.r1.integral(x).real + self.s * self.kernel_integral(x, u).real
            )
        return np.exp(u * z) * (
            self.r1.c_factor(z, x) - self.r2.shifted_exponent(z) * self.kernel_integral(x, u, z)
        )

    def f_frak(self, u: float, z=0.0):
        """``exp(uz) (k2(z) - s) (FF(z) - int_0^u exp(-vz) F(v) dv)``.

        ``(k2 - s) FF = (k1 - s)/(z - c1)`` is taken in deflated form, so the
        value at ``z = 0`` is ``s/c1 + s int_0^u F``.
        """
        z = complex(z)
        if z == 0:
            return complex(self.s / self.c1 + self.s * self.f_integral(u).real)
        return np.exp(u * z) * (
            self.r1.deflated(z, 0) - self.r2.shifted_exponent(z) * self.f_integral(u, z)
        )


@lru_cache(maxsize=512)
def resolvent_handle(comp: Component, s: float) -> Resolvent:
    return Resolvent(comp, float(s))


@lru_cache(maxsize=256)
def kernel_handle(model: OscillatingModel, s: float) -> KernelHandle:
    return KernelHandle(model, float(s))


def resolvent(comp: Component, s: float, x):
    return resolvent_handle(comp, s)(x)


def c_factor(comp: Component, s: float, z, x: float):
    return resolvent_handle(comp, s).c_factor(z, x)
