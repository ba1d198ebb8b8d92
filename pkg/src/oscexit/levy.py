"""Spectrally positive compound Poisson components and their Laplace exponents.

A component is ``xi(t) = sum of jumps - a t`` with Poisson(``lam``) jump times.
Its exponent ``k(z) = a z + lam (phi(z) - 1)`` satisfies ``E exp(-z xi(t)) = exp(t k(z))``,
where ``phi`` is the Laplace-Stieltjes transform of the jump law.

All supported jump laws have rational transforms ``phi = N / D``, so
``k(z) - s = P(z) / D(z)`` with ``P(z) = (a z - s) D(z) + lam (N(z) - D(z))``.
The polynomial pair ``(P, D)`` is what the scale-function code works with.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly


class DomainError(ValueError):
    """A transform was evaluated outside its half-plane of analyticity."""


class RootFindingError(RuntimeError):
    pass


@dataclass(frozen=True)
class JumpLaw:
    """Base class for positive jump distributions with rational LST."""

    def lst(self, z):
        raise NotImplementedError

    @property
    def m1(self) -> float:
        raise NotImplementedError

    @property
    def m2(self) -> float:
        raise NotImplementedError

    @property
    def abscissa(self) -> float:
        """``phi`` is analytic for ``Re(z) > abscissa``."""
        raise NotImplementedError

    def lst_polys(self) -> tuple[np.ndarray, np.ndarray]:
        """Numerator and denominator of ``phi`` (ascending coefficients)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(JumpLaw):
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"exponential rate must be positive, got {self.mu}")

    def lst(self, z):
        return self.mu / (self.mu + z)

    @property
    def m1(self):
        return 1.0 / self.mu

    @property
    def m2(self):
        return 2.0 / self.mu**2

    @property
    def abscissa(self):
        return -self.mu

    def lst_polys(self):
        return np.array([self.mu]), np.array([self.mu, 1.0])

    def sample(self, rng, size):
        return rng.exponential(1.0 / self.mu, size)

    def to_dict(self):
        return {"kind": "exponential", "mu": self.mu}


@dataclass(frozen=True)
class HyperExponential(JumpLaw):
    p: tuple[float, ...]
    mu: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        object.__setattr__(self, "mu", tuple(float(v) for v in self.mu))
        if len(self.p) != len(self.mu) or not self.p:
            raise ValueError("hyperexponential needs equally many weights and rates")
        if any(w <= 0 for w in self.p) or abs(sum(self.p) - 1.0) > 1e-12:
            raise ValueError(f"weights must be positive and sum to 1, got {self.p}")
        if any(m <= 0 for m in self.mu):
            raise ValueError(f"rates must be positive, got {self.mu}")

    def lst(self, z):
        return sum(w * m / (m + z) for w, m in zip(self.p, self.mu))

    @property
    def m1(self):
        return sum(w / m for w, m in zip(self.p, self.mu))

    @property
    def m2(self):
        return sum(2.0 * w / m**2 for w, m in zip(self.p, self.mu))

    @property
    def abscissa(self):
        return -min(self.mu)

    def lst_polys(self):
        den = np.array([1.0])
        for m in self.mu:
            den = npoly.polymul(den, [m, 1.0])
        num = np.zeros(1)
        for j, (w, m) in enumerate(zip(self.p, self.mu)):
            rest = np.array([1.0])
            for i, mi in enumerate(self.mu):
                if i != j:
                    rest = npoly.polymul(rest, [mi, 1.0])
            num = npoly.polyadd(num, w * m * rest)
        return num, den

    def sample(self, rng, size):
        phase = rng.choice(len(self.p), size=size, p=self.p)
        scale = 1.0 / np.asarray(self.mu)[phase]
        return rng.exponential(1.0, size) * scale

    def to_dict(self):
        return {"kind": "hyperexponential", "p": list(self.p), "mu": list(self.mu)}


@dataclass(frozen=True)
class Erlang(JumpLaw):
    n: int
    mu: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"Erlang shape must be a positive integer, got {self.n}")
        if not self.mu > 0:
            raise ValueError(f"Erlang rate must be positive, got {self.mu}")

    def lst(self, z):
        return (self.mu / (self.mu + z)) ** self.n

    @property
    def m1(self):
        return self.n / self.mu

    @property
    def m2(self):
        return self.n * (self.n + 1) / self.mu**2

    @property
    def abscissa(self):
        return -self.mu

    def lst_polys(self):
        den = npoly.polypow([self.mu, 1.0], self.n)
        return np.array([self.mu**self.n]), den

    def sample(self, rng, size):
        return rng.gamma(self.n, 1.0 / self.mu, size)

    def to_dict(self):
        return {"kind": "erlang", "n": self.n, "mu": self.mu}


@dataclass(frozen=True)
class Component:
    """Compound Poisson process with positive jumps and downward drift ``a``."""

    a: float
    lam: float
    jumps: JumpLaw = field(default_factory=lambda: Exponential(1.0))

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"drift must be positive, got {self.a}")
        if not self.lam >= 0:
            raise ValueError(f"intensity must be non-negative, got {self.lam}")

    def exponent(self, z):
        return laplace_exponent(self, z)

    def exponent_prime(self, z):
        # phi'(z) from the rational form, so this also works off the real axis
        num, den = self.jumps.lst_polys()
        dn, dd = npoly.polyder(num), npoly.polyder(den)
        nz, dz = npoly.polyval(z, num), npoly.polyval(z, den)
        dphi = (npoly.polyval(z, dn) * dz - nz * npoly.polyval(z, dd)) / dz**2
        return self.a + self.lam * dphi

    def cramer_root(self, s: float) -> float:
        return cramer_root(self, s)

    @property
    def mean_rate(self) -> float:
        return self.lam * self.jumps.m1 - self.a

    @property
    def variance_rate(self) -> float:
        return self.lam * self.jumps.m2

    def shifted_polys(self, s: float) -> tuple[np.ndarray, np.ndarray]:
        """``(P, D)`` with ``k(z) - s = P(z) / D(z)``, ascending coefficients."""
        num, den = self.jumps.lst_polys()
        p = npoly.polymul([-s, self.a], den)
        p = npoly.polyadd(p, self.lam * npoly.polysub(num, den))
        return np.trim_zeros(p, "b"), den

    def to_dict(self) -> dict:
        return {"a": self.a, "lambda": self.lam, "jumps": self.jumps.to_dict()}


@dataclass(frozen=True)
class OscillatingModel:
    """Component 1 drives the process at or below ``b``, component 2 above it."""

    comp1: Component
    comp2: Component
    b: float

    def __post_init__(self):
        if not math.isfinite(self.b):
            raise ValueError(f"switching level must be finite, got {self.b}")

    @property
    def homogeneous(self) -> bool:
        return self.comp1 == self.comp2

    def with_level(self, b: float) -> "OscillatingModel":
        return OscillatingModel(self.comp1, self.comp2, b)

    def to_dict(self) -> dict:
        return {"comp1": self.comp1.to_dict(), "comp2": self.comp2.to_dict(), "b": self.b}


def laplace_exponent(comp: Component, z):
    """``k(z) = a z + lam (phi(z) - 1)``; scalar or array, real or complex."""
    zr = np.real(z)
    if np.any(zr <= comp.jumps.abscissa):
        raise DomainError(
            f"exponent evaluated at Re(z)={np.min(zr)} <= {comp.jumps.abscissa}"
        )
    return comp.a * z + comp.lam * (comp.jumps.lst(z) - 1.0)


def cramer_root(
    comp: Component, s: float, eps: float = 1e-12, width: float = 1e-13, max_iter: int = 400
) -> float:
    """Positive root ``c(s)`` of ``k(z) = s`` for ``s > 0``.

    Bracket ``[eps, z_hi]`` with ``z_hi`` doubled until ``k(z_hi) > s``, bisect,
    then polish with Newton steps that are only accepted inside the bracket.
    """
    if not s > 0:
        raise ValueError(f"cramer_root needs s > 0, got {s}")
    k = comp.exponent
    lo, hi = eps, 1.0
    for _ in range(max_iter):
        if k(hi) > s:
            break
        hi *= 2.0
    else:
        raise RootFindingError(f"no upper bracket for s={s}: k({hi})={k(hi)}")
    if k(lo) > s:
        # k is convex with k(0)=0, so k(lo) > s > 0 means the root is below eps
        raise RootFindingError(f"root below bracket start {eps} for s={s}")
    it = 0
    while hi - lo > width * max(1.0, hi) and it < max_iter:
        mid = 0.5 * (lo + hi)
        if k(mid) > s:
            hi = mid
        else:
            lo = mid
        it += 1
    if it >= max_iter:
        raise RootFindingError(
            f"bisection did not converge for s={s}: bracket [{lo}, {hi}], "
            f"residual {k(0.5 * (lo + hi)) - s}"
        )
    z = 0.5 * (lo + hi)
    for _ in range(4):
        step = (k(z) - s) / comp.exponent_prime(z)
        znew = z - step
        if not lo <= znew <= hi or step == 0.0:
            break
        z = znew
    return float(z)


def moment_rates(comp: Component) -> tuple[float, float]:
    """``(E xi(1), lam m2)``; the second is the variance rate."""
    return comp.mean_rate, comp.variance_rate


def jump_law_from_dict(d: dict) -> JumpLaw:
    kind = d.get("kind", "").lower()
    if kind == "exponential":
        return Exponential(float(d["mu"]))
    if kind == "hyperexponential":
        return HyperExponential(tuple(d["p"]), tuple(d["mu"]))
    if kind == "erlang":
        return Erlang(int(d["n"]), float(d["mu"]))
    raise ValueError(f"unknown jump law kind {d.get('kind')!r}")


def component_from_dict(d: dict) -> Component:
    return Component(float(d["a"]), float(d["lambda"]), jump_law_from_dict(d["jumps"]))


def model_from_dict(d: dict) -> OscillatingModel:
    return OscillatingModel(
        component_from_dict(d["comp1"]), component_from_dict(d["comp2"]), float(d["b"])
    )


def load_model(path: str | Path) -> OscillatingModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def save_model(model: OscillatingModel, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")


def roots_sorted(coeffs: Sequence[float]) -> np.ndarray:
    """Roots of an ascending-coefficient polynomial, sorted by descending real part."""
    r = npoly.polyroots(np.asarray(coeffs, dtype=float))
    return r[np.argsort(-r.real, kind="stable")]
