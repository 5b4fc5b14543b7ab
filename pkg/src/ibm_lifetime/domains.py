"""Bounded domains with closed-form Dirichlet spectra.

Generator convention: everything here is for ``(1/2) * Laplacian``, so the
principal eigenvalue of the unit interval is ``pi**2 / 2`` (not ``pi**2``).
Mixing conventions silently rescales every downstream constant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MODES = 64


@dataclass(frozen=True)
class SineFactor:
    """``sqrt(2/L) * sin(k*pi*(x - a)/L)`` on ``(a, a + L)``."""

    a: float
    length: float
    k: int

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return math.sqrt(2.0 / self.length) * np.sin(self.k * math.pi * (x - self.a) / self.length)

    @property
    def eigenvalue(self) -> float:
        return (self.k * math.pi / self.length) ** 2 / 2.0

    @property
    def integral(self) -> float:
        if self.k % 2 == 0:
            return 0.0
        return 2.0 * math.sqrt(2.0 * self.length) / (self.k * math.pi)


@dataclass(frozen=True)
class ProductEigenfunction:
    """Tensor product of per-axis sine factors.

    One-dimensional products act elementwise; otherwise points have shape (..., d).
    """

    factors: tuple[SineFactor, ...]

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if len(self.factors) == 1:
            return self.factors[0](z)
        out = np.ones(z.shape[:-1])
        for i, fac in enumerate(self.factors):
            out = out * fac(z[..., i])
        return out


@dataclass(frozen=True)
class Mode:
    eigenvalue: float
    eigenfunction: ProductEigenfunction
    integral: float


@dataclass(frozen=True)
class SpectralDomain:
    """Interval or axis-aligned box together with its leading Dirichlet modes.

    ``bounds`` holds one ``(a, b)`` pair per axis; ``modes`` is sorted by
    eigenvalue.  Instances are immutable and safe to share between workers.
    """

    kind: str
    bounds: tuple[tuple[float, float], ...]
    modes: tuple[Mode, ...] = field(repr=False)
    modes_per_axis: int = DEFAULT_MODES

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in self.bounds)

    @property
    def principal_eigenvalue(self) -> float:
        return self.modes[0].eigenvalue

    def eigenvalues(self) -> np.ndarray:
        return np.array([m.eigenvalue for m in self.modes])

    def as_point(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if z.shape != (self.dimension,):
            raise ValueError(f"point must have {self.dimension} coordinate(s), got shape {z.shape}")
        return z

    def contains(self, z) -> bool:
        z = self.as_point(z)
        return all(a < zi < b for zi, (a, b) in zip(z, self.bounds))

    def check_interior(self, z) -> np.ndarray:
        z = self.as_point(z)
        if not self.contains(z):
            raise ValueError(f"point {z.tolist()} is not strictly inside {self.bounds}")
        return z

    def to_config(self) -> dict:
        kind = "interval" if self.kind == "interval" else "box"
        bounds = list(self.bounds[0]) if kind == "interval" else [list(b) for b in self.bounds]
        return {"type": kind, "bounds": bounds, "modes": self.modes_per_axis}


def _check_side(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise ValueError(f"degenerate interval ({a}, {b}): need finite a < b")


def spectrum_interval(a: float, b: float, K: int = DEFAULT_MODES) -> SpectralDomain:
    """Dirichlet spectrum of ``(1/2) d^2/dx^2`` on ``(a, b)``, first ``K`` modes."""
    _check_side(a, b)
    if K < 1:
        raise ValueError("need at least one mode")
    length = b - a
    modes = []
    for k in range(1, K + 1):
        fac = SineFactor(a, length, k)
        modes.append(Mode(fac.eigenvalue, ProductEigenfunction((fac,)), fac.integral))
    return SpectralDomain("interval", ((float(a), float(b)),), tuple(modes), K)


def spectrum_box(sides, K_per_axis: int = 8) -> SpectralDomain:
    """Tensor-product spectrum of an axis-aligned box.

    All ``K_per_axis ** d`` product modes are kept, sorted by total eigenvalue,
    so truncation is per axis and error bounds factorise.
    """
    sides = [tuple(map(float, s)) for s in sides]
    if not sides:
        raise ValueError("box needs at least one side")
    for a, b in sides:
        _check_side(a, b)
    if K_per_axis < 1:
        raise ValueError("need at least one mode per axis")
    per_axis = [[SineFactor(a, b - a, k) for k in range(1, K_per_axis + 1)] for a, b in sides]
    modes = []
    for combo in itertools.product(*per_axis):
        modes.append(Mode(
            sum(f.eigenvalue for f in combo),
            ProductEigenfunction(tuple(combo)),
            math.prod(f.integral for f in combo),
        ))
    modes.sort(key=lambda m: m.eigenvalue)
    kind = "interval" if len(sides) == 1 else "box"
    return SpectralDomain(kind, tuple(sides), tuple(modes), K_per_axis)


def principal(domain: SpectralDomain, z) -> tuple[float, float]:
    """Return ``(lambda_D, A(z))`` with ``A(z) = lambda_D psi(z) int psi``.

    ``A(z)`` is the large-time amplitude of the exit-time density at ``z``.
    """
    z = domain.check_interior(z)
    mode = domain.modes[0]
    psi = float(mode.eigenfunction(z[0] if domain.dimension == 1 else z))
    return mode.eigenvalue, mode.eigenvalue * psi * mode.integral


def ground_state_product(domain: SpectralDomain, z) -> float:
    """``psi(z) * int_D psi``, the large-time amplitude of the Brownian survival."""
    z = domain.check_interior(z)
    mode = domain.modes[0]
    return float(mode.eigenfunction(z[0] if domain.dimension == 1 else z)) * mode.integral


def domain_from_config(cfg: dict) -> SpectralDomain:
    """Build a domain from ``{type: interval|box, bounds: [...], modes: K}``."""
    kind = cfg.get("type")
    bounds = cfg.get("bounds")
    if kind == "interval":
        if bounds is None or len(bounds) != 2:
            raise ValueError("interval bounds must be [a, b]")
        return spectrum_interval(float(bounds[0]), float(bounds[1]), int(cfg.get("modes", DEFAULT_MODES)))
    if kind == "box":
        if not bounds:
            raise ValueError("box bounds must be a non-empty list of [a, b] pairs")
        return spectrum_box(bounds, int(cfg.get("modes", 8)))
    raise ValueError(f"unknown domain type {kind!r}; expected 'interval' or 'box'")
