"""Tauberian correspondences between small-ball laws and Laplace transforms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special


@dataclass(frozen=True)
class SmallBallLaw:
    """``log P[xi <= eps] ~ -C eps^{-alpha} |log eps|^beta`` as ``eps -> 0+``."""

    alpha: float
    beta: float
    C: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.C > 0):
            raise ValueError(f"need alpha > 0 and C > 0, got alpha={self.alpha}, C={self.C}")


@dataclass(frozen=True)
class LaplaceLaw:
    """``log E[exp(-lam xi)] ~ -constant lam^exponent_power (log lam)^log_power``."""

    exponent_power: float
    log_power: float
    constant: float

    def __post_init__(self):
        if not 0 < self.exponent_power < 1:
            raise ValueError("exponent_power must lie in (0, 1)")
        if not self.constant > 0:
            raise ValueError("constant must be positive")

    def log_transform(self, lam):
        lam = np.asarray(lam, dtype=float)
        return -self.constant * lam ** self.exponent_power * np.log(lam) ** self.log_power


def debruijn_forward(law: SmallBallLaw) -> LaplaceLaw:
    """de Bruijn's exponential Tauberian map from a small-ball law to its transform."""
    a, b, C = law.alpha, law.beta, law.C
    constant = (1 + a) ** (1 - b / (1 + a)) * a ** (-a / (1 + a)) * C ** (1 / (1 + a))
    return LaplaceLaw(a / (1 + a), b / (1 + a), constant)


def stretched_small_ball_constant(C: float, p: float) -> LaplaceLaw:
    """Transform asymptotics for a density ``e^{-v} V`` with ``v = C x^{-1/2} (log x^{-1/2})^{-2/p}``.

    The log of the transform behaves like
    ``-(3/2)^{(4+3p)/(3p)} 2^{1/3} (C 2^{2/p})^{2/3} lam^{1/3} (log lam)^{-4/(3p)}``.
    """
    if not (C > 0 and p > 0):
        raise ValueError("need C > 0 and p > 0")
    constant = 1.5 ** ((4 + 3 * p) / (3 * p)) * 2 ** (1 / 3) * (C * 2 ** (2 / p)) ** (2 / 3)
    return LaplaceLaw(1 / 3, -4 / (3 * p), constant)


def interval_exit_small_ball() -> SmallBallLaw:
    """Small-ball law of the exit time of ``(-1, 1)`` from 0: ``log P[eta <= eps] ~ -1/(2 eps)``."""
    return SmallBallLaw(1.0, 0.0, 0.5)


def log_interval_exit_transform(lam):
    """Exact ``log E[exp(-lam eta_(-1,1))] = -log cosh(sqrt(2 lam))``."""
    r = np.sqrt(2.0 * np.asarray(lam, dtype=float))
    # log cosh r = r + log1p(exp(-2r)) - log 2, stable for large r
    return -(r + np.log1p(np.exp(-2.0 * r)) - math.log(2.0))


# ---------------------------------------------------------------------------
# Polynomial small-ball laws: log P[xi <= x] ~ (c/2) log x.


def power_law_log_transform(c: float, lam):
    """``log E[exp(-lam xi)]`` for ``P[xi <= x] = min(1, x^{c/2})``.

    ``E = (c/2) lam^{-c/2} gamma_lower(c/2, lam)``.
    """
    k = c / 2.0
    lam = np.asarray(lam, dtype=float)
    return math.log(k) - k * np.log(lam) + special.gammaln(k) + np.log(special.gammainc(k, lam))


def _sandwich(c: float, lam: float) -> tuple[float, float]:
    """Bounds on log E from splitting at delta (upper) and delta = 1/lam (lower)."""
    k = c / 2.0
    # E <= P[xi <= d] + exp(-d lam): minimise over log d.
    obj = lambda ld: np.logaddexp(k * ld, -math.exp(ld) * lam)
    res = optimize.minimize_scalar(obj, bounds=(-math.log(lam) - 10, 0.0), method="bounded",
                                   options={"xatol": 1e-12})
    upper = float(min(res.fun, obj(0.0)))
    # E >= exp(-d lam) P[xi <= d] with d = 1/lam.
    lower = -1.0 - k * math.log(lam)
    return lower, upper


@dataclass(frozen=True)
class PowerLawRow:
    lam: float
    ratio: float
    lower: float
    upper: float


def power_law_transform_table(c: float, lam_grid) -> list[PowerLawRow]:
    """Rows of ``[log lam]^{-1} log E[exp(-lam xi)]``, which tends to ``-c/2``.

    ``lower``/``upper`` are the same ratio computed from the two elementary
    bounds on ``E``; the exact ratio always lies between them.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    rows = []
    for lam in lam_grid:
        lam = float(lam)
        if not lam > 1:
            raise ValueError("lam must exceed 1 so that log lam > 0")
        logE = float(power_law_log_transform(c, lam))
        lo, up = _sandwich(c, lam)
        L = math.log(lam)
        rows.append(PowerLawRow(lam, logE / L, lo / L, up / L))
    return rows
