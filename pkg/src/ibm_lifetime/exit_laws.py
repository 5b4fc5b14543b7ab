"""Exact laws of Brownian exit times (generator ``(1/2) d^2/dx^2``).

The unit-interval survival ``S(x, s) = P_x[eta_(0,1) > s]`` is evaluated from the
sine series when ``s >= CROSSOVER`` and from the method-of-images Gaussian
series below it; both converge fast on their side of the crossover.  Private
``_unit_*`` helpers are vectorised and are what the quadrature and sampling code
call; the public functions validate arguments and return scalar results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .domains import SpectralDomain

CROSSOVER = 0.1
VALIDITY_FACTOR = 0.05
_PI2 = math.pi ** 2
_IMAGES = 4
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class OutOfRangeError(ValueError):
    """Requested time is outside the window where a series is trusted."""


@dataclass(frozen=True)
class SeriesEvaluation:
    value: float
    truncation_bound: float
    terms_used: int


def clamp_probability(value: float, tol: float) -> float:
    """Snap benign rounding excursions into [0, 1]; larger violations raise."""
    if -tol <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + tol:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise ArithmeticError(f"probability {value!r} outside [0, 1] beyond tolerance {tol}")
    return value


# ---------------------------------------------------------------------------
# Unit interval, vectorised.


def _spectral_terms(s_min: float, tol: float) -> int:
    # Smallest N with exp(-(2N+1)^2 pi^2 s / 2) below tol.
    need = math.sqrt(max(2.0 * math.log(1.0 / tol) / (_PI2 * s_min), 1.0))
    return max(2, int(math.ceil((need - 1.0) / 2.0)) + 1)


def _spectral_tail(m: np.ndarray, s: np.ndarray, power: int) -> np.ndarray:
    """Bound on sum_{j>=0} (m+2j)^power * exp(-(m+2j)^2 pi^2 s/2), m = first dropped odd index."""
    first = m ** power * np.exp(-m * m * _PI2 * s / 2.0)
    growth = ((m + 2.0) / m) ** max(power, 0)
    ratio = growth * np.exp(-(4.0 * m + 4.0) * _PI2 * s / 2.0)
    return np.where(ratio < 1.0, first / (1.0 - np.minimum(ratio, 0.999999)), np.inf)


def _odd(n_terms: int) -> np.ndarray:
    return (2.0 * np.arange(n_terms) + 1.0)


def _images_arrays(x, s):
    k = np.arange(-_IMAGES, _IMAGES + 1, dtype=float)
    x = x[..., None]
    # (location, sign) of the four Gaussian-cdf terms per image k.
    a1 = 1.0 - x - 2.0 * k
    a2 = -x - 2.0 * k
    a3 = 1.0 + x - 2.0 * k
    a4 = x - 2.0 * k
    return a1, a2, a3, a4


def _images_bound(s):
    return 8.0 * ndtr(-(2.0 * _IMAGES + 1.0) / np.sqrt(s))


def _unit_survival(x, s, tol: float = 1e-14):
    """``S(x, s)`` and a truncation bound; broadcasts ``x`` and ``s``."""
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    value = np.empty(x.shape)
    bound = np.empty(x.shape)
    series = s >= CROSSOVER
    if series.any():
        xs, ss = x[series], s[series]
        n = _spectral_terms(float(ss.min()), tol)
        m = _odd(n)
        terms = np.exp(-np.multiply.outer(ss, m * m) * _PI2 / 2.0) * np.sin(np.multiply.outer(xs, m) * math.pi) / m
        value[series] = 4.0 / math.pi * terms.sum(axis=-1)
        bound[series] = 4.0 / math.pi * _spectral_tail(2.0 * n + 1.0, ss, -1)
    img = ~series
    if img.any():
        xs, ss = x[img], s[img]
        a1, a2, a3, a4 = _images_arrays(xs, ss)
        r = np.sqrt(ss)[..., None]
        brackets = (ndtr(a1 / r) - ndtr(a2 / r)) - (ndtr(a3 / r) - ndtr(a4 / r))
        value[img] = brackets.sum(axis=-1)
        bound[img] = _images_bound(ss)
    return value, bound


def _unit_log_survival(x, s):
    """``log S(x, s)``, accurate even when ``S`` underflows (large ``s``)."""
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    out = np.empty(x.shape)
    series = s >= CROSSOVER
    if series.any():
        xs, ss = x[series], s[series]
        m = _odd(_spectral_terms(float(ss.min()), 1e-17))
        rel = np.exp(-np.multiply.outer(ss, m * m - 1.0) * _PI2 / 2.0) * np.sin(np.multiply.outer(xs, m) * math.pi) / m
        total = rel.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[series] = np.where(total > 0, math.log(4.0 / math.pi) - _PI2 * ss / 2.0 + np.log(total), -np.inf)
    img = ~series
    if img.any():
        v, _ = _unit_survival(x[img], s[img])
        with np.errstate(divide="ignore"):
            out[img] = np.log(np.clip(v, 0.0, 1.0))
    return out


def _unit_log_density(x, s):
    """``log g(x, s)`` with ``g = -dS/ds`` the exit-time density of ``(0, 1)``."""
    x, s = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    out = np.full(x.shape, -np.inf)
    pos = s > 0
    series = pos & (s >= CROSSOVER)
    if series.any():
        xs, ss = x[series], s[series]
        m = _odd(_spectral_terms(float(ss.min()), 1e-17) + 1)
        rel = m * np.exp(-np.multiply.outer(ss, m * m - 1.0) * _PI2 / 2.0) * np.sin(np.multiply.outer(xs, m) * math.pi)
        total = rel.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[series] = np.where(total > 0, math.log(2.0 * math.pi) - _PI2 * ss / 2.0 + np.log(total), -np.inf)
    img = pos & ~series
    if img.any():
        xs, ss = x[img], s[img]
        a1, a2, a3, a4 = _images_arrays(xs, ss)
        locs = np.concatenate([a1, a2, a3, a4], axis=-1)
        signs = np.concatenate([np.ones_like(a1), -np.ones_like(a2), -np.ones_like(a3), np.ones_like(a4)], axis=-1)
        sq = locs * locs
        m2 = sq.min(axis=-1, keepdims=True)
        total = np.sum(signs * locs * np.exp(-(sq - m2) / (2.0 * ss[..., None])), axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[img] = np.where(
                total > 0,
                -m2[..., 0] / (2.0 * ss) - _LOG_SQRT_2PI - math.log(2.0) - 1.5 * np.log(ss) + np.log(total),
                -np.inf,
            )
    return out


def _unit_density(x, s):
    return np.exp(_unit_log_density(x, s))


# ---------------------------------------------------------------------------
# Public interval laws.


def _check_position(x: float) -> None:
    if not 0.0 < x < 1.0:
        raise ValueError(f"starting point x={x} must lie strictly inside (0, 1)")


def interval_survival(x: float, s: float, tol: float = 1e-12) -> SeriesEvaluation:
    """``P_x[eta_(0,1) > s]`` to absolute accuracy ``tol``."""
    _check_position(x)
    if not s > 0:
        raise ValueError(f"time s={s} must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    value, bound = _unit_survival(x, s, tol=min(tol, 1e-3) * 1e-2)
    if s >= CROSSOVER:
        terms = _spectral_terms(s, min(tol, 1e-3) * 1e-2)
    else:
        terms = 2 * _IMAGES + 1
    return SeriesEvaluation(clamp_probability(float(value), tol), float(bound), terms)


def eta_survival(u: float, v: float, t: float, tol: float = 1e-12) -> SeriesEvaluation:
    """``P_0[eta_(-u,v) > t]`` via Brownian scaling onto the unit interval.

    Note the time rescaling is ``t / (u + v)**2``.
    """
    if not (u > 0 and v > 0):
        raise ValueError(f"interval endpoints must be positive, got u={u}, v={v}")
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return SeriesEvaluation(1.0, 0.0, 0)
    width = u + v
    return interval_survival(u / width, t / width ** 2, tol)


def log_sym_eta_density_du(u, t):
    """Vectorised ``log d/du P_0[eta_(-u,u) > t]``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return _unit_log_density(0.5, t / (4.0 * u * u)) + np.log(t / 2.0) - 3.0 * np.log(u)


def sym_eta_density_du(u: float, t: float, tol: float = 1e-12) -> float:
    """``d/du P_0[eta_(-u,u) > t]`` by termwise differentiation.

    For ``t/u^2`` large this behaves like ``exp(-pi^2 t/(8u^2)) * pi t / u^3``.
    """
    if not (u > 0 and t > 0):
        raise ValueError("u and t must be positive")
    return float(np.exp(log_sym_eta_density_du(u, t)))


def sym_eta_leading(u, t):
    """Leading small-``u`` behaviour ``exp(-pi^2 t/(8u^2)) * pi t / u^3``."""
    u = np.asarray(u, dtype=float)
    return np.exp(-_PI2 * t / (8.0 * u * u)) * math.pi * t / u ** 3


# ---------------------------------------------------------------------------
# Bounded spectral domains.


def _validity_check(domain: SpectralDomain, t: float) -> None:
    floor = VALIDITY_FACTOR * min(domain.lengths) ** 2
    if t < floor:
        raise OutOfRangeError(
            f"t={t} is below the eigenfunction-series validity window t >= {floor:g} "
            f"(0.05 * smallest side^2)"
        )


def _axis_abs_sums(domain: SpectralDomain, z: np.ndarray, t: float):
    """Per-axis (kept |terms| sum, tail bound) for the survival series."""
    out = []
    K = domain.modes_per_axis
    for zi, (a, b) in zip(z, domain.bounds):
        L = b - a
        k = np.arange(1, K + 1)
        lam = k * k * _PI2 / (2.0 * L * L)
        integ = np.where(k % 2 == 1, 2.0 * math.sqrt(2.0 * L) / (k * math.pi), 0.0)
        psi = math.sqrt(2.0 / L) * np.sin(k * math.pi * (zi - a) / L)
        kept = float(np.sum(np.exp(-lam * t) * np.abs(psi * integ)))
        first = K + 1 if (K + 1) % 2 == 1 else K + 2
        tail = 4.0 / math.pi * float(_spectral_tail(np.float64(first), np.float64(t / L ** 2), -1))
        out.append((kept, tail))
    return out


def _product_bound(pairs) -> float:
    return math.prod(k + b for k, b in pairs) - math.prod(k for k, _ in pairs)


def _mode_values(domain: SpectralDomain, z: np.ndarray):
    lam = domain.eigenvalues()
    arg = z[0] if domain.dimension == 1 else z
    coef = np.array([float(m.eigenfunction(arg)) * m.integral for m in domain.modes])
    return lam, coef


def bm_exit_cdf(domain: SpectralDomain, z, t: float, tol: float = 1e-10) -> SeriesEvaluation:
    """``P_z[tau_D <= t] = 1 - sum_k exp(-lambda_k t) psi_k(z) int psi_k``."""
    z = domain.check_interior(z)
    _validity_check(domain, t)
    lam, coef = _mode_values(domain, z)
    survival = math.fsum(np.exp(-lam * t) * coef)
    bound = _product_bound(_axis_abs_sums(domain, z, t))
    return SeriesEvaluation(clamp_probability(1.0 - survival, tol), bound, len(lam))


def bm_exit_density(domain: SpectralDomain, z, t: float) -> float:
    """``f(t) = sum_k lambda_k exp(-lambda_k t) psi_k(z) int psi_k``."""
    return bm_exit_density_eval(domain, z, t).value


def bm_exit_density_eval(domain: SpectralDomain, z, t: float) -> SeriesEvaluation:
    z = domain.check_interior(z)
    _validity_check(domain, t)
    lam, coef = _mode_values(domain, z)
    value = math.fsum(lam * np.exp(-lam * t) * coef)
    # lambda e^{-lambda t} <= 2/(e t) e^{-lambda t/2}: factorises per axis at t/2.
    bound = 2.0 / (math.e * t) * _product_bound(_axis_abs_sums(domain, z, t / 2.0))
    if value < -bound:
        raise ArithmeticError(f"negative exit density {value} at t={t}")
    return SeriesEvaluation(max(value, 0.0), bound, len(lam))


# Dual-regime domain laws (exact for boxes: survival is a product over axes).


def _axis_coordinates(domain: SpectralDomain, z):
    z = domain.check_interior(z)
    return [((zi - a) / (b - a), (b - a) ** 2) for zi, (a, b) in zip(z, domain.bounds)]


def domain_log_survival(domain: SpectralDomain, z, t):
    """Vectorised ``log P_z[tau_D > t]`` valid for every ``t > 0``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    for x, L2 in _axis_coordinates(domain, z):
        out = out + _unit_log_survival(x, t / L2)
    return out


def domain_log_density(domain: SpectralDomain, z, t):
    """Vectorised log exit-time density of ``tau_D`` from ``z`` for every ``t > 0``."""
    t = np.asarray(t, dtype=float)
    axes = _axis_coordinates(domain, z)
    log_s = [_unit_log_survival(x, t / L2) for x, L2 in axes]
    log_g = [_unit_log_density(x, t / L2) - math.log(L2) for x, L2 in axes]
    if len(axes) == 1:
        return log_g[0]
    parts = []
    for i, lg in enumerate(log_g):
        parts.append(lg + sum(ls for j, ls in enumerate(log_s) if j != i))
    return np.logaddexp.reduce(np.stack(parts), axis=0)
