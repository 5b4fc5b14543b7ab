"""Exact-in-law exit-time samplers and reproducible Monte Carlo survival estimates.

Interval exit times are drawn by inverting the survival function of the unit
interval; boxes take the minimum over independent coordinates; iterated and
Brownian-time motions use Brownian scaling
``eta_(-a,b) = (a + b)^2 * eta_(0,1)(a / (a + b))``.

Randomness is counter based: draw ``i`` uses the uniforms of chunk
``i // CHUNK`` of a Philox stream keyed by the seed, so the estimate depends
only on ``(seed, n)`` and not on how chunks are spread over workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .domains import SpectralDomain
from .exit_laws import _unit_log_density, _unit_log_survival

CHUNK = 8192
S_MIN = 1e-8
S_MAX = 50.0
WORKERS_ENV = "IBM_LIFETIME_WORKERS"
_PI2 = math.pi ** 2


# ---------------------------------------------------------------------------
# Inversion on the unit interval.


def _small_time_inverse(x, log_u):
    """Solve ``2 Q(m / sqrt(s)) = 1 - U`` with ``m`` the distance to the nearer end."""
    m = np.minimum(x, 1.0 - x)
    q = -np.expm1(log_u) / 2.0
    z = -ndtri(q)
    return (m / z) ** 2


def _large_time_inverse(x, log_u):
    """Solve ``(4/pi) sin(pi x) exp(-pi^2 s/2) = U``."""
    return 2.0 * (math.log(4.0 / math.pi) + np.log(np.sin(math.pi * x)) - log_u) / _PI2


def invert_unit_survival(x, u, tol: float = 1e-12, max_iter: int = 100) -> np.ndarray:
    """Return ``s`` with ``S(x, s) = u`` for the exit time of ``(0, 1)``.

    Safeguarded Newton iteration on ``log S`` in ``log s`` inside ``[S_MIN, S_MAX]``;
    outside that bracket the one-term small- and large-time forms are exact to
    double precision.  Converges to ``|log S - log u| <= tol``.
    """
    x, u = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(u, dtype=float))
    x = x.ravel()
    u = u.ravel()
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("starting points must lie strictly inside (0, 1)")
    if np.any((u <= 0) | (u >= 1)):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    log_u = np.log(u)
    out = np.empty(x.shape)
    lo_edge = _unit_log_survival(x, S_MIN)
    hi_edge = _unit_log_survival(x, S_MAX)
    below = log_u >= lo_edge
    above = log_u <= hi_edge
    with np.errstate(divide="ignore"):
        out[below] = _small_time_inverse(x[below], log_u[below])
    out[above] = _large_time_inverse(x[above], log_u[above])
    mid = ~(below | above)
    if mid.any():
        out[mid] = _newton(x[mid], log_u[mid], tol, max_iter)
    return out


def _newton(x, log_u, tol, max_iter):
    lo = np.full(x.shape, math.log(S_MIN))
    hi = np.full(x.shape, math.log(S_MAX))
    guess = np.where(log_u > math.log(0.5), _small_time_inverse(x, log_u), _large_time_inverse(x, log_u))
    ell = np.log(np.clip(guess, S_MIN, S_MAX))
    active = np.arange(x.size)
    for _ in range(max_iter):
        xa, la = x[active], ell[active]
        s = np.exp(la)
        f = _unit_log_survival(xa, s) - log_u[active]
        done = np.abs(f) <= tol
        # log S decreases in s: f > 0 means s is too small.
        lo[active] = np.where(f > 0, la, lo[active])
        hi[active] = np.where(f < 0, la, hi[active])
        slope = -s * np.exp(_unit_log_density(xa, s) - _unit_log_survival(xa, s))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            step = la - f / slope
        bad = ~np.isfinite(step) | (step <= lo[active]) | (step >= hi[active])
        step = np.where(bad, 0.5 * (lo[active] + hi[active]), step)
        ell[active] = np.where(done, la, step)
        active = active[~done]
        if active.size == 0:
            break
        tight = hi[active] - lo[active] < 1e-15
        active = active[~tight]
        if active.size == 0:
            break
    else:
        raise ArithmeticError(f"inversion did not converge for {active.size} draws")
    return np.exp(ell)


def _open_uniforms(raw: np.ndarray) -> np.ndarray:
    """Map ``[0, 1)`` doubles to the open interval ``(0, 1)``."""
    return raw + 2.0 ** -54


# ---------------------------------------------------------------------------
# Samplers.  Each consumes a fixed number of uniforms per draw.


@dataclass(frozen=True)
class IntervalExitSampler:
    """Exit time of ``(0, 1)`` from ``x``."""

    x: float

    def __post_init__(self):
        if not 0 < self.x < 1:
            raise ValueError("x must lie strictly inside (0, 1)")

    width = 1

    def from_uniforms(self, u: np.ndarray) -> np.ndarray:
        return invert_unit_survival(np.full(u.shape[0], self.x), u[:, 0])


def _domain_exit_from_uniforms(domain: SpectralDomain, z: np.ndarray, u: np.ndarray) -> np.ndarray:
    times = np.full(u.shape[0], np.inf)
    for i, (a, b) in enumerate(domain.bounds):
        L = b - a
        axis = L * L * invert_unit_survival(np.full(u.shape[0], (z[i] - a) / L), u[:, i])
        times = np.minimum(times, axis)
    return times


def _scaled_inner(tm: np.ndarray, tp: np.ndarray, u: np.ndarray) -> np.ndarray:
    width = tm + tp
    return width * width * invert_unit_survival(tm / width, u)


@dataclass(frozen=True)
class DomainExitSampler:
    domain: SpectralDomain
    z: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.domain.check_interior(self.z).tolist()))

    @property
    def width(self) -> int:
        return self.domain.dimension

    def from_uniforms(self, u):
        return _domain_exit_from_uniforms(self.domain, np.array(self.z), u)


@dataclass(frozen=True)
class IBMExitSampler:
    """Two independent outer exits, then the inner clock's exit from ``(-tau^-, tau^+)``."""

    domain: SpectralDomain
    z: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.domain.check_interior(self.z).tolist()))

    @property
    def width(self) -> int:
        return 2 * self.domain.dimension + 1

    def from_uniforms(self, u):
        d = self.domain.dimension
        z = np.array(self.z)
        tm = _domain_exit_from_uniforms(self.domain, z, u[:, :d])
        tp = _domain_exit_from_uniforms(self.domain, z, u[:, d:2 * d])
        return _scaled_inner(tm, tp, u[:, 2 * d])


@dataclass(frozen=True)
class BTBMExitSampler:
    """One outer exit ``tau``, then the inner clock's exit from ``(-tau, tau)``.

    ``inner_constant`` replaces the outer exit by a fixed value (a degenerate
    law used to test the scaling step on its own).
    """

    domain: SpectralDomain
    z: tuple[float, ...]
    inner_constant: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(self.domain.check_interior(self.z).tolist()))
        if self.inner_constant is not None and not self.inner_constant > 0:
            raise ValueError("inner_constant must be positive")

    @property
    def width(self) -> int:
        return self.domain.dimension + 1

    def from_uniforms(self, u):
        d = self.domain.dimension
        if self.inner_constant is None:
            tau = _domain_exit_from_uniforms(self.domain, np.array(self.z), u[:, :d])
        else:
            tau = np.full(u.shape[0], float(self.inner_constant))
        return _scaled_inner(tau, tau, u[:, d])


def _draw(sampler, rng: np.random.Generator, size: int | None):
    n = 1 if size is None else size
    times = sampler.from_uniforms(_open_uniforms(rng.random((n, sampler.width))))
    return float(times[0]) if size is None else times


def sample_interval_exit(x: float, rng: np.random.Generator, size: int | None = None):
    return _draw(IntervalExitSampler(x), rng, size)


def sample_domain_exit(domain: SpectralDomain, z, rng: np.random.Generator, size: int | None = None):
    return _draw(DomainExitSampler(domain, z), rng, size)


def sample_ibm_exit(domain: SpectralDomain, z, rng: np.random.Generator, size: int | None = None):
    return _draw(IBMExitSampler(domain, z), rng, size)


def sample_btbm_exit(domain: SpectralDomain, z, rng: np.random.Generator, size: int | None = None,
                     inner_constant: float | None = None):
    return _draw(BTBMExitSampler(domain, z, inner_constant), rng, size)


# ---------------------------------------------------------------------------
# Counter-based estimation.


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_err: float
    n: int
    seed: int

    @classmethod
    def from_count(cls, count: int, n: int, seed: int) -> "McEstimate":
        p = count / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, seed)

    def agrees_with(self, p: float, sigmas: float = 3.0) -> bool:
        """``|p_hat - p| <= sigmas * std_err``, with a floor of one draw for degenerate estimates."""
        se = max(self.std_err, 1.0 / self.n)
        return abs(self.p_hat - p) <= sigmas * se


def chunk_uniforms(seed: int, chunk: int, rows: int, width: int) -> np.ndarray:
    """Uniforms for draws ``chunk*CHUNK ... chunk*CHUNK + rows - 1``."""
    bitgen = np.random.Philox(key=seed, counter=[0, 0, chunk, 0])
    return _open_uniforms(np.random.Generator(bitgen).random((rows, width)))


def draw_times(sampler, n: int, seed: int, chunk: int) -> np.ndarray:
    rows = min(CHUNK, n - chunk * CHUNK)
    return sampler.from_uniforms(chunk_uniforms(seed, chunk, rows, sampler.width))


def _chunk_counts(args):
    sampler, n, seed, chunk, ts = args
    times = draw_times(sampler, n, seed, chunk)
    return [int(np.count_nonzero(times > t)) for t in ts]


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return 1
    workers = int(value)
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return workers


def estimate_survival_curve(sampler, ts, n: int, seed: int, workers: int | None = None) -> list[McEstimate]:
    """Survival estimates at several times from one shared set of ``n`` draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ts = [float(t) for t in ts]
    workers = default_workers() if workers is None else workers
    n_chunks = -(-n // CHUNK)
    jobs = [(sampler, n, seed, c, ts) for c in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_chunks)) as pool:
            counts = list(pool.map(_chunk_counts, jobs))
    else:
        counts = [_chunk_counts(job) for job in jobs]
    totals = np.sum(np.array(counts, dtype=np.int64), axis=0)
    return [McEstimate.from_count(int(c), n, seed) for c in totals]


def estimate_survival(sampler, t: float, n: int, seed: int, workers: int | None = None) -> McEstimate:
    """Fraction of ``n`` draws exceeding ``t``; ``t = inf`` gives zero."""
    return estimate_survival_curve(sampler, [t], n, seed, workers)[0]


def estimate_mean(sampler, n: int, seed: int) -> tuple[float, float]:
    """Sample mean and its standard error from the same counter-based stream."""
    times = np.concatenate([draw_times(sampler, n, seed, c) for c in range(-(-n // CHUNK))])
    return float(times.mean()), float(times.std(ddof=1) / math.sqrt(n))
