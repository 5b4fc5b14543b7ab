"""Survival of iterated and Brownian-time Brownian motion by subordination.

Both processes leave ``D`` once the inner clock exits the random interval cut
out by the outer exit times, so

* IBM:  ``P = int int P_0[eta_(-u,v) > t] f(u) f(v) du dv``
* BTBM: ``P = int P_0[eta_(-u,u) > t] f(u) du``

with ``f`` the exit-time density of the outer motion from ``z``.  The IBM double
integral is taken in the coordinates ``x = u + v``, ``w = u / x`` where the inner
survival becomes ``S(w, t / x^2)`` on the unit interval.  Integration ranges are
chosen per call so that the discarded tails are bounded analytically below the
requested tolerance; those bounds are folded into the reported error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .domains import SpectralDomain
from .exit_laws import (
    _unit_log_survival,
    domain_log_density,
    domain_log_survival,
    log_sym_eta_density_du,
)
from .predictors import AsymptoticPrediction
from .quadrature import Estimate, log_quad

_PI2 = math.pi ** 2
_MARGIN = math.log(100.0)


# ---------------------------------------------------------------------------
# Hypothesis-level tails P[tau > u].

TAIL_KINDS = ("exponential", "polynomial", "stretched_log", "algebraic_log", "step")


@dataclass(frozen=True)
class TailLaw:
    """Outer exit-time tail ``T(u) = P[tau > u]``, equal to one below ``splice``.

    * ``exponential``: ``T = min(1, (A/lam) e^{-lam u})``
    * ``polynomial``: ``T = min(1, u^{-C})``
    * ``stretched_log``: ``log T = -C u (log u)^{-2/p}``
    * ``algebraic_log``: ``log T = -C u^a (log u)^{-b}`` with
      ``a = (1-alpha)/(1+alpha)`` and ``b = 2 beta/(1+alpha)``
    * ``step``: ``T = 1`` below ``u0`` and ``0`` from ``u0`` on.

    ``u0`` overrides the default splice point, which is where the formula first
    becomes a valid non-increasing tail.
    """

    kind: str
    C: float | None = None
    p: float | None = None
    A: float | None = None
    lam: float | None = None
    alpha: float | None = None
    beta: float | None = None
    u0: float | None = None

    def __post_init__(self):
        k = self.kind
        need = {
            "exponential": ("A", "lam"),
            "polynomial": ("C",),
            "stretched_log": ("C", "p"),
            "algebraic_log": ("C", "alpha"),
            "step": ("u0",),
        }
        if k not in need:
            raise ValueError(f"unknown tail kind {k!r}; expected one of {TAIL_KINDS}")
        for name in need[k]:
            value = getattr(self, name)
            if value is None or not value > 0:
                raise ValueError(f"{k} tail needs {name} > 0, got {value}")
        if k == "algebraic_log":
            if not self.alpha < 1:
                raise ValueError("alpha must lie in (0, 1)")
            if self.beta is None:
                raise ValueError("algebraic_log tail needs beta")
        if self.u0 is not None and not self.u0 >= 0:
            raise ValueError("u0 must be non-negative")

    @classmethod
    def exponential(cls, A: float, lam: float, u0: float | None = None) -> "TailLaw":
        return cls("exponential", A=A, lam=lam, u0=u0)

    @classmethod
    def polynomial(cls, C: float) -> "TailLaw":
        return cls("polynomial", C=C)

    @classmethod
    def stretched_log(cls, C: float, p: float, u0: float | None = None) -> "TailLaw":
        return cls("stretched_log", C=C, p=p, u0=u0)

    @classmethod
    def algebraic_log(cls, C: float, alpha: float, beta: float, u0: float | None = None) -> "TailLaw":
        return cls("algebraic_log", C=C, alpha=alpha, beta=beta, u0=u0)

    @classmethod
    def step(cls, u0: float) -> "TailLaw":
        return cls("step", u0=u0)

    def _powers(self) -> tuple[float, float]:
        if self.kind == "stretched_log":
            return 1.0, 2.0 / self.p
        a = (1 - self.alpha) / (1 + self.alpha)
        return a, 2 * self.beta / (1 + self.alpha)

    @property
    def splice(self) -> float:
        if self.u0 is not None:
            return float(self.u0)
        if self.kind == "exponential":
            return max(0.0, math.log(self.A / self.lam) / self.lam)
        if self.kind == "polynomial":
            return 1.0
        a, b = self._powers()
        return math.exp(max(1.0, b / a))

    def log_tail(self, u):
        """Vectorised ``log T(u)``."""
        u = np.asarray(u, dtype=float)
        u0 = self.splice
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "step":
                body = np.full(u.shape, -np.inf)
            elif self.kind == "exponential":
                body = math.log(self.A / self.lam) - self.lam * u
            elif self.kind == "polynomial":
                body = -self.C * np.log(u)
            else:
                a, b = self._powers()
                body = -self.C * u ** a * np.log(u) ** (-b)
            return np.where(u < u0, 0.0, np.minimum(body, 0.0))

    def to_config(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def tail_from_config(cfg: dict) -> TailLaw:
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    allowed = {"C", "p", "A", "lam", "alpha", "beta", "u0"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown tail fields {sorted(unknown)}")
    return TailLaw(kind, **{k: float(v) for k, v in cfg.items()})


# ---------------------------------------------------------------------------
# Shared helpers.


def _log_sum_on_grid(x: np.ndarray, lf: np.ndarray) -> float:
    """Crude trapezoid estimate of ``log int exp(lf)`` on a sorted grid."""
    dx = np.diff(x)
    mid = np.logaddexp(lf[1:], lf[:-1]) - math.log(2.0)
    with np.errstate(divide="ignore"):
        return float(np.logaddexp.reduce(mid + np.log(dx)))


def _grow(bound, start: float, target: float, factor: float, limit: int = 400) -> float:
    """Move ``start`` by ``factor`` until ``bound(value) <= target``."""
    value = start
    for _ in range(limit):
        if bound(value) <= target:
            return value
        value *= factor
    raise ArithmeticError("could not place an integration cut-off below the tolerance")


def _peak_breaks(peak: float, lo: float, hi: float) -> list[float]:
    return [peak * 2 ** (k / 3) for k in range(-9, 10) if lo < peak * 2 ** (k / 3) < hi]


def _check_time(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise ValueError(f"t must be finite and non-negative, got {t}")


# ---------------------------------------------------------------------------
# Iterated Brownian motion.


def _ibm_inner(domain, z, x: float, t: float, rtol: float, w_hi: float) -> Estimate:
    def log_f(w):
        return (
            _unit_log_survival(w, t / (x * x))
            + domain_log_density(domain, z, w * x)
            + domain_log_density(domain, z, (1.0 - w) * x)
        )

    breaks = [b for b in (0.01, 0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99) if b < w_hi]
    return log_quad(log_f, 0.0, w_hi, breakpoints=breaks, rtol=rtol)


def ibm_survival(
    domain: SpectralDomain,
    z,
    t: float,
    tol: float = 1e-8,
    *,
    symmetric: bool = False,
    cutoff_factor: float = 1.0,
) -> Estimate:
    """``log P_z[tau_D(Z) > t]`` for iterated Brownian motion.

    ``symmetric=True`` integrates only over ``u < v`` and doubles, which must
    agree with the full integral.  ``cutoff_factor > 1`` widens the integration
    range beyond what the tail bounds require (a soundness check).
    """
    _check_time(t)
    z = domain.check_interior(z)
    if t == 0:
        return Estimate(0.0, 0.0, 0)
    w_hi = 0.5 if symmetric else 1.0
    lam = domain.principal_eigenvalue
    scale = max(domain.lengths)

    def rough(x):
        return np.log(x) + _unit_log_survival(0.5, t / (x * x)) + 2 * domain_log_density(domain, z, x / 2)

    x_star = (_PI2 * t / lam) ** (1 / 3)
    grid = np.geomspace(min(x_star, scale) * 1e-3, 100 * max(x_star, scale) + 60 / lam, 4000)
    rough_vals = rough(grid)
    guess = _log_sum_on_grid(grid, rough_vals)
    peak = float(grid[np.argmax(rough_vals)])
    target = guess + math.log(tol) - _MARGIN

    lo_bound = lambda x: float(_unit_log_survival(0.5, t / (x * x)))
    hi_bound = lambda X: math.log(2.0) + float(domain_log_survival(domain, z, X / 2))
    x_lo = _grow(lo_bound, peak, target, 0.9) / cutoff_factor
    x_hi = _grow(hi_bound, peak, target, 1.1) * cutoff_factor
    extra = float(np.logaddexp(lo_bound(x_lo), hi_bound(x_hi)))

    inner_err = [0.0]
    inner_evals = [0]

    def outer(xs):
        out = np.empty(len(xs))
        for i, x in enumerate(xs):
            est = _ibm_inner(domain, z, float(x), t, tol, w_hi)
            inner_evals[0] += est.evaluations
            if not est.converged:
                inner_err[0] = math.inf
            else:
                inner_err[0] = max(inner_err[0], est.abs_error_log)
            out[i] = math.log(x) + est.log_value
        return out

    est = log_quad(outer, x_lo, x_hi, breakpoints=_peak_breaks(peak, x_lo, x_hi), rtol=tol,
                   extra_log_error=extra - (math.log(2.0) if symmetric else 0.0))
    log_value = est.log_value + (math.log(2.0) if symmetric else 0.0)
    err = est.abs_error_log + inner_err[0]
    return Estimate(log_value, err, est.evaluations + inner_evals[0],
                    est.converged and math.isfinite(inner_err[0]), est.sign)


# ---------------------------------------------------------------------------
# Brownian-time Brownian motion.


def _sym_log_survival(u, t):
    """``log P_0[eta_(-u,u) > t]``."""
    u = np.asarray(u, dtype=float)
    return _unit_log_survival(0.5, t / (4.0 * u * u))


def btbm_survival_density(domain: SpectralDomain, z, t: float, tol: float = 1e-8,
                          *, cutoff_factor: float = 1.0) -> Estimate:
    """``log P_z[tau_D(Z^1) > t]`` from the outer exit-time density."""
    _check_time(t)
    z = domain.check_interior(z)
    if t == 0:
        return Estimate(0.0, 0.0, 0)
    lam = domain.principal_eigenvalue
    scale = max(domain.lengths)

    def log_f(u):
        return _sym_log_survival(u, t) + domain_log_density(domain, z, u)

    u_star = (_PI2 * t / (4 * lam)) ** (1 / 3)
    grid = np.geomspace(min(u_star, scale) * 1e-3, 100 * max(u_star, scale) + 60 / lam, 4000)
    vals = log_f(grid)
    guess = _log_sum_on_grid(grid, vals)
    peak = float(grid[np.argmax(vals)])
    target = guess + math.log(tol) - _MARGIN

    lo_bound = lambda u: float(_sym_log_survival(u, t))
    hi_bound = lambda U: float(domain_log_survival(domain, z, U))
    u_lo = _grow(lo_bound, peak, target, 0.9) / cutoff_factor
    u_hi = _grow(hi_bound, peak, target, 1.1) * cutoff_factor
    extra = float(np.logaddexp(lo_bound(u_lo), hi_bound(u_hi)))
    return log_quad(log_f, u_lo, u_hi, breakpoints=_peak_breaks(peak, u_lo, u_hi), rtol=tol,
                    extra_log_error=extra)


def btbm_survival_tail(tail: TailLaw, t: float, tol: float = 1e-8) -> Estimate:
    """BTBM log-survival when only the outer tail ``T(u) = P[tau > u]`` is known.

    Integrating by parts against ``d/du P_0[eta_(-u,u) > t]`` gives
    ``P = P_0[eta_(-u0,u0) > t] + int_{u0}^inf T(u) d/du P_0[eta_(-u,u) > t] du``
    because ``T = 1`` below the splice point ``u0``.
    """
    _check_time(t)
    if t == 0:
        return Estimate(0.0, 0.0, 0)
    u0 = tail.splice
    log_head = float(_sym_log_survival(u0, t)) if u0 > 0 else -math.inf
    if tail.kind == "step":
        return Estimate(log_head, 0.0, 1)

    def log_f(u):
        return log_sym_eta_density_du(u, t) + tail.log_tail(u)

    start = max(u0, 1e-12 * math.sqrt(t))
    # 1 - P_0[eta_(-U,U) > t] <= 4 Q(U / sqrt(t)) by reflection.
    hi_bound = lambda U: math.log(4.0) + float(log_ndtr(-U / math.sqrt(t))) + float(tail.log_tail(U))
    grid = np.geomspace(start, max(start, math.sqrt(t)) * 60, 4000)
    vals = log_f(grid)
    guess = float(np.logaddexp(log_head, _log_sum_on_grid(grid, vals)))
    peak = float(grid[np.argmax(vals)])
    target = guess + math.log(tol) - _MARGIN
    u_hi = _grow(hi_bound, max(peak, math.sqrt(t)), target, 1.2)
    body = log_quad(log_f, start, u_hi, breakpoints=_peak_breaks(peak, start, u_hi), rtol=tol,
                    extra_log_error=hi_bound(u_hi))
    total = float(np.logaddexp(log_head, body.log_value))
    weight = math.exp(body.log_value - total)
    rel = body.rel_error * weight if math.isfinite(body.abs_error_log) else math.inf
    err = math.log1p(rel) if rel < 0.5 else math.inf
    return Estimate(total, err, body.evaluations, body.converged)


# ---------------------------------------------------------------------------
# Scaled quantities.


def scaled_ratio(estimate: Estimate, t: float, prediction: AsymptoticPrediction) -> float:
    """``t^{-1/2} exp(-rate t^{a}) P``, which tends to the sharp prefactor constant."""
    if not prediction.sharp:
        raise ValueError(f"prediction {prediction.name!r} has no sharp constant")
    if not t > 0:
        raise ValueError("t must be positive")
    log_r = estimate.log_value - 0.5 * math.log(t) - prediction.rate * t ** prediction.time_power
    return math.exp(log_r)


def log_scaled(estimate: Estimate, t: float, power_a: float, log_power_b: float) -> float:
    """``t^{-a} (log t)^{b} log P``."""
    if not t > math.e:
        raise ValueError("t must exceed e so that log t > 1")
    return t ** (-power_a) * math.log(t) ** log_power_b * estimate.log_value


def scaled_for(estimate: Estimate, t: float, prediction: AsymptoticPrediction) -> float:
    """The scaled log quantity matching ``prediction``'s powers."""
    return log_scaled(estimate, t, prediction.time_power, prediction.log_power)


def factor_two_holds(ibm: Estimate, btbm: Estimate) -> bool:
    """``P[tau(Z) > t] <= 2 P[tau(Z^1) > t]`` allowing for both error bounds."""
    return ibm.log_value - ibm.abs_error_log <= math.log(2.0) + btbm.log_value + btbm.abs_error_log


def tail_prediction(tail: TailLaw) -> AsymptoticPrediction:
    """Log-scale BTBM prediction implied by a hypothesis-level outer tail."""
    from .laplace import saddle_exponent_coefficient
    from .predictors import algebraic_btbm_constant, stretched_tail_btbm_constant

    if tail.kind == "polynomial":
        return AsymptoticPrediction("tail_btbm", 0.0, -1.0, -tail.C / 2, scale="(log t)^-1 log P")
    if tail.kind == "stretched_log":
        return AsymptoticPrediction(
            "tail_btbm", 1 / 3, 4 / (3 * tail.p), -stretched_tail_btbm_constant(tail.C, tail.p),
            scale="t^(-1/3) (log t)^(4/(3p)) log P",
        )
    if tail.kind == "algebraic_log":
        a = tail.alpha
        return AsymptoticPrediction(
            "tail_btbm", (1 - a) / (3 + a), 4 * tail.beta / (3 + a),
            -algebraic_btbm_constant(tail.C, a, tail.beta),
            scale="t^(-(1-a)/(3+a)) (log t)^(4b/(3+a)) log P",
        )
    if tail.kind == "exponential":
        return AsymptoticPrediction(
            "tail_btbm", 1 / 3, 0.0, -saddle_exponent_coefficient(_PI2 / 8, tail.lam), scale="t^(-1/3) log P",
        )
    raise ValueError(f"no asymptotic prediction for a {tail.kind} tail")
