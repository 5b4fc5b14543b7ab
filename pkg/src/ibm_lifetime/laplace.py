"""Laplace-method asymptotics for the saddle integrals behind the lifetime rates.

Every asymptotic formula has a ``log=True`` form in which the exponential part
is exact algebra; large-``t`` values such as ``exp(-933)`` are only meaningful
in that form.  :func:`numeric_oracle` evaluates the corresponding integrals by
adaptive quadrature so each formula can be checked independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import Estimate, log_quad

_PI2 = math.pi ** 2
_CBRT2 = 2.0 ** (1.0 / 3.0)


@dataclass(frozen=True)
class LaplaceProblem:
    """``int h(x) exp(lam f(x)) dx`` with an interior maximum of ``f`` at ``x0``."""

    h: Callable[[float], float]
    f: Callable[[float], float]
    x0: float
    f2: float

    def check(self, probe: np.ndarray | None = None) -> None:
        if not self.f2 < 0:
            raise ValueError(f"second derivative at the maximum must be negative, got {self.f2}")
        if self.h(self.x0) == 0:
            raise ValueError("h(x0) must be non-zero")
        if probe is not None:
            fx0 = self.f(self.x0)
            worst = max(self.f(float(x)) for x in probe)
            if worst > fx0 + 1e-12 * max(1.0, abs(fx0)):
                raise ValueError("f(x0) is not the maximum over the probe grid")


def laplace_point(problem: LaplaceProblem, lam: float, log: bool = False) -> float:
    """One-term approximation ``h(x0) e^{lam f(x0)} sqrt(2 pi / (lam |f''(x0)|))``."""
    problem.check()
    if not lam > 0:
        raise ValueError("lam must be positive")
    h0 = problem.h(problem.x0)
    logv = math.log(abs(h0)) + lam * problem.f(problem.x0) + 0.5 * math.log(2 * math.pi / (lam * abs(problem.f2)))
    if log:
        if h0 < 0:
            raise ValueError("log form needs h(x0) > 0")
        return logv
    return math.copysign(math.exp(logv), h0)


# Saddle exponent shared by the three t-integrals: 3 a^{1/3} b^{2/3} 2^{-2/3} t^{1/3}.
def saddle_exponent_coefficient(a: float, b: float) -> float:
    return 3.0 * a ** (1.0 / 3.0) * b ** (2.0 / 3.0) / _CBRT2 ** 2


def saddle_point(a: float, b: float, t: float) -> float:
    """Maximiser of ``-a t/u^2 - b u``."""
    return (2.0 * a * t / b) ** (1.0 / 3.0)


def asym_x_plus_inv_sq(lam: float, log: bool = False) -> float:
    """``int_0^inf exp(-lam (x + x^-2)) dx ~ exp(-3 lam 2^{-2/3}) sqrt(2^{4/3} pi / (3 lam))``."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    logv = -3.0 * lam / _CBRT2 ** 2 + 0.5 * math.log(_CBRT2 ** 4 * math.pi / (3.0 * lam))
    return logv if log else math.exp(logv)


def asym_saddle(a: float, b: float, t: float, log: bool = False) -> float:
    """``int_0^inf exp(-a t/u^2 - b u) du`` for large ``t``."""
    _check_abt(a, b, t)
    logv = (
        0.5 * math.log(math.pi / 3.0) + (2.0 / 3.0) * math.log(2.0)
        + math.log(a) / 6.0 - (2.0 / 3.0) * math.log(b) + math.log(t) / 6.0
        - saddle_exponent_coefficient(a, b) * t ** (1.0 / 3.0)
    )
    return logv if log else math.exp(logv)


def asym_saddle_moment(a: float, b: float, t: float, log: bool = False) -> float:
    """``int_0^inf u exp(-a t/u^2 - b u) du`` for large ``t``."""
    _check_abt(a, b, t)
    logv = (
        math.log(2.0) + 0.5 * math.log(math.pi / 3.0) + 0.5 * math.log(a) - math.log(b)
        + 0.5 * math.log(t) - saddle_exponent_coefficient(a, b) * t ** (1.0 / 3.0)
    )
    return logv if log else math.exp(logv)


def asym_cosine_moment(K: float, lam_d: float, t: float, log: bool = False) -> float:
    """``int_0^inf x cos(pi K/x) exp(-pi^2 t/(2x^2) - lam_d x) dx`` for large ``t``.

    The cosine tends to one at the saddle, so the leading term does not depend
    on ``K``; it is the ``a = pi^2/2`` case of :func:`asym_saddle_moment`.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    return asym_saddle_moment(_PI2 / 2.0, lam_d, t, log=log)


def _check_abt(a, b, t):
    if not (a > 0 and b > 0 and t > 0):
        raise ValueError(f"need a, b, t > 0, got a={a}, b={b}, t={t}")


# ---------------------------------------------------------------------------
# Quadrature oracle.

KINDS = ("x_plus_inv_sq", "saddle", "saddle_moment", "cosine_moment", "gaussian")


def _integrand(kind: str, params: dict, s: float):
    """Return (log|f|, sign or None, argmax, log upper-tail bound(X), log lower-tail bound(x))."""
    if kind == "x_plus_inv_sq":
        lam = s
        x0 = _CBRT2
        log_f = lambda x: -lam * (x + x ** -2.0)
        hi_tail = lambda X: -lam * X - math.log(lam)
        lo_tail = lambda x: math.log(x) - lam / (x * x)
        return log_f, None, x0, hi_tail, lo_tail
    if kind == "gaussian":
        log_f = lambda x: -x * x
        hi_tail = lambda X: -X * X - math.log(2 * X)
        return log_f, None, 1.0 / math.sqrt(2.0), hi_tail, None
    if kind in ("saddle", "saddle_moment", "cosine_moment"):
        t = s
        if kind == "cosine_moment":
            a, b = _PI2 / 2.0, params["lam_d"]
            K = params.get("K", 0.0)
        else:
            a, b = params["a"], params["b"]
            K = 0.0
        power = 0 if kind == "saddle" else 1
        x0 = saddle_point(a, b, t)

        def log_f(u):
            with np.errstate(divide="ignore"):
                base = -a * t / (u * u) - b * u + power * np.log(u)
                if K:
                    base = base + np.log(np.abs(np.cos(math.pi * K / u)))
            return base

        sign = (lambda u: np.sign(np.cos(math.pi * K / u))) if K else None
        # int_X^inf u^p e^{-bu} du <= (X^p/b + p/b^2) e^{-bX}
        hi_tail = lambda X: -b * X + math.log(X ** power / b + power / b ** 2)
        # int_0^x u^p e^{-at/u^2} du <= x^{p+1} e^{-at/x^2}
        lo_tail = lambda x: (power + 1) * math.log(x) - a * t / (x * x)
        return log_f, sign, x0, hi_tail, lo_tail
    raise ValueError(f"unknown integral kind {kind!r}; expected one of {KINDS}")


def numeric_oracle(kind: str, params: dict | None, s: float, rtol: float = 1e-10, span: float = 50.0) -> Estimate:
    """Adaptive log-space quadrature of the integral named by ``kind``.

    ``s`` is ``lam`` for ``x_plus_inv_sq`` and ``t`` for the saddle kinds.  The
    range is ``[x0/span, span*x0]`` around the maximiser ``x0``; both cut-off
    tails are bounded analytically and included in the reported error.
    """
    if rtol < 1e-10:
        raise ValueError("requested relative tolerance must be >= 1e-10")
    params = params or {}
    log_f, sign, x0, hi_tail, lo_tail = _integrand(kind, params, s)
    lo = 0.0 if lo_tail is None else x0 / span
    hi = x0 * span
    tails = [hi_tail(hi)]
    if lo_tail is not None:
        tails.append(lo_tail(lo))
    extra = float(np.logaddexp.reduce(tails))
    # Breakpoints at multiples of the Gaussian width of the peak, then geometric.
    h = 1e-4 * x0
    curv = -(log_f(np.array([x0 + h]))[0] - 2 * log_f(np.array([x0]))[0] + log_f(np.array([x0 - h]))[0]) / h ** 2
    width = 1.0 / math.sqrt(curv) if curv > 0 else 0.1 * x0
    local = [x0 + j * width for j in (-12, -8, -5, -3, -2, -1, 0, 1, 2, 3, 5, 8, 12)]
    wide = [x0 * f for f in (0.25, 0.5, 2.0, 4.0)]
    breaks = [x for x in local + wide if lo < x < hi]
    est = log_quad(log_f, lo, hi, breakpoints=breaks, rtol=rtol, extra_log_error=extra, sign=sign,
                   max_panels=4000)
    if not est.converged:
        raise ArithmeticError(
            f"quadrature for {kind} at {s:g} did not converge; partial log-value {est.log_value:.12g} "
            f"+/- {est.abs_error_log:.3g}"
        )
    return est


def ratio_to_asymptotic(kind: str, params: dict | None, s: float) -> float:
    """Quadrature value divided by the matching asymptotic formula (in log-space)."""
    params = params or {}
    est = numeric_oracle(kind, params, s)
    if kind == "x_plus_inv_sq":
        ref = asym_x_plus_inv_sq(s, log=True)
    elif kind == "saddle":
        ref = asym_saddle(params["a"], params["b"], s, log=True)
    elif kind == "saddle_moment":
        ref = asym_saddle_moment(params["a"], params["b"], s, log=True)
    elif kind == "cosine_moment":
        ref = asym_cosine_moment(params.get("K", 0.0), params["lam_d"], s, log=True)
    else:
        raise ValueError(f"no asymptotic formula for {kind!r}")
    return est.sign * math.exp(est.log_value - ref)
