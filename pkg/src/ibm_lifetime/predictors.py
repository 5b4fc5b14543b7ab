"""Closed-form lifetime asymptotics for Brownian, iterated and Brownian-time motion.

A prediction states that ``t^{-time_power} (log t)^{log_power} * log P`` tends to
``rate`` (``bound="limit"``), or is eventually at most (``"upper"``) or at least
(``"lower"``) that value.  Sharp predictions additionally carry the constant
``prefactor_constant`` of the un-logged asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import gammaln

from .domains import SpectralDomain, ground_state_product, principal
from .tauberian import stretched_small_ball_constant

_PI2 = math.pi ** 2


@dataclass(frozen=True)
class AsymptoticPrediction:
    name: str
    time_power: float
    log_power: float
    rate: float
    bound: str = "limit"
    sharp: bool = False
    prefactor_constant: float | None = None
    scale: str = ""
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        if self.bound not in ("limit", "upper", "lower"):
            raise ValueError(f"bad bound kind {self.bound!r}")
        if not math.isfinite(self.rate):
            raise ValueError(f"{self.name}: rate is not finite")
        if self.sharp and not (self.prefactor_constant is not None and self.prefactor_constant >= 0):
            raise ValueError(f"{self.name}: sharp predictions need a non-negative prefactor constant")

    @property
    def upper_bound_only(self) -> bool:
        return self.bound == "upper"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "scale": self.scale,
            "time_power": self.time_power,
            "log_power": self.log_power,
            "rate": self.rate,
            "bound": self.bound,
            "sharp": self.sharp,
            "prefactor_constant": self.prefactor_constant,
        }


# ---------------------------------------------------------------------------
# Bounded domains.


def bounded_ibm_rate(lam_d: float) -> float:
    """``-(3/2) pi^{2/3} lam_d^{2/3}``: coefficient of ``t^{1/3}`` in ``log P``."""
    return -1.5 * math.pi ** (2 / 3) * lam_d ** (2 / 3)


def bounded_ibm_constant(lam_d: float, ground: float) -> float:
    """``lam_d 2^{7/2} / sqrt(3 pi) * (psi(z) int psi)^2``."""
    return lam_d * 2 ** 3.5 / math.sqrt(3 * math.pi) * ground ** 2


def earlier_bounded_bounds(lam_d: float) -> tuple[float, float]:
    """Earlier liminf/limsup prefactors per unit ``(psi int psi)^2``: ``2c`` and ``pi c``."""
    c = lam_d * math.sqrt(2 * math.pi / 3)
    return 2 * c, math.pi * c


def predict_bounded(domain: SpectralDomain, z) -> dict[str, AsymptoticPrediction]:
    lam, _ = principal(domain, z)
    ground = ground_state_product(domain, z)
    rate = bounded_ibm_rate(lam)
    return {
        "bm": AsymptoticPrediction(
            "bm", 1.0, 0.0, -lam, sharp=True, prefactor_constant=ground,
            scale="exp(lambda_D t) P -> psi(z) int psi; t^-1 log P -> -lambda_D",
        ),
        "ibm_log": AsymptoticPrediction(
            "ibm_log", 1 / 3, 0.0, rate, scale="t^(-1/3) log P",
        ),
        "ibm_sharp": AsymptoticPrediction(
            "ibm_sharp", 1 / 3, 0.0, rate, sharp=True,
            prefactor_constant=bounded_ibm_constant(lam, ground),
            scale="t^(-1/2) exp(-rate t^(1/3)) P",
        ),
    }


# ---------------------------------------------------------------------------
# Twisted planar domains with growth radius gamma r^p.


@dataclass(frozen=True)
class TwistedParams:
    gamma: float
    p: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")


def twisted_cp(p: float) -> float:
    """Shape constant ``C_p`` of the stretched-exponential Brownian tail (``0 < p < 1``)."""
    log_inner = (
        (2 + p) * math.log(math.pi) - p * math.log(8) - 2 * p * math.log(p) - (1 - p) * math.log(1 - p)
        + 2 * p * (gammaln((1 - p) / (2 * p)) - gammaln(1 / (2 * p)))
    )
    return (1 + p) * math.exp(log_inner / (p + 1))


def twisted_l1(gamma: float, p: float) -> float:
    log_first = (2 * p - 1) * math.log(math.pi) - math.log(gamma) - 2 * p * math.log(2) - 2 * p * math.log(1 - p)
    return math.exp(2 / (p + 1) * log_first) * twisted_cp(p)


def twisted_ibm_rate(l1: float, p: float) -> float:
    log_mag = (
        math.log((3 + p) / (2 + 2 * p))
        + (1 - p) / (3 + p) * math.log((1 + p) / (1 - p))
        + (2 - 2 * p) / (3 + p) * math.log(math.pi)
        + (2 + 2 * p) / (3 + p) * math.log(l1)
    )
    return -math.exp(log_mag)


def twisted_c_gamma(gamma: float) -> float:
    """``pi / (4 arccos(1/sqrt(1+gamma^2)))``: polynomial tail exponent for p = 1."""
    return math.pi / (4 * math.acos(1 / math.sqrt(1 + gamma * gamma)))


def predict_twisted(params: TwistedParams) -> dict[str, AsymptoticPrediction]:
    p, g = params.p, params.gamma
    if p < 1:
        l1 = twisted_l1(g, p)
        ibm = twisted_ibm_rate(l1, p)
        a = (1 - p) / (3 + p)
        return {
            "bm": AsymptoticPrediction("bm", (1 - p) / (1 + p), 0.0, -l1, scale="t^(-(1-p)/(1+p)) log P"),
            "ibm": AsymptoticPrediction("ibm", a, 0.0, ibm, scale="t^(-(1-p)/(3+p)) log P"),
            "btbm": AsymptoticPrediction(
                "btbm", a, 0.0, 2 ** ((2 * p - 2) / (3 + p)) * ibm, scale="t^(-(1-p)/(3+p)) log P",
            ),
        }
    c = twisted_c_gamma(g)
    return {
        "bm": AsymptoticPrediction("bm", 0.0, -1.0, -c, scale="(log t)^-1 log P"),
        "ibm": AsymptoticPrediction(
            "ibm", 0.0, -1.0, -c / 2, bound="upper", scale="(log t)^-1 log P",
            notes="only the limsup bound follows, via P[IBM] <= 2 P[BTBM]",
        ),
        "btbm": AsymptoticPrediction("btbm", 0.0, -1.0, -c / 2, scale="(log t)^-1 log P"),
    }


# ---------------------------------------------------------------------------
# Parabola-shaped regions {y > f(x)}.


@dataclass(frozen=True)
class ParabolaParams:
    """``variant="exp_power"`` uses ``p``; ``"algebraic"`` uses ``A, alpha, beta``.

    ``nu = (n - 2)/2`` selects the Bessel zero ``j_nu``.
    """

    variant: str
    nu: float = 0.0
    p: float | None = None
    A: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.variant == "exp_power":
            if self.p is None or not self.p > 0:
                raise ValueError("exp_power needs p > 0")
        elif self.variant == "algebraic":
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
            if self.A is None or not self.A > 0:
                raise ValueError("A must be > 0")
            if self.beta is None:
                raise ValueError("beta is required")
        else:
            raise ValueError(f"unknown parabola variant {self.variant!r}")


def parabola_exp_constant(j2: float, p: float) -> float:
    """BTBM constant ``(3/2)^{(4+3p)/3p} 2^{1/3} (j^2 2^{2/p})^{2/3} (pi^2/8)^{1/3}``."""
    return 1.5 ** ((4 + 3 * p) / (3 * p)) * 2 ** (1 / 3) * (j2 * 2 ** (2 / p)) ** (2 / 3) * (_PI2 / 8) ** (1 / 3)


def algebraic_bm_constants(A: float, alpha: float, beta: float, j2: float) -> tuple[float, float]:
    """Brownian liminf/limsup constants ``(C_1, C_2)`` for ``h^{-1}(x) = A x^alpha (log x)^beta``."""
    a = alpha
    c1 = 0.5 / (1 - a) * (a ** (-a) * (1 + a) ** (2 * beta + 2) * A ** -2 * j2) ** (1 / (1 + a))
    C = 2 ** (2 * beta - 1) * A ** -2 * j2 / (1 - a)
    c2 = (1 + a) * (2 * a) ** (-a / (1 + a)) * (0.5 * (1 + a)) ** (2 * beta / (1 + a)) * C ** (1 / (1 + a))
    return c1, c2


def algebraic_btbm_constant(c_bm: float, alpha: float, beta: float) -> float:
    """BTBM rate constant for an outer tail ``log P[tau > u] ~ -c u^a (log u)^{-b}``.

    Here ``a = (1-alpha)/(1+alpha)`` and ``b = 2 beta/(1+alpha)``.  The value is
    the minimum of ``pi^2 t/(8u^2) + c u^a (log u)^{-b}`` over ``u``, which is the
    same saddle that gives the twisted-domain and exp-power constants.
    """
    a = alpha
    return (
        (3 + a) / (2 * (1 + a))
        * (_PI2 / 4 * (1 + a) / (1 - a)) ** ((1 - a) / (3 + a))
        * c_bm ** (2 * (1 + a) / (3 + a))
        * ((3 + a) / (1 + a)) ** (4 * beta / (3 + a))
    )


def algebraic_btbm_constant_printed(c_bm: float, alpha: float, beta: float) -> float:
    """The published closed form, kept for comparison.

    It differs from :func:`algebraic_btbm_constant` by the factor
    ``((1-alpha)/(3+alpha)) * (2(1+alpha)/(1-alpha))^{-(1-alpha)/(3+alpha)}``;
    quadrature of the tail-transfer integral converges to the latter.
    """
    a = alpha
    return (
        ((3 + a) / (2 * (1 + a))) ** ((3 + a + 4 * beta) / (3 + a))
        * ((1 - a) / (3 + a))
        * (_PI2 / 8) ** ((1 - a) / (3 + a))
        * c_bm ** (2 * (1 + a) / (3 + a))
        * 2 ** (4 * beta / (3 + a))
    )


def predict_parabola(params: ParabolaParams) -> dict[str, AsymptoticPrediction]:
    j2 = bessel_zero(params.nu) ** 2
    if params.variant == "exp_power":
        p = params.p
        c = parabola_exp_constant(j2, p)
        bm = AsymptoticPrediction("bm", 1.0, 2 / p, -j2, scale="t^-1 (log t)^(2/p) log P")
        btbm = AsymptoticPrediction("btbm", 1 / 3, 4 / (3 * p), -c, scale="t^(-1/3) (log t)^(4/(3p)) log P")
        return {
            "bm_lower": bm, "bm_upper": bm, "btbm_lower": btbm, "btbm_upper": btbm,
            "ibm_upper": AsymptoticPrediction(
                "ibm_upper", 1 / 3, 4 / (3 * p), -c, bound="upper",
                scale="t^(-1/3) (log t)^(4/(3p)) log P",
            ),
        }
    a, b = params.alpha, params.beta
    c1, c2 = algebraic_bm_constants(params.A, a, b, j2)
    bm_a, bm_b = (1 - a) / (1 + a), 2 * b / (1 + a)
    # Both BTBM bounds scale by t^{(1-a)/(3+a)} (log t)^{-4b/(3+a)}, the saddle of the Brownian law.
    bt_a, bt_b = (1 - a) / (3 + a), 4 * b / (3 + a)
    k1, k2 = algebraic_btbm_constant(c1, a, b), algebraic_btbm_constant(c2, a, b)
    printed = (f"published closed form gives {algebraic_btbm_constant_printed(c1, a, b):.6g} "
               f"and {algebraic_btbm_constant_printed(c2, a, b):.6g}")
    bm_scale = "t^(-(1-a)/(1+a)) (log t)^(2b/(1+a)) log P"
    bt_scale = "t^(-(1-a)/(3+a)) (log t)^(4b/(3+a)) log P"
    return {
        "bm_lower": AsymptoticPrediction("bm_lower", bm_a, bm_b, -c1, bound="lower", scale=bm_scale),
        "bm_upper": AsymptoticPrediction("bm_upper", bm_a, bm_b, -c2, bound="upper", scale=bm_scale),
        "btbm_lower": AsymptoticPrediction("btbm_lower", bt_a, bt_b, -k1, bound="lower", scale=bt_scale,
                                           notes=printed),
        "btbm_upper": AsymptoticPrediction("btbm_upper", bt_a, bt_b, -k2, bound="upper", scale=bt_scale,
                                           notes=printed),
        "ibm_upper": AsymptoticPrediction("ibm_upper", bt_a, bt_b, -k2, bound="upper", scale=bt_scale),
    }


def stretched_tail_btbm_constant(C: float, p: float) -> float:
    """BTBM rate constant when ``log P[tau > u] ~ -C u (log u)^{-2/p}``."""
    return stretched_small_ball_constant(C, p).constant * (_PI2 / 8) ** (1 / 3)


# ---------------------------------------------------------------------------
# Bessel zeros.


def _bessel_j(nu: float, x: float) -> float:
    """``J_nu(x)`` from the ascending series, summed until terms are negligible."""
    half = 0.5 * x
    q = -half * half
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1)) if x > 0 else (1.0 if nu == 0 else 0.0)
    terms = [term]
    m = 0
    while m < 60 or abs(term) > 1e-18 * max(abs(t) for t in terms):
        m += 1
        term *= q / (m * (m + nu))
        terms.append(term)
        if m > 400:
            break
    return math.fsum(terms)


def bessel_zero(nu: float) -> float:
    """Smallest positive zero of ``J_nu`` by a sign-change scan and bisection."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    step = 0.1
    lo = step
    f_lo = _bessel_j(nu, lo)
    while True:
        hi = lo + step
        f_hi = _bessel_j(nu, hi)
        if f_lo == 0.0:
            return lo
        if f_lo * f_hi <= 0:
            break
        lo, f_lo = hi, f_hi
        if lo > 10 * nu + 50:
            raise ArithmeticError(f"no sign change of J_{nu} found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = _bessel_j(nu, mid)
        if f_mid == 0.0 or hi - lo < 4e-16 * hi:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)
