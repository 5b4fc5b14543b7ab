"""Lifetime asymptotics of iterated and Brownian-time Brownian motion.

Closed-form predictors, log-space quadrature of the subordination integrals and
exact-in-law Monte Carlo samplers that cross-check each other.
"""

from .domains import SpectralDomain, domain_from_config, principal, spectrum_box, spectrum_interval
from .exit_laws import bm_exit_cdf, bm_exit_density, eta_survival, interval_survival, sym_eta_density_du
from .laplace import (
    asym_cosine_moment,
    asym_saddle,
    asym_saddle_moment,
    asym_x_plus_inv_sq,
    laplace_point,
    numeric_oracle,
)
from .montecarlo import (
    McEstimate,
    estimate_survival,
    sample_btbm_exit,
    sample_domain_exit,
    sample_ibm_exit,
    sample_interval_exit,
)
from .predictors import (
    AsymptoticPrediction,
    ParabolaParams,
    TwistedParams,
    bessel_zero,
    predict_bounded,
    predict_parabola,
    predict_twisted,
)
from .quadrature import Estimate, log_quad
from .subordination import (
    TailLaw,
    btbm_survival_density,
    btbm_survival_tail,
    ibm_survival,
    log_scaled,
    scaled_ratio,
)
from .tauberian import (
    LaplaceLaw,
    SmallBallLaw,
    debruijn_forward,
    power_law_transform_table,
    stretched_small_ball_constant,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticPrediction", "Estimate", "LaplaceLaw", "McEstimate", "ParabolaParams", "SmallBallLaw",
    "SpectralDomain", "TailLaw", "TwistedParams",
    "asym_cosine_moment", "asym_saddle", "asym_saddle_moment", "asym_x_plus_inv_sq",
    "bessel_zero", "bm_exit_cdf", "bm_exit_density", "btbm_survival_density", "btbm_survival_tail",
    "debruijn_forward", "domain_from_config", "estimate_survival", "eta_survival", "ibm_survival",
    "interval_survival", "laplace_point", "log_quad", "log_scaled", "numeric_oracle",
    "power_law_transform_table", "predict_bounded", "predict_parabola", "predict_twisted", "principal",
    "sample_btbm_exit", "sample_domain_exit", "sample_ibm_exit", "sample_interval_exit", "scaled_ratio",
    "spectrum_box", "spectrum_interval", "stretched_small_ball_constant", "sym_eta_density_du",
]
