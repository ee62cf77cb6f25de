"""Link-performance metrics: average bit error rate and outage probability.

The average error rate of a conditional error probability of the form
``sum_r alpha_r Q(sqrt(beta_r gamma))`` admits three routes that check one
another:

* ``ber_exact`` -- closed form in terms of the three-argument Lauricella
  function, available when a fluctuation shape is a positive integer;
* ``ber_mgf_quadrature`` -- the trigonometric-integral average of the
  Gaussian Q-function against the MGF, valid for any real shapes and used
  as the independent oracle;
* ``ber_monte_carlo`` -- conditional-error averaging over simulated SNR
  draws (lower variance than bit-by-bit counting, same expectation).

Outage is the SNR distribution function at the rate threshold
``2^Rs - 1``, with a one-term high-SNR asymptote sharing its coefficient
with the CDF slope at the origin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, logsumexp

from .params import IftrParams, ModulationSpec, ValidationError
from .sim import SimConfig, sample_iftr
from .stats import cdf, cdf_asymptotic_slope, mgf
from .specfun import lauricella_fd3_ln

__all__ = [
    "BerResult",
    "ber_exact",
    "ber_mgf_quadrature",
    "ber_asymptotic",
    "ber_monte_carlo",
    "outage",
    "outage_asymptotic",
]

_MAX_EXACT_SUM_TERMS = 400


@dataclass(frozen=True)
class BerResult:
    """Average error probability plus how it was computed.

    ``est_error`` is a relative error bound (NaN when no useful bound is
    available, as for the high-SNR asymptote).
    """

    value: float
    method: str
    est_error: float


def _integer_shape_order(p: IftrParams):
    """(m_int, m_other, p_int, p_other) with the integer shape leading,
    or None when neither shape is a positive integer."""
    p1, p2 = p.ray_power_ratios()
    for m_lead, m_other, p_lead, p_other in ((p.m1, p.m2, p1, p2), (p.m2, p.m1, p2, p1)):
        if (
            math.isfinite(m_lead)
            and abs(m_lead - round(m_lead)) < 1e-9
            and 1 <= round(m_lead) <= _MAX_EXACT_SUM_TERMS
            and math.isfinite(m_other)
        ):
            return int(round(m_lead)), float(m_other), p_lead, p_other
    return None


def ber_exact(p: IftrParams, mod: ModulationSpec) -> BerResult:
    """Closed-form average error rate (integer-shape Lauricella route).

    Either shape may be the integer one (the labeling symmetry covers the
    second case).  When neither is a positive integer the closed form does
    not exist and the call transparently falls back to the quadrature
    route, with a warning and the method tag showing what ran.
    """
    order = _integer_shape_order(p)
    if order is None:
        warnings.warn(
            "no positive-integer fluctuation shape: exact closed form "
            "unavailable, using MGF quadrature",
            UserWarning,
            stacklevel=2,
        )
        return ber_mgf_quadrature(p, mod)
    m_int, m_other, p_int, p_other = order
    k, gbar = p.k, p.mean_snr
    mA, mB = float(m_int), m_other
    aA = mA + p_int
    a2 = mA * p_other + mB * p_int + mA * mB
    lam = np.array(
        [
            (1.0 + k) / gbar,
            mA * (1.0 + k) / (aA * gbar),
            mA * mB * (1.0 + k) / (a2 * gbar),
        ]
    )
    fd_rtol = 1e-10
    n_terms = 1 if (k == 0.0 or p.delta == 0.0) else m_int
    term_logs = []
    term_signs = []
    for n in range(n_terms):
        log_coeff = (
            math.log1p(k)
            - math.log(gbar)
            + mA * math.log(mA)
            + mB * math.log(mB)
            + (mB - mA) * math.log(aA)
            - gammaln(n + 1)
            + gammaln(mA)
            - gammaln(n + 1)
            - gammaln(mA - n)
            + gammaln(mB + n)
            - gammaln(mB)
            - (mB + n) * math.log(a2)
        )
        if n > 0:
            log_coeff += 2.0 * n * math.log(0.5 * k * p.delta)
        b = (n + 1.0 - mA, mA - mB, mB + n)
        for alpha, beta in mod.terms:
            if alpha == 0.0:
                continue
            args = tuple(-2.0 * l / beta for l in lam)
            log_fd = lauricella_fd3_ln(1.5, b[0], b[1], b[2], 2.0, *args, rtol=fd_rtol)
            term_logs.append(log_coeff + math.log(abs(alpha) / (2.0 * beta)) + log_fd)
            term_signs.append(math.copysign(1.0, alpha))
    log_total, sign = logsumexp(term_logs, b=term_signs, return_sign=True)
    value = float(sign) * math.exp(float(log_total))
    return BerResult(value=value, method="lauricella-exact", est_error=10.0 * fd_rtol)


def ber_mgf_quadrature(p: IftrParams, mod: ModulationSpec) -> BerResult:
    """Average error rate by adaptive quadrature of the Q-function average:

        (1/pi) sum_r alpha_r  integral_0^{pi/2} M(-beta_r / (2 sin^2 t)) dt.

    Valid for any real shapes; this is the independent oracle for the
    closed form.
    """
    total = 0.0
    err = 0.0
    for alpha, beta in mod.terms:
        if alpha == 0.0:
            continue

        def integrand(theta, beta=beta):
            sin2 = math.sin(theta) ** 2
            if sin2 == 0.0:
                return 0.0
            return float(mgf(p, -0.5 * beta / sin2))

        val, abserr = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-11, limit=200)
        total += alpha * val / math.pi
        err += abs(alpha) * abserr / math.pi
    if total <= 0.0:
        raise ValidationError(f"quadrature produced non-positive error rate {total!r}")
    return BerResult(value=total, method="mgf-quadrature", est_error=err / total)


def ber_asymptotic(p: IftrParams, mod: ModulationSpec) -> BerResult:
    """One-term high-mean-SNR approximation; decays exactly as 1/mean_snr.

    Shares its coefficient with the origin slope of the CDF:
    ``0.5 * slope * sum_r alpha_r / beta_r``.
    """
    weight = sum(alpha / beta for alpha, beta in mod.terms)
    value = 0.5 * cdf_asymptotic_slope(p) * weight
    return BerResult(value=value, method="asymptotic", est_error=math.nan)


def ber_monte_carlo(p: IftrParams, mod: ModulationSpec, n_samples: int = 10_000_000, seed: int = 0) -> BerResult:
    """Conditional-error averaging over simulated SNR draws.

    ``est_error`` is the one-sigma relative standard error of the mean.
    """
    snr = sample_iftr(p, SimConfig(n_samples=n_samples, seed=seed, output="snr"))
    cep = mod.cep(snr)
    value = float(cep.mean())
    se = float(cep.std(ddof=1) / math.sqrt(n_samples))
    return BerResult(value=value, method="monte-carlo", est_error=se / value if value > 0 else math.inf)


def outage(p: IftrParams, rate_threshold: float, cfg=None) -> float:
    """Probability that log2(1 + gamma) falls below ``rate_threshold``."""
    if rate_threshold < 0.0:
        raise ValidationError(f"rate threshold must be >= 0, got {rate_threshold}")
    x = 2.0 ** rate_threshold - 1.0
    if x == 0.0:
        return 0.0
    return float(cdf(p, x, cfg=cfg))


def outage_asymptotic(p: IftrParams, rate_threshold: float) -> float:
    """High-mean-SNR outage approximation: origin CDF slope times threshold."""
    if rate_threshold < 0.0:
        raise ValidationError(f"rate threshold must be >= 0, got {rate_threshold}")
    return cdf_asymptotic_slope(p) * (2.0 ** rate_threshold - 1.0)
