"""Distribution of the received SNR (or squared envelope) of the channel.

The moment generating function is available in closed form for arbitrary
real fluctuation shapes; when the shape attached to one ray is a positive
integer it collapses to a finite sum of elementary terms.  Densities and
distribution functions are obtained by numerically inverting the MGF on a
Bromwich contour (the default, valid for any shapes), or -- for integer
shapes -- through the confluent-hypergeometric closed form whose terms are
themselves inverted factor by factor.  The two routes cross-validate each
other.

Frozen fluctuations are requested with ``m = math.inf``: both shapes
infinite gives the two-wave-with-diffuse-power (TWDP) limit, additionally
``delta = 0`` gives Rice, and ``delta = 0`` with finite ``m1`` is the
Rician-shadowed special case.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .laplace import (
    LaplaceInversionConfig,
    laplace_invert_cdf,
    laplace_invert_density,
    log1p_c,
    phi2_multi_rate,
)
from .params import IftrParams, ValidationError
from .specfun import hyp2f1_ln, kummer_1f1_ln, log_i0

__all__ = [
    "DistributionDomain",
    "IftrDerived",
    "ApproximationWarning",
    "mgf",
    "mgf_integer_m1",
    "twdp_limit_mgf",
    "rice_mgf",
    "rician_shadowed_mgf",
    "rician_shadowed_pdf",
    "pdf",
    "cdf",
    "cdf_asymptotic_slope",
    "convergence_abscissa",
]

POLE_TOLERANCE = 1e-12


class ApproximationWarning(UserWarning):
    """A returned value is a documented one-sided approximation."""


class DistributionDomain(Enum):
    """Interpretation of abscissae: instantaneous SNR or signal envelope.

    In the envelope domain the scale parameter of :class:`IftrParams` is
    read as the mean squared envelope and densities transform as
    ``f_r(r) = 2 r f_snr(r^2)``, ``F_r(r) = F_snr(r^2)``.
    """

    SNR = "snr"
    ENVELOPE = "envelope"


def _as_domain(domain) -> DistributionDomain:
    return domain if isinstance(domain, DistributionDomain) else DistributionDomain(domain)


@dataclass(frozen=True)
class IftrDerived:
    """Cached constants of the factorized MGF.

    ``a1 = m1 + p1`` and ``a2 = m1 p2 + m2 p1 + m1 m2`` locate the contour
    singularities; ``log_prefactors`` holds the per-summand log
    coefficients of the finite-sum (integer shape) forms, empty when the
    leading shape is not a positive integer.
    """

    a1: float
    a2: float
    log_prefactors: tuple

    @classmethod
    def from_params(cls, p: IftrParams) -> "IftrDerived":
        p1, p2 = p.ray_power_ratios()
        m1, m2 = p.m1, p.m2
        a1 = m1 + p1
        a2 = m1 * p2 + m2 * p1 + m1 * m2
        prefactors: tuple = ()
        if m1 == round(m1) and m1 >= 1 and math.isfinite(m1) and math.isfinite(m2):
            n = np.arange(int(m1))
            logc = (
                -gammaln(n + 1)
                + gammaln(m1)
                - gammaln(n + 1)
                - gammaln(m1 - n)
                + gammaln(m2 + n)
                - gammaln(m2)
            )
            prefactors = tuple(float(v) for v in logc)
        derived = cls(a1=a1, a2=a2, log_prefactors=prefactors)
        assert derived.a1 >= m1 > 0.0 or not math.isfinite(m1)
        assert derived.a2 >= m1 * m2 > 0.0 or not (math.isfinite(m1) and math.isfinite(m2))
        return derived


def _contour_pieces(k: float, mean_snr: float, s):
    """(A, log B, s as array) for the rational contour kernels.

    ``A = gbar s / (1 + K - gbar s)`` and ``B = (1 + K) / (1 + K - gbar s)``.
    Raises on pole proximity.
    """
    s_arr = np.asarray(s, dtype=complex)
    t = mean_snr * s_arr
    denom = (1.0 + k) - t
    if np.any(np.abs(denom) < POLE_TOLERANCE):
        raise ValueError(f"MGF pole proximity: |1 + K - gbar s| < {POLE_TOLERANCE:g}")
    a_frac = t / denom
    log_b = math.log1p(k) - np.log(denom)
    return a_frac, log_b, s_arr


def _finalize(values: np.ndarray, s) -> np.ndarray | complex | float:
    if np.ndim(s) == 0:
        value = complex(values)
        if np.isrealobj(np.asarray(s)) and abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)):
            return value.real
        return value
    if np.isrealobj(np.asarray(s)):
        if np.all(np.abs(values.imag) <= 1e-12 * np.maximum(1.0, np.abs(values.real))):
            return values.real
    return values


def _check_shapes_supported(p: IftrParams) -> None:
    inf1 = p.m1 == math.inf
    inf2 = p.m2 == math.inf
    if p.delta > 0.0 and (inf1 != inf2):
        raise NotImplementedError(
            "frozen fluctuation on only one ray with delta > 0 has no closed "
            "MGF here; freeze both shapes or keep both finite"
        )


def twdp_limit_mgf(k: float, delta: float, mean_snr: float, s):
    """MGF of the frozen-fluctuation (TWDP) limit: B exp(K A) I0(Delta K A)."""
    a_frac, log_b, s_arr = _contour_pieces(k, mean_snr, s)
    exponent = log_b + k * a_frac
    if delta > 0.0 and k > 0.0:
        exponent = exponent + log_i0(delta * k * a_frac)
    return _finalize(np.exp(exponent), s)


def rice_mgf(k: float, mean_snr: float, s):
    """Rice MGF (single non-fluctuating specular ray)."""
    return twdp_limit_mgf(k, 0.0, mean_snr, s)


def rician_shadowed_mgf(k: float, m: float, mean_snr: float, s):
    """Rician-shadowed MGF (single ray with Gamma fluctuation of shape m)."""
    a_frac, log_b, s_arr = _contour_pieces(k, mean_snr, s)
    if m == math.inf:
        return rice_mgf(k, mean_snr, s)
    exponent = log_b - m * log1p_c(-(k / m) * a_frac)
    return _finalize(np.exp(exponent), s)


def mgf(p: IftrParams, s):
    """Moment generating function E[exp(s gamma)] of the SNR.

    Valid for real s <= 0 and complex s with ``Re(gbar s) < 1 + K`` away
    from the transform singularities (automatic on inversion contours).
    M(0) = 1 exactly.  Shapes set to ``math.inf`` route to the matching
    frozen-fluctuation closed form.
    """
    _check_shapes_supported(p)
    if p.m1 == math.inf and (p.m2 == math.inf or p.delta == 0.0):
        return twdp_limit_mgf(p.k, p.delta, p.mean_snr, s)
    p1, p2 = p.ray_power_ratios()
    m1 = p.m1
    # With delta == 0 the weaker-ray factor is identically 1, so an infinite
    # m2 is inert; substitute a benign finite value for the arithmetic.
    m2 = 1.0 if (p2 == 0.0 and p.m2 == math.inf) else p.m2
    a_frac, log_b, s_arr = _contour_pieces(p.k, p.mean_snr, s)

    exponent = log_b
    if p1 > 0.0:
        exponent = exponent - m1 * log1p_c(-(p1 / m1) * a_frac)
    if p2 > 0.0:
        exponent = exponent - m2 * log1p_c(-(p2 / m2) * a_frac)
    if p1 > 0.0 and p2 > 0.0:
        f1 = m1 - p1 * a_frac
        f2 = m2 - p2 * a_frac
        z = (p1 * p2) * a_frac * a_frac / (f1 * f2)
        one_minus_z = (m1 * m2 - (m1 * p2 + m2 * p1) * a_frac) / (f1 * f2)
        exponent = exponent + hyp2f1_ln(m1, m2, 1.0, z, one_minus_z=one_minus_z)
    return _finalize(np.exp(exponent), s)


def _integer_shape(value: float) -> int | None:
    if math.isfinite(value) and abs(value - round(value)) < 1e-9 and round(value) >= 1:
        return int(round(value))
    return None


def _finite_sum_mgf(k, delta, m_int, m_other, p_int, p_other, mean_snr, s):
    """Finite-sum MGF with the integer shape attached to the ray of power
    ratio ``p_int``; the two orderings realize the labeling symmetry."""
    a_frac, log_b, s_arr = _contour_pieces(k, mean_snr, s)
    a_flat = np.atleast_1d(a_frac).ravel()
    log_b_flat = np.atleast_1d(log_b).ravel()
    m1, m2 = float(m_int), float(m_other)
    cross = m1 * p_other + m2 * p_int  # symmetric bracket rate coefficient
    bracket = m1 * m2 - cross * a_flat
    lead = m1 - p_int * a_flat

    n = np.arange(m_int)
    logc = (
        -gammaln(n + 1)
        + gammaln(m1)
        - gammaln(n + 1)
        - gammaln(m1 - n)
        + gammaln(m2 + n)
        - gammaln(m2)
    )
    # 2n log(K Delta A / 2) - (m2 + n) log(bracket), accumulated at scaled
    # magnitude; all terms are positive for real s <= 0.
    half_kda = 0.5 * k * delta * a_flat
    vanished = half_kda == 0.0
    log_half = np.log(np.where(vanished, 1.0, half_kda))
    log_terms = (
        logc[:, None]
        + 2.0 * n[:, None] * log_half[None, :]
        - (m2 + n)[:, None] * np.log(bracket)[None, :]
    )
    # Only the n = 0 summand survives where the cross-ray factor vanishes.
    dead = vanished[None, :] & (n[:, None] > 0)
    shift = np.max(np.where(dead, -np.inf, log_terms.real), axis=0)
    total = np.sum(np.where(dead, 0.0, np.exp(log_terms - shift[None, :])), axis=0)
    log_pref = (
        log_b_flat
        + m1 * math.log(m1)
        + m2 * math.log(m2)
        + (m2 - m1) * np.log(lead)
    )
    values = np.exp(log_pref + shift) * total
    return _finalize(values.reshape(np.shape(s_arr)), s)


def mgf_integer_m1(p: IftrParams, s):
    """Finite-sum MGF for integer m1 (or, by the labeling symmetry, m2).

    Agrees with :func:`mgf` to better than 1e-9 relative; mainly a
    cross-validation surface and the basis of the closed-form PDF/CDF.
    """
    if not (math.isfinite(p.m1) and math.isfinite(p.m2)):
        raise ValidationError("finite-sum MGF needs finite fluctuation shapes")
    p1, p2 = p.ray_power_ratios()
    m1_int = _integer_shape(p.m1)
    if m1_int is not None:
        return _finite_sum_mgf(p.k, p.delta, m1_int, p.m2, p1, p2, p.mean_snr, s)
    m2_int = _integer_shape(p.m2)
    if m2_int is not None:
        return _finite_sum_mgf(p.k, p.delta, m2_int, p.m1, p2, p1, p.mean_snr, s)
    raise ValidationError(
        f"neither m1={p.m1} nor m2={p.m2} is a positive integer"
    )


def convergence_abscissa(p: IftrParams) -> float:
    """Leftmost singularity of the MGF on the positive real s-axis.

    Equals ``(1 + K) / gbar * m1 m2 / a2``; the inversion contours used
    here keep Re(s) > 0 in the transform variable, i.e. strictly left of
    it, which this bound documents and the tests assert.
    """
    p1, p2 = p.ray_power_ratios()
    inv = 1.0 + (p1 / p.m1 if p.m1 != math.inf else 0.0) + (
        p2 / p.m2 if p.m2 != math.inf else 0.0
    )
    return (1.0 + p.k) / p.mean_snr / inv


def _snr_abscissae(p, x, domain):
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if _as_domain(domain) is DistributionDomain.ENVELOPE:
        return x_arr * x_arr
    return x_arr


def _inversion_config(p: IftrParams, x_snr: np.ndarray, cfg):
    """Size the contour to the transform scale when no config was given.

    The MGF varies on |s| ~ (1 + K) / mean_snr; a contour for abscissa x
    reaches |s| ~ pi * terms / x, so resolving a sharply concentrated
    (large K) distribution needs terms growing like x (1 + K) / mean_snr.
    An explicit config is honored as-is; either way a warning flags
    abscissae beyond what the node cap can resolve.
    """
    demand = float(np.max(x_snr)) * (1.0 + p.k) / p.mean_snr
    needed = int(math.ceil(2.0 * demand / math.pi)) + 16
    if cfg is None:
        cfg = LaplaceInversionConfig(terms=min(max(64, needed), 512))
    if needed > cfg.terms:
        warnings.warn(
            f"contour with {cfg.terms} nodes cannot resolve the transform "
            f"scale (x (1+K)/scale = {demand:.3g}); deep-saturation values "
            "may be inflated -- raise terms or use the closed-form route",
            ApproximationWarning,
            stacklevel=3,
        )
    return cfg


def pdf(p: IftrParams, x, domain=DistributionDomain.SNR, cfg: LaplaceInversionConfig | None = None, method: str = "inversion"):
    """Density of the SNR (or of the envelope, with the scale read as the
    mean squared envelope).

    ``method='inversion'`` (default) inverts the general MGF and works for
    any real shapes; ``method='closed-form'`` uses the integer-shape
    confluent-hypergeometric form as an independent route.  ``x = 0``
    returns a one-sided extrapolation from 1e-8 * scale and warns.
    """
    domain = _as_domain(domain)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0):
        raise ValueError("abscissae must be >= 0")
    at_zero = x_arr == 0.0
    if at_zero.any():
        warnings.warn(
            "density at 0 is extrapolated one-sidedly from 1e-8 * scale",
            ApproximationWarning,
            stacklevel=2,
        )
    eps0 = 1e-8 * p.mean_snr
    x_snr = _snr_abscissae(p, np.where(at_zero, math.sqrt(eps0) if domain is DistributionDomain.ENVELOPE else eps0, x_arr), domain)

    if method == "closed-form":
        vals = _closed_form_distribution(p, x_snr, cfg, cumulative=False)
    elif method == "inversion":
        vals = laplace_invert_density(
            lambda s: mgf(p, -s), x_snr, _inversion_config(p, x_snr, cfg)
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = np.atleast_1d(np.asarray(vals, dtype=float))
    if domain is DistributionDomain.ENVELOPE:
        r = np.where(at_zero, math.sqrt(eps0), x_arr)
        vals = 2.0 * r * vals
    return vals if np.ndim(x) else float(vals[0])


def cdf(p: IftrParams, x, domain=DistributionDomain.SNR, cfg: LaplaceInversionConfig | None = None, method: str = "inversion"):
    """Distribution function; nondecreasing with F(0) = 0, clamped to [0, 1].

    Within one call the values are projected onto the nondecreasing cone
    (in abscissa order): the exact distribution function is monotone, so
    the projection only removes sub-precision inversion wiggle near
    saturation.  No ordering is guaranteed across separate calls beyond
    the engine precision.
    """
    domain = _as_domain(domain)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0):
        raise ValueError("abscissae must be >= 0")
    positive = x_arr > 0.0
    out = np.zeros(x_arr.shape, dtype=float)
    if positive.any():
        x_snr = _snr_abscissae(p, x_arr[positive], domain)
        if method == "closed-form":
            vals = _closed_form_distribution(p, x_snr, cfg, cumulative=True)
        elif method == "inversion":
            vals = laplace_invert_cdf(
                lambda s: mgf(p, -s), x_snr, _inversion_config(p, x_snr, cfg)
            )
        else:
            raise ValueError(f"unknown method {method!r}")
        vals = np.atleast_1d(np.asarray(vals, dtype=float))
        order = np.argsort(x_snr, kind="stable")
        vals[order] = np.maximum.accumulate(vals[order])
        out[positive] = vals
    return out if np.ndim(x) else float(out[0])


def _closed_form_distribution(p: IftrParams, x_snr: np.ndarray, cfg, cumulative: bool):
    """Integer-shape confluent-hypergeometric route for the PDF/CDF.

    Each summand is a three-rate confluent function evaluated through a
    term-wise Laplace inversion of the factorized MGF.
    """
    if not (math.isfinite(p.m1) and math.isfinite(p.m2)):
        raise ValidationError("closed-form route needs finite fluctuation shapes")
    p1, p2 = p.ray_power_ratios()
    m1_int = _integer_shape(p.m1)
    if m1_int is not None:
        m_int, m_other, p_int, p_other = m1_int, p.m2, p1, p2
    else:
        m2_int = _integer_shape(p.m2)
        if m2_int is None:
            raise ValidationError(
                f"closed-form route needs an integer shape; got m1={p.m1}, m2={p.m2}"
            )
        m_int, m_other, p_int, p_other = m2_int, p.m1, p2, p1

    k, gbar = p.k, p.mean_snr
    mA, mB = float(m_int), float(m_other)
    aA = mA + p_int
    a2 = mA * p_other + mB * p_int + mA * mB
    lam = np.array(
        [
            -(1.0 + k) / gbar,
            -mA * (1.0 + k) / (aA * gbar),
            -mA * mB * (1.0 + k) / (a2 * gbar),
        ]
    )
    c = 2.0 if cumulative else 1.0
    n_terms = 1 if (k == 0.0 or p.delta == 0.0) else m_int
    total = np.zeros(x_snr.shape, dtype=float)
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
        b = np.array([n + 1.0 - mA, mA - mB, mB + n])
        phi = phi2_multi_rate(b, c, lam, x_snr, cfg)
        total = total + math.exp(log_coeff) * np.atleast_1d(np.asarray(phi))
    if cumulative:
        total = total * x_snr
        total = np.clip(total, 0.0, 1.0)
    else:
        total = np.maximum(total, 0.0)
    return total


def cdf_asymptotic_slope(p: IftrParams) -> float:
    """Coefficient c with F(x) ~ c x in the high-mean-SNR (deep fade) regime.

    The distribution has diversity order one; this is the exact leading
    coefficient of the CDF at the origin.
    """
    p1, p2 = p.ray_power_ratios()
    log_val = math.log1p(p.k) - math.log(p.mean_snr)
    if p.m1 == math.inf and (p.m2 == math.inf or p.delta == 0.0):
        # Frozen limit: the shape factors tend to exp(-p_i) and the Gauss
        # factor to I0(K Delta).
        log_val += -p.k
        if p.delta > 0.0:
            log_val += float(np.real(log_i0(p.delta * p.k)))
        return math.exp(log_val)
    _check_shapes_supported(p)
    if p1 > 0.0:
        log_val += p.m1 * (math.log(p.m1) - math.log(p.m1 + p1))
    if p2 > 0.0:
        m2 = 1.0 if p.m2 == math.inf else p.m2
        log_val += m2 * (math.log(m2) - math.log(m2 + p2))
    if p1 > 0.0 and p2 > 0.0:
        denom = (p.m1 + p1) * (p.m2 + p2)
        z = p1 * p2 / denom
        a2 = p.m1 * p2 + p.m2 * p1 + p.m1 * p.m2
        log_val += float(np.real(hyp2f1_ln(p.m1, p.m2, 1.0, z, one_minus_z=a2 / denom)))
    return math.exp(log_val)


def rician_shadowed_pdf(k: float, m: int, mean_snr: float, x):
    """Closed-form Rician-shadowed SNR density for integer shape m.

    Serves as an independent reference for the ``delta -> 0`` behavior of
    the two-ray model.
    """
    m_int = _integer_shape(float(m))
    if m_int is None:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    rate = (1.0 + k) / mean_snr
    log_pref = math.log(rate) + m_int * (math.log(m_int) - math.log(m_int + k))
    arg_scale = k * rate / (m_int + k)
    vals = np.array(
        [
            math.exp(log_pref - rate * xi + kummer_1f1_ln(m_int, arg_scale * xi))
            for xi in x_arr
        ]
    )
    return vals if np.ndim(x) else float(vals[0])
