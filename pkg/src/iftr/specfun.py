"""Self-contained special-function kernels.

Covers exactly what the fading statistics need: Gauss 2F1 (real arguments
in (-inf, 1) plus the complex off-cut values met on Bromwich contours),
the integer-order Kummer 1F1(m; 1; z) finite sum, the modified Bessel
function I0, and the three-argument Lauricella F_D evaluated through its
one-dimensional Euler integral.

All potentially huge factors are handled in log space; series are summed
with dynamic rescaling so intermediate overflow cannot occur even when the
function value itself only makes sense combined with tiny prefactors.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, gammasgn, logsumexp

__all__ = [
    "ConvergenceError",
    "gauss_2f1",
    "hyp2f1_ln",
    "kummer_1f1",
    "kummer_1f1_ln",
    "bessel_i0",
    "bessel_i0e",
    "log_i0",
    "lauricella_fd3",
    "lauricella_fd3_ln",
]


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to converge within its node budget."""


_MAX_SERIES_TERMS = 500_000
_RESCALE_LIMIT = 1e250
_RESCALE_LOG = math.log(_RESCALE_LIMIT)


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0.0 and abs(x - round(x)) < 1e-12


def _series_2f1_ln(a: float, b: float, c: float, z: np.ndarray, max_terms: int) -> np.ndarray:
    """log of sum_n (a)_n (b)_n / ((c)_n n!) z^n for a flat complex array z.

    Accumulates with dynamic rescaling; raises ConvergenceError if any entry
    fails to settle within ``max_terms``.  Hopeless arguments (the geometric
    tail alone would need more than the budget) fail fast instead of
    iterating.
    """
    if not (_is_nonpositive_int(a) or _is_nonpositive_int(b)):
        worst = float(np.max(np.abs(z))) if z.size else 0.0
        needed = (40.0 + max(0.0, a + b - c)) / max(1.0 - worst, 1e-300)
        if worst >= 1.0 or needed > max_terms:
            raise ConvergenceError(
                f"2F1 series needs ~{needed:.3g} terms for |z|={worst:.6g} "
                f"(budget {max_terms}; a={a}, b={b}, c={c})"
            )
    s = np.ones(z.shape, dtype=complex)
    term = np.ones(z.shape, dtype=complex)
    log_scale = np.zeros(z.shape, dtype=float)
    settled = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    for n in range(max_terms):
        ratio = z * ((a + n) * (b + n) / ((c + n) * (n + 1.0)))
        term = np.where(active, term * ratio, term)
        s = np.where(active, s + term, s)
        small = np.abs(term) <= 1e-17 * np.abs(s)
        settled = np.where(active & small, settled + 1, 0)
        active &= settled < 2
        if not active.any():
            break
        big = active & ((np.abs(s) > _RESCALE_LIMIT) | (np.abs(term) > _RESCALE_LIMIT))
        if big.any():
            s = np.where(big, s / _RESCALE_LIMIT, s)
            term = np.where(big, term / _RESCALE_LIMIT, term)
            log_scale = np.where(big, log_scale + _RESCALE_LOG, log_scale)
    else:
        raise ConvergenceError(
            f"2F1 series did not converge within {max_terms} terms "
            f"(a={a}, b={b}, c={c}, worst |z|={np.abs(z[active]).max():.6g})"
        )
    return np.log(s) + log_scale


def _log_gamma_signed(x: float) -> complex:
    """log Gamma(x) for real non-pole x, as a complex log carrying the sign."""
    if gammasgn(x) < 0.0:
        return gammaln(x) + 1j * math.pi
    return complex(gammaln(x))


def _connection_at_one_ln(a, b, c, omz: np.ndarray, max_terms: int) -> np.ndarray:
    """log 2F1 via the two-series expansion around z = 1 (|1 - z| small).

    Requires c - a - b away from the integers (the caller guards this);
    both inner series then converge geometrically in 1 - z.
    """
    s1 = _series_2f1_ln(a, b, a + b - c + 1.0, omz, max_terms)
    s2 = _series_2f1_ln(c - a, c - b, c - a - b + 1.0, omz, max_terms)
    g1 = (
        _log_gamma_signed(c)
        + _log_gamma_signed(c - a - b)
        - _log_gamma_signed(c - a)
        - _log_gamma_signed(c - b)
    )
    g2 = (
        _log_gamma_signed(c)
        + _log_gamma_signed(a + b - c)
        - _log_gamma_signed(a)
        - _log_gamma_signed(b)
    )
    t1 = g1 + s1
    t2 = g2 + (c - a - b) * np.log(omz) + s2
    shift = np.maximum(t1.real, t2.real)
    return shift + np.log(np.exp(t1 - shift) + np.exp(t2 - shift))


def hyp2f1_ln(a, b, c, z, one_minus_z=None, max_terms: int = _MAX_SERIES_TERMS):
    """Principal-branch log of 2F1(a, b; c; z) for scalar parameters.

    ``z`` may be real or complex, scalar or array, anywhere off the branch
    cut [1, inf).  ``one_minus_z`` may be supplied when ``1 - z`` is known
    more accurately than it can be recomputed.

    Re(z) < 0 or |z| > 1 goes through the Pfaff transformation, |z| <= 0.9
    through the ascending series, and the remaining near-unit annulus
    through Euler's transformation whenever that improves the tail decay.
    """
    a = float(a)
    b = float(b)
    c = float(c)
    if _is_nonpositive_int(c) and not (
        (_is_nonpositive_int(a) and round(a) > round(c))
        or (_is_nonpositive_int(b) and round(b) > round(c))
    ):
        raise ValueError(f"c={c} is a non-positive integer pole of 2F1")
    z_arr = np.asarray(z, dtype=complex)
    flat = z_arr.ravel()
    omz = (
        (1.0 - flat)
        if one_minus_z is None
        else np.asarray(one_minus_z, dtype=complex).ravel()
    )
    out = np.empty(flat.shape, dtype=complex)

    on_cut = (flat.imag == 0.0) & (flat.real >= 1.0)
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if on_cut.any() and not terminating:
        raise ValueError("2F1 argument lies on the branch cut [1, inf)")

    if terminating:
        out[:] = _series_2f1_ln(a, b, c, flat, max_terms)
        return out.reshape(z_arr.shape) if z_arr.shape else out[0]

    use_pfaff = (flat.real < 0.0) | (np.abs(flat) > 1.0)
    rest = ~use_pfaff
    # Expansion around z = 1 wherever it applies: geometric in 1 - z, so it
    # replaces tens of thousands of ascending-series terms near the cut.
    # Needs c - a - b away from the integers (log case not implemented).
    cab = c - a - b
    can_connect = abs(cab - round(cab)) > 1e-6
    if can_connect:
        use_conn = rest & (np.abs(omz) < 0.05)
    else:
        use_conn = np.zeros_like(rest)
    remaining = rest & ~use_conn
    near_one = remaining & (np.abs(flat) > 0.9)
    use_euler = near_one & ((a + b - c) > 0.0)
    use_direct = remaining & ~use_euler

    if use_conn.any():
        out[use_conn] = _connection_at_one_ln(a, b, c, omz[use_conn], max_terms)
    if use_pfaff.any():
        zp = flat[use_pfaff]
        omzp = omz[use_pfaff]
        w = -zp / omzp
        if np.any(np.abs(w) > 0.999):
            raise ConvergenceError(
                "Pfaff-transformed 2F1 argument too close to the unit circle "
                f"(worst |w|={np.abs(w).max():.6g})"
            )
        if a >= b:
            out[use_pfaff] = -b * np.log(omzp) + _series_2f1_ln(c - a, b, c, w, max_terms)
        else:
            out[use_pfaff] = -a * np.log(omzp) + _series_2f1_ln(c - b, a, c, w, max_terms)
    if use_euler.any():
        out[use_euler] = (c - a - b) * np.log(omz[use_euler]) + _series_2f1_ln(
            c - a, c - b, c, flat[use_euler], max_terms
        )
    if use_direct.any():
        out[use_direct] = _series_2f1_ln(a, b, c, flat[use_direct], max_terms)

    return out.reshape(z_arr.shape) if z_arr.shape else out[0]


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z).

    Guaranteed to 1e-12 relative accuracy for real |z| <= 0.99; arguments
    closer to the cut are evaluated on a best-effort basis and raise
    :class:`ConvergenceError` when the node budget runs out.
    """
    ln = hyp2f1_ln(a, b, c, z)
    val = np.exp(ln)
    if np.isrealobj(np.asarray(z)):
        val = np.real_if_close(val, tol=1e3)
        val = np.real(val)
    if np.ndim(z) == 0:
        return complex(val) if np.iscomplexobj(val) else float(val)
    return val


def _check_kummer_order(m) -> int:
    if m != int(m) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return int(m)


def kummer_1f1_ln(m: int, z: float) -> float:
    """log of 1F1(m; 1; z) for positive integer m and z >= 0, via

        1F1(m; 1; z) = e^z  sum_{n=0}^{m-1} C(m-1, n) z^n / n!

    computed as a log-sum-exp so arbitrarily large z is safe.  Negative z
    makes the function oscillate through zero, so no log form exists
    there; use :func:`kummer_1f1`.
    """
    m = _check_kummer_order(m)
    z = float(z)
    if z < 0.0:
        raise ValueError(f"log form needs z >= 0, got {z}")
    if z == 0.0:
        return 0.0
    n = np.arange(m)
    log_binom = gammaln(m) - gammaln(n + 1) - gammaln(m - n)
    return z + float(logsumexp(log_binom + n * math.log(z) - gammaln(n + 1)))


def kummer_1f1(m: int, z: float) -> float:
    """1F1(m; 1; z) for positive integer m (finite Kummer sum).

    Raises OverflowError when the value exceeds double-precision range;
    use :func:`kummer_1f1_ln` in that regime.
    """
    m = _check_kummer_order(m)
    z = float(z)
    if z > 0.0:
        ln = kummer_1f1_ln(m, z)
        if ln > 709.0:
            raise OverflowError(
                f"1F1({m}; 1; {z}) overflows double precision (log value {ln:.3f})"
            )
        return math.exp(ln)
    # Alternating finite sum; fine for the moderate negative arguments the
    # package produces (the function oscillates and may be negative here).
    n = np.arange(m)
    log_mag = gammaln(m) - gammaln(n + 1) - gammaln(m - n) - gammaln(n + 1)
    if z < 0.0:
        log_mag = log_mag + n * math.log(-z)
    total = float(np.sum(np.exp(log_mag) * (-1.0) ** n)) if z < 0.0 else 1.0
    return math.exp(z) * total


# Asymptotic coefficients p_k = prod_{j=1..k} (2j-1)^2 / (k! 8^k) for I0.
_I0_ASYMPTOTIC_ORDER = 22
_I0_P = np.ones(_I0_ASYMPTOTIC_ORDER + 1)
for _k in range(1, _I0_ASYMPTOTIC_ORDER + 1):
    _I0_P[_k] = _I0_P[_k - 1] * (2.0 * _k - 1.0) ** 2 / (8.0 * _k)
_I0_SERIES_RADIUS = 20.0


def _i0_series(z: np.ndarray) -> np.ndarray:
    q = 0.25 * z * z
    term = np.ones(z.shape, dtype=z.dtype)
    s = np.ones(z.shape, dtype=z.dtype)
    for k in range(1, 200):
        term = term * q / (k * k)
        s = s + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(s)):
            break
    return s


def _i0_asymptotic_pieces(z: np.ndarray):
    """(P, Q) tail sums of the large-argument expansion at Re(z) >= 0."""
    inv = 1.0 / z
    p = np.full(z.shape, _I0_P[_I0_ASYMPTOTIC_ORDER], dtype=complex)
    q = p * ((-1.0) ** _I0_ASYMPTOTIC_ORDER)
    for k in range(_I0_ASYMPTOTIC_ORDER - 1, -1, -1):
        p = p * inv + _I0_P[k]
        q = q * inv + _I0_P[k] * ((-1.0) ** k)
    return p, q


def log_i0(z):
    """log I0(z) for real or complex z (principal value of the log).

    Ascending series up to |z| <= 20, large-argument asymptotics beyond,
    including the recessive exponential that matters near the imaginary
    axis.  I0 is even, so the argument is first flipped into Re(z) >= 0.
    """
    z_arr = np.asarray(z, dtype=complex)
    flat = np.where(z_arr.real < 0.0, -z_arr, z_arr).ravel()
    out = np.empty(flat.shape, dtype=complex)
    small = np.abs(flat) <= _I0_SERIES_RADIUS
    if small.any():
        out[small] = np.log(_i0_series(flat[small]))
    big = ~small
    if big.any():
        w = flat[big]
        p, q = _i0_asymptotic_pieces(w)
        sign = np.where(w.imag >= 0.0, 1.0j, -1.0j)
        out[big] = w - 0.5 * np.log(2.0 * math.pi * w) + np.log(p + sign * np.exp(-2.0 * w) * q)
    out = out.reshape(z_arr.shape)
    return out if z_arr.shape else out[()]


def bessel_i0(z):
    """Modified Bessel function of the first kind, order zero."""
    val = np.exp(log_i0(z))
    if np.isrealobj(np.asarray(z)):
        val = np.real(val)
    return val if np.ndim(z) else (complex(val) if np.iscomplexobj(val) else float(val))


def bessel_i0e(x):
    """Exponentially scaled I0: exp(-|Re z|) I0(z).  Overflow-free for real x."""
    z_arr = np.asarray(x, dtype=complex)
    val = np.exp(log_i0(z_arr) - np.abs(z_arr.real))
    if np.isrealobj(np.asarray(x)):
        val = np.real(val)
    return val if np.ndim(x) else (complex(val) if np.iscomplexobj(val) else float(val))


_GL_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _fd3_panel_ln(lo, hi, a, c, b_arr, x_arr):
    """log of the Euler integral restricted to theta in [lo, hi].

    Integrand after t = sin^2(theta):  2 sin^(2a-1) cos^(2c-2a-1) *
    prod_i (1 - x_i sin^2)^(-b_i), all positive, summed in log space.
    """
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    theta = mid + half * _GL_NODES
    sin2 = np.sin(theta) ** 2
    log_f = (
        math.log(2.0)
        + (2.0 * a - 1.0) * np.log(np.sin(theta))
        + (2.0 * (c - a) - 1.0) * np.log(np.cos(theta))
    )
    for b_i, x_i in zip(b_arr, x_arr):
        if b_i != 0.0 and x_i != 0.0:
            log_f = log_f - b_i * np.log1p(-x_i * sin2)
    return float(logsumexp(log_f, b=half * _GL_WEIGHTS))


def lauricella_fd3_ln(a, b1, b2, b3, c, x, y, z, rtol: float = 1e-10) -> float:
    """log of F_D^(3)(a; b1, b2, b3; c; x, y, z) for c > a > 0 and args < 1.

    One-dimensional Euler integral with the t = sin^2(theta) substitution
    (removes both endpoint singularities for the in-model a = 3/2, c = 2),
    then adaptive bisection with fixed-order Gauss-Legendre panels.
    """
    a = float(a)
    c = float(c)
    if not c > a > 0.0:
        raise ValueError(f"need c > a > 0, got a={a}, c={c}")
    b_arr = (float(b1), float(b2), float(b3))
    x_arr = (float(x), float(y), float(z))
    for x_i in x_arr:
        if x_i >= 1.0:
            raise ValueError(f"arguments must be < 1, got {x_i}")

    log_pref = gammaln(c) - gammaln(a) - gammaln(c - a)
    # Panels kept as (lo, hi, coarse log-integral); refined until the
    # bisected estimate agrees with the coarse one.
    panels = [(0.0, 0.5 * math.pi, _fd3_panel_ln(0.0, 0.5 * math.pi, a, c, b_arr, x_arr))]
    for _ in range(200):
        total = logsumexp([p[2] for p in panels])
        refined = []
        worst = 0.0
        for lo, hi, coarse in panels:
            mid = 0.5 * (lo + hi)
            left = _fd3_panel_ln(lo, mid, a, c, b_arr, x_arr)
            right = _fd3_panel_ln(mid, hi, a, c, b_arr, x_arr)
            fine = np.logaddexp(left, right)
            err = abs(math.expm1(coarse - fine)) * math.exp(fine - total)
            if err > 0.05 * rtol:
                refined.append((lo, mid, left))
                refined.append((mid, hi, right))
            else:
                refined.append((lo, hi, fine))
            worst = max(worst, err)
        if len(refined) == len(panels) and worst <= 0.05 * rtol:
            return log_pref + logsumexp([p[2] for p in refined])
        panels = refined
        if len(panels) > 4096:
            break
    raise ConvergenceError(
        f"F_D quadrature did not reach rtol={rtol:g} (panels={len(panels)})"
    )


def lauricella_fd3(a, b1, b2, b3, c, x, y, z, rtol: float = 1e-10) -> float:
    """Lauricella F_D of three variables via its Euler integral."""
    return math.exp(lauricella_fd3_ln(a, b1, b2, b3, c, x, y, z, rtol=rtol))
