"""Empirical-CDF ingestion and parameter estimation.

The goodness-of-fit statistic is the deep-fade-weighted variant of the
Kolmogorov-Smirnov distance,

    epsilon = max over empirical abscissae of |log10 Fe - log10 Fa|,

which magnifies errors where both CDFs are small -- the region that
drives error-rate and outage performance.  Estimation minimizes epsilon
with multi-start Nelder-Mead over log-transformed parameters (the
interesting ranges of K, m and the scale span many decades), with an
integer grid on m1 for the integer-constrained family.

Model families are nested restrictions of the same evaluator: frozen
fluctuations are pinned at ``math.inf``, so the full family provably
dominates its special cases.  Fits of the full families therefore also
run the nested fits and include their optima as candidates.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .laplace import LaplaceInversionConfig, clamp_counts, euler_contour
from .params import IftrParams, ValidationError
from .stats import DistributionDomain, mgf
from .specfun import ConvergenceError

__all__ = [
    "EmpiricalCdf",
    "FitConfig",
    "FitResult",
    "modified_ks",
    "fit",
    "load_empirical_cdf",
    "empirical_cdf_from_samples",
    "fit_result_to_json",
]

MODEL_FAMILIES = ("iftr", "iftr-integer-m1", "rice", "twdp", "rician-shadowed")

DEFAULT_BOUNDS = {
    "k": (1e-3, 1e6),
    "delta": (0.0, 1.0),
    "m": (0.05, 1e3),
    "omega": (1e-3, 1e3),
}


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted empirical distribution points (x strictly increasing > 0,
    F nondecreasing in (0, 1], at least 8 of them).

    ``normalized`` records that abscissae were scaled by their mean power,
    in which case the model scale is pinned to 1 unless a fit explicitly
    frees it.
    """

    x: np.ndarray
    F: np.ndarray
    domain: DistributionDomain = DistributionDomain.SNR
    normalized: bool = True

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        F = np.asarray(self.F, dtype=float)
        if x.ndim != 1 or x.shape != F.shape:
            raise ValidationError("x and F must be 1-d arrays of equal length")
        if len(x) < 8:
            raise ValidationError(f"need at least 8 points, got {len(x)}")
        if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
            raise ValidationError("abscissae must be finite and > 0")
        if np.any(np.diff(x) <= 0.0):
            i = int(np.argmax(np.diff(x) <= 0.0))
            raise ValidationError(f"abscissae must increase strictly; row {i + 1} breaks order")
        if np.any((F <= 0.0) | (F > 1.0)):
            raise ValidationError("probabilities must lie in (0, 1]")
        if np.any(np.diff(F) < 0.0):
            i = int(np.argmax(np.diff(F) < 0.0))
            raise ValidationError(f"probabilities must be nondecreasing; row {i + 1} decreases")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "F", F)
        object.__setattr__(
            self,
            "domain",
            self.domain if isinstance(self.domain, DistributionDomain) else DistributionDomain(self.domain),
        )


@dataclass(frozen=True)
class FitConfig:
    """Family selection, search box, restart budget, tolerance and seed."""

    model_family: str = "iftr"
    fit_scale: bool = False
    bounds: dict = field(default_factory=dict)
    restarts: int = 4
    optimizer_tolerance: float = 1e-6
    seed: int = 0
    m1_grid: tuple = tuple(range(1, 61))
    max_evaluations: int = 4000
    inversion: LaplaceInversionConfig = LaplaceInversionConfig()

    def __post_init__(self) -> None:
        if self.model_family not in MODEL_FAMILIES:
            raise ValidationError(
                f"model_family must be one of {MODEL_FAMILIES}, got {self.model_family!r}"
            )
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        merged = dict(DEFAULT_BOUNDS)
        merged.update(self.bounds)
        for name, (lo, hi) in merged.items():
            if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo < hi):
                raise ValidationError(f"invalid bounds for {name}: ({lo}, {hi})")
        object.__setattr__(self, "bounds", merged)
        if not all(int(m) == m and m >= 1 for m in self.m1_grid):
            raise ValidationError("m1_grid must contain positive integers")


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters, achieved epsilon, and optimizer diagnostics."""

    params: IftrParams
    epsilon: float
    model_family: str
    diagnostics: dict


def modified_ks(emp: EmpiricalCdf, model_cdf) -> float:
    """max |log10 Fe - log10 Fa| over the empirical abscissae.

    ``model_cdf`` maps the abscissa vector to model CDF values; a
    non-positive model value makes the statistic undefined and raises,
    naming the first offending point.
    """
    fa = np.asarray(model_cdf(emp.x), dtype=float)
    if fa.shape != emp.x.shape:
        raise ValidationError("model_cdf must return one value per abscissa")
    bad = ~(fa > 0.0)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValidationError(
            f"model CDF is not positive at x={emp.x[i]:g} (value {fa[i]!r})"
        )
    return float(np.max(np.abs(np.log10(emp.F) - np.log10(fa))))


class _CdfEvaluator:
    """Model CDF on a fixed abscissa vector with memoized contour nodes.

    The inner fitting loop is dominated by these evaluations, so the
    Bromwich nodes, weights and the 1/s factor are built once per dataset.
    """

    def __init__(self, emp: EmpiricalCdf, cfg: LaplaceInversionConfig):
        x = emp.x
        if emp.domain is DistributionDomain.ENVELOPE:
            x = x * x
        self.x_snr = x
        self.nodes, self._finish = euler_contour(x, cfg)
        self.flat_nodes = self.nodes.ravel()
        self.n_evals = 0

    def __call__(self, p: IftrParams) -> np.ndarray:
        self.n_evals += 1
        fvals = mgf(p, -self.flat_nodes) / self.flat_nodes
        values, _ = self._finish(fvals.reshape(self.nodes.shape))
        return np.clip(values, 0.0, 1.0)


def _family_spec(family: str, fit_scale: bool, bounds: dict):
    """(names, transform) for the family's free parameters.

    Parameters are optimized as log10 K, raw delta in [0, 1], log10 m and
    log10 omega; frozen fluctuations are pinned at math.inf.
    """
    lg = math.log10
    k_lo, k_hi = bounds["k"]
    m_lo, m_hi = bounds["m"]
    o_lo, o_hi = bounds["omega"]
    spec = {
        "iftr": (
            ["log10_k", "delta", "log10_m1", "log10_m2"],
            [(lg(k_lo), lg(k_hi)), bounds["delta"], (lg(m_lo), lg(m_hi)), (lg(m_lo), lg(m_hi))],
            lambda t, omega: IftrParams(10.0 ** t[0], t[1], 10.0 ** t[2], 10.0 ** t[3], omega),
        ),
        "twdp": (
            ["log10_k", "delta"],
            [(lg(k_lo), lg(k_hi)), bounds["delta"]],
            lambda t, omega: IftrParams(10.0 ** t[0], t[1], math.inf, math.inf, omega),
        ),
        "rice": (
            ["log10_k"],
            [(lg(k_lo), lg(k_hi))],
            lambda t, omega: IftrParams(10.0 ** t[0], 0.0, math.inf, math.inf, omega),
        ),
        "rician-shadowed": (
            ["log10_k", "log10_m"],
            [(lg(k_lo), lg(k_hi)), (lg(m_lo), lg(m_hi))],
            lambda t, omega: IftrParams(10.0 ** t[0], 0.0, 10.0 ** t[1], math.inf, omega),
        ),
    }
    names, boxes, build = spec[family]
    if fit_scale:
        names = names + ["log10_omega"]
        boxes = boxes + [(lg(o_lo), lg(o_hi))]

        def make(theta):
            return build(theta, 10.0 ** theta[-1])

    else:

        def make(theta):
            return build(theta, 1.0)

    return names, np.asarray(boxes, dtype=float), make


def _objective(evaluator: _CdfEvaluator, emp: EmpiricalCdf, make_params):
    log_fe = np.log10(emp.F)

    def fun(theta):
        try:
            p = make_params(theta)
            fa = evaluator(p)
            if np.any(fa <= 0.0):
                return 1e6
            return float(np.max(np.abs(log_fe - np.log10(fa))))
        except (ValidationError, ConvergenceError, ValueError, NotImplementedError, OverflowError):
            return 1e6

    return fun


def _run_family(emp, evaluator, family, cfg: FitConfig, rng) -> FitResult:
    names, boxes, make = _family_spec(family, cfg.fit_scale, cfg.bounds)
    fun = _objective(evaluator, emp, make)
    starts = [0.5 * (boxes[:, 0] + boxes[:, 1])]
    for _ in range(cfg.restarts - 1):
        starts.append(boxes[:, 0] + (boxes[:, 1] - boxes[:, 0]) * rng.random(len(boxes)))
    trace = []
    best_theta, best_eps = None, math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for theta0 in starts:
            res = minimize(
                fun,
                theta0,
                method="Nelder-Mead",
                bounds=boxes,
                options={
                    "maxfev": cfg.max_evaluations,
                    "xatol": 1e-4,
                    "fatol": 0.1 * cfg.optimizer_tolerance,
                },
            )
            trace.append({"start": list(map(float, theta0)), "epsilon": float(res.fun)})
            if res.fun < best_eps:
                best_eps, best_theta = float(res.fun), res.x
    params = make(best_theta)
    return FitResult(
        params=params,
        epsilon=best_eps,
        model_family=family,
        diagnostics={"parameters": names, "restarts": trace, "n_evals": evaluator.n_evals},
    )


def _run_integer_m1(emp, evaluator, cfg: FitConfig, rng) -> FitResult:
    best = None
    per_m1 = []
    for m1 in cfg.m1_grid:
        names, boxes, make_free = _family_spec("iftr", cfg.fit_scale, cfg.bounds)
        # Drop the log10_m1 coordinate; pin it to the grid value.
        keep = [i for i, n in enumerate(names) if n != "log10_m1"]
        sub_boxes = boxes[keep]

        def make(theta, m1=m1, keep=keep, make_free=make_free, names=names):
            full = np.empty(len(names))
            full[keep] = theta
            full[names.index("log10_m1")] = math.log10(m1)
            return make_free(full)

        fun = _objective(evaluator, emp, make)
        starts = [0.5 * (sub_boxes[:, 0] + sub_boxes[:, 1])]
        for _ in range(max(1, cfg.restarts // 2)):
            starts.append(sub_boxes[:, 0] + (sub_boxes[:, 1] - sub_boxes[:, 0]) * rng.random(len(sub_boxes)))
        local_best, local_theta = math.inf, None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for theta0 in starts:
                res = minimize(
                    fun,
                    theta0,
                    method="Nelder-Mead",
                    bounds=sub_boxes,
                    options={"maxfev": cfg.max_evaluations, "xatol": 1e-4, "fatol": 0.1 * cfg.optimizer_tolerance},
                )
                if res.fun < local_best:
                    local_best, local_theta = float(res.fun), res.x
        per_m1.append({"m1": m1, "epsilon": local_best})
        candidate = FitResult(
            params=make(local_theta),
            epsilon=local_best,
            model_family="iftr-integer-m1",
            diagnostics={},
        )
        # Deterministic tie-break: strictly better epsilon wins; the grid
        # ascends, so ties keep the lowest m1.
        if best is None or candidate.epsilon < best.epsilon - 1e-15:
            best = candidate
    return FitResult(
        params=best.params,
        epsilon=best.epsilon,
        model_family="iftr-integer-m1",
        diagnostics={"per_m1": per_m1, "n_evals": evaluator.n_evals},
    )


def fit(emp: EmpiricalCdf, cfg: FitConfig) -> FitResult:
    """Minimize the log-domain KS statistic over the selected family.

    Deterministic for a fixed (seed, config).  The full families also fit
    their nested special cases and keep whichever candidate wins, so
    ``epsilon(iftr) <= epsilon(nested family)`` holds by construction.
    """
    evaluator = _CdfEvaluator(emp, cfg.inversion)
    rng = np.random.default_rng(cfg.seed)
    clamps_before = dict(clamp_counts)
    if cfg.model_family in ("rice", "twdp", "rician-shadowed"):
        result = _run_family(emp, evaluator, cfg.model_family, cfg, rng)
        result.diagnostics["clamp_counts"] = {
            k: clamp_counts[k] - clamps_before[k] for k in clamp_counts
        }
        return result

    # The integer-constrained family may only absorb embeddings that keep
    # its shape contract: frozen (inf) shapes qualify, a continuous
    # single-ray shape does not (the integer grid itself covers those).
    if cfg.model_family == "iftr":
        nested_families = ("rice", "twdp", "rician-shadowed")
    else:
        nested_families = ("rice", "twdp")
    nested = [_run_family(emp, evaluator, fam, cfg, rng) for fam in nested_families]
    if cfg.model_family == "iftr":
        own = _run_family(emp, evaluator, "iftr", cfg, rng)
    else:
        own = _run_integer_m1(emp, evaluator, cfg, rng)
    candidates = [own] + [
        FitResult(params=r.params, epsilon=r.epsilon, model_family=cfg.model_family, diagnostics={"embedded_from": r.model_family})
        for r in nested
    ]
    best = min(candidates, key=lambda r: r.epsilon)
    diagnostics = dict(own.diagnostics)
    diagnostics["nested"] = {r.model_family: r.epsilon for r in nested}
    if best is not own:
        diagnostics["embedded_from"] = best.diagnostics.get("embedded_from")
    diagnostics["clamp_counts"] = {
        k: clamp_counts[k] - clamps_before[k] for k in clamp_counts
    }
    return FitResult(
        params=best.params,
        epsilon=best.epsilon,
        model_family=cfg.model_family,
        diagnostics=diagnostics,
    )


def empirical_cdf_from_samples(
    samples,
    domain=DistributionDomain.SNR,
    n_points: int = 40,
    p_min: float | None = None,
    p_max: float = 0.995,
    normalized: bool = True,
) -> EmpiricalCdf:
    """Reduce raw samples to an empirical CDF on a quantile grid.

    Probability levels are log-spaced from ``p_min`` (default: 20/n,
    floored at 1e-5) to ``p_max``; each abscissa is an order statistic and
    F is the exact fraction of samples at or below it.
    """
    s = np.sort(np.asarray(samples, dtype=float))
    n = len(s)
    if p_min is None:
        p_min = max(20.0 / n, 1e-5)
    levels = np.logspace(math.log10(p_min), math.log10(p_max), n_points)
    idx = np.minimum((levels * n).astype(int), n - 1)
    x = s[idx]
    keep = np.concatenate(([True], np.diff(x) > 0.0))
    x = x[keep]
    F = np.searchsorted(s, x, side="right") / n
    return EmpiricalCdf(x=x, F=F, domain=domain, normalized=normalized)


def load_empirical_cdf(path, domain=DistributionDomain.SNR, normalized: bool = True) -> EmpiricalCdf:
    """Read a two-column CSV with header ``x,cdf`` or ``x_db,cdf``.

    A dB abscissa column converts as ``x = 10^(x_db / 10)``.  Parse
    failures and ordering violations report the offending line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not rows:
        raise ValidationError(f"{path}: empty file")
    header = rows[0][1].lower().replace(" ", "")
    if header not in ("x,cdf", "x_db,cdf"):
        raise ValidationError(
            f"{path}: line {rows[0][0]}: header must be 'x,cdf' or 'x_db,cdf', got {rows[0][1]!r}"
        )
    in_db = header.startswith("x_db")
    xs, fs = [], []
    for lineno, ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) != 2:
            raise ValidationError(f"{path}: line {lineno}: expected two comma-separated fields")
        try:
            x = float(parts[0])
            f = float(parts[1])
        except ValueError:
            raise ValidationError(f"{path}: line {lineno}: non-numeric value") from None
        xs.append(10.0 ** (x / 10.0) if in_db else x)
        fs.append(f)
    x_arr = np.asarray(xs)
    f_arr = np.asarray(fs)
    if np.any(np.diff(f_arr) < 0.0):
        bad = int(np.argmax(np.diff(f_arr) < 0.0))
        raise ValidationError(
            f"{path}: line {rows[1 + bad + 1][0]}: cdf decreases at this row"
        )
    try:
        return EmpiricalCdf(x=x_arr, F=f_arr, domain=domain, normalized=normalized)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _param_json_value(value: float):
    return "inf" if value == math.inf else value


def fit_result_to_json(result: FitResult, n_restarts: int | None = None) -> str:
    """Serialize a fit result to the stable JSON interchange shape."""
    doc = {
        "model": result.model_family,
        "epsilon": result.epsilon,
        "params": {
            "K": result.params.k,
            "Delta": result.params.delta,
            "m1": _param_json_value(result.params.m1),
            "m2": _param_json_value(result.params.m2),
            "Omega": result.params.mean_snr,
        },
        "restarts": n_restarts if n_restarts is not None else len(result.diagnostics.get("restarts", [])),
    }
    return json.dumps(doc, sort_keys=True)
