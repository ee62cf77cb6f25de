"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Statistical checks use fixed seeds, so the whole suite is
deterministic.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc

from iftr.cli import FIG1_CURVES, FIG2_CURVES, FIG3_CURVES, FIG5_CURVES, main
from iftr.fitting import FitConfig, _CdfEvaluator, empirical_cdf_from_samples, fit, fit_result_to_json, modified_ks
from iftr.laplace import LaplaceInversionConfig, laplace_invert_cdf, laplace_invert_density
from iftr.linkperf import ber_asymptotic, ber_exact, ber_mgf_quadrature, outage, outage_asymptotic
from iftr.params import IftrParams, ModulationSpec
from iftr.sim import SimConfig, sample_ftr, sample_iftr
from iftr.stats import DistributionDomain, cdf, mgf, mgf_integer_m1, pdf, rice_mgf, rician_shadowed_mgf, twdp_limit_mgf

BPSK = ModulationSpec.bpsk()


def report(criterion: int, text: str) -> None:
    print(f"[acceptance {criterion:2d}] {text}: PASS")


def random_params(rng, integer_m1=False):
    return IftrParams(
        k=rng.uniform(0.1, 30.0),
        delta=rng.uniform(0.0, 1.0),
        m1=float(rng.integers(1, 9)) if integer_m1 else rng.uniform(0.5, 50.0),
        m2=rng.uniform(0.5, 50.0),
        mean_snr=rng.uniform(0.25, 4.0),
    )


def ks_upper_bound(samples: np.ndarray, cdf_fn, grid_points: int = 4001) -> float:
    """Upper bound on the Kolmogorov-Smirnov distance |F_n - F|.

    Evaluates the analytic CDF on a quantile subgrid and adds the largest
    empirical-CDF increment between grid points, so the result bounds the
    supremum over all x.
    """
    s = np.sort(samples)
    n = len(s)
    idx = np.unique(np.linspace(0, n - 1, grid_points).astype(int))
    F = np.asarray(cdf_fn(s[idx]), dtype=float)
    d_low = np.max((idx + 1) / n - F)
    d_high = np.max(F - idx / n)
    gap = np.max(np.diff(idx, prepend=0)) / n
    return float(max(d_low, d_high) + gap)


# ---------------------------------------------------------------------------
# 1. MGF cross-form agreement
# ---------------------------------------------------------------------------

def test_criterion_01_mgf_cross_form():
    t0 = time.monotonic()
    rng = np.random.default_rng(1001)
    worst = 0.0
    for _ in range(100):
        p = random_params(rng, integer_m1=True)
        for s_scaled in (-0.1, -1.0, -10.0):
            s = s_scaled / p.mean_snr
            a = float(mgf(p, s))
            b = float(mgf_integer_m1(p, s))
            worst = max(worst, abs(a - b) / abs(a))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-9
    assert elapsed < 5.0
    report(1, f"MGF general vs finite-sum, worst rel {worst:.2e} in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 2. Transform-pair suite
# ---------------------------------------------------------------------------

def test_criterion_02_transform_pairs():
    t0 = time.monotonic()
    x = np.linspace(0.1, 10.0, 34)
    pairs = {
        "exponential": (lambda s: 1.0 / (1.0 + s), np.exp(-x)),
        "erlang2": (lambda s: (1.0 + s) ** -2.0, x * np.exp(-x)),
        "erlang5": (lambda s: (1.0 + s) ** -5.0, x ** 4 * np.exp(-x) / 24.0),
        "mixture": (
            lambda s: 0.3 * 2.0 / (2.0 + s) + 0.7 * 0.5 / (0.5 + s),
            0.3 * 2.0 * np.exp(-2.0 * x) + 0.7 * 0.5 * np.exp(-0.5 * x),
        ),
        "chisq4": (lambda s: (1.0 + 2.0 * s) ** -2.0, x * np.exp(-0.5 * x) / 4.0),
    }
    cfg = LaplaceInversionConfig(method="fixed-talbot", terms=24)
    worst = 0.0
    for name, (transform, want) in pairs.items():
        got = laplace_invert_density(transform, x, cfg)
        worst = max(worst, float(np.max(np.abs(got - want) / want)))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-8
    assert elapsed < 5.0
    report(2, f"five Laplace pairs, worst rel {worst:.2e} in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 3. Distribution sanity
# ---------------------------------------------------------------------------

def test_criterion_03_distribution_sanity():
    t0 = time.monotonic()
    rng = np.random.default_rng(1003)
    worst_norm = worst_mean = 0.0
    for _ in range(20):
        p = random_params(rng)
        hi = 60.0 * p.mean_snr
        total = sum(
            quad(lambda x: pdf(p, x), a, b, limit=200)[0]
            for a, b in ((0.0, 5.0 * p.mean_snr), (5.0 * p.mean_snr, hi))
        )
        mean = sum(
            quad(lambda x: x * pdf(p, x), a, b, limit=200)[0]
            for a, b in ((0.0, 5.0 * p.mean_snr), (5.0 * p.mean_snr, hi))
        )
        worst_norm = max(worst_norm, abs(total - 1.0))
        worst_mean = max(worst_mean, abs(mean - p.mean_snr) / p.mean_snr)
        grid = np.sort(rng.uniform(1e-4, 10.0, size=30)) * p.mean_snr
        F = cdf(p, grid)
        assert np.all(np.diff(F) >= -1e-12)
    elapsed = time.monotonic() - t0
    assert worst_norm <= 1e-6
    assert worst_mean <= 1e-4
    assert elapsed < 120.0
    report(3, f"norm err {worst_norm:.2e}, mean err {worst_mean:.2e}, 20 sets in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 4. Monte Carlo agreement on figure presets
# ---------------------------------------------------------------------------

def test_criterion_04_monte_carlo_agreement():
    n = 10 ** 6
    presets = []
    for name, kw in FIG1_CURVES:
        presets.append((f"fig1:{name}", kw, DistributionDomain.ENVELOPE))
    for name, kw in FIG2_CURVES:
        presets.append((f"fig2:{name}", kw, DistributionDomain.SNR))
    for name, kw in FIG3_CURVES:
        presets.append((f"fig3:{name}", kw, DistributionDomain.SNR))
    worst = 0.0
    for i, (name, kw, domain) in enumerate(presets):
        t0 = time.monotonic()
        p = IftrParams(mean_snr=1.0, **kw)
        output = "envelope" if domain is DistributionDomain.ENVELOPE else "snr"
        samples = sample_iftr(p, SimConfig(n_samples=n, seed=9000 + i, output=output))
        bound = ks_upper_bound(samples, lambda x: cdf(p, x, domain=domain))
        elapsed = time.monotonic() - t0
        assert bound <= 0.005, (name, bound)
        assert elapsed < 180.0, name
        worst = max(worst, bound)
    report(4, f"{len(presets)} presets, worst KS bound {worst:.4f} at n=1e6")


# ---------------------------------------------------------------------------
# 5. Limit reductions
# ---------------------------------------------------------------------------

def test_criterion_05_limit_reductions():
    s_grid = np.array([-0.1, -0.5, -1.0, -3.0, -10.0])
    # (a) delta = 0 collapses to the single-fluctuating-ray closed form
    p = IftrParams(k=5.0, delta=0.0, m1=3.2, m2=44.0, mean_snr=1.0)
    a = mgf(p, s_grid)
    b = rician_shadowed_mgf(5.0, 3.2, 1.0, s_grid)
    rel_rs = float(np.max(np.abs(a - b) / np.abs(b)))
    assert rel_rs <= 1e-10
    # (b) both shapes at 1e5: CDF matches the frozen-ray MGF inversion
    k, delta, gbar = 15.0, 0.9, 1.0
    p_big = IftrParams(k=k, delta=delta, m1=1e5, m2=1e5, mean_snr=gbar)
    x = np.logspace(-3, 1, 25) * gbar
    f_iftr = cdf(p_big, x)
    f_twdp = laplace_invert_cdf(lambda s: twdp_limit_mgf(k, delta, gbar, -s), x)
    sup = float(np.max(np.abs(f_iftr - f_twdp)))
    assert sup <= 1e-3
    # (c) delta = 0 with m1 = 1e6 approaches the non-fluctuating single ray
    p_rice = IftrParams(k=15.0, delta=0.0, m1=1e6, m2=2.0, mean_snr=1.0)
    rel_rice = float(
        np.max(np.abs(mgf(p_rice, s_grid) - rice_mgf(15.0, 1.0, s_grid)) / np.abs(rice_mgf(15.0, 1.0, s_grid)))
    )
    assert rel_rice <= 1e-4
    report(5, f"limits: shadowed {rel_rs:.1e}, frozen-pair sup {sup:.1e}, rice {rel_rice:.1e}")


# ---------------------------------------------------------------------------
# 6. BER triangle
# ---------------------------------------------------------------------------

def test_criterion_06_ber_triangle():
    rng = np.random.default_rng(1006)
    worst_pair = 0.0
    for _ in range(50):
        p1 = IftrParams(
            k=rng.uniform(0.1, 30.0),
            delta=rng.uniform(0.0, 1.0),
            m1=float(rng.integers(1, 9)),
            m2=rng.uniform(0.5, 50.0),
            mean_snr=rng.uniform(1.0, 300.0),
        )
        e = ber_exact(p1, BPSK).value
        q = ber_mgf_quadrature(p1, BPSK).value
        worst_pair = max(worst_pair, abs(e - q) / q)
    assert worst_pair <= 1e-6
    # Conditional-averaging Monte Carlo closes the triangle at 10/20/30 dB
    # on the reference parameter set (one normalized 1e7 draw, scaled per
    # point; six 3-sigma comparisons keep the family-wise false-alarm rate
    # small, unlike a 3-sigma bar maxed over hundreds of draws).
    n_mc = 10 ** 7
    anchor = IftrParams(k=15.0, delta=0.5, m1=5.0, m2=2.0, mean_snr=1.0)
    snr0 = sample_iftr(anchor, SimConfig(n_samples=n_mc, seed=6001, output="snr"))
    worst_sigma = 0.0
    for gbar in (10.0, 100.0, 1000.0):
        cep = BPSK.cep(gbar * snr0)
        mc = float(cep.mean())
        se = float(cep.std() / math.sqrt(n_mc))
        pg = anchor.with_mean_snr(gbar)
        for value in (ber_exact(pg, BPSK).value, ber_mgf_quadrature(pg, BPSK).value):
            worst_sigma = max(worst_sigma, abs(value - mc) / se)
    assert worst_sigma <= 3.0
    # Pinned closed form in the diffuse-only limit
    p0 = IftrParams(k=0, delta=0, m1=1, m2=1, mean_snr=10.0)
    want = 0.5 * (1.0 - math.sqrt(10.0 / 11.0))
    assert abs(ber_exact(p0, BPSK).value - want) / want <= 1e-10
    report(6, f"exact/quadrature worst rel {worst_pair:.1e}; MC worst {worst_sigma:.2f} sigma")


# ---------------------------------------------------------------------------
# 7. High-SNR asymptotics
# ---------------------------------------------------------------------------

def test_criterion_07_asymptotics():
    for m1 in (2, 5, 40):
        p = IftrParams(k=15.0, delta=0.5, m1=m1, m2=2.0, mean_snr=1e5)
        ratio = ber_exact(p, BPSK).value / ber_asymptotic(p, BPSK).value
        assert 0.95 <= ratio <= 1.05, (m1, ratio)
        p60 = p.with_mean_snr(1e6)
        oratio = outage(p60, 2.0) / outage_asymptotic(p60, 2.0)
        assert 0.98 <= oratio <= 1.02, (m1, oratio)
    report(7, "BER ratio in [0.95, 1.05] at 50 dB; outage ratio in [0.98, 1.02] at 60 dB")


# ---------------------------------------------------------------------------
# 8. Contrast against jointly fluctuating rays
# ---------------------------------------------------------------------------

def test_criterion_08_joint_fluctuation_contrast():
    # At BER 1e-4 with K=15, Delta=0.5, m2=2, m1=m=40 the jointly
    # fluctuating model needs less SNR; the criterion pins the measurement
    # level at BER=1e-4 and asserts the gap within the figure-read window
    # [2, 5] dB.
    #
    # KNOWN RED (kept faithful to the stated criterion): the window is
    # unattainable at this level.  Even against the frozen-pair limit --
    # which upper-bounds the gap of every jointly fluctuating channel --
    # the 1e-4-level gap is 1.98 dB; the simulated m=40 channel gives
    # ~1.2 dB (the independently fluctuating curve is Monte Carlo
    # validated to 0.3 sigma here).  The quoted ~3.6 dB separation is a
    # deeper-fade read: the gap reaches 3.6 dB near BER ~ 2e-5 and ~7 dB
    # asymptotically.
    target = 1e-4
    db_grid = np.arange(5.0, 40.0 + 0.25, 0.25)
    gbar = 10.0 ** (db_grid / 10.0)
    iftr_ber = np.array(
        [ber_exact(IftrParams(15.0, 0.5, 40, 2, g), BPSK).value for g in gbar]
    )
    snr0 = sample_ftr(15.0, 0.5, 40.0, 1.0, SimConfig(n_samples=10 ** 7, seed=8080, output="snr"))
    ftr_ber = np.array([float(BPSK.cep(g * snr0).mean()) for g in gbar])

    def crossing_db(ber_curve):
        i = int(np.argmax(ber_curve < target))
        assert 0 < i < len(db_grid)
        x0, x1 = db_grid[i - 1], db_grid[i]
        y0, y1 = math.log10(ber_curve[i - 1]), math.log10(ber_curve[i])
        return x0 + (x1 - x0) * (math.log10(target) - y0) / (y1 - y0)

    db_iftr = crossing_db(iftr_ber)
    db_ftr = crossing_db(ftr_ber)
    gap = db_iftr - db_ftr
    print(
        f"[acceptance  8] measured gap at BER 1e-4: {gap:.2f} dB "
        f"(independent {db_iftr:.2f} dB vs joint {db_ftr:.2f} dB)"
    )
    assert db_ftr < db_iftr, "directional check: joint fluctuation needs lower SNR"
    assert 2.0 <= gap <= 5.0, (
        f"gap {gap:.2f} dB outside [2, 5]: the window cannot be met at the "
        f"1e-4 level (frozen-pair bound 1.98 dB); see the decisions ledger"
    )
    report(8, f"jointly fluctuating model needs {gap:.2f} dB less SNR at BER 1e-4")


# ---------------------------------------------------------------------------
# 9. Outage exactness
# ---------------------------------------------------------------------------

def test_criterion_09_outage_exactness():
    n = 10 ** 7
    worst_sigma = 0.0
    for i, (name, kw) in enumerate(FIG5_CURVES):
        p = IftrParams(mean_snr=10.0 ** 1.5, **kw)
        snr = sample_iftr(p, SimConfig(n_samples=n, seed=7700 + i, output="snr"))
        hits = snr < 3.0  # 2^2 - 1
        freq = float(hits.mean())
        se = math.sqrt(freq * (1.0 - freq) / n)
        exact = outage(p, 2.0)
        worst_sigma = max(worst_sigma, abs(exact - freq) / se)
    assert worst_sigma <= 3.0
    p0 = IftrParams(k=0, delta=0, m1=1, m2=1, mean_snr=1.0)
    want = 1.0 - math.exp(-3.0)
    assert abs(outage(p0, 2.0) - want) / want <= 1e-10
    report(9, f"outage vs MC worst {worst_sigma:.2f} sigma across the preset grid")


# ---------------------------------------------------------------------------
# 10. Fit recovery and nested dominance
# ---------------------------------------------------------------------------

def test_criterion_10_fit_recovery():
    p_true = IftrParams(k=15.0, delta=0.9, m1=2.0, m2=10.0, mean_snr=1.0)
    inversion = LaplaceInversionConfig()
    successes = 0
    t0 = time.monotonic()
    per_seed_max = 0.0
    for seed in range(20):
        t_seed = time.monotonic()
        snr = sample_iftr(p_true, SimConfig(n_samples=10 ** 5, seed=5000 + seed, output="snr"))
        emp = empirical_cdf_from_samples(snr)
        evaluator = _CdfEvaluator(emp, inversion)
        eps_true = modified_ks(emp, lambda x: evaluator(p_true))
        res = fit(emp, FitConfig(model_family="iftr", restarts=3, seed=seed, max_evaluations=2000))
        if res.epsilon <= eps_true + 0.01:
            successes += 1
        for family, eps in res.diagnostics["nested"].items():
            assert res.epsilon <= eps + 1e-6, (seed, family)
        per_seed_max = max(per_seed_max, time.monotonic() - t_seed)
    elapsed = time.monotonic() - t0
    assert successes >= 18
    assert per_seed_max < 600.0
    report(
        10,
        f"{successes}/20 seeds within +0.01 of truth epsilon; dominance held; "
        f"worst seed {per_seed_max:.1f}s, total {elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 11. Determinism of artifacts
# ---------------------------------------------------------------------------

def test_criterion_11_determinism(tmp_path, capsys):
    argv = ["sample", "--model", "iftr", "--n", "5000", "--seed", "31", "--K", "10",
            "--Delta", "0.9", "--m1", "2", "--m2", "8"]
    f1, f2 = tmp_path / "s1.txt", tmp_path / "s2.txt"
    assert main(argv + ["--out", str(f1)]) == 0
    assert main(argv + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()

    p = IftrParams(k=6.0, delta=0.4, m1=2.0, m2=3.0, mean_snr=1.0)
    snr = sample_iftr(p, SimConfig(n_samples=3 * 10 ** 4, seed=17, output="snr"))
    emp = empirical_cdf_from_samples(snr, n_points=25)
    cfg = FitConfig(model_family="twdp", restarts=2, seed=3, max_evaluations=500)
    j1 = fit_result_to_json(fit(emp, cfg))
    j2 = fit_result_to_json(fit(emp, cfg))
    assert j1 == j2
    capsys.readouterr()
    report(11, "byte-identical sample files and fit JSON under fixed seeds")
