"""Command-line frontend: curve evaluation, sampling, BER/outage sweeps, fitting.

Outputs are deterministic for fixed flags and seeds.  CSV files start with
'#'-prefixed provenance lines (tool version and the full effective
configuration as JSON), followed by a header line and comma-separated
data rows.  Exit codes: 0 success, 1 I/O failure, 2 validation failure,
3 numerical non-convergence.

dB conventions: mean-SNR sweeps and SNR-domain grids use 10*log10;
envelope-domain grids given in dB use 20*log10 of the amplitude.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .fitting import (
    FitConfig,
    empirical_cdf_from_samples,
    fit,
    fit_result_to_json,
    load_empirical_cdf,
)
from .laplace import LaplaceInversionConfig
from .linkperf import ber_asymptotic, ber_exact, ber_mgf_quadrature, ber_monte_carlo, outage, outage_asymptotic
from .params import IftrParams, ModulationSpec, ValidationError, params_from_json
from .sim import SimConfig, provenance_dict, sample_ftr, sample_iftr, sample_rice, sample_rician_shadowed, sample_twdp, write_samples
from .specfun import ConvergenceError
from .stats import DistributionDomain, cdf, pdf, rician_shadowed_pdf

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

EVAL_QUANTITIES = ("pdf-envelope", "pdf-snr", "cdf-snr", "ccdf-envelope")


def _parse_shape(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_grid(spec: str):
    """start:stop:count[:linear|log|db] -> (ndarray, spacing tag)."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ValidationError(f"grid must be start:stop:count[:spacing], got {spec!r}")
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2])
    spacing = parts[3] if len(parts) == 4 else "linear"
    if not 2 <= count <= 10**6:
        raise ValidationError(f"grid count must lie in [2, 1e6], got {count}")
    if not start < stop:
        raise ValidationError(f"grid needs start < stop, got {start} >= {stop}")
    if spacing == "linear":
        return np.linspace(start, stop, count), spacing
    if spacing == "log":
        if start <= 0:
            raise ValidationError("log grid needs start > 0")
        return np.logspace(math.log10(start), math.log10(stop), count), spacing
    if spacing == "db":
        return np.linspace(start, stop, count), spacing
    raise ValidationError(f"unknown grid spacing {spacing!r}")


def _params_from_args(args) -> IftrParams:
    if getattr(args, "params_json", None):
        with open(args.params_json, "r", encoding="utf-8") as fh:
            return params_from_json(fh.read())
    scale = 1.0
    if getattr(args, "gamma_bar", None) is not None:
        scale = args.gamma_bar
    if getattr(args, "gamma_bar_db", None) is not None:
        scale = 10.0 ** (args.gamma_bar_db / 10.0)
    if getattr(args, "omega", None) is not None:
        scale = args.omega
    return IftrParams(k=args.K, delta=args.Delta, m1=args.m1, m2=args.m2, mean_snr=scale)


def _provenance(args, command: str) -> str:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    doc = {"tool": "iftr", "version": __version__, "command": command, "config": cfg}
    return "# " + json.dumps(doc, sort_keys=True, default=str)


def _write_csv(args, header: str, rows, command: str) -> None:
    lines = [_provenance(args, command), header]
    lines.extend(rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value: float) -> str:
    return repr(float(value))


# --------------------------------------------------------------------------
# Figure-regeneration presets (parameter sets of the reference curves).
# --------------------------------------------------------------------------

FIG1_CURVES = [("iftr_m2", dict(k=15, delta=0.9, m1=2, m2=2)),
               ("iftr_m10", dict(k=15, delta=0.9, m1=10, m2=10))]
FIG2_CURVES = [("iftr_d0.1_m1_3_m2_5", dict(k=15, delta=0.1, m1=3, m2=5)),
               ("iftr_d0.9_m1_3_m2_5", dict(k=15, delta=0.9, m1=3, m2=5)),
               ("iftr_d0.9_m1_10_m2_10", dict(k=15, delta=0.9, m1=10, m2=10))]
FIG3_CURVES = [("iftr_K10_d0.9_m1_2_m2_8", dict(k=10, delta=0.9, m1=2, m2=8)),
               ("iftr_K10_d0.1_m1_2_m2_8", dict(k=10, delta=0.1, m1=2, m2=8)),
               ("iftr_K10_d0.9_m1_8_m2_2", dict(k=10, delta=0.9, m1=8, m2=2)),
               ("iftr_K10_d0.5_m1_3_m2_2", dict(k=10, delta=0.5, m1=3, m2=2))]
FIG4_M1 = (2, 5, 40)          # BPSK, K=15, Delta=0.5, m2=2
FIG5_CURVES = [("K10_d0.1_m1_2_m2_8", dict(k=10, delta=0.1, m1=2, m2=8)),
               ("K10_d0.9_m1_2_m2_8", dict(k=10, delta=0.9, m1=2, m2=8)),
               ("K80_d0.9_m1_2_m2_8", dict(k=80, delta=0.9, m1=2, m2=8)),
               ("K10_d0.9_m1_8_m2_2", dict(k=10, delta=0.9, m1=8, m2=2))]


def _eval_preset(args) -> int:
    cfg = LaplaceInversionConfig()
    if args.preset == "fig1":
        grid = np.linspace(0.01, 3.0, 300)
        cols = {}
        for name, kw in FIG1_CURVES:
            p = IftrParams(mean_snr=1.0, **kw)
            cols[name] = pdf(p, grid, domain=DistributionDomain.ENVELOPE, cfg=cfg)
    elif args.preset == "fig2":
        grid = np.linspace(0.01, 4.0, 400)
        cols = {}
        for name, kw in FIG2_CURVES:
            p = IftrParams(mean_snr=1.0, **kw)
            cols[name] = pdf(p, grid, cfg=cfg)
        cols["rician_shadowed_m3"] = rician_shadowed_pdf(15.0, 3, 1.0, grid)
    elif args.preset == "fig3":
        grid = np.logspace(-4, 1, 251)
        cols = {}
        for name, kw in FIG3_CURVES:
            p = IftrParams(mean_snr=1.0, **kw)
            cols[name] = cdf(p, grid, cfg=cfg)
    else:
        raise ValidationError(f"eval preset must be fig1|fig2|fig3, got {args.preset!r}")
    header = "x," + ",".join(cols)
    rows = [
        ",".join([_fmt(x)] + [_fmt(col[i]) for col in cols.values()])
        for i, x in enumerate(grid)
    ]
    _write_csv(args, header, rows, "eval")
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.preset:
        return _eval_preset(args)
    if args.quantity not in EVAL_QUANTITIES:
        raise ValidationError(
            f"quantity must be one of {EVAL_QUANTITIES} (use the ber/outage subcommands for sweeps)"
        )
    p = _params_from_args(args)
    grid, spacing = _parse_grid(args.grid)
    envelope = args.quantity.endswith("envelope")
    if spacing == "db":
        grid = 10.0 ** (grid / (20.0 if envelope else 10.0))
    domain = DistributionDomain.ENVELOPE if envelope else DistributionDomain.SNR
    if args.quantity.startswith("pdf"):
        values = pdf(p, grid, domain=domain)
    else:
        values = cdf(p, grid, domain=domain)
        if args.quantity.startswith("ccdf"):
            values = 1.0 - values
    rows = [f"{_fmt(x)},{_fmt(v)}" for x, v in zip(grid, values)]
    _write_csv(args, "x,value", rows, "eval")
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = SimConfig(n_samples=args.n, seed=args.seed, model=args.model, output=args.output)
    scale = args.omega if args.omega is not None else (args.gamma_bar if args.gamma_bar is not None else 1.0)
    if args.model == "iftr":
        p = IftrParams(k=args.K, delta=args.Delta, m1=args.m1, m2=args.m2, mean_snr=scale)
        values = sample_iftr(p, cfg)
    elif args.model == "ftr":
        values = sample_ftr(args.K, args.Delta, args.m, scale, cfg)
    elif args.model == "twdp":
        values = sample_twdp(args.K, args.Delta, scale, cfg)
    elif args.model == "rice":
        values = sample_rice(args.K, scale, cfg)
    else:
        values = sample_rician_shadowed(args.K, args.m, scale, cfg)
    prov = provenance_dict(
        cfg,
        tool="iftr",
        version=__version__,
        K=args.K,
        Delta=args.Delta,
        m1=getattr(args, "m1", None),
        m2=getattr(args, "m2", None),
        m=getattr(args, "m", None),
        scale=scale,
    )
    prov = {k: ("inf" if v == math.inf else v) for k, v in prov.items() if v is not None}
    write_samples(args.out, values, prov)
    return EXIT_OK


def _modulation_from_args(args) -> ModulationSpec:
    if args.mod == "bpsk":
        return ModulationSpec.bpsk()
    if not args.alpha or not args.beta or len(args.alpha) != len(args.beta):
        raise ValidationError("custom modulation needs matching --alpha/--beta lists")
    return ModulationSpec(list(zip(args.alpha, args.beta)))


def _sweep_db(args) -> np.ndarray:
    if args.db_stop <= args.db_start:
        raise ValidationError("need db-stop > db-start")
    return np.arange(args.db_start, args.db_stop + 0.5 * args.db_step, args.db_step)


def cmd_ber(args) -> int:
    mod = _modulation_from_args(args)
    db = _sweep_db(args)
    if args.preset == "fig4":
        cols = {}
        for m1 in FIG4_M1:
            exact, asym = [], []
            for g in 10.0 ** (db / 10.0):
                p = IftrParams(k=15, delta=0.5, m1=m1, m2=2, mean_snr=g)
                exact.append(ber_exact(p, mod).value)
                asym.append(ber_asymptotic(p, mod).value)
            cols[f"exact_m1_{m1}"] = exact
            cols[f"asymptotic_m1_{m1}"] = asym
        header = "gamma_bar_db," + ",".join(cols)
        rows = [
            ",".join([_fmt(d)] + [_fmt(col[i]) for col in cols.values()])
            for i, d in enumerate(db)
        ]
        _write_csv(args, header, rows, "ber")
        return EXIT_OK
    base = _params_from_args(args)
    integer_shape = any(
        math.isfinite(m) and abs(m - round(m)) < 1e-9 for m in (base.m1, base.m2)
    )
    rows = []
    for d in db:
        p = base.with_mean_snr(10.0 ** (d / 10.0))
        exact = (ber_exact(p, mod) if integer_shape else ber_mgf_quadrature(p, mod)).value
        asym = ber_asymptotic(p, mod).value
        fields = [_fmt(d), _fmt(exact), _fmt(asym)]
        if args.monte_carlo:
            fields.append(_fmt(ber_monte_carlo(p, mod, args.monte_carlo, args.seed).value))
        rows.append(",".join(fields))
    header = "gamma_bar_db,exact,asymptotic" + (",monte_carlo" if args.monte_carlo else "")
    _write_csv(args, header, rows, "ber")
    return EXIT_OK


def cmd_outage(args) -> int:
    db = _sweep_db(args)
    if args.preset == "fig5":
        cols = {}
        for name, kw in FIG5_CURVES:
            vals = []
            for g in 10.0 ** (db / 10.0):
                vals.append(outage(IftrParams(mean_snr=g, **kw), args.Rs))
            cols[name] = vals
        header = "gamma_bar_db," + ",".join(cols)
        rows = [
            ",".join([_fmt(d)] + [_fmt(col[i]) for col in cols.values()])
            for i, d in enumerate(db)
        ]
        _write_csv(args, header, rows, "outage")
        return EXIT_OK
    base = _params_from_args(args)
    rows = []
    for d in db:
        p = base.with_mean_snr(10.0 ** (d / 10.0))
        fields = [_fmt(d), _fmt(outage(p, args.Rs)), _fmt(outage_asymptotic(p, args.Rs))]
        if args.monte_carlo:
            from .sim import sample_iftr as _si

            snr = _si(p, SimConfig(n_samples=args.monte_carlo, seed=args.seed, output="snr"))
            fields.append(_fmt(float(np.mean(snr < 2.0 ** args.Rs - 1.0))))
        rows.append(",".join(fields))
    header = "gamma_bar_db,exact,asymptotic" + (",monte_carlo" if args.monte_carlo else "")
    _write_csv(args, header, rows, "outage")
    return EXIT_OK


def cmd_fit(args) -> int:
    domain = DistributionDomain(args.domain)
    if args.from_samples:
        from .sim import read_samples

        values, _ = read_samples(args.input)
        emp = empirical_cdf_from_samples(values, domain=domain, n_points=args.quantiles)
    else:
        emp = load_empirical_cdf(args.input, domain=domain)
    families = ("iftr", "rice", "twdp", "rician-shadowed") if args.compare else (args.model,)
    results = {}
    for family in families:
        cfg = FitConfig(
            model_family=family,
            fit_scale=args.fit_scale,
            restarts=args.restarts,
            seed=args.seed,
            m1_grid=tuple(range(args.m1_min, args.m1_max + 1)),
        )
        results[family] = fit(emp, cfg)
    if args.compare:
        doc = {
            "comparison": {
                fam: json.loads(fit_result_to_json(r, args.restarts)) for fam, r in results.items()
            }
        }
        text = json.dumps(doc, sort_keys=True)
    else:
        text = fit_result_to_json(results[args.model], args.restarts)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def _add_param_flags(sp, shapes=True):
    sp.add_argument("--K", type=float, default=0.0, help="specular-to-diffuse power ratio")
    sp.add_argument("--Delta", type=float, default=0.0, help="ray similarity index in [0, 1]")
    if shapes:
        sp.add_argument("--m1", type=_parse_shape, default=math.inf, help="shape of the stronger-ray fluctuation ('inf' freezes it)")
        sp.add_argument("--m2", type=_parse_shape, default=math.inf, help="shape of the weaker-ray fluctuation")
    sp.add_argument("--gamma-bar", type=float, default=None, help="mean SNR, linear")
    sp.add_argument("--gamma-bar-db", type=float, default=None, help="mean SNR in dB")
    sp.add_argument("--Omega", dest="omega", type=float, default=None, help="mean squared envelope (envelope-domain scale)")
    sp.add_argument("--params-json", default=None, help="JSON parameter document file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iftr", description=__doc__)
    ap.add_argument("--version", action="version", version=f"iftr {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate a distribution curve to CSV")
    _add_param_flags(sp)
    sp.add_argument("--quantity", default="cdf-snr", help="|".join(EVAL_QUANTITIES))
    sp.add_argument(
        "--grid",
        default="0.1:10:100",
        help="start:stop:count[:linear|log|db]; use --grid=-10:5:40:db for negative starts",
    )
    sp.add_argument("--preset", default=None, help="fig1|fig2|fig3 reference curve sets")
    sp.add_argument("--out", default=None, help="output CSV path (default stdout)")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("sample", help="draw channel realizations to a sample file")
    sp.add_argument("--model", default="iftr", choices=("iftr", "ftr", "twdp", "rice", "rician-shadowed"))
    sp.add_argument("--n", type=int, required=True, help="number of samples")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", default="envelope", choices=("envelope", "snr", "complex-voltage"))
    sp.add_argument("--m", type=_parse_shape, default=math.inf, help="shared/single fluctuation shape (ftr, rician-shadowed)")
    _add_param_flags(sp)
    sp.add_argument("--out", required=True, help="output sample file")
    sp.set_defaults(func=cmd_sample)

    for name, fn, extra in (("ber", cmd_ber, "fig4"), ("outage", cmd_outage, "fig5")):
        sp = sub.add_parser(name, help=f"{name} vs mean SNR sweep to CSV")
        _add_param_flags(sp)
        sp.add_argument("--db-start", type=float, default=0.0)
        sp.add_argument("--db-stop", type=float, default=50.0)
        sp.add_argument("--db-step", type=float, default=1.0)
        sp.add_argument("--monte-carlo", type=int, default=0, help="add a Monte Carlo column with this many samples per point")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--preset", default=None, help=f"{extra} reference sweep")
        sp.add_argument("--out", default=None)
        if name == "ber":
            sp.add_argument("--mod", default="bpsk", help="bpsk or 'custom' with --alpha/--beta")
            sp.add_argument("--alpha", type=float, action="append", default=None)
            sp.add_argument("--beta", type=float, action="append", default=None)
        else:
            sp.add_argument("--Rs", type=float, default=2.0, help="rate threshold, bits/s/Hz")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("fit", help="fit model families to an empirical CDF")
    sp.add_argument("input", help="CSV empirical CDF (x,cdf | x_db,cdf) or sample dump with --from-samples")
    sp.add_argument("--from-samples", action="store_true", help="input is a sample dump; build the CDF from quantiles")
    sp.add_argument("--quantiles", type=int, default=40)
    sp.add_argument("--domain", default="snr", choices=("snr", "envelope"))
    sp.add_argument("--model", default="iftr", choices=("iftr", "iftr-integer-m1", "rice", "twdp", "rician-shadowed"))
    sp.add_argument("--compare", action="store_true", help="fit all families and emit a comparison document")
    sp.add_argument("--fit-scale", action="store_true", help="also fit the scale (non-normalized data)")
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--m1-min", type=int, default=1)
    sp.add_argument("--m1-max", type=int, default=60)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
