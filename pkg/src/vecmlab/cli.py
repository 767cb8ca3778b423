"""``vecm-lab`` command-line interface."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import diagnostics, structural
from .config import load_config
from .dataset import TransformSpec, apply_transforms, descriptive_stats, load_table, save_table
from .errors import ConfigError, VecmLabError
from .johansen import VecmSpec, estimate_vecm, trace_test
from .pipeline import _json_default, render_table, run_pipeline, write_long_csv
from .synthetic import VecmDgp, simulate
from .unitroot import unit_root_table
from .varbase import lag_order_table


def _split(s: str | None) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()] if s else []


def _load(args):
    table = load_table(args.input, args.date_column)
    cols = _split(args.columns)
    if cols:
        table = table.select(cols)
    logs = set(_split(args.log))
    unknown = logs - set(table.names)
    if unknown:
        raise ConfigError(f"--log names unknown columns {sorted(unknown)}")
    spec = TransformSpec({n: "log" if n in logs else "level" for n in table.names})
    return apply_transforms(table, spec)


def _fit(args, table):
    spec = VecmSpec(lags=args.lags, rank=args.rank, deterministic=args.deterministic)
    norm = _split(args.normalization) or None
    return estimate_vecm(table, spec, normalization=norm)


def _ordering(args, names):
    if args.ordering in structural.ORDER_PRESETS:
        return structural.Ordering.preset(args.ordering)
    return structural.Ordering(tuple(_split(args.ordering)) or tuple(names), "custom")


def _emit(args, payload, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, default=_json_default))
    else:
        print(text, end="")


def cmd_stats(args):
    table = _load(args)
    desc = {n: s.as_dict() for n, s in descriptive_stats(table).items()}
    _emit(args, desc, render_table([{"variable": n, **d} for n, d in desc.items()]))


def cmd_adf(args):
    table = _load(args)
    det = args.deterministic
    ct = set(_split(args.trend))
    dets = {n: ("ct" if n in ct else det) for n in table.names}
    lags = "auto" if args.lags == "auto" else int(args.lags)
    rows = [r.as_dict() for r in unit_root_table(table, dets, args.alpha, lags)]
    _emit(args, rows, render_table(rows, ["variable", "level_p", "difference_p", "deterministic", "order"]))


def cmd_lags(args):
    table = _load(args)
    lot = lag_order_table(table, args.p_max, args.deterministic).as_dict()
    rows = []
    for r in lot["rows"]:
        row = dict(r)
        for c in ("aic", "bic", "hqic"):
            row[f"{c}_min"] = "*" if lot["selected"][c] == r["p"] else ""
        rows.append(row)
    _emit(args, lot, render_table(rows))


def cmd_trace(args):
    table = _load(args)
    tt = trace_test(table, args.lags, args.deterministic).as_dict()
    _emit(args, tt, render_table(tt["rows"]) + f"selected rank: {tt['selected_rank']}\n")


def cmd_fit(args):
    fit = _fit(args, _load(args))
    d = fit.as_dict()
    rows = []
    for i, n in enumerate(fit.beta_rows):
        row = {"variable": n}
        for j in range(fit.rank):
            row[f"eq{j + 1}"] = fit.beta[i, j]
            se = fit.beta_se[i, j] if fit.beta_se is not None else np.nan
            row[f"se{j + 1}"] = None if np.isnan(se) else se
        rows.append(row)
    alpha = [{"variable": n, **{f"eq{j + 1}": fit.alpha[i, j] for j in range(fit.rank)}} for i, n in enumerate(fit.names)]
    _emit(args, d, render_table(rows) + "alpha\n" + render_table(alpha))


def cmd_diagnose(args):
    fit = _fit(args, _load(args))
    st = diagnostics.stability(fit)
    out = {"stability": st.as_dict()}
    out["lm_autocorrelation"] = [diagnostics.lm_autocorrelation(fit, h).as_dict() for h in args.lm_lags]
    if 1 <= fit.rank < fit.K:
        out["weak_exogeneity"] = [t.as_dict() for t in diagnostics.weak_exogeneity_table(fit).values()]
    if fit.lags >= 2:
        out["granger"] = [
            {"effect": e, "cause": c, **t.as_dict()}
            for e, row in diagnostics.granger_table(fit).items() for c, t in row.items()
        ]
    text = "companion moduli: " + ", ".join(f"{m:.6g}" for m in st.moduli) + "\n"
    for key in ("lm_autocorrelation", "weak_exogeneity", "granger"):
        if key in out:
            text += f"{key}\n" + render_table(out[key])
    _emit(args, out, text)


def _structural(args, kind: str):
    table = _load(args)
    fit = _fit(args, table)
    ordering = _ordering(args, fit.names)
    if args.reps:
        bands = structural.bootstrap_bands(fit, ordering, args.horizon, args.reps, args.level, args.seed, n_jobs=args.n_jobs)
        res = bands.irf if kind == "irf" else bands.fevd
    else:
        res = structural.irf(fit, ordering, args.horizon) if kind == "irf" else structural.fevd(fit, ordering, args.horizon)
    rows = res.long_format()
    if args.out:
        write_long_csv(rows, Path(args.out))
    _emit(args, rows, render_table(rows))


def cmd_simulate(args):
    spec = yaml.safe_load(Path(args.dgp).read_text())
    if not isinstance(spec, dict):
        raise ConfigError("DGP file must be a mapping")
    allowed = {"alpha", "beta", "sigma", "gammas", "const", "trend", "y0", "names"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown DGP keys {sorted(unknown)}")
    dgp = VecmDgp(**spec)
    table = simulate(dgp, args.T, args.seed, burn_in=args.burn_in)
    save_table(table, args.out)
    print(f"wrote {table.T} rows x {table.K} columns to {args.out}")


def cmd_run(args):
    config = load_config(args.config)
    bundle = run_pipeline(config)
    if args.json:
        print(json.dumps(bundle.summary(), indent=2))
    else:
        print((Path(config.output_dir) / "report.txt").read_text(), end="")
    return bundle.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vecm-lab", description="Cointegration and VECM analysis toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp):
        sp.add_argument("--input", required=True, help="CSV file with a header row")
        sp.add_argument("--date-column", default="date")
        sp.add_argument("--columns", help="comma-separated subset of columns, in model order")
        sp.add_argument("--log", help="comma-separated columns to log-transform")
        sp.add_argument("--json", action="store_true", help="emit JSON instead of a text table")

    def model_args(sp):
        sp.add_argument("--lags", type=int, default=2, help="lags of the levels VAR")
        sp.add_argument("--rank", type=int, default=1)
        sp.add_argument("--deterministic", choices=["rtrend", "constant"], default="rtrend")
        sp.add_argument("--normalization", help="comma-separated normalisation variables (default: first r)")

    sp = sub.add_parser("run", help="full pipeline from a YAML config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("stats", help="descriptive statistics")
    data_args(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("adf", help="ADF unit-root tests in levels and differences")
    data_args(sp)
    sp.add_argument("--deterministic", choices=["c", "ct"], default="c")
    sp.add_argument("--trend", help="columns tested with constant and trend")
    sp.add_argument("--lags", default="auto")
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.set_defaults(func=cmd_adf)

    sp = sub.add_parser("lags", help="VAR lag-order information criteria")
    data_args(sp)
    sp.add_argument("--p-max", type=int, default=4)
    sp.add_argument("--deterministic", choices=["c", "ct"], default="ct")
    sp.set_defaults(func=cmd_lags)

    sp = sub.add_parser("trace", help="Johansen trace test")
    data_args(sp)
    sp.add_argument("--lags", type=int, default=2)
    sp.add_argument("--deterministic", choices=["rtrend", "constant"], default="rtrend")
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("fit", help="estimate the VECM")
    data_args(sp)
    model_args(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("diagnose", help="stability, LM, weak exogeneity and Granger tests")
    data_args(sp)
    model_args(sp)
    sp.add_argument("--lm-lags", type=int, nargs="+", default=[1, 2])
    sp.set_defaults(func=cmd_diagnose)

    for kind in ("irf", "fevd"):
        sp = sub.add_parser(kind, help=f"orthogonalised {kind.upper()} in long format")
        data_args(sp)
        model_args(sp)
        sp.add_argument("--ordering", default=None, help="preset order1..order4 or comma-separated names")
        sp.add_argument("--horizon", type=int, default=structural.DEFAULT_HORIZON)
        sp.add_argument("--reps", type=int, default=0, help="bootstrap replications (0: none)")
        sp.add_argument("--level", type=float, default=0.95)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--n-jobs", type=int, default=1)
        sp.add_argument("--out", help="write the long-format CSV here")
        sp.set_defaults(func=lambda a, k=kind: _structural(a, k))

    sp = sub.add_parser("simulate", help="simulate a VECM from a YAML/JSON DGP file")
    sp.add_argument("--dgp", required=True)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        code = args.func(args)
    except VecmLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
