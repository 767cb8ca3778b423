"""End-to-end analysis run and the long-run sign comparison."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import diagnostics, structural
from .config import RunConfig
from .dataset import TransformSpec, apply_transforms, descriptive_stats, load_table
from .errors import DiagnosticsFailure, NumericalError, VecmLabError
from .johansen import VecmFit, VecmSpec, estimate_vecm, trace_test
from .unitroot import unit_root_table
from .varbase import lag_order_table

log = logging.getLogger(__name__)

# Expected long-run effect on the price level of each determinant of the
# price equation. "+/-" marks the activity level, whose sign depends on
# whether money-demand or output-gap effects dominate.
SIGN_EXPECTATIONS = {
    "m_s": "+",
    "y": "+/-",
    "pi_e": "+",
    "i": "-",
    "er": "+",
    "p_f": "+",
    "p_r": "+",
}

GLOSSARY = {
    "pi_e": "expected inflation; realised as past inflation through the lagged differences, so it has no long-run coefficient",
    "theta0, theta1, theta2": "weights of non-tradable, tradable and regulated prices in the price index; motivation only",
    "beta (money market)": "scale of excess money supply in non-tradable prices; motivation only",
    "mu, omega, sigma": "markup, unit labour cost and intermediate-input cost of the markup model; not estimated",
}


@dataclass(frozen=True)
class SignRow:
    variable: str
    role: str
    coefficient: float | None
    stderr: float | None
    implied_sign: str | None
    expected: str
    label: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def sign_report(
    fit: VecmFit,
    roles: dict[str, str],
    expectations: dict[str, str] | None = None,
    level: float = 0.05,
) -> list[SignRow]:
    """Compare relation-1 long-run coefficients with the expected signs.

    ``roles`` maps role keys (``p``, ``m_s``, ``y``, ``i``, ``er``, ``p_f``,
    ``p_r``) to variable names; ``p`` must be the unit-normalised variable of
    the first relation. The implied effect on ``p`` of a variable with
    coefficient ``b`` is ``-b``. Labels: ``not-significant`` when
    ``|b / se|`` is below the two-sided normal critical value, else
    ``ambiguous`` for a ``+/-`` expectation, else ``match`` or ``mismatch``.
    """
    expectations = SIGN_EXPECTATIONS if expectations is None else expectations
    if "p" not in roles:
        raise ValueError("roles must name the price variable under key 'p'")
    p = roles["p"]
    if not fit.normalization or fit.normalization[0] != p or not np.isclose(fit.beta[fit.names.index(p), 0], 1.0):
        raise ValueError(f"{p!r} must carry the unit coefficient of relation 1")
    if fit.beta_se is None:
        raise ValueError("fit has no beta standard errors")
    zcrit = stats.norm.ppf(1 - level / 2)
    rows = []
    for role, expected in expectations.items():
        if role == "pi_e":
            rows.append(SignRow("(lagged differences)", role, None, None, None, expected, "lagged-dynamics"))
            continue
        if role not in roles:
            continue
        name = roles[role]
        j = fit.names.index(name)
        b = float(fit.beta[j, 0])
        se = float(fit.beta_se[j, 0])
        implied = "+" if -b > 0 else "-" if -b < 0 else "0"
        if not np.isfinite(se) or se == 0 or abs(b / se) < zcrit:
            label = "not-significant"
        elif expected == "+/-":
            label = "ambiguous"
        else:
            label = "match" if implied == expected else "mismatch"
        rows.append(SignRow(name, role, b, se, implied, expected, label))
    return rows


# ---------------------------------------------------------------------------
# rendering helpers


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def render_table(rows: list[dict], columns: list[str] | None = None) -> str:
    """Plain-text table of dict rows; every cell comes from the dict values."""
    if not rows:
        return "(empty)\n"
    columns = columns or list(rows[0])
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    line = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(out) + "\n"


def write_long_csv(rows: list[dict], path: Path) -> None:
    cols = ["ordering", "shock", "response", "horizon", "value", "lower", "upper"]
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r[k] is None else (repr(r[k]) if isinstance(r[k], float) else r[k])) for k in cols})


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, default=_json_default) + "\n")


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class ReportBundle:
    output_dir: Path
    stages: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    failed_stage: str | None = None
    error: str | None = None
    exit_code: int = 0
    fit: VecmFit | None = None

    def summary(self) -> dict:
        return {
            "stages_completed": list(self.stages),
            "warnings": self.warnings,
            "failed_stage": self.failed_stage,
            "error": self.error,
            "exit_code": self.exit_code,
        }


def _diagnostics_dict(fit: VecmFit, config: RunConfig, bundle: ReportBundle) -> dict:
    st = diagnostics.stability(fit)
    out = {"stability": st.as_dict()}
    if not st.stable:
        msg = f"unstable model: largest non-unit modulus {st.max_other:.6g}"
        if config.strict:
            raise DiagnosticsFailure(msg)
        bundle.warnings.append(msg)
    lm = []
    for lag in config.lm_lags:
        try:
            lm.append(diagnostics.lm_autocorrelation(fit, lag).as_dict())
        except VecmLabError as exc:
            bundle.warnings.append(f"LM test at lag {lag} skipped: {exc}")
    out["lm_autocorrelation"] = lm
    if 1 <= fit.rank < fit.K:
        out["weak_exogeneity"] = [t.as_dict() for t in diagnostics.weak_exogeneity_table(fit).values()]
    else:
        bundle.warnings.append("weak exogeneity tests need 1 <= rank < K; skipped")
    if fit.lags >= 2:
        table = diagnostics.granger_table(fit)
        out["granger"] = [
            {"effect": e, "cause": c, **t.as_dict()} for e, row in table.items() for c, t in row.items()
        ]
    else:
        bundle.warnings.append("short-run Granger tests need lags >= 2; skipped")
    return out


def run_pipeline(config: RunConfig) -> ReportBundle:
    """Run every stage in order, writing one JSON and one text report per stage.

    A failing stage stops the run; earlier outputs stay on disk and a
    ``FAILED`` marker names the stage.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "FAILED").unlink(missing_ok=True)
    bundle = ReportBundle(out)
    text_parts: list[str] = []

    def emit(stage: str, payload, text: str):
        bundle.stages[stage] = payload
        dump_json(payload, out / f"{stage}.json")
        (out / f"{stage}.txt").write_text(text)
        text_parts.append(f"== {stage} ==\n{text}")

    stage = "dataset"
    try:
        raw = load_table(config.input, config.date_column).select(config.names)
        spec = TransformSpec(
            {v.name: v.transform for v in config.variables},
            {v.name: v.adf for v in config.variables},
        )
        table = apply_transforms(raw, spec)
        desc = {n: s.as_dict() for n, s in descriptive_stats(table).items()}
        emit("01_dataset", {
            "T": table.T, "K": table.K, "start": table.dates[0], "end": table.dates[-1],
            "transforms": dict(spec.transforms),
            "provenance": {v.name: v.note for v in config.variables},
            "descriptive": desc,
        }, f"sample {table.dates[0]}-{table.dates[-1]}, T={table.T}\n"
           + render_table([{"variable": n, **d} for n, d in desc.items()]))

        stage = "unitroot"
        rows = unit_root_table(table, dict(spec.adf_deterministic), alpha=config.alpha)
        for r in rows:
            if r.order != "I(1)":
                bundle.warnings.append(f"{r.name} classified {r.order}, not I(1)")
        ur = [r.as_dict() for r in rows]
        emit("02_unit_root", {"alpha": config.alpha, "rows": ur},
             render_table(ur, ["variable", "level_p", "difference_p", "deterministic", "order"]))

        stage = "varbase"
        lot = lag_order_table(table, config.lags.p_max, config.lags.deterministic)
        selected = lot.selected(config.lags.criterion)
        lags = config.lags.value or selected
        if config.lags.value and config.lags.value != selected:
            bundle.warnings.append(
                f"configured lags {config.lags.value} differ from {config.lags.criterion} selection {selected}"
            )
        lo = lot.as_dict()
        lo["criterion"] = config.lags.criterion
        lo["lags_used"] = lags
        emit("03_lag_order", lo, render_table(lo["rows"]) + f"selected: {lo['selected']}, used: {lags}\n")

        stage = "johansen"
        tt = trace_test(table, lags, config.deterministic)
        rank = tt.rank_5pct if config.rank is None else config.rank
        if config.rank is not None and config.rank != tt.rank_5pct:
            bundle.warnings.append(
                f"configured rank {config.rank} differs from the trace-test selection {tt.rank_5pct} at 5%"
            )
        td = tt.as_dict()
        td["rank_used"] = rank
        emit("04_trace_test", td, render_table(td["rows"]) + f"selected rank: {td['selected_rank']}, used: {rank}\n")

        vspec = VecmSpec(lags=lags, rank=rank, deterministic=config.deterministic)
        fit = estimate_vecm(table, vspec, normalization=config.normalization)
        bundle.fit = fit
        fd = fit.as_dict()
        beta_rows = []
        for i, name in enumerate(fit.beta_rows):
            row = {"variable": name}
            for j in range(fit.rank):
                row[f"eq{j + 1}"] = fit.beta[i, j]
                row[f"se{j + 1}"] = None if fit.beta_se is None or np.isnan(fit.beta_se[i, j]) else fit.beta_se[i, j]
            beta_rows.append(row)
        alpha_rows = [{"variable": n, **{f"eq{j + 1}": fit.alpha[i, j] for j in range(fit.rank)}}
                      for i, n in enumerate(fit.names)]
        fd["long_run"] = beta_rows
        fd["adjustment"] = alpha_rows
        emit("05_vecm", fd, "long-run relations (beta)\n" + render_table(beta_rows)
             + "adjustment (alpha)\n" + render_table(alpha_rows))

        stage = "diagnostics"
        dd = _diagnostics_dict(fit, config, bundle)
        text = f"companion moduli: {', '.join(f'{m:.6g}' for m in dd['stability']['moduli'])}\n"
        text += "LM autocorrelation\n" + render_table(dd["lm_autocorrelation"])
        if "weak_exogeneity" in dd:
            text += "weak exogeneity\n" + render_table(dd["weak_exogeneity"])
        if "granger" in dd:
            text += "short-run Granger causality\n" + render_table(dd["granger"])
        emit("06_diagnostics", dd, text)

        stage = "signs"
        roles = {v.role: v.name for v in config.variables if v.role}
        if "p" in roles and fit.rank >= 1:
            try:
                sr = [r.as_dict() for r in sign_report(fit, roles)]
                emit("07_sign_report", {"rows": sr, "glossary": GLOSSARY}, render_table(sr))
            except ValueError as exc:
                bundle.warnings.append(f"sign report skipped: {exc}")

        stage = "structural"
        irf_rows, fevd_rows, boot_meta = [], [], []
        for ordering in config.resolved_orderings():
            if config.bootstrap.enabled:
                bands = structural.bootstrap_bands(
                    fit, ordering, config.horizon, config.bootstrap.reps, config.bootstrap.level,
                    config.bootstrap.seed, n_jobs=config.bootstrap.n_jobs,
                )
                ir, fe = bands.irf, bands.fevd
                boot_meta.append({"ordering": ordering.label, **bands.as_dict()})
            else:
                ir = structural.irf(fit, ordering, config.horizon)
                fe = structural.fevd(fit, ordering, config.horizon)
            irf_rows += ir.long_format()
            fevd_rows += fe.long_format()
        write_long_csv(irf_rows, out / "08_irf.csv")
        write_long_csv(fevd_rows, out / "09_fevd.csv")
        emit("08_irf", {"bootstrap": boot_meta, "rows": irf_rows}, render_table(irf_rows))
        emit("09_fevd", {"bootstrap": boot_meta, "rows": fevd_rows}, render_table(fevd_rows))
    except VecmLabError as exc:
        bundle.failed_stage, bundle.error, bundle.exit_code = stage, str(exc), exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        bundle.failed_stage, bundle.error, bundle.exit_code = stage, str(exc), NumericalError.exit_code

    if bundle.failed_stage:
        (out / "FAILED").write_text(f"{bundle.failed_stage}: {bundle.error}\n")
        log.error("stage %s failed: %s", bundle.failed_stage, bundle.error)
    for w in bundle.warnings:
        log.warning(w)
    dump_json(bundle.summary(), out / "summary.json")
    text_parts.append("== summary ==\n" + "\n".join(f"warning: {w}" for w in bundle.warnings) + "\n")
    (out / "report.txt").write_text("\n".join(text_parts))
    return bundle
