import json
import re

import numpy as np
import pytest
import yaml

from vecmlab import pipeline
from vecmlab.config import RunConfig, load_config
from vecmlab.dataset import save_table
from vecmlab.errors import ConfigError
from vecmlab.johansen import VecmSpec, estimate_vecm
from vecmlab.synthetic import simulate

STAGES = ["01_dataset", "02_unit_root", "03_lag_order", "04_trace_test", "05_vecm",
          "06_diagnostics", "07_sign_report", "08_irf", "09_fevd"]


@pytest.fixture()
def workdir(tmp_path, dgp3):
    tab = simulate(dgp3, 160, seed=21)
    # positive levels so a log transform is valid
    tab = tab.replace_values(np.exp(tab.values / 20))
    save_table(tab, tmp_path / "panel.csv")
    return tmp_path


def _config(workdir, **over):
    cfg = {
        "schema_version": 1,
        "input": "panel.csv",
        "output_dir": "out",
        "variables": [
            {"name": "p", "transform": "log", "adf": "ct", "role": "p"},
            {"name": "m", "transform": "log", "role": "m_s"},
            {"name": "i", "transform": "level", "role": "i"},
        ],
        "lags": {"p_max": 4, "value": 2},
        "rank": 1,
        "orderings": [["i", "m", "p"], ["p", "m", "i"]],
        "horizon": 4,
        "bootstrap": {"enabled": True, "reps": 100, "seed": 3},
    }
    cfg.update(over)
    path = workdir / "run.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


def _numbers(text):
    return [float(x) for x in re.findall(r"(?<![\w.])-?\d+(?:\.\d+)?(?:e[-+]?\d+)?(?![\w.])", text)]


def _json_numbers(obj, acc):
    if isinstance(obj, dict):
        for v in obj.values():
            _json_numbers(v, acc)
    elif isinstance(obj, list):
        for v in obj:
            _json_numbers(v, acc)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        acc.append(float(obj))
    return acc


def test_full_run_writes_every_stage(workdir):
    cfg = load_config(_config(workdir))
    bundle = pipeline.run_pipeline(cfg)
    assert bundle.exit_code == 0 and bundle.failed_stage is None
    out = workdir / "out"
    for s in STAGES:
        assert (out / f"{s}.json").is_file() and (out / f"{s}.txt").is_file()
    assert (out / "08_irf.csv").is_file() and not (out / "FAILED").exists()
    irf = json.loads((out / "08_irf.json").read_text())
    assert {r["ordering"] for r in irf["rows"]} == {"custom1", "custom2"}
    assert all(r["lower"] <= r["value"] <= r["upper"] for r in irf["rows"])
    summary = json.loads((out / "summary.json").read_text())
    assert summary["stages_completed"] == STAGES


def test_text_numbers_come_from_json(workdir):
    pipeline.run_pipeline(load_config(_config(workdir)))
    out = workdir / "out"
    for s in STAGES:
        nums = np.array(_json_numbers(json.loads((out / f"{s}.json").read_text()), []))
        for x in _numbers((out / f"{s}.txt").read_text()):
            # text shows 6 significant digits of a JSON value (or a small label such as a rank)
            close = np.isclose(nums, x, rtol=5e-6, atol=1e-12)
            assert close.any() or x in (1, 2, 3, 4, 5, 6, 7, 8, 9), (s, x)


def test_sign_report_labels(sample3):
    fit = estimate_vecm(sample3, VecmSpec(2, 1), normalization=("p",))
    rows = pipeline.sign_report(fit, {"p": "p", "m_s": "m", "i": "i"})
    by = {r.role: r for r in rows}
    b = fit.beta[1, 0]
    assert by["m_s"].implied_sign == ("+" if -b > 0 else "-")
    assert by["pi_e"].label == "lagged-dynamics"
    assert all(r.label in {"match", "mismatch", "not-significant", "ambiguous", "lagged-dynamics"} for r in rows)
    with pytest.raises(ValueError):
        pipeline.sign_report(fit, {"m_s": "m"})
    with pytest.raises(ValueError):
        pipeline.sign_report(fit, {"p": "m", "m_s": "p"})


def test_config_rejects_unknown_keys_and_bad_orderings(workdir):
    with pytest.raises(ConfigError, match="unknown keys"):
        load_config(_config(workdir, colour="red"))
    with pytest.raises(ConfigError, match="unknown variables"):
        load_config(_config(workdir, orderings=[["i", "m", "CPI"]]))
    with pytest.raises(ConfigError):
        load_config(_config(workdir, orderings=[["i", "i", "p"]]))
    with pytest.raises(ConfigError):
        load_config(_config(workdir, orderings=["order1"]))
    with pytest.raises(ConfigError, match="schema_version"):
        load_config(_config(workdir, schema_version=2))
    with pytest.raises(ConfigError):
        load_config(_config(workdir, bootstrap={"reps": 10}))
    with pytest.raises(ConfigError, match="not found"):
        load_config(workdir / "nope.yaml")


def test_preset_with_aliases(workdir):
    names = ["CPI", "M2", "Activity Level", "Interest Rate", "NEER", "Imports Prices", "Regulated Prices"]
    cfg = RunConfig.from_dict({
        "input": "x.csv",
        "variables": [{"name": f"v{i}", "alias": n} for i, n in enumerate(names)],
        "orderings": ["order3"],
    })
    o = cfg.resolved_orderings()[0]
    assert o.names[0] == "v5" and o.label == "order3"


def test_failure_marker_and_exit_codes(workdir, monkeypatch):
    cfg = load_config(_config(workdir, input="missing.csv"))
    b = pipeline.run_pipeline(cfg)
    assert b.exit_code == 3 and b.failed_stage == "dataset"
    assert (workdir / "out" / "FAILED").read_text().startswith("dataset")

    from vecmlab.diagnostics import StabilityReport

    def unstable(fit, tol=1e-6):
        return StabilityReport(np.array([1.2, 1.0, 1.0]), 2, 2, 1.2)

    monkeypatch.setattr(pipeline.diagnostics, "stability", unstable)
    b = pipeline.run_pipeline(load_config(_config(workdir, strict=True)))
    assert b.exit_code == 5 and b.failed_stage == "diagnostics"
    assert (workdir / "out" / "05_vecm.json").is_file()
    b = pipeline.run_pipeline(load_config(_config(workdir, strict=False)))
    assert b.exit_code == 0 and any("unstable" in w for w in b.warnings)
    assert not (workdir / "out" / "FAILED").exists()


def test_numerical_failure_exit_code(workdir, dgp3):
    tab = simulate(dgp3, 120, seed=1)
    v = tab.values.copy()
    v[:, 2] = v[:, 0] - v[:, 1]
    save_table(tab.replace_values(np.exp(v / 20)), workdir / "panel.csv")
    cfg = load_config(_config(workdir, variables=[
        {"name": "p", "transform": "log"}, {"name": "m", "transform": "log"}, {"name": "i", "transform": "log"}]))
    b = pipeline.run_pipeline(cfg)
    assert b.exit_code == 4
