import csv
import io
import json
import math

import jsonschema
import pytest

from reflectlab import __version__
from reflectlab.cli import main
from reflectlab.output import dumps, experiment_csv, fmt_float, load_schema, loads

NORMAL = "normal(mu=0,sigma=1)"
RESULT_SCHEMA = {"classify": "criteria_report", "passage": "passage", "validate": "validate",
                 "experiment": "experiment"}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(argv):
    code, text, err = run(argv + ["--json"])
    assert code == 0, err
    doc = loads(text)
    jsonschema.validate(json.loads(text), load_schema("envelope"))
    name = RESULT_SCHEMA.get(doc["command"])
    if name:
        jsonschema.validate(json.loads(text)["result"], load_schema(name))
    return doc


@pytest.fixture
def config(tmp_path):
    def make(**kw):
        cfg = {"dist": "lattice(p=0.5)", "kappa": 0, "r": [0, 1], "caps": [10, 100, 1000],
               "reps": 200, "seed": 7}
        cfg.update(kw)
        p = tmp_path / "exp.json"
        p.write_text(json.dumps(cfg))
        return p
    return make


# ---------------------------------------------------------------------------
# classify and criteria


def test_classify_json_example():
    doc = run_json(["classify", "--dist", NORMAL, "--kappa", "0.5"])
    assert doc["result"]["fired_clause"] == "2.10"
    assert doc["result"]["tau_all_r_as_finite"]["verdict"] == "Finite"
    assert doc["tool"] == "reflectlab" and doc["version"] == __version__
    assert doc["dist"] == "normal(mu=0.0,sigma=1.0)"


def test_classify_csv_and_human():
    code, text, _ = run(["classify", "--dist", "normal(mu=-1,sigma=1)", "--kappa", "1", "--csv"])
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(text)))
    assert row["fired_clause"] == "2.9" and row["tau_all_r_as_finite"] == "Infinite"
    assert float(row["kappa1_drift_threshold"]) == 1.0
    code, text, _ = run(["classify", "--dist", NORMAL, "--kappa", "2"])
    assert code == 0 and "2.2" in text and "Infinite" in text


@pytest.mark.parametrize("argv, key, expected", [
    (["--quantity", "a_plus", "--x", "2"], "result", 0.5),
    (["--quantity", "w", "--x", "0.5"], "result", 0.25),
])
def test_criteria_values(argv, key, expected):
    doc = run_json(["criteria", "--dist", "lattice(p=0.5)"] + argv)
    assert doc[key] == pytest.approx(expected, rel=1e-12)


def test_criteria_verdicts():
    doc = run_json(["criteria", "--dist", "cauchy()", "--quantity", "j_minus", "--method", "numeric"])
    assert doc["result"]["verdict"] == "Infinite" and doc["result"]["source"] == "NumericHeuristic"
    doc = run_json(["criteria", "--dist", "pareto2(alpha_neg=3,alpha_pos=1.2,p_neg=0.5,center=1)",
                    "--quantity", "lambda_star", "--kappa", "0.75"])
    assert doc["result"]["value"] == math.inf


def test_criteria_missing_argument():
    code, _, err = run(["criteria", "--dist", NORMAL, "--quantity", "w"])
    assert code == 1 and "--x" in err and err.count("\n") == 1


# ---------------------------------------------------------------------------
# simulate, passage, ladder


def test_passage_example():
    code, text, _ = run(["passage", "--dist", "lattice(p=0.5)", "--kappa", "0", "--r", "0",
                         "--cap", "100", "--seed", "42"])
    assert code == 0 and text.count("\n") == 1
    assert text.startswith("Finite(") and "seed=42" in text
    doc = run_json(["passage", "--dist", "lattice(p=0.5)", "--kappa", "0", "--r", "0", "--cap", "100",
                    "--seed", "42"])
    assert doc["seed"] == 42 and doc["result"]["kind"] == "finite"


def test_passage_censored():
    doc = run_json(["passage", "--dist", "shiftexp(rate=1,shift=-0.01)", "--kappa", "1", "--r", "50",
                    "--cap", "5", "--seed", "1"])
    assert doc["result"]["outcome"] == "Censored(5)" and doc["result"]["kind"] == "censored"
    assert doc["result"]["n"] == 5 and doc["result"]["exceed_value"] is None


def test_simulate_emit_path(tmp_path):
    target = tmp_path / "path.csv"
    code, _, err = run(["simulate", "--dist", NORMAL, "--steps", "25", "--seed", "5",
                        "--emit-path", str(target)])
    assert code == 0, err
    rows = list(csv.DictReader(target.open()))
    assert list(rows[0]) == ["n", "x", "s", "s_star", "r"]
    assert [int(r["n"]) for r in rows] == list(range(1, 26))
    for r in rows:
        assert float(r["r"]) == float(r["s_star"]) - float(r["s"])
    doc = run_json(["simulate", "--dist", NORMAL, "--steps", "25", "--seed", "5"])
    assert doc["result"]["r_n"] == float(rows[-1]["r"])


def test_ladder_json():
    doc = run_json(["ladder", "--dist", NORMAL, "--steps", "200", "--seed", "3"])
    res = doc["result"]
    assert len(res["ladder_times"]) == len(res["depths"])
    assert res["ladder_times"] == sorted(res["ladder_times"])


def test_validate_suite_json():
    doc = run_json(["validate", "--suite", "recursion", "--dist", NORMAL, "--seed", "1",
                    "--reps", "20", "--n", "100"])
    assert doc["result"][0]["passed"] is True and doc["suite"] == "recursion"
    doc = run_json(["validate", "--suite", "mirror", "--dist", "lattice(p=0.5)", "--seed", "1",
                    "--reps", "1000", "--n", "20"])
    assert all(r["passed"] for r in doc["result"]) and len(doc["result"]) == 6


# ---------------------------------------------------------------------------
# experiment


def test_experiment_golden_csv(data_dir, tmp_path):
    target = tmp_path / "out.csv"
    code, _, err = run(["experiment", "--config", str(data_dir / "experiment_golden.json"),
                        "--seed", "7", "--out", str(target)])
    assert code == 0, err
    assert target.read_bytes() == (data_dir / "experiment_golden.csv").read_bytes()


def test_experiment_csv_to_stdout_matches_file(config, tmp_path):
    target = tmp_path / "out.csv"
    code, text, _ = run(["experiment", "--config", str(config()), "--seed", "7", "--out", str(target),
                         "--csv"])
    assert code == 0 and text == target.read_text()


def test_experiment_json(config):
    doc = run_json(["experiment", "--config", str(config()), "--seed", "7"])
    assert doc["seed"] == 7 and len(doc["result"]["rows"]) == 6
    assert {s["label"] for s in doc["result"]["scan"]} == {"MeanConverging"}
    assert doc["result"]["classification"]["fired_clause"] == "T2.1a"


def test_experiment_figure(config, tmp_path):
    fig = tmp_path / "exp.png"
    code, _, err = run(["experiment", "--config", str(config()), "--seed", "7", "--figure", str(fig)])
    assert code == 0, err
    assert fig.stat().st_size > 1000


def test_simulate_figure(tmp_path):
    fig = tmp_path / "path.png"
    code, _, err = run(["simulate", "--dist", NORMAL, "--steps", "300", "--seed", "5", "--kappa", "0.5",
                        "--r", "1", "--figure", str(fig)])
    assert code == 0, err
    assert fig.stat().st_size > 1000


def test_empty_result_csv_is_header_only():
    assert experiment_csv([]) == ("dist,kappa,r,cap,reps,seed,n_censored,censored_frac,mean_tau_capped,"
                                  "stderr_mean,q50,q90,q99,verdict,fired_clause\n")


# ---------------------------------------------------------------------------
# exit codes


@pytest.mark.parametrize("argv", [
    ["experiment", "--config", "x.json"],
    ["classify", "--dist", NORMAL],
    ["classify", "--dist", NORMAL, "--kappa", "1", "--bogus"],
    ["passage", "--dist", NORMAL, "--kappa", "1", "--r", "1", "--cap", "0", "--seed", "1"],
    ["passage", "--dist", NORMAL, "--kappa", "1", "--r", "1", "--cap", "5", "--seed", "-1"],
    ["classify", "--dist", NORMAL, "--kappa", "nan"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv, fragment", [
    (["classify", "--dist", "gauss()", "--kappa", "1"], "gauss"),
    (["classify", "--dist", "lattice(p=1)", "--kappa", "1"], "F(0-)"),
    (["classify", "--dist", NORMAL, "--kappa", "-1"], "kappa"),
    (["passage", "--dist", NORMAL, "--kappa", "1", "--r", "0", "--cap", "5", "--seed", "1"], "r"),
    (["validate", "--suite", "martingale", "--dist", "cauchy()", "--seed", "1"], "E X = 0"),
])
def test_domain_errors_exit_1(argv, fragment):
    code, out, err = run(argv)
    assert code == 1 and out == ""
    assert err.startswith("reflectlab: error:") and err.count("\n") == 1 and fragment in err


def test_experiment_seed_mismatch_and_io(config, tmp_path):
    code, _, err = run(["experiment", "--config", str(config()), "--seed", "8"])
    assert code == 1 and "does not match" in err
    code, _, err = run(["experiment", "--config", str(tmp_path / "missing.json"), "--seed", "7"])
    assert code == 1 and "missing.json" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(["experiment", "--config", str(bad), "--seed", "7"])
    assert code == 1 and "not valid JSON" in err


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


# ---------------------------------------------------------------------------
# serialization


def test_fmt_float():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(1 / 3)) == 1 / 3
    assert [fmt_float(v) for v in (math.inf, -math.inf, math.nan)] == ["inf", "-inf", "nan"]


def test_json_round_trip():
    obj = {"a": [1, 2.5, math.inf, -math.inf], "b": {"c": None, "d": True, "e": "x"}, "f": 1e-300,
           "g": [], "h": {}, "i": [{"j": 0.1}]}
    back = loads(dumps(obj))
    assert back == obj
    assert math.isnan(loads(dumps({"n": math.nan}))["n"])


def test_classify_json_round_trip():
    code, text, _ = run(["classify", "--dist", "pareto2(alpha_neg=3,alpha_pos=1.2,p_neg=0.5,center=1)",
                         "--kappa", "0.75", "--json"])
    assert code == 0
    assert dumps(loads(text)) + "\n" == text
