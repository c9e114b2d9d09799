import csv
import json
import logging

import pytest

from hypertuple import __version__, cli
from hypertuple.cli import (ExperimentConfig, RunReport, build_parser, load_config, load_tuple,
                            main, parse_expect, residual, run)
from hypertuple.errors import InvalidInput, SchemaError
from hypertuple.numkit import DEFAULT_SEED
from hypertuple.orbit import OrbitBudget

#: A bare tuple whose second operator has a scalar instead of a [re, im] pair.
MALFORMED_TUPLE = ('[{"field": "C", "n": 1, "entries": [[[1, 0]]]},'
                   ' {"field": "C", "n": 1, "entries": [[1]]}]')


@pytest.fixture(autouse=True)
def restore_logger():
    package_logger = logging.getLogger("hypertuple")
    handlers, propagate, level = package_logger.handlers[:], package_logger.propagate, \
        package_logger.level
    yield
    package_logger.handlers = handlers
    package_logger.propagate = propagate
    package_logger.setLevel(level)


def invoke(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_of(capsys, *argv):
    code, out, _ = invoke(capsys, *argv)
    return code, json.loads(out)


def diagnostic_of(capsys, *argv):
    code, _, err = invoke(capsys, *argv)
    # logging output precedes the diagnostic
    return code, json.loads(err.strip().splitlines()[-1])


def config_of(*argv):
    return load_config(build_parser().parse_args(list(argv)))


#
# Exit codes and diagnostics
#


def test_min_size(capsys):
    code, data = report_of(capsys, "min-size", "--field", "C", "--dim", "3")
    assert code == 0
    assert data["verdicts"] == {"min-size": "4"}
    assert data["status"] == "passed"
    assert data["stages"]["min-size"]["result"]["min_nondiagonalizable_size"] == 5
    assert data["generator"] == f"hypertuple {__version__}"


@pytest.mark.parametrize("expect, code", [
    ("3", 0),
    ("4", 1),
    ("min-size=3", 0),
    ("min-size=2", 1),
])
def test_expect(capsys, expect, code):
    result, data = report_of(capsys, "min-size", "--field", "R", "--dim", "4",
                             "--expect", expect)
    assert result == code
    stage = data["stages"]["min-size"]
    assert stage["expected"] == expect.rpartition("=")[2]
    if code:
        assert data["status"] == "failed"
        assert "differs from expected" in stage["status_msg"]


def test_expect_unknown_stage(capsys):
    code, diagnostic = diagnostic_of(capsys, "min-size", "--dim", "3", "--expect", "foo=4")
    assert code == 2
    assert diagnostic["error"] == "InvalidInput"
    assert diagnostic["command"] == "min-size"
    assert diagnostic["details"]["stages"] == ["min-size"]


def test_malformed_tuple(capsys):
    code, diagnostic = diagnostic_of(capsys, "construct", "--tuple", MALFORMED_TUPLE)
    assert code == 2
    assert diagnostic["error"] == "SchemaError"
    assert diagnostic["stage"] == "schema"
    assert diagnostic["details"]["path"] == "$.operators[1].entries[0][0]"
    assert diagnostic["details"]["run_stage"] == "construct"


def test_invalid_json(capsys):
    code, diagnostic = diagnostic_of(capsys, "construct", "--tuple", "[1, 2")
    assert code == 2
    assert diagnostic["error"] == "SchemaError"
    assert "not valid JSON" in diagnostic["message"]


def test_missing_file(capsys, tmp_path):
    missing = tmp_path / "missing.json"
    code, diagnostic = diagnostic_of(capsys, "construct", "--tuple", str(missing))
    assert code == 2
    assert diagnostic["stage"] == "io"
    assert diagnostic["error"] == "FileNotFoundError"
    assert diagnostic["details"]["filename"] == str(missing)


def test_min_size_needs_dim(capsys):
    code, diagnostic = diagnostic_of(capsys, "min-size")
    assert code == 2
    assert diagnostic["stage"] == "input"


@pytest.mark.parametrize("argv", [
    [],
    ["unknown"],
    ["min-size", "--dim", "two"],
    ["expmap", "--dim", "2"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


#
# Configuration
#


@pytest.mark.parametrize("ini, cli, expected", [
    (None, None, DEFAULT_SEED),
    ("7", None, 7),
    ("7", "3", 3),
    (None, "0", 0),
])
def test_seed_precedence(tmp_path, ini, cli, expected):
    argv = ["min-size", "--dim", "2"]
    if ini:
        path = tmp_path / "hypertuple.ini"
        path.write_text(f"[hypertuple]\nseed = {ini}\ngrid = 12\n")
        argv += ["--config", str(path)]
    if cli:
        argv += ["--seed", cli]
    config = config_of(*argv)
    assert config.seed == expected
    assert config.grid == (12 if ini else 20)


def test_ini_without_section(tmp_path):
    path = tmp_path / "setup.cfg"
    path.write_text("[metadata]\nname = other\n")
    config = config_of("min-size", "--dim", "2", "--config", str(path))
    assert config.seed == DEFAULT_SEED


def test_ini_options(tmp_path):
    path = tmp_path / "hypertuple.ini"
    path.write_text("[hypertuple]\n"
                    "tol = eq=1e-8\n"
                    "max-degree = 50\n"
                    "dense-threshold = 0.9\n"
                    "summary = json\n"
                    "results-path = out\n")
    config = config_of("orbit", "--dim", "1", "--config", str(path), "--max-degree", "70")
    assert config.tolerance.eq_tol == 1e-8
    assert config.budget.max_degree == 70
    assert config.thresholds.dense == 0.9
    assert config.summary == ("json",)
    assert config.results_path == "out"
    assert config.options == {"dim": 1}


@pytest.mark.parametrize("argv", [
    ["min-size", "--dim", "2", "--seed", "-1"],
    ["min-size", "--dim", "2", "--tol", "eq"],
    ["min-size", "--dim", "2", "--summary", "pdf"],
    ["orbit", "--dim", "1", "--max-degree", "0"],
    ["orbit", "--dim", "1", "--dense-threshold", "2"],
])
def test_invalid_config(argv):
    with pytest.raises(InvalidInput):
        config_of(*argv)


def test_invalid_ini_value(tmp_path):
    path = tmp_path / "hypertuple.ini"
    path.write_text("[hypertuple]\nseed = many\n")
    with pytest.raises(InvalidInput):
        config_of("min-size", "--dim", "2", "--config", str(path))


def test_unknown_command():
    with pytest.raises(InvalidInput):
        ExperimentConfig("plot")


def test_config_json():
    config = config_of("orbit", "--dim", "1", "--seed", "5", "--summary", "html,json")
    data = config.to_json()
    assert data["seed"] == 5
    assert data["outputs"]["summary"] == ["html", "json"]
    again = ExperimentConfig.from_json(json.loads(json.dumps(data)))
    assert again == config


@pytest.mark.parametrize("data, path", [
    ({"seed": 1}, "$"),
    ({"command": "orbit", "seed": "1"}, "$.seed"),
    ({"command": "orbit", "seed": 1, "budget": []}, "$.budget"),
    ({"command": "orbit", "seed": 1, "schema_version": "2.0"}, "$.schema_version"),
])
def test_config_json_invalid(data, path):
    with pytest.raises(SchemaError) as excinfo:
        ExperimentConfig.from_json(data)
    assert excinfo.value.path == path


#
# Reports
#


@pytest.mark.parametrize("text, expected", [
    ("DENSE_EVIDENCE", {None: "DENSE_EVIDENCE"}),
    ("a=VALID, b.c=4", {"a": "VALID", "b.c": "4"}),
    ("MATCH,", {None: "MATCH"}),
])
def test_parse_expect(text, expected):
    assert parse_expect(text) == expected


def test_parse_expect_empty():
    with pytest.raises(InvalidInput):
        parse_expect(" , ")


def test_residual():
    assert residual(1e-12, 1e-9) == dict(value=1e-12, tolerance=1e-9, ok=True)
    assert not residual(1e-6, 1e-9)["ok"]
    assert residual(0.5, 1e-9, lower=True)["ok"]
    assert not residual(0.0, 1e-9, lower=True)["ok"]


def test_report_failing_residual():
    report = RunReport(config_of("min-size", "--dim", "2"))
    stage = report.add("check", verdict="OK", residuals=dict(error=residual(1.0, 1e-9)))
    assert stage["status"] == "failed"
    assert "error" in stage["status_msg"]
    assert report.status == "failed"


def test_report_roundtrip():
    report = run(config_of("min-size", "--dim", "2"))
    data = json.loads(json.dumps(report.to_json()))
    again = RunReport.from_json(data)
    assert again.to_json()["digest"] == data["digest"]
    assert again.verdicts == {"min-size": "3"}


def test_report_tampered():
    data = json.loads(json.dumps(run(config_of("min-size", "--dim", "2")).to_json()))
    data["stages"]["min-size"]["verdict"] = "2"
    with pytest.raises(SchemaError) as excinfo:
        RunReport.from_json(data)
    assert excinfo.value.path == "$.digest"


def test_report_deterministic():
    config = config_of("construct", "--field", "R", "--dim", "3", "--seed", "11")
    first, second = run(config).to_json(), run(config).to_json()
    assert first["digest"] == second["digest"]
    assert first["stages"] == second["stages"]


def test_json_out_and_load_tuple(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, data = report_of(capsys, "construct", "--field", "C", "--dim", "2",
                           "--json-out", str(out))
    assert code == 0
    assert data["verdicts"] == {"construct": "3", "construct.validation": "VALID"}
    with open(out) as fp:
        assert json.load(fp)["digest"] == data["digest"]
    spec = load_tuple(str(out))
    assert len(spec) == 3
    assert spec.provenance.algebra_id == "diag"


def test_load_tuple_report_without_tuple(capsys, tmp_path):
    out = tmp_path / "report.json"
    invoke(capsys, "min-size", "--dim", "2", "--json-out", str(out))
    with pytest.raises(SchemaError) as excinfo:
        load_tuple(str(out))
    assert excinfo.value.path == "$.stages"


def test_construct_user_tuple(capsys):
    tuple_json = ('[{"field": "C", "n": 1, "entries": [[[2, 0]]]},'
                  ' {"field": "C", "n": 1, "entries": [[[0, 3]]]}]')
    code, data = report_of(capsys, "construct", "--tuple", tuple_json)
    assert code == 0
    assert data["verdicts"]["construct"] == "2"
    assert data["verdicts"]["construct.validation"] == "VALID"


#
# Commands
#


def test_gallery_list(capsys):
    code, data = report_of(capsys, "gallery", "list")
    assert code == 0
    names = [entry["name"] for entry in data["stages"]["gallery"]["result"]["algebras"]]
    assert "az" in names
    assert data["verdicts"]["gallery"] == str(len(names))


def test_gallery_show(capsys):
    code, data = report_of(capsys, "gallery", "show", "az", "--field", "C")
    assert code == 0
    result = data["stages"]["gallery"]["result"]
    assert data["verdicts"]["gallery"] == "MATCH"
    assert result["kappa"] == 1
    assert result["listed_vector_cyclic"]


def test_analyze(capsys):
    code, data = report_of(capsys, "analyze", "--algebra", "jordan2")
    assert code == 0
    assert data["verdicts"] == {"analyze": "CYCLIC", "analyze.expected": "MATCH"}
    assert data["stages"]["analyze"]["result"]["predicted_size"] == 4


def test_orbit_csv(capsys, tmp_path):
    out = tmp_path / "orbit.csv"
    code, data = report_of(capsys, "orbit", "--field", "C", "--dim", "1",
                           "--max-degree", "5", "--csv-out", str(out))
    assert code == 0
    with open(out, newline="") as fp:
        rows = list(csv.reader(fp))
    assert rows[0] == ["k1", "k2", "coord1", "coord2"]
    # exponents of total degree at most 5 in two variables
    assert len(rows) == 1 + 21
    assert rows[1][:2] == ["0", "0"]
    assert data["stages"]["orbit"]["result"]["coverage"]["points_total"] == 21


def test_verify_dense_and_dropped(capsys):
    code, data = report_of(capsys, "verify", "--field", "C", "--dim", "1",
                           "--max-degree", "600", "--box=-1,1", "--grid", "4", "--drop", "1",
                           "--expect", "verify.coverage=DENSE_EVIDENCE,"
                                       "verify.dropped=NOWHERE_DENSE_EVIDENCE")
    assert code == 0
    assert data["verdicts"]["verify.validation"] == "VALID"
    dropped = data["stages"]["verify.dropped"]
    assert dropped["result"]["dropped"] == 1
    assert dropped["result"]["coverage_gap"] > 0
    assert "doubled budget" in dropped["status_msg"]


def test_kronecker(capsys):
    code, data = report_of(capsys, "kronecker", "--target", "0.3,0.7", "--eps", "0.05")
    assert code == 0
    assert data["verdicts"]["kronecker"] == "FOUND"
    assert data["stages"]["kronecker"]["residuals"]["error"]["ok"]


def test_kronecker_not_found(capsys):
    code, data = report_of(capsys, "kronecker", "--target", "0.5", "--eps", "1e-9",
                           "--m0-max", "10")
    assert code == 0
    assert data["verdicts"]["kronecker"] == "NOT_FOUND"


def test_kronecker_alpha_count(capsys):
    code, data = report_of(capsys, "kronecker", "--target", "0.3,0.7", "--eps", "0.05",
                           "--alpha", "log-primes:2")
    assert code == 0
    assert data["stages"]["kronecker"]["result"]["alpha"]["scheme"] == "log-primes"
    assert data["stages"]["kronecker"]["result"]["alpha"]["d"] == 2


def test_kronecker_alpha_count_mismatch(capsys):
    code, diagnostic = diagnostic_of(capsys, "kronecker", "--target", "0.3,0.7",
                                     "--alpha", "sqrt-primes:3")
    assert code == 2
    assert diagnostic["error"] == "InvalidInput"
    assert "3 values" in diagnostic["message"]


def test_alpha_count_refused_by_tuple_commands(capsys):
    code, diagnostic = diagnostic_of(capsys, "construct", "--field", "C", "--dim", "2",
                                     "--alpha", "sqrt-primes:2")
    assert code == 2
    assert diagnostic["error"] == "InvalidInput"


def test_paper_suite_f4_budget_is_fixed():
    assert cli.F4_COVERAGE_BUDGET.max_degree == 400
    assert cli.F4_COVERAGE_GRID == 20


def test_paper_suite_small(capsys, monkeypatch):
    # coverage verdicts need the full F4 budget; only the exact stages are checked here
    monkeypatch.setattr(cli, "F4_COVERAGE_BUDGET", OrbitBudget(max_degree=12))
    _, data = report_of(capsys, "paper-suite", "--samples", "5", "--max-n", "3",
                        "--max-degree", "5", "--grid", "4")
    verdicts = data["verdicts"]
    assert verdicts["suite.az_complex"] == "6"
    assert verdicts["suite.az_real"] == "4"
    assert verdicts["suite.az_complex.commutant"] == "NON_CYCLIC"
    assert verdicts["suite.f4.halfplane"] == "CONFINED"
    halfplane = data["stages"]["suite.f4.halfplane"]
    assert halfplane["residuals"]["height"]["ok"]
    assert halfplane["result"]["closed_form_violations"] == 0
    for name in ("suite.min_size", "suite.gallery", "suite.nondiagonalizable"):
        assert verdicts[name] == "MATCH"
    rows = data["stages"]["suite.min_size"]["result"]["table"]
    assert len(rows) == 6
    # the F4 coverage runs ignore --max-degree and --grid
    for name in ("suite.f4.coverage", "suite.f4.axis"):
        stage = data["stages"][name]
        assert stage["result"]["budget"]["max_degree"] == 12
        assert stage["result"]["coverage"]["grid_per_axis"] == 20


@pytest.mark.parametrize("argv, verdict", [
    (["--algebra", "diag", "--dim", "2", "--op", "log", "--coeffs", "2,3"], "IN_EXP_IMAGE"),
    (["--algebra", "diag", "--field", "R", "--dim", "2", "--op", "preimage", "--coeffs=-2,3"],
     "NOT_IN_EXP_IMAGE"),
    (["--algebra", "diag", "--field", "R", "--dim", "2", "--op", "signs"], "Z2^2"),
    (["--algebra", "diag", "--dim", "2", "--op", "ker"], "2"),
    (["--algebra", "jordan_diag", "--dim", "3", "--op", "sqrt", "--coeffs", "4,1,1"],
     "IN_EXP_IMAGE"),
])
def test_expmap(capsys, argv, verdict):
    code, data = report_of(capsys, "expmap", *argv)
    assert code == 0
    assert data["verdicts"]["expmap"] == verdict


def test_expmap_needs_element(capsys):
    code, diagnostic = diagnostic_of(capsys, "expmap", "--algebra", "diag", "--dim", "2",
                                     "--op", "log")
    assert code == 2
    assert diagnostic["details"]["op"] == "log"


#
# Summaries
#


@pytest.mark.parametrize("ini, cli, expected", [
    ("json", None, {"json"}),
    ("json", "html", {"html"}),
    ("basic-html", "json", {"json"}),
    (None, "json,basic-html,html", {"json", "basic-html", "html"}),
])
def test_summary(capsys, tmp_path, ini, cli, expected):
    path = tmp_path / "results"
    argv = ["min-size", "--dim", "2", "--results-path", str(path)]
    if ini:
        config = tmp_path / "hypertuple.ini"
        config.write_text(f"[hypertuple]\nsummary = {ini}\n")
        argv += ["--config", str(config)]
    if cli:
        argv += ["--summary", cli]
    code, _, _ = invoke(capsys, *argv)
    assert code == 0

    json_summary = path / "results.json"
    if "json" in expected:
        with open(json_summary) as fp:
            assert "min-size" in json.load(fp)["stages"]
    else:
        assert not json_summary.exists()

    html_summary = path / "run_summary.html"
    if "html" in expected:
        raw = html_summary.read_text()
        assert "bootstrap" in raw
        assert "min-size" in raw
        assert (path / "styles.css").exists()
        assert ('href="results.json"' in raw) == ("json" in expected)
    else:
        assert not html_summary.exists()

    basic_html_summary = path / "run_summary_basic.html"
    if "basic-html" in expected:
        raw = basic_html_summary.read_text()
        assert "bootstrap" not in raw
        assert "min-size" in raw
    else:
        assert not basic_html_summary.exists()
