import json
import shutil

import numpy as np
import pytest

from kappax import fixtures
from kappax.cli import main
from kappax.data import ClassificationTensor, render_ratings
from kappax.kappa import KappaReport, generalized_kappa
from kappax.report import fmt3, render_report, render_table

FILES = ("exam.csv", "exam_categories.txt", "exam_hierarchy.json", "exam_weights.json",
         "dsm.csv", "dsm_roster.csv", "dsm_categories.txt", "dsm_rankings.csv")


@pytest.fixture
def data(tmp_path):
    for name in FILES:
        shutil.copy(fixtures.path(name), tmp_path / name)
    return tmp_path


def exam_args(d):
    return ["generalized", "--ratings", str(d / "exam.csv"), "--hierarchy", str(d / "exam_hierarchy.json"),
            "--weights", str(d / "exam_weights.json"), "--categories", str(d / "exam_categories.txt")]


def dsm_args(d, method="generalized"):
    return [method, "--ratings", str(d / "dsm.csv"), "--roster", str(d / "dsm_roster.csv"),
            "--categories", str(d / "dsm_categories.txt")]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_exam_table(data, capsys):
    code, out, _ = run(capsys, exam_args(data))
    assert code == 0
    assert out.splitlines()[-1].endswith("(Substantial)")
    row = next(line for line in out.splitlines() if line.startswith("(item4)")).split()
    assert row[1:3] == ["0.778", "0.820"] and row[-1] == "-0.235"
    assert "(item1)" in out and " 0.438" in out


def test_dsm_table(data, capsys):
    code, out, _ = run(capsys, dsm_args(data))
    assert code == 0
    assert "kappa = 0.375 (Fair)" in out
    rows = {line.split()[0]: line.split() for line in out.splitlines() if line.startswith("(")}
    for c in ("2", "4", "6", "19"):
        assert rows[f"({c})"][-1] == "NaN"
    assert rows["(9)"][1:3] == ["1.000", "0.785"] and rows["(9)"][-1] == "1.000"


@pytest.mark.parametrize("method", ["mezzich", "icc", "fleiss-multi", "cohen-pooled"])
def test_other_methods_exit_codes(data, capsys, method):
    if method == "fleiss-multi":
        code, _, err = run(capsys, ["fleiss", "--ratings", str(data / "exam.csv")])
        assert code == 2 and "NotMutuallyExclusive" in err
    elif method == "cohen-pooled":
        code, _, err = run(capsys, ["cohen-pooled", "--ratings", str(data / "exam.csv")])
        assert code == 2 and "NotTwoRaters" in err
    else:
        code, out, _ = run(capsys, dsm_args(data, method))
        assert code == 0 and out.startswith(f"method  {method}")


def test_rank_method(data, capsys):
    code, out, _ = run(capsys, ["rank", "--ratings", str(data / "dsm_rankings.csv"), "--roster",
                                str(data / "dsm_roster.csv"), "--categories", str(data / "dsm_categories.txt")])
    assert code == 0 and "kappa" in out


def test_undefined_kappa_exits_3(tmp_path, capsys):
    t = ClassificationTensor.from_arrays(np.ones((3, 2, 2), bool))
    (tmp_path / "all.csv").write_text(render_ratings(t))
    code, out, err = run(capsys, ["generalized", "--ratings", str(tmp_path / "all.csv")])
    assert code == 3 and "undefined" in err
    # every cell holds the same set, so chance overlap is 1 as well
    code, out, _ = run(capsys, ["mezzich", "--ratings", str(tmp_path / "all.csv")])
    assert code == 3 and "NaN" in out


@pytest.mark.parametrize("content, needle", [
    ("subject,rater,category\nS1,T1\n", "line 2"),
    ("", "EmptyFile"),
])
def test_invalid_input_exits_2_with_context(tmp_path, capsys, content, needle):
    f = tmp_path / "bad.csv"
    f.write_text(content)
    code, _, err = run(capsys, ["generalized", "--ratings", str(f)])
    assert code == 2 and needle in err and "bad.csv" in err


def test_hierarchy_only_for_generalized(data, capsys):
    with pytest.raises(SystemExit):
        main(["mezzich", "--ratings", str(data / "exam.csv"), "--hierarchy", "x.json"])


def test_missing_file(capsys):
    code, _, err = run(capsys, ["generalized", "--ratings", "/nonexistent/ratings.csv"])
    assert code == 2 and "cannot read" in err


def test_bad_bootstrap_options(data, capsys):
    code, _, err = run(capsys, exam_args(data) + ["--bootstrap", "10"])
    assert code == 2 and "TooFewReplicates" in err
    code, _, err = run(capsys, exam_args(data) + ["--bootstrap", "100", "--confidence", "1.5"])
    assert code == 2


def test_json_contributions_sum(data, capsys):
    _, out, _ = run(capsys, dsm_args(data) + ["--format", "json"])
    doc = json.loads(out)
    res = doc["result"]
    num = sum(c["num_contrib"] for c in res["categories"])
    den = sum(c["den_contrib"] for c in res["categories"])
    assert abs(num - res["numerator"]) < 1e-12 and abs(den - res["denominator"]) < 1e-12
    assert abs(num / den - res["kappa"]) < 1e-12
    assert doc["schema"] == 1 and doc["method"] == "generalized"
    assert [c["kappa"] for c in res["categories"] if c["category"] in ("2", "4", "6", "19")] == [None] * 4
    assert set(doc["inputs"]) == {"ratings", "roster", "categories"}


def test_json_bootstrap_is_byte_identical(data, capsys, monkeypatch):
    args = exam_args(data) + ["--format", "json", "--bootstrap", "200", "--seed", "11"]
    _, a, _ = run(capsys, args)
    _, b, _ = run(capsys, args + ["--workers", "3"])
    assert a == b
    monkeypatch.setenv("KAPPAX_SEED", "11")
    _, c, _ = run(capsys, [x for x in args if x not in ("--seed", "11")])
    assert c == a
    monkeypatch.setenv("KAPPAX_SEED", "12")
    _, d, _ = run(capsys, args)
    assert d == a  # the flag wins


@pytest.mark.parametrize("argv", [
    lambda d: exam_args(d) + ["--bootstrap", "100"],
    lambda d: dsm_args(d),
    lambda d: dsm_args(d, "mezzich"),
    lambda d: dsm_args(d, "icc") + ["--degenerate", "1"],
])
def test_verify_round_trip(data, capsys, argv):
    _, out, _ = run(capsys, argv(data) + ["--format", "json"])
    report = data / "report.json"
    report.write_text(out)
    code, out, _ = run(capsys, ["verify", str(report)])
    assert code == 0 and out.strip() == "verified"


def test_verify_detects_tampering(data, capsys):
    _, out, _ = run(capsys, exam_args(data) + ["--format", "json"])
    doc = json.loads(out)
    doc["result"]["categories"][3]["kappa"] = 0.5
    report = data / "report.json"
    report.write_text(json.dumps(doc))
    code, out, err = run(capsys, ["verify", str(report)])
    assert code == 1 and "categories/3/kappa" in err


def test_verify_detects_changed_input(data, capsys):
    _, out, _ = run(capsys, exam_args(data) + ["--format", "json"])
    report = data / "report.json"
    report.write_text(out)
    with open(data / "exam.csv", "a") as f:
        f.write("S2,T2,item2\n")
    code, _, err = run(capsys, ["verify", str(report)])
    assert code == 1 and "changed" in err


@pytest.mark.parametrize("value, text", [(0.4375, "0.438"), (-0.0001, "0.000"), (float("nan"), "NaN"), (1.0, "1.000")])
def test_fmt3(value, text):
    assert fmt3(value) == text


def test_header_only_table():
    out = render_table(KappaReport((), float("nan"), 0.0, 0.0))
    assert out.split() == ["category", "Po_c", "Pe_c", "Po-Pe", "1-Pe", "phi_c", "w_c", "kappa_c"]


def test_render_report_formats(exam, exam_rules, exam_weights):
    rep = generalized_kappa(exam, exam_rules, exam_weights)
    assert render_report(rep) == render_table(rep)
    doc = json.loads(render_report(rep, "json"))
    assert doc["result"]["kappa"] == rep.overall
    with pytest.raises(ValueError):
        render_report(rep, "xml")
