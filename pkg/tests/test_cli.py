import csv
import io
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from qrteach.cli import main
from qrteach.qr import build_qr
from qrteach.sk import check_property
from qrteach.teaching import induced_class, to_concept_matrix
from qrteach.tournament import parse_edge_list, to_edge_list

GOLDEN = Path(__file__).parent / "golden"
SCHEMA = json.loads(resources.files("qrteach").joinpath("report.schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() and "--csv" not in argv and "--table" not in argv else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
        assert report["exit_code"] == code
    return code, report, out, err


def test_qr_report(capsys):
    code, rep, _, _ = run(capsys, "qr", 7)
    assert code == 0
    assert rep["result"]["order"] == 7
    assert rep["result"]["out_degrees"] == [3] and rep["result"]["regular"]
    assert rep["command"] == "qr" and rep["parameters"]["p"] == 7


@pytest.mark.parametrize("p", [5, 9, 1, 4])
def test_qr_bad_modulus(capsys, p):
    code, rep, out, err = run(capsys, "qr", p)
    assert code == 2 and out == ""
    if p == 5:
        assert "p ≡ 1 (mod 4)" in err


def test_qr_dot_and_edges(capsys, tmp_path):
    dot, edges = tmp_path / "out.dot", tmp_path / "qr7.txt"
    code, rep, _, _ = run(capsys, "qr", 7, "--dot", dot, "--edges", edges)
    assert code == 0
    assert dot.read_text().count("->") == 21
    assert parse_edge_list(edges.read_text()) == build_qr(7)


def test_check_qr19(capsys):
    code, rep, _, _ = run(capsys, "check", "qr:19", "--strong", "-k", 2)
    assert code == 0 and rep["result"]["holds"]
    assert rep["result"]["failing_pattern"] is None


def test_check_golden_qr7(capsys):
    code, rep, _, _ = run(capsys, "check", "qr:7", "--strong", "-k", 2, "--full")
    golden = json.loads((GOLDEN / "check_qr7_strong_k2.json").read_text())
    assert {k: rep["result"][k] for k in golden} == golden
    assert code == 0


def test_check_failure_exit_1(capsys):
    code, rep, _, _ = run(capsys, "check", "qr:7", "--strong", "-k", 2, "-m", 2)
    assert code == 1
    r = rep["result"]
    assert not r["holds"] and r["variant"] == "strong-with-multiplicity"
    assert r["failing_pattern"] == {"targets": [0, 1], "signs": [1, 1]}


def test_check_infeasible_exit_3(capsys):
    code, _, out, _ = run(capsys, "check", "random:5:1", "--weak", "-k", 4)
    assert code == 3 and out == ""
    assert run(capsys, "check", "random:5:1", "--weak", "-k", 5)[0] == 3


def test_check_usage_errors(capsys):
    assert run(capsys, "check", "random:5", "--weak", "-k", 1)[0] == 2
    assert run(capsys, "check", "nope.txt", "--weak", "-k", 1)[0] == 2
    assert run(capsys, "check", "qr:7", "--weak", "-k", 1, "-m", 3)[0] == 2
    assert run(capsys, "check", "qr:13", "--weak", "-k", 1)[0] == 2
    assert run(capsys, "check", "qr:7", "--strong", "-k", 0)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "qr:7", "-k", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "qr:7", "--strong"])
    assert exc.value.code == 2


def test_check_threads_and_backends_agree(capsys):
    results = []
    for extra in ([], ["--threads", 3], ["--backend", "numpy"], ["--backend", "numba", "--threads", 2]):
        code, rep, _, _ = run(capsys, "check", "qr:31", "--strong", "-k", 2, "-m", 3, "--full", *extra)
        results.append((code, rep["result"]))
    assert all(r == results[0] for r in results)


def test_check_edge_list_file(capsys, tmp_path):
    path = tmp_path / "t.txt"
    path.write_text(to_edge_list(build_qr(11)))
    code, rep, _, _ = run(capsys, "check", path, "--weak", "-k", 2)
    assert code == 0 and rep["result"]["order"] == 11


def test_teach_qr3_rtd(capsys):
    code, rep, _, _ = run(capsys, "teach", "qr:3", "--rtd")
    assert code == 0
    assert rep["result"]["rtd"]["rtd"] == 1 and len(rep["result"]["rtd"]["layers"]) == 1
    assert "td" not in rep["result"]


def test_teach_qr19(capsys):
    code, rep, _, _ = run(capsys, "teach", "qr:19", "--td")
    assert code == 0 and rep["result"]["td"]["td_min"] >= 2
    code, rep, _, _ = run(capsys, "teach", "qr:19", "--nctd")
    assert code == 0
    assert rep["result"]["nctd"]["value"] == 1 and rep["result"]["nctd"]["canonical_teacher_valid"]


def test_teach_cap_exit_4(capsys):
    code, rep, _, _ = run(capsys, "teach", "qr:19", "--cap", 2)
    assert code == 4
    r = rep["result"]
    assert r["cap_exceeded"] and r["td"]["cap_exceeded"] and r["rtd"]["cap_exceeded"]
    assert r["td"]["td_min"] is None and r["td"]["td_min_lower_bound"] == 3
    assert r["nctd"]["value"] == 1


def test_teach_all_defaults(capsys):
    code, rep, _, _ = run(capsys, "teach", "random:8:3")
    assert code == 0
    assert {"td", "rtd", "nctd"} <= set(rep["result"])
    assert rep["result"]["rtd"]["rtd"] >= rep["result"]["td"]["td_min"]


def test_teach_concept_matrix_file(capsys, tmp_path):
    path = tmp_path / "cls.txt"
    path.write_text(to_concept_matrix(induced_class(build_qr(7))))
    code, rep, _, _ = run(capsys, "teach", path, "--td", "--nctd")
    assert code == 0
    assert rep["result"]["td"]["td_min"] == 2
    assert rep["result"]["nctd"]["value"] is None
    # a concept matrix is not a tournament
    assert run(capsys, "check", path, "--weak", "-k", 1)[0] == 2


def test_bounds(capsys):
    code, rep, _, _ = run(capsys, "bounds", 2)
    assert code == 0
    rows = [tuple(r.values()) for r in rep["result"]["rows"]]
    assert rows == [(1, 2, 3, 5, 3), (2, 7, 21, 28, 19)]
    code, rep, _, _ = run(capsys, "bounds", 16)
    assert code == 0 and len(rep["result"]["rows"]) == 16 and rep["result"]["chain_holds"]
    assert run(capsys, "bounds", 0)[0] == 2
    assert run(capsys, "bounds", 17)[0] == 2


def test_bounds_csv_matches_json(capsys):
    _, rep, _, _ = run(capsys, "bounds", 5)
    code, _, out, _ = run(capsys, "bounds", 5, "--csv")
    assert code == 0
    parsed = list(csv.DictReader(io.StringIO(out)))
    assert [{k: int(v) for k, v in row.items()} for row in parsed] == rep["result"]["rows"]


def test_check_csv_matches_json(capsys):
    _, rep, _, _ = run(capsys, "check", "qr:7", "--strong", "-k", 2, "-m", 2)
    code, _, out, _ = run(capsys, "check", "qr:7", "--strong", "-k", 2, "-m", 2, "--csv")
    assert code == 1
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["key", "value"]
    flat = {k: json.loads(v) for k, v in rows[1:]}
    assert flat["holds"] is False and flat["min_count"] == rep["result"]["min_count"]
    assert json.loads(flat["failing_pattern.targets"]) == rep["result"]["failing_pattern"]["targets"]


def test_table_output(capsys):
    code, _, out, _ = run(capsys, "qr", 7, "--table")
    assert code == 0 and out.startswith("# qr") and "regular" in out


def test_search_exhaustive(capsys):
    code, rep, _, _ = run(capsys, "search", "exhaustive", "--weak", "-k", 2, "--nmax", 6)
    assert code == 1
    assert not rep["result"]["found"] and rep["result"]["exhaustive"]
    code, rep, _, _ = run(capsys, "search", "exhaustive", "--strong", "-k", 1, "--nmax", 4)
    assert code == 0 and rep["result"]["found"] and rep["result"]["order"] == 3


def test_search_budget_exit_5(capsys):
    assert run(capsys, "search", "exhaustive", "--weak", "-k", 2, "--nmax", 9)[0] == 5
    assert run(capsys, "search", "exhaustive", "--weak", "-k", 2)[0] == 2
    assert run(capsys, "search", "random", "--weak", "-k", 2)[0] == 2


def test_search_random_golden_and_export(capsys, tmp_path):
    path = tmp_path / "w.txt"
    argv = ["search", "random", "-n", 30, "-k", 2, "--strong", "--trials", 100, "--seed", 1]
    code, rep, _, _ = run(capsys, *argv, "--export", path)
    assert code == 0 and rep["result"]["found"] and rep["result"]["trials_or_count"] == 1
    again = parse_edge_list(path.read_text())
    assert check_property(again, "strong", 2).holds
    code2, rep2, _, _ = run(capsys, *argv)
    assert rep2["result"]["witness_edges"] == rep["result"]["witness_edges"]
    # the exported file is a valid check source
    assert run(capsys, "check", path, "--strong", "-k", 2)[0] == 0


def test_search_random_not_found(capsys):
    code, rep, _, _ = run(capsys, "search", "random", "-n", 4, "-k", 3, "--strong", "--trials", 10, "--seed", 1)
    assert code == 1 and rep["result"]["trials_or_count"] == 10


def test_verbose_progress_goes_to_stderr(capsys):
    code, rep, out, err = run(capsys, "check", "qr:11", "--strong", "-k", 1, "-v")
    assert code == 0 and "scanning" in err and "scanning" not in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qrteach", "bounds", "1"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["rows"][0]["F_upper"] == 5
