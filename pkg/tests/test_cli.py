import json
import subprocess
import sys

import numpy as np
import pytest

from kcbs_sos import cli
from kcbs_sos import coefficients as co


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coeffs_pentagon(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["eta_q"] == pytest.approx(4.1458980, abs=1e-6)
    assert doc["kcbs_reference"]["classical"] == 3
    assert doc["kcbs_reference"]["quantum"] == pytest.approx(4 * np.sqrt(5) - 5, abs=1e-12)


def test_bad_n_is_usage_error(capsys):
    code, out, err = run(capsys, "coeffs", "--n", "7")
    assert code == 2
    assert out == ""
    assert "n=7" in err


def test_missing_n_is_argparse_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["coeffs"])
    assert info.value.code == 2


def test_allow_large(capsys):
    code, _, _ = run(capsys, "coeffs", "--n", "65")
    assert code == 2
    with pytest.warns(RuntimeWarning):
        code, out, _ = run(capsys, "coeffs", "--n", "65", "--allow-large")
    assert code == 0
    assert json.loads(out)["n"] == 65


def test_golden_determinism(capsys):
    outputs = []
    for _ in range(2):
        code, out, _ = run(capsys, "seesaw", "--n", "5", "--restarts", "2", "--max-iters", "30", "--seed", "3")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]


def test_floats_are_full_precision(capsys):
    _, out, _ = run(capsys, "coeffs", "--n", "5")
    alpha = json.loads(out)["alpha"]
    assert alpha == co.kcbs_alpha(5)


def test_dumps():
    assert cli.dumps({"a": 1.0, "b": [1, 2.5], "c": float("nan")}) == (
        '{\n  "a": 1.0,\n  "b": [1, 2.5],\n  "c": null\n}'
    )
    assert cli.dumps([]) == "[]"
    with pytest.raises(TypeError):
        cli.dumps(object())


def test_canonical_then_selftest(capsys, tmp_path):
    path = tmp_path / "can.json"
    code, _, _ = run(capsys, "canonical", "--n", "9", "--out", str(path))
    assert code == 0
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "selftest", "--n", "9", "--realization", str(path), "--report", str(report))
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"
    assert json.loads(report.read_text())["verdict"] == "pass"


def test_classical_file_fails_selftest(capsys, tmp_path):
    path = tmp_path / "det.json"
    code, out, _ = run(capsys, "classical-bound", "--n", "5", "--out", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc["brute"] == pytest.approx(doc["formula"], abs=1e-10)
    assert doc["k_star"] == 3
    code, out, _ = run(capsys, "selftest", "--n", "5", "--realization", str(path))
    assert code == 1
    assert json.loads(out)["failed_stage"] == "relations"


def test_verify_sos_random(capsys):
    code, out, _ = run(capsys, "verify-sos", "--n", "9", "--dim", "4", "--random", "5", "--seed", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["residual"] <= doc["residual_bound"] == pytest.approx(4e-9)


def test_verify_sos_canonical_penalized(capsys):
    code, out, _ = run(capsys, "verify-sos", "--n", "5", "--penalized")
    assert code == 0
    assert json.loads(out)["max_term_violation"] <= 1e-10


def test_verify_sos_conflicting_options(capsys, tmp_path):
    code, _, err = run(capsys, "verify-sos", "--n", "5", "--random", "3", "--realization", str(tmp_path / "x"))
    assert code == 2
    assert "mutually exclusive" in err


def test_simulate_exact_and_csv(capsys, tmp_path):
    path = tmp_path / "can.json"
    run(capsys, "canonical", "--n", "5", "--out", str(path))
    csv_path = tmp_path / "corr.csv"
    code, out, _ = run(capsys, "simulate", "--n", "5", "--realization", str(path), "--penalized",
                       "--csv", str(csv_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(doc["eta_q"], abs=1e-10)
    assert abs(doc["gap"]) <= 1e-10
    assert csv_path.read_text().count("\n") == 11


def test_simulate_shots(capsys, tmp_path):
    path = tmp_path / "can.json"
    run(capsys, "canonical", "--n", "5", "--out", str(path))
    code, out, _ = run(capsys, "simulate", "--n", "5", "--realization", str(path), "--shots", "2000")
    assert code == 0
    assert json.loads(out)["statistics"]["shots"] == 2000
    code, _, _ = run(capsys, "simulate", "--n", "5", "--realization", str(path), "--shots", "0")
    assert code == 2


def test_unreadable_realization(capsys, tmp_path):
    code, _, err = run(capsys, "selftest", "--n", "5", "--realization", str(tmp_path / "missing.json"))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "selftest", "--n", "5", "--realization", str(bad))
    assert code == 2
    assert "not valid JSON" in err


def test_realization_size_mismatch(capsys, tmp_path):
    path = tmp_path / "can.json"
    run(capsys, "canonical", "--n", "9", "--out", str(path))
    code, _, _ = run(capsys, "selftest", "--n", "5", "--realization", str(path))
    assert code == 1


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--n", "17", "--extra", "3", "--seed", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert doc["max_deviation"] <= 1e-8
    assert doc["operator_value"] == pytest.approx(doc["eta_q"], abs=1e-9)


def test_seesaw_writes_realization(capsys, tmp_path):
    path = tmp_path / "best.json"
    code, out, _ = run(capsys, "seesaw", "--n", "5", "--restarts", "2", "--max-iters", "50", "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["dim"] == 3
    assert json.loads(out)["gap_to_eta"] >= -1e-9


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kcbs_sos", "coeffs", "--n", "9"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 9
