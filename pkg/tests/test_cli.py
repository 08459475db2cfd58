from __future__ import annotations

import json
import subprocess
import sys

from hplab.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hp_n0(capsys):
    code, out, _ = call(capsys, "hp", "--alpha", "1/3", "--n", "0", "--s", "2")
    sol = json.loads(out)["solution"]
    assert code == 0
    assert sol["normal"] is True and sol["remainder_leading"] == "4/9"
    assert sol["Q"] == [["1"], ["-2"], ["1"]]


def test_density_lambda(capsys):
    code, out, _ = call(capsys, "density", "--kind", "lambda", "--x", "0")
    doc = json.loads(out)
    assert code == 0 and doc["value"].startswith("0.2756644")
    assert doc["precision_bits"] == 256


def test_ode_verify_printed_fails(capsys):
    code, out, _ = call(capsys, "ode-verify", "--alpha", "1/3", "--n", "2")
    assert code == 2
    assert "-16/3" in out


def test_ode_verify_derived(capsys):
    code, out, _ = call(capsys, "ode-verify", "--alpha", "1/3", "--n", "2", "--constants", "derived")
    doc = json.loads(out)
    assert code == 0
    assert set(doc["residuals"].values()) == {"0"}


def test_half_integer_alpha(capsys):
    code, _, err = call(capsys, "hp", "--alpha", "1/2", "--n", "1", "--s", "2")
    assert code == 1 and "2*alpha in Z" in err


def test_unknown_command(capsys):
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys)[0] == 1


def test_empty_n_list(capsys):
    assert call(capsys, "report", "--alpha", "1/3", "--n-list", "")[0] == 1


def test_low_precision_rejected(capsys):
    assert call(capsys, "density", "--kind", "nu", "--x", "2", "--precision-bits", "32")[0] == 1


def test_outside_support_exit(capsys):
    assert call(capsys, "density", "--kind", "nu", "--x", "1/2")[0] == 1


def test_truncation_too_short(capsys):
    assert call(capsys, "hp", "--alpha", "1/3", "--n", "3", "--s", "2", "--truncation-order", "5")[0] == 1


def test_deterministic(capsys):
    argv = ("hp", "--alpha", "2/5", "--n", "6", "--s", "2")
    a = call(capsys, *argv)[1]
    b = call(capsys, *argv)[1]
    assert a == b


def test_exact_numbers_are_strings(capsys):
    doc = json.loads(call(capsys, "expand", "--alpha", "1/3", "--order", "3")[1])

    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        else:
            assert not isinstance(x, float)

    walk(doc)
    assert [c["value"] for c in doc["coefficients"]] == ["1", "-2/3", "2/9", "-22/81"]


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": "1/4", "n": 1, "s": 1}))
    doc = json.loads(call(capsys, "hp", "--config", str(cfg))[1])
    assert doc["function"]["exponents"] == ["1/4", "-1/4"] and doc["solution"]["s"] == 1
    doc = json.loads(call(capsys, "hp", "--config", str(cfg), "--alpha", "1/3")[1])
    assert doc["function"]["exponents"] == ["1/3", "-1/3"]
    assert doc["solution"]["Q"][1] == ["1/3", "1"]


def test_env_precision(monkeypatch, capsys):
    monkeypatch.setenv("HP_LAB_PRECISION_BITS", "128")
    doc = json.loads(call(capsys, "density", "--kind", "nu", "--x", "2")[1])
    assert doc["precision_bits"] == 128


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    assert call(capsys, "cubic", "--z", "i", "--output", str(target))[0] == 0
    doc = json.loads(target.read_text())
    assert doc["y"][0]["im"].startswith("-0.36602540378")


def test_zeros_csv(capsys):
    code, out, _ = call(capsys, "zeros", "--alpha", "1/3", "--n", "5", "--k", "2", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "index,re,im" and len(lines) == 6


def test_rho_zeros(capsys):
    doc = json.loads(call(capsys, "zeros", "--alpha", "1/3", "--n", "4", "--rho")[1])
    assert doc["enough_sign_changes"]


def test_ordering_negative_z(capsys):
    code, out, _ = call(capsys, "ordering", "--z=-2-i")
    assert code == 0 and json.loads(out)["ordered"]


def test_ordering_real_z(capsys):
    assert call(capsys, "ordering", "--z", "3")[0] == 1


def test_ratio(capsys):
    code, out, _ = call(capsys, "ratio", "--alpha", "1/3", "--n-list", "10,20,40")
    assert code == 0 and json.loads(out)["decreasing"]


def test_pade_jacobi(capsys):
    code, out, _ = call(capsys, "pade", "--alpha", "1/4", "--n", "6")
    assert code == 0 and json.loads(out)["jacobi_proportional"]


def test_ode_extract(capsys):
    code, out, _ = call(capsys, "ode-extract", "--alpha", "1/3", "--n", "3", "--s", "2", "--constants", "derived")
    doc = json.loads(out)
    assert code == 0 and doc["matches_explicit"] == {"printed": False, "derived": True}
    assert all(doc["audit"]["checks"].values())
    # against the printed constants the comparison is a failed check
    assert call(capsys, "ode-extract", "--alpha", "1/3", "--n", "3", "--s", "2")[0] == 2


def test_equilibrium(capsys):
    code, out, _ = call(capsys, "equilibrium", "--which", "eq1")
    assert code == 0 and float(json.loads(out)["spread"]) < 1e-6


def test_report(capsys):
    code, out, _ = call(capsys, "report", "--alpha", "1/3", "--n-list", "10,20,40", "--constants", "derived")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == "1"
    assert len(doc["ks_distance"]["nu"]) == 3 and len(doc["ks_distance"]["lambda"]) == 3
    assert doc["failures"] == []


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "hplab.cli", "density", "--kind", "nu", "--x", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["value"].startswith("0.05860940900")
