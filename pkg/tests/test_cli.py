import json
import subprocess
import sys

import pytest

from radrec.cli import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from conftest import MINIMAL


def _config(tmp_path, doc, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_run_json_and_csv(tmp_path, separable_doc):
    cfg = _config(tmp_path, separable_doc)
    out = tmp_path / "r.json"
    assert main(["run", "--config", cfg, "--output", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert [c["label"] for c in doc["classes"]] == ["lowest", "se_bound", "vertex", "se_free"]
    out_csv = tmp_path / "r.csv"
    assert main(["run", "--config", cfg, "--output", str(out_csv), "--format", "csv"]) == EXIT_OK
    assert out_csv.read_text().startswith("class,channel,omega,term,re,im,coefficient,dsigma\n")


def test_run_is_byte_identical(tmp_path, separable_doc):
    cfg = _config(tmp_path, separable_doc)
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.csv"
        main(["run", "--config", cfg, "--output", str(out), "--format", "csv"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path, separable_doc, capsys):
    bad = dict(separable_doc, v_i=-1)
    assert main(["run", "--config", _config(tmp_path, bad), "--output", str(tmp_path / "x")]) == EXIT_VALIDATION
    assert "$.v_i" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--output", "x"]) == EXIT_IO
    cfg = _config(tmp_path, separable_doc)
    assert main(["run", "--config", cfg, "--output", str(tmp_path / "no" / "r.json")]) == EXIT_IO
    edge = dict(separable_doc, initial_state={"energy": 0.05})
    assert main(["run", "--config", _config(tmp_path, edge, "e.json"), "--output",
                 str(tmp_path / "e.out")]) == EXIT_NUMERICAL


def test_minimal_run(tmp_path):
    out = tmp_path / "m.json"
    assert main(["run", "--config", _config(tmp_path, MINIMAL), "--output", str(out)]) == EXIT_OK
    assert [c["label"] for c in json.loads(out.read_text())["classes"]] == ["lowest"]


def test_verify_commands(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "optical", "--seed", "3", "--output", str(out)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("PASS")
    assert json.loads(out.read_text())["pass"] is True
    for suite in ("plemelj", "counterterm", "scaling"):
        assert main(["verify", "--suite", suite]) == EXIT_OK


def test_sweep_command(tmp_path, separable_doc, capsys):
    cfg = _config(tmp_path, separable_doc)
    assert main(["sweep", "--config", cfg, "--param", "epsilon", "--values", "0.1,0.01,0.001"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("param,value") and len(lines) == 4
    out = tmp_path / "s.json"
    assert main(["sweep", "--config", cfg, "--param", "eta", "--values", "0.05,0.02",
                 "--output", str(out), "--format", "json"]) == EXIT_OK
    assert len(json.loads(out.read_text())) == 2
    assert main(["sweep", "--config", cfg, "--param", "eta", "--values", "a,b"]) == EXIT_VALIDATION


def test_console_script_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "radrec.cli", "verify", "--suite", "plemelj"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "PASS plemelj split" in r.stdout


def test_bad_suite_is_usage_error():
    with pytest.raises(SystemExit):
        main(["verify", "--suite", "nope"])
