import json
import re
import subprocess
import sys

import jsonschema
import pytest

from greenkernels.cli import CONFIG_SCHEMA, OUTPUT_SCHEMAS, main

PERTURBED = {"variant": "PerturbedDisk", "epsilon": 0.1, "delta": {"cos": [1.0, 0.3]}}
ANNULUS = {"variant": "DiskWithHole", "epsilon": 0.1}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def cfg(**kw):
    return json.dumps(kw)


def test_eval_disk_green(capsys):
    code, out, _ = run(capsys, "eval", "--formula", "disk_green", "--config", cfg(x=[0.5, 0], y=[0, 0]))
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.110318, abs=1e-6)
    jsonschema.validate(doc, OUTPUT_SCHEMAS["eval"])


def test_sweep_two_eps_exits_1(capsys):
    code, out, err = run(capsys, "sweep", "--formula", "dirichlet_hole_2d", "--eps", "0.1,0.05", "--config", cfg(domain=ANNULUS))
    assert code == 1
    assert "eps list must have length ≥ 3" in err
    assert out == ""


def test_report_criterion_3(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, err = run(capsys, "report", "--config", cfg(criteria=[3]), "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, OUTPUT_SCHEMAS["report"])
    (row,) = doc["summary"]
    slope = float(re.search(r"slope = ([0-9.]+)", row).group(1))
    assert 0.8 <= slope <= 1.2
    assert "PASS" in row and "PASS" in err


def test_sweep_and_rates_are_byte_identical(capsys, tmp_path):
    args = ["--formula", "dirichlet_hole_2d", "--config", cfg(domain=ANNULUS, seed=4)]
    paths = []
    for k in range(2):
        p = tmp_path / f"sweep{k}.csv"
        assert run(capsys, "sweep", *args, "--out", str(p))[0] == 0
        paths.append(p)
        q = tmp_path / f"rates{k}.json"
        assert run(capsys, "rates", *args, "--out", str(q))[0] == 0
        paths.append(q)
    assert paths[0].read_bytes() == paths[2].read_bytes()
    assert paths[1].read_bytes() == paths[3].read_bytes()
    assert paths[0].read_text().splitlines()[0] == "formula,eps,stratum,n_pairs,sup_err,mean_err,argmax_x,argmax_y"
    jsonschema.validate(json.loads(paths[1].read_text()), OUTPUT_SCHEMAS["rates"])


def test_rates_failure_exits_3(capsys):
    conf = cfg(domain=ANNULUS, expected=3.0, band=0.1)
    code, out, _ = run(capsys, "rates", "--formula", "dirichlet_hole_2d", "--config", conf)
    assert code == 3
    assert json.loads(out)["passed"] is False


def test_oracle_command(capsys, tmp_path):
    dom = tmp_path / "domain.json"
    dom.write_text(json.dumps(PERTURBED))
    code, out, _ = run(capsys, "oracle", "--config", cfg(domain=str(dom), x=[0.5, 0.1], y=[-0.3, 0.4], options={"m": 128}))
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, OUTPUT_SCHEMAS["oracle"])
    assert doc["method"] == "boundary-integral"
    assert doc["resolution"]["m"] == 128


def test_config_file_and_overrides(capsys, tmp_path):
    p = tmp_path / "run.json"
    p.write_text(cfg(command="eval", formula="ball_green", x=[0.5, 0, 0], y=[0, 0, 0]))
    code, out, _ = run(capsys, "eval", "--config", str(p))
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.0795775, abs=1e-7)
    code, _, err = run(capsys, "sweep", "--config", str(p))
    assert code == 1 and "does not match" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--config", cfg(formula="disk_green", x=[0.5, 0], y=[0, 0], colour="red")],
        ["eval", "--config", "{not json"],
        ["eval", "--config", "/nonexistent/config.json"],
        ["eval", "--config", cfg(x=[0.5, 0], y=[0, 0])],
        ["eval", "--formula", "disk_green", "--config", cfg(x=[0, 0], y=[0, 0])],
        ["sweep", "--eps", "a,b,c", "--formula", "dirichlet_hole_2d", "--config", cfg(domain=ANNULUS)],
        ["oracle", "--config", cfg(domain={"variant": "DiskWithHole", "epsilon": 0.1, "center": [0.2, 0]}, formula="mixed_outerD_holeN", x=[0.5, 0.1], y=[-0.3, 0.4])],
    ],
)
def test_invalid_inputs_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("error")
    assert out == ""


def test_numerical_failure_exits_2(capsys, monkeypatch):
    from greenkernels import cli
    from greenkernels.errors import TruncationFailure

    def boom(cfg):
        raise TruncationFailure("series did not converge")

    monkeypatch.setitem(cli.HANDLERS, "eval", boom)
    code, _, err = run(capsys, "eval", "--formula", "disk_green", "--config", cfg(x=[0.5, 0], y=[0, 0]))
    assert code == 2
    assert "numerical failure" in err


def test_config_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(CONFIG_SCHEMA)
    for schema in OUTPUT_SCHEMAS.values():
        jsonschema.Draft202012Validator.check_schema(schema)


def test_module_entry_point(tmp_path):
    out = tmp_path / "e.json"
    r = subprocess.run(
        [sys.executable, "-m", "greenkernels", "eval", "--formula", "disk_green", "--config", cfg(x=[0.5, 0], y=[0, 0]), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert json.loads(out.read_text())["value"] == pytest.approx(0.110318, abs=1e-6)
