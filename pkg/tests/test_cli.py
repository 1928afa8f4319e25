from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from tc_sphere import load_schema
from tc_sphere.bundles import GRAMMAR
from tc_sphere.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bounds_exact_text(capsys):
    code, out, _ = run(capsys, "bounds", "CP(2); 1*eta+1*eps", "--r", "3")
    assert code == 0
    assert "TC_3 = 5  (exact)" in out
    # every rule is listed with its citation
    for rid in ("L_GENERIC", "U_SHARP", "U_SECAT_STIEFEL"):
        assert rid in out


def test_bounds_interval(capsys):
    code, out, _ = run(capsys, "bounds", "RP(3); 2*eta+1*eps", "--r", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and (doc["lower"], doc["upper"], doc["exact"]) == (2, 3, None)
    jsonschema.validate(doc, load_schema("bound_report"))


def test_bounds_hopf(capsys):
    code, out, _ = run(capsys, "bounds", "CP(1); 1*eta", "--r", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["exact"] == 3
    jsonschema.validate(doc, load_schema("bound_report"))


def test_bounds_csv(capsys):
    _, out, _ = run(capsys, "bounds", "CP(3); 1*eta+1*eps", "--r", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9 and rows[0]["id"] == "L_GENERIC"


@pytest.mark.parametrize("spec", ["CP(2) 1*eta", "CP(2); 1*zeta", "QP(1); eps", "pt; 1*eps"])
def test_parse_error_exit_code(capsys, spec):
    code, _, err = run(capsys, "bounds", spec, "--r", "2")
    assert code == 2
    assert GRAMMAR in err


def test_bad_r_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bounds", "CP(1); 1*eta", "--r", "1"])
    assert info.value.code == 2


@pytest.mark.parametrize(
    "spec, extra, line",
    [
        ("CP(1); 1*eta+1*eps", [], "oracle 2, formula 2, MATCH"),
        ("pt; 2*eps", [], "oracle 2, formula 2, MATCH"),
        ("RP(3); 2*eta+1*eps", ["--coefficients", "Z2"], "oracle 2, formula 2, MATCH"),
    ],
)
def test_oracle(capsys, spec, extra, line):
    r = "3" if spec.startswith("pt") else "2"
    code, out, _ = run(capsys, "oracle", spec, "--r", r, *extra)
    assert code == 0 and line in out


def test_oracle_without_model_is_usage_error(capsys):
    code, _, err = run(capsys, "oracle", "CP(1); 1*eta", "--r", "2")
    assert code == 2 and "section" in err


def test_oracle_mismatch_exit_code(capsys, monkeypatch):
    import tc_sphere.cli as cli

    monkeypatch.setattr(cli, "closed_form_cup_length", lambda sb, r: -1)
    code, out, _ = run(capsys, "oracle", "CP(1); 1*eta+1*eps", "--r", "2")
    assert code == 1 and "MISMATCH" in out


def test_sweep_cp(capsys):
    code, out, _ = run(capsys, "sweep", "cp_eta_eps", "--n", "1..4", "--r", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [int(row["exact"]) for row in rows] == [2, 4, 4, 6]


def test_sweep_rp(capsys):
    code, out, _ = run(capsys, "sweep", "rp_l_eta_eps", "--n", "3", "--l", "2", "--r", "2..4", "--format", "json")
    rows = json.loads(out)
    assert [(row["lower"], row["upper"]) for row in rows] == [(2, 3), (3, 4), (4, 5)]


def test_sweep_empty_range(capsys):
    code, out, _ = run(capsys, "sweep", "cp_eta_eps", "--n", "5..4", "--r", "2")
    assert code == 0
    assert out.strip() == "family,spec,n,l,r,lower,upper,exact"
    code, out, _ = run(capsys, "sweep", "cp_eta_eps", "--n", "5..4", "--format", "json")
    assert json.loads(out) == []


def test_plan_great_circle(capsys):
    code, out, _ = run(capsys, "plan", "--q", "2", "--points", "1,0;-1,0")
    doc = json.loads(out)
    assert code == 0
    assert doc["piece_index"] == 1 and doc["paths"][0]["kind"] == "great_circle"
    jsonschema.validate(doc, load_schema("plan_result"))
    mid = doc["samples"][0][len(doc["samples"][0]) // 2]
    assert abs(mid[1] ** 2 + mid[2] ** 2 - 1) < 1e-12


@pytest.mark.parametrize("points", ["1,0;-1,x", "1,0", "1,0,0;0,1,0", "1,0;0,2"])
def test_plan_malformed_points(capsys, points):
    code, _, err = run(capsys, "plan", "--q", "2", "--points", points)
    assert code == 2 and err


def test_plan_normalize_and_text(capsys):
    code, out, _ = run(capsys, "plan", "--q", "3", "--points", "2,0,0;0,3,0", "--normalize", "--format", "text")
    assert code == 0 and "interpolation" in out


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", "--q", "4", "--r", "3", "--samples", "100000", "--seed", "7")
    doc = json.loads(out)
    assert code == 0
    assert doc["max_index"] <= 2 and sum(doc["histogram"]) == 100000


def test_outputs_are_deterministic(capsys):
    commands = [
        ["stats", "--q", "3", "--r", "3", "--samples", "30000", "--seed", "4", "--antipodal-rate", "0.2"],
        ["plan", "--q", "4", "--points", "1,0,0,0;-1,0,0,0;0,0,1,0", "--grid", "32"],
        ["sweep", "rp_l_eta_eps", "--n", "1..7", "--l", "1..4", "--r", "2..4"],
    ]
    for argv in commands:
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second


def test_thread_env_does_not_change_stats(monkeypatch, capsys):
    argv = ["stats", "--q", "3", "--r", "4", "--samples", "40000", "--seed", "3", "--antipodal-rate", "0.3"]
    monkeypatch.setenv("TC_SPHERE_THREADS", "1")
    serial = run(capsys, *argv)
    monkeypatch.setenv("TC_SPHERE_THREADS", "4")
    assert run(capsys, *argv) == serial


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tc_sphere", "bounds", "CP(3); 1*eta+1*eps", "--r", "2", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["exact"] == 4
