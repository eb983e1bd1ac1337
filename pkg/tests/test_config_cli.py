import json

import numpy as np
import pytest

from dnflow import (AdmissibilityError, MalformedConfigError, SchemaError,
                    parse_config, serialize_config)
from dnflow.cli import main
from dnflow.stepper import ConstantSchedule, SinusoidSchedule

GAS_CONFIG = {
    "model": {
        "beta": {"family": "power", "kappa": 1.0, "gamma": 2.0},
        "p": 1.5,
        "u_min": 0.5,
        "u_max": 2.0,
    },
    "domain": {"length": 1.0, "cells": 16},
    "alpha": 1.0,
    "time": {"horizon": 1.0, "step": 0.01},
    "initial": {"type": "constant", "value": 1.0},
    "boundary": {"type": "constant", "left": 1.0, "right": 2.0},
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def variant(**overrides):
    doc = json.loads(json.dumps(GAS_CONFIG))
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------

def test_minimal_config_fills_defaults():
    cfg = parse_config(json.dumps(GAS_CONFIG))
    assert cfg.solver["newton_tol"] == 1e-10
    assert cfg.solver["newton_max_iter"] == 50
    assert cfg.solver["eps_reg"] == 1e-8
    assert cfg.experiment["levels"] == 3
    sc = cfg.build_scenario()
    assert sc.grid.cells == 16
    assert sc.model.p == 1.5
    assert isinstance(sc.schedule, ConstantSchedule)
    assert np.all(sc.u0 == 1.0)


def test_config_roundtrip():
    cfg = parse_config(json.dumps(GAS_CONFIG))
    again = parse_config(serialize_config(cfg))
    assert again == cfg


def test_config_from_file(tmp_path):
    path = write_config(tmp_path, GAS_CONFIG)
    cfg = parse_config(path)
    assert cfg.alpha == 1.0


def test_malformed_json_rejected():
    with pytest.raises(MalformedConfigError):
        parse_config("{not json")


def test_unknown_field_rejected():
    with pytest.raises(SchemaError, match="config.extra"):
        parse_config(json.dumps(variant(extra=1)))


def test_missing_field_rejected():
    doc = variant()
    del doc["alpha"]
    with pytest.raises(SchemaError, match="alpha"):
        parse_config(json.dumps(doc))


def test_zero_boundary_value_rejected():
    doc = variant(boundary={"type": "constant", "left": 0.0, "right": 2.0})
    with pytest.raises(AdmissibilityError, match="boundary.left"):
        parse_config(json.dumps(doc))


def test_flux_exponent_out_of_range_rejected():
    doc = variant()
    doc["model"] = dict(doc["model"], p=2.5)
    with pytest.raises(AdmissibilityError, match=r"model.p"):
        parse_config(json.dumps(doc))


def test_initial_data_outside_range_rejected():
    doc = variant(initial={"type": "constant", "value": 0.3})
    with pytest.raises(AdmissibilityError, match="initial.value"):
        parse_config(json.dumps(doc))


def test_sinusoid_schedule_built_and_bounded():
    doc = variant(boundary={
        "type": "sinusoid",
        "left": {"base": 1.0, "amplitude": 0.0, "omega": 0.0},
        "right": {"base": 1.5, "amplitude": 0.3, "omega": 0.2},
    })
    cfg = parse_config(json.dumps(doc))
    assert isinstance(cfg.build_schedule(), SinusoidSchedule)
    doc["boundary"]["right"]["amplitude"] = 0.6  # sweeps above u_max
    with pytest.raises(AdmissibilityError, match="boundary.right"):
        parse_config(json.dumps(doc))


def test_values_initial_length_checked():
    doc = variant(initial={"type": "values", "values": [1.0, 1.0, 1.0]})
    with pytest.raises(AdmissibilityError, match="initial.values"):
        parse_config(json.dumps(doc))


def test_violations_are_aggregated():
    doc = variant(alpha=-1.0)
    doc["time"] = {"horizon": 1.0, "step": -0.1}
    with pytest.raises(AdmissibilityError) as err:
        parse_config(json.dumps(doc))
    assert len(err.value.violations) == 2


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_steady_prints_closed_form(tmp_path, capsys):
    path = write_config(tmp_path, GAS_CONFIG)
    code = main(["steady", "--config", path, "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "u_left=1.414214, slope=0.171573" in out
    assert "x,analytic,discrete" in out


def test_cli_check_constant_config_passes(tmp_path, capsys):
    doc = variant(initial={"type": "constant", "value": 1.3},
                  boundary={"type": "constant", "left": 1.3, "right": 1.3},
                  time={"horizon": 0.3, "step": 0.01})
    path = write_config(tmp_path, doc)
    code = main(["check", "--config", path, "--out", str(tmp_path), "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert (tmp_path / "check_report.json").exists()
    assert "FAIL" not in out


def test_cli_run_emits_trajectory(tmp_path, capsys):
    doc = variant(time={"horizon": 0.2, "step": 0.01})
    path = write_config(tmp_path, doc)
    code = main(["run", "--config", path, "--out", str(tmp_path)])
    assert code == 0
    csv = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert csv[0].startswith("t,entropy,dissipation")
    assert len(csv) == 21


def test_cli_decay_emits_report(tmp_path, capsys):
    doc = variant(time={"horizon": 1.0, "step": 0.01})
    path = write_config(tmp_path, doc)
    code = main(["decay", "--config", path, "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert (tmp_path / "decay_decay.csv").exists()
    report = json.loads((tmp_path / "decay_report.json").read_text())
    assert report["passed"] is True
    assert "monotone_decay: PASS" in out


def test_cli_converge_runs(tmp_path, capsys):
    doc = variant(domain={"length": 1.0, "cells": 4},
                  time={"horizon": 0.4, "step": 0.02})
    path = write_config(tmp_path, doc)
    code = main(["converge", "--config", path, "--out", str(tmp_path),
                 "--levels", "3"])
    assert code == 0
    assert (tmp_path / "convergence.csv").exists()


def test_cli_track_runs(tmp_path, capsys):
    doc = variant(boundary={
        "type": "sinusoid",
        "left": {"base": 1.0, "amplitude": 0.0, "omega": 0.0},
        "right": {"base": 1.5, "amplitude": 0.2, "omega": 0.5},
    }, time={"horizon": 5.0, "step": 0.02},
       domain={"length": 1.0, "cells": 12})
    path = write_config(tmp_path, doc)
    code = main(["track", "--config", path, "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "tracking_report.json").exists()


def test_cli_rejects_bad_config(tmp_path, capsys):
    doc = variant(boundary={"type": "constant", "left": 0.0, "right": 2.0})
    path = write_config(tmp_path, doc)
    code = main(["run", "--config", path, "--out", str(tmp_path)])
    err = capsys.readouterr().err
    assert code == 1
    assert "boundary.left" in err


def test_cli_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--config", "x.json"])
    assert exc.value.code == 2
