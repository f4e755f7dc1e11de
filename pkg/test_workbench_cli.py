#!/usr/bin/env python3
"""
Workbench CLI Tests
===================

Argument parsing, config merging, exit codes, file outputs and a
reduced verify-all run.
"""

import json
import logging
from pathlib import Path

import pytest

from workbench_cli import AcceptanceRun, build_parser, config_from_args, main, planted_family
from workbench_config import ExperimentConfig, build_config
from workbench_errors import ConfigError

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

ALL_CHECKS = [
    "cut-point formula", "model constraints", "excess axioms", "Ahlfors regularity",
    "Hölder constant", "parametrization", "blow-up bounds", "AW profile", "limit models",
    "sponge faces", "ball covers", "line blow-ups", "universal curve",
]


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for suffix in ("SEED", "N", "BUDGET_CELLS", "OUT_DIR", "LOG_LEVEL"):
        monkeypatch.delenv("FTL_" + suffix, raising=False)
    monkeypatch.chdir(tmp_path)


def test_cutcount_prints_formula_value(capsys):
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 1: tangent cutcount")
    logger.info("="*60)

    assert main(["--n", "4", "tangent", "cutcount", "--k", "2"]) == 0
    assert capsys.readouterr().out.strip() == "15"


def test_invalid_base_is_a_config_error():
    assert main(["--n", "5", "tangent", "cutcount"]) == 2
    assert main(["--log-level", "LOUD", "carpet", "check"]) == 2
    args = build_parser().parse_args(["--n", "7", "carpet", "check"])
    with pytest.raises(ConfigError):
        config_from_args(args)


def test_cli_flags_override_file_and_env(tmp_path, monkeypatch):
    """Precedence: file < FTL_* environment < flags"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 2: Config precedence")
    logger.info("="*60)

    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps({"_comment": "ignored", "n": 6, "seed": 1, "depth": 2}))
    monkeypatch.setenv("FTL_SEED", "9")
    args = build_parser().parse_args(["--config", str(config_file), "--log-level", "debug",
                                      "carpet", "build", "--depth", "1"])
    config = config_from_args(args)
    assert config.n == 6
    assert config.seed == 9
    assert config.depth == 1
    assert config.log_level == "DEBUG"
    assert config.options["action"] == "build"


def test_carpet_check_and_build_write_json(tmp_path):
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 3: carpet check and build")
    logger.info("="*60)

    out = tmp_path / "out"
    assert main(["--out-dir", str(out), "carpet", "check"]) == 0
    constraints = json.loads((out / "constraints_n4.json").read_text())
    assert [c["name"] for c in constraints] == ["C1", "C2", "C3", "C4", "C5", "C6", "C7"]

    assert main(["--out-dir", str(out), "--seed", "3", "carpet", "build", "--depth", "2"]) == 0
    first = (out / "cells.json").read_bytes()
    assert main(["--out-dir", str(out), "--seed", "3", "carpet", "build", "--depth", "2"]) == 0
    assert (out / "cells.json").read_bytes() == first


def test_missing_input_and_io_failures(tmp_path):
    assert main(["carpet", "render", "--in", str(tmp_path / "absent.json")]) == 2
    assert main(["carpet", "render"]) == 5

    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    assert main(["--out-dir", str(blocker / "sub"), "carpet", "check"]) == 3


def test_budget_exceeded_exit_code(tmp_path):
    assert main(["--out-dir", str(tmp_path), "--budget-cells", "10", "carpet", "build",
                 "--depth", "3"]) == 4


def test_blowup_requires_plant():
    assert main(["tangent", "blowup"]) == 5


def test_planted_family_layout():
    eta, spec = planted_family(4, 2, 1, seed=5)
    assert spec.occurrences[0].ell == 3
    assert len(spec.w_prefix) == 3 + 4 + 1 + 4
    assert set(spec.w_prefix) == {13}
    assert eta(spec.w_prefix[:3]) == 1


def test_reduced_acceptance_run():
    """Cut points and constraints only; everything else skipped"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 4: Reduced verify-all")
    logger.info("="*60)

    keep = {"cut-point formula", "model constraints"}
    config = ExperimentConfig(kind="verify-all", options={
        "cut_n": [4], "cut_k_max": 1, "constraint_n": [4],
        "skip": [name for name in ALL_CHECKS if name not in keep],
    })
    report = AcceptanceRun(config).run()
    assert {r.name for r in report.records} == keep
    assert report.passed
    assert report.to_dict()["summary"]["failed"] == 0


def test_verify_all_writes_report(tmp_path):
    out = tmp_path / "out"
    config_file = tmp_path / "verify.json"
    config_file.write_text(json.dumps({
        "kind": "verify-all",
        "out_dir": str(out),
        "options": {"cut_n": [4], "cut_k_max": 1, "excess_triples": 20,
                    "skip": [name for name in ALL_CHECKS
                             if name not in ("cut-point formula", "excess axioms")]},
    }))
    assert main(["--config", str(config_file), "verify-all"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert report["summary"]["total"] == 2


def test_shipped_verify_all_config_runs_at_full_size():
    """The shipped config sizes every check at the acceptance sizes"""
    logger.info("\n" + "="*60)
    logger.info("🧪 TEST 5: Shipped verify-all sizes")
    logger.info("="*60)

    config = build_config(str(Path(__file__).parent / "verify_all_config.json"))
    opt = config.options
    assert opt["cut_n"] == [4, 6] and opt["cut_k_max"] >= 3
    assert opt["excess_triples"] >= 1000
    assert opt["ahlfors_samples"] >= 200
    assert opt["holder_n"] == 6 and opt["holder_stage"] >= 4 and opt["holder_pairs"] >= 100000
    assert opt["param_stage"] >= 3
    assert [tuple(p) for p in opt["blowup_pairs"]] == [(3, 0), (3, 1), (4, 1)]

    record = AcceptanceRun(config).check_excess_axioms()
    for axiom in ("translation", "triangle", "containment", "monotonicity", "subadditivity"):
        assert axiom in record.anchor
        assert record.measured[axiom] == 0
    assert record.passed


def test_excess_check_counts_each_axiom():
    run = AcceptanceRun(ExperimentConfig(kind="verify-all", options={"excess_triples": 40}))
    record = run.check_excess_axioms()
    assert set(record.measured) == {"translation", "triangle", "containment",
                                    "monotonicity", "subadditivity"}
    assert record.passed


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
