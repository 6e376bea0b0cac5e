import json
import math

import pytest

from orbitrecur import expcli
from orbitrecur.errors import ConfigError

SMALL_MATCH = """\
[experiment]
kind = match_curve
n_grid = 50, 200, 800
replicates = 3
master_seed = 77
tolerance = 1.5

[system]
type = bernoulli
weights = 0.5, 0.5
"""

SMALL_PROX = """\
[experiment]
kind = proximity_curve
n_grid = 50, 200, 800
replicates = 3
master_seed = 77
tolerance = 1.5
min_grid_points = 3

[system]
type = kdoubling
k = 2
"""

SMALL_D2 = """\
[experiment]
kind = d2
samples = 4000
replicates = 2
master_seed = 77
tolerance = 0.2

[system]
type = gauss
"""

SMALL_H2 = """\
[experiment]
kind = h2
samples = 2000
block_len = 6
replicates = 2
master_seed = 77
tolerance = 0.1

[system]
type = markov
transition = 0, 1; 0.5, 0.5
"""

SMALL_DIAG = """\
[experiment]
kind = diagnostics
r = 5
k_max = 8
master_seed = 77

[system]
type = markov
transition = 0, 1; 0.5, 0.5
"""

SMALL_RETURNS = """\
[experiment]
kind = returns
r = 3
k_list = 1, 2, 4, 6
mode = exact
master_seed = 77

[system]
type = bernoulli
weights = 0.5, 0.5
"""

ALL_SMALL = {
    "match_curve": SMALL_MATCH,
    "proximity_curve": SMALL_PROX,
    "d2": SMALL_D2,
    "h2": SMALL_H2,
    "diagnostics": SMALL_DIAG,
    "returns": SMALL_RETURNS,
}


class TestConfigParsing:
    @pytest.mark.parametrize("kind", sorted(expcli.EXAMPLE_CONFIGS))
    def test_canonical_examples_parse(self, kind):
        cfg = expcli.parse_config_text(expcli.EXAMPLE_CONFIGS[kind])
        assert cfg.kind == kind

    def test_missing_master_seed(self):
        text = SMALL_MATCH.replace("master_seed = 77\n", "")
        with pytest.raises(ConfigError):
            expcli.parse_config_text(text)

    def test_zero_replicates(self):
        with pytest.raises(ConfigError):
            expcli.parse_config_text(SMALL_MATCH.replace("replicates = 3", "replicates = 0"))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            expcli.parse_config_text(SMALL_MATCH.replace("match_curve", "bogus"))

    def test_ragged_matrix(self):
        with pytest.raises(ConfigError):
            expcli.parse_config_text(SMALL_H2.replace("0, 1;", "0, 1, 0;"))

    def test_decreasing_grid(self):
        with pytest.raises(ConfigError):
            expcli.parse_config_text(SMALL_MATCH.replace("50, 200, 800", "800, 200"))

    def test_markov_without_stationary_solves(self):
        cfg = expcli.parse_config_text(SMALL_H2)
        m = expcli.measure_from_section(cfg.system)
        assert m.pi[1] == pytest.approx(2 / 3, abs=1e-10)

    def test_gibbs_section(self):
        text = """\
[experiment]
kind = h2
samples = 2000
block_len = 6
master_seed = 1

[system]
type = gibbs2block
admissible = 0, 1; 1, 1
potential = 0, -0.5; 0.25, 0
"""
        cfg = expcli.parse_config_text(text)
        m = expcli.measure_from_section(cfg.system)
        assert m.as_markov().pi.sum() == pytest.approx(1.0)


class TestRunAndVerify:
    def test_match_run_writes_artifacts(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_MATCH)
        rec = expcli.run(cfg, tmp_path / "out")
        for name in ("results.csv", "manifest.json", "report.json"):
            assert (tmp_path / "out" / name).exists()
        assert rec.report["target"] == pytest.approx(2.0 / math.log(2), abs=1e-12)
        assert rec.report["target_provenance"] == "renyi_entropy_exact"
        assert len(rec.rows) == 9

    def test_csv_schema(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_RETURNS)
        expcli.run(cfg, tmp_path / "out")
        lines = (tmp_path / "out" / "results.csv").read_text().splitlines()
        assert lines[0] == "experiment,kind,n,replicate,seed,value,aux,flag"
        assert len(lines) == 5
        assert all(line.endswith(",ok") for line in lines[1:])

    @pytest.mark.parametrize("kind", sorted(ALL_SMALL))
    def test_byte_identical_rerun(self, tmp_path, kind):
        cfg = expcli.parse_config_text(ALL_SMALL[kind])
        expcli.run(cfg, tmp_path / "a")
        expcli.run(cfg, tmp_path / "b")
        assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()
        assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()

    def test_cell_resume_reproduces_rows(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_MATCH)
        expcli.run(cfg, tmp_path / "out")
        first = (tmp_path / "out" / "results.csv").read_bytes()
        # delete one cell group and rerun: the row must come back identical
        removed = tmp_path / "out" / "cells" / "group-000000000200.csv"
        removed.unlink()
        expcli.run(cfg, tmp_path / "out")
        assert (tmp_path / "out" / "results.csv").read_bytes() == first

    def test_parallel_workers_same_bytes(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_PROX)
        expcli.run(cfg, tmp_path / "seq", workers=1)
        expcli.run(cfg, tmp_path / "par", workers=3)
        assert (tmp_path / "seq" / "results.csv").read_bytes() == (tmp_path / "par" / "results.csv").read_bytes()

    def test_verify_pass_and_fail(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_PROX)
        expcli.run(cfg, tmp_path / "out")
        code, msg = expcli.verify(tmp_path / "out")
        assert code == 0, msg
        code, msg = expcli.verify(tmp_path / "out", tolerance=1e-6)
        assert code == 1

    def test_verify_incomplete(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_MATCH)
        expcli.run(cfg, tmp_path / "out")
        csv_path = tmp_path / "out" / "results.csv"
        lines = csv_path.read_text().splitlines()
        csv_path.write_text("\n".join(lines[:3]) + "\n")  # keep 2 of 9 rows
        code, msg = expcli.verify(tmp_path / "out")
        assert code == 3

    def test_manifest_records_cell_seeds(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_MATCH)
        rec = expcli.run(cfg, tmp_path / "out")
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert len(manifest["cells"]) == 9
        seeds = {(c["n"], c["replicate"]): c["seed"] for c in manifest["cells"]}
        for row in rec.rows:
            assert seeds[(row.n, row.replicate)] == row.seed

    def test_diagnostics_report_checks(self, tmp_path):
        cfg = expcli.parse_config_text(SMALL_DIAG)
        rec = expcli.run(cfg, tmp_path / "out")
        assert rec.report["pass"] is True
        assert isinstance(rec.report["checks"], list)
        assert all(c["pass"] for c in rec.report["checks"])


class TestCli:
    def test_list_kinds(self, capsys):
        assert expcli.main(["list-kinds"]) == 0
        out = capsys.readouterr().out.split()
        assert out == list(expcli.KINDS)

    def test_print_example_config(self, capsys):
        assert expcli.main(["print-example-config", "returns"]) == 0
        printed = capsys.readouterr().out
        assert expcli.parse_config_text(printed).kind == "returns"

    def test_run_and_verify_exit_codes(self, tmp_path, capsys):
        cfg_path = tmp_path / "exp.cfg"
        cfg_path.write_text(SMALL_RETURNS)
        assert expcli.main(["run", str(cfg_path), "--out", str(tmp_path / "out")]) == 0

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg_path = tmp_path / "bad.cfg"
        cfg_path.write_text("not a config at all")
        assert expcli.main(["run", str(cfg_path), "--out", str(tmp_path / "out")]) == 2

    def test_verify_missing_record(self, tmp_path, capsys):
        assert expcli.main(["verify", str(tmp_path / "nothing")]) == 3


class TestD2OrbitMode:
    def test_orbit_mode_runs(self, tmp_path):
        text = SMALL_D2.replace("type = gauss", "type = kdoubling\nk = 2")
        text = text.replace("samples = 4000", "samples = 20000\nmode = orbit")
        cfg = expcli.parse_config_text(text)
        rec = expcli.run(cfg, tmp_path / "out")
        # doubling-map orbits are Lebesgue typical: dimension estimate near 1
        assert abs(rec.report["slope"] - 1.0) < 0.2

    def test_bad_mode_rejected(self):
        with pytest.raises(ConfigError):
            expcli.parse_config_text(SMALL_D2.replace("tolerance = 0.2", "mode = banana"))
