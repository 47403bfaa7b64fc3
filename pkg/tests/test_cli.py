"""CLI subcommands, exit codes, and artifact determinism."""

import json
import os

import numpy as np
import pytest

from l22embed.cli import main
from l22embed.serialize import dumps, pointset_to_dict
from l22embed.generators import line_sqrt


def run(*argv):
    return main(list(argv))


def read(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def c4_files(tmp_path):
    out = str(tmp_path)
    assert run("gen", "--kind", "cycle", "--n", "4", "--out", out, "--deterministic") == 0
    return os.path.join(out, "cost.json"), os.path.join(out, "demand.json"), out


class TestGenAndOracle:
    def test_cycle_then_oracle_half(self, c4_files):
        cost, demand, out = c4_files
        assert run("oracle", "--cost", cost, "--demand", demand, "--out", out) == 0
        payload = read(os.path.join(out, "oracle.json"))
        assert payload["phi_star"] == pytest.approx(0.5)
        assert payload["cut"] == [1, 2]

    def test_gen_pointset(self, tmp_path):
        out = str(tmp_path)
        assert run("gen", "--kind", "hypercube_subset", "--n", "6", "--d", "4", "--out", out) == 0
        payload = read(os.path.join(out, "points.json"))
        assert payload["n"] == 6 and payload["d"] == 4

    def test_gen_rejects_bad_params(self, tmp_path):
        assert run("gen", "--kind", "hypercube_subset", "--n", "9", "--d", "2",
                   "--out", str(tmp_path)) == 2


class TestCheckAndSpectrum:
    def test_check_valid(self, tmp_path):
        out = str(tmp_path)
        run("gen", "--kind", "simplex", "--n", "3", "--out", out)
        assert run("check", "--points", os.path.join(out, "points.json"), "--out", out) == 0

    def test_check_invalid_exits_one(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            dumps({"n": 3, "d": 1, "points": [[0.0], [1.0], [2.0]]})
        )
        assert run("check", "--points", str(path), "--out", str(tmp_path)) == 1

    def test_spectrum_report(self, tmp_path):
        out = str(tmp_path)
        pts = tmp_path / "points.json"
        pts.write_text(dumps(pointset_to_dict(line_sqrt([0.0, 1.0, 4.0]))))
        assert run("spectrum", "--points", str(pts), "--out", out) == 0
        payload = read(os.path.join(out, "spectrum.json"))
        assert set(payload) >= {"sigma", "stable_rank", "u_top", "v_top"}


class TestEmbed:
    def test_spectral_1d_two_points(self, tmp_path):
        out = str(tmp_path)
        pts = tmp_path / "points.json"
        pts.write_text(dumps({"n": 2, "d": 1, "points": [[0.0], [3.0]]}))
        assert run("embed", "--method", "spectral-1d", "--points", str(pts), "--out", out) == 0
        report = read(os.path.join(out, "distortion.json"))
        assert report["average_distortion"] == pytest.approx(1.0)
        assert report["contraction_ok"] is True
        emb = read(os.path.join(out, "embedding.json"))
        assert emb["method"] == "spectral_1d"
        assert np.asarray(emb["A"]).shape == (1, 1)

    def test_demand_method_requires_demand(self, tmp_path):
        pts = tmp_path / "points.json"
        pts.write_text(dumps({"n": 2, "d": 1, "points": [[0.0], [3.0]]}))
        assert run("embed", "--method", "demand-sqlen", "--points", str(pts),
                   "--out", str(tmp_path)) == 2

    def test_all_methods_run(self, tmp_path, c4_files):
        cost, demand, out = c4_files
        pts = tmp_path / "points.json"
        pts.write_text(
            dumps({"n": 4, "d": 2, "points": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]})
        )
        for method in ("goemans", "sqlen", "stable-rank", "spectral-1d"):
            assert run("embed", "--method", method, "--points", str(pts), "--out", out) == 0
        for method in ("demand-spectral-1d", "demand-sqlen"):
            assert run("embed", "--method", method, "--points", str(pts),
                       "--demand", demand, "--out", out) == 0
        ell = read(os.path.join(out, "ellipsoid.json"))
        assert ell["converged"] is True
        assert np.asarray(ell["Q"]).shape == (2, 2)


class TestSdpAndRound:
    def test_sdp_writes_gram_and_points(self, c4_files):
        cost, demand, out = c4_files
        assert run("sdp", "--cost", cost, "--demand", demand, "--out", out) == 0
        gram = read(os.path.join(out, "gram.json"))
        assert gram["n"] == 4
        assert gram["phi_sdp"] <= 0.5 + 1e-6
        assert os.path.exists(os.path.join(out, "solver_log.jsonl"))

    def test_round_pipeline(self, c4_files):
        cost, demand, out = c4_files
        assert run("round", "--cost", cost, "--demand", demand, "--out", out) == 0
        outcome = read(os.path.join(out, "outcome.json"))
        assert outcome["phi"] == pytest.approx(0.5, rel=1e-6)
        assert outcome["ratio"] >= 1.0 - 1e-9

    def test_round_reuses_gram(self, c4_files):
        cost, demand, out = c4_files
        run("sdp", "--cost", cost, "--demand", demand, "--out", out)
        gram = os.path.join(out, "gram.json")
        assert run("round", "--cost", cost, "--demand", demand, "--gram", gram,
                   "--out", out) == 0

    def test_round_certified_block_model(self, tmp_path):
        out = str(tmp_path)
        assert run("gen", "--kind", "block_model", "--n", "10", "--blocks", "2",
                   "--inter-weight", "0.01", "--out", out) == 0
        cost, demand = os.path.join(out, "cost.json"), os.path.join(out, "demand.json")
        assert run("round", "--cost", cost, "--demand", demand, "--delta", "0.5",
                   "--r", "2", "--out", out) == 0
        outcome = read(os.path.join(out, "outcome.json"))
        assert outcome["guarantee"] == pytest.approx(4.0)


class TestVerify:
    def test_verify_valid_points(self, tmp_path):
        out = str(tmp_path)
        run("gen", "--kind", "hypercube_subset", "--n", "5", "--d", "3", "--out", out)
        assert run("verify", "--points", os.path.join(out, "points.json"), "--out", out) == 0
        payload = read(os.path.join(out, "verify.json"))
        assert payload["ok"] is True

    def test_verify_invalid_exits_one(self, tmp_path):
        pts = tmp_path / "points.json"
        pts.write_text(dumps({"n": 3, "d": 1, "points": [[0.0], [1.0], [2.0]]}))
        assert run("verify", "--points", str(pts), "--out", str(tmp_path)) == 1


class TestSolverDerivedInputs:
    """Extracted SDP points carry near-duplicate pairs at solver noise; the
    CLI grades ratios at --tol with the matching noise floor, so legitimate
    solver output must pass embed and verify."""

    @pytest.fixture
    def solved_block_model(self, tmp_path):
        out = str(tmp_path)
        assert run("gen", "--kind", "block_model", "--n", "9", "--blocks", "3",
                   "--inter-weight", "0.02", "--out", out) == 0
        cost, demand = os.path.join(out, "cost.json"), os.path.join(out, "demand.json")
        assert run("sdp", "--cost", cost, "--demand", demand, "--out", out) == 0
        return os.path.join(out, "points.json"), demand, out

    def test_embed_contracts_at_cli_tolerance(self, solved_block_model):
        pts, demand, out = solved_block_model
        for method in sorted(("goemans", "sqlen", "stable-rank", "spectral-1d",
                              "demand-spectral-1d", "demand-sqlen")):
            assert run("embed", "--method", method, "--points", pts,
                       "--demand", demand, "--out", out) == 0, method
            report = read(os.path.join(out, "distortion.json"))
            assert report["contraction_ok"] is True, method

    def test_verify_passes_on_solver_output(self, solved_block_model):
        pts, demand, out = solved_block_model
        assert run("verify", "--points", pts, "--demand", demand, "--out", out) == 0
        payload = read(os.path.join(out, "verify.json"))
        assert payload["ok"] is True


class TestExitCodesAndDeterminism:
    def test_unknown_flag_exits_two(self):
        assert run("oracle", "--bogus", "x") == 2

    def test_missing_file_exits_two(self, tmp_path):
        assert run("check", "--points", str(tmp_path / "nope.json")) == 2

    def test_malformed_json_named(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("check", "--points", str(bad)) == 2
        assert "bad.json" in capsys.readouterr().err

    def test_schema_violation_named(self, tmp_path, capsys):
        bad = tmp_path / "graph.json"
        bad.write_text(dumps({"n": 3, "edges": [{"i": 1, "j": 0, "w": 1.0}]}))
        assert run("oracle", "--cost", str(bad), "--demand", str(bad)) == 2
        assert "i < j" in capsys.readouterr().err

    def test_deterministic_artifacts_byte_identical(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        for out in (out1, out2):
            assert run("gen", "--kind", "cycle", "--n", "5", "--seed", "7",
                       "--out", out, "--deterministic") == 0
            cost, demand = os.path.join(out, "cost.json"), os.path.join(out, "demand.json")
            assert run("round", "--cost", cost, "--demand", demand,
                       "--out", out, "--deterministic") == 0
            pts = os.path.join(out, "points.json")
            assert run("gen", "--kind", "l1_embeddable", "--n", "6", "--seed", "3",
                       "--out", out, "--deterministic") == 0
            assert run("spectrum", "--points", pts, "--out", out, "--deterministic") == 0
        for name in ("cost.json", "demand.json", "outcome.json", "points.json", "spectrum.json"):
            with open(os.path.join(out1, name), "rb") as fh:
                a = fh.read()
            with open(os.path.join(out2, name), "rb") as fh:
                b = fh.read()
            assert a == b, name

    def test_timestamp_present_without_flag(self, tmp_path):
        out = str(tmp_path)
        run("gen", "--kind", "cycle", "--n", "4", "--out", out)
        payload = read(os.path.join(out, "cost.json"))
        assert "timestamp" in payload["meta"]
        run("gen", "--kind", "cycle", "--n", "4", "--out", out, "--deterministic")
        payload = read(os.path.join(out, "cost.json"))
        assert "timestamp" not in payload["meta"]

    def test_version_flag(self, capsys):
        assert run("--version") == 0
