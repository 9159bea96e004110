import json
import subprocess
import sys

import pytest

import tricensus as tc
from tricensus import cli

from conftest import build_from_pairs


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.txt"
    path.write_text("# 3-cycle plus isolate via --nodes\n1 2\n2 3\n3 1\n")
    return str(path)


class TestCensusCmd:
    def test_cycle_fixture_json(self, capsys, cycle_file):
        code, out, err = run_cli(capsys, "census", "--input", cycle_file,
                                 "--nodes", "4", "--threads", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["counts"]["030C"] == 1
        assert payload["counts"]["012"] == 3
        assert "wall=" in err

    def test_empty_file_with_node_override(self, capsys, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        code, out, _ = run_cli(capsys, "census", "--input", str(path),
                               "--nodes", "3", "--threads", "1")
        assert code == 0
        assert json.loads(out)["counts"]["003"] == 1

    def test_self_loop_warning_under_default_policy(self, capsys, tmp_path):
        path = tmp_path / "loopy.txt"
        path.write_text("1 1\n0 1\n")
        code, out, err = run_cli(capsys, "census", "--input", str(path),
                                 "--threads", "1")
        assert code == 0
        assert "dropped 1 self-loop" in err
        assert json.loads(out)["counts"]["012"] == 0  # n=2: no triads

    def test_reject_policy_exit_code(self, capsys, tmp_path):
        path = tmp_path / "loopy.txt"
        path.write_text("1 1\n")
        code, _, err = run_cli(capsys, "census", "--input", str(path),
                               "--self-loops", "reject")
        assert code == 1
        assert "self-loop" in err

    def test_malformed_line_number_and_exit(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 1\nnot numbers\n")
        code, _, err = run_cli(capsys, "census", "--input", str(path))
        assert code == 1
        assert "line 2" in err

    def test_csv_format_to_file(self, capsys, tmp_path, cycle_file):
        out_path = tmp_path / "census.csv"
        code, out, _ = run_cli(capsys, "census", "--input", cycle_file,
                               "--threads", "1", "--format", "csv",
                               "--output", str(out_path))
        assert code == 0
        assert out == ""
        lines = out_path.read_text().strip().splitlines()
        assert lines[0] == "label,count"

    def test_missing_input_is_input_error(self, capsys):
        code, _, err = run_cli(capsys, "census", "--input", "/nonexistent/x.txt")
        assert code == 1

    def test_no_input_no_spec(self, capsys):
        code, _, err = run_cli(capsys, "census")
        assert code == 1
        assert "no input" in err

    def test_binary_cache_roundtrip(self, capsys, tmp_path, cycle_file):
        cache = tmp_path / "g.tcsr"
        code, out1, _ = run_cli(capsys, "census", "--input", cycle_file,
                                "--threads", "1", "--save-binary", str(cache))
        assert code == 0
        code, out2, _ = run_cli(capsys, "census", "--input", str(cache),
                                "--threads", "1")
        assert code == 0
        assert json.loads(out1) == json.loads(out2)

    def test_remap_sidecar(self, capsys, tmp_path):
        path = tmp_path / "sparse.txt"
        path.write_text("5000000 9000000\n9000000 123\n")
        sidecar = tmp_path / "ids.txt"
        code, out, err = run_cli(capsys, "census", "--input", str(path),
                                 "--threads", "1", "--remap", str(sidecar))
        assert code == 0
        assert sidecar.read_text().split() == ["123", "5000000", "9000000"]
        assert json.loads(out)["n"] == 3

    def test_generated_input(self, capsys):
        code, out, _ = run_cli(capsys, "census", "--model", "uniform",
                               "--gen-nodes", "30", "--gen-arcs", "100",
                               "--seed", "3", "--threads", "2")
        assert code == 0
        g = tc.build_graph(tc.generate(tc.GenSpec("uniform", 30, 100, seed=3)))
        expected = tc.census_sequential(g, tc.TRICODE_TABLE)
        assert json.loads(out)["counts"] == {
            k: v for k, v in expected.as_dict().items()}


class TestGenerateCmd:
    def test_roundtrip_census_matches_in_process(self, capsys, tmp_path):
        out_file = tmp_path / "gen.txt"
        code, _, _ = run_cli(capsys, "generate", "--model", "powerlaw",
                             "--gen-nodes", "500", "--gen-arcs", "5000",
                             "--exponent", "2.3", "--seed", "11",
                             "--output", str(out_file))
        assert code == 0
        code, out, _ = run_cli(capsys, "census", "--input", str(out_file),
                               "--threads", "2")
        assert code == 0
        spec = tc.GenSpec("powerlaw", 500, 5000, exponent=2.3, seed=11)
        g = tc.build_graph(tc.generate(spec))
        expected = tc.census_sequential(g, tc.TRICODE_TABLE)
        assert json.loads(out)["counts"] == expected.as_dict()

    def test_requires_spec(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "generate", "--output",
                               str(tmp_path / "x.txt"))
        assert code == 1

    def test_infeasible_spec(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "generate", "--model", "uniform",
                               "--gen-nodes", "3", "--gen-arcs", "100",
                               "--output", str(tmp_path / "x.txt"))
        assert code == 1


class TestDegreesCmd:
    def test_csv_stdout(self, capsys, cycle_file):
        code, out, _ = run_cli(capsys, "degrees", "--input", cycle_file)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "degree,count"
        assert "1,3" in lines  # each cycle node has outdegree 1

    def test_fit_json(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "degrees", "--preset", "orkut-like",
                               "--gen-nodes", "20000", "--gen-arcs", "200000",
                               "--seed", "2", "--fit-kmin", "5",
                               "--output", str(tmp_path / "deg.csv"))
        assert code == 0
        fit = json.loads(out)
        assert abs(fit["exponent"] - 2.127) < 0.3
        assert (tmp_path / "deg.csv").exists()


class TestVerifyCmd:
    def test_agreement_pass(self, capsys):
        code, out, err = run_cli(capsys, "verify", "--model", "uniform",
                                 "--gen-nodes", "40", "--gen-arcs", "200",
                                 "--count", "3", "--threads", "2")
        assert code == 0
        report = json.loads(out)
        assert report["passed"] and report["table"]["passed"]
        assert len(report["graphs"]) == 3

    def test_cap_refusal(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--model", "uniform",
                               "--gen-nodes", "100", "--gen-arcs", "10",
                               "--cap", "50")
        assert code == 1
        assert "cap" in err

    def test_injected_divergence_names_class(self, capsys, monkeypatch):
        """Fault injection: corrupt the sequential census, expect exit 2."""
        real = cli.census_sequential

        def corrupted(g, table):
            census = real(g, table)
            counts = list(census.counts)
            counts[1] += 1  # off-by-one in class 012
            counts[0] -= 1
            return tc.TriadCensus(census.n, tuple(counts))

        monkeypatch.setattr(cli, "census_sequential", corrupted)
        code, out, err = run_cli(capsys, "verify", "--model", "uniform",
                                 "--gen-nodes", "30", "--gen-arcs", "60",
                                 "--threads", "1")
        assert code == 2
        assert "012" in err or "003" in err


class TestBenchCmd:
    def test_rows_and_checksum_consistency(self, capsys, tmp_path):
        out_path = tmp_path / "bench.json"
        code, _, err = run_cli(capsys, "bench", "--model", "uniform",
                               "--gen-nodes", "300", "--gen-arcs", "4000",
                               "--seed", "5", "--threads", "1,2",
                               "--repeats", "2", "--output", str(out_path))
        assert code == 0
        result = json.loads(out_path.read_text())
        assert result["repeats"] == 2
        assert [r["workers"] for r in result["rows"]] == [1, 2]
        checksums = {r["checksum"] for r in result["rows"]}
        assert len(checksums) == 1
        assert result["rows"][0]["speedup"] == 1.0

    def test_single_thread_speedup_is_one(self, capsys):
        code, out, _ = run_cli(capsys, "bench", "--model", "uniform",
                               "--gen-nodes", "100", "--gen-arcs", "500",
                               "--threads", "1", "--repeats", "3")
        assert code == 0
        result = json.loads(out)
        assert [r["speedup"] for r in result["rows"]] == [1.0]

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(capsys, "bench", "--model", "uniform",
                               "--gen-nodes", "100", "--gen-arcs", "500",
                               "--threads", "1", "--repeats", "1",
                               "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "workers,shards,chunk,seconds,speedup,checksum"

    def test_bad_thread_list(self, capsys):
        code, _, err = run_cli(capsys, "bench", "--model", "uniform",
                               "--gen-nodes", "10", "--gen-arcs", "10",
                               "--threads", "zero")
        assert code == 1

    def test_checksum_mismatch_fails_loudly(self, capsys, monkeypatch):
        """A corrupted run must abort benchmarking with the verify exit code."""
        real = cli.run_census

        def unstable(g, table, cfg):
            run = real(g, table, cfg)
            if cfg.worker_count == 2:
                counts = list(run.census.counts)
                counts[3] += 1
                run.census = tc.TriadCensus(run.census.n, tuple(counts))
            return run

        monkeypatch.setattr(cli, "run_census", unstable)
        code, _, err = run_cli(capsys, "bench", "--model", "uniform",
                               "--gen-nodes", "50", "--gen-arcs", "200",
                               "--threads", "1,2", "--repeats", "1")
        assert code == 2
        assert "mismatch" in err


class TestScriptEntry:
    def test_module_invocation(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("0 1\n")
        proc = subprocess.run(
            [sys.executable, "-m", "tricensus", "census", "--input", str(path),
             "--threads", "1"],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["n"] == 2

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "tricensus", "census", "--threads", "NaN"],
            capture_output=True, text=True, timeout=300)
        assert proc.returncode == 1
