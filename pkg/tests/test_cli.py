"""Command-line interface: golden regression, determinism, exit codes."""

import json
import math
import os
import subprocess
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GOLDEN = os.path.join(ROOT, "fixtures", "golden")

# each run regenerates one committed artifact set; keep the argument
# lists in lockstep with the files under fixtures/golden
RUNS = [
    ("dh_scaled_rotation_07",
     ["dh", "--map", "fixtures/maps/scaled_rotation_07.json", "--grid", "6"],
     ["dh.json", "dh.csv"]),
    ("report_identity",
     ["report", "--map", "fixtures/maps/identity.json", "--depth", "10"],
     ["report.json"]),
    ("b2_bernoulli_020_d10",
     ["b2", "--p", "0.2", "--depth", "10"],
     ["b2.json", "b2.csv"]),
    ("clark_blaschke_deg3",
     ["clark", "--map", "fixtures/maps/blaschke_deg3.json",
      "--alpha", "0.25", "--seed", "0"],
     ["clark.json", "clark.csv"]),
    ("zeros_blaschke_deg3",
     ["zeros", "--map", "fixtures/maps/blaschke_deg3.json",
      "--depth", "8", "--seed", "0"],
     ["zeros.json"]),
    ("mixing_square",
     ["mixing", "--map", "fixtures/maps/square.json", "--seed", "3"],
     ["mixing.json", "mixing.csv"]),
    ("content_bernoulli_035",
     ["content", "--measure", "fixtures/measures/bernoulli_035_d12.json",
      "--p", "0.62", "--depth", "12"],
     ["content.json"]),
    ("cantor_scaled_b035",
     ["cantor", "--measure", "fixtures/measures/cantor_scaled_b035.json",
      "--map", "fixtures/maps/clark_b035_d12.json", "--depth", "16"],
     ["cantor.json", "cantor_traces.csv"]),
]


def run_cli(args, out_dir):
    return subprocess.run(
        [sys.executable, "-m", "discmaps.cli"] + args + ["--out",
                                                         str(out_dir)],
        capture_output=True, text=True, cwd=ROOT)


def assert_json_close(got, want, path="$"):
    """Exact for ints/strings/bools/None, tolerant for floats."""
    if isinstance(want, dict):
        assert isinstance(got, dict) and got.keys() == want.keys(), path
        for k in want:
            assert_json_close(got[k], want[k], f"{path}.{k}")
    elif isinstance(want, list):
        assert isinstance(got, list) and len(got) == len(want), path
        for i, (a, b) in enumerate(zip(got, want)):
            assert_json_close(a, b, f"{path}[{i}]")
    elif isinstance(want, bool) or want is None or isinstance(want, str):
        assert got == want, f"{path}: {got!r} != {want!r}"
    elif isinstance(want, int) and not isinstance(want, bool):
        assert got == want, f"{path}: {got!r} != {want!r}"
    else:
        if math.isnan(want):
            assert math.isnan(got), path
        else:
            assert got == pytest.approx(want, rel=1e-9, abs=1e-12), (
                f"{path}: {got!r} != {want!r}")


def golden_name(run_name, output):
    ext = os.path.splitext(output)[1]
    base = run_name + ("_traces" if "traces" in output else "")
    return os.path.join(GOLDEN, base + ext)


@pytest.mark.parametrize("name,args,outputs", RUNS,
                         ids=[r[0] for r in RUNS])
def test_golden_regression(name, args, outputs, tmp_path):
    result = run_cli(args, tmp_path)
    assert result.returncode == 0, result.stderr
    for output in outputs:
        produced = tmp_path / output
        committed = golden_name(name, output)
        if output.endswith(".json"):
            with open(produced) as fh:
                got = json.load(fh)
            with open(committed) as fh:
                want = json.load(fh)
            assert_json_close(got, want)
        else:
            assert produced.read_bytes() == open(committed, "rb").read(), (
                f"{output} drifted from {committed}")


class TestDeterminism:
    def test_identical_bytes_across_runs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        args = ["mixing", "--map", "fixtures/maps/square.json", "--seed", "5"]
        assert run_cli(args, a).returncode == 0
        assert run_cli(args, b).returncode == 0
        assert (a / "mixing.json").read_bytes() == (
            b / "mixing.json").read_bytes()
        assert (a / "mixing.csv").read_bytes() == (
            b / "mixing.csv").read_bytes()

    def test_seed_changes_the_report(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        base = ["mixing", "--map", "fixtures/maps/square.json"]
        run_cli(base + ["--seed", "1"], a)
        run_cli(base + ["--seed", "2"], b)
        assert (a / "mixing.json").read_bytes() != (
            b / "mixing.json").read_bytes()


class TestExitCodes:
    def test_missing_map_is_an_input_error(self, tmp_path):
        result = run_cli(["dh"], tmp_path)
        assert result.returncode == 2
        assert "--map" in result.stderr

    def test_depth_over_the_cap(self, tmp_path):
        result = run_cli(["b2", "--p", "0.2", "--depth", "99"], tmp_path)
        assert result.returncode == 2

    def test_malformed_json_names_the_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "blaschke", }')
        result = run_cli(["dh", "--map", str(bad)], tmp_path)
        assert result.returncode == 2
        assert "line 1" in result.stderr

    def test_inconsistent_verdict_exits_one(self, tmp_path):
        # a strictly contractive rotation scored against an atomic measure:
        # the derivative axis and the boundary axes disagree
        result = run_cli(
            ["report", "--map", "fixtures/maps/scaled_rotation_07.json",
             "--measure", "fixtures/measures/atoms_pair.json",
             "--depth", "8"], tmp_path)
        assert result.returncode == 1
        assert "inconsistent" in result.stdout

    def test_degenerate_cantor_still_exits_zero(self, tmp_path):
        # numerical degeneracy is a reported outcome, not an input error
        result = run_cli(
            ["cantor", "--measure", "fixtures/measures/lebesgue.json",
             "--depth", "8"], tmp_path)
        assert result.returncode == 0
        with open(tmp_path / "cantor.json") as fh:
            doc = json.load(fh)
        assert doc["report"]["degenerate"] or doc["report"]["failed"]
