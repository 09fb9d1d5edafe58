"""CLI subcommands: exit codes, file formats, determinism, and CSV schemas."""
from __future__ import annotations

import json

import numpy as np
import pytest
from click.testing import CliRunner

from banditindex import compute_indices, load_arm, save_arm, SolverOptions, Cubic
from banditindex.cli import main
from conftest import (
    make_indexable3,
    make_multichain_rest2,
    make_nonindexable3,
    make_transient_inf2,
)

RESULT_KEYS = {"status", "indices", "sigma", "iterations", "variant", "elapsed_ms"}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def arm_files(tmp_path):
    paths = {}
    for name, maker in [
        ("indexable3", make_indexable3),
        ("nonindexable3", make_nonindexable3),
        ("multichain_rest2", make_multichain_rest2),
        ("transient_inf2", make_transient_inf2),
    ]:
        path = tmp_path / f"{name}.json"
        save_arm(maker(), path)
        paths[name] = str(path)
    return paths


class TestCompute:
    def test_indexable_exit_zero_with_result_json(self, runner, arm_files):
        result = runner.invoke(main, ["compute", arm_files["indexable3"]])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert set(payload) == RESULT_KEYS
        assert payload["status"] == "indexable"
        assert payload["sigma"] == [0, 2, 1]
        assert payload["iterations"] == 3
        assert payload["variant"] == "block"
        assert payload["elapsed_ms"] > 0
        np.testing.assert_allclose(payload["indices"], [0.299, 0.803, 0.702],
                                   atol=1e-2)

    def test_non_indexable_exit_two(self, runner, arm_files):
        result = runner.invoke(main, ["compute", arm_files["nonindexable3"]])
        assert result.exit_code == 2
        payload = json.loads(result.stdout)
        assert payload["status"] == "non_indexable"
        assert payload["indices"] is None and payload["sigma"] is None

    def test_multichain_exit_three(self, runner, arm_files):
        result = runner.invoke(main, ["compute", arm_files["multichain_rest2"]])
        assert result.exit_code == 3
        assert json.loads(result.stdout)["status"] == "multichain"

    def test_infinite_indices_serialized_as_strings(self, runner, arm_files):
        result = runner.invoke(main, ["compute", arm_files["transient_inf2"]])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["indices"] == ["inf", 0.0]

    def test_malformed_file_exit_one_names_field(self, runner, tmp_path):
        # Build a file whose P1 row 1 does not sum to one.
        arm = make_indexable3()
        bad = {
            "n": 3,
            "P0": arm.P0.tolist(),
            "P1": arm.P1.tolist(),
            "r0": arm.r0.tolist(),
            "r1": arm.r1.tolist(),
        }
        bad["P1"][1][0] += 0.25
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        result = runner.invoke(main, ["compute", str(path)])
        assert result.exit_code == 1
        assert "P1" in result.stderr and "row 1" in result.stderr

    def test_unreadable_json_exit_one(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        result = runner.invoke(main, ["compute", str(path)])
        assert result.exit_code == 1

    def test_out_writes_result_file(self, runner, arm_files, tmp_path):
        out = tmp_path / "result.json"
        result = runner.invoke(
            main, ["compute", arm_files["indexable3"], "--out", str(out)]
        )
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        assert payload["status"] == "indexable"

    def test_result_floats_round_trip_bit_exact(self, runner, arm_files, tmp_path):
        out = tmp_path / "result.json"
        runner.invoke(main, ["compute", arm_files["indexable3"], "--variant",
                             "cubic", "--out", str(out)])
        payload = json.loads(out.read_text())
        reference = compute_indices(load_arm(arm_files["indexable3"]),
                                    SolverOptions(variant=Cubic()))
        assert payload["indices"] == list(reference.indices)

    def test_variant_flag(self, runner, arm_files):
        for variant in ("naive", "cubic", "block"):
            result = runner.invoke(
                main, ["compute", arm_files["indexable3"], "--variant", variant]
            )
            assert result.exit_code == 0
            assert json.loads(result.stdout)["variant"] == variant

    def test_beta_flag_switches_criterion(self, runner, arm_files):
        plain = runner.invoke(main, ["compute", arm_files["indexable3"]])
        discounted = runner.invoke(
            main, ["compute", arm_files["indexable3"], "--beta", "0.99"]
        )
        a = json.loads(plain.stdout)["indices"]
        b = json.loads(discounted.stdout)["indices"]
        assert a != b

    def test_criterion_discounted_requires_beta(self, runner, arm_files):
        result = runner.invoke(
            main, ["compute", arm_files["indexable3"], "--criterion", "discounted"]
        )
        assert result.exit_code == 1
        assert "--beta" in result.stderr

    def test_avg_criterion_rejects_beta(self, runner, arm_files):
        result = runner.invoke(
            main,
            ["compute", arm_files["indexable3"], "--criterion", "avg",
             "--beta", "0.9"],
        )
        assert result.exit_code == 1

    def test_file_discount_used_by_default(self, runner, tmp_path):
        arm = make_indexable3()
        from banditindex import RestlessArm

        discounted_arm = RestlessArm(arm.P0, arm.P1, arm.r0, arm.r1, 0.99)
        path = tmp_path / "discounted.json"
        save_arm(discounted_arm, path)
        from_file = runner.invoke(main, ["compute", str(path)])
        payload = json.loads(from_file.stdout)
        assert payload["indices"][0] == pytest.approx(0.3010875, abs=1e-6)

    def test_recompute_count_requires_block(self, runner, arm_files):
        result = runner.invoke(
            main,
            ["compute", arm_files["indexable3"], "--variant", "cubic",
             "--recompute-count", "2"],
        )
        assert result.exit_code == 1

    def test_no_index_check_passes_nonindexable(self, runner, arm_files):
        result = runner.invoke(
            main, ["compute", arm_files["nonindexable3"], "--no-index-check"]
        )
        assert result.exit_code == 0
        assert json.loads(result.stdout)["status"] == "indexable"


class TestCheck:
    def test_agreement_against_naive(self, runner, arm_files):
        result = runner.invoke(main, ["check", arm_files["indexable3"]])
        assert result.exit_code == 0
        assert "AGREE" in result.output
        assert "discrepancy" in result.output

    def test_agreement_against_oracle(self, runner, arm_files):
        result = runner.invoke(main, ["check", arm_files["indexable3"], "--oracle"])
        assert result.exit_code == 0
        assert "AGREE" in result.output

    def test_nonindexable_agreement(self, runner, arm_files):
        result = runner.invoke(
            main, ["check", arm_files["nonindexable3"], "--oracle"]
        )
        assert result.exit_code == 0
        assert "non_indexable" in result.output

    def test_unsupported_oracle_notes_and_exits_zero(self, runner, arm_files):
        result = runner.invoke(
            main, ["check", arm_files["multichain_rest2"], "--oracle"]
        )
        assert result.exit_code == 0
        assert "UNSUPPORTED_BY_ORACLE" in result.output

    def test_oracle_size_limit(self, runner, tmp_path):
        from banditindex import generate_dense_uniform

        path = tmp_path / "big.json"
        save_arm(generate_dense_uniform(11, 0), path)
        result = runner.invoke(main, ["check", str(path), "--oracle"])
        assert result.exit_code == 1
        assert "n=11" in result.stderr

    def test_max_n_flag_tightens_limit(self, runner, arm_files):
        result = runner.invoke(
            main, ["check", arm_files["indexable3"], "--oracle", "--max-n", "2"]
        )
        assert result.exit_code == 1


class TestGenerate:
    def test_filenames_and_determinism(self, runner, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        for d in (d1, d2):
            result = runner.invoke(
                main,
                ["generate", "--n", "5", "--bandwidth", "3", "--seed", "9",
                 "--count", "2", "--out-dir", str(d)],
            )
            assert result.exit_code == 0
        names = sorted(p.name for p in d1.iterdir())
        assert names == ["arm_n5_b3_seed10.json", "arm_n5_b3_seed9.json"]
        for name in names:
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_dense_tag(self, runner, tmp_path):
        result = runner.invoke(
            main, ["generate", "--n", "4", "--out-dir", str(tmp_path)]
        )
        assert result.exit_code == 0
        assert (tmp_path / "arm_n4_dense_seed0.json").exists()

    def test_generated_files_load(self, runner, tmp_path):
        runner.invoke(main, ["generate", "--n", "6", "--out-dir", str(tmp_path)])
        arm = load_arm(tmp_path / "arm_n6_dense_seed0.json")
        assert arm.n == 6

    def test_bad_bandwidth_exit_one(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["generate", "--n", "4", "--bandwidth", "2", "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == 1


class TestStats:
    def test_csv_schema_and_cells(self, runner):
        result = runner.invoke(
            main,
            ["stats", "--n", "4,5", "--bandwidth", "dense,3", "--samples", "5",
             "--seed", "2"],
        )
        assert result.exit_code == 0
        lines = result.stdout.strip().splitlines()
        assert lines[0] == "n,bandwidth,samples,indexable,seed"
        assert len(lines) == 5
        assert lines[1].startswith("4,dense,5,")
        assert lines[2].startswith("4,3,5,")
        for line in lines[1:]:
            n, bandwidth, samples, indexable, seed = line.split(",")
            assert int(samples) == 5 and int(seed) == 2
            assert 0 <= int(indexable) <= 5

    def test_jobs_invariance(self, runner):
        args = ["stats", "--n", "5", "--bandwidth", "dense,3", "--samples", "8",
                "--seed", "0"]
        serial = runner.invoke(main, args + ["--jobs", "1"])
        parallel = runner.invoke(main, args + ["--jobs", "3"])
        assert serial.stdout == parallel.stdout

    def test_csv_file_output(self, runner, tmp_path):
        out = tmp_path / "stats.csv"
        result = runner.invoke(
            main,
            ["stats", "--n", "4", "--samples", "3", "--csv", str(out)],
        )
        assert result.exit_code == 0
        assert out.read_text().startswith("n,bandwidth,samples,indexable,seed\n")

    def test_zero_samples_rejected(self, runner):
        result = runner.invoke(main, ["stats", "--n", "4", "--samples", "0"])
        assert result.exit_code == 1

    def test_counts_match_direct_computation(self, runner):
        from banditindex import Indexable, generate_banded

        result = runner.invoke(
            main, ["stats", "--n", "6", "--bandwidth", "3", "--samples", "10",
                   "--seed", "5"]
        )
        row = result.stdout.strip().splitlines()[1]
        reported = int(row.split(",")[3])
        expected = sum(
            isinstance(
                compute_indices(generate_banded(6, 3, 5 + i),
                                SolverOptions(variant=Cubic())),
                Indexable,
            )
            for i in range(10)
        )
        assert reported == expected


class TestBench:
    def test_csv_schema(self, runner):
        result = runner.invoke(
            main,
            ["bench", "--n", "20,30", "--variant", "cubic,block",
             "--repeats", "2"],
        )
        assert result.exit_code == 0
        lines = result.stdout.strip().splitlines()
        assert lines[0] == "n,variant,check,median_ms"
        assert len(lines) == 1 + 2 * 2 * 2
        for line in lines[1:]:
            n, variant, check, median_ms = line.split(",")
            assert variant in {"cubic", "block"}
            assert check in {"on", "off"}
            assert float(median_ms) > 0

    def test_unknown_variant_rejected(self, runner):
        result = runner.invoke(
            main, ["bench", "--n", "10", "--variant", "quartic"]
        )
        assert result.exit_code == 1

    def test_csv_file_output(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(
            main,
            ["bench", "--n", "15", "--variant", "cubic", "--repeats", "1",
             "--csv", str(out)],
        )
        assert result.exit_code == 0
        assert out.read_text().startswith("n,variant,check,median_ms\n")
