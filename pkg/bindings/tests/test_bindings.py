"""Bindings behaviour, checked only against the CLI surface."""

import json
import math
import subprocess
import sys

import pytest

import trackscore_bindings as tsb
from trackscore_bindings.runner import _cli_command


def cli_report(paths, tmp_path, tag):
    """Reference report produced by invoking the CLI directly."""
    out = tmp_path / f"{tag}.json"
    proc = subprocess.run(
        _cli_command() + [
            "eval", "--gt", str(paths.gt_dir), "--results", str(paths.results_dir),
            "--seqmap", str(paths.seqmap), "--out", str(out),
        ],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(out.read_text())


class TestGenerateScenario:
    def test_writes_benchmark_layout(self, tmp_path):
        paths = tsb.generate_scenario("two_frame_split", tmp_path / "b")
        assert paths.seqmap.exists()
        assert any(paths.gt_dir.iterdir())
        assert any(paths.results_dir.iterdir())

    def test_params_are_forwarded(self, tmp_path):
        paths = tsb.generate_scenario(
            "frame_rate", tmp_path / "b", params={"k": 12}
        )
        assert "frame_rate,12" in paths.seqmap.read_text()

    def test_unknown_scenario_raises_value_error(self, tmp_path):
        with pytest.raises(ValueError):
            tsb.generate_scenario("ghost", tmp_path / "b")

    def test_bad_param_raises_value_error(self, tmp_path):
        with pytest.raises(ValueError):
            tsb.generate_scenario("frame_rate", tmp_path / "b", params={"k": 7})


class TestEvaluate:
    def test_split_track_scores(self, tmp_path):
        paths = tsb.generate_scenario("frame_rate", tmp_path / "b",
                                      params={"k": 10})
        report = tsb.evaluate(paths.gt_dir, paths.results_dir, paths.seqmap)
        assert report.pooled["HOTA"] == pytest.approx(1 / math.sqrt(2), abs=1e-9)
        assert report.pooled["MOTA"] == pytest.approx(0.9, abs=1e-12)
        assert report.sequences["frame_rate"]["IDSW"] == 1
        assert not report.non_canonical
        assert len(report.alphas) == 19

    def test_metric_selection(self, tmp_path):
        paths = tsb.generate_scenario("two_frame_merge", tmp_path / "b")
        report = tsb.evaluate(
            paths.gt_dir, paths.results_dir, paths.seqmap, metrics=["hota"]
        )
        assert "HOTA" in report.pooled
        assert "MOTA" not in report.pooled

    def test_custom_alpha_grid(self, tmp_path):
        paths = tsb.generate_scenario("two_frame_merge", tmp_path / "b")
        report = tsb.evaluate(
            paths.gt_dir, paths.results_dir, paths.seqmap,
            alphas=[0.25, 0.5, 0.75],
        )
        assert report.non_canonical
        assert report.alphas == (0.25, 0.5, 0.75)

    def test_missing_inputs_raise_file_not_found(self, tmp_path):
        seqmap = tmp_path / "seqmap.txt"
        seqmap.write_text("ghost\n")
        with pytest.raises(FileNotFoundError):
            tsb.evaluate(tmp_path / "gt", tmp_path / "res", seqmap)

    def test_malformed_inputs_raise_value_error(self, tmp_path):
        (tmp_path / "gt").mkdir()
        (tmp_path / "res").mkdir()
        (tmp_path / "gt" / "bad.txt").write_text("1,1,0,0\n")
        (tmp_path / "res" / "bad.txt").write_text("")
        seqmap = tmp_path / "seqmap.txt"
        seqmap.write_text("bad\n")
        with pytest.raises(ValueError):
            tsb.evaluate(tmp_path / "gt", tmp_path / "res", seqmap)


class TestOracleCheck:
    def test_summary_line(self):
        line = tsb.oracle_check(trials=5, seed=1)
        assert "max_abs_diff" in line


class TestReportFidelity:
    @pytest.mark.parametrize("name,params", [
        ("frame_rate", {"k": 10}),
        ("self_correct", {"variant": "A"}),
    ])
    def test_field_for_field_equality_with_cli(self, tmp_path, name, params):
        paths = tsb.generate_scenario(name, tmp_path / name, params=params)
        bound = tsb.evaluate(paths.gt_dir, paths.results_dir, paths.seqmap)
        reference = cli_report(paths, tmp_path, name)
        assert bound.raw == reference
        assert bound.sequences == reference["sequences"]
        assert bound.pooled == reference["pooled"]
        assert bound.curves == reference["curves"]
        assert list(bound.alphas) == reference["alphas"]
        print(f"criterion 13 PASS: bindings report matches the CLI report "
              f"field for field on {name}")
