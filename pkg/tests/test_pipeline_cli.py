import datetime as dt
import json
import os

import pytest
import yaml

from coresat.cli import main
from coresat.errors import ConfigError, PipelineError
from coresat.pipeline import (
    EXAMPLE_CONFIG,
    PipelineConfig,
    RbfSettings,
    run,
    stage_dtw,
    stage_ingest,
    stage_report,
    stage_segment,
    stage_stats,
)


def cfg_kwargs(planted, out_name):
    base = planted["config"]
    return dict(
        data_dir=base.data_dir,
        output_dir=str(planted["root"] / out_name),
        date_start=base.date_start,
        date_end=base.date_end,
        fx_file=base.fx_file,
    )


class TestConfig:
    def test_unknown_metric_rejected_before_compute(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown metric"):
            PipelineConfig(
                data_dir=str(tmp_path), output_dir=str(tmp_path / "out"),
                date_start=dt.date(2014, 1, 1), date_end=dt.date(2015, 1, 1),
                metrics=("manhattan", "chebyshev"),
            )

    def test_empty_window_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="empty date window"):
            PipelineConfig(
                data_dir=str(tmp_path), output_dir=str(tmp_path / "out"),
                date_start=dt.date(2015, 1, 1), date_end=dt.date(2015, 1, 1),
            )

    def test_numeric_ranges_checked(self, tmp_path):
        kw = dict(data_dir=str(tmp_path), output_dir=str(tmp_path / "out"),
                  date_start=dt.date(2014, 1, 1), date_end=dt.date(2015, 1, 1))
        with pytest.raises(ConfigError, match="residual_p"):
            PipelineConfig(**kw, rbf=RbfSettings(residual_p=1.5))
        with pytest.raises(ConfigError, match="reg_alpha"):
            PipelineConfig(**kw, rbf=RbfSettings(reg_alpha=100.0))
        with pytest.raises(ConfigError, match="kink_window"):
            PipelineConfig(**kw, kink_window=(0.9, 0.6))
        with pytest.raises(ConfigError, match="fixed p"):
            PipelineConfig(**kw, fixed_p={"manhattan": 1.2})

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            PipelineConfig.from_dict({"data_dir": "x", "output_dir": "y",
                                      "date_window": {"start": "2014-01-01", "end": "2015-01-01"},
                                      "surprise": 1})

    def test_example_config_parses(self):
        raw = yaml.safe_load(EXAMPLE_CONFIG)
        cfg = PipelineConfig.from_dict(raw)
        assert cfg.metrics == ("manhattan", "euclidean", "sqeuclidean")
        assert cfg.effective_kink_window == (0.60, 0.90)

    def test_lower_kink_mode_window(self, tmp_path):
        cfg = PipelineConfig(
            data_dir=str(tmp_path), output_dir=str(tmp_path / "out"),
            date_start=dt.date(2014, 1, 1), date_end=dt.date(2015, 1, 1),
            kink_mode="lower",
        )
        assert cfg.effective_kink_window == (0.05, 0.40)

    def test_yaml_round_trip(self, tmp_path, planted):
        cfg = planted["config"]
        path = tmp_path / "cfg.yaml"
        path.write_text(yaml.safe_dump(cfg.to_dict()))
        loaded = PipelineConfig.from_yaml(path)
        assert loaded.to_dict() == cfg.to_dict()


class TestPipelineRun:
    def test_planted_core_recovered(self, planted_run):
        uni = planted_run["universe"]
        result = planted_run["result"]
        core = set(result.intersection_core)
        assert len(core & set(uni.core_ids)) >= 18
        assert len(core & set(uni.outsider_ids)) <= 1

    def test_exclusions_reported(self, planted_run):
        cfg = planted_run["config"]
        with open(os.path.join(cfg.output_dir, "exclusions.json")) as fh:
            exclusions = json.load(fh)
        assert {e["asset_id"] for e in exclusions} == set(planted_run["universe"].excluded_ids)
        assert all(e["reason"] == "gap_too_long" and e["gap_length"] >= 5 for e in exclusions)

    def test_sample_vectors_shape(self, planted_run):
        cfg = planted_run["config"]
        lines = open(os.path.join(cfg.output_dir, "sample_vectors.csv")).read().splitlines()
        assert len(lines) == 1 + 27 * 6  # header + assets x years

    def test_manifest_lists_everything(self, planted_run):
        cfg = planted_run["config"]
        with open(os.path.join(cfg.output_dir, "run_manifest.json")) as fh:
            manifest = json.load(fh)
        assert manifest["config"]["metrics"] == list(cfg.metrics)
        artifacts = set(manifest["artifacts"])
        on_disk = {n for n in os.listdir(cfg.output_dir) if n != "run_manifest.json"}
        assert artifacts == on_disk
        assert [s["stage"] for s in manifest["stages"]] == ["ingest", "stats", "dtw", "segment", "report"]
        assert len(manifest["inputs"]) == 30  # 29 price files + fx

    def test_report_against_golden_file(self, planted_run):
        cfg = planted_run["config"]
        got = open(os.path.join(cfg.output_dir, "report.csv")).read().splitlines()
        golden = open(os.path.join(os.path.dirname(__file__), "data", "golden_report.csv")).read().splitlines()
        assert len(got) == len(golden)
        for g_line, w_line in zip(got, golden):
            if g_line.startswith("# ") and "," in g_line and not g_line.startswith("# metric"):
                g_metric, g_thr, g_p = g_line[2:].split(",")
                w_metric, w_thr, w_p = w_line[2:].split(",")
                assert g_metric == w_metric
                assert float(g_thr) == pytest.approx(float(w_thr), abs=1e-6)
                assert float(g_p) == pytest.approx(float(w_p), abs=1e-6)
            else:
                assert g_line == w_line


class TestStageComposition:
    def test_stagewise_equals_run(self, planted):
        cfg_a = PipelineConfig(**cfg_kwargs(planted, "out_run"))
        cfg_b = PipelineConfig(**cfg_kwargs(planted, "out_staged"))
        run(cfg_a)
        for stage in (stage_ingest, stage_stats, stage_dtw, stage_segment, stage_report):
            stage(cfg_b)
        names_a = {n for n in os.listdir(cfg_a.output_dir) if n != "run_manifest.json"}
        names_b = set(os.listdir(cfg_b.output_dir))
        assert names_a == names_b
        for name in sorted(names_a):
            a = open(os.path.join(cfg_a.output_dir, name), "rb").read()
            b = open(os.path.join(cfg_b.output_dir, name), "rb").read()
            assert a == b, f"artifact {name} differs between staged and single-run execution"

    def test_rerun_is_byte_identical(self, planted):
        cfg = PipelineConfig(**cfg_kwargs(planted, "out_det"))
        run(cfg)
        snapshot = {
            n: open(os.path.join(cfg.output_dir, n), "rb").read()
            for n in os.listdir(cfg.output_dir) if n != "run_manifest.json"
        }
        run(cfg)
        for name, blob in snapshot.items():
            assert open(os.path.join(cfg.output_dir, name), "rb").read() == blob, name

    def test_manifest_config_snapshot_reruns_identically(self, planted_run):
        cfg = planted_run["config"]
        manifest = json.load(open(os.path.join(cfg.output_dir, "run_manifest.json")))
        snapshot = dict(manifest["config"])
        snapshot["output_dir"] = str(planted_run["root"] / "out_snapshot_rerun")
        cfg2 = PipelineConfig.from_dict(snapshot)
        run(cfg2)
        for name in manifest["artifacts"]:
            a = open(os.path.join(cfg.output_dir, name), "rb").read()
            b = open(os.path.join(cfg2.output_dir, name), "rb").read()
            assert a == b, f"artifact {name} differs under the manifest's config snapshot"

    def test_missing_upstream_names_prior_stage(self, planted):
        cfg = PipelineConfig(**cfg_kwargs(planted, "out_missing"))
        with pytest.raises(PipelineError, match="ingest"):
            stage_stats(cfg)
        with pytest.raises(PipelineError, match="stats"):
            stage_dtw(cfg)
        with pytest.raises(PipelineError, match="dtw"):
            stage_segment(cfg)
        with pytest.raises(PipelineError, match="segment"):
            stage_report(cfg)


class TestFixedPAndFlags:
    def test_fixed_p_overrides_kink(self, planted):
        cfg = PipelineConfig(**cfg_kwargs(planted, "out_fixedp"),
                             metrics=("sqeuclidean",),
                             fixed_p={"sqeuclidean": 0.75})
        stage_ingest(cfg)
        stage_stats(cfg)
        stage_dtw(cfg)
        cores = stage_segment(cfg)
        assert cores[0].p_used == pytest.approx(0.75)

    def test_single_metric_dtw_stage(self, planted):
        cfg = PipelineConfig(**cfg_kwargs(planted, "out_single"))
        stage_ingest(cfg)
        stage_stats(cfg)
        out = stage_dtw(cfg, only_metric="sqeuclidean")
        assert list(out) == ["sqeuclidean"]
        assert os.path.exists(os.path.join(cfg.output_dir, "distance_sqeuclidean.csv"))
        assert not os.path.exists(os.path.join(cfg.output_dir, "distance_manhattan.csv"))


class TestCli:
    def test_config_example(self, capsys):
        assert main(["config", "--example"]) == 0
        out = capsys.readouterr().out
        assert "data_dir" in out
        assert yaml.safe_load(out)["metrics"] == ["manhattan", "euclidean", "sqeuclidean"]

    def test_config_error_exit_code(self, capsys):
        rc = main(["run", "--data-dir", "x", "--output-dir", "y",
                   "--start", "2014-01-01", "--end", "2015-01-01", "--metrics", "nope"])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_flags_without_config(self, capsys):
        assert main(["run"]) == 2
        assert "--data-dir" in capsys.readouterr().err

    def test_stage_error_exit_code(self, planted, capsys):
        rc = main([
            "stats",
            "--data-dir", planted["config"].data_dir,
            "--output-dir", str(planted["root"] / "out_cli_err"),
            "--start", "2014-01-01", "--end", "2019-06-01",
        ])
        assert rc == 1
        assert "ingest" in capsys.readouterr().err

    def test_full_cli_run(self, planted, tmp_path, capsys):
        cfg = planted["config"]
        config = {
            "data_dir": cfg.data_dir,
            "fx_file": cfg.fx_file,
            "output_dir": str(tmp_path / "out_cli"),
            "date_window": {"start": "2014-01-01", "end": "2019-06-01"},
        }
        path = tmp_path / "cfg.yaml"
        path.write_text(yaml.safe_dump(config))
        rc = main(["run", "--config", str(path), "--p", "sqeuclidean=0.8"])
        assert rc == 0
        assert "core:" in capsys.readouterr().out
        report = json.load(open(tmp_path / "out_cli" / "report.json"))
        assert report["p_used"]["sqeuclidean"] == pytest.approx(0.8)
        assert os.path.exists(tmp_path / "out_cli" / "run_manifest.json")

    def test_no_standardize_flag_changes_distances(self, planted, tmp_path):
        base = planted["config"]
        args = ["--data-dir", base.data_dir, "--fx-file", base.fx_file,
                "--start", "2014-01-01", "--end", "2019-06-01"]
        out1, out2 = str(tmp_path / "z1"), str(tmp_path / "z2")
        for out, extra in [(out1, []), (out2, ["--no-standardize"])]:
            assert main(["ingest", "--output-dir", out, *args]) == 0
            assert main(["stats", "--output-dir", out, *args]) == 0
            assert main(["dtw", "--output-dir", out, "--metric", "euclidean", *args, *extra]) == 0
        d1 = open(os.path.join(out1, "distance_euclidean.csv")).read()
        d2 = open(os.path.join(out2, "distance_euclidean.csv")).read()
        assert d1 != d2
