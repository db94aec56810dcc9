"""Configuration handling, the sweep harness, its artifacts, and the CLI."""

import csv
import json
import math

import numpy as np
import pytest
from scipy.io import wavfile

from srpfast import cli
from srpfast.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    build_workspace,
    complexity_only,
    load_config,
    preset_config,
    run_benchmark,
    run_experiment,
)

# deliberately tiny: 4 mics, coarse grid, 0.1 s scenes, 5 frames each
TINY = dict(
    num_mics=4,
    array_radius=0.08,
    array_center=(2.0, 2.5, 1.5),
    grid_step_deg=15.0,
    frame_length=512,
    scene_seconds=0.1,
    room_dimensions=(4.0, 5.0, 3.0),
    t60=None,
    absorption=0.5,
    reflection_order=6,
    rir_seconds=0.05,
    num_scenes=2,
    source_kind="white",
    noise_kind="diffuse",
    snr_db_list=(5.0,),
    n_aux_list=(0, 2),
    seed=3,
)


def tiny_config(tmp_path, **overrides):
    merged = dict(TINY, out_dir=str(tmp_path / "out"))
    merged.update(overrides)
    return ExperimentConfig(**merged)


class TestConfig:
    def test_roundtrip(self):
        cfg = ExperimentConfig(**TINY)
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="num_scnes"):
            ExperimentConfig.from_dict({"num_scnes": 4})
        with pytest.raises(ValueError):
            preset_config("desk", not_a_field=1)
        with pytest.raises(ValueError, match="preset"):
            preset_config("coffee_table")

    def test_field_validation(self):
        with pytest.raises(ValueError, match="mode"):
            ExperimentConfig(modes=("conventional", "fast"))
        with pytest.raises(ValueError, match="source_kind"):
            ExperimentConfig(source_kind="chirp")
        with pytest.raises(ValueError, match="wav_path"):
            ExperimentConfig(source_kind="wav")
        with pytest.raises(ValueError, match="n_aux"):
            ExperimentConfig(n_aux_list=(0, -1))
        with pytest.raises(ValueError, match="n_aux"):
            ExperimentConfig(n_aux_list=())
        with pytest.raises(ValueError, match="jobs"):
            ExperimentConfig(jobs=0)

    def test_presets_exist(self):
        paper = preset_config("paper")
        assert paper.num_scenes == 256
        assert paper.snr_db_list == (-3.0, 0.0, 3.0, 6.0)
        desk = preset_config("desk", num_scenes=3)
        assert desk.num_scenes == 3
        assert desk.t60 == 0.3

    def test_load_toml_json_equivalent(self, tmp_path):
        toml_path = tmp_path / "c.toml"
        toml_path.write_text(
            'num_scenes = 4\nsource_kind = "white"\nsnr_db_list = [0.0, 5.0]\n'
        )
        json_path = tmp_path / "c.json"
        json_path.write_text(
            json.dumps(
                {"num_scenes": 4, "source_kind": "white", "snr_db_list": [0.0, 5.0]}
            )
        )
        assert load_config(toml_path) == load_config(json_path)

    def test_layering_precedence(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("num_scenes = 7\nscene_seconds = 0.4\n")
        cfg = load_config(path, overrides={"num_scenes": 2}, preset="desk")
        assert cfg.num_scenes == 2  # override beats file
        assert cfg.scene_seconds == 0.4  # file beats preset (0.53)
        assert cfg.t60 == 0.3  # preset beats default (0.6)

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("num_scenes: 4\n")
        with pytest.raises(ValueError, match="toml"):
            load_config(path)


class TestRunExperiment:
    def test_artifacts_and_row_count(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        assert result.csv_path.exists()
        assert result.summary_path.exists()
        assert result.complexity_path.exists()

        with open(result.csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        ws = build_workspace(cfg)
        frames = ws.frame_spec.num_frames(ws.scene_samples)
        assert frames == 5
        expected = cfg.num_scenes * 1 * len(cfg.n_aux_list) * frames * 2
        assert len(rows) == expected
        assert list(rows[0].keys()) == list(CSV_COLUMNS)

        for row in rows:
            if row["mode"] == "conventional":
                assert row["e_appr_db"] == ""
                assert row["e_argmax_diff_deg"] == ""
            else:
                assert float(row["e_appr_db"]) < 0.0
                assert float(row["e_argmax_diff_deg"]) >= 0.0
            assert 0.0 <= float(row["e_local_deg"]) <= 180.0

    def test_counters_match_closed_form(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        with open(result.complexity_path) as fh:
            reports = json.load(fh)
        assert set(reports) == {"0", "2"}
        for rep in reports.values():
            frames = rep["measured_frames"]
            assert frames == 10  # 2 scenes x 1 SNR x 5 frames
            assert rep["measured_conventional"] == rep["mults_conventional"] * frames
            assert rep["measured_sampling"] == rep["mults_sampling"] * frames
            assert (
                rep["measured_interpolation"] == rep["mults_interpolation"] * frames
            )

    def test_deterministic_across_runs(self, tmp_path):
        a = run_experiment(tiny_config(tmp_path / "a"))
        b = run_experiment(tiny_config(tmp_path / "b"))
        assert a.csv_path.read_bytes() == b.csv_path.read_bytes()

    def test_workers_do_not_change_results(self, tmp_path):
        serial = run_experiment(tiny_config(tmp_path / "s", jobs=1))
        parallel = run_experiment(tiny_config(tmp_path / "p", jobs=2))
        assert serial.csv_path.read_bytes() == parallel.csv_path.read_bytes()

    def test_summary_metrics_blocks(self, tmp_path):
        result = run_experiment(tiny_config(tmp_path))
        metrics = result.summary["metrics"]
        # one block per (snr, n_aux) pair
        assert len(metrics) == 2
        for block in metrics:
            assert block["snr_db"] == 5.0
            assert block["n_aux"] in (0, 2)
            assert block["e_appr_db"]["count"] == 10
            assert 0.0 <= block["argmax_match_fraction"] <= 1.0

    def test_scene_failure_names_the_scene(self, tmp_path):
        cfg = tiny_config(tmp_path, source_positions=((9.0, 9.0, 9.0),))
        with pytest.raises(ValueError, match="scene 0"):
            run_experiment(cfg)

    def test_fixed_source_positions_cycle(self, tmp_path):
        pos = ((1.0, 1.2, 1.1), (3.1, 3.9, 2.0))
        cfg = tiny_config(tmp_path, source_positions=pos, num_scenes=2)
        ws = build_workspace(cfg)
        from srpfast.experiment import _scene_source_position

        rng = np.random.default_rng(0)
        np.testing.assert_allclose(_scene_source_position(ws, 0, rng), pos[0])
        np.testing.assert_allclose(_scene_source_position(ws, 1, rng), pos[1])

    def test_wav_source(self, tmp_path):
        rng = np.random.default_rng(12)
        data = (rng.uniform(-0.4, 0.4, 4000) * 32768.0).astype(np.int16)
        wav = tmp_path / "src.wav"
        wavfile.write(wav, 16000, data)
        cfg = tiny_config(
            tmp_path, source_kind="wav", wav_path=str(wav), num_scenes=1
        )
        result = run_experiment(cfg)
        assert result.summary["num_rows"] == 20

        bad = tmp_path / "bad.wav"
        wavfile.write(bad, 8000, data)
        with pytest.raises(ValueError, match="rate"):
            build_workspace(
                tiny_config(tmp_path / "x", source_kind="wav", wav_path=str(bad))
            )

    def test_complexity_only_needs_no_audio(self, tmp_path):
        cfg = tiny_config(tmp_path)
        reports = complexity_only(cfg)
        assert set(reports) == {"0", "2"}
        rep = reports["2"]
        assert rep["mults_conventional"] == (
            rep["num_candidates"] * rep["num_pairs"] * rep["num_bins"]
        )
        assert "measured_conventional" not in rep or rep["measured_conventional"] is None


class TestBenchmark:
    def test_structure(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_benchmark(cfg, num_frames=2, repeats=1)
        assert result["num_frames"] == 2
        assert result["t_conventional_per_frame"] > 0.0
        assert set(result["per_n_aux"]) == {"0", "2"}
        entry = result["per_n_aux"]["2"]
        for key in (
            "t_sampling_per_frame",
            "t_interpolation_per_frame",
            "t_approx_per_frame",
            "speedup_vs_conventional",
            "theoretical_cost_ratio",
            "theoretical_speedup",
        ):
            assert key in entry
        assert entry["theoretical_speedup"] == pytest.approx(
            1.0 / entry["theoretical_cost_ratio"]
        )


class TestCli:
    def write_tiny_toml(self, tmp_path):
        path = tmp_path / "tiny.toml"
        lines = []
        for key, value in TINY.items():
            if value is None:
                continue
            if isinstance(value, str):
                lines.append(f'{key} = "{value}"')
            elif isinstance(value, tuple):
                lines.append(f"{key} = {list(value)}")
            else:
                lines.append(f"{key} = {value}")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_run_exit_zero_and_artifacts(self, tmp_path, capsys):
        toml = self.write_tiny_toml(tmp_path)
        out = tmp_path / "cli_out"
        code = cli.main(["--config", str(toml), "--out", str(out)])
        assert code == 0
        assert (out / "results.csv").exists()
        assert (out / "summary.json").exists()
        assert (out / "complexity.json").exists()
        stdout = capsys.readouterr().out
        assert "results.csv" in stdout

    def test_flag_overrides(self, tmp_path):
        toml = self.write_tiny_toml(tmp_path)
        out = tmp_path / "cli_out2"
        code = cli.main(
            [
                "--config",
                str(toml),
                "--out",
                str(out),
                "--naux",
                "0",
                "--snr",
                "1,4",
                "--modes",
                "conventional",
            ]
        )
        assert code == 0
        with open(out / "results.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert {row["mode"] for row in rows} == {"conventional"}
        assert {row["snr_db"] for row in rows} == {"1", "4"}
        assert {row["n_aux"] for row in rows} == {"0"}

    def test_complexity_only_prints_counts(self, tmp_path, capsys):
        toml = self.write_tiny_toml(tmp_path)
        out = tmp_path / "cx"
        code = cli.main(
            ["--config", str(toml), "--out", str(out), "--complexity-only"]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "J=" in stdout and "conventional=" in stdout
        assert (out / "complexity.json").exists()

    def test_bad_config_path_fails_cleanly(self, tmp_path, capsys):
        code = cli.main(["--config", str(tmp_path / "missing.toml")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_flag_value_fails_cleanly(self, tmp_path, capsys):
        toml = self.write_tiny_toml(tmp_path)
        code = cli.main(["--config", str(toml), "--naux", "-3"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_preset_is_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--preset", "gigantic"])
        assert exc.value.code == 2
