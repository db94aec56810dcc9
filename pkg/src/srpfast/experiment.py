"""Simulation harness: configs, presets, the scene pipeline, and benchmarks.

A run sweeps simulated scenes over SNRs and auxiliary-sample counts,
computing the SRP map of every frame with the requested methods, and writes
three artifacts into the output directory:

* ``results.csv``   one row per (scene, SNR, n_aux, frame, method),
* ``summary.json``  config echo, counters, and median/quartile aggregates,
* ``complexity.json``  closed-form multiply counts and ratios per n_aux.

Reproducibility: every scene derives its RNG streams from
``(seed, scene_index)`` alone, so results are bit-identical across reruns
and independent of the number of worker processes; the reverberant signal
component of a scene never depends on the SNR being swept.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .geometry import CandidateGrid, MicArray, build_spherical_grid, build_tdoa_table, circular_array
from .metrics import angular_error_deg, approximation_error_db, summarize
from .simulate import (
    RoomSpec,
    SceneSpec,
    default_rir_length,
    diffuse_noise,
    image_source_rir,
    load_source_wav,
    mix_at_snr,
    speechlike_signal,
    white_signal,
)
from .spectral import FrameSpec, cross_spectrum, stft_analyze
from .srp import (
    MultCounter,
    argmax_candidate,
    build_gcc_lattice,
    complexity_report,
    precompute_sinc_table,
    srp_conventional_frames,
    srp_oracle,
    srp_approx,
    _phase_matrix,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "preset_config",
    "load_config",
    "run_experiment",
    "run_benchmark",
    "complexity_only",
    "PRESETS",
]

logger = logging.getLogger("srpfast")

MODES = ("conventional", "approximated", "oracle")
SOURCE_KINDS = ("speechlike", "white", "wav")

CSV_COLUMNS = (
    "scene",
    "frame",
    "snr_db",
    "n_aux",
    "mode",
    "argmax_index",
    "est_polar_deg",
    "est_azimuth_deg",
    "e_local_deg",
    "e_appr_db",
    "e_argmax_diff_deg",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs, flat so it maps 1:1 onto TOML/JSON keys."""

    # array geometry (uniform circular unless mic_positions is given)
    num_mics: int = 6
    array_radius: float = 0.1
    array_center: tuple = (2.9, 3.4, 3.3)
    mic_positions: tuple | None = None
    speed_of_sound: float = 340.0
    # candidate grid
    grid_step_deg: float = 2.0
    polar_range_deg: tuple = (90.0, 180.0)
    azimuth_range_deg: tuple = (0.0, 358.0)
    # spectral analysis
    sample_rate: float = 16000.0
    frame_length: int = 2048
    hop_length: int | None = None
    window: str = "sqrt_hann"
    weighting: str = "phat"
    phat_floor: float | None = None
    # approximation sweep
    n_aux_list: tuple = (0, 1, 2, 4, 8)
    # scenes
    room_dimensions: tuple = (6.0, 7.0, 3.5)
    t60: float | None = 0.6
    absorption: float | None = None
    reflection_order: int = 60
    rir_seconds: float | None = None
    num_scenes: int = 16
    scene_seconds: float = 1.0
    source_kind: str = "speechlike"
    wav_path: str | None = None
    source_positions: tuple | None = None
    min_source_distance: float = 1.0
    wall_margin: float = 0.5
    noise_kind: str = "diffuse"
    snr_db_list: tuple = (0.0,)
    # run control
    modes: tuple = ("conventional", "approximated")
    seed: int = 0
    jobs: int = 1
    out_dir: str = "srpfast_out"

    def __post_init__(self) -> None:
        for name in (
            "array_center",
            "polar_range_deg",
            "azimuth_range_deg",
            "n_aux_list",
            "room_dimensions",
            "snr_db_list",
            "modes",
        ):
            value = getattr(self, name)
            object.__setattr__(self, name, tuple(value))
        if self.mic_positions is not None:
            object.__setattr__(
                self,
                "mic_positions",
                tuple(tuple(float(x) for x in row) for row in self.mic_positions),
            )
        if self.source_positions is not None:
            object.__setattr__(
                self,
                "source_positions",
                tuple(tuple(float(x) for x in row) for row in self.source_positions),
            )
        self._validate()

    def _validate(self) -> None:
        if not self.modes:
            raise ValueError("modes must not be empty")
        for mode in self.modes:
            if mode not in MODES:
                raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(
                f"unknown source_kind {self.source_kind!r}; choose from {SOURCE_KINDS}"
            )
        if self.source_kind == "wav" and not self.wav_path:
            raise ValueError("source_kind 'wav' requires wav_path")
        if not self.n_aux_list:
            raise ValueError("n_aux_list must not be empty")
        for n_aux in self.n_aux_list:
            if n_aux < 0 or int(n_aux) != n_aux:
                raise ValueError(f"n_aux values must be non-negative ints, got {n_aux}")
        if not self.snr_db_list:
            raise ValueError("snr_db_list must not be empty")
        if self.num_scenes < 1:
            raise ValueError(f"num_scenes must be >= 1, got {self.num_scenes}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if not self.scene_seconds > 0:
            raise ValueError(f"scene_seconds must be positive, got {self.scene_seconds}")
        if self.source_positions is not None:
            for pos in self.source_positions:
                if len(pos) != 3:
                    raise ValueError(f"source positions must be 3-vectors, got {pos}")

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(
                f"unknown config keys: {sorted(unknown)}; known keys: {sorted(known)}"
            )
        data = dict(data)
        # absorption and t60 are alternatives; giving one without the other
        # must displace the default (TOML and JSON cannot spell t60 = None)
        if data.get("absorption") is not None and "t60" not in data:
            data["t60"] = None
        return cls(**data)


PRESETS = {
    # full-size study: hexagonal 10 cm array high in a reverberant room,
    # speech-length scenes over four SNRs
    "paper": {
        "num_scenes": 256,
        "scene_seconds": 2.11,
        "t60": 0.6,
        "reflection_order": 60,
        "rir_seconds": 0.6,
        "snr_db_list": (-3.0, 0.0, 3.0, 6.0),
        "n_aux_list": (0, 1, 2, 4, 8),
        "source_kind": "speechlike",
    },
    # small run that keeps the full grid and array but trims scene count,
    # duration, and reverberation to finish in a few minutes on one core;
    # the stationary source keeps every frame informative, so per-frame
    # statistics are stable despite the short corpus
    "desk": {
        "num_scenes": 20,
        "scene_seconds": 0.53,
        "t60": 0.3,
        "reflection_order": 40,
        "rir_seconds": 0.3,
        "snr_db_list": (0.0,),
        "n_aux_list": (0, 1, 2, 4, 8),
        "source_kind": "white",
    },
}


def _layer_config(base: dict, new: dict) -> None:
    """Overlay ``new`` on ``base`` in place.

    A layer giving one of the reverberation alternatives (absorption, t60)
    replaces the other from deeper layers instead of colliding with it.
    """
    if new.get("absorption") is not None and "t60" not in new:
        base.pop("t60", None)
    if new.get("t60") is not None and "absorption" not in new:
        base.pop("absorption", None)
    base.update(new)


def preset_config(name: str, **overrides) -> ExperimentConfig:
    """A named preset with optional field overrides."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    merged = dict(PRESETS[name])
    _layer_config(merged, overrides)
    return ExperimentConfig.from_dict(merged)


def load_config(path, overrides: dict | None = None, preset: str | None = None) -> ExperimentConfig:
    """Config from a TOML or JSON file, layered over an optional preset.

    Precedence, lowest to highest: package defaults, preset, file values,
    explicit overrides (the CLI passes its flags here).
    """
    merged: dict = {}
    if preset:
        merged.update(PRESETS[preset])
    if path is not None:
        text = Path(path).read_text()
        suffix = Path(path).suffix.lower()
        if suffix == ".json":
            data = json.loads(text)
        elif suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python 3.10
                import tomli as tomllib
            data = tomllib.loads(text)
        else:
            raise ValueError(f"config must be .toml or .json, got {path}")
        if not isinstance(data, dict):
            raise ValueError(f"config root must be a table/object, got {type(data)}")
        _layer_config(merged, data)
    if overrides:
        _layer_config(merged, {k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(merged)


@dataclass
class Workspace:
    """Per-process immutable state shared by all scenes of a run."""

    config: ExperimentConfig
    array: MicArray
    grid: CandidateGrid
    room: RoomSpec
    frame_spec: FrameSpec
    sinc_tables: dict
    source_wav: np.ndarray | None
    rir_length: int
    scene_samples: int


def build_workspace(config: ExperimentConfig) -> Workspace:
    """Build the geometry, grid, framing, and interpolation tables once."""
    if config.mic_positions is not None:
        array = MicArray(config.mic_positions, speed_of_sound=config.speed_of_sound)
    else:
        array = circular_array(
            config.num_mics,
            config.array_radius,
            center=config.array_center,
            speed_of_sound=config.speed_of_sound,
        )
    grid = build_tdoa_table(
        array,
        build_spherical_grid(
            config.polar_range_deg, config.azimuth_range_deg, config.grid_step_deg
        ),
    )
    room = RoomSpec(
        dimensions=config.room_dimensions,
        reflection_order=config.reflection_order,
        sample_rate=config.sample_rate,
        absorption=config.absorption,
        t60=config.t60,
        speed_of_sound=config.speed_of_sound,
    )
    frame_spec = FrameSpec(
        sample_rate=config.sample_rate,
        frame_length=config.frame_length,
        hop_length=config.hop_length,
        window=config.window,
    )
    sinc_tables = {
        n_aux: precompute_sinc_table(
            grid, array.pairs, frame_spec.sample_period, n_aux
        )
        for n_aux in config.n_aux_list
    }
    source_wav = None
    scene_samples = int(round(config.scene_seconds * config.sample_rate))
    if config.source_kind == "wav":
        source_wav, _ = load_source_wav(config.wav_path, expected_rate=config.sample_rate)
        if source_wav.size < scene_samples:
            raise ValueError(
                f"{config.wav_path}: {source_wav.size} samples is shorter than one "
                f"scene ({scene_samples})"
            )
    if config.rir_seconds is not None:
        rir_length = int(round(config.rir_seconds * config.sample_rate))
    else:
        rir_length = default_rir_length(room)
    # sanity: a frame must fit into a scene
    frame_spec.num_frames(scene_samples)
    return Workspace(
        config=config,
        array=array,
        grid=grid,
        room=room,
        frame_spec=frame_spec,
        sinc_tables=sinc_tables,
        source_wav=source_wav,
        rir_length=rir_length,
        scene_samples=scene_samples,
    )


def _scene_source_position(ws: Workspace, index: int, rng: np.random.Generator) -> np.ndarray:
    cfg = ws.config
    if cfg.source_positions is not None:
        return np.asarray(cfg.source_positions[index % len(cfg.source_positions)], dtype=float)
    dims = np.asarray(cfg.room_dimensions)
    margin = cfg.wall_margin
    center = ws.array.center
    span = dims - 2.0 * margin
    if np.any(span <= 0):
        raise ValueError(
            f"wall_margin {margin} leaves no interior in room {cfg.room_dimensions}"
        )
    for _ in range(10000):
        pos = margin + rng.random(3) * span
        if np.linalg.norm(pos - center) >= cfg.min_source_distance:
            return pos
    raise ValueError(
        f"scene {index}: could not place a source >= {cfg.min_source_distance} m "
        f"from the array inside {cfg.room_dimensions} with margin {margin}"
    )


def _scene_source_signal(ws: Workspace, index: int, rng: np.random.Generator) -> np.ndarray:
    cfg = ws.config
    n = ws.scene_samples
    if cfg.source_kind == "white":
        return white_signal(n, rng)
    if cfg.source_kind == "speechlike":
        return speechlike_signal(n, cfg.sample_rate, rng)
    wav = ws.source_wav
    start = (index * n) % max(1, wav.size - n + 1)
    return wav[start : start + n].copy()


def _process_scene(ws: Workspace, index: int) -> tuple[list[dict], dict]:
    """All rows and counter totals of one scene across the SNR/n_aux sweep."""
    cfg = ws.config
    rng_scene = np.random.default_rng(np.random.SeedSequence([cfg.seed, index, 0]))
    position = _scene_source_position(ws, index, rng_scene)
    signal = _scene_source_signal(ws, index, rng_scene)
    try:
        scene = SceneSpec(
            room=ws.room,
            array=ws.array,
            source_position=position,
            source_signal=signal,
            snr_db=math.inf,
            noise_kind=cfg.noise_kind,
        )
    except ValueError as err:
        raise ValueError(f"scene {index}: {err}") from err

    rirs = np.stack(
        [
            image_source_rir(ws.room, scene.source_position, mic, ws.rir_length)
            for mic in ws.array.positions
        ]
    )
    clean = fftconvolve(rirs, signal[None, :], axes=1)[:, : signal.size]
    truth = ws.array.center - scene.source_position
    need_noise = cfg.noise_kind != "none" and any(
        math.isfinite(s) for s in cfg.snr_db_list
    )
    if need_noise:
        rng_noise = np.random.default_rng(np.random.SeedSequence([cfg.seed, index, 1]))
        if cfg.noise_kind == "diffuse":
            noise = diffuse_noise(
                signal.size, ws.array, cfg.sample_rate, rng=rng_noise
            )
        else:
            noise = rng_noise.standard_normal(clean.shape)
    else:
        noise = np.zeros_like(clean)

    counter_conv = MultCounter()
    counters_samp = {n_aux: MultCounter() for n_aux in cfg.n_aux_list}
    counters_int = {n_aux: MultCounter() for n_aux in cfg.n_aux_list}
    frames_processed = 0
    rows: list[dict] = []
    period = ws.frame_spec.sample_period
    angles = ws.grid.angles_deg

    for snr_db in cfg.snr_db_list:
        if cfg.noise_kind == "none" or math.isinf(snr_db):
            mixture = clean
        else:
            mixture, _ = mix_at_snr(clean, noise, snr_db)
        frames = stft_analyze(mixture, ws.frame_spec)
        crosses = [
            cross_spectrum(f, ws.array.pairs, cfg.weighting, cfg.phat_floor)
            for f in frames
        ]
        frames_processed += len(crosses)
        conv_maps = None
        if "conventional" in cfg.modes:
            conv_maps = srp_conventional_frames(crosses, ws.grid, counter=counter_conv)
        oracle_maps = None
        if "oracle" in cfg.modes:
            oracle_maps = [
                srp_oracle(cr, ws.grid) for cr in crosses
            ]
        for n_aux in cfg.n_aux_list:
            approx_maps = None
            if "approximated" in cfg.modes:
                lattices = [
                    build_gcc_lattice(cr, period, n_aux, counter=counters_samp[n_aux])
                    for cr in crosses
                ]
                approx_maps = [
                    srp_approx(lat, ws.sinc_tables[n_aux], counter=counters_int[n_aux])
                    for lat in lattices
                ]
            for f in range(len(crosses)):
                per_mode_maps = {}
                if conv_maps is not None:
                    per_mode_maps["conventional"] = conv_maps[f]
                if approx_maps is not None:
                    per_mode_maps["approximated"] = approx_maps[f]
                if oracle_maps is not None:
                    per_mode_maps["oracle"] = oracle_maps[f]
                conv_dir = None
                if conv_maps is not None:
                    conv_dir = ws.grid.entries[argmax_candidate(conv_maps[f])]
                for mode in cfg.modes:
                    srp_map = per_mode_maps[mode]
                    best = argmax_candidate(srp_map)
                    est_dir = ws.grid.entries[best]
                    row = {
                        "scene": index,
                        "frame": f,
                        "snr_db": snr_db,
                        "n_aux": n_aux,
                        "mode": mode,
                        "argmax_index": best,
                        "est_polar_deg": angles[best][0] if angles is not None else "",
                        "est_azimuth_deg": angles[best][1] if angles is not None else "",
                        "e_local_deg": angular_error_deg(est_dir, truth),
                        "e_appr_db": "",
                        "e_argmax_diff_deg": "",
                    }
                    if mode == "approximated" and conv_maps is not None:
                        row["e_appr_db"] = approximation_error_db(
                            conv_maps[f], srp_map
                        )
                        row["e_argmax_diff_deg"] = angular_error_deg(
                            est_dir, conv_dir
                        )
                    rows.append(row)
    counters = {
        "conventional_complex_mults": counter_conv.complex_mults,
        "sampling_complex_mults": {
            str(k): v.complex_mults for k, v in counters_samp.items()
        },
        "interpolation_real_mults": {
            str(k): v.real_mults for k, v in counters_int.items()
        },
        "frames_processed": frames_processed,
    }
    return rows, counters


def _merge_counters(total: dict, part: dict) -> dict:
    if not total:
        return json.loads(json.dumps(part))  # deep copy of plain data
    total["conventional_complex_mults"] += part["conventional_complex_mults"]
    total["frames_processed"] += part["frames_processed"]
    for key in ("sampling_complex_mults", "interpolation_real_mults"):
        for naux, value in part[key].items():
            total[key][naux] += value
    return total


# module-level state for worker processes (built once per worker)
_WORKER_WS: Workspace | None = None


def _worker_init(config_dict: dict) -> None:
    global _WORKER_WS
    _WORKER_WS = build_workspace(ExperimentConfig.from_dict(config_dict))


def _worker_scene(index: int) -> tuple[list[dict], dict]:
    assert _WORKER_WS is not None
    return _process_scene(_WORKER_WS, index)


@dataclass(frozen=True)
class ExperimentResult:
    out_dir: Path
    csv_path: Path
    summary_path: Path
    complexity_path: Path
    summary: dict


def _aggregate(rows: list[dict], config: ExperimentConfig) -> list[dict]:
    """Median/quartile blocks per (snr, n_aux) straight from the row list."""
    blocks = []
    for snr_db in config.snr_db_list:
        for n_aux in config.n_aux_list:
            selected = [
                r for r in rows if r["snr_db"] == snr_db and r["n_aux"] == n_aux
            ]
            block: dict = {"snr_db": snr_db, "n_aux": n_aux}
            for mode in config.modes:
                sample = [
                    r["e_local_deg"] for r in selected if r["mode"] == mode
                ]
                block[f"e_local_{mode}"] = (
                    summarize(sample).as_dict() if sample else None
                )
            e_appr = [
                r["e_appr_db"]
                for r in selected
                if r["mode"] == "approximated" and r["e_appr_db"] != ""
            ]
            block["e_appr_db"] = summarize(e_appr).as_dict() if e_appr else None
            e_diff = [
                r["e_argmax_diff_deg"]
                for r in selected
                if r["mode"] == "approximated" and r["e_argmax_diff_deg"] != ""
            ]
            block["e_argmax_diff_deg"] = (
                summarize(e_diff).as_dict() if e_diff else None
            )
            block["argmax_match_fraction"] = (
                float(np.mean([d == 0.0 for d in e_diff])) if e_diff else None
            )
            blocks.append(block)
    return blocks


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the full sweep described by ``config`` and write the artifacts.

    Scenes are processed in index order (optionally across worker
    processes); rows land in deterministic order regardless of ``jobs``.
    """
    started = time.perf_counter()
    ws = build_workspace(config)
    logger.info(
        "run: %d scenes x %d SNRs x %d n_aux, grid J=%d, pairs P=%d, bins K=%d",
        config.num_scenes,
        len(config.snr_db_list),
        len(config.n_aux_list),
        ws.grid.num_candidates,
        ws.array.num_pairs,
        ws.frame_spec.num_bins,
    )
    all_rows: list[dict] = []
    counters: dict = {}
    if config.jobs == 1:
        for index in range(config.num_scenes):
            rows, part = _process_scene(ws, index)
            all_rows.extend(rows)
            counters = _merge_counters(counters, part)
            logger.info("scene %d/%d done", index + 1, config.num_scenes)
    else:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=config.jobs,
            initializer=_worker_init,
            initargs=(config.to_dict(),),
        ) as pool:
            for index, (rows, part) in enumerate(
                pool.map(_worker_scene, range(config.num_scenes))
            ):
                all_rows.extend(rows)
                counters = _merge_counters(counters, part)
                logger.info("scene %d/%d done", index + 1, config.num_scenes)

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in all_rows:
            writer.writerow(
                [_format_cell(row[col]) for col in CSV_COLUMNS]
            )

    reports = {
        str(n_aux): complexity_report(
            ws.grid.num_candidates,
            ws.frame_spec.num_bins,
            ws.array.pairs,
            ws.frame_spec.sample_period,
            n_aux,
            measured_conventional=counters["conventional_complex_mults"] or None,
            measured_sampling=counters["sampling_complex_mults"][str(n_aux)] or None,
            measured_interpolation=counters["interpolation_real_mults"][str(n_aux)]
            or None,
            measured_frames=counters["frames_processed"],
        ).as_dict()
        for n_aux in config.n_aux_list
    }
    complexity_path = out_dir / "complexity.json"
    with open(complexity_path, "w") as fh:
        json.dump(reports, fh, indent=2, sort_keys=True)
        fh.write("\n")

    summary = {
        "config": config.to_dict(),
        "runtime_seconds": time.perf_counter() - started,
        "num_rows": len(all_rows),
        "counters": counters,
        "metrics": _aggregate(all_rows, config),
    }
    summary_path = out_dir / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote %s, %s, %s", csv_path, summary_path, complexity_path)
    return ExperimentResult(
        out_dir=out_dir,
        csv_path=csv_path,
        summary_path=summary_path,
        complexity_path=complexity_path,
        summary=summary,
    )


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def complexity_only(config: ExperimentConfig) -> dict:
    """Closed-form complexity of the configured geometry, no simulation."""
    ws = build_workspace_geometry(config)
    return {
        str(n_aux): complexity_report(
            ws["num_candidates"],
            ws["num_bins"],
            ws["pairs"],
            ws["sample_period"],
            n_aux,
        ).as_dict()
        for n_aux in config.n_aux_list
    }


def build_workspace_geometry(config: ExperimentConfig) -> dict:
    """Geometry-only subset of the workspace (no room, tables, or audio)."""
    if config.mic_positions is not None:
        array = MicArray(config.mic_positions, speed_of_sound=config.speed_of_sound)
    else:
        array = circular_array(
            config.num_mics,
            config.array_radius,
            center=config.array_center,
            speed_of_sound=config.speed_of_sound,
        )
    grid = build_spherical_grid(
        config.polar_range_deg, config.azimuth_range_deg, config.grid_step_deg
    )
    frame_spec = FrameSpec(
        sample_rate=config.sample_rate,
        frame_length=config.frame_length,
        hop_length=config.hop_length,
        window=config.window,
    )
    return {
        "array": array,
        "pairs": array.pairs,
        "num_candidates": grid.num_candidates,
        "num_bins": frame_spec.num_bins,
        "sample_period": frame_spec.sample_period,
    }


def run_benchmark(
    config: ExperimentConfig,
    num_frames: int = 8,
    repeats: int = 3,
) -> dict:
    """Wall-clock comparison of the two paths on synthetic cross-spectra.

    Only signal-dependent work is timed: the conventional steering product,
    the lattice sampling product, and the interpolation product.  Steering
    phases, lattice phases, and sinc tables are signal-independent
    precomputation, excluded for both paths alike (mirroring how the
    multiplication counts are defined).  The best of ``repeats`` passes is
    reported to damp scheduler noise.
    """
    ws = build_workspace(replace(config, source_kind="white"))
    grid_table = ws.grid.require_table()
    omega = ws.frame_spec.bin_frequencies()
    n_pairs = ws.array.num_pairs
    n_bins = ws.frame_spec.num_bins
    n_cand = ws.grid.num_candidates
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xBE]))
    psi = np.exp(
        2j * np.pi * rng.random((n_pairs, n_bins, num_frames))
    )  # unit-modulus cross-spectra, PHAT-like

    period = ws.frame_spec.sample_period
    best_conv = math.inf
    for _ in range(repeats):
        total = 0.0
        acc = np.zeros((n_cand, num_frames))
        for p in range(n_pairs):
            phases = _phase_matrix(grid_table[:, p], omega)  # untimed precompute
            t0 = time.perf_counter()
            acc += 2.0 * (phases @ psi[p]).real
            total += time.perf_counter() - t0
        best_conv = min(best_conv, total)

    per_n_aux = {}
    for n_aux in config.n_aux_list:
        table = ws.sinc_tables[n_aux]
        lattice_phases = []
        for p in range(n_pairs):
            offsets = np.arange(
                -(table.half_counts[p] + n_aux), table.half_counts[p] + n_aux + 1
            )
            lattice_phases.append(
                np.exp(1j * np.multiply.outer(offsets * period, omega))
            )
        best_samp = math.inf
        best_int = math.inf
        for _ in range(repeats):
            t_samp = 0.0
            t_int = 0.0
            acc = np.zeros((n_cand, num_frames))
            for p in range(n_pairs):
                t0 = time.perf_counter()
                xi = 2.0 * (lattice_phases[p] @ psi[p]).real
                t_samp += time.perf_counter() - t0
                t0 = time.perf_counter()
                acc += table.weights[p] @ xi
                t_int += time.perf_counter() - t0
            best_samp = min(best_samp, t_samp)
            best_int = min(best_int, t_int)
        report = complexity_report(
            n_cand, n_bins, ws.array.pairs, period, n_aux
        )
        approx_total = best_samp + best_int
        per_n_aux[str(n_aux)] = {
            "t_sampling_per_frame": best_samp / num_frames,
            "t_interpolation_per_frame": best_int / num_frames,
            "t_approx_per_frame": approx_total / num_frames,
            "speedup_vs_conventional": best_conv / approx_total,
            "theoretical_cost_ratio": report.ratio_total,
            "theoretical_speedup": 1.0 / report.ratio_total,
        }
    return {
        "num_frames": num_frames,
        "num_candidates": n_cand,
        "num_pairs": n_pairs,
        "num_bins": n_bins,
        "t_conventional_per_frame": best_conv / num_frames,
        "per_n_aux": per_n_aux,
    }
