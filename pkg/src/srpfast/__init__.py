"""Steered-response-power source localization with low-rate GCC sampling.

The conventional SRP map evaluates every microphone pair's generalized
cross-correlation at every candidate's TDOA.  Because each pair's GCC is
band-limited and its physically reachable lags span only
``+- distance / speed``, it can instead be critically sampled on a small lag
lattice and the full map reconstructed by truncated sinc interpolation, at a
small, controllable accuracy cost.  This package implements both paths with
instrumented multiplication counts, plus a reproducible room-acoustics
harness to measure the accuracy/complexity trade-off.
"""

from .geometry import (
    CandidateGrid,
    MicArray,
    MicPair,
    build_spherical_grid,
    build_tdoa_table,
    circular_array,
    enumerate_pairs,
    tdoa_farfield,
    tdoa_nearfield,
)
from .metrics import (
    ErrorSummary,
    angular_error_deg,
    approximation_error_db,
    summarize,
)
from .simulate import (
    RenderedScene,
    RoomSpec,
    SceneSpec,
    absorption_from_t60,
    diffuse_noise,
    image_source_rir,
    load_source_wav,
    mix_at_snr,
    render_scene,
    speechlike_signal,
    white_signal,
)
from .spectral import (
    CrossSpectra,
    FrameSpec,
    SpectralFrame,
    cross_spectrum,
    stft_analyze,
)
from .srp import (
    ComplexityReport,
    GccLattice,
    MultCounter,
    SincTable,
    SrpMap,
    argmax_candidate,
    build_gcc_lattice,
    complexity_report,
    gcc_at_lag,
    lattice_half_counts,
    precompute_sinc_table,
    srp_approx,
    srp_conventional,
    srp_conventional_frames,
    srp_oracle,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    load_config,
    preset_config,
    run_benchmark,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateGrid",
    "MicArray",
    "MicPair",
    "build_spherical_grid",
    "build_tdoa_table",
    "circular_array",
    "enumerate_pairs",
    "tdoa_farfield",
    "tdoa_nearfield",
    "ErrorSummary",
    "angular_error_deg",
    "approximation_error_db",
    "summarize",
    "RenderedScene",
    "RoomSpec",
    "SceneSpec",
    "absorption_from_t60",
    "diffuse_noise",
    "image_source_rir",
    "load_source_wav",
    "mix_at_snr",
    "render_scene",
    "speechlike_signal",
    "white_signal",
    "CrossSpectra",
    "FrameSpec",
    "SpectralFrame",
    "cross_spectrum",
    "stft_analyze",
    "ComplexityReport",
    "GccLattice",
    "MultCounter",
    "SincTable",
    "SrpMap",
    "argmax_candidate",
    "build_gcc_lattice",
    "complexity_report",
    "gcc_at_lag",
    "lattice_half_counts",
    "precompute_sinc_table",
    "srp_approx",
    "srp_conventional",
    "srp_conventional_frames",
    "srp_oracle",
    "ExperimentConfig",
    "ExperimentResult",
    "load_config",
    "preset_config",
    "run_benchmark",
    "run_experiment",
    "__version__",
]
