"""Deterministic acoustic scene simulation.

Shoebox-room impulse responses via the image-source method, an isotropic
(diffuse) noise field synthesized from a fixed set of far-field plane waves,
and helpers to mix them at an exact SNR.  Everything is reproducible: RIRs
are pure functions of the geometry, and all randomness flows through an
explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile
from scipy.signal import butter, fftconvolve, sosfilt

from .geometry import MicArray

__all__ = [
    "RoomSpec",
    "SceneSpec",
    "RenderedScene",
    "absorption_from_t60",
    "image_source_rir",
    "diffuse_noise",
    "mix_at_snr",
    "render_scene",
    "white_signal",
    "speechlike_signal",
    "load_source_wav",
]

#: fractional-delay kernel: Hann-windowed sinc, this many taps per side
KERNEL_HALF = 40
KERNEL_TAPS = 2 * KERNEL_HALF + 1

NOISE_KINDS = ("diffuse", "white", "none")

#: default number of plane waves in the synthetic isotropic field
DEFAULT_NOISE_DIRECTIONS = 64


def absorption_from_t60(dimensions, t60: float, speed_of_sound: float = 340.0) -> float:
    """Uniform Sabine absorption coefficient for a target reverberation time.

    ``alpha = 24 ln(10) V / (c S t60)``.  Raises if the requested time is so
    short that ``alpha`` would exceed 1 (the room cannot absorb that fast).
    """
    lx, ly, lz = (float(v) for v in dimensions)
    if min(lx, ly, lz) <= 0.0:
        raise ValueError(f"room dimensions must be positive, got {dimensions}")
    if not t60 > 0.0:
        raise ValueError(f"t60 must be positive, got {t60}")
    volume = lx * ly * lz
    surface = 2.0 * (lx * ly + lx * lz + ly * lz)
    alpha = 24.0 * math.log(10.0) * volume / (speed_of_sound * surface * t60)
    if alpha > 1.0:
        raise ValueError(
            f"t60 = {t60} s is unreachable in this room (Sabine alpha = {alpha:.3f})"
        )
    return alpha


@dataclass(frozen=True)
class RoomSpec:
    """A shoebox room with uniform or per-wall absorption.

    Exactly one of ``absorption`` (scalar, or 6 values ordered x-low, x-high,
    y-low, y-high, z-low, z-high) and ``t60`` (seconds, converted by Sabine's
    formula) must be given.

    Attributes
    ----------
    dimensions : tuple of 3 floats, meters
    reflection_order : int
        Maximum total reflection count of retained image sources; 0 keeps
        the direct path only.
    sample_rate : float
    speed_of_sound : float
    """

    dimensions: tuple[float, float, float]
    reflection_order: int
    sample_rate: float
    absorption: object = None
    t60: float | None = None
    speed_of_sound: float = 340.0

    def __post_init__(self) -> None:
        dims = tuple(float(v) for v in np.asarray(self.dimensions, dtype=float))
        if len(dims) != 3 or min(dims) <= 0.0:
            raise ValueError(f"dimensions must be 3 positive lengths, got {dims}")
        object.__setattr__(self, "dimensions", dims)
        if self.reflection_order < 0 or int(self.reflection_order) != self.reflection_order:
            raise ValueError(
                f"reflection_order must be a non-negative integer, "
                f"got {self.reflection_order}"
            )
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.speed_of_sound > 0:
            raise ValueError(
                f"speed_of_sound must be positive, got {self.speed_of_sound}"
            )
        if (self.absorption is None) == (self.t60 is None):
            raise ValueError("give exactly one of absorption and t60")
        if self.t60 is not None and not self.t60 > 0:
            raise ValueError(f"t60 must be positive, got {self.t60}")
        self.absorption_coefficients()  # fail at construction, not first use

    def absorption_coefficients(self) -> np.ndarray:
        """Per-wall absorption, shape (2, 3): row 0 low walls, row 1 high."""
        if self.t60 is not None:
            alpha = absorption_from_t60(
                self.dimensions, self.t60, self.speed_of_sound
            )
            return np.full((2, 3), alpha)
        alpha = np.asarray(self.absorption, dtype=float).ravel()
        if alpha.size == 1:
            out = np.full((2, 3), alpha[0])
        elif alpha.size == 6:
            # input order x-low, x-high, y-low, y-high, z-low, z-high
            out = alpha.reshape(3, 2).T.copy()
        else:
            raise ValueError(
                f"absorption must be a scalar or 6 values, got {alpha.size}"
            )
        if np.any(out < 0.0) or np.any(out > 1.0):
            raise ValueError("absorption coefficients must lie in [0, 1]")
        return out

    def reflection_coefficients(self) -> np.ndarray:
        """Per-wall amplitude reflection coefficients ``sqrt(1 - alpha)``."""
        return np.sqrt(1.0 - self.absorption_coefficients())

    def contains(self, point, margin: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        dims = np.asarray(self.dimensions)
        return bool(np.all(p > margin) and np.all(p < dims - margin))


def image_source_rir(
    room: RoomSpec,
    source,
    mic,
    length: int,
) -> np.ndarray:
    """Impulse response between one source and one microphone.

    Mirror images of the source are enumerated over the reflection lattice
    (positions ``(1 - 2p) * (source + 2 r L)`` per axis, ``p`` binary,
    ``r`` integer), attenuated by the wall reflection coefficients raised to
    the per-axis reflection counts and by spherical spreading ``1/(4 pi d)``,
    and placed at their fractional delays with an 81-tap Hann-windowed sinc
    kernel.  Images whose total reflection count exceeds
    ``room.reflection_order`` are dropped, as are images too distant for any
    kernel tap to land inside ``length`` samples (which provably leaves the
    result unchanged).

    Parameters
    ----------
    room : RoomSpec
    source, mic : array_like, shape (3,)
        Positions strictly inside the room locating the source and receiver;
        they must not coincide.
    length : int
        RIR length in samples.

    Returns
    -------
    ndarray, shape (length,)
    """
    src = np.asarray(source, dtype=float)
    rcv = np.asarray(mic, dtype=float)
    if src.shape != (3,) or rcv.shape != (3,):
        raise ValueError("source and mic must be 3-vectors")
    if not room.contains(src):
        raise ValueError(f"source {src.tolist()} is outside the room")
    if not room.contains(rcv):
        raise ValueError(f"mic {rcv.tolist()} is outside the room")
    if float(np.linalg.norm(src - rcv)) < 1e-9:
        raise ValueError("source and mic positions coincide")
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")

    fs = room.sample_rate
    c = room.speed_of_sound
    dims = np.asarray(room.dimensions)
    beta = room.reflection_coefficients()  # (2, 3)
    order_max = room.reflection_order

    # farthest image that can still deposit a kernel tap inside the RIR
    max_dist = c * (length + KERNEL_HALF + 1) / fs
    spans = [
        np.arange(-r_ax, r_ax + 1)
        for r_ax in (
            np.minimum(np.ceil(max_dist / (2.0 * dims)).astype(int) + 1, order_max)
        )
    ]
    r_grid = np.stack(
        np.meshgrid(*spans, indexing="ij"), axis=-1
    ).reshape(-1, 3)

    rir = np.zeros(length)
    offsets = np.arange(-KERNEL_HALF, KERNEL_HALF + 1)
    for p in itertools.product((0, 1), repeat=3):
        p_arr = np.asarray(p)
        refl_counts_low = np.abs(r_grid + p_arr[None, :])  # hits on low walls
        refl_counts_high = np.abs(r_grid)  # hits on high walls
        order = (refl_counts_low + refl_counts_high).sum(axis=1)
        keep = order <= order_max
        if not np.any(keep):
            continue
        r_keep = r_grid[keep]
        pos = (1.0 - 2.0 * p_arr)[None, :] * (
            src[None, :] + 2.0 * r_keep * dims[None, :]
        )
        dist = np.linalg.norm(pos - rcv[None, :], axis=1)
        delay = dist / c
        near = delay * fs <= length + KERNEL_HALF
        if not np.any(near):
            continue
        gains = (
            np.prod(beta[0] ** refl_counts_low[keep][near], axis=1)
            * np.prod(beta[1] ** refl_counts_high[keep][near], axis=1)
            / (4.0 * np.pi * np.maximum(dist[near], 1e-9))
        )
        frac = delay[near] * fs
        center = np.rint(frac).astype(int)
        taps = center[:, None] + offsets[None, :]
        u = taps - frac[:, None]  # tap offset in samples from the true delay
        kernel = (0.5 + 0.5 * np.cos(2.0 * np.pi * u / KERNEL_TAPS)) * np.sinc(u)
        valid = (taps >= 0) & (taps < length)
        rir += np.bincount(
            taps[valid],
            weights=(gains[:, None] * kernel)[valid],
            minlength=length,
        )
    return rir


def _spiral_directions(count: int) -> np.ndarray:
    """Nearly uniform unit vectors on the sphere (golden-spiral layout)."""
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    azim = np.pi * (3.0 - math.sqrt(5.0)) * i
    return np.stack([rho * np.cos(azim), rho * np.sin(azim), z], axis=1)


def diffuse_noise(
    num_samples: int,
    array,
    sample_rate: float,
    num_directions: int = DEFAULT_NOISE_DIRECTIONS,
    rng: np.random.Generator | None = None,
    speed_of_sound: float | None = None,
) -> np.ndarray:
    """Spatially diffuse noise: many independent far-field plane waves.

    Each of ``num_directions`` fixed directions (golden-spiral layout, so the
    set is deterministic) carries an independent white spectrum; channel
    ``m`` receives it with the plane-wave phase ``e^{-j w tau}``,
    ``tau = p_m . v / c``.  Channels are normalized to zero mean and unit
    variance, so the inter-channel correlation approaches the ideal
    ``sinc(2 f d / c)`` diffuse-field coherence as directions and samples
    grow.  With a single microphone the output is simply unit-variance noise.

    Parameters
    ----------
    num_samples : int
    array : MicArray or array_like, shape (M, 3)
    sample_rate : float
    num_directions : int
        At least 64 recommended for a faithful isotropic field.
    rng : numpy.random.Generator, optional
    speed_of_sound : float, optional
        Defaults to the array's value, or 340 for raw positions.

    Returns
    -------
    ndarray, shape (M, num_samples)
    """
    if isinstance(array, MicArray):
        positions = array.positions
        c = array.speed_of_sound if speed_of_sound is None else speed_of_sound
    else:
        positions = np.asarray(array, dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise ValueError(f"positions must be (M, 3), got {positions.shape}")
        c = 340.0 if speed_of_sound is None else speed_of_sound
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    if num_directions < 1:
        raise ValueError(f"num_directions must be >= 1, got {num_directions}")
    rng = np.random.default_rng(rng)

    nfft = 1 << max(6, int(num_samples - 1).bit_length())
    freqs = np.fft.rfftfreq(nfft, d=1.0 / sample_rate)  # Hz
    dirs = _spiral_directions(num_directions)
    taus = positions @ dirs.T / c  # (M, D)
    spectra = rng.standard_normal((num_directions, freqs.size)) + 1j * rng.standard_normal(
        (num_directions, freqs.size)
    )
    out = np.empty((positions.shape[0], num_samples))
    for m in range(positions.shape[0]):
        phases = np.exp(-2j * np.pi * np.multiply.outer(taus[m], freqs))
        channel = np.fft.irfft(np.sum(spectra * phases, axis=0), n=nfft)
        out[m] = channel[:num_samples]
    out -= out.mean(axis=1, keepdims=True)
    std = out.std(axis=1, keepdims=True)
    out /= np.where(std > 0.0, std, 1.0)
    return out


def mix_at_snr(clean, noise, snr_db: float) -> tuple[np.ndarray, float]:
    """Scale ``noise`` so the mixture hits the requested SNR exactly.

    SNR is the ratio of mic-averaged signal power to mic-averaged noise
    power.  Returns ``(clean + gain * noise, gain)``; ``snr_db = +inf``
    returns the clean signals with gain 0.
    """
    clean = np.asarray(clean, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if clean.shape != noise.shape:
        raise ValueError(f"shape mismatch: clean {clean.shape}, noise {noise.shape}")
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    if math.isinf(snr_db):
        return clean.copy(), 0.0
    p_sig = float(np.mean(clean**2))
    p_noi = float(np.mean(noise**2))
    if p_sig == 0.0:
        raise ValueError("signal power is zero; cannot set a finite SNR")
    if p_noi == 0.0:
        raise ValueError("noise power is zero; cannot set a finite SNR")
    gain = math.sqrt(p_sig / p_noi) * 10.0 ** (-snr_db / 20.0)
    return clean + gain * noise, gain


@dataclass(frozen=True)
class SceneSpec:
    """One simulated recording: a source in a room, an array, and noise.

    Attributes
    ----------
    room : RoomSpec
    array : MicArray
        All microphones must lie inside the room.
    source_position : ndarray, shape (3,)
        Strictly inside the room.
    source_signal : ndarray, shape (L,)
        Dry source samples at the room's sample rate.
    snr_db : float
        Finite, or ``+inf`` for a noise-free scene.
    noise_kind : str
        ``"diffuse"``, ``"white"``, or ``"none"`` (forces ``snr_db = +inf``).
    """

    room: RoomSpec
    array: MicArray
    source_position: np.ndarray
    source_signal: np.ndarray
    snr_db: float = math.inf
    noise_kind: str = "diffuse"

    def __post_init__(self) -> None:
        pos = np.asarray(self.source_position, dtype=float)
        if pos.shape != (3,):
            raise ValueError(f"source_position must be a 3-vector, got {pos.shape}")
        if not self.room.contains(pos):
            raise ValueError(
                f"source position {pos.tolist()} is outside the "
                f"{self.room.dimensions} room"
            )
        for m, mic in enumerate(self.array.positions):
            if not self.room.contains(mic):
                raise ValueError(
                    f"microphone {m} at {mic.tolist()} is outside the room"
                )
        sig = np.asarray(self.source_signal, dtype=float)
        if sig.ndim != 1 or sig.size == 0:
            raise ValueError("source_signal must be a non-empty 1-D array")
        if not np.all(np.isfinite(sig)):
            raise ValueError("source_signal must be finite")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"snr_db must be finite or +inf, got {self.snr_db}")
        if self.noise_kind not in NOISE_KINDS:
            raise ValueError(f"noise_kind must be one of {NOISE_KINDS}")
        object.__setattr__(self, "source_position", pos)
        object.__setattr__(self, "source_signal", sig)


@dataclass(frozen=True)
class RenderedScene:
    """Output of :func:`render_scene`."""

    signals: np.ndarray  # (M, L) mixture actually observed
    clean: np.ndarray  # (M, L) reverberant signal component
    noise: np.ndarray  # (M, L) scaled noise component (zeros when none)
    rirs: np.ndarray  # (M, rir_length)
    noise_gain: float


def default_rir_length(room: RoomSpec) -> int:
    """RIR length covering the room's reverberation tail (one t60, or 0.5 s)."""
    seconds = room.t60 if room.t60 is not None else 0.5
    return max(KERNEL_TAPS, int(round(seconds * room.sample_rate)))


def render_scene(
    scene: SceneSpec,
    rir_length: int | None = None,
    rng: np.random.Generator | None = None,
) -> RenderedScene:
    """Simulate the array recording of one scene.

    Convolves the dry source with the image-source RIR of every microphone
    (truncated to the source length), then adds noise scaled for the scene's
    SNR.  The clean component depends only on the geometry and source, never
    on the noise draw, so sweeping SNR with the same scene leaves it
    bit-identical.

    Parameters
    ----------
    scene : SceneSpec
    rir_length : int, optional
        Defaults to one reverberation time.
    rng : numpy.random.Generator, optional
        Consumed only by the noise draw.

    Returns
    -------
    RenderedScene
    """
    room = scene.room
    if rir_length is None:
        rir_length = default_rir_length(room)
    rirs = np.stack(
        [
            image_source_rir(room, scene.source_position, mic, rir_length)
            for mic in scene.array.positions
        ]
    )
    num_samples = scene.source_signal.size
    clean = fftconvolve(rirs, scene.source_signal[None, :], axes=1)[:, :num_samples]

    if scene.noise_kind == "none" or math.isinf(scene.snr_db):
        noise = np.zeros_like(clean)
        return RenderedScene(
            signals=clean.copy(), clean=clean, noise=noise, rirs=rirs, noise_gain=0.0
        )
    rng = np.random.default_rng(rng)
    if scene.noise_kind == "diffuse":
        noise = diffuse_noise(num_samples, scene.array, room.sample_rate, rng=rng)
    else:
        noise = rng.standard_normal(clean.shape)
    signals, gain = mix_at_snr(clean, noise, scene.snr_db)
    return RenderedScene(
        signals=signals, clean=clean, noise=gain * noise, rirs=rirs, noise_gain=gain
    )


def white_signal(num_samples: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit-RMS white Gaussian source signal."""
    rng = np.random.default_rng(rng)
    x = rng.standard_normal(num_samples)
    rms = float(np.sqrt(np.mean(x**2)))
    return x / rms if rms > 0 else x


def speechlike_signal(
    num_samples: int,
    sample_rate: float,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Speech-shaped test signal: band-limited noise with syllabic modulation.

    White noise band-passed to 80 Hz - 4 kHz and amplitude-modulated by a
    smooth positive envelope wandering at syllable rate (~4 Hz), normalized
    to unit RMS.  Statistically stationary enough for SRP yet non-flat like
    real speech.
    """
    rng = np.random.default_rng(rng)
    x = rng.standard_normal(num_samples)
    high = min(4000.0, 0.45 * sample_rate)
    sos = butter(4, [80.0, high], btype="bandpass", fs=sample_rate, output="sos")
    x = sosfilt(sos, x)
    # piecewise-linear envelope sampled at ~8 Hz, floored to avoid dead air
    knots = max(3, int(math.ceil(num_samples / sample_rate * 8.0)) + 1)
    env_knots = np.abs(rng.standard_normal(knots)) + 0.15
    env = np.interp(
        np.arange(num_samples),
        np.linspace(0, num_samples - 1, knots),
        env_knots,
    )
    x = x * env
    rms = float(np.sqrt(np.mean(x**2)))
    return x / rms if rms > 0 else x


def load_source_wav(path, expected_rate: float | None = None) -> tuple[np.ndarray, int]:
    """Load a mono source from a WAV file (first channel of multichannel).

    Integer PCM is scaled to [-1, 1) (16-bit by 1/32768, etc.); float data
    is taken as-is.  If ``expected_rate`` is given and the file disagrees,
    raises instead of resampling silently.

    Returns
    -------
    (signal, sample_rate)
    """
    rate, data = wavfile.read(path)
    if data.ndim == 2:
        data = data[:, 0]
    if data.dtype == np.int16:
        signal = data.astype(float) / 32768.0
    elif data.dtype == np.int32:
        signal = data.astype(float) / 2147483648.0
    elif data.dtype == np.uint8:
        signal = (data.astype(float) - 128.0) / 128.0
    else:
        signal = data.astype(float)
    if expected_rate is not None and rate != expected_rate:
        raise ValueError(
            f"{path}: sample rate {rate} Hz does not match the configured "
            f"{expected_rate} Hz (resampling is not implicit)"
        )
    return signal, int(rate)
