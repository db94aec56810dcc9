"""Short-time spectral analysis and weighted pairwise cross-spectra.

The package works on one-sided spectra: a length-``F`` frame keeps bins
``k = 0 .. F/2 - 1`` (DC included, Nyquist dropped) at angular frequencies
``w_k = 2 pi k fs / F``.  Doubling the real part downstream compensates the
dropped negative frequencies; the DC bin carries no direction information but
shifts every candidate equally, so it is retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import MicPair

__all__ = [
    "FrameSpec",
    "SpectralFrame",
    "CrossSpectra",
    "stft_analyze",
    "cross_spectrum",
    "DEFAULT_PHAT_FLOOR_REL",
]

WINDOWS = ("sqrt_hann", "rectangular")
WEIGHTINGS = ("phat", "identity")

#: adaptive PHAT floor = this factor times the RMS magnitude product of the frame
DEFAULT_PHAT_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class FrameSpec:
    """STFT framing parameters.

    Parameters
    ----------
    sample_rate : float
        Hz, positive.
    frame_length : int
        Samples per frame; must be even so the one-sided bin count is exact.
    hop_length : int, optional
        Frame advance in samples; defaults to ``frame_length // 2``.
    window : str
        ``"sqrt_hann"`` (periodic square-root Hann) or ``"rectangular"``.
    """

    sample_rate: float
    frame_length: int
    hop_length: int | None = None
    window: str = "sqrt_hann"

    def __post_init__(self) -> None:
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.frame_length < 2 or self.frame_length % 2 != 0:
            raise ValueError(
                f"frame_length must be an even integer >= 2, got {self.frame_length}"
            )
        if self.hop_length is None:
            object.__setattr__(self, "hop_length", self.frame_length // 2)
        if self.hop_length < 1:
            raise ValueError(f"hop_length must be >= 1, got {self.hop_length}")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}, got {self.window!r}")

    @property
    def num_bins(self) -> int:
        """One-sided bin count ``K = frame_length / 2`` (Nyquist dropped)."""
        return self.frame_length // 2

    @property
    def sample_period(self) -> float:
        """Critical GCC lag spacing ``T = 1 / sample_rate`` in seconds."""
        return 1.0 / self.sample_rate

    def bin_frequencies(self) -> np.ndarray:
        """Angular frequencies ``w_k = 2 pi k fs / frame_length``, shape (K,)."""
        k = np.arange(self.num_bins)
        return 2.0 * np.pi * k * self.sample_rate / self.frame_length

    def window_samples(self) -> np.ndarray:
        if self.window == "rectangular":
            return np.ones(self.frame_length)
        n = np.arange(self.frame_length)
        hann = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / self.frame_length)
        return np.sqrt(hann)

    def num_frames(self, num_samples: int) -> int:
        """Number of full frames in a signal of ``num_samples`` samples."""
        if num_samples < self.frame_length:
            raise ValueError(
                f"signal of {num_samples} samples is shorter than one frame "
                f"({self.frame_length})"
            )
        return (num_samples - self.frame_length) // self.hop_length + 1


@dataclass(frozen=True)
class SpectralFrame:
    """One-sided spectra of all channels for a single frame.

    Attributes
    ----------
    spectra : ndarray, shape (M, K), complex
    bin_frequencies : ndarray, shape (K,)
        Angular frequencies in rad/s.
    frame_index : int
    """

    spectra: np.ndarray
    bin_frequencies: np.ndarray
    frame_index: int = 0

    def __post_init__(self) -> None:
        spectra = np.asarray(self.spectra, dtype=complex)
        freqs = np.asarray(self.bin_frequencies, dtype=float)
        if spectra.ndim != 2:
            raise ValueError(f"spectra must be 2-D (M, K), got {spectra.shape}")
        if freqs.shape != (spectra.shape[1],):
            raise ValueError("bin_frequencies length must match spectra columns")
        object.__setattr__(self, "spectra", spectra)
        object.__setattr__(self, "bin_frequencies", freqs)

    @property
    def num_channels(self) -> int:
        return self.spectra.shape[0]

    @property
    def num_bins(self) -> int:
        return self.spectra.shape[1]


@dataclass(frozen=True)
class CrossSpectra:
    """Weighted pairwise cross-spectra of one frame.

    Attributes
    ----------
    values : ndarray, shape (P, K), complex
        Row ``p`` is the weighted cross-spectrum of ``pairs[p]``.
    bin_frequencies : ndarray, shape (K,)
    pairs : tuple of MicPair
        Canonical pair order of the rows.
    weighting : str
        ``"phat"`` or ``"identity"``.
    phat_floor : float
        The magnitude floor actually applied (0.0 under identity weighting).
    frame_index : int
    """

    values: np.ndarray
    bin_frequencies: np.ndarray
    pairs: tuple[MicPair, ...]
    weighting: str
    phat_floor: float = 0.0
    frame_index: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        freqs = np.asarray(self.bin_frequencies, dtype=float)
        if values.ndim != 2 or values.shape[0] != len(self.pairs):
            raise ValueError(
                f"values must have shape (P={len(self.pairs)}, K), got {values.shape}"
            )
        if freqs.shape != (values.shape[1],):
            raise ValueError("bin_frequencies length must match values columns")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"unknown weighting {self.weighting!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bin_frequencies", freqs)

    @property
    def num_pairs(self) -> int:
        return self.values.shape[0]

    @property
    def num_bins(self) -> int:
        return self.values.shape[1]


def stft_analyze(signals, spec: FrameSpec) -> list[SpectralFrame]:
    """Window, frame, and transform multichannel audio.

    Parameters
    ----------
    signals : array_like, shape (M, L) or (L,)
        Time-domain channels, all the same length ``L >= frame_length``.
    spec : FrameSpec

    Returns
    -------
    list of SpectralFrame
        ``floor((L - frame_length) / hop_length) + 1`` frames; frame ``f``
        covers samples ``[f * hop, f * hop + frame_length)``.  Trailing
        samples that do not fill a frame are dropped.
    """
    x = np.atleast_2d(np.asarray(signals, dtype=float))
    if x.ndim != 2:
        raise ValueError(f"signals must be (M, L), got {x.shape}")
    n_frames = spec.num_frames(x.shape[1])
    window = spec.window_samples()
    freqs = spec.bin_frequencies()
    frames = []
    for f in range(n_frames):
        start = f * spec.hop_length
        chunk = x[:, start : start + spec.frame_length] * window[None, :]
        spectra = np.fft.rfft(chunk, axis=1)[:, : spec.num_bins]
        frames.append(
            SpectralFrame(spectra=spectra, bin_frequencies=freqs, frame_index=f)
        )
    return frames


def cross_spectrum(
    frame: SpectralFrame,
    pairs: tuple[MicPair, ...],
    weighting: str = "phat",
    phat_floor: float | None = None,
) -> CrossSpectra:
    """Pairwise cross-spectra ``psi_p(k) = gamma * y_m(k) conj(y_m'(k))``.

    Under ``"phat"`` the weight is ``gamma = 1 / max(|y_m conj(y_m')|,
    floor)`` so every retained bin has ``|psi| <= 1``; bins whose raw product
    is exactly zero map to ``psi = 0``.  ``phat_floor=None`` picks an adaptive
    floor of ``DEFAULT_PHAT_FLOOR_REL`` times the frame's RMS magnitude
    product, which keeps the weighting scale-invariant.  ``"identity"``
    returns the raw products.

    Parameters
    ----------
    frame : SpectralFrame
    pairs : tuple of MicPair
        Pair rows to compute, canonical order expected.
    weighting : str
    phat_floor : float, optional
        Absolute magnitude floor; overrides the adaptive default.

    Returns
    -------
    CrossSpectra
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {weighting!r}")
    if not pairs:
        raise ValueError("pairs must be non-empty")
    y = frame.spectra
    m_idx = np.array([p.index_m for p in pairs])
    mp_idx = np.array([p.index_m_prime for p in pairs])
    if int(m_idx.max()) >= frame.num_channels:
        raise ValueError(
            f"pair index {int(m_idx.max())} out of range for "
            f"{frame.num_channels} channels"
        )
    raw = y[m_idx] * np.conj(y[mp_idx])
    if weighting == "identity":
        return CrossSpectra(
            values=raw,
            bin_frequencies=frame.bin_frequencies,
            pairs=tuple(pairs),
            weighting=weighting,
            phat_floor=0.0,
            frame_index=frame.frame_index,
        )
    mag = np.abs(raw)
    if phat_floor is None:
        scale = float(np.sqrt(np.mean(mag**2)))
        floor = DEFAULT_PHAT_FLOOR_REL * scale
    else:
        if not (phat_floor > 0 and math.isfinite(phat_floor)):
            raise ValueError(f"phat_floor must be positive, got {phat_floor}")
        floor = float(phat_floor)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(mag > 0.0, raw / np.maximum(mag, floor), 0.0 + 0.0j)
    return CrossSpectra(
        values=values,
        bin_frequencies=frame.bin_frequencies,
        pairs=tuple(pairs),
        weighting=weighting,
        phat_floor=floor,
        frame_index=frame.frame_index,
    )
