"""Microphone-array geometry, candidate direction grids, and TDOA tables.

Conventions used throughout the package:

* positions are 3-D cartesian coordinates in meters,
* a far-field candidate is a unit vector pointing in the direction of
  propagation (from the source toward the array), so a source located at
  azimuth ``phi`` / polar angle ``theta`` *as seen from the array* maps to
  the entry ``-(sin t cos p, sin t sin p, cos t)``,
* the TDOA of pair ``(m, m')`` is ``delay(m) - delay(m')`` in seconds and is
  always bounded by ``pair distance / speed of sound``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MicPair",
    "MicArray",
    "CandidateGrid",
    "circular_array",
    "enumerate_pairs",
    "tdoa_nearfield",
    "tdoa_farfield",
    "build_spherical_grid",
    "build_tdoa_table",
]

#: tolerance for accepting user-supplied far-field entries as unit vectors
UNIT_NORM_TOL = 1e-12

#: numerical slack when asserting the physical TDOA bound
TDOA_BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class MicPair:
    """One unordered microphone pair ``(m, m')`` with ``m > m'``.

    Attributes
    ----------
    index_m, index_m_prime : int
        Microphone indices into the owning array, ``index_m > index_m_prime``.
    distance : float
        Euclidean distance between the two microphones, meters.
    tdoa_bound : float
        Largest physically possible |TDOA| for this pair, seconds
        (``distance / speed_of_sound``).
    """

    index_m: int
    index_m_prime: int
    distance: float
    tdoa_bound: float

    def __post_init__(self) -> None:
        if self.index_m <= self.index_m_prime:
            raise ValueError(
                f"pair indices must satisfy m > m', got ({self.index_m}, "
                f"{self.index_m_prime})"
            )
        if not (self.distance > 0.0 and math.isfinite(self.distance)):
            raise ValueError(f"pair distance must be positive, got {self.distance}")
        if not (self.tdoa_bound > 0.0 and math.isfinite(self.tdoa_bound)):
            raise ValueError(f"tdoa bound must be positive, got {self.tdoa_bound}")


class MicArray:
    """An immutable set of microphone positions plus the propagation speed.

    Parameters
    ----------
    positions : array_like, shape (M, 3)
        Microphone coordinates in meters, ``M >= 2``, pairwise distinct.
    speed_of_sound : float
        Propagation speed in m/s, default 340.

    The constructor enumerates all ``M (M - 1) / 2`` microphone pairs once in
    canonical order (lexicographic by ``(m', m)``) so every downstream table
    indexed "per pair" shares the same column ordering.
    """

    def __init__(self, positions, speed_of_sound: float = 340.0):
        pos = np.array(positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must have shape (M, 3), got {pos.shape}")
        if pos.shape[0] < 2:
            raise ValueError("an array needs at least 2 microphones")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if not (speed_of_sound > 0.0 and math.isfinite(speed_of_sound)):
            raise ValueError(f"speed of sound must be positive, got {speed_of_sound}")
        pos.setflags(write=False)
        self._positions = pos
        self._speed_of_sound = float(speed_of_sound)
        self._pairs = enumerate_pairs(pos, self._speed_of_sound)

    @property
    def positions(self) -> np.ndarray:
        """Read-only (M, 3) position array."""
        return self._positions

    @property
    def speed_of_sound(self) -> float:
        return self._speed_of_sound

    @property
    def num_mics(self) -> int:
        return self._positions.shape[0]

    @property
    def pairs(self) -> tuple[MicPair, ...]:
        """All pairs in canonical order; ``len == M (M - 1) / 2``."""
        return self._pairs

    @property
    def num_pairs(self) -> int:
        return len(self._pairs)

    @property
    def center(self) -> np.ndarray:
        return self._positions.mean(axis=0)

    @property
    def diameter(self) -> float:
        """Largest inter-microphone distance, meters."""
        return max(p.distance for p in self._pairs)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"MicArray(num_mics={self.num_mics}, "
            f"speed_of_sound={self._speed_of_sound})"
        )


def enumerate_pairs(positions, speed_of_sound: float = 340.0) -> tuple[MicPair, ...]:
    """Enumerate microphone pairs in canonical order.

    Canonical order is lexicographic in ``(m', m)`` with ``m' < m``: for M = 4
    the pairs are (1,0), (2,0), (3,0), (2,1), (3,1), (3,2) listed as
    ``(index_m, index_m_prime)``.  The first ``M - 1`` pairs therefore share
    microphone 0 as the reference, which is what steering-vector code relies
    on.

    Parameters
    ----------
    positions : array_like, shape (M, 3) or MicArray
    speed_of_sound : float
        Ignored when ``positions`` is a :class:`MicArray`.

    Returns
    -------
    tuple of MicPair
    """
    if isinstance(positions, MicArray):
        return positions.pairs
    pos = np.asarray(positions, dtype=float)
    pairs = []
    for m_prime, m in itertools.combinations(range(pos.shape[0]), 2):
        d = float(np.linalg.norm(pos[m] - pos[m_prime]))
        if d == 0.0:
            raise ValueError(f"microphones {m_prime} and {m} are coincident")
        pairs.append(
            MicPair(
                index_m=m,
                index_m_prime=m_prime,
                distance=d,
                tdoa_bound=d / speed_of_sound,
            )
        )
    return tuple(pairs)


def circular_array(
    num_mics: int,
    radius: float,
    center=(0.0, 0.0, 0.0),
    speed_of_sound: float = 340.0,
    start_angle: float = 0.0,
) -> MicArray:
    """Uniform circular array in the horizontal (z = const) plane.

    Microphone ``m`` sits at angle ``start_angle + 2 pi m / num_mics``.
    """
    if num_mics < 2:
        raise ValueError("need at least 2 microphones")
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    center = np.asarray(center, dtype=float)
    angles = start_angle + 2.0 * np.pi * np.arange(num_mics) / num_mics
    pos = np.stack(
        [
            center[0] + radius * np.cos(angles),
            center[1] + radius * np.sin(angles),
            np.full(num_mics, center[2]),
        ],
        axis=1,
    )
    return MicArray(pos, speed_of_sound=speed_of_sound)


def tdoa_nearfield(array: MicArray, pair: MicPair, point) -> float:
    """Exact TDOA of ``pair`` for a point source at ``point``.

    ``(|p_m - q| - |p_m' - q|) / c``; by the triangle inequality the result
    lies in ``[-pair.tdoa_bound, pair.tdoa_bound]``.
    """
    q = np.asarray(point, dtype=float)
    if q.shape != (3,):
        raise ValueError(f"point must have shape (3,), got {q.shape}")
    pos = array.positions
    d_m = float(np.linalg.norm(pos[pair.index_m] - q))
    d_mp = float(np.linalg.norm(pos[pair.index_m_prime] - q))
    return (d_m - d_mp) / array.speed_of_sound


def tdoa_farfield(array: MicArray, pair: MicPair, direction) -> float:
    """Plane-wave TDOA of ``pair`` for a unit propagation direction.

    ``(p_m - p_m')^T r / c`` where ``r`` points from the source toward the
    array.  ``direction`` must be unit length to within ``UNIT_NORM_TOL``.
    """
    r = np.asarray(direction, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"direction must have shape (3,), got {r.shape}")
    nrm = float(np.linalg.norm(r))
    if abs(nrm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"direction must be unit length, |r| = {nrm!r}")
    pos = array.positions
    diff = pos[pair.index_m] - pos[pair.index_m_prime]
    return float(diff @ r) / array.speed_of_sound


@dataclass(frozen=True)
class CandidateGrid:
    """A fixed set of candidate source locations or incident directions.

    Attributes
    ----------
    mode : str
        ``"far_field"`` (entries are unit propagation directions) or
        ``"near_field"`` (entries are source positions in meters).
    entries : ndarray, shape (J, 3)
    angles_deg : ndarray, shape (J, 2), optional
        ``(polar, azimuth)`` in degrees for grids built from spherical
        coordinates; ``None`` for free-form grids.
    tdoa_table : ndarray, shape (J, P), optional
        Per-candidate, per-pair TDOAs in canonical pair order, filled in by
        :func:`build_tdoa_table`.  ``None`` until populated.
    """

    mode: str
    entries: np.ndarray
    angles_deg: np.ndarray | None = None
    tdoa_table: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("far_field", "near_field"):
            raise ValueError(f"unknown grid mode {self.mode!r}")
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[1] != 3 or entries.shape[0] == 0:
            raise ValueError(f"entries must have shape (J, 3), got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("grid entries must be finite")
        if self.mode == "far_field":
            norms = np.linalg.norm(entries, axis=1)
            worst = float(np.max(np.abs(norms - 1.0)))
            if worst > UNIT_NORM_TOL:
                raise ValueError(
                    f"far-field entries must be unit vectors (worst |r|-1 = {worst:g})"
                )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.angles_deg is not None:
            ang = np.array(self.angles_deg, dtype=float)
            if ang.shape != (entries.shape[0], 2):
                raise ValueError(
                    f"angles_deg must have shape (J, 2), got {ang.shape}"
                )
            ang.setflags(write=False)
            object.__setattr__(self, "angles_deg", ang)
        if self.tdoa_table is not None:
            table = np.array(self.tdoa_table, dtype=float)
            if table.ndim != 2 or table.shape[0] != entries.shape[0]:
                raise ValueError(
                    f"tdoa_table must have shape (J, P), got {table.shape}"
                )
            table.setflags(write=False)
            object.__setattr__(self, "tdoa_table", table)

    @property
    def num_candidates(self) -> int:
        return self.entries.shape[0]

    def require_table(self) -> np.ndarray:
        if self.tdoa_table is None:
            raise ValueError("grid has no TDOA table; call build_tdoa_table first")
        return self.tdoa_table


def build_spherical_grid(
    polar_range_deg=(90.0, 180.0),
    azimuth_range_deg=(0.0, 358.0),
    step_deg: float = 2.0,
) -> CandidateGrid:
    """Far-field grid over a spherical sector, duplicates collapsed.

    Entries are ``-(sin t cos p, sin t sin p, cos t)`` for polar angles ``t``
    and azimuths ``p`` swept inclusively in ``step_deg`` increments, polar
    major.  At the poles (``sin t == 0``) every azimuth yields the same
    direction; only the first occurrence is kept.  The default ranges cover
    the lower half-space at 2 degrees and produce exactly 8101 candidates
    (46 * 180 combinations minus 179 pole duplicates).

    Returns
    -------
    CandidateGrid
        ``mode="far_field"`` with ``angles_deg`` recording the surviving
        ``(polar, azimuth)`` combination of each entry.  No TDOA table yet.
    """
    if not step_deg > 0.0:
        raise ValueError(f"step must be positive, got {step_deg}")
    t0, t1 = (float(v) for v in polar_range_deg)
    p0, p1 = (float(v) for v in azimuth_range_deg)
    if t1 < t0 or p1 < p0:
        raise ValueError("angle ranges must be increasing")
    n_t = int(math.floor((t1 - t0) / step_deg + 1e-9)) + 1
    n_p = int(math.floor((p1 - p0) / step_deg + 1e-9)) + 1
    polars = t0 + step_deg * np.arange(n_t)
    azimuths = p0 + step_deg * np.arange(n_p)

    entries = []
    angles = []
    for t in polars:
        t_rad = math.radians(t)
        sin_t = math.sin(t_rad)
        cos_t = math.cos(t_rad)
        # sin(pi) in floats is ~1.2e-16, not 0; classify poles by angle
        at_pole = (t % 180.0) == 0.0
        for p in azimuths:
            if at_pole and p != azimuths[0]:
                continue  # same direction as the first azimuth at this polar
            p_rad = math.radians(p)
            if at_pole:
                r = np.array([0.0, 0.0, -math.copysign(1.0, cos_t)])
            else:
                r = -np.array(
                    [sin_t * math.cos(p_rad), sin_t * math.sin(p_rad), cos_t]
                )
                r /= np.linalg.norm(r)  # exact unit renormalization
            entries.append(r)
            angles.append((t, p))
    return CandidateGrid(
        mode="far_field",
        entries=np.asarray(entries),
        angles_deg=np.asarray(angles),
    )


def build_tdoa_table(array: MicArray, grid: CandidateGrid) -> CandidateGrid:
    """Populate a grid with per-candidate, per-pair TDOAs.

    Column ``p`` of the table holds the TDOA of ``array.pairs[p]`` for every
    candidate; every value respects the pair's physical bound.  Returns a new
    grid (grids are immutable).
    """
    pos = array.positions
    entries = grid.entries
    c = array.speed_of_sound
    if grid.mode == "far_field":
        # (p_m - p_m')^T r / c, vectorized over candidates
        cols = [
            entries @ (pos[p.index_m] - pos[p.index_m_prime]) / c
            for p in array.pairs
        ]
        table = np.stack(cols, axis=1)
    else:
        # |p_m - q| - |p_m' - q|, via per-mic distance matrix
        dist = np.linalg.norm(entries[:, None, :] - pos[None, :, :], axis=2)
        cols = [
            (dist[:, p.index_m] - dist[:, p.index_m_prime]) / c
            for p in array.pairs
        ]
        table = np.stack(cols, axis=1)
    bounds = np.array([p.tdoa_bound for p in array.pairs])
    if np.any(np.abs(table) > bounds[None, :] + TDOA_BOUND_SLACK):
        raise AssertionError("TDOA magnitude exceeded its physical bound")
    return CandidateGrid(
        mode=grid.mode,
        entries=grid.entries,
        angles_deg=grid.angles_deg,
        tdoa_table=table,
    )
