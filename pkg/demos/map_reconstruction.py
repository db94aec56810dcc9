"""Rebuild a full steered-power map from the pair lattices and compare it
against the directly steered one, candidate by candidate.

The conventional map steers every candidate direction at every frequency
bin. Here the same map is assembled from a handful of correlation samples
per pair and a precomputed sinc weight table; the only signal-dependent
work left is tiny. The printout shows how close the rebuilt map is, and
that both maps point at the same candidate.

Run: python3 demos/map_reconstruction.py
"""

import numpy as np

from srpfast.geometry import build_spherical_grid, build_tdoa_table, circular_array
from srpfast.metrics import angular_error_deg, approximation_error_db
from srpfast.spectral import CrossSpectra
from srpfast.srp import (
    argmax_candidate,
    build_gcc_lattice,
    precompute_sinc_table,
    srp_approx,
    srp_conventional,
)

SAMPLE_RATE = 16000.0
PERIOD = 1.0 / SAMPLE_RATE
NUM_BINS = 1024

array = circular_array(6, 0.1, center=(0.0, 0.0, 0.0), speed_of_sound=340.0)
grid = build_tdoa_table(array, build_spherical_grid(step_deg=4.0))
print(f"{array.num_mics} mics, {array.num_pairs} pairs, {grid.num_candidates} candidates")

# synthesize the cross-spectra a source at one grid direction would give,
# plus a little phase noise so the map is not a perfect delta
rng = np.random.default_rng(5)
target = 1234
omega = 2.0 * np.pi * np.arange(NUM_BINS) * SAMPLE_RATE / 2048
taus = grid.tdoa_table[target]
noise = np.exp(1j * 0.25 * rng.normal(size=(array.num_pairs, NUM_BINS)))
cross = CrossSpectra(
    values=np.exp(-1j * np.outer(taus, omega)) * noise,
    bin_frequencies=omega,
    pairs=array.pairs,
    weighting="phat",
)

conventional = srp_conventional(cross, grid)
best_conv = argmax_candidate(conventional)
polar, azimuth = grid.angles_deg[best_conv]
offset_from_target = angular_error_deg(
    grid.entries[best_conv], grid.entries[target]
)
print(
    f"planted source at candidate {target} "
    f"({grid.angles_deg[target][0]:.0f}, {grid.angles_deg[target][1]:.0f}) deg"
)
print(
    f"conventional argmax: candidate {best_conv} ({polar:.0f}, {azimuth:.0f}) deg, "
    f"{offset_from_target:.1f} deg from the plant"
)
print()
print("n_aux   map error    argmax offset")
for n_aux in (0, 1, 2, 4, 8):
    lattice = build_gcc_lattice(cross, PERIOD, n_aux)
    table = precompute_sinc_table(grid, array.pairs, PERIOD, n_aux)
    approx = srp_approx(lattice, table)
    best = argmax_candidate(approx)
    offset = angular_error_deg(grid.entries[best], grid.entries[best_conv])
    err = approximation_error_db(conventional, approx)
    print(f"{n_aux:5d}   {err:7.1f} dB   {offset:.1f} deg")
