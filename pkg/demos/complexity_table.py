"""Closed-form operation counts for the default study geometry.

No audio here, just arithmetic: how many complex multiplies per frame the
direct steering needs, how few the two-stage path needs, and how the
ratio moves as auxiliary samples are added. The same numbers come out of
the instrumented counters during a real run; see complexity.json there.

Run: python3 demos/complexity_table.py
"""

from srpfast.experiment import ExperimentConfig, complexity_only

config = ExperimentConfig(n_aux_list=(0, 1, 2, 4, 8))
reports = complexity_only(config)

first = reports["0"]
print(
    f"candidates J={first['num_candidates']}, pairs P={first['num_pairs']}, "
    f"bins K={first['num_bins']}"
)
print(f"conventional: {first['mults_conventional']:,} complex mults per frame")
print()
header = f"{'n_aux':>5} {'avg/pair':>9} {'sampling':>10} {'interp':>10} {'ratio':>10} {'speedup':>8}"
print(header)
for n_aux in (0, 1, 2, 4, 8):
    rep = reports[str(n_aux)]
    print(
        f"{n_aux:5d} {rep['avg_samples_per_pair']:9.1f} "
        f"{rep['mults_sampling']:10,} {rep['mults_interpolation']:10,} "
        f"{rep['ratio_total']:10.2e} {1.0 / rep['ratio_total']:8.1f}x"
    )

print()
print("sampling cost scales with bins, interpolation with candidates;")
print("both stay a tiny fraction of steering every candidate at every bin")
