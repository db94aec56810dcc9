"""Command-line front end for runs, benchmarks, and complexity reports.

Configuration precedence, lowest to highest: package defaults, ``--preset``,
``--config`` file (TOML or JSON), individual flags.  The ``SRP_FAST_LOG``
environment variable (DEBUG/INFO/WARNING/ERROR) controls progress logging.
Exit status is 0 on success, 1 on any configuration or runtime error,
2 on unparsable arguments (argparse convention).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .experiment import (
    PRESETS,
    complexity_only,
    load_config,
    run_benchmark,
    run_experiment,
)

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srpfast",
        description=(
            "Steered-response-power localization runs: simulate scenes, "
            "compare the exact SRP map against its low-rate approximation, "
            "and report accuracy and complexity."
        ),
    )
    parser.add_argument("--config", metavar="PATH", help="TOML or JSON config file")
    parser.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="named base configuration to start from",
    )
    parser.add_argument(
        "--modes",
        metavar="LIST",
        help="comma-separated subset of conventional,approximated,oracle",
    )
    parser.add_argument(
        "--naux",
        metavar="LIST",
        help="comma-separated auxiliary sample counts, e.g. 0,2,4",
    )
    parser.add_argument(
        "--snr", metavar="LIST", help="comma-separated SNRs in dB, e.g. -3,0,3"
    )
    parser.add_argument("--jobs", type=int, metavar="N", help="worker processes")
    parser.add_argument("--seed", type=int, metavar="N", help="master RNG seed")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument(
        "--benchmark",
        action="store_true",
        help="time both paths on synthetic spectra instead of simulating",
    )
    parser.add_argument(
        "--complexity-only",
        action="store_true",
        help="report closed-form multiply counts and exit",
    )
    return parser


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in text.split(",") if v.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in text.split(",") if v.strip())


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level_name = os.environ.get("SRP_FAST_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        overrides: dict = {}
        if args.modes:
            overrides["modes"] = tuple(s.strip() for s in args.modes.split(","))
        if args.naux:
            overrides["n_aux_list"] = _int_list(args.naux)
        if args.snr:
            overrides["snr_db_list"] = _float_list(args.snr)
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out:
            overrides["out_dir"] = args.out
        config = load_config(args.config, overrides=overrides, preset=args.preset)

        if args.complexity_only:
            reports = complexity_only(config)
            path = Path(config.out_dir) / "complexity.json"
            _write_json(path, reports)
            any_report = next(iter(reports.values()))
            print(
                f"J={any_report['num_candidates']} P={any_report['num_pairs']} "
                f"K={any_report['num_bins']} "
                f"conventional={any_report['mults_conventional']}"
            )
            for n_aux in sorted(reports, key=int):
                r = reports[n_aux]
                print(
                    f"n_aux={n_aux}: sampling={r['mults_sampling']} "
                    f"interpolation={r['mults_interpolation']} "
                    f"avg_samples={r['avg_samples_per_pair']:.3f} "
                    f"cost_ratio={r['ratio_total']:.4e}"
                )
            print(f"wrote {path}")
            return 0

        if args.benchmark:
            report = run_benchmark(config)
            path = Path(config.out_dir) / "benchmark.json"
            _write_json(path, report)
            print(
                f"conventional: {report['t_conventional_per_frame'] * 1e3:.2f} ms/frame "
                f"(J={report['num_candidates']}, P={report['num_pairs']}, "
                f"K={report['num_bins']})"
            )
            for n_aux, r in sorted(report["per_n_aux"].items(), key=lambda kv: int(kv[0])):
                print(
                    f"n_aux={n_aux}: approx {r['t_approx_per_frame'] * 1e3:.2f} ms/frame, "
                    f"speedup {r['speedup_vs_conventional']:.1f}x "
                    f"(theoretical {r['theoretical_speedup']:.1f}x)"
                )
            print(f"wrote {path}")
            return 0

        result = run_experiment(config)
        for block in result.summary["metrics"]:
            parts = [f"snr={block['snr_db']:g} n_aux={block['n_aux']}:"]
            if block.get("e_appr_db"):
                parts.append(f"median e_appr {block['e_appr_db']['median']:.1f} dB,")
            for mode in ("conventional", "approximated", "oracle"):
                stats = block.get(f"e_local_{mode}")
                if stats:
                    parts.append(f"e_local[{mode}] {stats['median']:.2f} deg,")
            if block.get("e_argmax_diff_deg") is not None:
                parts.append(
                    f"argmax diff {block['e_argmax_diff_deg']['median']:.2f} deg"
                )
            print(" ".join(parts).rstrip(","))
        print(
            f"wrote {result.csv_path}, {result.summary_path}, "
            f"{result.complexity_path}"
        )
        return 0
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
