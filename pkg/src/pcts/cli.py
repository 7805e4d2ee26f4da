"""Command-line entry point.

Runs one experiment (one algorithm, one benchmark, many seeds) from flags,
a config file, or a named preset, and writes trace/summary/curve CSVs.
Flags override file values; PCTS_OUT_DIR overrides --out when set.
"""

from __future__ import annotations

import argparse
import sys

from .benchmarks import benchmark_names
from .harness import (
    ALGORITHMS,
    PRESETS,
    ConfigError,
    emit_outputs,
    parse_config,
    run_suite,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcts",
        description="Tree search for black-box maximization under delayed, "
        "noisy, multi-fidelity feedback.",
    )
    parser.add_argument("--config", help="config file (key = value sections, or JSON)")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named reproduction preset")
    parser.add_argument("--benchmark", choices=benchmark_names())
    parser.add_argument("--algo", choices=ALGORITHMS)
    parser.add_argument("--policy", choices=["ucb1", "ucb1-sigma", "ucbv"])
    parser.add_argument("--sigma2", type=float, help="noise variance (also fed to ucb1-sigma)")
    parser.add_argument("--b", type=float, help="range proxy for ucbv")
    parser.add_argument("--nu1", type=float)
    parser.add_argument("--rho", type=float)
    parser.add_argument("--nu-max", dest="nu_max", type=float, help="mfpoo smoothness scale")
    parser.add_argument("--rho-max", dest="rho_max", type=float, help="mfpoo grid anchor")
    parser.add_argument("--delay", help="none | const:N | geo:MEAN")
    parser.add_argument("--fidelity", choices=["on", "off"])
    parser.add_argument("--zeta0", type=float, help="fidelity bias scale")
    parser.add_argument("--budget-cost", dest="budget_cost", type=float)
    parser.add_argument("--budget-rounds", dest="budget_rounds", type=int)
    parser.add_argument("--seeds", help="e.g. '0,1,2' or '0-9'")
    parser.add_argument("--checkpoints", help="round (or cost) grid for the curve CSV")
    parser.add_argument("--out", help="output directory for CSVs")
    parser.add_argument("--jobs", type=int, help="parallel seed workers (default 1)")
    parser.add_argument("--noise", choices=["gaussian", "laplace", "uniform"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key != "config" and value is not None
    }
    try:
        spec = parse_config(args.config, overrides)
        result = run_suite(spec)
        paths = emit_outputs(spec, result)
    except ConfigError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures keep a diagnostic category too
        print(f"error[runtime]: {exc}", file=sys.stderr)
        return 1
    row = result.summary
    print(
        f"{row.algorithm} on {row.benchmark} (delay {row.delay}, {row.seeds} seeds): "
        f"max={row.max_final_value:.6g} median={row.median_final_value:.6g} "
        f"std={row.std_final_value:.3g} height~{row.median_tree_height:g} "
        f"nodes~{row.median_node_count:g}"
    )
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
