"""Command-line front end.

Subcommands: ``run`` (one simulation cell), ``matrix`` (a batch of
cells from a JSON config), ``synth`` (write synthetic scenario files).
Exit codes: 0 success, 2 configuration error, 3 any cell failure.
"""

import argparse
import json
import sys

from tlbeam import report
from tlbeam.scenario import save_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CELL_FAILURE = 3

_RUN_DEFAULTS = {
    "synthesize": "intersection",
    "scenario": None,
    "strategy": "tl",
    "beams": 2,
    "width": 5.0,
    "seed": 0,
    "steps": 60,
    "channel": "3gpp",
    "element": "iso",
    "scheduler": "equal-share",
    "association": "strongest",
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tlbeam",
        description="mmwave beam-management simulator for vehicular networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one strategy on one scenario")
    p_run.add_argument("--config", help="JSON config; flags override its values")
    p_run.add_argument("--scenario", help="scenario descriptor (scenario.json)")
    p_run.add_argument("--synthesize", choices=["intersection", "corridor"],
                       help="synthesize a scenario instead of loading one")
    p_run.add_argument("--strategy",
                       choices=["static", "dynamic", "tl", "optimum"])
    p_run.add_argument("--beams", type=int, help="max beams per gNB")
    p_run.add_argument("--width", type=float, help="max half-power width, degrees")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--steps", type=int, help="synthetic scenario length")
    p_run.add_argument("--channel", choices=["3gpp", "nyu"])
    p_run.add_argument("--element", choices=["iso", "3gpp"])
    p_run.add_argument("--scheduler", choices=["equal-share", "max-rate"])
    p_run.add_argument("--association", choices=["strongest", "nearest"])
    p_run.add_argument("--out", required=True, help="output directory")

    p_matrix = sub.add_parser("matrix", help="run an experiment matrix")
    p_matrix.add_argument("--config", required=True, help="matrix JSON")
    p_matrix.add_argument("--out", required=True)
    p_matrix.add_argument("--workers", type=int, default=1)

    p_synth = sub.add_parser("synth", help="write synthetic scenario files")
    p_synth.add_argument("--kind", choices=["intersection", "corridor"],
                         default="intersection")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--steps", type=int, default=60)
    p_synth.add_argument("--beams", type=int, default=2)
    p_synth.add_argument("--width", type=float, default=5.0)
    p_synth.add_argument("--out", required=True)
    return parser


def _merged_run_settings(args) -> dict:
    settings = dict(_RUN_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            settings.update(json.load(fh))
    for key in _RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _cmd_run(args) -> int:
    settings = _merged_run_settings(args)
    if settings["scenario"]:
        scenario_spec = {"path": settings["scenario"]}
    else:
        scenario_spec = {
            "synthesize": settings["synthesize"],
            "n_steps": settings["steps"],
            "channel_family": settings["channel"],
            "element": settings["element"],
        }
    cell = {
        "id": f"{settings['strategy']}-n{settings['beams']}"
              f"-a{settings['width']:g}-s{settings['seed']}",
        "strategy": settings["strategy"],
        "beams": settings["beams"],
        "width": settings["width"],
        "seed": settings["seed"],
        "scheduler": settings["scheduler"],
        "association": settings["association"],
    }
    summary = report.run_cell(cell, scenario_spec, args.out)
    print(f"cell {summary['cell_id']}: "
          f"{summary['total_delivered_bits']:.4g} bits delivered, "
          f"{summary['n_served_vehicles']} vehicles served")
    return EXIT_OK


def _cmd_matrix(args) -> int:
    matrix = report.load_matrix(args.config)
    out = report.run_matrix(matrix, args.out, workers=args.workers)
    for s in out["cells"]:
        ratio = f" tl/opt={s['tl_over_optimum']:.4f}" if "tl_over_optimum" in s else ""
        print(f"cell {s['cell_id']}: {s['total_delivered_bits']:.4g} bits{ratio}")
    if out["failures"]:
        for cell_id, error in sorted(out["failures"].items()):
            print(f"cell {cell_id} FAILED: {error}", file=sys.stderr)
        return EXIT_CELL_FAILURE
    return EXIT_OK


def _cmd_synth(args) -> int:
    spec = {
        "synthesize": args.kind,
        "seed": args.seed,
        "n_steps": args.steps,
        "n_beams": args.beams,
        "max_width_deg": args.width,
    }
    scenario = report.build_scenario(spec)
    path = save_scenario(scenario, args.out)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "matrix":
            return _cmd_matrix(args)
        return _cmd_synth(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
