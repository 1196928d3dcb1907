"""Experiment cells, matrices, and plot-ready outputs.

A cell is one (strategy, beam count, width, seed, scenario) run; a
matrix is a batch of cells plus a comparison table with the
TL-versus-optimum ratio where both are present. All outputs are
deterministic byte-for-byte for equal seeds: floats are written with
repr, JSON keys are sorted, and nothing time- or host-dependent is
emitted.
"""

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from tlbeam.engine import (
    Association,
    RunConfig,
    Scheduler,
    Strategy,
    run,
)
from tlbeam.gain import ChannelFamily
from tlbeam.geometry import ElementType
from tlbeam.linkbudget import CqiTable, LinkBudgetConfig
from tlbeam.scenario import (
    Scenario,
    load_scenario,
    synthesize_corridor,
    synthesize_intersection,
)
from tlbeam.strategies import serialize_config

MATRIX_FORMAT = "tlbeam-matrix"


@dataclass(frozen=True)
class CdfTable:
    values: tuple
    fractions: tuple
    mean: float


def emit_cdf(samples, n_points: int | None = None) -> CdfTable:
    """Empirical CDF on sorted sample quantiles, with the sample mean.

    ``n_points`` defaults to one point per sample; fractions are
    (i+1)/n_points and each value is the matching sorted-sample
    quantile, so the table is monotone non-decreasing by construction.
    """
    data = sorted(float(x) for x in samples)
    if not data:
        raise ValueError("emit_cdf needs at least one sample")
    n = len(data)
    points = n if n_points is None else int(n_points)
    if points < 1:
        raise ValueError("n_points must be >= 1")
    values = []
    fractions = []
    for i in range(points):
        frac = (i + 1) / points
        idx = min(n - 1, math.ceil(frac * n) - 1)
        values.append(data[idx])
        fractions.append(frac)
    return CdfTable(tuple(values), tuple(fractions), sum(data) / n)


def write_cdf_csv(path: str, table: CdfTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# mean {table.mean!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value", "cumulative_fraction"])
        for v, f in zip(table.values, table.fractions):
            writer.writerow([repr(v), repr(f)])


# --- cells -------------------------------------------------------------------


def build_scenario(spec: dict) -> Scenario:
    """Scenario from a cell/matrix spec: a file path or synthesis recipe."""
    spec = dict(spec)
    if "path" in spec:
        return load_scenario(spec["path"])
    kind = spec.pop("synthesize", "intersection")
    spec.setdefault("channel_family", ChannelFamily.MODEL_3GPP)
    spec.setdefault("element", ElementType.ISO)
    if isinstance(spec["channel_family"], str):
        spec["channel_family"] = ChannelFamily(spec["channel_family"])
    if isinstance(spec["element"], str):
        spec["element"] = ElementType(spec["element"])
    if kind == "intersection":
        return synthesize_intersection(**spec)
    if kind == "corridor":
        return synthesize_corridor(**spec)
    raise ValueError(f"unknown synthesize kind {kind!r}")


def cell_scenario_spec(cell: dict, scenario_spec: dict) -> dict:
    """Scenario spec for one cell: beams/width/seed flow into synthesis."""
    spec = dict(scenario_spec)
    if "path" not in spec:
        spec["n_beams"] = cell["beams"]
        spec["max_width_deg"] = cell["width"]
        spec["seed"] = cell["seed"]
    return spec


def run_cell(cell: dict, scenario_spec: dict, out_dir: str) -> dict:
    """Run one cell, write its outputs, and return its summary row."""
    scenario = build_scenario(cell_scenario_spec(cell, scenario_spec))
    config = RunConfig(
        strategy=Strategy(cell["strategy"]),
        seed=cell["seed"],
        scheduler=Scheduler(cell.get("scheduler", "equal-share")),
        association=Association(cell.get("association", "strongest")),
        link_budget=LinkBudgetConfig(),
        optimizer_grid_deg=cell.get("optimizer_grid_deg", 5.0),
    )
    cqi = CqiTable.load()
    ledger = run(scenario, config, cqi)

    cell_dir = os.path.join(out_dir, cell["id"])
    os.makedirs(cell_dir, exist_ok=True)

    with open(os.path.join(cell_dir, "per_vehicle.csv"), "w", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vehicle_id", "presence_s", "served_time_s", "delivered_bits"])
        for vid in sorted(ledger.per_vehicle):
            m = ledger.per_vehicle[vid]
            writer.writerow([vid, repr(m.presence_s), repr(m.served_time_s),
                             repr(m.delivered_bits)])

    with open(os.path.join(cell_dir, "samples.csv"), "w", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_step", "vehicle_id", "sinr_db", "rate_bps"])
        for s in ledger.samples:
            writer.writerow([s.time_step, s.vehicle_id, repr(s.sinr_db),
                             repr(s.rate_bps)])

    with open(os.path.join(cell_dir, "beam_configs.jsonl"), "w", encoding="utf-8") as fh:
        for configs in ledger.configs_log:
            for c in configs:
                fh.write(json.dumps(serialize_config(c), sort_keys=True))
                fh.write("\n")

    served = [m for m in ledger.per_vehicle.values() if m.served_time_s > 0]
    cdf_specs = {
        "cdf_sinr_db.csv": [s.sinr_db for s in ledger.samples],
        "cdf_rate_bps.csv": [s.rate_bps for s in ledger.samples],
        "cdf_served_time_s.csv": [m.served_time_s for m in served],
        "cdf_vehicle_delivered_bits.csv": [m.delivered_bits for m in served],
    }
    for name, data in cdf_specs.items():
        if data:
            write_cdf_csv(os.path.join(cell_dir, name), emit_cdf(data))

    summary = {
        "cell_id": cell["id"],
        "strategy": cell["strategy"],
        "beams": cell["beams"],
        "width_deg": cell["width"],
        "seed": cell["seed"],
        "scheduler": config.scheduler.value,
        "total_delivered_bits": ledger.total_delivered_bits,
        "objective_bits": ledger.objective_bits,
        "n_vehicles": len(ledger.per_vehicle),
        "n_served_vehicles": len(served),
        "mean_served_time_s": (
            sum(m.served_time_s for m in served) / len(served) if served else 0.0
        ),
        "mean_sinr_db": (
            sum(s.sinr_db for s in ledger.samples) / len(ledger.samples)
            if ledger.samples else 0.0
        ),
        "mean_rate_bps": (
            sum(s.rate_bps for s in ledger.samples) / len(ledger.samples)
            if ledger.samples else 0.0
        ),
    }
    with open(os.path.join(cell_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _cell_worker(args):
    cell, scenario_spec, out_dir = args
    try:
        return cell["id"], run_cell(cell, scenario_spec, out_dir), None
    except Exception as exc:  # isolate per-cell failures
        return cell["id"], None, f"{type(exc).__name__}: {exc}"


def load_matrix(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        matrix = json.load(fh)
    if matrix.get("format") != MATRIX_FORMAT:
        raise ValueError(f"{path}: not a {MATRIX_FORMAT} config")
    cells = matrix.get("cells", [])
    if not cells:
        raise ValueError("matrix has no cells")
    ids = [c.get("id") for c in cells]
    if len(set(ids)) != len(ids) or None in ids:
        raise ValueError("cell ids must be present and unique")
    for c in cells:
        for key in ("strategy", "beams", "width", "seed"):
            if key not in c:
                raise ValueError(f"cell {c['id']}: missing {key}")
    return matrix


def run_matrix(matrix: dict, out_dir: str, workers: int = 1) -> dict:
    """Run every cell (optionally in parallel), then write the comparison
    table and matrix summary. Failed cells are reported, not fatal."""
    os.makedirs(out_dir, exist_ok=True)
    scenario_spec = matrix.get("scenario", {"synthesize": "intersection"})
    cells = matrix["cells"]
    jobs = [(cell, scenario_spec, out_dir) for cell in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_worker, jobs))
    else:
        results = [_cell_worker(j) for j in jobs]

    summaries = {}
    failures = {}
    for cell_id, summary, error in results:
        if error is None:
            summaries[cell_id] = summary
        else:
            failures[cell_id] = error

    # Table-VI-style ratio: TL objective over optimum objective for
    # matching (beams, width, seed) cells, under the same accounting.
    by_key = {}
    for s in summaries.values():
        by_key.setdefault((s["strategy"], s["beams"], s["width_deg"], s["seed"]), s)
    for s in summaries.values():
        if s["strategy"] == "tl":
            opt = by_key.get(("optimum", s["beams"], s["width_deg"], s["seed"]))
            if opt and opt["objective_bits"] > 0:
                s["tl_over_optimum"] = s["objective_bits"] / opt["objective_bits"]

    with open(os.path.join(out_dir, "comparison.csv"), "w", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([
            "cell_id", "strategy", "beams", "width_deg", "seed",
            "total_delivered_bits", "objective_bits", "n_served_vehicles",
            "mean_served_time_s", "tl_over_optimum",
        ])
        for cell in cells:
            s = summaries.get(cell["id"])
            if s is None:
                continue
            writer.writerow([
                s["cell_id"], s["strategy"], s["beams"], repr(s["width_deg"]),
                s["seed"], repr(s["total_delivered_bits"]),
                repr(s["objective_bits"]), s["n_served_vehicles"],
                repr(s["mean_served_time_s"]),
                repr(s["tl_over_optimum"]) if "tl_over_optimum" in s else "",
            ])

    out = {
        "cells": [summaries[c["id"]] for c in cells if c["id"] in summaries],
        "failures": failures,
    }
    with open(os.path.join(out_dir, "matrix_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
