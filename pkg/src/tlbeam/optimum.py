"""Brute-force beam-design optimum for desk-scale instances.

Searches quantized beam directions (grid directions that cover at
least one vehicle; a beam covering nobody only wastes power and
interferes, so dropping it never lowers the objective), width choices,
and per-gNB beam subsets that satisfy the non-overlap constraint.
Scheduling follows the corner rule: each beam serves its best covered
vehicle for the whole step, which is optimal for the linear objective.

The joint space is visited in lexicographic order (first gNB's beam
tuple outermost) and pruned with a sound interference-free upper
bound, so the result is the exact lexicographically-first argmax over
the candidate space. Gains are common-random-number draws keyed by
beam direction, making comparisons against heuristic designs paired.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from tlbeam import _kernels
from tlbeam.constraints import (
    AssignedBeam,
    GlobalAssignment,
    beam_exclusive_rate,
    corner_assignment,
    objective_value,
)
from tlbeam.geometry import circular_distance
from tlbeam.linkbudget import CqiTable, LinkBudgetConfig
from tlbeam.links import DEFAULT_INTERFERER_RADIUS_M, StepLinks
from tlbeam.scenario import Scenario
from tlbeam.strategies import Beam, BeamConfig, DesignConfig, target_range_elevation

MAX_GNBS = 2
MAX_BEAMS = 4


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class OptimumResult:
    assignment: GlobalAssignment
    objective_bits: float
    evaluations: int

    def configs(self, scenario: Scenario) -> list:
        per_gnb: dict = {}
        for b in self.assignment.beams:
            per_gnb.setdefault(b.gnb_id, []).append(
                Beam(b.azimuth, b.elevation, b.width, b.power)
            )
        return [
            BeamConfig(g.gnb_id, tuple(per_gnb.get(g.gnb_id, ())),
                       self.assignment.time_step)
            for g in scenario.gnbs
        ]


def _candidate_atoms(scenario, links, gnb_idx, grid_step, width_choices, design):
    """(azimuth, width, elevation) candidates that cover >= 1 vehicle.

    The grid is augmented with the colocated light's approach azimuths
    (road geometry the optimizer may use like any strategy), so every
    TL design is a point of the search space.
    """
    gnb = scenario.gnbs[gnb_idx]
    elevation = target_range_elevation(gnb, scenario, design.elevation_target_m)
    directions = [float(az) for az in np.arange(0.0, 360.0, grid_step)]
    if gnb.colocated_light_id is not None and links.k in scenario.lights:
        states = scenario.lights[links.k].get(gnb.colocated_light_id, {})
        directions.extend(float(az) for az in states)
    atoms = set()
    for width in width_choices:
        half = width / 2.0
        for az in directions:
            for vi in range(links.n_veh):
                geo = links.geom[gnb_idx][vi]
                if geo.distance <= links.radius_m and \
                        circular_distance(az, geo.tx_azimuth) <= half:
                    atoms.add((az, float(width), elevation))
                    break
    return sorted(atoms)


def _feasible_subsets(atoms, n_max):
    """Non-overlapping atom-index subsets, sizes ascending then lex."""
    subsets = [()]
    for size in range(1, n_max + 1):
        for combo in itertools.combinations(range(len(atoms)), size):
            ok = True
            for a, b in itertools.combinations(combo, 2):
                az1, w1, _ = atoms[a]
                az2, w2, _ = atoms[b]
                if circular_distance(az1, az2) < (w1 + w2) / 2.0 - 1e-9:
                    ok = False
                    break
            if ok:
                subsets.append(combo)
    return subsets


def _pairings(indices):
    """All labelings of disjoint ordered (supporter, supported) pairs."""
    indices = sorted(indices)

    def rec(free):
        if not free:
            yield ((), ())
            return
        i = free[0]
        rest = free[1:]
        for comp, absr in rec(rest):  # i stays unpaired
            yield comp, absr
        for j in rest:
            others = [x for x in rest if x != j]
            for comp, absr in rec(others):
                yield ((i, j),) + comp, absr
                yield ((j, i),) + comp, absr
                yield comp, ((i, j),) + absr
                yield comp, ((j, i),) + absr

    yield from rec(indices)


def brute_force_optimum(
    scenario: Scenario,
    k: int,
    seed: int,
    lb: LinkBudgetConfig | None = None,
    cqi: CqiTable | None = None,
    direction_grid_step: float = 5.0,
    width_choices=None,
    enable_comp_abs: bool = False,
    design: DesignConfig | None = None,
    links: StepLinks | None = None,
    radius_m: float = DEFAULT_INTERFERER_RADIUS_M,
) -> OptimumResult:
    """Exhaustive beam design maximizing the one-step corner objective."""
    lb = lb or LinkBudgetConfig()
    cqi = cqi or CqiTable.load()
    design = design or DesignConfig()
    if len(scenario.gnbs) > MAX_GNBS:
        raise InstanceTooLargeError(f"{len(scenario.gnbs)} gNBs exceed the bound {MAX_GNBS}")
    for g in scenario.gnbs:
        if g.n_beams_max > MAX_BEAMS:
            raise InstanceTooLargeError(
                f"{g.gnb_id}: {g.n_beams_max} beams exceed the bound {MAX_BEAMS}"
            )
    if links is None:
        links = StepLinks(scenario, k, seed, lb, radius_m=radius_m)

    n_gnb = len(scenario.gnbs)
    atoms_per_gnb = []
    subsets_per_gnb = []
    for gi, g in enumerate(scenario.gnbs):
        widths = width_choices if width_choices else [g.max_width_deg]
        atoms = _candidate_atoms(scenario, links, gi, direction_grid_step,
                                 widths, design)
        atoms_per_gnb.append(atoms)
        subsets_per_gnb.append(_feasible_subsets(atoms, g.n_beams_max))

    if enable_comp_abs:
        return _optimize_with_pairings(
            scenario, k, seed, lb, cqi, links, atoms_per_gnb, subsets_per_gnb,
        )

    # flatten candidates for the kernel: gNB 0's atoms first, then gNB 1's
    cand_beams = []
    cand_gnb = []
    offsets = []
    for gi, atoms in enumerate(atoms_per_gnb):
        offsets.append(len(cand_beams))
        for az, w, el in atoms:
            cand_beams.append(Beam(az, el, w, 0.0))
            cand_gnb.append(gi)
    n_cand = len(cand_beams)
    n_veh = links.n_veh

    cover = np.zeros((max(n_cand, 1), max(n_veh, 1)), dtype=np.bool_)
    gain_full = np.zeros((max(n_cand, 1), max(n_veh, 1)))
    gain_int = np.zeros((max(n_cand, 1), max(n_veh, 1), max(n_gnb, 1)))
    pathloss = np.zeros((max(n_gnb, 1), max(n_veh, 1)))
    for gi in range(n_gnb):
        for vi in range(n_veh):
            pathloss[gi, vi] = links.attenuation[gi][vi]
    for ci, beam in enumerate(cand_beams):
        gi = cand_gnb[ci]
        for vi in range(n_veh):
            cover[ci, vi] = links.covers(gi, vi, beam)
            gain_full[ci, vi] = links.gain(gi, vi, beam, gi)
            for p in range(n_gnb):
                gain_int[ci, vi, p] = links.gain(gi, vi, beam, p)

    beam_gnb = np.asarray(cand_gnb if cand_gnb else [0], dtype=np.int64)
    p_tot = np.asarray([g.p_tot_w for g in scenario.gnbs], dtype=float)
    thresholds = cqi.thresholds_linear
    efficiencies = cqi.efficiencies_array
    noise = lb.noise_power_w
    bw = lb.bandwidth_hz

    def pack(subsets, offset):
        width = max(1, max((len(s) for s in subsets), default=1))
        arr = np.zeros((len(subsets), width), dtype=np.int64)
        lens = np.zeros(len(subsets), dtype=np.int64)
        for i, combo in enumerate(subsets):
            lens[i] = len(combo)
            for j, a in enumerate(combo):
                arr[i, j] = offset + a
        return arr, lens

    sets_a, lens_a = pack(subsets_per_gnb[0], offsets[0])
    if n_gnb == 2:
        sets_b, lens_b = pack(subsets_per_gnb[1], offsets[1])
    else:
        sets_b = np.zeros((1, 1), dtype=np.int64)
        lens_b = np.zeros(1, dtype=np.int64)

    def set_objective(row, length):
        return _kernels.assignment_objective(
            row, int(length), beam_gnb, cover, gain_full, gain_int, pathloss,
            p_tot, noise, thresholds, efficiencies, bw,
        )

    ub_a = np.array([set_objective(sets_a[i], lens_a[i]) for i in range(len(lens_a))])
    ub_b = np.array([set_objective(sets_b[i], lens_b[i]) for i in range(len(lens_b))])

    # warm bound from the pair of best interference-free sets
    wa = int(np.argmax(ub_a))
    wb = int(np.argmax(ub_b))
    joint = np.concatenate([sets_a[wa][: lens_a[wa]], sets_b[wb][: lens_b[wb]]])
    warm = set_objective(joint, lens_a[wa] + lens_b[wb]) if joint.size else 0.0

    bi, bj, _, evals = _kernels.joint_argmax_search(
        sets_a, lens_a, ub_a, sets_b, lens_b, ub_b, beam_gnb, cover,
        gain_full, gain_int, pathloss, p_tot, noise, thresholds,
        efficiencies, bw, float(warm),
    )
    if bi < 0:  # every pair pruned by the warm bound's own pair
        bi, bj = wa, wb

    chosen: dict = {gi: [] for gi in range(n_gnb)}
    for idx in sets_a[bi][: lens_a[bi]]:
        chosen[0].append(cand_beams[idx])
    if n_gnb == 2:
        for idx in sets_b[bj][: lens_b[bj]]:
            chosen[1].append(cand_beams[idx])

    configs = []
    for gi, g in enumerate(scenario.gnbs):
        beams = chosen[gi]
        power = g.p_tot_w / len(beams) if beams else 0.0
        configs.append(BeamConfig(
            g.gnb_id,
            tuple(Beam(b.azimuth, b.elevation, b.width, power) for b in beams),
            k,
        ))
    assignment = corner_assignment(configs, links, lb, cqi)
    objective = objective_value(assignment, scenario, k, lb, cqi, seed,
                                links=links, check=False)
    return OptimumResult(assignment, objective, int(evals) + 1)


def _optimize_with_pairings(scenario, k, seed, lb, cqi, links,
                            atoms_per_gnb, subsets_per_gnb):
    """Small-instance search including CoMP/ABS pairings (pure Python)."""
    n_joint = 1
    for subsets in subsets_per_gnb:
        n_joint *= len(subsets)
    if n_joint > 20000:
        raise InstanceTooLargeError(
            f"{n_joint} joint sets is too large for pairing enumeration"
        )
    gnb_index = {g.gnb_id: i for i, g in enumerate(scenario.gnbs)}
    best_obj = -1.0
    best = None
    evals = 0
    for joint in itertools.product(*subsets_per_gnb):
        beams = []
        for gi, combo in enumerate(joint):
            g = scenario.gnbs[gi]
            power = g.p_tot_w / len(combo) if combo else 0.0
            for a in combo:
                az, w, el = atoms_per_gnb[gi][a]
                beams.append(AssignedBeam(g.gnb_id, az, el, w, power))
        idxs = list(range(len(beams)))
        for comp_pairs, abs_pairs in _pairings(idxs):
            assignment = GlobalAssignment(k, tuple(beams),
                                          comp_pairs=comp_pairs,
                                          abs_pairs=abs_pairs)
            carrying = set(idxs)
            carrying -= {b1 for b1, _ in comp_pairs}
            carrying -= {b1 for b1, _ in abs_pairs}
            sigma = {}
            obj = 0.0
            for bi in sorted(carrying):
                best_rate, best_vid = 0.0, None
                for vi, sample in enumerate(links.vehicles):
                    gi = gnb_index[beams[bi].gnb_id]
                    if not links.covers(gi, vi, beams[bi]):
                        continue
                    rate = beam_exclusive_rate(assignment, links, bi, vi,
                                               gnb_index, lb, cqi)
                    if rate > best_rate:
                        best_rate, best_vid = rate, sample.vehicle_id
                if best_vid is not None:
                    sigma[(bi, best_vid)] = 1.0
                    obj += best_rate
            evals += 1
            obj *= scenario.step_duration_s
            if obj > best_obj:
                best_obj = obj
                best = GlobalAssignment(k, tuple(beams), sigma,
                                        comp_pairs, abs_pairs)
    return OptimumResult(best, best_obj, evals)
