"""Beam-design constraint model: feasibility verdicts and the
total-rate objective.

The constraint set mirrors the optimization model: beam-count caps and
single ownership, width limits, same-gNB non-overlap, power budgets,
no power on unused beams, at-most-one CoMP/ABS pairing per beam,
unit scheduling mass per beam, and coverage-gated scheduling.
"""

import math
from dataclasses import dataclass, field

from tlbeam.geometry import circular_distance
from tlbeam.linkbudget import LinkBudgetConfig, effective_rate
from tlbeam.links import StepLinks
from tlbeam.scenario import Scenario

TOL = 1e-9


class InfeasibleAssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class AssignedBeam:
    gnb_id: str
    azimuth: float
    elevation: float
    width: float
    power: float
    active: bool = True


@dataclass(frozen=True)
class GlobalAssignment:
    """One step's beams plus scheduling fractions and pairing indicators.

    ``sigma`` maps (beam index, vehicle id) to the fraction of the step
    the beam spends on that vehicle. ``comp_pairs``/``abs_pairs`` list
    (supporter, supported) beam-index pairs; a supporting or silenced
    beam carries no traffic of its own.
    """

    time_step: int
    beams: tuple
    sigma: dict = field(default_factory=dict)
    comp_pairs: tuple = ()
    abs_pairs: tuple = ()


@dataclass(frozen=True)
class Violation:
    constraint: str
    entities: tuple
    slack: float
    message: str

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "entities": list(self.entities),
            "slack": self.slack,
            "message": self.message,
        }


@dataclass(frozen=True)
class FeasibilityVerdict:
    violations: tuple

    @property
    def feasible(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "violations": [v.to_dict() for v in self.violations],
        }


def beam_covers(beam, tx_azimuth: float) -> bool:
    """Coverage indicator: pointing error within the half-power half-width."""
    return circular_distance(beam.azimuth, tx_azimuth) <= beam.width / 2.0


def check_feasible(assignment: GlobalAssignment, scenario: Scenario,
                   k: int) -> FeasibilityVerdict:
    """Check every constraint; the verdict lists each violation with its
    identifiers and slack (how far past the bound it is)."""
    gnb_by_id = {g.gnb_id: g for g in scenario.gnbs}
    violations = []

    def add(constraint, entities, slack, message):
        violations.append(Violation(constraint, tuple(entities), slack, message))

    per_gnb: dict = {}
    for bi, b in enumerate(assignment.beams):
        if b.gnb_id not in gnb_by_id:
            add("ownership", (bi,), math.inf,
                f"beam {bi} names unknown gNB {b.gnb_id}")
            continue
        per_gnb.setdefault(b.gnb_id, []).append(bi)

    for gid, idxs in per_gnb.items():
        g = gnb_by_id[gid]
        active = [i for i in idxs if assignment.beams[i].active]
        if len(active) > g.n_beams_max:
            add("beam-count", (gid,), len(active) - g.n_beams_max,
                f"{gid}: {len(active)} active beams exceed the cap {g.n_beams_max}")
        total_power = sum(assignment.beams[i].power for i in active)
        if total_power > g.p_tot_w + TOL:
            add("power-budget", (gid,), total_power - g.p_tot_w,
                f"{gid}: power {total_power:.6g} exceeds budget {g.p_tot_w:.6g}")
        for i in idxs:
            b = assignment.beams[i]
            if b.active and b.width > g.max_width_deg + TOL:
                add("width-limit", (gid, i), b.width - g.max_width_deg,
                    f"beam {i}: width {b.width} over limit {g.max_width_deg}")
            if not b.active and b.power > TOL:
                add("unused-power", (gid, i), b.power,
                    f"beam {i}: inactive but powered ({b.power:.6g} W)")
            if b.active and b.power > g.p_tot_w + TOL:
                add("unused-power", (gid, i), b.power - g.p_tot_w,
                    f"beam {i}: power above the per-gNB budget")
        for ai in range(len(active)):
            for aj in range(ai + 1, len(active)):
                b1 = assignment.beams[active[ai]]
                b2 = assignment.beams[active[aj]]
                gap = circular_distance(b1.azimuth, b2.azimuth)
                need = (b1.width + b2.width) / 2.0
                if gap < need - TOL:
                    add("overlap", (gid, active[ai], active[aj]), need - gap,
                        f"beams {active[ai]},{active[aj]}: gap {gap:.6g} "
                        f"below {need:.6g}")

    pair_roles: dict = {}
    supporters = set()
    for kind, pairs in (("comp", assignment.comp_pairs),
                        ("abs", assignment.abs_pairs)):
        for b1, b2 in pairs:
            if b1 == b2 or not (0 <= b1 < len(assignment.beams)) \
                    or not (0 <= b2 < len(assignment.beams)):
                add("pairing", (kind, b1, b2), math.inf,
                    f"{kind} pair ({b1},{b2}) malformed")
                continue
            supporters.add(b1)
            for b in (b1, b2):
                pair_roles[b] = pair_roles.get(b, 0) + 1
    for b, count in sorted(pair_roles.items()):
        if count > 1:
            add("pairing", (b,), count - 1,
                f"beam {b} appears in {count} CoMP/ABS pairings")

    vehicles = {s.vehicle_id: s for s in scenario.vehicles_at(k)}
    gnb_pos = {g.gnb_id: g.position for g in scenario.gnbs}
    veh_h = scenario.physical.vehicle_antenna_height_m
    sched: dict = {}
    for (bi, vid), frac in sorted(assignment.sigma.items()):
        if not (0 <= bi < len(assignment.beams)):
            add("scheduling", (bi, vid), math.inf, f"sigma names unknown beam {bi}")
            continue
        if frac < -TOL or frac > 1.0 + TOL:
            add("scheduling", (bi, vid), abs(frac - 0.5) - 0.5,
                f"sigma({bi},{vid})={frac:.6g} outside [0,1]")
        if frac <= 0:
            continue
        sched[bi] = sched.get(bi, 0.0) + frac
        beam = assignment.beams[bi]
        sample = vehicles.get(vid)
        covered = False
        if sample is not None and beam.active and beam.gnb_id in gnb_pos:
            gx, gy, gz = gnb_pos[beam.gnb_id]
            tx_az = math.degrees(math.atan2(sample.y - gy, sample.x - gx)) % 360.0
            covered = beam_covers(beam, tx_az)
        if not covered:
            add("coverage", (bi, vid), frac,
                f"sigma({bi},{vid})>0 but the beam does not cover the vehicle")
    for bi, total in sorted(sched.items()):
        if total > 1.0 + TOL:
            add("unit-schedule", (bi,), total - 1.0,
                f"beam {bi}: scheduled mass {total:.6g} exceeds 1")

    return FeasibilityVerdict(tuple(violations))


def _transmitting(assignment: GlobalAssignment):
    """Indices of beams that radiate data or interference."""
    silenced = {b1 for b1, _ in assignment.abs_pairs}
    return [
        i for i, b in enumerate(assignment.beams)
        if b.active and i not in silenced
    ]


def beam_exclusive_sinr(assignment: GlobalAssignment, links: StepLinks,
                        beam_idx: int, veh_idx: int, gnb_index: dict,
                        lb: LinkBudgetConfig) -> float:
    """SINR the vehicle sees when this beam serves it alone.

    Interference comes from every other transmitting beam, with the
    vehicle pointing at the serving beam's gNB; CoMP supporters of the
    serving beam add their amplitude coherently instead.
    """
    beams = assignment.beams
    serving = beams[beam_idx]
    g_serve = gnb_index[serving.gnb_id]
    supporters = {b1 for b1, b2 in assignment.comp_pairs if b2 == beam_idx}
    signal = (
        serving.power * links.attenuation[g_serve][veh_idx]
        * links.gain(g_serve, veh_idx, serving, g_serve)
    )
    if supporters:
        # coherent in-phase addition: amplitudes add, power is the square
        sig_amp = math.sqrt(signal)
        for si in sorted(supporters):
            sb = beams[si]
            g_sup = gnb_index[sb.gnb_id]
            sig_amp += math.sqrt(
                sb.power * links.attenuation[g_sup][veh_idx]
                * links.gain(g_sup, veh_idx, sb, g_serve)
            )
        signal = sig_amp * sig_amp
    interference = 0.0
    for oi in _transmitting(assignment):
        if oi == beam_idx or oi in supporters:
            continue
        ob = beams[oi]
        g_o = gnb_index[ob.gnb_id]
        interference += (
            ob.power * links.attenuation[g_o][veh_idx]
            * links.gain(g_o, veh_idx, ob, g_serve)
        )
    return signal / (lb.noise_power_w + interference)


def beam_exclusive_rate(assignment: GlobalAssignment, links: StepLinks,
                        beam_idx: int, veh_idx: int, gnb_index: dict,
                        lb: LinkBudgetConfig, cqi) -> float:
    """Link-adapted rate the vehicle would get from this beam alone."""
    sinr = beam_exclusive_sinr(assignment, links, beam_idx, veh_idx, gnb_index, lb)
    return effective_rate(sinr, lb.bandwidth_hz, cqi)


def objective_value(assignment: GlobalAssignment, scenario: Scenario, k: int,
                    lb: LinkBudgetConfig, cqi, seed: int,
                    links: StepLinks | None = None,
                    check: bool = True) -> float:
    """Delivered data (bit) of one step: sum of sigma * rate * step time.

    Gains come from per-link counter-based streams, so evaluating two
    assignments for the same (scenario, step, seed) is a paired
    comparison.
    """
    if check:
        verdict = check_feasible(assignment, scenario, k)
        if not verdict.feasible:
            raise InfeasibleAssignmentError(
                f"{len(verdict.violations)} constraint violations; first: "
                f"{verdict.violations[0].message}"
            )
    if links is None:
        links = StepLinks(scenario, k, seed, lb)
    gnb_index = {g.gnb_id: i for i, g in enumerate(scenario.gnbs)}
    veh_local = {s.vehicle_id: i for i, s in enumerate(links.vehicles)}
    by_beam: dict = {}
    for (b, vid), frac in assignment.sigma.items():
        if frac > 0.0 and vid in veh_local:
            by_beam.setdefault(b, []).append((vid, frac))
    total_rate = 0.0
    for bi in range(len(assignment.beams)):
        for vid, frac in sorted(by_beam.get(bi, [])):
            rate = beam_exclusive_rate(
                assignment, links, bi, veh_local[vid], gnb_index, lb, cqi,
            )
            total_rate += frac * rate
    return total_rate * scenario.step_duration_s


def corner_assignment(configs, links: StepLinks, lb: LinkBudgetConfig,
                      cqi) -> GlobalAssignment:
    """Assignment with the optimizer's scheduling rule: each beam spends
    the whole step on its best covered vehicle (lexicographic vehicle
    order breaks rate ties). Used to compare strategies on the same
    accounting as the brute-force optimum."""
    beams = []
    gnb_ids = []
    for config in configs:
        for beam in config.beams:
            beams.append(AssignedBeam(config.gnb_id, beam.azimuth, beam.elevation,
                                      beam.width, beam.power))
            gnb_ids.append(config.gnb_id)
    assignment = GlobalAssignment(time_step=links.k, beams=tuple(beams))
    gnb_index = {g.gnb_id: i for i, g in enumerate(links.scenario.gnbs)}
    sigma = {}
    for bi, beam in enumerate(beams):
        gi = gnb_index[beam.gnb_id]
        best_rate = 0.0
        best_vid = None
        for vi, sample in enumerate(links.vehicles):
            if not links.covers(gi, vi, beam):
                continue
            rate = beam_exclusive_rate(assignment, links, bi, vi, gnb_index, lb, cqi)
            if rate > best_rate:
                best_rate = rate
                best_vid = sample.vehicle_id
        if best_vid is not None:
            sigma[(bi, best_vid)] = 1.0
    return GlobalAssignment(time_step=links.k, beams=tuple(beams), sigma=sigma)
