"""Per-step simulation loop: beam design, association, gain/SINR/rate
realization, scheduling, and metric accumulation.

Fully deterministic for a given seed: every draw is counter-based, so
ledgers are identical however the steps are executed.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from tlbeam.constraints import (
    AssignedBeam,
    GlobalAssignment,
    beam_exclusive_sinr,
    corner_assignment,
    objective_value,
)
from tlbeam.linkbudget import CqiTable, LinkBudgetConfig, effective_rate
from tlbeam.links import DEFAULT_INTERFERER_RADIUS_M, StepLinks
from tlbeam.optimum import brute_force_optimum
from tlbeam.scenario import Scenario
from tlbeam.strategies import (
    DesignConfig,
    dynamic_design,
    static_design,
    tl_design,
)


class Strategy(Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    TL = "tl"
    OPTIMUM = "optimum"


class Scheduler(Enum):
    EQUAL_SHARE = "equal-share"
    MAX_RATE = "max-rate"


class Association(Enum):
    STRONGEST = "strongest"
    NEAREST = "nearest"


@dataclass(frozen=True)
class RunConfig:
    strategy: Strategy
    seed: int
    scheduler: Scheduler = Scheduler.EQUAL_SHARE
    association: Association = Association.STRONGEST
    link_budget: LinkBudgetConfig = field(default_factory=LinkBudgetConfig)
    design: DesignConfig = field(default_factory=DesignConfig)
    interferer_radius_m: float = DEFAULT_INTERFERER_RADIUS_M
    optimizer_grid_deg: float = 5.0
    optimizer_width_choices: tuple | None = None
    optimizer_comp_abs: bool = False


@dataclass
class VehicleMetrics:
    presence_s: float = 0.0
    served_time_s: float = 0.0
    delivered_bits: float = 0.0


@dataclass(frozen=True)
class SampleRecord:
    time_step: int
    vehicle_id: str
    sinr_db: float
    rate_bps: float


@dataclass
class MetricsLedger:
    per_vehicle: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    total_delivered_bits: float = 0.0
    objective_bits: float = 0.0
    configs_log: list = field(default_factory=list)

    def vehicle(self, vid: str) -> VehicleMetrics:
        if vid not in self.per_vehicle:
            self.per_vehicle[vid] = VehicleMetrics()
        return self.per_vehicle[vid]


def associate(links: StepLinks, veh_idx: int, beams, gnb_index: dict,
              policy: Association):
    """Pick the serving beam for one vehicle, or None if nothing covers it.

    ``beams`` is the flat list of (global beam index, AssignedBeam).
    STRONGEST compares expected received power (attenuation x power x
    the full-alignment distribution's typical gain); NEAREST picks the
    closest gNB owning a covering beam.
    """
    covering = []
    for bi, beam in beams:
        gi = gnb_index[beam.gnb_id]
        if beam.active and links.covers(gi, veh_idx, beam):
            covering.append((bi, gi, beam))
    if not covering:
        return None
    if policy is Association.NEAREST:
        best = min(
            covering,
            key=lambda c: (links.geom[c[1]][veh_idx].distance, c[2].azimuth, c[0]),
        )
        return best[0]
    best_bi = None
    best_power = -1.0
    for bi, gi, beam in covering:
        p = links.expected_power(gi, veh_idx, beam)
        if p > best_power:
            best_power = p
            best_bi = bi
    return best_bi


def schedule(vehicle_rates: dict, policy: Scheduler) -> dict:
    """Time fractions for one beam's associated vehicles.

    Vehicles out of CQI range (rate 0, no usable MCS) are not
    scheduled. EQUAL_SHARE splits the step evenly among the rest;
    MAX_RATE gives the whole step to the highest-rate vehicle (lowest
    vehicle id on ties).
    """
    usable = {vid: r for vid, r in vehicle_rates.items() if r > 0.0}
    if not usable:
        return {}
    if policy is Scheduler.EQUAL_SHARE:
        frac = 1.0 / len(usable)
        return {vid: frac for vid in usable}
    best_vid = None
    best_rate = -1.0
    for vid in sorted(usable):
        if usable[vid] > best_rate:
            best_rate = usable[vid]
            best_vid = vid
    return {best_vid: 1.0}


def design_configs(scenario: Scenario, config: RunConfig, k: int,
                   static_cache: dict, links: StepLinks | None,
                   cqi: CqiTable):
    """Per-gNB beam configs for step k under the chosen strategy."""
    if config.strategy is Strategy.STATIC:
        if "configs" not in static_cache:
            static_cache["configs"] = [
                static_design(scenario, g, config.design) for g in scenario.gnbs
            ]
        return [c.at_step(k) for c in static_cache["configs"]]
    if config.strategy is Strategy.DYNAMIC:
        return [dynamic_design(scenario, g, k, config.design) for g in scenario.gnbs]
    if config.strategy is Strategy.TL:
        return [tl_design(scenario, g, k, config.design) for g in scenario.gnbs]
    result = brute_force_optimum(
        scenario, k, config.seed, config.link_budget, cqi,
        direction_grid_step=config.optimizer_grid_deg,
        width_choices=config.optimizer_width_choices,
        enable_comp_abs=config.optimizer_comp_abs,
        design=config.design, links=links,
        radius_m=config.interferer_radius_m,
    )
    return result.configs(scenario)


def run(scenario: Scenario, config: RunConfig,
        cqi: CqiTable | None = None) -> MetricsLedger:
    """Simulate the whole scenario and return the metrics ledger."""
    cqi = cqi or CqiTable.load()
    lb = config.link_budget
    dt = scenario.step_duration_s
    gnb_index = {g.gnb_id: i for i, g in enumerate(scenario.gnbs)}
    ledger = MetricsLedger()
    static_cache: dict = {}

    for vid in scenario.vehicle_ids:
        ledger.vehicle(vid).presence_s = scenario.presence_steps(vid) * dt

    for k in range(scenario.n_steps):
        links = StepLinks(scenario, k, config.seed, lb,
                          radius_m=config.interferer_radius_m)
        configs = design_configs(scenario, config, k, static_cache, links, cqi)
        ledger.configs_log.append(configs)

        beams = []
        for c in configs:
            for b in c.beams:
                beams.append(AssignedBeam(c.gnb_id, b.azimuth, b.elevation,
                                          b.width, b.power))
        assignment = GlobalAssignment(time_step=k, beams=tuple(beams))
        flat = list(enumerate(assignment.beams))

        # corner-rule accounting shared with the optimizer, for paired
        # strategy-versus-optimum comparisons
        ledger.objective_bits += objective_value(
            corner_assignment(configs, links, lb, cqi),
            scenario, k, lb, cqi, config.seed, links=links, check=False,
        )

        if not beams or links.n_veh == 0:
            continue

        by_beam: dict = {}
        sinr_of: dict = {}
        for vi, sample in enumerate(links.vehicles):
            bi = associate(links, vi, flat, gnb_index, config.association)
            if bi is None:
                continue
            sinr = beam_exclusive_sinr(assignment, links, bi, vi, gnb_index, lb)
            rate = effective_rate(sinr, lb.bandwidth_hz, cqi)
            by_beam.setdefault(bi, {})[sample.vehicle_id] = rate
            sinr_of[sample.vehicle_id] = sinr

        for bi in sorted(by_beam):
            fractions = schedule(by_beam[bi], config.scheduler)
            for vid in sorted(fractions):
                frac = fractions[vid]
                rate = by_beam[bi][vid]
                if frac <= 0.0 or rate <= 0.0:
                    continue
                metrics = ledger.vehicle(vid)
                metrics.delivered_bits += frac * rate * dt
                metrics.served_time_s += dt
                ledger.samples.append(SampleRecord(
                    k, vid, 10.0 * math.log10(sinr_of[vid]), rate,
                ))

    ledger.total_delivered_bits = sum(
        m.delivered_bits for m in ledger.per_vehicle.values()
    )
    return ledger
