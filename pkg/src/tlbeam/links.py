"""Per-step link context: geometry, LoS draws, path loss, and gain
realizations shared by the objective evaluator and the engine.

All draws are counter-based (see :mod:`tlbeam.rng`): LoS is keyed per
(step, gNB, vehicle); the gain uniform per (step, gNB, vehicle, beam
azimuth). The same uniform maps through whichever distribution the
link's regime selects, which keeps comparisons between strategies and
beam widths paired (common random numbers).
"""

import math
from dataclasses import dataclass

from tlbeam import rng
from tlbeam.gain import (
    Alignment,
    LinkRegime,
    MisalignmentAngles,
    classify_alignment,
    default_tables,
    gain_distribution,
    gain_from_uniform,
    los_probability,
    path_loss,
)
from tlbeam.geometry import ElementType, circular_distance, relative_bearing
from tlbeam.linkbudget import LinkBudgetConfig
from tlbeam.scenario import Scenario

DEFAULT_INTERFERER_RADIUS_M = 500.0


@dataclass(frozen=True)
class LinkGeometry:
    distance: float
    tx_azimuth: float  # vehicle bearing seen from the gNB
    tx_elevation: float
    rx_azimuth: float  # gNB bearing seen from the vehicle


class StepLinks:
    """Link state for one time step of one scenario."""

    def __init__(self, scenario: Scenario, k: int, seed: int,
                 lb: LinkBudgetConfig | None = None,
                 radius_m: float = DEFAULT_INTERFERER_RADIUS_M,
                 tables=None):
        self.scenario = scenario
        self.k = k
        self.seed = seed
        self.lb = lb or LinkBudgetConfig()
        self.radius_m = radius_m
        self.tables = tables or default_tables()
        self.vehicles = scenario.vehicles_at(k)
        self.n_veh = len(self.vehicles)
        self.veh_global = [scenario.vehicle_index(s.vehicle_id) for s in self.vehicles]
        nr1, nr2 = scenario.physical.vehicle_upa
        self.nr = nr1 * nr2
        veh_h = scenario.physical.vehicle_antenna_height_m
        self.geom: list[list[LinkGeometry]] = []
        self.los: list[list[bool]] = []
        self.attenuation: list[list[float]] = []
        for gi, g in enumerate(scenario.gnbs):
            row_geom, row_los, row_att = [], [], []
            for vi, s in enumerate(self.vehicles):
                bearing = relative_bearing(g.position, (s.x, s.y, veh_h))
                d = math.hypot(s.x - g.position[0], s.y - g.position[1])
                d3 = math.sqrt(d * d + (g.position[2] - veh_h) ** 2)
                geom = LinkGeometry(d3, bearing.azimuth, bearing.elevation,
                                    bearing.reverse().azimuth)
                u = rng.link_uniform(seed, k, gi, self.veh_global[vi], rng.Purpose.LOS)
                los = u < los_probability(max(d3, 1e-9), scenario.physical.los_decay_m)
                att = path_loss(max(d3, 1.0), los, self.lb.carrier_ghz) \
                    if d3 <= radius_m else 0.0
                row_geom.append(geom)
                row_los.append(los)
                row_att.append(att)
            self.geom.append(row_geom)
            self.los.append(row_los)
            self.attenuation.append(row_att)
        self._u_cache: dict = {}
        self._gain_cache: dict = {}

    def _gain_uniform(self, gnb_idx: int, veh_idx: int, beam_azimuth: float) -> float:
        key = (gnb_idx, veh_idx, rng.direction_key(beam_azimuth))
        u = self._u_cache.get(key)
        if u is None:
            u = rng.link_uniform(self.seed, self.k, gnb_idx,
                                 self.veh_global[veh_idx], rng.Purpose.GAIN,
                                 beam_azimuth)
            self._u_cache[key] = u
        return u

    def _distribution(self, gnb_idx, veh_idx, beam, pointing_gnb_idx):
        g = self.scenario.gnbs[gnb_idx]
        geo = self.geom[gnb_idx][veh_idx]
        rx_target = self.geom[pointing_gnb_idx][veh_idx].rx_azimuth
        alignment = classify_alignment(
            beam.azimuth, beam.width, geo.tx_azimuth,
            rx_target, self.scenario.physical.vehicle_beamwidth_deg, geo.rx_azimuth,
        )
        delta1 = 0.0
        if g.upa.element_type is ElementType.SECTOR_3GPP and g.sector_centers:
            delta1 = min(circular_distance(beam.azimuth, c) for c in g.sector_centers)
        delta2 = abs(beam.elevation - geo.tx_elevation)
        return gain_distribution(
            self.scenario.channel_family, g.upa.element_type,
            LinkRegime(self.los[gnb_idx][veh_idx], alignment),
            g.upa.n_elements, self.nr,
            MisalignmentAngles(min(delta1, 60.0), delta2), self.tables,
        ), alignment

    def gain(self, gnb_idx: int, veh_idx: int, beam, pointing_gnb_idx: int) -> float:
        """Gain realization G for (beam, vehicle) while the vehicle's own
        beam points at ``pointing_gnb_idx``."""
        key = (gnb_idx, veh_idx, rng.direction_key(beam.azimuth),
               round(beam.width, 9), round(beam.elevation, 9), pointing_gnb_idx)
        got = self._gain_cache.get(key)
        if got is None:
            dist, _ = self._distribution(gnb_idx, veh_idx, beam, pointing_gnb_idx)
            u = self._gain_uniform(gnb_idx, veh_idx, beam.azimuth)
            got = gain_from_uniform(dist, u)
            self._gain_cache[key] = got
        return got

    def expected_power(self, gnb_idx: int, veh_idx: int, beam) -> float:
        """Association metric: attenuation x power x typical full-alignment
        gain (mean where finite, otherwise the median)."""
        dist, _ = self._distribution(gnb_idx, veh_idx, beam, gnb_idx)
        return self.attenuation[gnb_idx][veh_idx] * beam.power * dist.typical()

    def covers(self, gnb_idx: int, veh_idx: int, beam) -> bool:
        geo = self.geom[gnb_idx][veh_idx]
        if geo.distance > self.radius_m:
            return False
        return circular_distance(beam.azimuth, geo.tx_azimuth) <= beam.width / 2.0
