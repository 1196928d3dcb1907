"""Beam-design strategies: static clustering, dynamic clustering, and
the traffic-light (TL) scheme.

The clustering strategies pool vehicle bearings (all steps for static,
the current step for dynamic), cluster them with a diameter cap equal
to the maximum half-power width, and point one beam at each of the
largest clusters. TL needs no mobility data at all: beams point at the
approaches whose light is red, then yellow, then green.
"""

import logging
import math
from dataclasses import dataclass

from tlbeam.cluster import cluster_direction, complete_linkage_cluster
from tlbeam.geometry import circular_distance, relative_bearing
from tlbeam.scenario import GnbSite, LightState, Scenario

log = logging.getLogger(__name__)

POWER_TOL = 1e-9


@dataclass(frozen=True)
class Beam:
    azimuth: float
    elevation: float
    width: float
    power: float


@dataclass(frozen=True)
class BeamConfig:
    """Active beams of one gNB; time_step None means time-invariant."""

    gnb_id: str
    beams: tuple
    time_step: int | None = None

    def validate(self, gnb: GnbSite) -> None:
        if len(self.beams) > gnb.n_beams_max:
            raise ValueError(f"{self.gnb_id}: {len(self.beams)} beams exceed the cap")
        total = sum(b.power for b in self.beams)
        if total > gnb.p_tot_w + POWER_TOL:
            raise ValueError(f"{self.gnb_id}: power {total} exceeds budget")
        for b in self.beams:
            if b.width > gnb.max_width_deg + 1e-12:
                raise ValueError(f"{self.gnb_id}: width {b.width} over the limit")
        for i, b1 in enumerate(self.beams):
            for b2 in self.beams[i + 1:]:
                gap = circular_distance(b1.azimuth, b2.azimuth)
                if gap < (b1.width + b2.width) / 2.0 - 1e-9:
                    raise ValueError(
                        f"{self.gnb_id}: beams at {b1.azimuth} and {b2.azimuth} overlap"
                    )

    def at_step(self, k: int) -> "BeamConfig":
        return BeamConfig(self.gnb_id, self.beams, k)


@dataclass(frozen=True)
class AngularObservation:
    azimuth: float
    elevation: float
    distance: float
    weight: int = 1

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("weight must be >= 1")


@dataclass(frozen=True)
class DesignConfig:
    """Shared strategy knobs.

    ``elevation_mode`` "target-range" points every beam's elevation at
    a fixed ground range from the mast (keeping it independent of the
    observed traffic, which the TL scheme requires anyway);
    "far-half" points clustering-based beams at the 75th-percentile
    member distance instead.
    """

    observation_radius_m: float = 200.0
    elevation_target_m: float = 40.0
    elevation_mode: str = "target-range"

    def __post_init__(self):
        if self.elevation_mode not in ("target-range", "far-half"):
            raise ValueError(f"unknown elevation_mode {self.elevation_mode!r}")


def target_range_elevation(gnb: GnbSite, scenario: Scenario,
                           ground_range: float | None = None) -> float:
    """Beam elevation aiming at vehicle-antenna height at a ground range."""
    cfg_range = ground_range if ground_range is not None else 40.0
    drop = scenario.physical.vehicle_antenna_height_m - gnb.position[2]
    return math.degrees(math.atan2(drop, cfg_range))


def observations_for(scenario: Scenario, gnb: GnbSite, steps,
                     radius_m: float = 200.0) -> list:
    """Vehicle bearings from a gNB over the given steps, range-limited."""
    out = []
    gx, gy, gz = gnb.position
    veh_h = scenario.physical.vehicle_antenna_height_m
    for k in steps:
        for s in scenario.vehicles_at(k):
            d = math.hypot(s.x - gx, s.y - gy)
            if d == 0.0 or d > radius_m:
                continue
            bearing = relative_bearing((gx, gy, gz), (s.x, s.y, veh_h))
            out.append(AngularObservation(bearing.azimuth, bearing.elevation, d))
    return out


def _cluster_elevation(members, gnb, scenario, cfg: DesignConfig) -> float:
    if cfg.elevation_mode == "far-half":
        dists = sorted(o.distance for o in members)
        d75 = dists[min(len(dists) - 1, (3 * len(dists)) // 4)]
        drop = scenario.physical.vehicle_antenna_height_m - gnb.position[2]
        return math.degrees(math.atan2(drop, d75))
    return target_range_elevation(gnb, scenario, cfg.elevation_target_m)


def _design_from_observations(obs, scenario, gnb, k, cfg: DesignConfig) -> BeamConfig:
    if not obs:
        log.info("gNB %s: no observations at step %s; emitting zero beams",
                 gnb.gnb_id, k)
        return BeamConfig(gnb.gnb_id, (), k)
    azimuths = [o.azimuth for o in obs]
    clusters = complete_linkage_cluster(azimuths, gnb.max_width_deg)
    ranked = []
    for members in clusters:
        group = [obs[i] for i in members]
        count = sum(o.weight for o in group)
        direction = cluster_direction([o.azimuth for o in group])
        ranked.append((count, direction, group))
    ranked.sort(key=lambda r: (-r[0], r[1]))

    width = gnb.max_width_deg
    chosen = []
    for count, direction, group in ranked:
        if len(chosen) >= gnb.n_beams_max:
            break
        # clusters are disjoint but their arcs may abut; keep the larger one
        if any(circular_distance(direction, c[1]) < width - 1e-9 for c in chosen):
            continue
        chosen.append((count, direction, group))
    power = gnb.p_tot_w / len(chosen)
    beams = tuple(
        Beam(direction, _cluster_elevation(group, gnb, scenario, cfg), width, power)
        for _, direction, group in chosen
    )
    config = BeamConfig(gnb.gnb_id, beams, k)
    config.validate(gnb)
    return config


def static_design(scenario: Scenario, gnb: GnbSite,
                  cfg: DesignConfig | None = None) -> BeamConfig:
    """Time-invariant design from observations pooled over all steps.

    Repeated positions contribute repeatedly on purpose: densely
    trafficked bearings should weigh more.
    """
    cfg = cfg or DesignConfig()
    obs = observations_for(scenario, gnb, range(scenario.n_steps),
                           cfg.observation_radius_m)
    return _design_from_observations(obs, scenario, gnb, None, cfg)


def dynamic_design(scenario: Scenario, gnb: GnbSite, k: int,
                   cfg: DesignConfig | None = None) -> BeamConfig:
    """Same pipeline as static, re-run on the current step only."""
    cfg = cfg or DesignConfig()
    obs = observations_for(scenario, gnb, [k], cfg.observation_radius_m)
    return _design_from_observations(obs, scenario, gnb, k, cfg)


_TL_STATE_ORDER = {LightState.RED: 0, LightState.YELLOW: 1, LightState.GREEN: 2}


def tl_design(scenario: Scenario, gnb: GnbSite, k: int,
              cfg: DesignConfig | None = None) -> BeamConfig:
    """Point beams at red approaches of the colocated light.

    Needs no mobility knowledge: inputs are the light phase table and
    approach geometry only. Red approaches fill first (lowest azimuth
    first), then yellow, then green; all beams use the full width and
    an equal power split.
    """
    cfg = cfg or DesignConfig()
    if gnb.colocated_light_id is None:
        raise ValueError(f"gNB {gnb.gnb_id} has no colocated traffic light")
    states = scenario.light_state(k, gnb.colocated_light_id)
    ordered = sorted(states, key=lambda az: (_TL_STATE_ORDER[states[az]], az))
    directions = ordered[: gnb.n_beams_max]
    if not directions:
        return BeamConfig(gnb.gnb_id, (), k)
    elevation = target_range_elevation(gnb, scenario, cfg.elevation_target_m)
    width = gnb.max_width_deg
    power = gnb.p_tot_w / len(directions)
    beams = tuple(
        Beam(float(az), elevation, width, power) for az in sorted(directions)
    )
    config = BeamConfig(gnb.gnb_id, beams, k)
    config.validate(gnb)
    return config


def serialize_config(config: BeamConfig) -> dict:
    """JSON-lines record for audit and replay."""
    return {
        "gnb_id": config.gnb_id,
        "time_step": config.time_step,
        "beams": [
            {"azimuth": b.azimuth, "elevation": b.elevation,
             "width": b.width, "power": b.power}
            for b in config.beams
        ],
    }
