"""World construction: mobility and traffic-light traces, gNB sites,
and deterministic synthetic intersection scenarios.

File formats (see FORMATS.md): mobility CSV ``t,veh_id,x,y,speed,heading``,
lights CSV ``t,light_id,approach_azimuth,state``, and a JSON scenario
descriptor tying them to gNB sites and physical constants. All files
carry a ``# tlbeam-... v1`` version line.
"""

import csv
import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum

from tlbeam import rng
from tlbeam.gain import ChannelFamily
from tlbeam.geometry import ElementType, UpaConfig, wrap_azimuth

MOBILITY_VERSION = "tlbeam-mobility v1"
LIGHTS_VERSION = "tlbeam-lights v1"
SCENARIO_FORMAT = "tlbeam-scenario"


class LightState(Enum):
    RED = "RED"
    YELLOW = "YELLOW"
    GREEN = "GREEN"


@dataclass(frozen=True)
class VehicleSample:
    time_step: int
    vehicle_id: str
    x: float
    y: float
    speed: float
    heading: float


@dataclass(frozen=True)
class GnbSite:
    gnb_id: str
    position: tuple  # (x, y, z) meters
    n_beams_max: int
    p_tot_w: float
    max_width_deg: float
    upa: UpaConfig
    sector_centers: tuple | None = None
    colocated_light_id: str | None = None

    def __post_init__(self):
        if self.n_beams_max < 1:
            raise ValueError("n_beams_max must be >= 1")
        if self.max_width_deg <= 0:
            raise ValueError("max_width_deg must be positive")
        if self.upa.element_type is ElementType.SECTOR_3GPP:
            cs = self.sector_centers
            if not cs or len(cs) > 3:
                raise ValueError("sectored gNBs need 1-3 sector centers")
            if len(cs) == 3:
                a, b, c = sorted(x % 360 for x in cs)
                if not (abs((b - a) - 120) < 1e-6 and abs((c - b) - 120) < 1e-6):
                    raise ValueError("3 sector centers must be 120 degrees apart")


@dataclass(frozen=True)
class Physical:
    carrier_ghz: float = 76.0
    gnb_height_m: float = 10.0
    vehicle_antenna_height_m: float = 1.5
    los_decay_m: float = 50.0
    vehicle_upa: tuple = (8, 8)
    vehicle_beamwidth_deg: float = 13.0


@dataclass
class Scenario:
    """Immutable world description; safe to share across workers."""

    gnbs: list
    samples: dict  # step -> list[VehicleSample], sorted by vehicle_id
    lights: dict  # step -> light_id -> {approach_azimuth_deg(int): LightState}
    step_duration_s: float = 1.0
    channel_family: ChannelFamily = ChannelFamily.MODEL_3GPP
    element: ElementType = ElementType.ISO
    physical: Physical = field(default_factory=Physical)
    bounding_box: tuple | None = None

    def __post_init__(self):
        steps = set(self.samples) | set(self.lights)
        if steps:
            lo, hi = min(steps), max(steps)
            if lo != 0:
                raise ValueError("time steps must start at 0")
            missing = set(range(lo, hi + 1)) - set(self.lights) if self.lights else set()
            if missing:
                raise ValueError(f"lights missing at steps {sorted(missing)[:5]}")
        self.n_steps = (max(steps) + 1) if steps else 0
        light_ids = set()
        for per_light in self.lights.values():
            light_ids.update(per_light)
        for g in self.gnbs:
            if g.colocated_light_id is not None and g.colocated_light_id not in light_ids:
                if self.lights:
                    raise ValueError(
                        f"gNB {g.gnb_id} references unknown light {g.colocated_light_id}"
                    )
        ids = sorted({s.vehicle_id for ss in self.samples.values() for s in ss})
        self._veh_index = {vid: i for i, vid in enumerate(ids)}
        if self.bounding_box is None and self.samples:
            xs = [s.x for ss in self.samples.values() for s in ss]
            ys = [s.y for ss in self.samples.values() for s in ss]
            margin = 1.0
            self.bounding_box = (
                min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin,
            )
        if self.bounding_box is not None:
            x0, y0, x1, y1 = self.bounding_box
            for ss in self.samples.values():
                for s in ss:
                    if not (x0 <= s.x <= x1 and y0 <= s.y <= y1):
                        raise ValueError(
                            f"vehicle {s.vehicle_id} at step {s.time_step} "
                            "outside the bounding box"
                        )

    @property
    def vehicle_ids(self) -> list:
        return sorted(self._veh_index)

    def vehicle_index(self, vehicle_id: str) -> int:
        return self._veh_index[vehicle_id]

    def vehicles_at(self, k: int) -> list:
        return self.samples.get(k, [])

    def light_state(self, k: int, light_id: str) -> dict:
        return self.lights[k][light_id]

    def presence_steps(self, vehicle_id: str) -> int:
        return sum(
            1 for ss in self.samples.values() for s in ss if s.vehicle_id == vehicle_id
        )

    def gnb_position(self, site: GnbSite) -> tuple:
        return site.position


# --- trace parsing ----------------------------------------------------------

_MOBILITY_COLUMNS = ("t", "veh_id", "x", "y", "speed", "heading")


def parse_mobility_trace(lines) -> list:
    """Parse mobility CSV into samples keyed by raw time value.

    Returns a list of (t: float, VehicleSample-without-step) tuples in
    file order; step indices are assigned when a Scenario is assembled.
    Rows must be non-decreasing in t; duplicate (t, veh_id) rows are
    rejected with their line number.
    """
    reader = csv.reader(lines)
    header = None
    out = []
    seen = set()
    last_t = None
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].startswith("#"):
            continue
        if header is None:
            header = [c.strip() for c in row]
            missing = [c for c in _MOBILITY_COLUMNS if c not in header]
            if missing:
                raise ValueError(f"mobility header missing columns {missing}")
            continue
        try:
            rec = dict(zip(header, row))
            t = float(rec["t"])
            vid = rec["veh_id"].strip()
            x, y = float(rec["x"]), float(rec["y"])
            speed, heading = float(rec["speed"]), float(rec["heading"])
        except (KeyError, ValueError, IndexError) as exc:
            raise ValueError(f"mobility line {lineno}: malformed row ({exc})") from None
        if not vid:
            raise ValueError(f"mobility line {lineno}: empty vehicle id")
        if last_t is not None and t < last_t:
            raise ValueError(f"mobility line {lineno}: time {t} decreases")
        last_t = t
        if (t, vid) in seen:
            raise ValueError(f"mobility line {lineno}: duplicate sample for ({t}, {vid})")
        seen.add((t, vid))
        out.append((t, vid, x, y, speed, wrap_azimuth(heading)))
    return out


def parse_lights(lines) -> list:
    """Parse lights CSV into (t, light_id, approach_deg, LightState) rows.

    Every light must report every one of its approaches at every time
    value appearing in the file.
    """
    reader = csv.reader(lines)
    header = None
    rows = []
    for lineno, row in enumerate(reader, start=1):
        if not row or row[0].startswith("#"):
            continue
        if header is None:
            header = [c.strip() for c in row]
            required = ("t", "light_id", "approach_azimuth", "state")
            missing = [c for c in required if c not in header]
            if missing:
                raise ValueError(f"lights header missing columns {missing}")
            continue
        try:
            rec = dict(zip(header, row))
            t = float(rec["t"])
            lid = rec["light_id"].strip()
            approach = int(round(float(rec["approach_azimuth"]))) % 360
            state = LightState(rec["state"].strip().upper())
        except ValueError as exc:
            raise ValueError(f"lights line {lineno}: {exc}") from None
        rows.append((t, lid, approach, state))

    times = sorted({r[0] for r in rows})
    approaches: dict = {}
    for _, lid, approach, _ in rows:
        approaches.setdefault(lid, set()).add(approach)
    have = {(t, lid, app) for t, lid, app, _ in rows}
    for t in times:
        for lid, apps in approaches.items():
            for app in sorted(apps):
                if (t, lid, app) not in have:
                    raise ValueError(
                        f"lights: missing state for (t={t}, light={lid}, approach={app})"
                    )
    return rows


def _steps_from_times(times, step_duration, what):
    t0 = min(times)
    steps = {}
    for t in times:
        k = (t - t0) / step_duration
        ki = int(round(k))
        if abs(k - ki) > 1e-6:
            raise ValueError(f"{what}: time {t} is not a multiple of the step duration")
        steps[t] = ki
    return steps


def assemble_scenario(
    mobility_rows,
    light_rows,
    gnbs,
    step_duration_s=1.0,
    channel_family=ChannelFamily.MODEL_3GPP,
    element=ElementType.ISO,
    physical=None,
    bounding_box=None,
) -> Scenario:
    """Join parsed traces onto a common contiguous step grid."""
    times = {t for t, *_ in mobility_rows} | {t for t, *_ in light_rows}
    samples: dict = {}
    lights: dict = {}
    if times:
        step_of = _steps_from_times(sorted(times), step_duration_s, "scenario")
        for t, vid, x, y, speed, heading in mobility_rows:
            k = step_of[t]
            samples.setdefault(k, []).append(
                VehicleSample(k, vid, x, y, speed, heading)
            )
        for k in samples:
            samples[k].sort(key=lambda s: s.vehicle_id)
        for t, lid, approach, state in light_rows:
            lights.setdefault(step_of[t], {}).setdefault(lid, {})[approach] = state
        n_steps = max(step_of.values()) + 1
        for k in range(n_steps):
            lights.setdefault(k, {})
            if light_rows and not lights[k]:
                raise ValueError(f"lights: no state at step {k}")
    return Scenario(
        gnbs=list(gnbs),
        samples=samples,
        lights=lights,
        step_duration_s=step_duration_s,
        channel_family=channel_family,
        element=element,
        physical=physical or Physical(),
        bounding_box=bounding_box,
    )


# --- serialization ----------------------------------------------------------


def write_mobility_csv(scenario: Scenario, fh) -> None:
    fh.write(f"# {MOBILITY_VERSION}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(_MOBILITY_COLUMNS)
    for k in sorted(scenario.samples):
        for s in scenario.samples[k]:
            t = k * scenario.step_duration_s
            writer.writerow([repr(t), s.vehicle_id, repr(s.x), repr(s.y),
                             repr(s.speed), repr(s.heading)])


def write_lights_csv(scenario: Scenario, fh) -> None:
    fh.write(f"# {LIGHTS_VERSION}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "light_id", "approach_azimuth", "state"])
    for k in sorted(scenario.lights):
        t = k * scenario.step_duration_s
        for lid in sorted(scenario.lights[k]):
            for approach in sorted(scenario.lights[k][lid]):
                writer.writerow([repr(t), lid, approach,
                                 scenario.lights[k][lid][approach].value])


def save_scenario(scenario: Scenario, out_dir: str) -> str:
    """Write descriptor + trace CSVs; returns the descriptor path."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "mobility.csv"), "w", encoding="utf-8") as fh:
        write_mobility_csv(scenario, fh)
    with open(os.path.join(out_dir, "lights.csv"), "w", encoding="utf-8") as fh:
        write_lights_csv(scenario, fh)
    desc = {
        "format": SCENARIO_FORMAT,
        "version": 1,
        "step_duration_s": scenario.step_duration_s,
        "channel_family": scenario.channel_family.value,
        "element": scenario.element.value,
        "bounding_box": list(scenario.bounding_box) if scenario.bounding_box else None,
        "physical": {
            "carrier_ghz": scenario.physical.carrier_ghz,
            "gnb_height_m": scenario.physical.gnb_height_m,
            "vehicle_antenna_height_m": scenario.physical.vehicle_antenna_height_m,
            "los_decay_m": scenario.physical.los_decay_m,
            "vehicle_upa": list(scenario.physical.vehicle_upa),
            "vehicle_beamwidth_deg": scenario.physical.vehicle_beamwidth_deg,
        },
        "mobility": "mobility.csv",
        "lights": "lights.csv",
        "gnbs": [
            {
                "gnb_id": g.gnb_id,
                "position": list(g.position),
                "n_beams_max": g.n_beams_max,
                "p_tot_w": g.p_tot_w,
                "max_width_deg": g.max_width_deg,
                "upa": [g.upa.n1, g.upa.n2],
                "sector_centers": list(g.sector_centers) if g.sector_centers else None,
                "colocated_light_id": g.colocated_light_id,
            }
            for g in scenario.gnbs
        ],
    }
    path = os.path.join(out_dir, "scenario.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(desc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_scenario(descriptor_path: str, overrides: dict | None = None) -> Scenario:
    with open(descriptor_path, encoding="utf-8") as fh:
        desc = json.load(fh)
    if desc.get("format") != SCENARIO_FORMAT:
        raise ValueError(f"{descriptor_path}: not a {SCENARIO_FORMAT} descriptor")
    desc.update(overrides or {})
    base = os.path.dirname(os.path.abspath(descriptor_path))
    with open(os.path.join(base, desc["mobility"]), encoding="utf-8") as fh:
        mobility = parse_mobility_trace(fh)
    with open(os.path.join(base, desc["lights"]), encoding="utf-8") as fh:
        lights = parse_lights(fh)
    element = ElementType(desc["element"])
    phys_raw = desc.get("physical", {})
    physical = Physical(
        carrier_ghz=phys_raw.get("carrier_ghz", 76.0),
        gnb_height_m=phys_raw.get("gnb_height_m", 10.0),
        vehicle_antenna_height_m=phys_raw.get("vehicle_antenna_height_m", 1.5),
        los_decay_m=phys_raw.get("los_decay_m", 50.0),
        vehicle_upa=tuple(phys_raw.get("vehicle_upa", (8, 8))),
        vehicle_beamwidth_deg=phys_raw.get("vehicle_beamwidth_deg", 13.0),
    )
    gnbs = []
    for g in desc["gnbs"]:
        upa = UpaConfig(*g["upa"], element_type=element)
        gnbs.append(
            GnbSite(
                gnb_id=g["gnb_id"],
                position=tuple(g["position"]),
                n_beams_max=g["n_beams_max"],
                p_tot_w=g["p_tot_w"],
                max_width_deg=g["max_width_deg"],
                upa=upa,
                sector_centers=tuple(g["sector_centers"]) if g.get("sector_centers") else None,
                colocated_light_id=g.get("colocated_light_id"),
            )
        )
    return assemble_scenario(
        mobility, lights, gnbs,
        step_duration_s=desc.get("step_duration_s", 1.0),
        channel_family=ChannelFamily(desc["channel_family"]),
        element=element,
        physical=physical,
        bounding_box=tuple(desc["bounding_box"]) if desc.get("bounding_box") else None,
    )


# --- synthetic scenarios ----------------------------------------------------


@dataclass
class _Car:
    vid: str
    entry_arm: int
    exit_arm: int
    q: float  # distance traveled along the entry->exit polyline
    done: bool = False


class _IntersectionSim:
    """One signalized intersection with queueing car-following.

    Vehicles enter at an arm end, drive toward the center on the right
    side of the road, stop at the stop line on red/yellow, discharge on
    green, and leave via their exit arm. All randomness comes from
    per-arm counter-based streams, so traces are reproducible.
    """

    SPEED = 12.0  # m/s
    SPACING = 7.0  # m, queue headway
    STOP_OFFSET = 10.0  # m from center
    LANE_OFFSET = 2.0  # m, right of the road axis
    ANCHOR_RANGE = 35.0  # m, lane point defining the approach azimuth
    YELLOW_STEPS = 2

    def __init__(self, name, center, arms, arm_length, arrival_rate,
                 light_period, seed, phase_offset=0):
        if arms not in (3, 4):
            raise ValueError("arms must be 3 or 4")
        if arrival_rate < 0:
            raise ValueError("arrival rate must be nonnegative")
        self.name = name
        self.center = center
        self.arms = arms
        self.arm_azimuths = [360.0 * i / arms for i in range(arms)]
        self.arm_length = arm_length
        self.rate = arrival_rate
        self.period = light_period
        self.seed = seed
        self.phase_offset = phase_offset
        self.cars: list[_Car] = []
        self.pending = [0] * arms  # arrivals blocked at the entry
        self.spawned = [0] * arms
        # stable per-intersection stream key (str hash is not reproducible)
        tag = sum(ord(c) for c in name) % 65536
        self.arrival_gens = [
            rng.stream(seed, idx, int(rng.Purpose.ARRIVAL), tag)
            for idx in range(arms)
        ]
        self.exit_gens = [
            rng.stream(seed, idx, int(rng.Purpose.MOBILITY), tag)
            for idx in range(arms)
        ]

    def green_arms(self, k: int):
        """Arms with a green (or yellow) light at step k; yellow flagged."""
        kk = (k + self.phase_offset) % self.period
        if self.arms == 4:
            half = self.period // 2
            group = (0, 2) if kk < half else (1, 3)
            in_phase = kk % half
            yellow = in_phase >= half - self.YELLOW_STEPS
        else:
            third = self.period // 3
            group = (min(kk // third, 2),)
            in_phase = kk % third
            yellow = in_phase >= third - self.YELLOW_STEPS
        return group, yellow

    def approach_azimuth(self, arm: int) -> int:
        """Approach key: bearing of the inbound lane's anchor point from
        the intersection center, to the nearest degree. Pure road
        geometry; the queue forms along this lane, not the road axis."""
        ox, oy = self._unit_out(arm)
        rx, ry = -oy, ox  # right-hand side of inbound travel (-ox, -oy)
        px = self.ANCHOR_RANGE * ox + self.LANE_OFFSET * rx
        py = self.ANCHOR_RANGE * oy + self.LANE_OFFSET * ry
        return int(round(math.degrees(math.atan2(py, px)))) % 360

    def light_states(self, k: int) -> dict:
        group, yellow = self.green_arms(k)
        states = {}
        for idx in range(self.arms):
            key = self.approach_azimuth(idx)
            if idx in group:
                states[key] = LightState.YELLOW if yellow else LightState.GREEN
            else:
                states[key] = LightState.RED
        return states

    def _unit_out(self, arm):
        az = math.radians(self.arm_azimuths[arm])
        return math.cos(az), math.sin(az)

    def _position(self, car: _Car):
        if car.q <= self.arm_length:
            ox, oy = self._unit_out(car.entry_arm)
            base = self.arm_length - car.q
            dx, dy = -ox, -oy
        else:
            ox, oy = self._unit_out(car.exit_arm)
            base = car.q - self.arm_length
            dx, dy = ox, oy
        # right-hand lane offset relative to the travel direction
        rx, ry = dy, -dx
        px = self.center[0] + base * ox + self.LANE_OFFSET * rx
        py = self.center[1] + base * oy + self.LANE_OFFSET * ry
        heading = wrap_azimuth(math.degrees(math.atan2(dy, dx)))
        return px, py, heading

    def step(self, k: int):
        """Advance one step; returns samples recorded after the move."""
        group, yellow = self.green_arms(k)
        stop_q = self.arm_length - self.STOP_OFFSET
        moved = []
        for arm in range(self.arms):
            cars = sorted(
                (c for c in self.cars if c.entry_arm == arm and not c.done),
                key=lambda c: -c.q,
            )
            can_go = arm in group and not yellow
            lead_q = None
            for car in cars:
                limit = car.q + self.SPEED
                if not can_go and car.q <= stop_q:
                    limit = min(limit, stop_q)
                if lead_q is not None:
                    limit = min(limit, lead_q - self.SPACING)
                new_q = max(car.q, min(limit, car.q + self.SPEED))
                speed = new_q - car.q
                car.q = new_q
                lead_q = new_q
                if car.q >= 2.0 * self.arm_length:
                    car.done = True
                else:
                    moved.append((car, speed))
            # arrivals after existing traffic has advanced
            self.pending[arm] += int(self.arrival_gens[arm].poisson(self.rate))
            if self.pending[arm] > 0:
                entry_free = lead_q is None or lead_q >= self.SPACING
                if entry_free:
                    vid = f"{self.name}a{arm}v{self.spawned[arm]}"
                    self.spawned[arm] += 1
                    self.pending[arm] -= 1
                    if self.arms == 4:
                        exit_arm = (arm + 2) % 4
                    else:
                        others = [a for a in range(3) if a != arm]
                        exit_arm = others[int(self.exit_gens[arm].integers(2))]
                    car = _Car(vid, arm, exit_arm, 0.0)
                    self.cars.append(car)
                    moved.append((car, 0.0))
        samples = []
        for car, speed in moved:
            px, py, heading = self._position(car)
            samples.append(VehicleSample(k, car.vid, px, py, speed, heading))
        samples.sort(key=lambda s: s.vehicle_id)
        self.cars = [c for c in self.cars if not c.done]
        return samples

    def queue_length(self, arm: int) -> int:
        stop_q = self.arm_length - self.STOP_OFFSET
        return sum(
            1
            for c in self.cars
            if c.entry_arm == arm and not c.done
            and c.q <= stop_q and c.q > stop_q - 12 * self.SPACING
        )


def _default_gnb(gnb_id, center, light_id, n_beams, max_width, element, physical):
    upa = UpaConfig(16, 16, element_type=element)
    centers = (0.0, 120.0, 240.0) if element is ElementType.SECTOR_3GPP else None
    return GnbSite(
        gnb_id=gnb_id,
        position=(center[0], center[1], physical.gnb_height_m),
        n_beams_max=n_beams,
        p_tot_w=1.0,
        max_width_deg=max_width,
        upa=upa,
        sector_centers=centers,
        colocated_light_id=light_id,
    )


def synthesize_intersection(
    arms=4,
    arm_length=150.0,
    arrival_rate=0.15,
    light_period=30,
    seed=0,
    n_steps=60,
    n_beams=2,
    max_width_deg=5.0,
    channel_family=ChannelFamily.MODEL_3GPP,
    element=ElementType.ISO,
    physical=None,
) -> Scenario:
    """One signalized intersection with a gNB at its center.

    Deterministic for a given seed: arrivals, car following, and light
    phases all derive from counter-based streams.
    """
    physical = physical or Physical()
    sim = _IntersectionSim("i0", (0.0, 0.0), arms, arm_length, arrival_rate,
                           light_period, seed)
    samples = {}
    lights = {}
    for k in range(n_steps):
        ss = sim.step(k)
        if ss:
            samples[k] = ss
        lights[k] = {"L0": sim.light_states(k)}
    gnb = _default_gnb("g0", (0.0, 0.0), "L0", n_beams, max_width_deg,
                       element, physical)
    pad = 10.0
    return Scenario(
        gnbs=[gnb],
        samples=samples,
        lights=lights,
        channel_family=channel_family,
        element=element,
        physical=physical,
        bounding_box=(-arm_length - pad, -arm_length - pad,
                      arm_length + pad, arm_length + pad),
    )


def synthesize_corridor(
    arm_length=100.0,
    gap=20.0,
    arrival_rate=0.15,
    light_period=30,
    seed=0,
    n_steps=60,
    n_beams=2,
    max_width_deg=5.0,
    channel_family=ChannelFamily.MODEL_3GPP,
    element=ElementType.ISO,
    physical=None,
) -> Scenario:
    """Two adjacent signalized intersections along an east-west road.

    The second light runs half a period out of phase. Intended for
    two-gNB optimum-versus-heuristic comparisons.
    """
    physical = physical or Physical()
    spacing = 2.0 * arm_length + gap
    centers = [(0.0, 0.0), (spacing, 0.0)]
    sims = [
        _IntersectionSim("i0", centers[0], 4, arm_length, arrival_rate,
                         light_period, seed),
        _IntersectionSim("i1", centers[1], 4, arm_length, arrival_rate,
                         light_period, seed + 1, phase_offset=light_period // 2),
    ]
    samples = {}
    lights = {}
    for k in range(n_steps):
        ss = sims[0].step(k) + sims[1].step(k)
        ss.sort(key=lambda s: s.vehicle_id)
        if ss:
            samples[k] = ss
        lights[k] = {"L0": sims[0].light_states(k), "L1": sims[1].light_states(k)}
    gnbs = [
        _default_gnb("g0", centers[0], "L0", n_beams, max_width_deg, element, physical),
        _default_gnb("g1", centers[1], "L1", n_beams, max_width_deg, element, physical),
    ]
    pad = 10.0
    return Scenario(
        gnbs=gnbs,
        samples=samples,
        lights=lights,
        channel_family=channel_family,
        element=element,
        physical=physical,
        bounding_box=(-arm_length - pad, -arm_length - pad,
                      spacing + arm_length + pad, arm_length + pad),
    )


def place_gnbs_at_busiest_lights(
    samples: dict,
    light_positions: dict,
    n: int,
    radius_m: float = 100.0,
    **gnb_kwargs,
) -> list:
    """Rank lights by nearby vehicle-observation density and build gNB
    sites at the top n. Density counts samples within ``radius_m`` over
    all steps; ties break toward the lower light id."""
    counts = {lid: 0 for lid in light_positions}
    for ss in samples.values():
        for s in ss:
            for lid, (lx, ly) in light_positions.items():
                if math.hypot(s.x - lx, s.y - ly) <= radius_m:
                    counts[lid] += 1
    ranked = sorted(counts, key=lambda lid: (-counts[lid], lid))[:n]
    physical = gnb_kwargs.pop("physical", Physical())
    element = gnb_kwargs.pop("element", ElementType.ISO)
    out = []
    for i, lid in enumerate(ranked):
        lx, ly = light_positions[lid]
        out.append(
            _default_gnb(
                f"g{i}", (lx, ly), lid,
                gnb_kwargs.get("n_beams", 2),
                gnb_kwargs.get("max_width_deg", 5.0),
                element, physical,
            )
        )
    return out
