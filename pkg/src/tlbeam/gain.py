"""Statistical channel-gain model.

The composite gain G (small-scale fading x beamforming gain) is drawn
from distributions fitted per alignment regime, channel family, and
antenna element type; multiplied by a distance path loss it yields the
squared effective channel coefficient of a link. Fitted parameters are
shipped in ``data/gain_tables.txt`` so they stay auditable.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np
from scipy.special import ndtr, ndtri

from tlbeam import rng
from tlbeam.geometry import ELEMENT_HPBW_DEG, AnglePair, ElementType, circular_distance

DEFAULT_LOS_DECAY_M = 50.0


class ChannelFamily(Enum):
    MODEL_3GPP = "3gpp"
    MODEL_NYU = "nyu"


class Alignment(Enum):
    FULLY_ALIGNED = "fully_aligned"
    PARTIAL_TX = "partial_tx"
    PARTIAL_RX = "partial_rx"
    MISALIGNED = "misaligned"


@dataclass(frozen=True)
class LinkRegime:
    los: bool
    alignment: Alignment


@dataclass(frozen=True)
class MisalignmentAngles:
    """delta1: beam offset from the sector center (sectored gNBs only);
    delta2: elevation misalignment. Degrees, both nonnegative."""

    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.delta1 <= 60.0:
            raise ValueError("delta1 must lie within a 120 degree sector")
        if self.delta2 < 0.0:
            raise ValueError("delta2 must be nonnegative")


# --- distribution families ------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """Gaussian gain truncated at zero (gain is a nonnegative power factor)."""

    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def mean(self) -> float:
        # closed-form truncated-normal mean
        beta = -self.mu / self.sigma
        z = 1.0 - ndtr(beta)
        pdf = math.exp(-0.5 * beta * beta) / math.sqrt(2 * math.pi)
        return self.mu + self.sigma * pdf / z

    def median(self) -> float:
        return self.from_uniform(0.5)

    def typical(self) -> float:
        return self.mean()

    def sample(self, gen: np.random.Generator, n: int | None = None):
        size = 1 if n is None else n
        out = self.mu + self.sigma * gen.standard_normal(size)
        bad = out < 0.0
        while bad.any():
            out[bad] = self.mu + self.sigma * gen.standard_normal(int(bad.sum()))
            bad = out < 0.0
        return float(out[0]) if n is None else out

    def from_uniform(self, u: float) -> float:
        # inverse CDF of the zero-truncated Gaussian
        lo = ndtr(-self.mu / self.sigma)
        return self.mu + self.sigma * float(ndtri(lo + u * (1.0 - lo)))


@dataclass(frozen=True)
class Exponential:
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def mean(self) -> float:
        return self.alpha

    def median(self) -> float:
        return self.alpha * math.log(2.0)

    def typical(self) -> float:
        return self.alpha

    def sample(self, gen: np.random.Generator, n: int | None = None):
        out = gen.exponential(self.alpha, size=1 if n is None else n)
        return float(out[0]) if n is None else out

    def from_uniform(self, u: float) -> float:
        return -self.alpha * math.log1p(-u)


@dataclass(frozen=True)
class LogLogistic:
    """Log-logistic with location m and scale s on the log axis:
    X = exp(m + s*ln(U/(1-U))). Median exp(m); mean is finite only
    for s < 1, so ``typical`` reports the median."""

    m: float
    s: float

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("s must be positive")

    def median(self) -> float:
        return math.exp(self.m)

    def mean(self) -> float:
        if self.s >= 1.0:
            return math.inf
        b = math.pi * self.s
        return math.exp(self.m) * b / math.sin(b)

    def typical(self) -> float:
        return self.median()

    def sample(self, gen: np.random.Generator, n: int | None = None):
        u = gen.random(size=1 if n is None else n)
        out = np.exp(self.m + self.s * (np.log(u) - np.log1p(-u)))
        return float(out[0]) if n is None else out

    def from_uniform(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        return math.exp(self.m + self.s * math.log(u / (1.0 - u)))


GainDistribution = Gaussian | Exponential | LogLogistic


# --- fitted-parameter tables ----------------------------------------------

_REGIME_TAGS = {
    Alignment.MISALIGNED: "misaligned",
    Alignment.PARTIAL_TX: "partial_tx",
    Alignment.PARTIAL_RX: "partial_rx",
}


class GainTables:
    """Parsed contents of the fitted-parameter data file."""

    def __init__(self, power_laws, loglogistic):
        self.power_laws = power_laws
        self.loglogistic = loglogistic

    @classmethod
    def load(cls, path=None) -> "GainTables":
        if path is None:
            text = resources.files("tlbeam").joinpath("data/gain_tables.txt").read_text()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        power_laws: dict = {}
        loglog: dict = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            if kind == "powerlaw":
                family, element, param, coef, expo = parts[1:6]
                key = (ChannelFamily(family), ElementType(element))
                power_laws.setdefault(key, {})[param] = (float(coef), float(expo))
            elif kind == "loglog":
                regime, family, element, nt, nr, m, s = parts[1:8]
                key = (regime, ChannelFamily(family), ElementType(element))
                loglog.setdefault(key, {})[(int(nt), int(nr))] = (float(m), float(s))
            else:
                raise ValueError(f"gain table line {lineno}: unknown row kind {kind!r}")
        return cls(power_laws, loglog)

    def power_law(self, family, element, param, nt, nr) -> float:
        coef, expo = self.power_laws[(family, element)][param]
        return coef * (nt * nr) ** expo

    def loglog_params(self, regime_tag, family, element, nt, nr) -> tuple[float, float]:
        cells = self.loglogistic[(regime_tag, family, element)]
        if (nt, nr) in cells:
            return cells[(nt, nr)]
        product = nt * nr
        nearest = min(cells, key=lambda c: (abs(c[0] * c[1] - product), -c[0] * c[1]))
        warnings.warn(
            f"(Nt,Nr)=({nt},{nr}) not tabulated for {regime_tag}; "
            f"using nearest column {nearest} by element product",
            stacklevel=3,
        )
        return cells[nearest]


_tables: GainTables | None = None


def default_tables() -> GainTables:
    global _tables
    if _tables is None:
        _tables = GainTables.load()
    return _tables


# --- operations -------------------------------------------------------------


def classify_alignment(
    beam_dir: float,
    beam_width: float,
    veh_bearing_from_gnb: float,
    veh_beam_dir: float,
    veh_beam_width: float,
    gnb_bearing_from_veh: float,
) -> Alignment:
    """Azimuth alignment regime of a (beam, vehicle) pair.

    Each end is aligned when the pointing error is within its
    half-power half-width.
    """
    if beam_width <= 0 or veh_beam_width <= 0:
        raise ValueError("beam widths must be positive")
    tx = circular_distance(beam_dir, veh_bearing_from_gnb) <= beam_width / 2.0
    rx = circular_distance(veh_beam_dir, gnb_bearing_from_veh) <= veh_beam_width / 2.0
    if tx and rx:
        return Alignment.FULLY_ALIGNED
    if tx:
        return Alignment.PARTIAL_TX
    if rx:
        return Alignment.PARTIAL_RX
    return Alignment.MISALIGNED


def los_probability(distance: float, kappa: float = DEFAULT_LOS_DECAY_M) -> float:
    """Blockage model: P(LoS) = exp(-d/kappa)."""
    if distance <= 0:
        raise ValueError("distance must be positive")
    return math.exp(-distance / kappa)


def path_loss(distance: float, los: bool, fc_ghz: float) -> float:
    """Linear distance attenuation; LoS 20 dB/decade, NLoS 30 dB/decade."""
    if distance < 1.0:
        warnings.warn(f"distance {distance:.3g} m below 1 m reference; clamped")
        distance = 1.0
    slope = 20.0 if los else 30.0
    pl_db = 32.4 + slope * math.log10(distance) + 20.0 * math.log10(fc_ghz)
    return 10.0 ** (-pl_db / 10.0)


def _sector_factor(delta1: float) -> float:
    return 10.0 ** (-1.2 * (delta1 / ELEMENT_HPBW_DEG) ** 2)


def gain_distribution(
    family: ChannelFamily,
    element: ElementType,
    regime: LinkRegime,
    nt: int,
    nr: int,
    mis: MisalignmentAngles,
    tables: GainTables | None = None,
) -> GainDistribution:
    """Fitted gain distribution for one link condition.

    LoS fully-aligned links follow the per-family fits (Gaussian for
    the 3GPP channel, exponential for NYU) with elevation-misalignment
    attenuation and, for sectored elements, the sector-offset factor.
    Everything else is log-logistic from the tabulated columns.
    """
    if tables is None:
        tables = default_tables()
    if regime.alignment is Alignment.FULLY_ALIGNED:
        if regime.los:
            d2sq = mis.delta2 * mis.delta2
            sector = _sector_factor(mis.delta1) if element is ElementType.SECTOR_3GPP else 1.0
            if family is ChannelFamily.MODEL_3GPP:
                mu0 = tables.power_law(family, element, "mu0", nt, nr)
                sigma0 = tables.power_law(family, element, "sigma0", nt, nr)
                g_mu = tables.power_law(family, element, "gamma_mu", nt, nr)
                g_sigma = tables.power_law(family, element, "gamma_sigma", nt, nr)
                mu = mu0 * math.exp(-d2sq / (g_mu * g_mu)) * sector
                sigma = sigma0 * math.exp(-d2sq / (g_sigma * g_sigma))
                return Gaussian(mu, sigma)
            alpha0 = tables.power_law(family, element, "alpha0", nt, nr)
            g_alpha = tables.power_law(family, element, "gamma_alpha", nt, nr)
            return Exponential(alpha0 * math.exp(-d2sq / (g_alpha * g_alpha)) * sector)
        m, s = tables.loglog_params("nlos_aligned", family, element, nt, nr)
        return LogLogistic(m, s)
    tag = _REGIME_TAGS[regime.alignment]
    m, s = tables.loglog_params(tag, family, element, nt, nr)
    return LogLogistic(m, s)


def sample_gain(dist: GainDistribution, gen: np.random.Generator, n: int | None = None):
    """Draw gain realizations; Gaussian draws are rejection-truncated at 0."""
    return dist.sample(gen, n)


def gain_from_uniform(dist: GainDistribution, u: float) -> float:
    """Inverse-CDF realization, used for common-random-number coupling:
    the same uniform draw maps through whichever distribution the link's
    regime selects, keeping strategy comparisons paired."""
    return dist.from_uniform(u)


def link_gain(
    family: ChannelFamily,
    element: ElementType,
    nt: int,
    nr: int,
    *,
    beam_azimuth: float,
    beam_elevation: float,
    beam_width: float,
    veh_beam_azimuth: float,
    veh_beam_width: float,
    tx_bearing: AnglePair,
    rx_bearing: AnglePair,
    distance: float,
    los: bool,
    fc_ghz: float,
    seed: int,
    k: int,
    gnb: int,
    vehicle: int,
    sector_centers=None,
    tables: GainTables | None = None,
) -> float:
    """Squared effective channel coefficient for one link at one step.

    Composes alignment classification, the fitted gain draw (counter-based
    stream keyed by step, endpoints, and beam direction), and path loss.
    """
    alignment = classify_alignment(
        beam_azimuth, beam_width, tx_bearing.azimuth,
        veh_beam_azimuth, veh_beam_width, rx_bearing.azimuth,
    )
    delta1 = 0.0
    if element is ElementType.SECTOR_3GPP and sector_centers:
        delta1 = min(circular_distance(beam_azimuth, c) for c in sector_centers)
    delta2 = abs(beam_elevation - tx_bearing.elevation)
    dist = gain_distribution(
        family, element, LinkRegime(los, alignment), nt, nr,
        MisalignmentAngles(delta1, delta2), tables,
    )
    u = rng.link_uniform(seed, k, gnb, vehicle, rng.Purpose.GAIN, beam_azimuth)
    return path_loss(distance, los, fc_ghz) * gain_from_uniform(dist, u)
