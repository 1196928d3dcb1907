"""SINR, Shannon-bound rate, and CQI-based effective rate."""

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class LinkBudgetConfig:
    bandwidth_hz: float = 400e6
    carrier_ghz: float = 76.0
    noise_figure_db: float = 7.0
    thermal_density_dbm_hz: float = -174.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")

    @property
    def noise_power_w(self) -> float:
        n0_dbm = (
            self.thermal_density_dbm_hz
            + 10.0 * math.log10(self.bandwidth_hz)
            + self.noise_figure_db
        )
        return 10.0 ** ((n0_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class CqiTable:
    """4-bit link-adaptation table: row 0 is out-of-range (no service).

    ``min_sinr_db`` thresholds follow the spectral-efficiency rule
    min_sinr = 10*log10(2^efficiency - 1), which guarantees the mapped
    rate never exceeds the Shannon bound. Thresholds are inclusive.
    """

    efficiencies: tuple = ()
    min_sinr_db: tuple = ()
    _thresholds_linear: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        eff = self.efficiencies
        thr = self.min_sinr_db
        if len(eff) != len(thr) or len(eff) < 2:
            raise ValueError("CQI table needs matching efficiency/threshold rows")
        if eff[0] != 0.0:
            raise ValueError("row 0 must be the zero-efficiency out-of-range row")
        if any(b <= a for a, b in zip(eff, eff[1:])):
            raise ValueError("spectral efficiency must be strictly increasing")
        if any(b <= a for a, b in zip(thr, thr[1:])):
            raise ValueError("SINR thresholds must be strictly increasing")
        lin = np.array([db_to_linear(t) if math.isfinite(t) else -math.inf for t in thr])
        object.__setattr__(self, "_thresholds_linear", lin)

    @classmethod
    def load(cls, path=None) -> "CqiTable":
        if path is None:
            text = resources.files("tlbeam").joinpath("data/cqi_table.txt").read_text()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        eff, thr = [], []
        expect = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            idx, e, t = line.split()
            if int(idx) != expect:
                raise ValueError(f"CQI table line {lineno}: expected index {expect}")
            expect += 1
            eff.append(float(e))
            thr.append(float(t))
        return cls(tuple(eff), tuple(thr))

    def select(self, sinr_linear: float) -> int:
        """Highest CQI whose threshold is <= sinr (threshold inclusive)."""
        idx = int(np.searchsorted(self._thresholds_linear, sinr_linear, side="right")) - 1
        return max(idx, 0)

    @property
    def thresholds_linear(self) -> np.ndarray:
        return self._thresholds_linear

    @property
    def efficiencies_array(self) -> np.ndarray:
        return np.asarray(self.efficiencies)


def sinr(serving_power_w: float, serving_gain: float, interferers, n0_w: float) -> float:
    """P*|h|^2 over noise plus the sum of interfering received powers."""
    if n0_w <= 0:
        raise ValueError("noise power must be positive")
    denom = n0_w + sum(p * g for p, g in interferers)
    return serving_power_w * serving_gain / denom


def shannon_rate(sinr_linear: float, bandwidth_hz: float) -> float:
    """Achievable rate bound, bit/s."""
    return bandwidth_hz * math.log2(1.0 + sinr_linear)


def effective_rate(sinr_linear: float, bandwidth_hz: float, table: CqiTable) -> float:
    """Rate after CQI-indexed link adaptation, bit/s; 0 when out of range."""
    return bandwidth_hz * table.efficiencies[table.select(sinr_linear)]
