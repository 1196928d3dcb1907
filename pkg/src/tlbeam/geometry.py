"""Angular geometry and uniform planar array (UPA) beamforming math.

Azimuths are degrees counterclockwise from east (+x), stored modulo
360; elevations are degrees from the horizontal plane in [-90, 90].
UPA vectors use flat index n = n1 * N2 + n2 over the element grid
(n1 row, n2 column, both 0-based); this is also the wire convention
for any serialized vector.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class ElementType(Enum):
    ISO = "iso"
    SECTOR_3GPP = "3gpp"


# fixed characteristics of the sectored element
SECTOR_WIDTH_DEG = 120.0
ELEMENT_HPBW_DEG = 65.0


def circular_distance(a: float, b: float) -> float:
    """Shortest angular distance between two azimuths, in [0, 180]."""
    d = math.fmod(abs(a - b), 360.0)
    return 360.0 - d if d > 180.0 else d


def wrap_azimuth(azimuth: float) -> float:
    """Normalize to [0, 360); float % can round a tiny negative to 360.0."""
    a = azimuth % 360.0
    return 0.0 if a == 360.0 else a


@dataclass(frozen=True)
class AnglePair:
    """Azimuth-elevation pair in degrees."""

    azimuth: float
    elevation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "azimuth", wrap_azimuth(self.azimuth))
        if not -90.0 <= self.elevation <= 90.0:
            raise ValueError(f"elevation {self.elevation} outside [-90, 90]")

    def reverse(self) -> "AnglePair":
        """The same ray seen from the other endpoint."""
        return AnglePair((self.azimuth + 180.0) % 360.0, -self.elevation)


@dataclass(frozen=True)
class UpaConfig:
    """Uniform planar array: n1 x n2 elements spaced half a wavelength."""

    n1: int
    n2: int
    element_type: ElementType = ElementType.ISO
    orientation: AnglePair = field(default_factory=lambda: AnglePair(0.0, 0.0))

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("element counts must be >= 1")

    @property
    def n_elements(self) -> int:
        return self.n1 * self.n2


def _phase_grid(upa: UpaConfig, angle: AnglePair) -> np.ndarray:
    """pi * (n1 cos(el) sin(az) + n2 sin(el)) per element, flat order."""
    az = math.radians(angle.azimuth)
    el = math.radians(angle.elevation)
    n1 = np.arange(upa.n1).reshape(-1, 1)
    n2 = np.arange(upa.n2).reshape(1, -1)
    phase = np.pi * (n1 * math.cos(el) * math.sin(az) + n2 * math.sin(el))
    return phase.reshape(-1)


def steering_vector(upa: UpaConfig, phi: AnglePair) -> np.ndarray:
    """Unit-norm beamforming vector steering the array toward phi."""
    n = upa.n_elements
    return np.exp(1j * _phase_grid(upa, phi)) / math.sqrt(n)


def array_response(upa: UpaConfig, theta: AnglePair) -> np.ndarray:
    """Array response toward theta: unit-modulus entries, squared norm N."""
    return np.exp(1j * _phase_grid(upa, theta))


def receive_weights(upa: UpaConfig, phi: AnglePair) -> np.ndarray:
    """Analog combining weights forming a receive beam toward phi.

    Same functional form as :func:`array_response`; pointing the beam
    at the arrival direction makes the weights equal the arrival
    response, which is the aligned-receiver condition. Choosing that
    direction is the caller's job.
    """
    return np.exp(1j * _phase_grid(upa, phi))


def effective_channel_oracle(
    h_path: complex,
    theta_tx: AnglePair,
    theta_rx: AnglePair,
    tx_upa: UpaConfig,
    rx_upa: UpaConfig,
    v: np.ndarray,
    w: np.ndarray,
) -> complex:
    """Exact scalar channel w^H (h a_rx a_tx^H) v for a single path.

    Test-only reference: validates the aligned-gain ceiling that the
    statistical gain model is fitted to. Not used in production gain
    generation.
    """
    a_tx = array_response(tx_upa, theta_tx)
    a_rx = array_response(rx_upa, theta_rx)
    if v.shape != a_tx.shape or w.shape != a_rx.shape:
        raise ValueError("beamforming vector length does not match array size")
    channel = h_path * np.outer(a_rx, a_tx.conj())
    return complex(w.conj() @ channel @ v)


def relative_bearing(from_pos, to_pos) -> AnglePair:
    """Azimuth/elevation of ``to_pos`` as seen from ``from_pos`` (3D, meters)."""
    dx = to_pos[0] - from_pos[0]
    dy = to_pos[1] - from_pos[1]
    dz = to_pos[2] - from_pos[2]
    horiz = math.hypot(dx, dy)
    if horiz == 0.0 and dz == 0.0:
        raise ValueError("coincident positions have no bearing")
    azimuth = wrap_azimuth(math.degrees(math.atan2(dy, dx)))
    elevation = math.degrees(math.atan2(dz, horiz))
    return AnglePair(azimuth, elevation)
