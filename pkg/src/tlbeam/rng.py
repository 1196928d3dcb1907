"""Counter-based random streams for reproducible parallel simulation.

Every stochastic draw in the simulator is keyed by what it is for, not
by when it happens: a stream is derived from
``(seed, time_step, gnb, beam, vehicle, purpose)`` through a Philox
counter-based generator, so results are independent of iteration order
and worker count. Beam identity enters as the beam's quantized azimuth
(0.01 degree grid) so that two strategies emitting a beam in the same
direction draw the same channel realization (common random numbers for
paired comparisons).
"""

from enum import IntEnum

import numpy as np

# azimuth quantum for stream keying, degrees
DIRECTION_QUANTUM = 0.01


class Purpose(IntEnum):
    LOS = 1
    GAIN = 2
    ARRIVAL = 3
    MOBILITY = 4


def direction_key(azimuth_deg: float) -> int:
    """Quantize an azimuth to its stream-key integer."""
    return int(round((azimuth_deg % 360.0) / DIRECTION_QUANTUM)) % 36000


def stream(seed: int, *fields: int) -> np.random.Generator:
    """Philox generator for the stream identified by (seed, *fields)."""
    entropy = [int(seed) & 0xFFFFFFFF] + [int(f) & 0xFFFFFFFF for f in fields]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=entropy)))


def link_uniform(seed: int, k: int, gnb: int, vehicle: int, purpose: Purpose,
                 beam_azimuth: float | None = None) -> float:
    """One U(0,1) draw for a link-scoped event.

    ``beam_azimuth`` participates in the key only for beam-specific
    purposes (gain draws); LoS is a property of the gNB-vehicle pair.
    """
    fields = [k, gnb, vehicle, int(purpose)]
    if beam_azimuth is not None:
        fields.append(direction_key(beam_azimuth))
    return float(stream(seed, *fields).random())
