"""mmwave beam management simulator for urban vehicular downlink networks.

Statistical channel-gain models, a link-budget pipeline with CQI link
adaptation, three beam-design strategies (static clustering, dynamic
clustering, traffic-light), a beam-design feasibility checker with a
brute-force optimizer, and a discrete-time simulation engine with
CSV/JSON reporting.
"""

from tlbeam._kernels import NUMBA_ENABLED

__version__ = "0.1.0"

__all__ = ["NUMBA_ENABLED", "__version__"]
