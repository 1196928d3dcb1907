"""Complete-linkage agglomerative clustering of azimuth observations.

Distances are circular (degrees in [0, 180]). Merging uses the
Voorhees max-update on the working distance matrix and stops when the
smallest possible merge would exceed the diameter cap, so every output
cluster has circular diameter within the cap.
"""

import math

import numpy as np

from tlbeam import _kernels
from tlbeam.geometry import circular_distance


def complete_linkage_cluster(observations, max_diameter: float) -> list:
    """Partition azimuth observations into clusters of member indices.

    Clusters are returned sorted by their smallest member index;
    members keep input order.
    """
    if len(observations) == 0:
        raise ValueError("need at least one observation")
    if max_diameter <= 0:
        raise ValueError("max_diameter must be positive")
    angles = np.asarray([a % 360.0 for a in observations], dtype=float)
    if angles.shape[0] == 1:
        return [[0]]
    dist = _kernels.pairwise_circular_distances(angles)
    labels = _kernels.complete_linkage_labels(dist, float(max_diameter))
    groups: dict = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def cluster_direction(members) -> float:
    """Circular midpoint of a cluster's angular extent.

    The cluster is unrolled onto the arc it occupies (the complement
    of the largest gap between consecutive sorted angles); the
    direction is the mean of the unrolled min and max, wrapped back to
    [0, 360).
    """
    angles = sorted(a % 360.0 for a in members)
    if not angles:
        raise ValueError("empty cluster")
    n = len(angles)
    if n == 1:
        return angles[0]
    gaps = [(angles[(i + 1) % n] - angles[i]) % 360.0 for i in range(n)]
    cut = max(range(n), key=lambda i: (gaps[i], i))
    start = angles[(cut + 1) % n]
    unrolled = [(a - start) % 360.0 for a in angles]
    return (start + (min(unrolled) + max(unrolled)) / 2.0) % 360.0


def cluster_diameter(members) -> float:
    """Largest pairwise circular distance within the cluster."""
    angles = [a % 360.0 for a in members]
    best = 0.0
    for i in range(len(angles)):
        for j in range(i + 1, len(angles)):
            best = max(best, circular_distance(angles[i], angles[j]))
    return best


def naive_complete_linkage(observations, max_diameter: float) -> list:
    """Reference O(n^3) agglomerative implementation for cross-checks.

    Scans all live cluster pairs each round and recomputes linkage
    from raw pairwise distances; intentionally independent of the
    production path.
    """
    angles = [a % 360.0 for a in observations]
    clusters = [[i] for i in range(len(angles))]
    if not clusters:
        raise ValueError("need at least one observation")

    def linkage(c1, c2):
        return max(
            circular_distance(angles[i], angles[j]) for i in c1 for j in c2
        )

    while len(clusters) > 1:
        best = math.inf
        pair = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                d = linkage(clusters[i], clusters[j])
                if d < best:
                    best = d
                    pair = (i, j)
        if best > max_diameter:
            break
        i, j = pair
        merged = sorted(clusters[i] + clusters[j])
        clusters = [c for idx, c in enumerate(clusters) if idx not in (i, j)]
        clusters.append(merged)
    return sorted([sorted(c) for c in clusters], key=lambda c: c[0])
