"""Hot numeric kernels, JIT-compiled with numba when available.

Set ``TLBEAM_NUMBA=0`` to force the pure-Python/numpy fallback; the
fallback runs the exact same function bodies, so results are identical
either way (only speed differs). ``benchmarks/bench_kernels.py``
compares the two paths.
"""

import os

import numpy as np

_flag = os.environ.get("TLBEAM_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "no", "off")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(func):
            return func

        return deco


def python_impl(func):
    """Return the uncompiled body of a kernel (for benchmarks/tests)."""
    return getattr(func, "py_func", func)


@njit(cache=True)
def circular_distance_scalar(a, b):
    d = abs(a - b) % 360.0
    if d > 180.0:
        d = 360.0 - d
    return d


@njit(cache=True)
def pairwise_circular_distances(angles):
    """Condensed-to-square matrix of circular distances, degrees in [0, 180]."""
    n = angles.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = circular_distance_scalar(angles[i], angles[j])
            out[i, j] = d
            out[j, i] = d
    return out


@njit(cache=True)
def complete_linkage_labels(dist, max_diameter):
    """Agglomerative complete-linkage clustering on a distance matrix.

    Repeatedly merges the pair of clusters with the smallest
    complete-linkage distance (Voorhees max-update on the working
    matrix), stopping when the smallest possible merge would exceed
    ``max_diameter``. Ties go to the lowest index pair. Returns a label
    per row; labels are arbitrary but consistent.
    """
    n = dist.shape[0]
    work = dist.copy()
    alive = np.ones(n, dtype=np.bool_)
    labels = np.arange(n)
    for _ in range(n - 1):
        best = np.inf
        bi = -1
        bj = -1
        for i in range(n):
            if not alive[i]:
                continue
            for j in range(i + 1, n):
                if not alive[j]:
                    continue
                if work[i, j] < best:
                    best = work[i, j]
                    bi = i
                    bj = j
        if bi < 0 or best > max_diameter:
            break
        # merge bj into bi: complete linkage keeps the max distance
        for k in range(n):
            if alive[k] and k != bi and k != bj:
                m = work[bi, k]
                if work[bj, k] > m:
                    m = work[bj, k]
                work[bi, k] = m
                work[k, bi] = m
        alive[bj] = False
        for k in range(n):
            if labels[k] == bj:
                labels[k] = bi
    return labels


@njit(cache=True)
def rate_table_lookup(sinr_linear, thresholds, efficiencies, bandwidth):
    """Highest table row whose threshold is <= sinr; returns bit/s."""
    idx = 0
    for r in range(thresholds.shape[0] - 1, -1, -1):
        if sinr_linear >= thresholds[r]:
            idx = r
            break
    return bandwidth * efficiencies[idx]


@njit(cache=True)
def assignment_objective(
    beam_set,
    set_len,
    beam_gnb,
    cover,
    gain_full,
    gain_int,
    pathloss,
    p_tot_per_gnb,
    noise_w,
    thresholds,
    efficiencies,
    bandwidth,
):
    """Corner-rule objective of one joint beam selection.

    ``beam_set``: candidate-beam indices (padded, first ``set_len``
    valid). Power splits the owning gNB's budget equally across its
    selected beams. Each beam serves its best covered vehicle
    exclusively; every other selected beam interferes, with the
    vehicle pointing at the serving beam's gNB.

    ``gain_full[c, v]``: gain sample when candidate c serves v.
    ``gain_int[c, v, p]``: gain sample when candidate c interferes at v
    while v points at gNB p. ``pathloss[g, v]``: distance attenuation
    toward v from candidate c's gNB g.
    """
    n_gnb = p_tot_per_gnb.shape[0]
    counts = np.zeros(n_gnb, dtype=np.int64)
    for s in range(set_len):
        counts[beam_gnb[beam_set[s]]] += 1
    power = np.zeros(set_len)
    for s in range(set_len):
        g = beam_gnb[beam_set[s]]
        power[s] = p_tot_per_gnb[g] / counts[g]

    total = 0.0
    n_veh = cover.shape[1]
    for s in range(set_len):
        c = beam_set[s]
        g = beam_gnb[c]
        best_rate = 0.0
        for v in range(n_veh):
            if not cover[c, v]:
                continue
            sig = power[s] * pathloss[g, v] * gain_full[c, v]
            interf = 0.0
            for s2 in range(set_len):
                if s2 == s:
                    continue
                c2 = beam_set[s2]
                g2 = beam_gnb[c2]
                interf += power[s2] * pathloss[g2, v] * gain_int[c2, v, g]
            sinr = sig / (noise_w + interf)
            rate = rate_table_lookup(sinr, thresholds, efficiencies, bandwidth)
            if rate > best_rate:
                best_rate = rate
        total += best_rate
    return total


@njit(cache=True)
def joint_argmax_search(
    sets_a,
    lens_a,
    ub_a,
    sets_b,
    lens_b,
    ub_b,
    beam_gnb,
    cover,
    gain_full,
    gain_int,
    pathloss,
    p_tot_per_gnb,
    noise_w,
    thresholds,
    efficiencies,
    bandwidth,
    warm_obj,
):
    """Exhaustive search over pairs of per-gNB beam sets with sound pruning.

    Sets are visited in their given (lexicographic) order; a pair is
    skipped only when the sum of interference-free upper bounds is
    strictly below the best exact objective seen, so the returned pair
    is the lexicographically first argmax. ``warm_obj`` primes the
    bound (pass 0.0 for none).
    """
    best_obj = warm_obj
    best_i = -1
    best_j = -1
    have = False
    joint = np.empty(sets_a.shape[1] + sets_b.shape[1], dtype=np.int64)
    evals = 0
    for i in range(sets_a.shape[0]):
        for j in range(sets_b.shape[0]):
            ub = ub_a[i] + ub_b[j]
            if ub < best_obj:
                continue
            n = 0
            for s in range(lens_a[i]):
                joint[n] = sets_a[i, s]
                n += 1
            for s in range(lens_b[j]):
                joint[n] = sets_b[j, s]
                n += 1
            obj = assignment_objective(
                joint, n, beam_gnb, cover, gain_full, gain_int, pathloss,
                p_tot_per_gnb, noise_w, thresholds, efficiencies, bandwidth,
            )
            evals += 1
            if obj > best_obj or (obj == best_obj and not have):
                best_obj = obj
                best_i = i
                best_j = j
                have = True
    return best_i, best_j, best_obj, evals
