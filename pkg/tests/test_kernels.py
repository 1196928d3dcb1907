"""JIT kernels against their uncompiled bodies (backend equivalence)."""

import numpy as np
import pytest

from tlbeam import _kernels
from tlbeam._kernels import python_impl


def test_backend_flag_exposed():
    assert isinstance(_kernels.NUMBA_ENABLED, bool)


def test_pairwise_distances_match_python_path():
    rng = np.random.default_rng(1)
    angles = rng.uniform(0, 360, 40)
    fast = _kernels.pairwise_circular_distances(angles)
    slow = python_impl(_kernels.pairwise_circular_distances)(angles)
    assert np.array_equal(fast, slow)


def test_complete_linkage_labels_match_python_path():
    rng = np.random.default_rng(2)
    for _ in range(20):
        angles = rng.uniform(0, 360, int(rng.integers(2, 15)))
        dist = _kernels.pairwise_circular_distances(angles)
        cap = float(rng.uniform(5, 60))
        fast = _kernels.complete_linkage_labels(dist, cap)
        slow = python_impl(_kernels.complete_linkage_labels)(dist, cap)
        assert np.array_equal(fast, slow)


def test_rate_lookup_matches_python_path():
    thresholds = np.array([-np.inf, 0.5, 2.0, 8.0])
    effs = np.array([0.0, 1.0, 2.0, 3.0])
    for sinr in (0.0, 0.5, 0.7, 2.0, 7.99, 8.0, 100.0):
        fast = _kernels.rate_table_lookup(sinr, thresholds, effs, 10.0)
        slow = python_impl(_kernels.rate_table_lookup)(sinr, thresholds, effs, 10.0)
        assert fast == slow


def test_assignment_objective_matches_python_path():
    rng = np.random.default_rng(3)
    n_cand, n_veh, n_gnb = 6, 5, 2
    beam_set = np.array([0, 3, 4], dtype=np.int64)
    beam_gnb = np.array([0, 0, 0, 1, 1, 1], dtype=np.int64)
    cover = rng.random((n_cand, n_veh)) < 0.5
    gain_full = rng.gamma(2.0, 100.0, (n_cand, n_veh))
    gain_int = rng.gamma(1.0, 1.0, (n_cand, n_veh, n_gnb))
    pathloss = rng.random((n_gnb, n_veh)) * 1e-9
    p_tot = np.array([1.0, 1.0])
    thresholds = np.array([-np.inf, 0.1, 1.0, 10.0])
    effs = np.array([0.0, 0.5, 1.0, 2.0])
    args = (beam_set, 3, beam_gnb, cover, gain_full, gain_int, pathloss,
            p_tot, 1e-11, thresholds, effs, 4e8)
    assert _kernels.assignment_objective(*args) == \
        python_impl(_kernels.assignment_objective)(*args)
