"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they complete. Criteria 6-8 use pinned synthetic scenarios (two-gNB
corridor and single-gNB intersection with standing red-phase queues).
"""

import contextlib
import math
import random
import time

import numpy as np
import pytest
from scipy import stats

from oracle_helpers import (
    independent_verdict,
    random_assignment,
    random_cluster_instance,
    two_gnb_scenario,
    vehicle,
)
from tlbeam.cluster import complete_linkage_cluster, naive_complete_linkage
from tlbeam.constraints import check_feasible, corner_assignment, objective_value
from tlbeam.engine import RunConfig, Scheduler, Strategy, run
from tlbeam.gain import (
    Alignment,
    ChannelFamily,
    Exponential,
    Gaussian,
    LinkRegime,
    LogLogistic,
    MisalignmentAngles,
    gain_distribution,
    sample_gain,
)
from tlbeam.geometry import (
    AnglePair,
    ElementType,
    UpaConfig,
    effective_channel_oracle,
    receive_weights,
    steering_vector,
)
from tlbeam.linkbudget import CqiTable, LinkBudgetConfig, effective_rate, shannon_rate
from tlbeam.links import StepLinks
from tlbeam.optimum import brute_force_optimum
from tlbeam.report import run_matrix
from tlbeam.scenario import Physical, synthesize_corridor, synthesize_intersection
from tlbeam.strategies import tl_design

SCENARIO_SEED = 5
RUN_SEED = 11
WORLD = dict(arm_length=70.0, arrival_rate=0.5, light_period=40, n_steps=40,
             physical=Physical(los_decay_m=80.0))

ALIGNED_LOS = LinkRegime(True, Alignment.FULLY_ALIGNED)
FAMILIES = (ChannelFamily.MODEL_3GPP, ChannelFamily.MODEL_NYU)
ELEMENTS = (ElementType.ISO, ElementType.SECTOR_3GPP)


@contextlib.contextmanager
def criterion(number, label):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number}: FAIL - {label}")
        raise
    print(f"ACCEPTANCE {number}: PASS - {label}")


@pytest.fixture(scope="module")
def lbcqi():
    return LinkBudgetConfig(), CqiTable.load()


def shapes_for(n):
    side = int(round(math.sqrt(n)))
    assert side * side == n
    return side, side


def test_c01_beamforming_identity():
    with criterion(1, "single-path fully-aligned |h|^2 = Nr^2 * Nt"):
        start = time.time()
        for nt, nr in [(64, 16), (64, 64), (256, 64)]:
            tx = UpaConfig(*shapes_for(nt))
            rx = UpaConfig(*shapes_for(nr))
            theta_tx = AnglePair(40.0, -5.0)
            theta_rx = AnglePair(220.0, 5.0)
            v = steering_vector(tx, theta_tx)
            w = receive_weights(rx, theta_rx)
            h = effective_channel_oracle(1.0, theta_tx, theta_rx, tx, rx, v, w)
            expected = nr * nr * nt
            assert abs(abs(h) ** 2 - expected) <= 1e-9 * expected
        assert time.time() - start < 1.0


def test_c02_distribution_fidelity():
    with criterion(2, "Tables II-V cells at (256,64): moments within 1%"):
        start = time.time()
        n = 10**5
        draw_seed = 1000
        # LoS fully-aligned fits (Gaussian for 3GPP, exponential for NYU)
        for element in ELEMENTS:
            gauss = gain_distribution(ChannelFamily.MODEL_3GPP, element,
                                      ALIGNED_LOS, 256, 64, MisalignmentAngles())
            assert isinstance(gauss, Gaussian)
            draws = sample_gain(gauss, np.random.default_rng(draw_seed), n)
            beta = -gauss.mu / gauss.sigma
            closed = stats.truncnorm.mean(beta, np.inf, loc=gauss.mu,
                                          scale=gauss.sigma)
            assert draws.mean() == pytest.approx(closed, rel=0.01)
            draw_seed += 1

            expo = gain_distribution(ChannelFamily.MODEL_NYU, element,
                                     ALIGNED_LOS, 256, 64, MisalignmentAngles())
            assert isinstance(expo, Exponential)
            draws = sample_gain(expo, np.random.default_rng(draw_seed), n)
            assert draws.mean() == pytest.approx(expo.alpha, rel=0.01)
            draw_seed += 1

        # log-logistic cells: NLoS aligned plus the three partial regimes
        regimes = [
            LinkRegime(False, Alignment.FULLY_ALIGNED),
            LinkRegime(True, Alignment.MISALIGNED),
            LinkRegime(True, Alignment.PARTIAL_TX),
            LinkRegime(True, Alignment.PARTIAL_RX),
        ]
        for family in FAMILIES:
            for element in ELEMENTS:
                for regime in regimes:
                    dist = gain_distribution(family, element, regime, 256, 64,
                                             MisalignmentAngles())
                    assert isinstance(dist, LogLogistic)
                    draws = sample_gain(dist, np.random.default_rng(draw_seed), n)
                    assert np.median(draws) == pytest.approx(
                        math.exp(dist.m), rel=0.01)
                    draw_seed += 1

        # attenuation curves at elevation offsets 0 and 4 degrees
        x = 256 * 64
        curves = {
            (ChannelFamily.MODEL_3GPP, ElementType.ISO):
                (0.537 * x**0.998, 55.02 * x**-0.287,
                 0.23 * x**0.7, 55.86 * x**-0.28),
            (ChannelFamily.MODEL_3GPP, ElementType.SECTOR_3GPP):
                (3.26 * x, 49.01 * x**-0.274,
                 1.33 * x**0.65, 55.86 * x**-0.28),
        }
        for (family, element), (m0, gm, s0, gs) in curves.items():
            for d2 in (0.0, 4.0):
                dist = gain_distribution(family, element, ALIGNED_LOS, 256, 64,
                                         MisalignmentAngles(0.0, d2))
                assert dist.mu == pytest.approx(
                    m0 * math.exp(-(d2 / gm) ** 2), rel=1e-6)
                assert dist.sigma == pytest.approx(
                    s0 * math.exp(-(d2 / gs) ** 2), rel=1e-6)
        for element in ELEMENTS:
            a0 = {ElementType.ISO: 0.63 * x**1.05,
                  ElementType.SECTOR_3GPP: 5.2 * x**1.03}[element]
            ga = 54.85 * x**-0.3
            for d2 in (0.0, 4.0):
                dist = gain_distribution(ChannelFamily.MODEL_NYU, element,
                                         ALIGNED_LOS, 256, 64,
                                         MisalignmentAngles(0.0, d2))
                assert dist.alpha == pytest.approx(
                    a0 * math.exp(-(d2 / ga) ** 2), rel=1e-6)
        assert time.time() - start < 30.0


def test_c03_regime_ordering():
    with criterion(3, "median gain: aligned LoS > partial-tx > misaligned, "
                      "aligned/partial gap > 10 dB"):
        n = 10**5
        for family in FAMILIES:
            meds = []
            for i, regime in enumerate([
                ALIGNED_LOS,
                LinkRegime(True, Alignment.PARTIAL_TX),
                LinkRegime(True, Alignment.MISALIGNED),
            ]):
                dist = gain_distribution(family, ElementType.ISO, regime,
                                         256, 64, MisalignmentAngles())
                draws = sample_gain(dist, np.random.default_rng(2000 + i), n)
                meds.append(float(np.median(draws)))
            assert meds[0] > meds[1] > meds[2]
            assert 10.0 * math.log10(meds[0] / meds[1]) > 10.0


def test_c04_clustering_oracle():
    with criterion(4, "complete linkage equals naive oracle on 1000 instances"):
        rng = np.random.default_rng(424242)
        mismatches = 0
        for _ in range(1000):
            angles, cap = random_cluster_instance(rng)
            fast = {frozenset(c) for c in complete_linkage_cluster(angles, cap)}
            slow = {frozenset(c) for c in naive_complete_linkage(angles, cap)}
            if fast != slow:
                mismatches += 1
        assert mismatches == 0


def test_c05_constraint_soundness():
    with criterion(5, "10,000 random configs agree with the independent checker"):
        scenario = two_gnb_scenario([
            vehicle("a", 50.0, 0.0),
            vehicle("b", 0.0, 60.0),
            vehicle("c", 150.0, 10.0),
        ])
        rng = random.Random(31337)
        for _ in range(10000):
            assignment = random_assignment(rng, scenario)
            mine = check_feasible(assignment, scenario, 0)
            ref = independent_verdict(assignment, scenario, 0)
            assert mine.feasible == (not ref)
            assert {v.constraint for v in mine.violations} == ref


def test_c06_optimum_dominance(lbcqi):
    with criterion(6, "optimum >= TL in all four cells; TL/opt >= 0.90 at N=2; "
                      "< 10 min"):
        lb, cqi = lbcqi
        start = time.time()
        ratios = {}
        for n_beams, width in [(2, 5.0), (2, 15.0), (4, 5.0), (4, 15.0)]:
            sc = synthesize_corridor(seed=SCENARIO_SEED, n_beams=n_beams,
                                     max_width_deg=width, **WORLD)
            total_opt = total_tl = 0.0
            for k in range(sc.n_steps):
                links = StepLinks(sc, k, RUN_SEED, lb)
                res = brute_force_optimum(sc, k, RUN_SEED, lb, cqi, links=links)
                tl_cfgs = [tl_design(sc, g, k) for g in sc.gnbs]
                tl_obj = objective_value(
                    corner_assignment(tl_cfgs, links, lb, cqi),
                    sc, k, lb, cqi, RUN_SEED, links=links, check=False,
                )
                assert res.objective_bits >= tl_obj, (n_beams, width, k)
                total_opt += res.objective_bits
                total_tl += tl_obj
            assert total_opt >= total_tl
            ratios[(n_beams, width)] = total_tl / total_opt
        for width in (5.0, 15.0):
            assert ratios[(2, width)] >= 0.90, ratios
        elapsed = time.time() - start
        print(f"  cell ratios: {ratios} ({elapsed:.0f}s)")
        assert elapsed < 600.0


def test_c07_widening_trend(lbcqi):
    with criterion(7, "widening 5 -> 15 degrees never lowers TL/Static totals"):
        _, cqi = lbcqi
        for n_beams in (2, 4):
            for strategy in (Strategy.TL, Strategy.STATIC):
                totals = {}
                for width in (5.0, 15.0):
                    sc = synthesize_intersection(seed=SCENARIO_SEED,
                                                 n_beams=n_beams,
                                                 max_width_deg=width, **WORLD)
                    ledger = run(sc, RunConfig(strategy=strategy, seed=RUN_SEED,
                                               scheduler=Scheduler.MAX_RATE), cqi)
                    totals[width] = ledger.total_delivered_bits
                assert totals[15.0] >= totals[5.0], (strategy, n_beams, totals)


def test_c08_served_time_claim(lbcqi):
    with criterion(8, "TL mean served time > Dynamic mean served time > 0"):
        _, cqi = lbcqi
        sc = synthesize_intersection(seed=SCENARIO_SEED, n_beams=2,
                                     max_width_deg=5.0, **WORLD)

        def mean_served(strategy):
            ledger = run(sc, RunConfig(strategy=strategy, seed=RUN_SEED), cqi)
            served = [m.served_time_s for m in ledger.per_vehicle.values()
                      if m.served_time_s > 0]
            return sum(served) / len(served) if served else 0.0

        tl = mean_served(Strategy.TL)
        dynamic = mean_served(Strategy.DYNAMIC)
        print(f"  TL mean served {tl:.2f}s, Dynamic {dynamic:.2f}s")
        assert tl > dynamic > 0.0


def test_c09_link_budget_sanity(lbcqi):
    with criterion(9, "effective <= Shannon on a 10^4 grid; CQI monotone; "
                      "Shannon(1) = Bw"):
        lb, cqi = lbcqi
        bw = lb.bandwidth_hz
        grid = np.logspace(-4, 7, 10**4)
        last = -1.0
        for s in grid:
            eff = effective_rate(float(s), bw, cqi)
            assert eff <= shannon_rate(float(s), bw)
            assert eff >= last
            last = eff
        assert shannon_rate(1.0, bw) == pytest.approx(bw)
        assert all(b > a for a, b in zip(cqi.efficiencies, cqi.efficiencies[1:]))


def test_c10_determinism(tmp_path):
    with criterion(10, "matrix outputs byte-identical across reruns and workers"):
        matrix = {
            "format": "tlbeam-matrix",
            "version": 1,
            "scenario": {"synthesize": "intersection", "n_steps": 10,
                         "arrival_rate": 0.5, "light_period": 10},
            "cells": [
                {"id": "tl", "strategy": "tl", "beams": 2, "width": 5.0, "seed": 3},
                {"id": "st", "strategy": "static", "beams": 2, "width": 5.0,
                 "seed": 3},
                {"id": "dy", "strategy": "dynamic", "beams": 2, "width": 5.0,
                 "seed": 3},
            ],
        }
        trees = []
        for name, workers in (("one", 1), ("two", 2)):
            out = tmp_path / name
            run_matrix(matrix, str(out), workers=workers)
            tree = {}
            for path in sorted(out.rglob("*")):
                if path.is_file():
                    tree[str(path.relative_to(out))] = path.read_bytes()
            trees.append(tree)
        assert trees[0].keys() == trees[1].keys()
        assert trees[0] == trees[1]
