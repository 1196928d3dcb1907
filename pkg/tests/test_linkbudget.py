"""SINR, Shannon bound, and CQI link adaptation."""

import math

import numpy as np
import pytest

from tlbeam.linkbudget import (
    CqiTable,
    LinkBudgetConfig,
    db_to_linear,
    effective_rate,
    shannon_rate,
    sinr,
)


@pytest.fixture(scope="module")
def cqi():
    return CqiTable.load()


class TestNoise:
    def test_default_noise_power(self):
        lb = LinkBudgetConfig()
        # -174 dBm/Hz + 10log10(400e6) + 7 dB
        expected_dbm = -174 + 10 * math.log10(400e6) + 7
        assert 10 * math.log10(lb.noise_power_w) + 30 == pytest.approx(expected_dbm)

    def test_bad_bandwidth(self):
        with pytest.raises(ValueError):
            LinkBudgetConfig(bandwidth_hz=0.0)


class TestSinr:
    def test_signal_equals_noise(self):
        assert sinr(2.0, 0.5, [], 1.0) == pytest.approx(1.0)

    def test_single_matched_interferer(self):
        s = sinr(1.0, 1.0, [(1.0, 1.0)], 1.0)
        assert s == pytest.approx(0.5)
        assert s < 1.0

    def test_hand_computed_three_interferers(self):
        # signal 2*3=6; interference 0.5*4 + 1*0.25 + 2*0.125 = 2.5; noise 0.5
        s = sinr(2.0, 3.0, [(0.5, 4.0), (1.0, 0.25), (2.0, 0.125)], 0.5)
        assert s == pytest.approx(6.0 / 3.0)

    def test_scale_invariance(self):
        interferers = [(0.3, 2.0), (0.9, 0.4)]
        base = sinr(1.2, 5.0, interferers, 1e-9)
        for c in (1e-3, 7.0, 1e6):
            scaled = sinr(1.2 * c, 5.0, [(p * c, g) for p, g in interferers], 1e-9 * c)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_nonpositive_noise_rejected(self):
        with pytest.raises(ValueError):
            sinr(1.0, 1.0, [], 0.0)


class TestShannonRate:
    def test_zero_sinr(self):
        assert shannon_rate(0.0, 400e6) == 0.0

    def test_unit_sinr_gives_bandwidth(self):
        assert shannon_rate(1.0, 400e6) == pytest.approx(4.0e8)

    def test_sinr_three_doubles_unit_rate(self):
        assert shannon_rate(3.0, 400e6) == pytest.approx(2 * shannon_rate(1.0, 400e6))


class TestCqiTable:
    def test_shape_and_monotonicity(self, cqi):
        assert len(cqi.efficiencies) == 16
        assert cqi.efficiencies[0] == 0.0
        assert all(b > a for a, b in zip(cqi.efficiencies, cqi.efficiencies[1:]))
        assert all(b > a for a, b in zip(cqi.min_sinr_db, cqi.min_sinr_db[1:]))

    def test_thresholds_follow_spectral_efficiency_rule(self, cqi):
        for eff, thr_db in zip(cqi.efficiencies[1:], cqi.min_sinr_db[1:]):
            rule = 10 * math.log10(2**eff - 1)
            assert thr_db == pytest.approx(rule, abs=1e-9)
            # stored threshold is never below the exact rule (Shannon safety)
            assert db_to_linear(thr_db) >= 2**eff - 1

    def test_below_lowest_threshold_is_zero(self, cqi):
        assert effective_rate(db_to_linear(-15.0), 400e6, cqi) == 0.0

    def test_saturation_at_top_efficiency(self, cqi):
        assert effective_rate(1e12, 400e6, cqi) == pytest.approx(400e6 * 5.5547)

    def test_boundary_inclusive(self, cqi):
        for idx in (1, 7, 15):
            at = float(cqi.thresholds_linear[idx])
            assert effective_rate(at, 400e6, cqi) == pytest.approx(
                400e6 * cqi.efficiencies[idx])
            below = at * (1 - 1e-12)
            assert effective_rate(below, 400e6, cqi) == pytest.approx(
                400e6 * cqi.efficiencies[idx - 1])

    def test_effective_below_shannon_dense_grid(self, cqi):
        grid = np.concatenate([
            np.logspace(-3, 6, 5000),
            db_to_linear(np.asarray(cqi.min_sinr_db[1:])),
        ])
        for s in grid:
            assert effective_rate(float(s), 400e6, cqi) <= shannon_rate(float(s), 400e6)

    def test_both_rates_monotone(self, cqi):
        grid = np.logspace(-3, 6, 2000)
        eff = [effective_rate(float(s), 400e6, cqi) for s in grid]
        sh = [shannon_rate(float(s), 400e6) for s in grid]
        assert all(b >= a for a, b in zip(eff, eff[1:]))
        assert all(b >= a for a, b in zip(sh, sh[1:]))

    def test_validation_catches_nonmonotone(self):
        with pytest.raises(ValueError):
            CqiTable((0.0, 0.3, 0.2), (-math.inf, -5.0, -1.0))
        with pytest.raises(ValueError):
            CqiTable((0.1, 0.3), (-math.inf, -5.0))

    def test_custom_table_file_override(self, tmp_path):
        path = tmp_path / "cqi.txt"
        path.write_text("0 0.0 -inf\n1 1.0 0.0\n2 2.0 4.7712125472\n")
        table = CqiTable.load(path)
        assert effective_rate(1.0, 100.0, table) == pytest.approx(100.0)
        assert effective_rate(3.001, 100.0, table) == pytest.approx(200.0)
