import math

import numpy as np
import pytest

from satrate import (
    GaussRegime,
    capacity,
    gaussian_curve,
    gaussian_rate,
    mc_gaussian_quad,
    regime_boundaries,
)
from satrate.errors import ConfigurationError
from satrate.gaussian import branch_values, two_user_gaussian_scenario

GAMMA = 0.79
R2 = 0.5


class TestClosedForm:
    def test_zero_snr(self):
        res = gaussian_rate(0.0, GAMMA, R2)
        assert res.r1_bound == 0.0
        assert res.regime is GaussRegime.INTERFERENCE_LIMITED

    def test_full_branch_at_10db(self):
        res = gaussian_rate(10.0, GAMMA, R2)
        assert res.regime is GaussRegime.FULL
        assert abs(res.thresholds[0] - 0.648) < 1e-3
        assert abs(res.r1_bound - math.log2(11.0)) < 1e-12
        assert abs(res.r1_bound - 3.459) < 1e-3

    def test_sumrate_branch_at_0db(self):
        res = gaussian_rate(1.0, GAMMA, R2)
        assert res.regime is GaussRegime.SUMRATE_LIMITED
        assert abs(res.thresholds[0] - 0.392) < 1e-3
        assert abs(res.thresholds[1] - 0.700) < 1e-3
        assert abs(res.r1_bound - 0.892) < 1e-3

    def test_positive_for_positive_snr(self):
        for snr_db in np.linspace(-30, 30, 25):
            assert gaussian_rate(10 ** (snr_db / 10), GAMMA, R2).r1_bound > 0.0

    def test_no_interferer_collapses_to_single_branch(self):
        for snr in (0.1, 1.0, 10.0):
            res = gaussian_rate(snr, 0.0, R2)
            assert abs(res.r1_bound - float(capacity(snr))) < 1e-12

    def test_input_validation(self):
        with pytest.raises(ConfigurationError):
            gaussian_rate(-1.0, GAMMA, R2)


class TestBoundaries:
    def test_closed_form_inversion(self):
        enter_sumrate, enter_full = regime_boundaries(GAMMA, R2)
        assert abs(enter_sumrate - 0.664) < 1e-3
        assert abs(enter_full - 1.9735) < 1e-3

    def test_no_full_regime_for_weak_interferer(self):
        # C(gamma^2) < r2 everywhere: the interferer is never decodable
        _, enter_full = regime_boundaries(0.3, 0.5)
        assert enter_full is None

    def test_continuity_at_boundaries(self):
        enter_sumrate, enter_full = regime_boundaries(GAMMA, R2)
        b = branch_values(enter_sumrate, GAMMA, R2)
        assert abs(b["interference_limited"] - b["sumrate_limited"]) < 1e-9
        b = branch_values(enter_full, GAMMA, R2)
        assert abs(b["sumrate_limited"] - b["full"]) < 1e-9

    def test_monotone_over_grid(self):
        grid = np.linspace(-10, 15, 101)
        curve = gaussian_curve(GAMMA, R2, grid)
        values = [p.r1_bound for p in curve.points]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_curve_reports_boundaries(self):
        curve = gaussian_curve(GAMMA, R2, [-10.0, 0.0, 10.0])
        assert abs(curve.boundary_enter_sumrate - 0.6637) < 1e-3
        assert abs(curve.boundary_enter_full - 1.9735) < 1e-3

    def test_grid_validation(self):
        with pytest.raises(ConfigurationError):
            gaussian_curve(GAMMA, R2, [])
        with pytest.raises(ConfigurationError):
            gaussian_curve(GAMMA, R2, [0.0, 0.0])


class TestMonteCarloAgreement:
    @pytest.mark.parametrize("snr_db", (-5.0, 0.0, 6.0))
    def test_each_quantity_matches_closed_form(self, snr_db):
        snr = 10 ** (snr_db / 10)
        est = mc_gaussian_quad(snr, GAMMA, 2 * 10**5, seed=31)
        g2 = GAMMA * GAMMA
        expected = {
            "i1": capacity(snr),
            "i2": capacity(g2 * snr),
            "ij": capacity((1 + g2) * snr),
            "ix2y": capacity(g2 * snr / (1 + snr)),
            "i_s": capacity(snr / (1 + g2 * snr)),
        }
        for name, want in expected.items():
            got = getattr(est, name)
            assert abs(got.value - float(want)) < 0.02, name

    def test_gamma_phase_is_irrelevant(self):
        flat = mc_gaussian_quad(2.0, GAMMA, 10**5, seed=37)
        rot = mc_gaussian_quad(2.0, GAMMA * np.exp(1j * 1.1), 10**5, seed=37)
        assert abs(flat.ij.value - rot.ij.value) < 3.0 * (flat.ij.std_err + rot.ij.std_err)

    def test_scenario_requires_weak_interferer(self):
        with pytest.raises(ConfigurationError):
            two_user_gaussian_scenario(1.2)
