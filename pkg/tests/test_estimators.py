import numpy as np
import pytest
from numpy.testing import assert_allclose

import longmem.estimators as est_mod
from longmem import (
    ArfimaParams,
    DegenerateInputError,
    EstimatorSpec,
    InvalidParameterError,
    PeriodogramSlice,
    asymptotic_sd,
    estimate,
    lpr_estimate,
    simulate_gaussian,
    splw_estimate,
)
from longmem.estimators import _objective_value, _whittle_profile
from longmem.fracdiff import apply_frac_filter
from longmem.spectral import fourier_frequencies


def synthetic_slice(T, N, coeffs):
    """Periodogram slice with log-ordinates an exact function of frequency.

    coeffs = (a, b, c2, c4): log I_j = a + b*(-2 log l_j) + c2 l^2 + c4 l^4.
    """
    freqs = fourier_frequencies(T, N)
    a, b, c2, c4 = coeffs
    logI = a + b * (-2.0 * np.log(freqs)) + c2 * freqs ** 2 + c4 * freqs ** 4
    return PeriodogramSlice(T=T, freqs=freqs, ordinates=np.exp(logI))


class TestSpec:
    def test_family_validated(self):
        with pytest.raises(InvalidParameterError):
            EstimatorSpec("ols", 0)

    def test_order_validated(self):
        with pytest.raises(InvalidParameterError):
            EstimatorSpec("lpr", 4)

    def test_exponent_validated(self):
        with pytest.raises(InvalidParameterError):
            EstimatorSpec("lpr", 0, bandwidth_exponent=1.2)


class TestAsymptoticSd:
    def test_lpr_baseline(self):
        assert_allclose(asymptotic_sd(EstimatorSpec("lpr", 0), 77),
                        0.07308005899172838, rtol=1e-12)

    def test_splw_baseline(self):
        assert_allclose(asymptotic_sd(EstimatorSpec("splw", 0), 77),
                        0.05698028822981897, rtol=1e-12)

    def test_inflation_psi1(self):
        # psi_1^2 = 2.25 so psi_1 = 1.5
        want = np.sqrt(np.pi ** 2 / 24) * 1.5 / 10.0
        assert_allclose(asymptotic_sd(EstimatorSpec("lpr", 1), 100), want)

    def test_inflation_monotone(self):
        sds = [asymptotic_sd(EstimatorSpec("splw", P), 77) for P in range(4)]
        assert np.all(np.diff(sds) > 0)


class TestLprRegression:
    @pytest.mark.parametrize("P", [0, 1, 2, 3])
    def test_exact_log_linear_signal(self, P, monkeypatch):
        slice_ = synthetic_slice(500, 77, (1.3, 0.35, 0.0, 0.0))
        monkeypatch.setattr(est_mod, "periodogram", lambda y, N: slice_)
        res = lpr_estimate(np.zeros(500), EstimatorSpec("lpr", P))
        assert abs(res.d_hat - 0.35) <= 1e-10

    def test_extra_regressor_gets_zero_weight(self, monkeypatch):
        # log-periodogram an exact degree-1 even polynomial plus log term:
        # P=1 and P=2 must agree
        slice_ = synthetic_slice(500, 77, (0.4, 0.22, -0.8, 0.0))
        monkeypatch.setattr(est_mod, "periodogram", lambda y, N: slice_)
        d1 = lpr_estimate(np.zeros(500), EstimatorSpec("lpr", 1)).d_hat
        d2 = lpr_estimate(np.zeros(500), EstimatorSpec("lpr", 2)).d_hat
        assert abs(d1 - 0.22) <= 1e-9
        assert abs(d2 - d1) <= 1e-9

    def test_white_noise_sane(self):
        spec = EstimatorSpec("lpr", 0)
        hits = 0
        for r in range(300):
            y = np.random.default_rng(300 + r).standard_normal(100)
            res = lpr_estimate(y, spec)
            hits += abs(res.d_hat) < 4 * res.asymptotic_sd
        assert hits >= 297  # >= 99% of seeds

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateInputError):
            lpr_estimate(np.full(100, 2.0), EstimatorSpec("lpr", 0))

    def test_arfima_bias_T100(self):
        # mean LPR(0) bias near 0.1391 for d=0, phi=0.3, T=100
        spec = EstimatorSpec("lpr", 0)
        params = ArfimaParams(d=0.0, phi=0.3)
        vals = [
            lpr_estimate(
                simulate_gaussian(params, 100, np.random.default_rng(2000 + r)), spec
            ).d_hat
            for r in range(400)
        ]
        assert abs(np.mean(vals) - 0.1391) <= 0.023  # 3 MC standard errors


class TestSplw:
    def test_scale_invariance(self):
        y = simulate_gaussian(
            ArfimaParams(d=0.3, phi=0.3), 500, np.random.default_rng(12)
        )
        for P in (0, 1, 2):
            spec = EstimatorSpec("splw", P)
            base = splw_estimate(y, spec).d_hat
            assert abs(splw_estimate(1234.567 * y, spec).d_hat - base) <= 1e-9
            assert abs(splw_estimate(1e-3 * y, spec).d_hat - base) <= 1e-9

    def test_shift_invariance(self):
        y = simulate_gaussian(
            ArfimaParams(d=0.2, phi=0.6), 500, np.random.default_rng(13)
        )
        for P in (0, 1, 2):
            spec = EstimatorSpec("splw", P)
            base = splw_estimate(y, spec).d_hat
            assert abs(splw_estimate(y + 57.25, spec).d_hat - base) <= 1e-9

    def test_refinement_never_worse_than_grid(self):
        for seed in range(6):
            y = simulate_gaussian(
                ArfimaParams(d=0.25, phi=0.6), 300, np.random.default_rng(seed)
            )
            for P in (0, 1):
                spec = EstimatorSpec("splw", P)
                res = splw_estimate(y, spec)
                pgram = est_mod.periodogram(y, res.N)
                c, g, logI = _whittle_profile(pgram, P)
                grid = np.linspace(est_mod.SEARCH_LO, est_mod.SEARCH_HI, 251)
                grid_best = min(_objective_value(d, c, g, logI) for d in grid)
                assert res.diagnostics["objective"] <= grid_best + 1e-12

    def test_boundary_flag_on_overdifferenced_data(self):
        w = np.random.default_rng(11).standard_normal(400)
        res = splw_estimate(apply_frac_filter(w, 2.2), EstimatorSpec("splw", 0))
        assert res.diagnostics["boundary"]
        assert res.d_hat == est_mod.SEARCH_LO

    def test_interior_minimum_not_flagged(self):
        y = simulate_gaussian(
            ArfimaParams(d=0.2, phi=0.3), 500, np.random.default_rng(14)
        )
        res = splw_estimate(y, EstimatorSpec("splw", 0))
        assert not res.diagnostics["boundary"]

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateInputError):
            splw_estimate(np.full(100, 1.0), EstimatorSpec("splw", 0))

    def test_arfima_bias_T100(self):
        # mean SPLW(0) bias near 0.1300 for d=0, phi=0.3, T=100
        spec = EstimatorSpec("splw", 0)
        params = ArfimaParams(d=0.0, phi=0.3)
        vals = [
            splw_estimate(
                simulate_gaussian(params, 100, np.random.default_rng(2000 + r)), spec
            ).d_hat
            for r in range(400)
        ]
        assert abs(np.mean(vals) - 0.1300) <= 0.020  # 3 MC standard errors


class TestMeanInvariance:
    def test_both_families_unchanged_by_level(self):
        y = simulate_gaussian(
            ArfimaParams(d=0.3, phi=0.6), 400, np.random.default_rng(15)
        )
        for family in ("lpr", "splw"):
            spec = EstimatorSpec(family, 1)
            a = estimate(y, spec).d_hat
            b = estimate(y - 123.0, spec).d_hat
            assert abs(a - b) <= 1e-9


def test_dispatch_matches_direct_calls():
    y = simulate_gaussian(ArfimaParams(d=0.1, phi=0.3), 300, np.random.default_rng(16))
    assert estimate(y, EstimatorSpec("lpr", 1)).d_hat == lpr_estimate(
        y, EstimatorSpec("lpr", 1)
    ).d_hat
    assert estimate(y, EstimatorSpec("splw", 1)).d_hat == splw_estimate(
        y, EstimatorSpec("splw", 1)
    ).d_hat
