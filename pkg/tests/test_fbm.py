"""Tests for the fractional p-adic Brownian motion models (padic_series.fbm)."""

import numpy as np
import pytest

from padic_series import fbm
from padic_series.errors import (
    InvalidLengthError,
    InvalidParameterError,
    PreconditionError,
    ResourceLimitError,
)
from padic_series.models import (
    CovarianceModel,
    EmpiricalCovariance,
    NormValue,
    SimulationBatch,
    SimulationConfig,
    UltrametricIndex,
    WaveletIndex,
)
from padic_series.wavelets import wavelet_indices, wavelet_samples


def _idx(n, p=2):
    return UltrametricIndex(p, n)


@pytest.fixture(scope="module")
def level_zero_batch():
    """p=2, alpha=1, J=5 at level 0 with 20000 realizations."""
    return fbm.simulate(SimulationConfig(2, 1.0, 5, realizations=20000, seed=20240611))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


class TestRho:
    def test_zero(self):
        assert fbm.rho(NormValue.zero(), CovarianceModel(3, 0.7)) == 0.0

    def test_level_zero_examples(self):
        model = CovarianceModel(2, 1.0)
        assert fbm.rho(NormValue.of(1), model) == pytest.approx(1.0)
        assert fbm.rho(NormValue.of(2), model) == pytest.approx(2.5)
        assert fbm.rho(NormValue.of(3), model) == pytest.approx(5.5)

    def test_level_one_paper(self):
        model = CovarianceModel(2, 1.0, level=1, variant="paper")
        assert fbm.rho(NormValue.of(2), model) == pytest.approx(2.75)

    def test_level_one_alternative(self):
        model = CovarianceModel(2, 1.0, level=1, variant="alternative")
        assert fbm.rho(NormValue.of(2), model) == pytest.approx(2.0)

    def test_variants_agree_at_level_zero(self):
        for e in range(1, 6):
            paper = fbm.rho(NormValue.of(e), CovarianceModel(3, 0.8, 0, "paper"))
            alternative = fbm.rho(NormValue.of(e), CovarianceModel(3, 0.8, 0, "alternative"))
            assert paper == pytest.approx(alternative)

    @pytest.mark.parametrize("level,variant", [(0, "paper"), (0, "alternative"), (1, "alternative")])
    def test_half_order_limit(self, level, variant):
        for p in (2, 3):
            for e in range(level + 1, level + 5):
                norm = NormValue.of(e)
                branch = fbm.rho(norm, CovarianceModel(p, 0.5, level, variant))
                assert branch == pytest.approx((1 - 1 / p) * (e - level) + 1 / p)
                for alpha in (0.5 - 1e-6, 0.5 + 1e-6):
                    nearby = fbm.rho(norm, CovarianceModel(p, alpha, level, variant))
                    assert abs(nearby - branch) <= 1e-4

    def test_half_order_paper_variant_diverges(self):
        with pytest.raises(InvalidParameterError):
            fbm.rho(NormValue.of(2), CovarianceModel(2, 0.5, level=1, variant="paper"))

    def test_alpha_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            CovarianceModel(2, 0.0)

    def test_variogram(self):
        model = CovarianceModel(2, 1.0)
        assert fbm.variogram(NormValue.of(2), model) == pytest.approx(5.0)


class TestCovariance:
    def test_origin(self):
        model = CovarianceModel(2, 1.3)
        for x in range(16):
            assert fbm.covariance(_idx(x), _idx(0), model) == 0.0

    def test_examples(self):
        model = CovarianceModel(2, 1.0)
        assert fbm.covariance(_idx(1), _idx(1), model) == pytest.approx(2.0)
        assert fbm.covariance(_idx(2), _idx(3), model) == pytest.approx(4.0)

    def test_diagonal_is_twice_rho(self):
        model = CovarianceModel(3, 0.9)
        for x in range(1, 27):
            e = len(np.base_repr(x, 3))
            expected = 2 * fbm.rho(NormValue.of(e), model)
            assert fbm.covariance(_idx(x, 3), _idx(x, 3), model) == pytest.approx(expected)

    def test_level_indices_must_be_ball_representatives(self):
        model = CovarianceModel(2, 1.0, level=1)
        assert fbm.covariance(_idx(2), _idx(4), model) == pytest.approx(
            fbm.rho(NormValue.of(2), model)
            + fbm.rho(NormValue.of(3), model)
            - fbm.rho(NormValue.of(3), model)
        )
        with pytest.raises(InvalidParameterError):
            fbm.covariance(_idx(1), _idx(2), model)

    def test_prime_mismatch(self):
        with pytest.raises(InvalidParameterError):
            fbm.covariance(_idx(1, 3), _idx(1, 3), CovarianceModel(2, 1.0))


class TestModelMatrix:
    def test_small_example(self):
        matrix = fbm.model_covariance_matrix(CovarianceModel(2, 1.0), 2)
        assert np.allclose(np.diag(matrix), [0, 2, 5, 5])
        assert np.all(matrix[0] == 0) and np.all(matrix[:, 0] == 0)

    def test_matches_pointwise_covariance(self):
        model = CovarianceModel(3, 1.2, level=1, variant="alternative")
        matrix = fbm.model_covariance_matrix(model, 3)
        for x in range(9):
            for y in range(9):
                expected = fbm.covariance(_idx(3 * x, 3), _idx(3 * y, 3), model)
                assert matrix[x, y] == pytest.approx(expected)

    @pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5])
    def test_positive_semidefinite(self, alpha):
        for p in (2, 3):
            for J in range(1, 6 if p == 2 else 5):
                matrix = fbm.model_covariance_matrix(CovarianceModel(p, alpha), J)
                assert np.array_equal(matrix, matrix.T)
                assert np.linalg.eigvalsh(matrix).min() >= -1e-9

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            fbm.model_covariance_matrix(CovarianceModel(2, 1.0), 6, cap=32)

    def test_window_too_small(self):
        with pytest.raises(InvalidParameterError):
            fbm.model_covariance_matrix(CovarianceModel(2, 1.0, level=2), 2)


class TestVariogramShape:
    def test_staircase(self):
        model = CovarianceModel(2, 1.0)
        table = fbm.variogram_table(model, 6)
        assert table["lag"].tolist() == list(range(1, 64))
        for exponent, run in table.groupby("norm_exponent"):
            assert run["variogram"].nunique() == 1
            assert run["lag"].min() == 2 ** (exponent - 1)
            assert run["lag"].max() == 2**exponent - 1
        for h in (1, 5, 17, 63):
            row = table[table["lag"] == h].iloc[0]
            assert row["variogram"] == fbm.lag_variogram(h, model)

    def test_staircase_ternary(self):
        table = fbm.variogram_table(CovarianceModel(3, 0.7), 4)
        assert (table.groupby("run")["variogram"].nunique() == 1).all()
        assert table["run"].max() == 3

    def test_power_form(self):
        slope = fbm.power_law_slope(CovarianceModel(2, 1.0), 10)
        assert abs(slope - 1.0) <= 0.05

    def test_lag_zero(self):
        assert fbm.lag_variogram(0, CovarianceModel(2, 1.0)) == 0.0


class TestIdentities:
    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_character_sums(self, p):
        first, second = fbm.character_sum_identities(p)
        assert abs(first - 2 * p) <= 1e-12
        assert abs(second + p) <= 1e-12


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


class TestSimulate:
    def test_origin_is_zero(self):
        batch = fbm.simulate(SimulationConfig(3, 0.8, 3, realizations=50, seed=1))
        assert np.abs(batch.realizations[:, 0]).max() <= 1e-12
        assert batch.realizations.shape == (50, 27)

    def test_origin_is_zero_at_level(self):
        batch = fbm.simulate(SimulationConfig(2, 1.0, 5, level=2, realizations=20, seed=1))
        assert batch.realizations.shape == (20, 8)
        assert np.all(batch.realizations[:, 0] == 0)

    def test_deterministic_across_workers(self):
        config = SimulationConfig(2, 1.0, 4, realizations=1100, seed=7)
        serial = fbm.simulate(config, workers=1)
        threaded = fbm.simulate(config, workers=4)
        assert np.array_equal(serial.realizations, threaded.realizations)

    def test_workers_from_environment(self, monkeypatch):
        monkeypatch.setenv("PADIC_SERIES_WORKERS", "3")
        config = SimulationConfig(2, 1.0, 3, realizations=600, seed=2)
        assert np.array_equal(
            fbm.simulate(config).realizations, fbm.simulate(config, workers=1).realizations
        )

    def test_coefficients_independent_of_batch_size(self):
        small = SimulationConfig(3, 1.0, 2, realizations=5, seed=9)
        large = SimulationConfig(3, 1.0, 2, realizations=500, seed=9)
        assert np.array_equal(fbm.noise_coefficients(small, 4), fbm.noise_coefficients(large, 4))
        assert not np.array_equal(
            fbm.noise_coefficients(small, 4), fbm.noise_coefficients(small, 5)
        )

    def test_coefficients_independent_of_window(self):
        def by_index(config, m):
            indices = wavelet_indices(config.prime, config.J, config.level)
            return dict(zip(indices, fbm.noise_coefficients(config, m)))

        small = by_index(SimulationConfig(3, 1.0, 2, seed=9), 4)
        large = by_index(SimulationConfig(3, 0.7, 4, seed=9), 4)
        coarse = by_index(SimulationConfig(3, 1.0, 4, level=2, seed=9), 4)
        assert small
        for w, value in small.items():
            assert large[w] == value
        for w, value in coarse.items():
            assert large[w] == value

    def test_seed_changes_output(self):
        a = fbm.simulate(SimulationConfig(2, 1.0, 3, realizations=3, seed=1))
        b = fbm.simulate(SimulationConfig(2, 1.0, 3, realizations=3, seed=2))
        assert not np.array_equal(a.realizations, b.realizations)

    def test_coarser_wavelets_cancel_on_window(self):
        for p, J in ((2, 4), (3, 3)):
            for k in range(1, p):
                psi = wavelet_samples(p, J + 1, 0, WaveletIndex(k, J + 1, 0))[: p**J]
                assert np.abs(psi - psi[0]).max() <= 1e-12

    def test_synthesis_matrix_first_column(self):
        matrix = fbm.synthesis_matrix(SimulationConfig(3, 1.4, 3, level=1))
        assert matrix.shape == (8, 9)
        assert np.all(matrix[:, 0] == 0)

    def test_real_part_output(self):
        batch = fbm.simulate(
            SimulationConfig(2, 1.0, 3, realizations=10, seed=3, output="real-part")
        )
        assert not np.iscomplexobj(batch.realizations)

    def test_invalid_config(self):
        with pytest.raises(InvalidParameterError):
            SimulationConfig(2, 1.0, 1, level=1)
        with pytest.raises(InvalidParameterError):
            SimulationConfig(2, 1.0, 3, realizations=0)
        with pytest.raises(InvalidParameterError):
            SimulationConfig(6, 1.0, 3)


# ---------------------------------------------------------------------------
# Estimation and verification
# ---------------------------------------------------------------------------


class TestEstimate:
    def test_zero_batch(self):
        config = SimulationConfig(2, 1.0, 2, realizations=3)
        empirical = fbm.estimate(SimulationBatch(config, np.zeros((3, 4), dtype=complex)))
        assert np.all(empirical.matrix == 0)
        assert np.all(empirical.standard_errors == 0)

    def test_hand_batch(self):
        config = SimulationConfig(2, 1.0, 1, realizations=2)
        batch = SimulationBatch(config, np.array([[0, 1 + 0j], [0, 1j]]))
        empirical = fbm.estimate(batch)
        assert empirical.matrix[1, 1] == pytest.approx(1.0)
        assert empirical.matrix[0, 0] == 0
        assert empirical.realizations == 2

    def test_hermitian(self):
        batch = fbm.simulate(SimulationConfig(3, 0.7, 2, realizations=200, seed=4))
        matrix = fbm.estimate(batch).matrix
        assert np.allclose(matrix, matrix.conj().T)
        assert np.all(np.diag(matrix).real >= 0)

    def test_empty_batch(self):
        config = SimulationConfig(2, 1.0, 1)
        with pytest.raises(PreconditionError):
            fbm.estimate(SimulationBatch(config, np.zeros((0, 2), dtype=complex)))

    def test_single_realization(self):
        config = SimulationConfig(2, 1.0, 1)
        with pytest.raises(PreconditionError):
            fbm.estimate(SimulationBatch(config, np.zeros((1, 2), dtype=complex)))


class TestVerify:
    def test_model_against_itself(self):
        model = CovarianceModel(2, 1.0)
        matrix = fbm.model_covariance_matrix(model, 3)
        exact = EmpiricalCovariance(matrix, np.zeros_like(matrix), realizations=1)
        report = fbm.verify(model, exact)
        assert report.max_abs_z == 0.0
        assert report.exact_mismatches == 0
        assert report.frac_within_2 == 1.0
        assert report.winner is None

    def test_exact_mismatch_counted(self):
        model = CovarianceModel(2, 1.0)
        matrix = fbm.model_covariance_matrix(model, 2)
        matrix[1, 2] += 0.5
        report = fbm.verify(model, EmpiricalCovariance(matrix, np.zeros_like(matrix), 1))
        assert report.exact_mismatches == 1
        assert report.max_abs_z == float("inf")

    def test_shape_mismatch(self):
        model = CovarianceModel(2, 1.0)
        with pytest.raises(InvalidLengthError):
            fbm.verify(model, EmpiricalCovariance(np.zeros((3, 3)), np.zeros((3, 3)), 1))
        with pytest.raises(InvalidLengthError):
            fbm.verify(model, EmpiricalCovariance(np.zeros((4, 4)), np.zeros((2, 2)), 1))

    def test_level_zero_covariance(self, level_zero_batch):
        empirical = fbm.estimate(level_zero_batch)
        report = fbm.verify(CovarianceModel(2, 1.0), empirical)
        assert report.max_abs_z <= 5.0
        assert report.frac_within_2 >= 0.93
        assert np.all(level_zero_batch.realizations[:, 0] == 0)
        se = empirical.standard_errors[1, 1]
        assert abs(empirical.matrix[1, 1] - 2.0) <= 5 * se

    @pytest.mark.parametrize("p,alpha,J", [(2, 0.75, 5), (3, 1.0, 3)])
    def test_level_zero_other_parameters(self, p, alpha, J):
        batch = fbm.simulate(SimulationConfig(p, alpha, J, realizations=20000, seed=99))
        report = fbm.verify(CovarianceModel(p, alpha), fbm.estimate(batch))
        assert report.max_abs_z <= 5.0
        assert report.frac_within_2 >= 0.93

    def test_real_part_halves_covariance(self):
        config = SimulationConfig(2, 1.0, 3, realizations=20000, seed=5, output="real-part")
        report = fbm.verify(config.model(), fbm.estimate(fbm.simulate(config)))
        assert report.max_abs_z <= 5.0

    def test_level_one_adjudication(self):
        config = SimulationConfig(2, 1.0, 6, level=1, realizations=20000, seed=31)
        report = fbm.verify(config.model(), fbm.estimate(fbm.simulate(config)))
        assert set(report.variant_scores) == {"paper", "alternative"}
        assert report.winner == "alternative"
        assert report.accepted_variants == ["alternative"]
        assert report.variant_scores["paper"].max_abs_z > 5.0
        payload = report.to_dict()
        assert payload["winner"] == "alternative"
        assert payload["variant_scores"]["alternative"]["max_abs_z"] <= 5.0

    def test_half_order_falls_back_to_defined_variant(self):
        config = SimulationConfig(2, 0.5, 4, level=1, realizations=200, seed=13)
        report = fbm.verify(config.model("paper"), fbm.estimate(fbm.simulate(config)))
        assert set(report.variant_scores) == {"alternative"}
        assert report.winner == "alternative"
        assert report.variant == "alternative"
        assert report.max_abs_z == report.variant_scores["alternative"].max_abs_z
        assert report.to_dict()["variant"] == "alternative"

    def test_requested_variant_is_reported(self):
        config = SimulationConfig(2, 1.0, 3, level=1, realizations=200, seed=14)
        empirical = fbm.estimate(fbm.simulate(config))
        report = fbm.verify(config.model("paper"), empirical)
        assert report.variant == "paper"
        assert report.max_abs_z == report.variant_scores["paper"].max_abs_z


class TestWhiteness:
    def test_recovers_noise_exactly(self):
        config = SimulationConfig(3, 1.2, 3, realizations=40, seed=17)
        recovered = fbm.recover_noise(fbm.simulate(config))
        drawn = np.vstack([fbm.noise_coefficients(config, m) for m in range(40)])
        assert np.abs(recovered - drawn).max() <= 1e-10

    def test_white(self, level_zero_batch):
        report = fbm.whiteness_check(level_zero_batch, 1.0)
        assert report.coefficients == 31
        assert report.realizations == 20000
        assert report.variance_outliers <= 1
        assert report.correlation_outliers <= 1
        assert report.mean_outliers <= 1
        assert report.to_dict()["threshold"] == 3.0

    def test_wrong_order_is_not_white(self, level_zero_batch):
        report = fbm.whiteness_check(level_zero_batch, 0.5)
        # scales j >= 2 carry variance p^(j-1) instead of 1
        assert report.variance_outliers >= 15
        assert not report.passed

    def test_level_must_be_zero(self):
        batch = fbm.simulate(SimulationConfig(2, 1.0, 3, level=1, realizations=5))
        with pytest.raises(InvalidParameterError):
            fbm.whiteness_check(batch, 1.0)

    def test_real_part_rejected(self):
        batch = fbm.simulate(SimulationConfig(2, 1.0, 3, realizations=5, output="real-part"))
        with pytest.raises(PreconditionError):
            fbm.whiteness_check(batch, 1.0)
