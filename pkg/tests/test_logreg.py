"""Equal-prior logistic regression training, application, serialization."""

import json
import math

import numpy as np
import pytest

from llrcal import (
    CalibrationWeights,
    DataError,
    IllConditionedError,
    LabeledScores,
    LlrSet,
    ParallelScores,
    SeparationError,
    TrainConfig,
    apply,
    cllr,
    figure_config,
    model_to_affine,
    objective,
    sample_scores,
    train_calibration,
    train_fusion,
)

LN2 = math.log(2.0)


def softplus(t):
    return float(np.logaddexp(0.0, t))


def overlapping_scores(rng, n_so=60, n_do=60):
    """Random training set with guaranteed class overlap (no separation)."""
    so = rng.normal(0.4, 1.2, size=n_so)
    do = rng.normal(-0.4, 1.2, size=n_do)
    # force one inversion so no affine map can separate the classes
    so[0] = -3.0
    do[0] = 3.0
    return LabeledScores(so=so, do=do)


def grid_search_objective(data, config, alpha_window, beta_window, rounds=4, n=201):
    """Independent minimizer: iteratively refined brute-force grid."""
    (a_lo, a_hi), (b_lo, b_hi) = alpha_window, beta_window
    best = (math.inf, None, None)
    for _ in range(rounds):
        alphas = np.linspace(a_lo, a_hi, n)
        betas = np.linspace(b_lo, b_hi, n)
        for a in alphas:
            z_so = a + data.so[:, 0] * betas[:, None]
            z_do = a + data.do[:, 0] * betas[:, None]
            j = (
                np.mean(np.logaddexp(0.0, -z_so), axis=1) / 2
                + np.mean(np.logaddexp(0.0, z_do), axis=1) / 2
                + 0.5 * config.ridge_lambda * betas**2
            )
            k = int(np.argmin(j))
            if j[k] < best[0]:
                best = (float(j[k]), float(a), float(betas[k]))
        _, a_c, b_c = best
        a_span = (a_hi - a_lo) / (n - 1) * 4
        b_span = (b_hi - b_lo) / (n - 1) * 4
        a_lo, a_hi = a_c - a_span, a_c + a_span
        b_lo, b_hi = b_c - b_span, b_c + b_span
    return best[1], best[2]


class TestObjective:
    def test_zero_weights_give_ln2(self):
        data = ParallelScores(so=[[1.0], [0.3]], do=[[-2.0]])
        w = CalibrationWeights(0.0, [0.0])
        assert objective(w, data) == pytest.approx(LN2, abs=1e-15)

    def test_perfect_separation_limit(self):
        data = ParallelScores(so=[[1.0]], do=[[-1.0]])
        w = CalibrationWeights(0.0, [40.0])
        assert objective(w, data) < 1e-12

    def test_hand_value(self):
        data = ParallelScores(so=[[1.0]], do=[[-1.0]])
        w = CalibrationWeights(0.0, [1.0])
        expected = softplus(-1.0)
        assert objective(w, data) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.313262, abs=5e-7)

    def test_ridge_term(self):
        data = ParallelScores(so=[[1.0]], do=[[-1.0]])
        w = CalibrationWeights(0.5, [2.0, 0.0])
        with pytest.raises(DataError):
            objective(w, data)  # dimension mismatch
        w = CalibrationWeights(0.0, [1.0])
        cfg = TrainConfig(ridge_lambda=0.5)
        assert objective(w, data, cfg) == pytest.approx(softplus(-1.0) + 0.25, abs=1e-15)

    def test_empty_class_rejected(self):
        data = ParallelScores(so=[[1.0]], do=np.empty((0, 1)))
        with pytest.raises(DataError):
            objective(CalibrationWeights(0.0, [1.0]), data)


class TestTrainCalibration:
    @pytest.mark.parametrize("fid,tol", [("fig4", 0.03), ("fig7", 0.05)])
    def test_recovers_analytic_map(self, fid, tol):
        cfg = figure_config(fid)
        scores = sample_scores(cfg.model, 200_000, 200_000, seed=42)
        w = train_calibration(scores)
        assert w.alpha == pytest.approx(cfg.expected_alpha, abs=tol)
        assert w.betas[0] == pytest.approx(cfg.expected_beta, abs=tol)

    def test_separation_raises_without_ridge(self):
        with pytest.raises(SeparationError, match="separation"):
            train_calibration(LabeledScores(so=[1.0], do=[-1.0]))

    def test_quasi_complete_separation_raises(self):
        # shared boundary point: classes weakly separated, no finite optimum
        with pytest.raises(SeparationError):
            train_calibration(LabeledScores(so=[1.0, 0.0], do=[-1.0, 0.0]))

    def test_uninformative_data_trains_to_zero_weights(self):
        w = train_calibration(LabeledScores(so=[1.0, 2.0], do=[1.0, 2.0]))
        assert w.alpha == 0.0
        assert w.betas == (0.0,)

    def test_separated_with_ridge_matches_grid_oracle(self):
        config = TrainConfig(ridge_lambda=0.001)
        scores = LabeledScores(so=[1.0], do=[-1.0])
        w = train_calibration(scores, config)
        a_ref, b_ref = grid_search_objective(
            ParallelScores.from_labeled(scores), config, (-2.0, 2.0), (0.0, 10.0)
        )
        assert w.alpha == pytest.approx(a_ref, abs=1e-4)
        assert w.betas[0] == pytest.approx(b_ref, abs=1e-4)

    def test_overlapping_set_matches_grid_oracle(self):
        rng = np.random.default_rng(17)
        scores = overlapping_scores(rng, 40, 40)
        config = TrainConfig()
        w = train_calibration(scores, config)
        a_ref, b_ref = grid_search_objective(
            ParallelScores.from_labeled(scores), config, (-2.0, 2.0), (0.0, 6.0)
        )
        assert w.alpha == pytest.approx(a_ref, abs=1e-4)
        assert w.betas[0] == pytest.approx(b_ref, abs=1e-4)

    def test_deterministic(self):
        rng = np.random.default_rng(29)
        scores = overlapping_scores(rng)
        w1 = train_calibration(scores)
        w2 = train_calibration(scores)
        assert w1.alpha == w2.alpha
        assert w1.betas == w2.betas

    def test_provenance_recorded(self):
        rng = np.random.default_rng(31)
        scores = overlapping_scores(rng, 25, 35)
        cfg = TrainConfig(ridge_lambda=0.01)
        w = train_calibration(scores, cfg)
        assert (w.n_so, w.n_do) == (25, 35)
        assert w.ridge_lambda == 0.01

    def test_empty_class_rejected(self):
        with pytest.raises(DataError):
            train_calibration(LabeledScores(so=[], do=[1.0, 2.0]))


class TestTrainFusion:
    def test_single_column_reduces_to_calibration(self):
        rng = np.random.default_rng(37)
        scores = overlapping_scores(rng)
        w_cal = train_calibration(scores)
        w_fus = train_fusion(ParallelScores.from_labeled(scores))
        assert w_fus.alpha == w_cal.alpha  # bit-identical path
        assert w_fus.betas == w_cal.betas

    def test_duplicated_column_with_ridge(self):
        rng = np.random.default_rng(41)
        scores = overlapping_scores(rng, 80, 80)
        config = TrainConfig(ridge_lambda=1e-6)
        w_single = train_calibration(scores, config)
        doubled = ParallelScores(
            so=np.column_stack([scores.so, scores.so]),
            do=np.column_stack([scores.do, scores.do]),
        )
        w_dup = train_fusion(doubled, config)
        assert w_dup.betas[0] == pytest.approx(w_dup.betas[1], abs=1e-9)
        grid = np.linspace(
            min(scores.so.min(), scores.do.min()),
            max(scores.so.max(), scores.do.max()),
            200,
        )
        for s in grid:
            assert apply(w_dup, [s, s]) == pytest.approx(
                apply(w_single, [s]), abs=1e-3
            )

    def test_duplicated_column_without_ridge_ill_conditioned(self):
        rng = np.random.default_rng(43)
        scores = overlapping_scores(rng)
        doubled = ParallelScores(
            so=np.column_stack([scores.so, scores.so]),
            do=np.column_stack([scores.do, scores.do]),
        )
        with pytest.raises(IllConditionedError):
            train_fusion(doubled)

    def test_informative_dimension_gets_larger_weight(self):
        rng = np.random.default_rng(47)
        n = 600
        so = np.column_stack([rng.normal(0.25, 1.0, n), rng.normal(1.0, 1.0, n)])
        do = np.column_stack([rng.normal(-0.25, 1.0, n), rng.normal(-1.0, 1.0, n)])
        w = train_fusion(ParallelScores(so=so, do=do))
        assert abs(w.betas[1]) > abs(w.betas[0])
        assert w.betas[1] > 0

    def test_ragged_rows_rejected(self):
        with pytest.raises(DataError):
            ParallelScores(so=[[1.0, 2.0], [1.0]], do=[[0.0, 0.0]])

    def test_class_dimension_mismatch_rejected(self):
        with pytest.raises(DataError):
            ParallelScores(so=[[1.0, 2.0]], do=[[0.0]])


class TestApply:
    def test_fig7_crossing_point(self):
        w = CalibrationWeights(alpha=1.0, betas=[2.0])
        assert apply(w, [-0.5]) == 0.0

    def test_identity_calibration(self):
        w = CalibrationWeights(alpha=0.0, betas=[1.0])
        for x in (-3.3, 0.0, 7.25):
            assert apply(w, [x]) == x

    def test_two_system_origin(self):
        w = CalibrationWeights(alpha=-0.93, betas=[0.97, 2.32])
        assert apply(w, [0.0, 0.0]) == pytest.approx(-0.93)

    def test_dimension_mismatch(self):
        w = CalibrationWeights(alpha=0.0, betas=[1.0, 2.0])
        with pytest.raises(DataError):
            apply(w, [1.0])

    def test_monotone_in_each_coordinate(self):
        w = CalibrationWeights(alpha=0.3, betas=[1.5, 0.7])
        base = apply(w, [0.2, -0.4])
        assert apply(w, [0.3, -0.4]) > base
        assert apply(w, [0.2, -0.3]) > base


class TestProperties:
    def test_trained_weights_beat_random_perturbations(self):
        rng = np.random.default_rng(53)
        scores = overlapping_scores(rng, 50, 50)
        data = ParallelScores.from_labeled(scores)
        w = train_calibration(scores)
        j_opt = objective(w, data)
        for _ in range(1000):
            da, db = rng.normal(scale=0.3, size=2)
            w_pert = CalibrationWeights(w.alpha + da, [w.betas[0] + db])
            assert objective(w_pert, data) >= j_opt

    def test_affine_equivariance(self):
        rng = np.random.default_rng(59)
        scores = overlapping_scores(rng, 70, 70)
        w = train_calibration(scores)
        a, b = 2.5, -1.2
        transformed = LabeledScores(so=a * scores.so + b, do=a * scores.do + b)
        w_t = train_calibration(transformed)
        assert w_t.betas[0] == pytest.approx(w.betas[0] / a, abs=1e-6)
        assert w_t.alpha == pytest.approx(w.alpha - w.betas[0] * b / a, abs=1e-6)
        for s in np.linspace(-3, 3, 50):
            assert apply(w_t, [a * s + b]) == pytest.approx(apply(w, [s]), abs=1e-6)

    def test_idempotence_at_optimum(self):
        rng = np.random.default_rng(61)
        scores = overlapping_scores(rng, 80, 80)
        w = train_calibration(scores)
        outputs = LabeledScores(
            so=[apply(w, [s]) for s in scores.so],
            do=[apply(w, [s]) for s in scores.do],
        )
        w2 = train_calibration(outputs)
        assert w2.alpha == pytest.approx(0.0, abs=1e-4)
        assert w2.betas[0] == pytest.approx(1.0, abs=1e-4)

    def test_cllr_deviance_identity(self):
        rng = np.random.default_rng(67)
        for _ in range(100):
            scores = overlapping_scores(
                rng, int(rng.integers(10, 40)), int(rng.integers(10, 40))
            )
            data = ParallelScores.from_labeled(scores)
            w = train_calibration(scores)
            outputs = LlrSet(
                so=[apply(w, [s]) for s in scores.so],
                do=[apply(w, [s]) for s in scores.do],
            )
            assert cllr(outputs) == pytest.approx(
                objective(w, data) / LN2, abs=1e-10
            )

    def test_class_duplication_invariance(self):
        rng = np.random.default_rng(71)
        scores = overlapping_scores(rng, 30, 45)
        w = train_calibration(scores)
        doubled = LabeledScores(
            so=scores.so, do=np.concatenate([scores.do, scores.do])
        )
        w2 = train_calibration(doubled)
        assert w2.alpha == pytest.approx(w.alpha, abs=1e-6)
        assert w2.betas[0] == pytest.approx(w.betas[0], abs=1e-6)

    def test_asymptotic_recovery(self):
        cfg = figure_config("fig6")
        scores = sample_scores(cfg.model, 200_000, 200_000, seed=7)
        w = train_calibration(scores)
        alpha, beta = model_to_affine(cfg.model)
        assert w.alpha == pytest.approx(alpha, abs=0.05)
        assert w.betas[0] == pytest.approx(beta, abs=0.05)


class TestWeightsJson:
    def test_schema_field_names(self):
        w = CalibrationWeights(0.25, [1.5, -0.5], n_so=10, n_do=20, ridge_lambda=0.001)
        doc = json.loads(w.to_json())
        assert set(doc) == {"alpha", "betas", "log_base", "trained_on", "ridge_lambda"}
        assert doc["alpha"] == 0.25
        assert doc["betas"] == [1.5, -0.5]
        assert doc["log_base"] == "e"
        assert doc["trained_on"] == {"n_so": 10, "n_do": 20}
        assert doc["ridge_lambda"] == 0.001

    def test_round_trip(self):
        w = CalibrationWeights(-0.93, [0.97, 2.32], n_so=3, n_do=4, ridge_lambda=0.0)
        back = CalibrationWeights.from_json(w.to_json())
        assert back == w

    def test_invalid_json_rejected(self):
        with pytest.raises(DataError):
            CalibrationWeights.from_json("{not json")

    def test_missing_field_rejected(self):
        with pytest.raises(DataError):
            CalibrationWeights.from_json('{"alpha": 0.0, "betas": [1.0]}')

    def test_wrong_log_base_rejected(self):
        doc = json.loads(CalibrationWeights(0.0, [1.0]).to_json())
        doc["log_base"] = "10"
        with pytest.raises(DataError):
            CalibrationWeights.from_json(json.dumps(doc))

    def test_weights_validate(self):
        with pytest.raises(DataError):
            CalibrationWeights(math.nan, [1.0])
        with pytest.raises(DataError):
            CalibrationWeights(0.0, [])
