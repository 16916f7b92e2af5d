import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eegcnn.metrics import (
    AucUndefinedError,
    ConfusionMatrix,
    confusion,
    evaluate,
    roc_auc,
    scalar_metrics,
)
from eegcnn.model import ModelConfig, ModelParams, init_params

from conftest import make_epoch


def pair_counting_auc(scores, labels):
    """Brute-force Mann-Whitney oracle: concordant pairs, ties get half credit."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


class TestConfusion:
    def test_perfect_predictions(self):
        cm = confusion([1, 1, 0, 0], [1, 1, 0, 0])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (2, 2, 0, 0)

    def test_all_positive_predictions(self):
        cm = confusion([1, 1, 1, 1], [1, 0, 1, 0])
        assert (cm.tp, cm.fp) == (2, 2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            confusion([], [])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            confusion([1], [1, 0])

    def test_total(self):
        assert confusion([1, 0, 1], [0, 0, 1]).total == 3


class TestScalarMetrics:
    def test_headline_f1(self):
        # precision 1.0 with recall 0.977 gives F1 ~ 0.988
        cm = ConfusionMatrix(tp=977, fp=0, tn=1000, fn=23)
        m = scalar_metrics(cm)
        assert m["precision"] == 1.0
        assert m["recall"] == pytest.approx(0.977)
        assert m["f1"] == pytest.approx(2 * 0.977 / 1.977, abs=1e-3)
        assert round(m["f1"], 2) == 0.99

    def test_degenerate_zero_positive_predictions(self):
        m = scalar_metrics(ConfusionMatrix(tp=0, fp=0, fn=5, tn=5))
        assert m["precision"] == 0.0
        assert m["recall"] == 0.0
        assert m["accuracy"] == 0.5
        assert m["degenerate"]

    def test_direct_arithmetic(self):
        m = scalar_metrics(ConfusionMatrix(tp=3, fp=1, tn=4, fn=2))
        assert m["precision"] == pytest.approx(0.75)
        assert m["recall"] == pytest.approx(0.6)
        assert m["accuracy"] == pytest.approx(0.7)
        assert m["f1"] == pytest.approx(2 * 0.45 / 1.35)

    def test_all_metrics_bounded(self, rng):
        for _ in range(200):
            tp, fp, tn, fn = rng.integers(0, 20, size=4)
            if tp + fp + tn + fn == 0:
                continue
            m = scalar_metrics(ConfusionMatrix(int(tp), int(fp), int(tn), int(fn)))
            for key in ("precision", "recall", "f1", "accuracy"):
                assert 0.0 <= m[key] <= 1.0

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.8, 0.3, 0.2], [1, 1, 0, 0]) == 1.0

    def test_three_quarters(self):
        scores, labels = [0.9, 0.3, 0.8, 0.2], [1, 1, 0, 0]
        assert roc_auc(scores, labels) == pytest.approx(0.75)
        assert pair_counting_auc(scores, labels) == 0.75

    def test_all_ties(self):
        assert roc_auc([0.5] * 6, [1, 0, 1, 0, 1, 0]) == pytest.approx(0.5)

    def test_single_class_rejected(self):
        with pytest.raises(AucUndefinedError):
            roc_auc([0.1, 0.9], [1, 1])

    def test_exhaustive_small_instances(self, rng):
        # trapezoidal sweep vs pair counting for every labeling of fixed
        # tie-heavy score vectors up to length 8 (the n=12 exhaustive run
        # lives in the acceptance suite)
        for n in range(2, 9):
            scores = rng.integers(0, 4, size=n) / 4.0  # small alphabet forces ties
            for labels in itertools.product([0, 1], repeat=n):
                if len(set(labels)) < 2:
                    continue
                assert roc_auc(list(scores), list(labels)) == pytest.approx(
                    pair_counting_auc(scores, labels), abs=1e-12
                )

    @given(
        scores=st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=20),
        seed=st.integers(0, 10_000),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone_invariance(self, scores, seed):
        rng = np.random.default_rng(seed)
        labels = list(rng.integers(0, 2, size=len(scores)))
        if len(set(labels)) < 2:
            labels[0], labels[-1] = 0, 1
        base = roc_auc(scores, labels)
        # power-of-two scaling is exact, so order and ties are both preserved
        scaled = [4.0 * s for s in scores]
        assert roc_auc(scaled, labels) == pytest.approx(base, abs=1e-12)

    def test_label_flip_complement(self, rng):
        scores = list(rng.random(10))  # continuous, so no ties
        labels = [1, 0, 1, 1, 0, 0, 1, 0, 1, 0]
        flipped = [1 - y for y in labels]
        assert roc_auc(scores, flipped) == pytest.approx(1 - roc_auc(scores, labels))


class TestEvaluate:
    def _zero_model(self, channels=2):
        return ModelParams(
            conv_weight=np.zeros((channels, channels, 3)),
            conv_bias=np.zeros(channels),
            fc_weight=np.zeros((2, channels)),
            fc_bias=np.zeros(2),
        )

    def test_zero_model_degenerate(self):
        epochs = [make_epoch(label=i % 2, seed=i) for i in range(8)]
        report = evaluate(self._zero_model(), epochs)
        # uniform probs: every argmax tie breaks to class 0
        assert report.accuracy == pytest.approx(0.5)
        assert report.auc == pytest.approx(0.5)  # all-ties rule

    def test_single_class_reports_without_auc(self):
        epochs = [make_epoch(label=0, seed=i) for i in range(4)]
        report = evaluate(self._zero_model(), epochs)
        assert report.auc is None
        assert report.degenerate
        assert report.accuracy == 1.0  # ties to class 0, all labels 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            evaluate(self._zero_model(), [])

    def test_n_epochs_recorded(self):
        epochs = [make_epoch(label=i % 2, seed=i) for i in range(6)]
        assert evaluate(init_params(0, ModelConfig(2, 2, 3, 2)), epochs).n_epochs == 6

    def test_csv_row_order(self):
        epochs = [make_epoch(label=i % 2, seed=i) for i in range(6)]
        report = evaluate(init_params(0, ModelConfig(2, 2, 3, 2)), epochs)
        row = report.to_csv_row().split(",")
        assert float(row[0]) == report.precision
        assert float(row[1]) == report.recall
        assert float(row[2]) == report.f1
        assert float(row[3]) == report.auc
        assert float(row[4]) == report.accuracy

    def test_json_round_trip(self, tmp_path):
        import json

        epochs = [make_epoch(label=i % 2, seed=i) for i in range(6)]
        report = evaluate(init_params(0, ModelConfig(2, 2, 3, 2)), epochs)
        report.save(tmp_path / "m.json", tmp_path / "m.csv")
        loaded = json.loads((tmp_path / "m.json").read_text())
        assert loaded["n_epochs"] == 6
        assert loaded["confusion"]["tp"] == report.confusion.tp
