import random

import numpy as np
import pytest

import classification_oracle as oracle
from gistvis.evaluation import (
    EvalInputError,
    SEGMENTATION_STRATEGIES,
    classification_report,
    format_classification_report,
    format_discoverer_table,
    load_corpus,
    run_discoverer_eval,
    segmentation_accuracy,
)
from gistvis.facts import ALL_TYPES, InsightType


class TestSegmentationAccuracy:
    def test_identity_is_perfect(self):
        gold = {"a": [(0, 5), (6, 12)], "b": [(0, 4)]}
        assert segmentation_accuracy(gold, gold) == 1.0

    def test_span_order_irrelevant(self):
        gold = {"a": [(0, 5), (6, 12)]}
        pred = {"a": [(6, 12), (0, 5)]}
        assert segmentation_accuracy(pred, gold) == 1.0

    def test_over_segmentation_counts_wrong(self):
        gold = {"a": [(0, 12)], "b": [(0, 4)]}
        pred = {"a": [(0, 5), (6, 12)], "b": [(0, 4)]}
        assert segmentation_accuracy(pred, gold) == 0.5

    def test_whitespace_trimming(self):
        text = "Hi there. Bye now."
        gold = {"a": [(0, 9), (10, 18)]}
        pred = {"a": [(0, 10), (10, 18)]}  # trailing space folded in
        assert segmentation_accuracy(pred, gold, {"a": text}) == 1.0
        assert segmentation_accuracy(pred, gold) == 0.0

    def test_key_mismatch_rejected(self):
        with pytest.raises(EvalInputError):
            segmentation_accuracy({"a": []}, {"a": [], "b": []})
        with pytest.raises(EvalInputError):
            segmentation_accuracy({"a": [], "b": []}, {"a": []})


class TestClassificationReport:
    def test_hand_scored_sample(self):
        gold = [InsightType(g) for g, _ in oracle.PAIRS]
        pred = [InsightType(p) for _, p in oracle.PAIRS]
        report = classification_report(pred, gold)
        assert report.accuracy == pytest.approx(oracle.ACCURACY)
        assert report.weighted_precision == pytest.approx(oracle.WEIGHTED_PRECISION)
        assert report.weighted_recall == pytest.approx(oracle.WEIGHTED_RECALL)
        assert report.weighted_f1 == pytest.approx(oracle.WEIGHTED_F1)
        assert report.confusion.astype(int).tolist() == oracle.CONFUSION
        assert report.support.astype(int).tolist() == oracle.SUPPORT
        assert report.flags == ()

    def test_identity_prediction_scores_one(self):
        gold = [t for t in ALL_TYPES for _ in range(3)]
        report = classification_report(gold, gold)
        assert report.accuracy == 1.0
        assert report.weighted_f1 == pytest.approx(1.0)

    def test_confusion_row_column_orientation(self):
        gold = [InsightType.VALUE, InsightType.VALUE]
        pred = [InsightType.TREND, InsightType.TREND]
        report = classification_report(pred, gold)
        i = report.labels.index("value")
        j = report.labels.index("trend")
        assert report.confusion[i, j] == 2
        assert report.confusion[j, i] == 0

    def test_zero_prediction_class_flagged(self):
        gold = [InsightType.VALUE, InsightType.RANK]
        pred = [InsightType.VALUE, InsightType.VALUE]
        report = classification_report(pred, gold)
        assert "zero_predictions:rank" in report.flags

    def test_normalized_rows_sum_to_one_or_zero(self):
        rng = random.Random(42)
        labels = list(ALL_TYPES)
        gold = [rng.choice(labels) for _ in range(100)]
        pred = [rng.choice(labels) for _ in range(100)]
        report = classification_report(pred, gold)
        sums = report.normalized.sum(axis=1)
        for i, s in enumerate(sums):
            expected = 1.0 if report.support[i] > 0 else 0.0
            assert s == pytest.approx(expected)

    def test_length_mismatch_rejected(self):
        with pytest.raises(EvalInputError):
            classification_report([InsightType.VALUE], [])

    def test_weighted_recall_equals_accuracy_property(self):
        rng = random.Random(7)
        labels = list(ALL_TYPES)
        for _ in range(50):
            n = rng.randint(1, 60)
            gold = [rng.choice(labels) for _ in range(n)]
            pred = [rng.choice(labels) for _ in range(n)]
            report = classification_report(pred, gold)
            assert report.weighted_recall == pytest.approx(report.accuracy)

    def test_json_round_trips_numbers(self):
        gold = [InsightType(g) for g, _ in oracle.PAIRS]
        pred = [InsightType(p) for _, p in oracle.PAIRS]
        payload = classification_report(pred, gold).to_json()
        assert payload["confusion"] == oracle.CONFUSION
        assert payload["weightedF1"] == pytest.approx(oracle.WEIGHTED_F1)
        assert payload["labels"] == [t.value for t in ALL_TYPES]


class TestCorpus:
    def test_load(self, fixtures_dir):
        corpus = load_corpus(fixtures_dir / "minicorpus")
        assert len(corpus.entries) == 12
        entry = corpus.entries[0]
        assert ":" in entry.key
        for (start, end), t in zip(entry.gold_spans, entry.gold_types):
            assert entry.text[start:end].strip()
            assert isinstance(t, InsightType)

    def test_missing_directory_rejected(self, tmp_path):
        with pytest.raises(EvalInputError):
            load_corpus(tmp_path)

    def test_regex_baseline_accuracy(self, fixtures_dir):
        corpus = load_corpus(fixtures_dir / "minicorpus")
        results = run_discoverer_eval(corpus, ["regex"])
        assert results[0].accuracy == pytest.approx(0.75)
        assert not results[0].failed

    def test_failing_strategy_isolated(self, fixtures_dir):
        corpus = load_corpus(fixtures_dir / "minicorpus")
        # llm strategy without a gateway blows up; the regex row must survive
        results = run_discoverer_eval(corpus, ["regex", "llm"])
        by_name = {r.strategy: r for r in results}
        assert by_name["regex"].accuracy == pytest.approx(0.75)
        assert by_name["llm"].failed
        assert by_name["llm"].error

    def test_unknown_strategy_rejected(self, fixtures_dir):
        corpus = load_corpus(fixtures_dir / "minicorpus")
        with pytest.raises(EvalInputError):
            run_discoverer_eval(corpus, ["embedding"])


class TestFormatting:
    def test_discoverer_table(self, fixtures_dir):
        corpus = load_corpus(fixtures_dir / "minicorpus")
        table = format_discoverer_table(run_discoverer_eval(corpus, ["regex"]))
        assert "regex" in table
        assert "0.750" in table

    def test_classification_text(self):
        gold = [InsightType(g) for g, _ in oracle.PAIRS]
        pred = [InsightType(p) for _, p in oracle.PAIRS]
        text = format_classification_report(classification_report(pred, gold))
        assert "accuracy           0.700" in text
        assert "proportion" in text

    def test_registry_names(self):
        assert set(SEGMENTATION_STRATEGIES) == {"regex", "llm"}
