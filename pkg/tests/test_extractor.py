import math

import pytest

from gistvis.extractor import (
    FALLBACK_FLAG,
    DraftRow,
    ExtractionDraft,
    classify_breakdown_kind,
    coerce_rows,
    extract,
    normalize_attribute,
)
from gistvis.facts import BreakdownKind, InsightType, SemanticAttribute, validate
from gistvis.gateway import Gateway, ScriptRule, ScriptedBackend


def drow(breakdown="Brand A", value="40%", kind="categorical",
         space="car market", feature="share"):
    return DraftRow(space, breakdown, kind, feature, value)


def draft(*rows, attribute=None, positions=()):
    return ExtractionDraft(rows=tuple(rows), attribute_text=attribute,
                           position_texts=tuple(positions))


class TestNormalizeAttribute:
    def test_trend_synonyms(self):
        assert normalize_attribute("rose", InsightType.TREND) is SemanticAttribute.INCREASING
        assert normalize_attribute("Decline", InsightType.TREND) is SemanticAttribute.DECREASING

    def test_extreme_synonyms(self):
        assert normalize_attribute("highest", InsightType.EXTREME) is SemanticAttribute.MAXIMUM
        assert normalize_attribute("fewest", InsightType.EXTREME) is SemanticAttribute.MINIMUM

    def test_cross_domain_rejected(self):
        assert normalize_attribute("highest", InsightType.TREND) is None
        assert normalize_attribute("up", InsightType.EXTREME) is None
        assert normalize_attribute("up", InsightType.VALUE) is None


class TestClassifyKind:
    def test_explicit_cells_win(self):
        assert classify_breakdown_kind("temporal", "Brand A") is BreakdownKind.TEMPORAL
        assert classify_breakdown_kind("categorical", "2023") is BreakdownKind.CATEGORICAL

    def test_sniffing_on_garbage_cell(self):
        assert classify_breakdown_kind("??", "Q3 2023") is BreakdownKind.TEMPORAL
        assert classify_breakdown_kind("", "Brand A") is BreakdownKind.CATEGORICAL


class TestCoerce:
    def test_value_with_separator(self):
        fact = coerce_rows(draft(drow(value="11,435")), InsightType.VALUE,
                           "Spending hit 11,435 dollars.")
        assert fact.data_spec[0].value == 11435.0
        assert validate(fact) == []

    def test_rank_drops_temporal_rows(self):
        fact = coerce_rows(
            draft(drow("Brand A", "1"), drow("2023", "2", kind="temporal")),
            InsightType.RANK, "Brand A ranked first in 2023.")
        assert [r.breakdown for r in fact.data_spec] == ["Brand A"]
        assert "row_kind_violation" in fact.flags

    def test_rank_rejects_non_integers(self):
        fact = coerce_rows(draft(drow(value="2.5")), InsightType.RANK,
                           "It placed somewhere.")
        assert fact.degraded
        assert "rank_not_integer" in fact.flags

    def test_trend_drops_categorical_rows(self):
        fact = coerce_rows(
            draft(drow("2022", "5", kind="temporal"),
                  drow("Brand A", "9", kind="categorical"),
                  drow("2023", "8", kind="temporal")),
            InsightType.TREND, "Sales climbed from 5 to 8.")
        assert [r.breakdown for r in fact.data_spec] == ["2022", "2023"]

    def test_semantic_trend_keeps_nan_with_attribute(self):
        fact = coerce_rows(
            draft(drow("recent years", "n/a", kind="temporal"), attribute="up"),
            InsightType.TREND, "Prices kept going up in recent years.")
        assert fact.unit_segment.attribute is SemanticAttribute.INCREASING
        assert math.isnan(fact.data_spec[0].value)
        assert validate(fact) == []

    def test_nan_without_attribute_drops_row(self):
        fact = coerce_rows(draft(drow(value="lots")), InsightType.VALUE,
                           "There were lots.")
        assert fact.degraded
        assert "row_nan_without_attribute" in fact.flags

    def test_comparison_needs_two_numeric_rows(self):
        fact = coerce_rows(draft(drow("A", "5")), InsightType.COMPARISON,
                           "A beat the rest.")
        assert fact.degraded
        assert "arity_violation" in fact.flags

    def test_proportion_percent_rescaled(self):
        fact = coerce_rows(draft(drow(value="45")), InsightType.PROPORTION,
                           "Brand A held 45 of it.")
        assert fact.data_spec[0].value == pytest.approx(0.45)
        assert "proportion_rescaled" in fact.flags

    def test_proportion_complement_row_added(self):
        fact = coerce_rows(draft(drow(value="0.6")), InsightType.PROPORTION,
                           "Brand A took 60% of sales.")
        assert [r.breakdown for r in fact.data_spec] == ["Brand A", "other"]
        assert fact.data_spec[1].value == pytest.approx(0.4)

    def test_proportion_overflow_flagged(self):
        fact = coerce_rows(
            draft(drow("A", "0.7"), drow("B", "0.6")),
            InsightType.PROPORTION, "A had 70% and B had 60%.")
        assert "proportion_sum_overflow" in fact.flags

    def test_position_must_be_verbatim(self):
        seg = "Everest is the highest peak at 8,848 meters."
        fact = coerce_rows(
            draft(drow("Everest", "8,848", feature="height"), attribute="highest",
                  positions=("the highest peak", "not in the text")),
            InsightType.EXTREME, seg)
        assert fact.unit_segment.position == ("the highest peak",)
        assert "position_not_verbatim" in fact.flags
        assert validate(fact) == []

    def test_position_dropped_for_other_types(self):
        fact = coerce_rows(draft(drow(value="5"), positions=("Brand A",)),
                           InsightType.COMPARISON, "Brand A sold 5, Brand B 9.")
        assert fact.unit_segment.position is None

    def test_missing_field_rows_dropped(self):
        fact = coerce_rows(
            draft(DraftRow("", "A", "categorical", "f", "1"), drow("B", "2")),
            InsightType.VALUE, "A was 1 and B was 2.")
        assert [r.breakdown for r in fact.data_spec] == ["B"]
        assert "row_missing_field" in fact.flags

    def test_empty_draft_degrades(self):
        fact = coerce_rows(draft(), InsightType.VALUE, "Numbers were mentioned.")
        assert fact.degraded
        assert FALLBACK_FLAG in fact.flags
        assert validate(fact) == []


class TestExtract:
    SEGMENT = "Brand A controls 40% of the car market."

    def test_end_to_end(self):
        backend = ScriptedBackend(rules=[ScriptRule(
            tag="extractor_proportion",
            response="```\ncar market | Brand A | categorical | share | 40%\n```",
        )])
        gw = Gateway(backend, backoff_base=0)
        fact = extract(self.SEGMENT, InsightType.PROPORTION, gw)
        assert fact.insight_type is InsightType.PROPORTION
        assert fact.data_spec[0].value == pytest.approx(0.4)
        assert fact.data_spec[1].breakdown == "other"
        assert validate(fact) == []

    def test_unparseable_response_degrades(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="no table here")])
        gw = Gateway(backend, backoff_base=0)
        fact = extract(self.SEGMENT, InsightType.PROPORTION, gw)
        assert fact.degraded
        assert FALLBACK_FLAG in fact.flags

    def test_transport_exhaustion_degrades(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="x", fail_times=99)])
        gw = Gateway(backend, backoff_base=0)
        fact = extract(self.SEGMENT, InsightType.VALUE, gw)
        assert fact.degraded

    def test_none_type_rejected(self):
        gw = Gateway(ScriptedBackend(), backoff_base=0)
        with pytest.raises(ValueError):
            extract(self.SEGMENT, InsightType.NONE, gw)
