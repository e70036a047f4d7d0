import pytest

from gistvis.annotator import (
    FALLBACK_PRIORITY,
    ONE_STEP_NONE_LABEL,
    annotate,
    check_type,
    moderate,
)
from gistvis.facts import DATA_INSIGHT_TYPES, InsightType
from gistvis.gateway import Gateway, ScriptRule, ScriptedBackend

SEGMENT = "Widget sales reached 4,200 units in March."


def gateway_with(rules):
    backend = ScriptedBackend(rules=list(rules))
    return Gateway(backend, backoff_base=0), backend


def checker_rules(positive, default="false"):
    """One rule per checker tag answering true only for the given types."""
    rules = []
    for t in DATA_INSIGHT_TYPES:
        answer = "true" if t in positive else default
        rules.append(ScriptRule(response=answer, tag=f"checker_{t.value}"))
    return rules


class TestCheckType:
    def test_true_and_false(self):
        gw, _ = gateway_with([ScriptRule(response="true", tag="checker_value"),
                              ScriptRule(response="false", tag="checker_trend")])
        assert check_type(SEGMENT, InsightType.VALUE, gw).verdict is True
        assert check_type(SEGMENT, InsightType.TREND, gw).verdict is False

    def test_unparseable_resolves_false_flagged(self):
        gw, _ = gateway_with([ScriptRule(response="hmm, unsure")])
        verdict = check_type(SEGMENT, InsightType.RANK, gw)
        assert verdict.verdict is False
        assert verdict.flagged

    def test_none_type_rejected(self):
        gw, _ = gateway_with([])
        with pytest.raises(ValueError):
            check_type(SEGMENT, InsightType.NONE, gw)


class TestModerate:
    def test_singleton_skips_llm(self):
        gw, backend = gateway_with([])
        assert moderate(SEGMENT, [InsightType.TREND], gw) is InsightType.TREND
        assert backend.calls == []

    def test_choice_restricted_to_candidates(self):
        gw, _ = gateway_with([ScriptRule(response="proportion", tag="moderator")])
        got = moderate(SEGMENT, [InsightType.VALUE, InsightType.PROPORTION], gw)
        assert got is InsightType.PROPORTION


class TestTwoStep:
    def test_all_false_gives_none_six_calls(self):
        gw, backend = gateway_with(checker_rules(set()))
        result = annotate("The weather was pleasant.", gw)
        assert result.final_type is InsightType.NONE
        assert result.candidates == ()
        assert len(backend.calls) == 6

    def test_single_candidate_six_calls(self):
        gw, backend = gateway_with(checker_rules({InsightType.VALUE}))
        result = annotate(SEGMENT, gw)
        assert result.final_type is InsightType.VALUE
        assert len(backend.calls) == 6

    def test_two_candidates_seven_calls(self):
        rules = checker_rules({InsightType.VALUE, InsightType.EXTREME})
        rules.append(ScriptRule(response="extreme", tag="moderator"))
        gw, backend = gateway_with(rules)
        result = annotate(SEGMENT, gw)
        assert result.final_type is InsightType.EXTREME
        assert set(result.candidates) == {InsightType.VALUE, InsightType.EXTREME}
        assert len(backend.calls) == 7

    def test_checkers_probe_every_type_in_order(self):
        gw, backend = gateway_with(checker_rules(set()))
        annotate(SEGMENT, gw)
        tags = [c.tag for c in backend.calls]
        assert tags == [f"checker_{t.value}" for t in DATA_INSIGHT_TYPES]

    def test_moderator_failure_uses_priority(self):
        rules = checker_rules({InsightType.VALUE, InsightType.RANK,
                               InsightType.TREND})
        rules.append(ScriptRule(response="gibberish", tag="moderator"))
        gw, _ = gateway_with(rules)
        result = annotate(SEGMENT, gw)
        assert result.final_type is InsightType.TREND
        assert "moderator_failed" in result.flags

    def test_priority_covers_all_data_types_once(self):
        assert sorted(FALLBACK_PRIORITY, key=lambda t: t.value) == \
            sorted(DATA_INSIGHT_TYPES, key=lambda t: t.value)

    def test_failed_checker_flagged_but_not_fatal(self):
        rules = checker_rules({InsightType.COMPARISON})
        rules[0] = ScriptRule(response="???", tag="checker_value")
        gw, _ = gateway_with(rules)
        result = annotate(SEGMENT, gw)
        assert result.final_type is InsightType.COMPARISON
        assert "checker_value_failed" in result.flags


class TestOneStep:
    def test_picks_label_single_call(self):
        gw, backend = gateway_with(
            [ScriptRule(response="rank", tag="moderator_onestep")])
        result = annotate(SEGMENT, gw, mode="one_step")
        assert result.final_type is InsightType.RANK
        assert len(backend.calls) == 1

    def test_none_label(self):
        gw, _ = gateway_with(
            [ScriptRule(response=ONE_STEP_NONE_LABEL, tag="moderator_onestep")])
        result = annotate("Nothing numeric here.", gw, mode="one_step")
        assert result.final_type is InsightType.NONE

    def test_unknown_mode_rejected(self):
        gw, _ = gateway_with([])
        with pytest.raises(ValueError):
            annotate(SEGMENT, gw, mode="three_step")
