import json

import pytest

from gistvis.gateway import (
    Gateway,
    GatewayError,
    PromptRequest,
    ScriptMissError,
    ScriptRule,
    ScriptedBackend,
    StructuredOutputError,
    fingerprint,
    parse_boolean_verdict,
    parse_extraction_table,
    parse_segment_list,
    parse_single_choice,
)


def make_req(**kwargs):
    defaults = dict(system_text="sys", user_text="user", tag="test")
    defaults.update(kwargs)
    return PromptRequest(**defaults)


class TestFingerprint:
    def test_stable(self):
        assert fingerprint(make_req(), "m") == fingerprint(make_req(), "m")

    @pytest.mark.parametrize("change", [
        {"system_text": "other"},
        {"user_text": "other"},
        {"temperature": 0.5},
        {"max_output_tokens": 7},
    ])
    def test_any_component_changes_it(self, change):
        assert fingerprint(make_req(), "m") != fingerprint(make_req(**change), "m")

    def test_model_id_changes_it(self):
        assert fingerprint(make_req(), "a") != fingerprint(make_req(), "b")


class TestScriptedBackend:
    def test_identity_lookup(self):
        backend = ScriptedBackend()
        req = make_req()
        backend.script(req, "yes")
        gw = Gateway(backend, backoff_base=0)
        assert gw.complete(req) == "yes"

    def test_miss_is_configuration_error(self):
        gw = Gateway(ScriptedBackend(), backoff_base=0)
        with pytest.raises(ScriptMissError):
            gw.complete(make_req())

    def test_determinism(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="same")])
        gw = Gateway(backend, backoff_base=0)
        assert gw.complete(make_req()) == gw.complete(make_req()) == "same"

    def test_retry_fail_twice_then_succeed(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="ok", fail_times=2)])
        gw = Gateway(backend, backoff_base=0)
        assert gw.complete(make_req()) == "ok"
        assert gw.log[-1].attempts == 3

    def test_retries_exhausted_raises_tagged_error(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="ok", fail_times=10)])
        gw = Gateway(backend, backoff_base=0, max_transport_retries=3)
        with pytest.raises(GatewayError, match=r"\[test\]"):
            gw.complete(make_req())


class FakeLiveBackend:
    """Counts transport calls; stands in for the HTTP backend in cache tests."""

    kind = "live_http"
    model_id = "fake"

    def __init__(self):
        self.calls = 0

    def complete(self, req):
        self.calls += 1
        return f"answer-{self.calls}"


class TestCache:
    def test_temperature_zero_hits_cache(self, tmp_path):
        backend = FakeLiveBackend()
        gw = Gateway(backend, cache_dir=tmp_path, backoff_base=0)
        req = make_req(temperature=0.0)
        assert gw.complete(req) == "answer-1"
        assert gw.complete(req) == "answer-1"
        assert backend.calls == 1

    def test_nonzero_temperature_not_cached(self, tmp_path):
        backend = FakeLiveBackend()
        gw = Gateway(backend, cache_dir=tmp_path, backoff_base=0)
        req = make_req(temperature=0.7)
        gw.complete(req)
        gw.complete(req)
        assert backend.calls == 2

    def test_cache_file_records_request_and_response(self, tmp_path):
        backend = FakeLiveBackend()
        gw = Gateway(backend, cache_dir=tmp_path, backoff_base=0)
        req = make_req()
        gw.complete(req)
        files = list(tmp_path.glob("*.json"))
        assert len(files) == 1
        record = json.loads(files[0].read_text())
        assert record["response"] == "answer-1"
        assert record["request"]["user_text"] == "user"
        assert "timestamp" in record


class TestStructuredParsing:
    def test_boolean(self):
        assert parse_boolean_verdict("True.") is True
        assert parse_boolean_verdict("  false") is False
        assert parse_boolean_verdict("Yes, it is.") is True
        with pytest.raises(ValueError):
            parse_boolean_verdict("maybe")

    def test_single_choice_membership(self):
        options = ["trend", "comparison"]
        assert parse_single_choice("comparison", options) == "comparison"
        assert parse_single_choice("Comparison.", options) == "comparison"
        with pytest.raises(ValueError):
            parse_single_choice("distribution", options)

    def test_segment_list(self):
        text = "1. First sentence.\n- Second one.\n\nThird."
        assert parse_segment_list(text) == ["First sentence.", "Second one.", "Third."]

    def test_extraction_table(self):
        text = "```\na | b | categorical | f | 1\nc | d | temporal | f | 2\n```\nattribute: up\nposition: here; there"
        parsed = parse_extraction_table(text)
        assert len(parsed["rows"]) == 2
        assert parsed["rows"][0] == ("a", "b", "categorical", "f", "1")
        assert parsed["attribute"] == "up"
        assert parsed["positions"] == ["here", "there"]

    def test_reprompt_then_error(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="banana")])
        gw = Gateway(backend, backoff_base=0, max_reprompts=2)
        with pytest.raises(StructuredOutputError):
            gw.complete_structured(make_req(), "boolean_verdict")
        assert len(backend.calls) == 3  # original + 2 corrective re-prompts

    def test_reprompt_recovers(self):
        backend = ScriptedBackend(rules=[
            ScriptRule(response="true", user_contains="could not be parsed"),
            ScriptRule(response="garbled"),
        ])
        gw = Gateway(backend, backoff_base=0)
        assert gw.complete_structured(make_req(), "boolean_verdict") is True

    def test_single_choice_never_outside_options(self):
        backend = ScriptedBackend(rules=[ScriptRule(response="proportion")])
        gw = Gateway(backend, backoff_base=0)
        got = gw.complete_structured(make_req(), "single_choice",
                                     options=["value", "proportion"])
        assert got == "proportion"
