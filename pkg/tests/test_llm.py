import json

import httpx
import pytest

from netform.policies import llm
from netform.policies.agents import DecisionContext, LlmPolicy, PolicyError
from netform.policies.prompts import CandidateProfile, PromptBundle
from netform.testing import MockChatServer, first_candidate_responder, sequence_responder


def bundle():
    cands = tuple(CandidateProfile(f"Person {v}", {"degree": v}) for v in (3, 5, 8))
    return PromptBundle("baseline", CandidateProfile("Person 0"), cands, 1)


@pytest.fixture
def server():
    with MockChatServer(first_candidate_responder()) as s:
        yield s


def test_endpoint_config_validation():
    with pytest.raises(ValueError):
        llm.LlmEndpointConfig("http://x", "m", temperature=-1)
    with pytest.raises(ValueError):
        llm.LlmEndpointConfig("http://x", "m", max_retries=-1)


def test_decide_through_mock(server):
    cfg = llm.LlmEndpointConfig(server.url, "mock-model", temperature=0.7)
    with llm.LlmClient(cfg) as client:
        d = llm.llm_decide(client, bundle())
    assert d.names == ["Person 3"]
    assert d.fingerprint == "llm(mock-model,T=0.7)"
    body = server.requests[0]
    assert body["model"] == "mock-model" and body["temperature"] == 0.7


def test_cache_eliminates_repeat_requests(server, tmp_path):
    cfg = llm.LlmEndpointConfig(server.url, "m", cache_dir=str(tmp_path))
    with llm.LlmClient(cfg) as c1:
        llm.llm_decide(c1, bundle())
    with llm.LlmClient(cfg) as c2:
        llm.llm_decide(c2, bundle())
        assert c2.cache_hits == 1 and c2.requests_sent == 0
    assert server.hits == 1


def test_cache_key_depends_on_attempt_and_temperature():
    a = llm.cache_key("m", 1.0, "p", 0)
    assert a != llm.cache_key("m", 1.0, "p", 1)
    assert a != llm.cache_key("m", 0.5, "p", 0)


def test_corrupt_cache_entry_detected(tmp_path):
    cache = llm.ResponseCache(tmp_path)
    cache.put("k", "hello")
    path = tmp_path / "k.json"
    rec = json.loads(path.read_text())
    rec["response"] = "tampered"
    path.write_text(json.dumps(rec))
    with pytest.raises(llm.CacheCorruptionError):
        cache.get("k")


def test_retries_then_success():
    good = '[{"name": "Person 5", "reason": "ok"}]'
    with MockChatServer(sequence_responder(["garbage", "still garbage", good])) as s:
        cfg = llm.LlmEndpointConfig(s.url, "m", max_retries=2)
        with llm.LlmClient(cfg) as client:
            d = llm.llm_decide(client, bundle())
        assert d.names == ["Person 5"] and s.hits == 3


def test_exhausted_retries_raise():
    with MockChatServer("no json here") as s:
        cfg = llm.LlmEndpointConfig(s.url, "m", max_retries=1)
        with llm.LlmClient(cfg) as client:
            with pytest.raises(llm.LlmExhaustedError) as info:
                llm.llm_decide(client, bundle())
        assert info.value.attempts == 2 and info.value.last_response == "no json here"


def test_http_errors_count_as_failed_attempts():
    with MockChatServer(first_candidate_responder(), status=500) as s:
        cfg = llm.LlmEndpointConfig(s.url, "m", max_retries=2)
        with llm.LlmClient(cfg) as client:
            with pytest.raises(llm.LlmExhaustedError):
                llm.llm_decide(client, bundle())
        assert s.hits == 3


def test_policy_maps_exhaustion_to_policy_error():
    with MockChatServer("nope") as s:
        client = llm.LlmClient(llm.LlmEndpointConfig(s.url, "m", max_retries=0))
        ctx = DecisionContext(0, [3, 5, 8], None, 1, bundle)
        with pytest.raises(PolicyError):
            LlmPolicy(client).decide(ctx)


def test_query_many_keeps_order(server):
    cfg = llm.LlmEndpointConfig(server.url, "m", max_concurrency=4)
    with llm.LlmClient(cfg) as client:
        out = client.query_many([f"p{i}" for i in range(8)], lambda t: t)
    assert len(out) == 8 and server.hits == 8


def test_api_key_header(monkeypatch):
    seen = {}

    def handler(request):
        seen["auth"] = request.headers.get("Authorization")
        return httpx.Response(200, json={"choices": [{"message": {"content": "hi"}}]})

    monkeypatch.setenv("NETFORM_API_KEY", "secret")
    with llm.LlmClient(llm.LlmEndpointConfig("http://x/v1", "m"), transport=httpx.MockTransport(handler)) as client:
        client.complete("hi")
    assert seen["auth"] == "Bearer secret"


def test_transport_injection():
    def handler(request):
        return httpx.Response(200, json={"choices": [{"message": {"content": '["Person 8"]'}}]})

    client = llm.LlmClient(llm.LlmEndpointConfig("http://unused/v1", "m"), transport=httpx.MockTransport(handler))
    assert llm.llm_decide(client, bundle()).names == ["Person 8"]
