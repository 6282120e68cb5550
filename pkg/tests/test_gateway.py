import threading

import httpx
import pytest

from fusebench.gateway import (
    HttpScorer,
    MalformedResponse,
    MockScorer,
    ScorerEndpointConfig,
    ScorerKind,
    ScorerRequest,
    Timeout,
    Unreachable,
    render_nli_prompt,
)


def make_request(i=0, kind=ScorerKind.ENTAILMENT):
    return ScorerRequest(
        kind=kind,
        premise_or_context=f"premise {i}",
        hypothesis_or_query=f"hypothesis {i}",
        request_id=f"req-{i}",
    )


class TestPrompt:
    def test_template_lines(self):
        prompt = render_nli_prompt("A.", "B.")
        lines = prompt.split("\n")
        assert lines[1] == "Options: Entailment, Contradiction, or Neutral"
        assert "### Input:" in lines
        assert "Premise: A." in lines
        assert "Hypothesis: B." in lines
        assert lines[-1] == "### Response (choose only one of the options from above):"

    def test_newline_preserved(self):
        prompt = render_nli_prompt("line one\nline two", "B.")
        assert "Premise: line one\nline two\n" in prompt

    def test_deterministic(self):
        assert render_nli_prompt("A.", "B.") == render_nli_prompt("A.", "B.")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            render_nli_prompt("", "B.")


class TestRequestValidation:
    def test_empty_texts_rejected(self):
        with pytest.raises(ValueError):
            ScorerRequest(ScorerKind.ENTAILMENT, "", "h", "r1")

    def test_probability_range_enforced(self):
        from fusebench.gateway import ScorerResponse

        with pytest.raises(MalformedResponse):
            ScorerResponse(request_id="r", probability=1.3)


def scripted_scorer(handler, **config_overrides):
    transport = httpx.MockTransport(handler)
    config = ScorerEndpointConfig(base_url="http://scorer.test", **config_overrides)
    return HttpScorer(config, client=httpx.Client(transport=transport), sleep=lambda s: None)


class TestHttpScorer:
    def test_pass_through(self):
        def handler(request):
            body = request.read()
            assert b'"kind": "entailment"' in body or b'"kind":"entailment"' in body
            return httpx.Response(200, json={"request_id": "req-0", "probability": 0.42})

        scorer = scripted_scorer(handler)
        resp = scorer.score(make_request())
        assert resp.probability == 0.42
        assert resp.request_id == "req-0"

    def test_out_of_range_probability(self):
        scorer = scripted_scorer(
            lambda req: httpx.Response(200, json={"request_id": "x", "probability": 1.3})
        )
        with pytest.raises(MalformedResponse):
            scorer.score(make_request())

    def test_missing_probability(self):
        scorer = scripted_scorer(
            lambda req: httpx.Response(200, json={"request_id": "x"})
        )
        with pytest.raises(MalformedResponse):
            scorer.score(make_request())

    def test_retry_then_succeed(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            if len(attempts) == 1:
                return httpx.Response(500)
            return httpx.Response(200, json={"request_id": "req-0", "probability": 0.9})

        scorer = scripted_scorer(handler, max_retries=2)
        resp = scorer.score(make_request())
        assert resp.probability == 0.9
        assert resp.retries == 1
        assert len(attempts) == 2

    def test_retries_exhausted(self):
        scorer = scripted_scorer(lambda req: httpx.Response(503), max_retries=1)
        with pytest.raises(Unreachable):
            scorer.score(make_request())

    def test_timeout_retries(self):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ReadTimeout("slow backend")

        scorer = scripted_scorer(handler, max_retries=2)
        with pytest.raises(Timeout):
            scorer.score(make_request())
        assert len(calls) == 3  # initial + 2 retries

    def test_4xx_fails_fast(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(400, text="bad request")

        scorer = scripted_scorer(handler, max_retries=3)
        with pytest.raises(MalformedResponse):
            scorer.score(make_request())
        assert len(calls) == 1

    def test_batch_order(self):
        def handler(request):
            import json

            body = json.loads(request.read())
            i = int(body["request_id"].split("-")[1])
            return httpx.Response(
                200, json={"request_id": body["request_id"], "probability": i / 10}
            )

        scorer = scripted_scorer(handler, max_in_flight=3)
        responses = scorer.score_batch([make_request(i) for i in range(3)])
        assert [r.probability for r in responses] == [0.0, 0.1, 0.2]

    def test_batch_serialized(self):
        def handler(request):
            import json

            body = json.loads(request.read())
            i = int(body["request_id"].split("-")[1])
            return httpx.Response(
                200, json={"request_id": body["request_id"], "probability": i / 10}
            )

        scorer = scripted_scorer(handler, max_in_flight=1)
        responses = scorer.score_batch([make_request(i) for i in range(4)])
        assert [r.probability for r in responses] == [0.0, 0.1, 0.2, 0.3]

    def test_batch_partial_failure(self):
        def handler(request):
            import json

            body = json.loads(request.read())
            i = int(body["request_id"].split("-")[1])
            if i == 1:
                raise httpx.ReadTimeout("slow")
            return httpx.Response(
                200, json={"request_id": body["request_id"], "probability": 0.5}
            )

        scorer = scripted_scorer(handler, max_retries=0)
        results = scorer.score_batch_settled([make_request(i) for i in range(3)])
        assert results[0].probability == 0.5
        assert isinstance(results[1], Timeout)
        assert results[2].probability == 0.5

    def test_in_flight_limit(self):
        active = 0
        peak = 0
        lock = threading.Lock()

        def handler(request):
            nonlocal active, peak
            with lock:
                active += 1
                peak = max(peak, active)
            import time

            time.sleep(0.01)
            with lock:
                active -= 1
            return httpx.Response(200, json={"request_id": "x", "probability": 0.5})

        scorer = scripted_scorer(handler, max_in_flight=2)
        scorer.score_batch([make_request(i) for i in range(8)])
        assert peak <= 2

    def test_no_route_for_kind(self):
        config = ScorerEndpointConfig(
            base_url="http://scorer.test", kind_routes={ScorerKind.ENTAILMENT: "/e"}
        )
        scorer = HttpScorer(config, client=httpx.Client(transport=httpx.MockTransport(
            lambda req: httpx.Response(200, json={"probability": 0.5})
        )))
        with pytest.raises(Unreachable):
            scorer.score(make_request(kind=ScorerKind.CONTAINMENT))


class TestMockScorer:
    def test_scripted_and_default(self):
        gw = MockScorer(
            {(ScorerKind.ENTAILMENT, "p", "h"): 0.9}, default=0.5
        )
        scripted = gw.score(ScorerRequest(ScorerKind.ENTAILMENT, "p", "h", "r1"))
        assert scripted.probability == 0.9
        other = gw.score(ScorerRequest(ScorerKind.ENTAILMENT, "p", "other", "r2"))
        assert other.probability == 0.5

    def test_deterministic(self):
        gw = MockScorer(default=0.3)
        r = ScorerRequest(ScorerKind.CONTAINMENT, "a", "b", "r")
        assert gw.score(r).probability == gw.score(r).probability
