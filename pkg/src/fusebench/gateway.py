"""Uniform client for external inference backends.

The wire protocol is deliberately tiny: POST {base_url}{route} with a JSON
body {"kind", "premise", "hypothesis", "request_id"} and a response
{"request_id", "probability"}. Probabilities outside [0, 1] are errors, never
silently clamped.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Protocol, Sequence

import httpx


class ScorerKind(str, Enum):
    ENTAILMENT = "entailment"
    CONTAINMENT = "containment"
    EMBEDDING_SIMILARITY = "embedding_similarity"


@dataclass(frozen=True)
class ScorerRequest:
    kind: ScorerKind
    premise_or_context: str
    hypothesis_or_query: str
    request_id: str

    def __post_init__(self) -> None:
        if not self.premise_or_context or not self.hypothesis_or_query:
            raise ValueError("both texts must be non-empty")


@dataclass(frozen=True)
class ScorerResponse:
    request_id: str
    probability: float
    latency_ms: float = 0.0
    retries: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise MalformedResponse(f"probability {self.probability} outside [0, 1]")


class GatewayError(Exception):
    pass


class Timeout(GatewayError):
    pass


class Unreachable(GatewayError):
    pass


class MalformedResponse(GatewayError):
    pass


NLI_PROMPT_TEMPLATE = (
    "### Instruction: Read the following and determine if the hypothesis "
    "can be inferred from the premise.\n"
    "Options: Entailment, Contradiction, or Neutral\n"
    "\n"
    "### Input:\n"
    "Premise: {premise}\n"
    "Hypothesis: {hypothesis}\n"
    "\n"
    "### Response (choose only one of the options from above):"
)


def render_nli_prompt(premise: str, hypothesis: str) -> str:
    """Byte-exact instantiation of the zero-shot NLI prompt template."""
    if not premise or not hypothesis:
        raise ValueError("premise and hypothesis must be non-empty")
    return NLI_PROMPT_TEMPLATE.format(premise=premise, hypothesis=hypothesis)


class Scorer(Protocol):
    def score(self, request: ScorerRequest) -> ScorerResponse: ...

    def score_batch(self, requests: Sequence[ScorerRequest]) -> list[ScorerResponse]: ...


DEFAULT_ROUTES = {
    ScorerKind.ENTAILMENT: "/score/entailment",
    ScorerKind.CONTAINMENT: "/score/containment",
    ScorerKind.EMBEDDING_SIMILARITY: "/score/embedding",
}


@dataclass(frozen=True)
class ScorerEndpointConfig:
    base_url: str
    timeout: float = 30.0
    max_retries: int = 2
    max_in_flight: int = 4
    kind_routes: Mapping[ScorerKind, str] = field(default_factory=lambda: dict(DEFAULT_ROUTES))
    backoff_base: float = 0.25

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    @classmethod
    def from_env(cls, **overrides) -> "ScorerEndpointConfig":
        url = overrides.pop("base_url", None) or os.environ.get("FUSEBENCH_SCORER_URL")
        if not url:
            raise Unreachable("no scorer URL configured (set FUSEBENCH_SCORER_URL)")
        return cls(base_url=url, **overrides)


class HttpScorer:
    """HTTP gateway with idempotent retries and bounded concurrency.

    Retries on timeouts and 5xx responses with exponential backoff; a 4xx or
    a malformed body fails immediately.
    """

    def __init__(self, config: ScorerEndpointConfig, client: httpx.Client | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)
        self._sleep = sleep

    def score(self, request: ScorerRequest) -> ScorerResponse:
        route = self.config.kind_routes.get(request.kind)
        if route is None:
            raise Unreachable(f"no route configured for kind {request.kind.value!r}")
        url = self.config.base_url.rstrip("/") + route
        body = {
            "kind": request.kind.value,
            "premise": request.premise_or_context,
            "hypothesis": request.hypothesis_or_query,
            "request_id": request.request_id,
        }
        last_error: Exception | None = None
        start = time.monotonic()
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self.config.backoff_base * 2 ** (attempt - 1))
            try:
                resp = self._client.post(url, json=body)
            except httpx.TimeoutException as e:
                last_error = Timeout(str(e))
                continue
            except httpx.TransportError as e:
                last_error = Unreachable(str(e))
                continue
            if resp.status_code >= 500:
                last_error = Unreachable(f"HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise MalformedResponse(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                payload = resp.json()
                probability = float(payload["probability"])
            except (ValueError, KeyError, TypeError) as e:
                raise MalformedResponse(f"bad response body: {e}") from e
            return ScorerResponse(
                request_id=payload.get("request_id", request.request_id),
                probability=probability,
                latency_ms=1000 * (time.monotonic() - start),
                retries=attempt,
            )
        raise last_error if last_error else Unreachable(url)

    def score_batch(self, requests: Sequence[ScorerRequest]) -> list[ScorerResponse]:
        """Score concurrently up to max_in_flight; results in request order.
        Per-request failures surface as exception objects in the list."""
        if not requests:
            return []
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            futures = [pool.submit(self.score, r) for r in requests]
            out: list[ScorerResponse] = []
            for f in futures:
                out.append(f.result())  # propagates per-request errors in order
            return out

    def score_batch_settled(
        self, requests: Sequence[ScorerRequest]
    ) -> list[ScorerResponse | GatewayError]:
        """Like score_batch but embeds per-request errors instead of raising."""
        if not requests:
            return []
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            futures = [pool.submit(self.score, r) for r in requests]
            results: list[ScorerResponse | GatewayError] = []
            for f in futures:
                try:
                    results.append(f.result())
                except GatewayError as e:
                    results.append(e)
            return results

    def close(self) -> None:
        self._client.close()


class MockScorer:
    """Deterministic in-process gateway for tests and dry runs.

    Scripted values are keyed by (kind, premise, hypothesis); unknown pairs
    return the default probability.
    """

    def __init__(
        self,
        script: Mapping[tuple[ScorerKind, str, str], float] | None = None,
        default: float = 0.5,
    ):
        self.script = dict(script or {})
        self.default = default
        self.calls: list[ScorerRequest] = []

    def score(self, request: ScorerRequest) -> ScorerResponse:
        self.calls.append(request)
        key = (request.kind, request.premise_or_context, request.hypothesis_or_query)
        return ScorerResponse(
            request_id=request.request_id,
            probability=self.script.get(key, self.default),
        )

    def score_batch(self, requests: Sequence[ScorerRequest]) -> list[ScorerResponse]:
        return [self.score(r) for r in requests]
