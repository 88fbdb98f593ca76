"""Chat-completions client with retries and a content-addressed response cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import httpx

from netform.policies.prompts import (
    PolicyDecision, PromptBundle, ResponseParseError, ResponseValidationError, parse_response, render_prompt,
)

log = logging.getLogger(__name__)

TEMPERATURE_RANGE = (0.0, 2.0)


class LlmError(RuntimeError):
    pass


class LlmExhaustedError(LlmError):
    """Every attempt failed; ``last_response`` holds the final raw text (if any)."""

    def __init__(self, message: str, last_response: str | None, attempts: int):
        super().__init__(message)
        self.last_response = last_response
        self.attempts = attempts


class CacheCorruptionError(LlmError):
    pass


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str
    model: str
    temperature: float = 1.0
    timeout: float = 60.0
    max_retries: int = 3
    cache_dir: str | None = None
    api_key_env: str = "NETFORM_API_KEY"
    attempt_offset: int = 0
    max_concurrency: int = 1

    def __post_init__(self):
        lo, hi = TEMPERATURE_RANGE
        if not lo <= float(self.temperature) <= hi:
            raise ValueError(f"temperature must lie in [{lo}, {hi}], got {self.temperature}")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")


def cache_key(model: str, temperature: float, prompt: str, attempt: int) -> str:
    payload = json.dumps([model, float(temperature), prompt, int(attempt)], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ResponseCache:
    """One JSON file per key; writes go through a temp file and ``os.replace``."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            rec = json.loads(path.read_text(encoding="utf-8"))
            text = rec["response"]
            ok = rec.get("key") == key and rec.get("sha256") == _sha(text)
        except (json.JSONDecodeError, KeyError, TypeError):
            ok = False
        if not ok:
            raise CacheCorruptionError(f"cache entry {path} is corrupt")
        return text

    def put(self, key: str, response: str, meta: dict | None = None) -> None:
        rec = {"key": key, "sha256": _sha(response), "response": response, **(meta or {})}
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(rec, fh, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


class LlmClient:
    def __init__(self, cfg: LlmEndpointConfig, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        self.cache = ResponseCache(cfg.cache_dir) if cfg.cache_dir else None
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(cfg.api_key_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._http = httpx.Client(timeout=cfg.timeout, headers=headers, transport=transport)
        self.requests_sent = 0
        self.cache_hits = 0

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def fingerprint(self) -> str:
        return f"llm({self.cfg.model},T={float(self.cfg.temperature)})"

    def _post(self, prompt: str) -> str:
        url = self.cfg.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self.cfg.model,
            "temperature": float(self.cfg.temperature),
            "messages": [{"role": "user", "content": prompt}],
        }
        self.requests_sent += 1
        resp = self._http.post(url, json=body)
        resp.raise_for_status()
        data = resp.json()
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise LlmError(f"unexpected response shape: {str(data)[:200]}") from None

    def complete(self, prompt: str, attempt: int = 0) -> str:
        """Raw reply for ``(prompt, attempt)``, from cache when available."""
        idx = attempt + self.cfg.attempt_offset
        key = cache_key(self.cfg.model, self.cfg.temperature, prompt, idx)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                self.cache_hits += 1
                return hit
        text = self._post(prompt)
        if self.cache is not None:
            self.cache.put(key, text, {"model": self.cfg.model, "temperature": float(self.cfg.temperature),
                                       "attempt": idx})
        return text

    def query(self, prompt: str, parse: Callable[[str], object]):
        """Try up to ``max_retries + 1`` attempts until ``parse`` accepts a reply."""
        last: str | None = None
        n_attempts = self.cfg.max_retries + 1
        for attempt in range(n_attempts):
            try:
                last = self.complete(prompt, attempt)
            except (httpx.HTTPError, LlmError) as exc:
                if isinstance(exc, CacheCorruptionError):
                    raise
                log.warning("attempt %d transport failure: %s", attempt, exc)
                continue
            try:
                return parse(last)
            except (ResponseParseError, ResponseValidationError) as exc:
                log.warning("attempt %d unusable reply: %s", attempt, exc)
        raise LlmExhaustedError(f"no usable reply after {n_attempts} attempts", last, n_attempts)

    def query_many(self, prompts: Sequence[str], parse: Callable[[str], object]) -> list:
        """Issue independent queries with up to ``max_concurrency`` in flight; results keep input order."""
        if self.cfg.max_concurrency == 1 or len(prompts) < 2:
            return [self.query(p, parse) for p in prompts]
        with ThreadPoolExecutor(max_workers=self.cfg.max_concurrency) as pool:
            return list(pool.map(lambda p: self.query(p, parse), prompts))


def llm_decide(client: LlmClient | LlmEndpointConfig, bundle: PromptBundle) -> PolicyDecision:
    if isinstance(client, LlmEndpointConfig):
        with LlmClient(client) as c:
            return llm_decide(c, bundle)
    prompt = render_prompt(bundle)
    fp = client.fingerprint()
    return client.query(prompt, lambda text: parse_response(text, bundle, fp))
