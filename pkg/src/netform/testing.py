"""In-process mock of a chat-completions endpoint for hermetic tests."""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Iterable

Responder = Callable[[str], str]


def fixed_responder(text: str) -> Responder:
    return lambda prompt: text


def sequence_responder(texts: Iterable[str]) -> Responder:
    items = list(texts)
    state = {"i": 0}
    lock = threading.Lock()

    def respond(prompt):
        with lock:
            i = state["i"]
            state["i"] += 1
        return items[min(i, len(items) - 1)]

    return respond


_PROFILES = re.compile(r"<PROFILES>\n(.*?)\n</PROFILES>", re.DOTALL)


def first_candidate_responder(n: int = 1, fence: bool = True) -> Responder:
    """Pick the first ``n`` presented candidates; mimics a well-behaved model."""
    def respond(prompt):
        m = _PROFILES.search(prompt)
        cands = json.loads(m.group(1)) if m else []
        body = json.dumps([{"name": c["name"], "reason": "listed first"} for c in cands[:n]], indent=2)
        return f"```json\n{body}\n```" if fence else body

    return respond


class MockChatServer:
    """Threaded HTTP server answering ``POST /chat/completions``.

    ``hits`` counts requests received; ``requests`` keeps their JSON bodies.
    """

    def __init__(self, responder: Responder | str, status: int = 200):
        self.responder = fixed_responder(responder) if isinstance(responder, str) else responder
        self.status = status
        self.hits = 0
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with server._lock:
                    server.hits += 1
                    server.requests.append(body)
                if not self.path.rstrip("/").endswith("/chat/completions"):
                    self.send_error(404)
                    return
                prompt = body.get("messages", [{}])[-1].get("content", "")
                payload = json.dumps({
                    "id": f"mock-{server.hits}",
                    "object": "chat.completion",
                    "model": body.get("model"),
                    "choices": [{"index": 0, "message": {"role": "assistant", "content": server.responder(prompt)},
                                 "finish_reason": "stop"}],
                }).encode("utf-8")
                self.send_response(server.status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/v1"

    def start(self) -> "MockChatServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


class PromptRecorder:
    """Policy wrapper that renders and keeps every prompt it is shown."""

    def __init__(self, inner):
        from netform.policies.prompts import render_prompt

        self.inner = inner
        self.name = f"recorded({inner.fingerprint()})"
        self.prompts: list[str] = []
        self._render = render_prompt

    def fingerprint(self) -> str:
        return self.inner.fingerprint()

    def decide(self, ctx):
        if ctx.bundle is not None:
            self.prompts.append(self._render(ctx.bundle()))
        return self.inner.decide(ctx)
