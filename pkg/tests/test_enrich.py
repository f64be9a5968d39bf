from __future__ import annotations

import copy
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from logcurves.enrich import (EnrichRequest, ProviderConfig, ProviderError,
                              build_prompt, complete, enrich)
from test_curvedoc import make_doc


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "echo"  # or "fail", "flaky"
    calls = 0

    def do_POST(self):
        cls = type(self)
        cls.calls += 1
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        if cls.behavior == "fail" or (cls.behavior == "flaky" and cls.calls < 3):
            self.send_response(500)
            self.end_headers()
            self.wfile.write(b"boom")
            return
        content = payload["messages"][-1]["content"]
        body = json.dumps({"content": f"ECHO:{content[:60]}"}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    handler = type("Handler", (_StubHandler,), {"behavior": "echo", "calls": 0})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/chat", handler
    server.shutdown()
    thread.join(timeout=2)


def provider(url, **kw) -> ProviderConfig:
    kw.setdefault("backoff_base", 0.01)
    return ProviderConfig(endpoint=url, model="stub-model", **kw)


class TestBuildPrompt:
    def test_single_contains_all_templates_verbatim(self):
        doc = make_doc(1, 3)
        prompt = build_prompt(EnrichRequest("single", (1,)), doc)
        for text in doc.checkpoints[1].template_texts:
            assert text in prompt
        assert "summarize" in prompt

    def test_pairwise_contains_both_blocks(self):
        doc = make_doc(1, 3)
        prompt = build_prompt(EnrichRequest("pairwise", (0, 2)), doc)
        assert "Checkpoint 0" in prompt and "Checkpoint 2" in prompt
        assert "similarities" in prompt and "severity" in prompt

    def test_truncation_note(self):
        doc = make_doc(1, 1)
        doc.checkpoints[0].template_texts = [f"t{i}" for i in range(500)]
        prompt = build_prompt(EnrichRequest("single", (0,), max_templates=200), doc)
        assert "(200 of 500 templates shown)" in prompt
        assert "- t199" in prompt and "- t200" not in prompt

    def test_reproducible(self):
        doc = make_doc(1, 3)
        req = EnrichRequest("single", (0,))
        assert build_prompt(req, doc) == build_prompt(req, doc)

    def test_out_of_range_index(self):
        with pytest.raises(IndexError):
            build_prompt(EnrichRequest("single", (99,)), make_doc())


class TestRequestValidation:
    def test_pairwise_needs_distinct(self):
        with pytest.raises(ValueError):
            EnrichRequest("pairwise", (1, 1))

    def test_single_needs_one_index(self):
        with pytest.raises(ValueError):
            EnrichRequest("single", (1, 2))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            EnrichRequest("triple", (1, 2))


class TestEnrich:
    def test_echo_appended_as_annotation(self, stub_server):
        url, handler = stub_server
        doc = make_doc(1, 3)
        before = copy.deepcopy(doc)
        text = enrich(EnrichRequest("single", (1,)), provider(url), doc)
        assert text.startswith("ECHO:")
        assert doc.checkpoints[1].annotations[-1] == text
        # nothing else moved
        doc.checkpoints[1].annotations.pop()
        assert doc == before

    def test_pairwise_annotates_both(self, stub_server):
        url, handler = stub_server
        doc = make_doc(1, 3)
        enrich(EnrichRequest("pairwise", (0, 2)), provider(url), doc)
        assert any("compared with checkpoint 2" in a for a in doc.checkpoints[0].annotations)
        assert any("compared with checkpoint 0" in a for a in doc.checkpoints[2].annotations)

    def test_persistent_500_raises_and_leaves_doc_unchanged(self, stub_server):
        url, handler = stub_server
        handler.behavior = "fail"
        doc = make_doc(1, 3)
        before = copy.deepcopy(doc)
        with pytest.raises(ProviderError):
            enrich(EnrichRequest("single", (0,)), provider(url, max_retries=2), doc)
        assert handler.calls == 3  # initial try + two retries
        assert doc == before

    def test_retry_recovers_from_transient_errors(self, stub_server):
        url, handler = stub_server
        handler.behavior = "flaky"
        doc = make_doc(1, 3)
        text = enrich(EnrichRequest("single", (0,)), provider(url, max_retries=2), doc)
        assert text.startswith("ECHO:")
        assert handler.calls == 3

    def test_offline_refuses_before_any_call(self, stub_server):
        url, handler = stub_server
        doc = make_doc(1, 3)
        with pytest.raises(ProviderError, match="offline"):
            enrich(EnrichRequest("single", (0,)), provider(url, offline=True), doc)
        assert handler.calls == 0
        assert doc == make_doc(1, 3)

    def test_unreachable_endpoint(self):
        doc = make_doc(1, 3)
        cfg = provider("http://127.0.0.1:1/nope", max_retries=0, timeout=0.5)
        with pytest.raises(ProviderError):
            enrich(EnrichRequest("single", (0,)), cfg, doc)

    def test_bearer_token_sent_when_configured(self, monkeypatch):
        seen = {}

        class Capture(_StubHandler):
            behavior = "echo"
            calls = 0

            def do_POST(self):
                seen["auth"] = self.headers.get("Authorization")
                super().do_POST()

        monkeypatch.setenv("LOGCURVES_API_TOKEN", "sekret")
        cap = ThreadingHTTPServer(("127.0.0.1", 0), Capture)
        t = threading.Thread(target=cap.serve_forever, daemon=True)
        t.start()
        try:
            out = complete("hi", provider(f"http://127.0.0.1:{cap.server_address[1]}/c"))
            assert out.startswith("ECHO:")
            assert seen["auth"] == "Bearer sekret"
        finally:
            cap.shutdown()
            t.join(timeout=2)

    def test_openai_style_response_accepted(self):
        class OpenAIStyle(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                self.rfile.read(length)
                body = json.dumps({"choices": [{"message": {"content": "from choices"}}]}).encode()
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        srv = ThreadingHTTPServer(("127.0.0.1", 0), OpenAIStyle)
        t = threading.Thread(target=srv.serve_forever, daemon=True)
        t.start()
        try:
            out = complete("hi", provider(f"http://127.0.0.1:{srv.server_address[1]}/c"))
            assert out == "from choices"
        finally:
            srv.shutdown()
            t.join(timeout=2)
