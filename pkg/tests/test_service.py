"""HTTP service endpoints, exercised through an in-process ASGI client."""

from __future__ import annotations

import asyncio

import httpx

from flowarch.archio import digest, parse_architecture
from flowarch.service import create_app

from test_textio import PIPE_TEXT

app = create_app()


def post(path: str, payload: dict) -> httpx.Response:
    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://test"
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def get(path: str) -> httpx.Response:
    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://test"
        ) as client:
            return await client.get(path)

    return asyncio.run(go())


def test_health():
    response = get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["version"]


def test_check_reports_interface_and_digest():
    body = post("/check", {"text": PIPE_TEXT}).json()
    assert body["ok"] is True
    assert body["name"] == "Pipe"
    assert body["components"] == ["C1", "C2"]
    assert body["inputs"] == ["p"]
    assert body["outputs"] == ["r"]
    assert body["channels"] == ["p", "q", "r"]
    assert body["digest"] == digest(parse_architecture(PIPE_TEXT))
    assert body["error"] is None


def test_check_parse_error_category():
    body = post("/check", {"text": "system X\nwidget\n"}).json()
    assert body["ok"] is False
    assert body["error"]["category"] == "parse"
    assert body["error"]["line"] == 2
    assert "widget" in body["error"]["message"]


def test_check_consistency_error_category():
    text = PIPE_TEXT.replace(
        "component C2\n  inputs q\n  outputs r\n  behavior copy q -> r",
        "component C2\n  inputs p\n  outputs q r\n  behavior copy p -> r",
    )
    body = post("/check", {"text": text}).json()
    assert body["ok"] is False
    assert body["error"]["category"] == "consistency"
    assert "condition 2" in body["error"]["message"]


def test_check_rejects_malformed_payload():
    assert post("/check", {}).status_code == 422


def test_semantics_frozen_table():
    body = post("/semantics", {"text": PIPE_TEXT, "horizon": 2}).json()
    assert body["ok"] is True
    assert body["horizon"] == 2
    assert body["bound"] == 1
    inputs = [entry["input"] for entry in body["entries"]]
    assert inputs == ["p=<>|<>", "p=<>|<a>", "p=<a>|<>", "p=<a>|<a>"]
    # Two copy stages in series delay the input by two ticks, so nothing
    # reaches the output inside this horizon.
    for entry in body["entries"]:
        assert entry["outputs"] == ["r=<>|<>"]


def test_semantics_bound_defaults_to_document():
    text = PIPE_TEXT.replace("bound 1", "bound 2")
    assert post("/semantics", {"text": text, "horizon": 1}).json()["bound"] == 2
    body = post("/semantics", {"text": text, "horizon": 1, "bound": 1}).json()
    assert body["bound"] == 1


def test_apply_success_round_trips_result():
    script = "rename-channel q wire\nrename-component C1 Head\n"
    body = post(
        "/apply",
        {"architecture": PIPE_TEXT, "script": script, "horizon": 2},
    ).json()
    assert body["ok"] is True
    assert body["passed"] is True
    assert body["failed_step"] is None
    assert body["failure"] is None
    assert "verdict: ok" in body["report"]
    final = parse_architecture(body["result"])
    assert final.has_component("Head")
    assert digest(final) == body["final_digest"]


def test_apply_premise_failure_is_in_band():
    body = post(
        "/apply",
        {"architecture": PIPE_TEXT, "script": "add-output C1 r\n", "horizon": 2},
    ).json()
    assert body["ok"] is True
    assert body["passed"] is False
    assert body["failed_step"] == 1
    assert body["failure"].startswith("R2_CHANNEL_NOT_FRESH")
    assert digest(parse_architecture(body["result"])) == digest(
        parse_architecture(PIPE_TEXT)
    )
    assert "verdict: failed at step 1" in body["report"]


def test_apply_script_parse_error():
    body = post(
        "/apply",
        {"architecture": PIPE_TEXT, "script": "frobnicate X\n"},
    ).json()
    assert body["ok"] is False
    assert body["error"]["category"] == "parse"
    assert body["error"]["line"] == 1


def test_apply_unknown_mode_is_parse_error():
    body = post(
        "/apply",
        {"architecture": PIPE_TEXT, "script": "", "mode": "warp"},
    ).json()
    assert body["ok"] is False
    assert body["error"]["category"] == "parse"
    assert "unknown mode 'warp'" in body["error"]["message"]


def test_verify_identical_systems_hold():
    body = post(
        "/verify", {"old": PIPE_TEXT, "new": PIPE_TEXT, "horizon": 2}
    ).json()
    assert body["ok"] is True
    assert body["holds"] is True
    assert body["outcome"] == "holds"
    assert body["counterexample"] is None


def test_verify_reports_counterexample():
    widened = PIPE_TEXT.replace("behavior copy q -> r", "behavior chaos")
    body = post("/verify", {"old": PIPE_TEXT, "new": widened, "horizon": 2}).json()
    assert body["ok"] is True
    assert body["holds"] is False
    assert body["outcome"] == "fails"
    assert "produced" in body["counterexample"]
    assert "input" in body["counterexample"]


def test_verify_interface_mismatch_is_engine_error():
    renamed = PIPE_TEXT.replace("outputs r", "outputs s").replace(
        "copy q -> r", "copy q -> s"
    )
    body = post("/verify", {"old": PIPE_TEXT, "new": renamed, "horizon": 2}).json()
    assert body["ok"] is False
    assert body["error"]["category"] == "engine"
    assert "identical interfaces" in body["error"]["message"]


def test_render_returns_dot():
    body = post("/render", {"text": PIPE_TEXT}).json()
    assert body["ok"] is True
    assert body["dot"].startswith('digraph "Pipe"')
    bad = post("/render", {"text": "system X\n"}).json()
    assert bad["ok"] is False
    assert bad["error"]["category"] == "parse"
