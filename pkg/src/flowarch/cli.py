"""Command-line front end.

The CLI is a thin client: every subcommand calls the HTTP service.  By
default it talks to an in-process instance over an ASGI transport, so no
server needs to be running; pass --server URL to target a remote one.

Exit codes: 0 on success, 1 when a premise or refinement check fails,
2 on parse or consistency errors (and other operational failures).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx

from .calculus import Mode


class _InProcessClient:
    """Synchronous facade over the ASGI app for one-shot calls."""

    def __enter__(self) -> "_InProcessClient":
        return self

    def __exit__(self, *exc) -> bool:
        return False

    def post(self, endpoint: str, json: dict) -> httpx.Response:
        import asyncio

        from .service import app

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://flowarch", timeout=600.0
            ) as client:
                return await client.post(endpoint, json=json)

        return asyncio.run(go())


def _client(server: str | None) -> httpx.Client | _InProcessClient:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    return _InProcessClient()


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _post(client, endpoint: str, payload: dict) -> dict:
    try:
        response = client.post(endpoint, json=payload)
        response.raise_for_status()
    except httpx.HTTPError as exc:
        print(f"error: service request failed: {exc}", file=sys.stderr)
        raise SystemExit(2)
    return response.json()


def _fail_on_error(data: dict) -> dict:
    if not data.get("ok", False):
        info = data.get("error") or {}
        line = info.get("line")
        place = f"line {line}: " if line else ""
        print(
            f"error ({info.get('category', 'engine')}): {place}"
            f"{info.get('message', 'unknown failure')}",
            file=sys.stderr,
        )
        raise SystemExit(2)
    return data


def _cmd_check(args, client) -> int:
    data = _fail_on_error(_post(client, "/check", {"text": _read(args.file)}))
    print(f"system: {data['name']}")
    print("components: " + " ".join(data["components"]))
    print("inputs: " + " ".join(data["inputs"]))
    print("outputs: " + " ".join(data["outputs"]))
    print(f"digest: {data['digest']}")
    print("consistent")
    return 0


def _cmd_semantics(args, client) -> int:
    payload = {"text": _read(args.file), "horizon": args.horizon}
    if args.bound is not None:
        payload["bound"] = args.bound
    data = _fail_on_error(_post(client, "/semantics", payload))
    print(f"horizon: {data['horizon']}")
    print(f"bound: {data['bound']}")
    for entry in data["entries"]:
        print(f"input: {entry['input']}")
        for reaction in entry["outputs"]:
            print(f"  -> {reaction}")
    return 0


def _cmd_apply(args, client) -> int:
    payload = {
        "architecture": _read(args.file),
        "script": _read(args.script),
        "horizon": args.horizon,
        "mode": args.mode,
    }
    if args.bound is not None:
        payload["bound"] = args.bound
    data = _fail_on_error(_post(client, "/apply", payload))
    if args.report:
        Path(args.report).write_text(data["report"])
    if data["passed"]:
        print(data["result"], end="")
        print("applied: all steps passed", file=sys.stderr)
        return 0
    print(data["report"], end="")
    print(
        f"failed at step {data['failed_step']}: {data['failure']}",
        file=sys.stderr,
    )
    return 1


def _cmd_verify(args, client) -> int:
    payload = {
        "old": _read(args.old),
        "new": _read(args.new),
        "horizon": args.horizon,
    }
    if args.bound is not None:
        payload["bound"] = args.bound
    data = _fail_on_error(_post(client, "/verify", payload))
    print(f"outcome: {data['outcome']}")
    if data.get("detail"):
        print(f"detail: {data['detail']}")
    if data.get("counterexample"):
        print(f"counterexample: {data['counterexample']}")
    return 0 if data["holds"] else 1


def _cmd_render(args, client) -> int:
    data = _fail_on_error(_post(client, "/render", {"text": _read(args.file)}))
    if args.output:
        Path(args.output).write_text(data["dot"])
    else:
        print(data["dot"], end="")
    return 0


def _cmd_serve(args, _client) -> int:
    import uvicorn

    uvicorn.run("flowarch.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowarch",
        description="Check, run, refactor, and render information-flow "
        "architectures.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="talk to a running service instead of the in-process engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a document and check consistency")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("semantics", help="print the bounded black-box table")
    p.add_argument("file")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(handler=_cmd_semantics)

    p = sub.add_parser("apply", help="run a refinement script")
    p.add_argument("file")
    p.add_argument("script")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--bound", type=int, default=None)
    p.add_argument(
        "--mode",
        choices=[mode.value for mode in Mode],
        default=Mode.STRUCTURAL_FIRST.value,
    )
    p.add_argument("--report", metavar="OUT", default=None)
    p.set_defaults(handler=_cmd_apply)

    p = sub.add_parser("verify", help="check that NEW refines OLD")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--horizon", type=int, default=3)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("render", help="emit a GraphViz digraph")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=_cmd_render)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return args.handler(args, None)
    with _client(args.server) as client:
        return args.handler(args, client)


if __name__ == "__main__":
    sys.exit(main())
