"""HTTP service exposing the engine.

Every endpoint accepts documents as text and returns JSON.  Failures are
reported in-band: responses carry an `ok` flag and, when false, an error
object with a category (`parse`, `consistency`, `premise`, or `engine`)
so clients can map outcomes to exit codes without parsing messages.
"""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from .archio import parse_document, print_architecture, show_tuple
from .calculus import CheckConfig, Mode
from .dot import render_dot
from .errors import ConsistencyError, EngineError, ParseError
from .scriptio import format_run_report, parse_script, run_script
from .semantics import denotation_table, system_refines

from . import __version__


class ErrorInfo(BaseModel):
    category: str
    message: str
    line: int | None = None


class ArchitectureRequest(BaseModel):
    text: str


class CheckResponse(BaseModel):
    ok: bool
    error: ErrorInfo | None = None
    name: str | None = None
    components: list[str] = Field(default_factory=list)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    channels: list[str] = Field(default_factory=list)
    digest: str | None = None


class SemanticsRequest(BaseModel):
    text: str
    horizon: int = 3
    bound: int | None = None


class TableEntry(BaseModel):
    input: str
    outputs: list[str]


class SemanticsResponse(BaseModel):
    ok: bool
    error: ErrorInfo | None = None
    horizon: int | None = None
    bound: int | None = None
    entries: list[TableEntry] = Field(default_factory=list)


class ApplyRequest(BaseModel):
    architecture: str
    script: str
    horizon: int = 3
    bound: int | None = None
    mode: str = Mode.STRUCTURAL_FIRST.value


class ApplyResponse(BaseModel):
    ok: bool
    error: ErrorInfo | None = None
    passed: bool | None = None
    failed_step: int | None = None
    failure: str | None = None
    report: str | None = None
    result: str | None = None
    final_digest: str | None = None


class VerifyRequest(BaseModel):
    old: str
    new: str
    horizon: int = 3
    bound: int | None = None


class VerifyResponse(BaseModel):
    ok: bool
    error: ErrorInfo | None = None
    holds: bool | None = None
    outcome: str | None = None
    counterexample: str | None = None
    detail: str | None = None


class RenderResponse(BaseModel):
    ok: bool
    error: ErrorInfo | None = None
    dot: str | None = None


def _error(exc: Exception) -> ErrorInfo:
    if isinstance(exc, ParseError):
        return ErrorInfo(category="parse", message=exc.message, line=exc.line)
    if isinstance(exc, ConsistencyError):
        return ErrorInfo(category="consistency", message=str(exc))
    if isinstance(exc, EngineError):
        return ErrorInfo(category="engine", message=str(exc))
    raise exc


def _mode(value: str) -> Mode:
    for mode in Mode:
        if mode.value == value:
            return mode
    raise ParseError(1, f"unknown mode {value!r}")


def create_app() -> FastAPI:
    app = FastAPI(title="flowarch", version=__version__)

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/check", response_model=CheckResponse)
    def check(request: ArchitectureRequest) -> CheckResponse:
        from .archio import digest as arch_digest

        try:
            doc = parse_document(request.text)
        except Exception as exc:
            return CheckResponse(ok=False, error=_error(exc))
        system = doc.system
        return CheckResponse(
            ok=True,
            name=system.name,
            components=sorted(c.name for c in system.components),
            inputs=sorted(system.inputs),
            outputs=sorted(system.outputs),
            channels=sorted(system.channels),
            digest=arch_digest(system),
        )

    @app.post("/semantics", response_model=SemanticsResponse)
    def semantics(request: SemanticsRequest) -> SemanticsResponse:
        try:
            doc = parse_document(request.text)
            bound = doc.bound if request.bound is None else request.bound
            table = denotation_table(doc.system, request.horizon, bound)
        except Exception as exc:
            return SemanticsResponse(ok=False, error=_error(exc))
        entries = [
            TableEntry(
                input=show_tuple(env),
                outputs=[show_tuple(out) for out in sorted(reactions)],
            )
            for env, reactions in table.entries
        ]
        return SemanticsResponse(
            ok=True, horizon=table.horizon, bound=table.bound, entries=entries
        )

    @app.post("/apply", response_model=ApplyResponse)
    def apply(request: ApplyRequest) -> ApplyResponse:
        try:
            doc = parse_document(request.architecture)
            script = parse_script(request.script)
            bound = doc.bound if request.bound is None else request.bound
            config = CheckConfig(
                horizon=request.horizon, bound=bound, mode=_mode(request.mode)
            )
            final, report = run_script(doc.system, script, config)
        except Exception as exc:
            return ApplyResponse(ok=False, error=_error(exc))
        return ApplyResponse(
            ok=True,
            passed=report.ok,
            failed_step=report.failed_step,
            failure=report.failure or None,
            report=format_run_report(report),
            result=print_architecture(final),
            final_digest=report.final_digest,
        )

    @app.post("/verify", response_model=VerifyResponse)
    def verify(request: VerifyRequest) -> VerifyResponse:
        try:
            old_doc = parse_document(request.old)
            new_doc = parse_document(request.new)
            bound = old_doc.bound if request.bound is None else request.bound
            verdict = system_refines(
                old_doc.system, new_doc.system, request.horizon, bound
            )
        except Exception as exc:
            return VerifyResponse(ok=False, error=_error(exc))
        counterexample = None
        if verdict.counterexample is not None:
            env, produced = verdict.counterexample
            counterexample = (
                f"input {show_tuple(env)} produced {show_tuple(produced)}"
            )
        return VerifyResponse(
            ok=True,
            holds=bool(verdict),
            outcome=verdict.outcome.value,
            counterexample=counterexample,
            detail=verdict.detail or None,
        )

    @app.post("/render", response_model=RenderResponse)
    def render(request: ArchitectureRequest) -> RenderResponse:
        try:
            doc = parse_document(request.text)
            dot = render_dot(doc.system)
        except Exception as exc:
            return RenderResponse(ok=False, error=_error(exc))
        return RenderResponse(ok=True, dot=dot)

    return app


app = create_app()
