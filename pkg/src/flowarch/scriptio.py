"""Refinement scripts: parsing, sequential execution, run reports.

A script is a list of rule lines applied in order to an architecture:

    add-component Accounting
    add-input Accounting progress
    add-output Accounting reports
    refine Accounting with summarize ordpay' progress -> reports delay 1 using process under true
    remove-input Management progress

Rule lines may end with mode=structural-first|enumerative|assumed to
override the run mode for that step.  Scripts may also carry transducer
blocks (same syntax as architecture documents) and subsystem blocks
(architecture document bodies bracketed by `subsystem NAME` ... `end`),
which rule lines reference by name.

Execution stops at the first failed premise.  The run report lists every
premise of every attempted step with the method that discharged it, and
renders to line-oriented key-value text that is byte-identical across runs
for fixed inputs and configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .archio import _Lines, _parse_transducer_block, build_behavior, digest
from .behavior import Transducer
from .calculus import (
    CheckConfig,
    Mode,
    RuleApplication,
    RuleId,
    StepReport,
    apply_step,
)
from .errors import ParseError, PremiseViolation
from .model import System

_RULE_KEYWORDS = (
    "refine",
    "add-output",
    "remove-output",
    "add-input",
    "remove-input",
    "add-component",
    "remove-component",
    "expand",
    "fold",
    "rename-channel",
    "rename-component",
)


@dataclass(frozen=True)
class ScriptStep:
    """One parsed rule line, with behavior references still unresolved."""

    line: int
    rule: RuleId
    mode: Mode | None = None
    component: str | None = None
    channel: str | None = None
    name: str | None = None
    inputs: tuple[str, ...] | None = None
    outputs: tuple[str, ...] | None = None
    members: tuple[str, ...] | None = None
    behavior_tokens: tuple[str, ...] | None = None
    subsystem: str | None = None
    invariant: str | None = None
    pairs: tuple[tuple[str, str], ...] | None = None
    rename_kind: str | None = None


@dataclass(frozen=True)
class ScriptDocument:
    steps: tuple[ScriptStep, ...]
    transducer_sources: tuple[tuple[str, str, int], ...]
    subsystem_sources: tuple[tuple[str, str, int], ...]


@dataclass(frozen=True)
class RunReport:
    horizon: int
    bound: int
    mode: Mode
    steps: tuple[StepReport, ...]
    ok: bool
    failed_step: int | None
    failure: str
    final_digest: str


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------


def _take_mode(tokens: list[str], line: int) -> tuple[list[str], Mode | None]:
    if tokens and tokens[-1].startswith("mode="):
        value = tokens[-1][len("mode="):]
        for mode in Mode:
            if mode.value == value:
                return tokens[:-1], mode
        raise ParseError(
            line,
            f"unknown mode {value!r}; expected one of "
            + ", ".join(m.value for m in Mode),
        )
    return tokens, None


def _index_of(tokens: list[str], keyword: str, line: int) -> int:
    if keyword not in tokens:
        raise ParseError(line, f"expected keyword {keyword!r} in rule line")
    return tokens.index(keyword)


def _parse_rule_line(line: int, tokens: list[str]) -> ScriptStep:
    tokens, mode = _take_mode(tokens, line)
    keyword = tokens[0]
    if keyword == "refine":
        if len(tokens) < 4 or tokens[2] != "with":
            raise ParseError(line, "expected: refine COMPONENT with BEHAVIOR...")
        rest = tokens[3:]
        if "under" in rest:
            cut = len(rest) - 1 - rest[::-1].index("under")
            expr, tail = rest[:cut], rest[cut + 1 :]
            if len(tail) != 1 or not expr:
                raise ParseError(
                    line, "expected: refine COMPONENT with BEHAVIOR under INVARIANT"
                )
            return ScriptStep(
                line, RuleId.R11_REFINE_WITH_INVARIANT, mode,
                component=tokens[1],
                behavior_tokens=tuple(expr),
                invariant=tail[0],
            )
        return ScriptStep(
            line, RuleId.R1_BEHAVIORAL, mode,
            component=tokens[1], behavior_tokens=tuple(rest),
        )
    if keyword in ("add-output", "remove-output", "add-input", "remove-input"):
        if len(tokens) != 3:
            raise ParseError(line, f"expected: {keyword} COMPONENT CHANNEL")
        rule = {
            "add-output": RuleId.R2_ADD_OUTPUT,
            "remove-output": RuleId.R3_REMOVE_OUTPUT,
            "add-input": RuleId.R4_ADD_INPUT,
            "remove-input": RuleId.R5_REMOVE_INPUT,
        }[keyword]
        return ScriptStep(line, rule, mode, component=tokens[1], channel=tokens[2])
    if keyword == "add-component":
        if len(tokens) == 2:
            return ScriptStep(
                line, RuleId.R6_ADD_COMPONENT_BASIC, mode, name=tokens[1]
            )
        i_in = _index_of(tokens, "inputs", line)
        i_out = _index_of(tokens, "outputs", line)
        i_with = _index_of(tokens, "with", line)
        if not (1 < i_in < i_out < i_with < len(tokens) - 1):
            raise ParseError(
                line,
                "expected: add-component NAME inputs ... outputs ... with BEHAVIOR",
            )
        return ScriptStep(
            line, RuleId.R7_ADD_COMPONENT, mode,
            name=tokens[1],
            inputs=tuple(tokens[i_in + 1 : i_out]),
            outputs=tuple(tokens[i_out + 1 : i_with]),
            behavior_tokens=tuple(tokens[i_with + 1 :]),
        )
    if keyword == "remove-component":
        if len(tokens) != 2:
            raise ParseError(line, "expected: remove-component NAME")
        return ScriptStep(line, RuleId.R8_REMOVE_COMPONENT, mode, name=tokens[1])
    if keyword == "expand":
        if len(tokens) != 4 or tokens[2] != "with":
            raise ParseError(line, "expected: expand COMPONENT with SUBSYSTEM")
        return ScriptStep(
            line, RuleId.R9_EXPAND, mode, component=tokens[1], subsystem=tokens[3]
        )
    if keyword == "fold":
        i_from = _index_of(tokens, "from", line)
        i_in = _index_of(tokens, "inputs", line)
        i_out = _index_of(tokens, "outputs", line)
        if not (1 < i_from < i_in < i_out):
            raise ParseError(
                line, "expected: fold NAME from MEMBERS... inputs ... outputs ..."
            )
        return ScriptStep(
            line, RuleId.R10_FOLD, mode,
            name=tokens[1],
            members=tuple(tokens[i_from + 1 : i_in]),
            inputs=tuple(tokens[i_in + 1 : i_out]),
            outputs=tuple(tokens[i_out + 1 :]),
        )
    if keyword in ("rename-channel", "rename-component"):
        rest = tokens[1:]
        if not rest or len(rest) % 2 != 0:
            raise ParseError(line, f"expected: {keyword} OLD NEW [OLD NEW ...]")
        pairs = tuple(
            (rest[k], rest[k + 1]) for k in range(0, len(rest), 2)
        )
        return ScriptStep(
            line, RuleId.R12_RENAME, mode,
            pairs=pairs,
            rename_kind=keyword.removeprefix("rename-"),
        )
    raise ParseError(
        line,
        f"unknown rule {keyword!r}; valid rules: " + ", ".join(_RULE_KEYWORDS),
    )


def parse_script(text: str) -> ScriptDocument:
    steps: list[ScriptStep] = []
    transducers: list[tuple[str, str, int]] = []
    subsystems: list[tuple[str, str, int]] = []
    raw = text.splitlines()
    k = 0
    while k < len(raw):
        number = k + 1
        body = raw[k].split("#", 1)[0].strip()
        if not body:
            k += 1
            continue
        tokens = body.split()
        if tokens[0] == "transducer":
            if len(tokens) != 2:
                raise ParseError(number, "expected: transducer NAME")
            start = k
            k += 1
            while k < len(raw):
                inner = raw[k].split("#", 1)[0].strip()
                if inner and inner.split()[0] in (
                    ("transducer", "subsystem") + _RULE_KEYWORDS
                ):
                    break
                k += 1
            name = tokens[1]
            if any(n == name for n, _, _ in transducers):
                raise ParseError(number, f"transducer {name!r} declared twice")
            transducers.append((name, "\n".join(raw[start:k]), start + 1))
        elif tokens[0] == "subsystem":
            if len(tokens) != 2:
                raise ParseError(number, "expected: subsystem NAME ... end")
            start = k
            k += 1
            closed = False
            while k < len(raw):
                inner = raw[k].split("#", 1)[0].strip()
                if inner == "end":
                    closed = True
                    k += 1
                    break
                k += 1
            if not closed:
                raise ParseError(number, f"subsystem {tokens[1]!r} missing 'end'")
            name = tokens[1]
            if any(n == name for n, _, _ in subsystems):
                raise ParseError(number, f"subsystem {name!r} declared twice")
            body_text = "\n".join(raw[start + 1 : k - 1])
            subsystems.append((name, body_text, start + 2))
        else:
            steps.append(_parse_rule_line(number, tokens))
            k += 1

    known_subsystems = {n for n, _, _ in subsystems}
    for step in steps:
        if step.rule is RuleId.R9_EXPAND and step.subsystem not in known_subsystems:
            raise ParseError(
                step.line, f"unknown subsystem {step.subsystem!r} in expand"
            )
    return ScriptDocument(tuple(steps), tuple(transducers), tuple(subsystems))


# ----------------------------------------------------------------------
# execution
# ----------------------------------------------------------------------


def _resolve_transducers(
    doc: ScriptDocument, alphabet: tuple[str, ...]
) -> dict[str, Transducer]:
    resolved: dict[str, Transducer] = {}
    for name, source, offset in doc.transducer_sources:
        lines = _Lines.of(source)
        header_line, header = lines.next()
        try:
            _, machine = _parse_transducer_block(lines, alphabet, header, header_line)
        except ParseError as exc:
            raise ParseError(offset + exc.line - 1, exc.message) from exc
        resolved[name] = machine
    return resolved


def _resolve_subsystems(
    doc: ScriptDocument, alphabet: tuple[str, ...]
) -> dict[str, System]:
    from .archio import parse_document

    resolved: dict[str, System] = {}
    for name, source, offset in doc.subsystem_sources:
        has_alphabet = any(
            row.split("#", 1)[0].split()[:1] == ["alphabet"]
            for row in source.splitlines()
        )
        header = f"system {name}\n"
        if not has_alphabet:
            header += "alphabet " + " ".join(alphabet) + "\n"
        try:
            resolved[name] = parse_document(header + source).system
        except ParseError as exc:
            raise ParseError(offset + exc.line - 2, exc.message) from exc
    return resolved


def _resolve_step(
    step: ScriptStep,
    system: System,
    config: CheckConfig,
    transducers: dict[str, Transducer],
    subsystems: dict[str, System],
) -> RuleApplication:
    behavior = None
    if step.behavior_tokens is not None:
        if step.rule is RuleId.R7_ADD_COMPONENT:
            inputs, outputs = step.inputs, step.outputs
        elif system.has_component(step.component):
            current = system.component(step.component)
            inputs, outputs = current.inputs, current.outputs
        else:
            # Let the rule itself report the unknown component.
            inputs, outputs = (), ()
        behavior = build_behavior(
            step.behavior_tokens, system.alphabet, inputs, outputs,
            config.bound, transducers, step.line,
        )
    return RuleApplication(
        rule=step.rule,
        component=step.component,
        channel=step.channel,
        name=step.name,
        behavior=behavior,
        inputs=frozenset(step.inputs) if step.inputs is not None else None,
        outputs=frozenset(step.outputs) if step.outputs is not None else None,
        members=step.members,
        subsystem=subsystems.get(step.subsystem) if step.subsystem else None,
        invariant=step.invariant,
        pairs=step.pairs,
        rename_kind=step.rename_kind,
    )


def run_script(
    system: System, doc: ScriptDocument, config: CheckConfig
) -> tuple[System, RunReport]:
    """Apply every step in order; stop at the first failed premise."""
    transducers = _resolve_transducers(doc, system.alphabet)
    subsystems = _resolve_subsystems(doc, system.alphabet)
    current = system
    reports: list[StepReport] = []
    for index, step in enumerate(doc.steps, start=1):
        application = _resolve_step(step, current, config, transducers, subsystems)
        step_config = (
            config if step.mode is None else replace(config, mode=step.mode)
        )
        try:
            current, report = apply_step(current, application, step_config)
        except PremiseViolation as violation:
            reports.append(violation.report)
            return current, RunReport(
                horizon=config.horizon,
                bound=config.bound,
                mode=config.mode,
                steps=tuple(reports),
                ok=False,
                failed_step=index,
                failure=f"{violation.code}: {violation.message}",
                final_digest=digest(current),
            )
        reports.append(report)
    return current, RunReport(
        horizon=config.horizon,
        bound=config.bound,
        mode=config.mode,
        steps=tuple(reports),
        ok=True,
        failed_step=None,
        failure="",
        final_digest=digest(current),
    )


# ----------------------------------------------------------------------
# report rendering
# ----------------------------------------------------------------------


def format_run_report(report: RunReport) -> str:
    """Line-oriented key-value text, byte-deterministic for fixed inputs."""
    out = [
        f"horizon: {report.horizon}",
        f"bound: {report.bound}",
        f"mode: {report.mode.value}",
        f"steps: {len(report.steps)}",
    ]
    for number, step in enumerate(report.steps, start=1):
        out.append(f"step: {number}")
        out.append(f"  rule: {step.rule.value}")
        for key, value in step.parameters:
            out.append(f"  param.{key}: {value}")
        for premise in step.premises:
            status = "pass" if premise.passed else "fail"
            line = (
                f"  premise: {premise.text} | {premise.method} | {status} | "
                f"{premise.code}"
            )
            if premise.detail:
                line += f" | {premise.detail}"
            out.append(line)
        out.append(f"  kind: {step.kind.value}")
        out.append(f"  digest-before: {step.digest_before}")
        out.append(f"  digest-after: {step.digest_after}")
        out.append(f"  status: {'ok' if step.ok else 'failed'}")
    out.append(f"final-digest: {report.final_digest}")
    if report.ok:
        out.append("verdict: ok")
    else:
        out.append(f"verdict: failed at step {report.failed_step} ({report.failure})")
    return "\n".join(out) + "\n"
