"""The twelve transformation rules of the refinement calculus.

Each rule takes a system plus parameters, checks its premises, and returns
the transformed system together with a step report listing every premise,
the method that discharged it, and digests of the system before and after.
A failed premise raises PremiseViolation carrying the partial report; the
input system is never mutated, so a failed step leaves it bit-identical.

Premises are discharged by one of four methods.  Structural premises are
decided from the syntax of the system alone.  Enumerative premises run a
bounded semantic check at the configured horizon and interval bound.
Provenance discharges a behavior-equality premise from a link recorded when
the behavior was produced by folding.  Assumed records the premise as an
unchecked obligation, which keeps large steps possible but leaves an
explicit trust gap in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .behavior import (
    Outcome,
    Transducer,
    adapt,
    chaos_extend,
    denote,
    independent_of,
    refines,
    restrict_input,
    silent_machine,
)
from .errors import DomainError, PremiseViolation
from .model import (
    Component,
    Provenance,
    System,
    assert_consistent,
    check_consistency,
)
from .registry import INVARIANTS, Invariant
from .semantics import (
    black_box,
    conditional_refines,
    denotation,
    invariant_valid,
)
from .streams import iter_tuples
from .archio import digest, show_tuple


class RuleId(Enum):
    R1_BEHAVIORAL = "behavioral"
    R2_ADD_OUTPUT = "add-output"
    R3_REMOVE_OUTPUT = "remove-output"
    R4_ADD_INPUT = "add-input"
    R5_REMOVE_INPUT = "remove-input"
    R6_ADD_COMPONENT_BASIC = "add-component-basic"
    R7_ADD_COMPONENT = "add-component"
    R8_REMOVE_COMPONENT = "remove-component"
    R9_EXPAND = "expand"
    R10_FOLD = "fold"
    R11_REFINE_WITH_INVARIANT = "refine-with-invariant"
    R12_RENAME = "rename"


class Mode(Enum):
    STRUCTURAL_FIRST = "structural-first"
    ENUMERATIVE = "enumerative"
    ASSUMED = "assumed"


class Kind(Enum):
    EQUALITY = "equality"
    SUBSET = "subset"


@dataclass(frozen=True)
class CheckConfig:
    horizon: int = 3
    bound: int = 1
    mode: Mode = Mode.STRUCTURAL_FIRST

    @property
    def enum_method(self) -> str:
        return f"enumerative(H={self.horizon},B={self.bound})"


@dataclass(frozen=True)
class PremiseCheck:
    text: str
    method: str
    passed: bool
    code: str
    detail: str = ""


@dataclass(frozen=True)
class StepReport:
    rule: RuleId
    parameters: tuple[tuple[str, str], ...]
    premises: tuple[PremiseCheck, ...]
    kind: Kind
    digest_before: str
    digest_after: str

    @property
    def ok(self) -> bool:
        return all(p.passed for p in self.premises)


# Failure codes grouped by rule, one per distinct premise, so negative
# tests can assert exactly which premise was violated.
PREMISE_CODES: dict[RuleId, tuple[str, ...]] = {
    RuleId.R1_BEHAVIORAL: (
        "R1_UNKNOWN_COMPONENT",
        "R1_SIGNATURE_MISMATCH",
        "R1_NOT_REFINEMENT",
    ),
    RuleId.R2_ADD_OUTPUT: ("R2_UNKNOWN_COMPONENT", "R2_CHANNEL_NOT_FRESH"),
    RuleId.R3_REMOVE_OUTPUT: (
        "R3_UNKNOWN_COMPONENT",
        "R3_NOT_AN_OUTPUT",
        "R3_IN_SYSTEM_OUTPUT",
        "R3_STILL_READ",
    ),
    RuleId.R4_ADD_INPUT: (
        "R4_UNKNOWN_COMPONENT",
        "R4_DANGLING",
        "R4_ALREADY_INPUT",
    ),
    RuleId.R5_REMOVE_INPUT: (
        "R5_UNKNOWN_COMPONENT",
        "R5_NOT_AN_INPUT",
        "R5_DEPENDENT",
    ),
    RuleId.R6_ADD_COMPONENT_BASIC: ("R6_NAME_TAKEN",),
    RuleId.R7_ADD_COMPONENT: (
        "R7_NAME_TAKEN",
        "R7_OUTPUT_NOT_FRESH",
        "R7_INPUT_DANGLING",
        "R7_SIGNATURE_MISMATCH",
    ),
    RuleId.R8_REMOVE_COMPONENT: ("R8_UNKNOWN_COMPONENT", "R8_HAS_OUTPUTS"),
    RuleId.R9_EXPAND: (
        "R9_UNKNOWN_COMPONENT",
        "R9_SUBSYSTEM_INCONSISTENT",
        "R9_INTERFACE_MISMATCH",
        "R9_CHANNEL_CLASH",
        "R9_SHADOWS_SYSTEM_INPUT",
        "R9_NAME_CLASH",
        "R9_BEHAVIOR_MISMATCH",
    ),
    RuleId.R10_FOLD: (
        "R10_UNKNOWN_COMPONENT",
        "R10_INPUTS_NOT_COVERED",
        "R10_INPUT_NOT_AVAILABLE",
        "R10_OUTPUT_NOT_PRODUCED",
        "R10_OUTPUT_STILL_NEEDED",
        "R10_NAME_TAKEN",
    ),
    RuleId.R11_REFINE_WITH_INVARIANT: (
        "R11_UNKNOWN_COMPONENT",
        "R11_SIGNATURE_MISMATCH",
        "R11_UNKNOWN_INVARIANT",
        "R11_INVARIANT_CHANNELS",
        "R11_INVARIANT_INVALID",
        "R11_NOT_REFINEMENT",
    ),
    RuleId.R12_RENAME: ("R12_UNKNOWN_ID", "R12_ID_TAKEN"),
}


class _Premises:
    """Accumulates premise checks and aborts on the first failure."""

    def __init__(self, rule: RuleId, parameters, system: System, kind: Kind):
        self.rule = rule
        self.parameters = tuple(parameters)
        self.kind = kind
        self.digest_before = digest(system)
        self.checks: list[PremiseCheck] = []

    def check(
        self, text: str, code: str, passed: bool, method: str = "structural",
        detail: str = "",
    ) -> None:
        self.checks.append(PremiseCheck(text, method, passed, code, detail))
        if not passed:
            report = StepReport(
                rule=self.rule,
                parameters=self.parameters,
                premises=tuple(self.checks),
                kind=self.kind,
                digest_before=self.digest_before,
                digest_after=self.digest_before,
            )
            raise PremiseViolation(code, f"{text}: {detail or 'violated'}", report)

    def done(self, result: System) -> tuple[System, StepReport]:
        assert_consistent(result)
        report = StepReport(
            rule=self.rule,
            parameters=self.parameters,
            premises=tuple(self.checks),
            kind=self.kind,
            digest_before=self.digest_before,
            digest_after=digest(result),
        )
        return result, report


def _show_pair(counterexample) -> str:
    if counterexample is None:
        return ""
    parts = []
    for item in counterexample:
        if hasattr(item, "entries"):
            parts.append(show_tuple(item))
        else:
            parts.append(str(item))
    return " / ".join(parts)


# ----------------------------------------------------------------------
# rule 1: behavioral refinement of one component
# ----------------------------------------------------------------------


def refine_behavior(
    system: System, component_name: str, candidate: Transducer, config: CheckConfig
) -> tuple[System, StepReport]:
    """Replace a component behavior by one that can do no more."""
    p = _Premises(
        RuleId.R1_BEHAVIORAL,
        [("component", component_name)],
        system,
        Kind.SUBSET,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R1_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    current = system.component(component_name)
    same_sig = (
        candidate.inputs == current.inputs
        and candidate.outputs == current.outputs
        and candidate.alphabet == system.alphabet
    )
    p.check(
        "candidate has the component's exact signature",
        "R1_SIGNATURE_MISMATCH",
        same_sig,
        detail="" if same_sig else (
            f"candidate reads {sorted(candidate.inputs)} writes "
            f"{sorted(candidate.outputs)}, component declares "
            f"{sorted(current.inputs)} / {sorted(current.outputs)}"
        ),
    )
    if config.mode is Mode.ASSUMED:
        p.check(
            "every candidate output is admitted by the current behavior",
            "R1_NOT_REFINEMENT", True, method="assumed",
            detail="unchecked obligation",
        )
    elif config.mode is Mode.STRUCTURAL_FIRST and candidate == current.behavior:
        p.check(
            "every candidate output is admitted by the current behavior",
            "R1_NOT_REFINEMENT", True, detail="behaviors structurally identical",
        )
    else:
        verdict = refines(candidate, current.behavior, config.horizon, config.bound)
        p.check(
            "every candidate output is admitted by the current behavior",
            "R1_NOT_REFINEMENT",
            bool(verdict),
            method=config.enum_method,
            detail=_show_pair(verdict.counterexample) if not verdict else "",
        )
    result = system.replace_component(replace(current, behavior=candidate))
    return p.done(result)


# ----------------------------------------------------------------------
# rules 2 and 3: output channels
# ----------------------------------------------------------------------


def add_output(
    system: System, component_name: str, channel: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Give a component a new output channel with unconstrained content."""
    p = _Premises(
        RuleId.R2_ADD_OUTPUT,
        [("component", component_name), ("channel", channel)],
        system,
        Kind.EQUALITY,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R2_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    taken = system.inputs | system.component_outputs
    p.check(
        "channel is fresh for the system inputs and all component outputs",
        "R2_CHANNEL_NOT_FRESH",
        channel not in taken,
        detail="" if channel not in taken else f"{channel!r} already in use",
    )
    current = system.component(component_name)
    updated = replace(
        current,
        outputs=current.outputs | {channel},
        behavior=chaos_extend(current.behavior, channel),
    )
    return p.done(system.replace_component(updated))


def remove_output(
    system: System, component_name: str, channel: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Drop an output channel nobody reads and the system does not export."""
    p = _Premises(
        RuleId.R3_REMOVE_OUTPUT,
        [("component", component_name), ("channel", channel)],
        system,
        Kind.EQUALITY,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R3_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    current = system.component(component_name)
    p.check(
        "channel is an output of the component",
        "R3_NOT_AN_OUTPUT",
        channel in current.outputs,
        detail="" if channel in current.outputs else f"{channel!r} not written",
    )
    p.check(
        "channel is not a system output",
        "R3_IN_SYSTEM_OUTPUT",
        channel not in system.outputs,
        detail="" if channel not in system.outputs else f"{channel!r} exported",
    )
    readers = tuple(c.name for c in system.readers(channel))
    p.check(
        "no component reads the channel",
        "R3_STILL_READ",
        not readers,
        detail="" if not readers else f"read by {', '.join(readers)}",
    )
    updated = replace(
        current,
        outputs=current.outputs - {channel},
        behavior=adapt(
            current.behavior, current.inputs, current.outputs - {channel}
        ),
    )
    return p.done(system.replace_component(updated))


# ----------------------------------------------------------------------
# rules 4 and 5: input channels
# ----------------------------------------------------------------------


def add_input(
    system: System, component_name: str, channel: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Connect a component to an existing channel; the behavior ignores it."""
    p = _Premises(
        RuleId.R4_ADD_INPUT,
        [("component", component_name), ("channel", channel)],
        system,
        Kind.EQUALITY,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R4_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    available = system.inputs | system.component_outputs
    p.check(
        "channel is a system input or produced by some component",
        "R4_DANGLING",
        channel in available,
        detail="" if channel in available else f"{channel!r} connects to nothing",
    )
    current = system.component(component_name)
    p.check(
        "channel is not yet an input of the component",
        "R4_ALREADY_INPUT",
        channel not in current.inputs,
        detail="" if channel not in current.inputs else f"{channel!r} already read",
    )
    updated = replace(
        current,
        inputs=current.inputs | {channel},
        behavior=adapt(
            current.behavior, current.inputs | {channel}, current.outputs
        ),
    )
    return p.done(system.replace_component(updated))


def remove_input(
    system: System, component_name: str, channel: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Disconnect an input channel the behavior does not depend on."""
    p = _Premises(
        RuleId.R5_REMOVE_INPUT,
        [("component", component_name), ("channel", channel)],
        system,
        Kind.EQUALITY,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R5_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    current = system.component(component_name)
    p.check(
        "channel is an input of the component",
        "R5_NOT_AN_INPUT",
        channel in current.inputs,
        detail="" if channel in current.inputs else f"{channel!r} not read",
    )
    text = "behavior does not depend on the channel"
    if config.mode is Mode.ASSUMED:
        p.check(text, "R5_DEPENDENT", True, method="assumed",
                detail="unchecked obligation")
    elif (
        config.mode is Mode.STRUCTURAL_FIRST
        and channel not in current.behavior.mentioned_inputs
    ):
        p.check(text, "R5_DEPENDENT", True, detail="channel unmentioned by any clause")
    else:
        verdict = independent_of(
            current.behavior, channel, config.horizon, config.bound
        )
        method = (
            "structural" if verdict.outcome is Outcome.HOLDS else config.enum_method
        )
        p.check(
            text, "R5_DEPENDENT", bool(verdict), method=method,
            detail=_show_pair(verdict.counterexample) if not verdict else "",
        )
    updated = replace(
        current,
        inputs=current.inputs - {channel},
        behavior=restrict_input(
            current.behavior, channel, assume_independent=True
        ),
    )
    return p.done(system.replace_component(updated))


# ----------------------------------------------------------------------
# rules 6, 7 and 8: components
# ----------------------------------------------------------------------


def add_component_basic(
    system: System, name: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Add a new component with no channels and the do-nothing behavior."""
    p = _Premises(
        RuleId.R6_ADD_COMPONENT_BASIC, [("name", name)], system, Kind.EQUALITY
    )
    fresh = not system.has_component(name)
    p.check(
        "component name is fresh", "R6_NAME_TAKEN", fresh,
        detail="" if fresh else f"{name!r} already names a component",
    )
    empty = Component(
        name, frozenset(), frozenset(), silent_machine(system.alphabet, (), ())
    )
    return p.done(system.with_component(empty))


def add_component(
    system: System,
    name: str,
    inputs: Iterable[str],
    outputs: Iterable[str],
    behavior: Transducer,
    config: CheckConfig,
) -> tuple[System, StepReport]:
    """Add a fully specified component whose outputs are all fresh."""
    inputs = frozenset(inputs)
    outputs = frozenset(outputs)
    p = _Premises(
        RuleId.R7_ADD_COMPONENT,
        [
            ("name", name),
            ("inputs", ",".join(sorted(inputs))),
            ("outputs", ",".join(sorted(outputs))),
        ],
        system,
        Kind.EQUALITY,
    )
    fresh = not system.has_component(name)
    p.check(
        "component name is fresh", "R7_NAME_TAKEN", fresh,
        detail="" if fresh else f"{name!r} already names a component",
    )
    taken = system.inputs | system.component_outputs
    clash = sorted(outputs & taken)
    p.check(
        "every output channel is fresh for the system",
        "R7_OUTPUT_NOT_FRESH",
        not clash,
        detail="" if not clash else f"already in use: {clash}",
    )
    sources = outputs | system.inputs | system.component_outputs
    dangling = sorted(inputs - sources)
    p.check(
        "every input connects to a system input or a produced channel",
        "R7_INPUT_DANGLING",
        not dangling,
        detail="" if not dangling else f"connect to nothing: {dangling}",
    )
    same_sig = (
        behavior.inputs == inputs
        and behavior.outputs == outputs
        and behavior.alphabet == system.alphabet
    )
    p.check(
        "behavior matches the declared interface and alphabet",
        "R7_SIGNATURE_MISMATCH",
        same_sig,
        detail="" if same_sig else (
            f"behavior reads {sorted(behavior.inputs)} writes "
            f"{sorted(behavior.outputs)} over {behavior.alphabet}"
        ),
    )
    return p.done(
        system.with_component(Component(name, inputs, outputs, behavior))
    )


def remove_component(
    system: System, name: str, config: CheckConfig
) -> tuple[System, StepReport]:
    """Remove a component that produces nothing."""
    p = _Premises(
        RuleId.R8_REMOVE_COMPONENT, [("name", name)], system, Kind.EQUALITY
    )
    exists = system.has_component(name)
    p.check(
        "component exists", "R8_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {name!r}",
    )
    current = system.component(name)
    p.check(
        "component has no output channels",
        "R8_HAS_OUTPUTS",
        not current.outputs,
        detail="" if not current.outputs else f"writes {sorted(current.outputs)}",
    )
    return p.done(system.without_component(name))


# ----------------------------------------------------------------------
# rules 9 and 10: hierarchy
# ----------------------------------------------------------------------


def _behaviors_equal_on_bounds(
    behavior: Transducer, subsystem: System, config: CheckConfig
) -> tuple[bool, str]:
    for env in iter_tuples(
        behavior.inputs, subsystem.alphabet, config.horizon, config.bound
    ):
        direct = denote(behavior, env, config.horizon, config.bound)
        via_network = denotation(subsystem, env, config.horizon, config.bound)
        if direct != via_network:
            return False, f"denotations differ on {show_tuple(env)}"
    return True, ""


def expand_component(
    system: System, component_name: str, subsystem: System, config: CheckConfig
) -> tuple[System, StepReport]:
    """Replace a component by the architecture its behavior denotes."""
    p = _Premises(
        RuleId.R9_EXPAND,
        [("component", component_name), ("subsystem", subsystem.name)],
        system,
        Kind.EQUALITY,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R9_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    current = system.component(component_name)
    sub_report = check_consistency(subsystem)
    p.check(
        "subsystem is consistent",
        "R9_SUBSYSTEM_INCONSISTENT",
        sub_report.ok,
        detail="" if sub_report.ok else sub_report.violations[0].message,
    )
    same_iface = (
        current.inputs == subsystem.inputs
        and current.outputs == subsystem.outputs
        and system.alphabet == subsystem.alphabet
    )
    p.check(
        "subsystem interface equals the component interface",
        "R9_INTERFACE_MISMATCH",
        same_iface,
        detail="" if same_iface else (
            f"subsystem declares {sorted(subsystem.inputs)} / "
            f"{sorted(subsystem.outputs)}"
        ),
    )
    internal = subsystem.component_outputs - current.outputs
    clash = sorted(internal & system.component_outputs)
    p.check(
        "internal subsystem outputs are fresh for the system",
        "R9_CHANNEL_CLASH",
        not clash,
        detail="" if not clash else f"already produced in the system: {clash}",
    )
    shadows = sorted(subsystem.component_outputs & system.inputs)
    p.check(
        "no subsystem output shadows a system input",
        "R9_SHADOWS_SYSTEM_INPUT",
        not shadows,
        detail="" if not shadows else f"shadowed: {shadows}",
    )
    remaining = frozenset(system.component_names) - {component_name}
    name_clash = sorted(set(subsystem.component_names) & remaining)
    p.check(
        "subsystem component names are fresh for the remaining system",
        "R9_NAME_CLASH",
        not name_clash,
        detail="" if not name_clash else f"taken: {name_clash}",
    )
    text = "component behavior equals the subsystem black box"
    linked = (
        current.provenance is not None
        and current.provenance.system == subsystem
    )
    if linked and config.mode is not Mode.ENUMERATIVE:
        p.check(text, "R9_BEHAVIOR_MISMATCH", True, method="provenance-link",
                detail="recorded at fold time")
    elif config.mode is Mode.ASSUMED:
        p.check(text, "R9_BEHAVIOR_MISMATCH", True, method="assumed",
                detail="unchecked obligation")
    else:
        equal, why = _behaviors_equal_on_bounds(
            current.behavior, subsystem, config
        )
        p.check(text, "R9_BEHAVIOR_MISMATCH", equal,
                method=config.enum_method, detail=why)
    result = system.without_component(component_name)
    for inner in subsystem.components:
        result = result.with_component(inner)
    return p.done(result)


def fold_components(
    system: System,
    name: str,
    member_names: Sequence[str],
    inputs: Iterable[str],
    outputs: Iterable[str],
    config: CheckConfig,
) -> tuple[System, StepReport]:
    """Collapse a group of components into one with their combined behavior.

    The new component's behavior is the black box of the group viewed as a
    system, and a provenance link to that system is recorded so the fold can
    later be expanded again without re-proving behavior equality.
    """
    member_names = tuple(member_names)
    inputs = frozenset(inputs)
    outputs = frozenset(outputs)
    p = _Premises(
        RuleId.R10_FOLD,
        [
            ("name", name),
            ("members", ",".join(member_names)),
            ("inputs", ",".join(sorted(inputs))),
            ("outputs", ",".join(sorted(outputs))),
        ],
        system,
        Kind.EQUALITY,
    )
    if len(set(member_names)) != len(member_names):
        raise DomainError(f"duplicate members in fold: {member_names}")
    missing = sorted(n for n in member_names if not system.has_component(n))
    p.check(
        "every member exists", "R10_UNKNOWN_COMPONENT", not missing,
        detail="" if not missing else f"unknown: {missing}",
    )
    members = tuple(system.component(n) for n in member_names)
    member_in: frozenset[str] = frozenset()
    member_out: frozenset[str] = frozenset()
    for m in members:
        member_in |= m.inputs
        member_out |= m.outputs

    uncovered = sorted((member_in - member_out) - inputs)
    p.check(
        "inputs cover everything the members read from outside the group",
        "R10_INPUTS_NOT_COVERED",
        not uncovered,
        detail="" if not uncovered else f"missing: {uncovered}",
    )
    available = (system.inputs | system.component_outputs) - member_out
    stray = sorted(inputs - available)
    p.check(
        "inputs exist in the system outside the group",
        "R10_INPUT_NOT_AVAILABLE",
        not stray,
        detail="" if not stray else f"unavailable: {stray}",
    )
    phantom = sorted(outputs - member_out)
    p.check(
        "outputs are produced inside the group",
        "R10_OUTPUT_NOT_PRODUCED",
        not phantom,
        detail="" if not phantom else f"not produced: {phantom}",
    )
    needed = system.outputs | frozenset(
        ch
        for c in system.components
        if c.name not in member_names
        for ch in c.inputs
    )
    hidden = sorted((member_out & needed) - outputs)
    p.check(
        "outputs keep every group channel the rest of the system needs",
        "R10_OUTPUT_STILL_NEEDED",
        not hidden,
        detail="" if not hidden else f"still needed: {hidden}",
    )
    remaining = frozenset(system.component_names) - set(member_names)
    p.check(
        "name is fresh among the remaining components",
        "R10_NAME_TAKEN",
        name not in remaining,
        detail="" if name not in remaining else f"{name!r} taken",
    )
    subsystem = System(
        name=name,
        alphabet=system.alphabet,
        inputs=inputs,
        outputs=outputs,
        components=members,
    )
    folded = Component(
        name,
        inputs,
        outputs,
        black_box(subsystem, bound=config.bound),
        provenance=Provenance(subsystem, config.horizon, config.bound),
    )
    result = system
    for n in member_names:
        result = result.without_component(n)
    return p.done(result.with_component(folded))


# ----------------------------------------------------------------------
# rule 11: behavioral refinement under an invariant
# ----------------------------------------------------------------------


def refine_with_invariant(
    system: System,
    component_name: str,
    candidate: Transducer,
    invariant_name: str,
    config: CheckConfig,
) -> tuple[System, StepReport]:
    """Replace a behavior relying on a property the system guarantees.

    The invariant must hold on every admissible assignment of all channels,
    and the candidate must be admitted by the current behavior on every
    input that occurs in some assignment satisfying the invariant.  With the
    always-true invariant this coincides with plain behavioral refinement.
    """
    p = _Premises(
        RuleId.R11_REFINE_WITH_INVARIANT,
        [("component", component_name), ("invariant", invariant_name)],
        system,
        Kind.SUBSET,
    )
    exists = system.has_component(component_name)
    p.check(
        "component exists", "R11_UNKNOWN_COMPONENT", exists,
        detail="" if exists else f"no component named {component_name!r}",
    )
    current = system.component(component_name)
    same_sig = (
        candidate.inputs == current.inputs
        and candidate.outputs == current.outputs
        and candidate.alphabet == system.alphabet
    )
    p.check(
        "candidate has the component's exact signature",
        "R11_SIGNATURE_MISMATCH",
        same_sig,
        detail="" if same_sig else (
            f"candidate reads {sorted(candidate.inputs)} writes "
            f"{sorted(candidate.outputs)}"
        ),
    )
    known = invariant_name in INVARIANTS
    p.check(
        "invariant is registered", "R11_UNKNOWN_INVARIANT", known,
        detail="" if known else f"unknown invariant {invariant_name!r}",
    )
    invariant: Invariant = INVARIANTS.get(invariant_name)
    scope = system.inputs | system.component_outputs
    outside = sorted(set(invariant.channels) - scope)
    p.check(
        "invariant references only system channels",
        "R11_INVARIANT_CHANNELS",
        not outside,
        detail="" if not outside else f"outside the system: {outside}",
    )
    if config.mode is Mode.ASSUMED:
        p.check(
            "invariant holds on every admissible channel assignment",
            "R11_INVARIANT_INVALID", True, method="assumed",
            detail="unchecked obligation",
        )
        p.check(
            "candidate is admitted wherever the invariant holds",
            "R11_NOT_REFINEMENT", True, method="assumed",
            detail="unchecked obligation",
        )
    else:
        validity = invariant_valid(system, invariant, config.horizon, config.bound)
        p.check(
            "invariant holds on every admissible channel assignment",
            "R11_INVARIANT_INVALID",
            bool(validity),
            method=config.enum_method,
            detail=_show_pair(validity.counterexample) if not validity else "",
        )
        if config.mode is Mode.STRUCTURAL_FIRST and candidate == current.behavior:
            p.check(
                "candidate is admitted wherever the invariant holds",
                "R11_NOT_REFINEMENT", True,
                detail="behaviors structurally identical",
            )
        else:
            verdict = conditional_refines(
                system, component_name, candidate, invariant,
                config.horizon, config.bound,
            )
            p.check(
                "candidate is admitted wherever the invariant holds",
                "R11_NOT_REFINEMENT",
                bool(verdict),
                method=config.enum_method,
                detail=_show_pair(verdict.counterexample) if not verdict else "",
            )
    result = system.replace_component(replace(current, behavior=candidate))
    return p.done(result)


# ----------------------------------------------------------------------
# rule 12: renaming
# ----------------------------------------------------------------------


def _rename_machine_channels(
    machine: Transducer, mapping: dict[str, str]
) -> Transducer:
    def rn(ch: str) -> str:
        return mapping.get(ch, ch)

    emit = {
        state: [
            ({rn(ch): iv for ch, iv in assignment}, mid)
            for assignment, mid in choices
        ]
        for state, choices in machine.emit
    }
    absorb = [
        (
            c.state,
            tuple((rn(ch), op, iv) for ch, op, iv in c.atoms),
            c.targets,
        )
        for c in machine.absorb
    ]
    return Transducer.build(
        alphabet=machine.alphabet,
        inputs=frozenset(rn(ch) for ch in machine.inputs),
        outputs=frozenset(rn(ch) for ch in machine.outputs),
        states=machine.states,
        initial=machine.initial,
        emit=emit,
        absorb=absorb,
        chaos_outputs=frozenset(rn(ch) for ch in machine.chaos_outputs),
        canonical_choice=machine.canonical_choice,
    )


def rename(
    system: System,
    pairs: Sequence[tuple[str, str]],
    what: str,
    config: CheckConfig,
) -> tuple[System, StepReport]:
    """Rename channels or components, consistently everywhere.

    A channel rename touches the component interfaces and behaviors that
    mention the channel; provenance links of those components are dropped
    because they refer to the old names.  The result is isomorphic to the
    input system.
    """
    if what not in ("channel", "component"):
        raise DomainError(f"rename kind must be channel or component, got {what!r}")
    pairs = tuple((old, new) for old, new in pairs)
    p = _Premises(
        RuleId.R12_RENAME,
        [("kind", what)] + [("pair", f"{o}->{n}") for o, n in pairs],
        system,
        Kind.EQUALITY,
    )
    olds = [o for o, _ in pairs]
    news = [n for _, n in pairs]
    if len(set(olds)) != len(olds):
        raise DomainError(f"duplicate old ids in rename: {olds}")
    if what == "channel":
        existing = system.channels
    else:
        existing = frozenset(system.component_names)
    unknown = sorted(set(olds) - existing)
    p.check(
        "every old id exists", "R12_UNKNOWN_ID", not unknown,
        detail="" if not unknown else f"unknown: {unknown}",
    )
    # All pairs apply simultaneously, so a new id may reuse an old one
    # that is itself being renamed away (swaps are legal).
    survivors = existing - set(olds)
    collisions = sorted(
        set(n for n in news if n in survivors)
        | set(n for n in news if news.count(n) > 1)
    )
    p.check(
        "every new id is fresh system-wide",
        "R12_ID_TAKEN",
        not collisions,
        detail="" if not collisions else f"taken: {collisions}",
    )
    mapping = dict(pairs)
    if what == "component":
        components = tuple(
            replace(c, name=mapping.get(c.name, c.name)) for c in system.components
        )
        result = replace(system, components=components)
    else:
        def rn_set(chs: frozenset[str]) -> frozenset[str]:
            return frozenset(mapping.get(ch, ch) for ch in chs)

        components = []
        for c in system.components:
            touched = bool((c.inputs | c.outputs) & mapping.keys())
            if not touched:
                components.append(c)
                continue
            components.append(
                Component(
                    c.name,
                    rn_set(c.inputs),
                    rn_set(c.outputs),
                    _rename_machine_channels(c.behavior, mapping),
                )
            )
        result = replace(
            system,
            inputs=rn_set(system.inputs),
            outputs=rn_set(system.outputs),
            components=tuple(components),
        )
    return p.done(result)


# ----------------------------------------------------------------------
# uniform application
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RuleApplication:
    """One rule invocation with its parameters, ready to apply."""

    rule: RuleId
    component: str | None = None
    channel: str | None = None
    name: str | None = None
    behavior: Transducer | None = None
    inputs: frozenset[str] | None = None
    outputs: frozenset[str] | None = None
    members: tuple[str, ...] | None = None
    subsystem: System | None = None
    invariant: str | None = None
    pairs: tuple[tuple[str, str], ...] | None = None
    rename_kind: str | None = None

    _REQUIRED = {
        RuleId.R1_BEHAVIORAL: ("component", "behavior"),
        RuleId.R2_ADD_OUTPUT: ("component", "channel"),
        RuleId.R3_REMOVE_OUTPUT: ("component", "channel"),
        RuleId.R4_ADD_INPUT: ("component", "channel"),
        RuleId.R5_REMOVE_INPUT: ("component", "channel"),
        RuleId.R6_ADD_COMPONENT_BASIC: ("name",),
        RuleId.R7_ADD_COMPONENT: ("name", "inputs", "outputs", "behavior"),
        RuleId.R8_REMOVE_COMPONENT: ("name",),
        RuleId.R9_EXPAND: ("component", "subsystem"),
        RuleId.R10_FOLD: ("name", "members", "inputs", "outputs"),
        RuleId.R11_REFINE_WITH_INVARIANT: ("component", "behavior", "invariant"),
        RuleId.R12_RENAME: ("pairs", "rename_kind"),
    }

    def validate(self) -> None:
        for field_name in self._REQUIRED[self.rule]:
            if getattr(self, field_name) is None:
                raise DomainError(
                    f"rule {self.rule.value} requires parameter {field_name!r}"
                )


def apply_step(
    system: System, application: RuleApplication, config: CheckConfig
) -> tuple[System, StepReport]:
    """Dispatch one rule application; failures leave the system unchanged."""
    application.validate()
    a = application
    match a.rule:
        case RuleId.R1_BEHAVIORAL:
            return refine_behavior(system, a.component, a.behavior, config)
        case RuleId.R2_ADD_OUTPUT:
            return add_output(system, a.component, a.channel, config)
        case RuleId.R3_REMOVE_OUTPUT:
            return remove_output(system, a.component, a.channel, config)
        case RuleId.R4_ADD_INPUT:
            return add_input(system, a.component, a.channel, config)
        case RuleId.R5_REMOVE_INPUT:
            return remove_input(system, a.component, a.channel, config)
        case RuleId.R6_ADD_COMPONENT_BASIC:
            return add_component_basic(system, a.name, config)
        case RuleId.R7_ADD_COMPONENT:
            return add_component(
                system, a.name, a.inputs, a.outputs, a.behavior, config
            )
        case RuleId.R8_REMOVE_COMPONENT:
            return remove_component(system, a.name, config)
        case RuleId.R9_EXPAND:
            return expand_component(system, a.component, a.subsystem, config)
        case RuleId.R10_FOLD:
            return fold_components(
                system, a.name, a.members, a.inputs, a.outputs, config
            )
        case RuleId.R11_REFINE_WITH_INVARIANT:
            return refine_with_invariant(
                system, a.component, a.behavior, a.invariant, config
            )
        case RuleId.R12_RENAME:
            return rename(system, a.pairs, a.rename_kind, config)
    raise DomainError(f"unhandled rule {a.rule}")
