"""Components, systems and the structural consistency conditions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable

from .behavior import Transducer
from .errors import (
    AlphabetError,
    ConsistencyError,
    InterfaceError,
    UnknownReferenceError,
)
from .streams import check_identifier


@dataclass(frozen=True)
class Provenance:
    """Link from a component to the architecture its behavior denotes.

    Recorded when a group of components is folded into one, or attached
    explicitly.  Ignored by equality so that folding and expanding round-trip
    to the original system.
    """

    system: "System"
    horizon: int | None = None
    bound: int | None = None


@dataclass(frozen=True)
class Component:
    name: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    behavior: Transducer
    provenance: Provenance | None = field(default=None, compare=False)

    def __post_init__(self):
        check_identifier(self.name)
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        for ch in self.inputs | self.outputs:
            check_identifier(ch)
        if self.behavior.inputs != self.inputs:
            raise InterfaceError(
                f"component {self.name}: behavior reads {sorted(self.behavior.inputs)}"
                f" but the interface declares {sorted(self.inputs)}"
            )
        if self.behavior.outputs != self.outputs:
            raise InterfaceError(
                f"component {self.name}: behavior writes {sorted(self.behavior.outputs)}"
                f" but the interface declares {sorted(self.outputs)}"
            )


@dataclass(frozen=True)
class System:
    """A named interface plus a finite set of connected components.

    Components are kept sorted by name so structurally equal systems compare
    and hash equal regardless of declaration order.
    """

    name: str
    alphabet: tuple[str, ...]
    inputs: frozenset[str]
    outputs: frozenset[str]
    components: tuple[Component, ...]

    def __post_init__(self):
        check_identifier(self.name)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        ordered = tuple(sorted(self.components, key=lambda c: c.name))
        object.__setattr__(self, "components", ordered)
        for ch in self.inputs | self.outputs:
            check_identifier(ch)
        for c in ordered:
            if c.behavior.alphabet != self.alphabet:
                raise AlphabetError(
                    f"component {c.name} uses alphabet {c.behavior.alphabet}, "
                    f"system declares {self.alphabet}"
                )

    @cached_property
    def component_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.components)

    @cached_property
    def component_outputs(self) -> frozenset[str]:
        """out.C: every channel written by some component."""
        out: frozenset[str] = frozenset()
        for c in self.components:
            out |= c.outputs
        return out

    @cached_property
    def component_inputs(self) -> frozenset[str]:
        """in.C: every channel read by some component."""
        acc: frozenset[str] = frozenset()
        for c in self.components:
            acc |= c.inputs
        return acc

    @cached_property
    def channels(self) -> frozenset[str]:
        return self.inputs | self.outputs | self.component_inputs | self.component_outputs

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise UnknownReferenceError(f"no component named {name!r}")

    def has_component(self, name: str) -> bool:
        return any(c.name == name for c in self.components)

    def readers(self, channel: str) -> tuple[Component, ...]:
        return tuple(c for c in self.components if channel in c.inputs)

    def writer(self, channel: str) -> Component | None:
        for c in self.components:
            if channel in c.outputs:
                return c
        return None

    def with_component(self, component: Component) -> "System":
        return replace(self, components=self.components + (component,))

    def without_component(self, name: str) -> "System":
        self.component(name)
        return replace(
            self,
            components=tuple(c for c in self.components if c.name != name),
        )

    def replace_component(self, component: Component) -> "System":
        self.component(component.name)
        rest = tuple(c for c in self.components if c.name != component.name)
        return replace(self, components=rest + (component,))


@dataclass(frozen=True)
class ConsistencyViolation:
    condition: int
    message: str


@dataclass(frozen=True)
class ConsistencyReport:
    violations: tuple[ConsistencyViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def check_consistency(system: System) -> ConsistencyReport:
    """Evaluate the five structural conditions plus one derived sanity check.

    Condition numbers: (1) component names are unique, (2) component output
    sets are pairwise disjoint, (3) no component writes a system input,
    (4) every component input is produced inside or enters from outside,
    (5) every system output is produced by some component.  Condition 0 is
    the derived fact that the system interface sets stay disjoint.
    """
    violations: list[ConsistencyViolation] = []
    names = [c.name for c in system.components]
    for name in sorted({n for n in names if names.count(n) > 1}):
        violations.append(
            ConsistencyViolation(1, f"component name {name!r} declared twice")
        )
    seen: dict[str, str] = {}
    for c in system.components:
        for ch in sorted(c.outputs):
            if ch in seen and seen[ch] != c.name:
                violations.append(
                    ConsistencyViolation(
                        2,
                        f"channel {ch!r} written by both {seen[ch]!r} and {c.name!r}",
                    )
                )
            seen.setdefault(ch, c.name)
    for c in system.components:
        for ch in sorted(system.inputs & c.outputs):
            violations.append(
                ConsistencyViolation(
                    3, f"system input {ch!r} is written by component {c.name!r}"
                )
            )
    available = system.component_outputs | system.inputs
    for c in system.components:
        for ch in sorted(c.inputs - available):
            violations.append(
                ConsistencyViolation(
                    4, f"input {ch!r} of component {c.name!r} is produced nowhere"
                )
            )
    for ch in sorted(system.outputs - system.component_outputs):
        violations.append(
            ConsistencyViolation(5, f"system output {ch!r} is produced by no component")
        )
    for ch in sorted(system.inputs & system.outputs):
        violations.append(
            ConsistencyViolation(
                0, f"channel {ch!r} is both a system input and a system output"
            )
        )
    return ConsistencyReport(tuple(violations))


def assert_consistent(system: System) -> None:
    report = check_consistency(system)
    if not report.ok:
        first = report.violations[0]
        raise ConsistencyError(
            f"condition {first.condition}: {first.message}"
            + (f" (+{len(report.violations) - 1} more)" if len(report.violations) > 1 else "")
        )
