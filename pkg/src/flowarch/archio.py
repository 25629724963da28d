"""Plain-text architecture documents.

A document is line-oriented with # comments.  It declares the system header
(name, alphabet, optional interval bound for builtin machines, inputs,
outputs), one block per component referencing a behavior, and one block per
explicitly written transducer:

    system Company
    alphabet a b
    bound 1
    inputs material ordpay
    outputs goods custinf

    component Production
      inputs material sched
      outputs goods progress
      behavior ProductionMachine

    transducer ProductionMachine
      inputs material sched
      outputs goods progress
      states ee aa
      init ee
      emit ee goods=<> progress=<> -> ee
      step ee material=<a> sched=<> -> aa
      ...

A behavior reference is either the name of a transducer block or a builtin
constructor: silent, chaos, sink, copy SRC -> DST, or
summarize SRC... -> DST delay K [skip N] using COMBINER.  Interval literals
are comma-separated symbols in angle brackets: <>, <a>, <a,b>.

Printing is canonical: channels sorted, components sorted by name, each
behavior written out as an explicit transducer block named after its
component, machine states renamed s0, s1, ... whenever any state name is
not an identifier.  Equal systems print byte-identically, which makes the
printed form a digest input.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .behavior import (
    EQ,
    NE,
    Transducer,
    chaos_machine,
    copy_machine,
    silent_machine,
    summarizer_machine,
)
from .errors import ConsistencyError, ParseError
from .model import Component, System, check_consistency
from .registry import build_combiner
from .streams import Interval, StreamTuple, is_identifier


# ----------------------------------------------------------------------
# small value formatters, shared by reports and diagnostics
# ----------------------------------------------------------------------


def show_interval(interval: Interval) -> str:
    return "<" + ",".join(interval) + ">"


def show_stream(stream: Sequence[Interval]) -> str:
    return "|".join(show_interval(iv) for iv in stream)


def show_tuple(t: StreamTuple) -> str:
    if not t.entries:
        return "(empty)"
    return " ".join(f"{ch}={show_stream(s)}" for ch, s in t.entries)


def _parse_interval(token: str, alphabet: tuple[str, ...], line: int) -> Interval:
    if not (token.startswith("<") and token.endswith(">")):
        raise ParseError(line, f"expected an interval literal, got {token!r}")
    body = token[1:-1]
    if not body:
        return ()
    symbols = tuple(body.split(","))
    for sym in symbols:
        if sym not in alphabet:
            raise ParseError(
                line, f"symbol {sym!r} not in alphabet {list(alphabet)}"
            )
    return symbols


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ArchitectureDocument:
    """A parsed document: the system plus the declared interval bound."""

    system: System
    bound: int


@dataclass
class _Lines:
    """Token stream over the document with 1-based line numbers."""

    rows: list[tuple[int, list[str]]]
    pos: int = 0

    @classmethod
    def of(cls, text: str) -> "_Lines":
        rows = []
        for number, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                rows.append((number, body.split()))
        return cls(rows)

    def peek(self) -> tuple[int, list[str]] | None:
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def next(self) -> tuple[int, list[str]]:
        row = self.rows[self.pos]
        self.pos += 1
        return row


def _want_identifier(token: str, line: int, what: str) -> str:
    if not is_identifier(token):
        raise ParseError(line, f"{what} {token!r} is not a valid identifier")
    return token


def _parse_transducer_block(
    lines: _Lines, alphabet: tuple[str, ...], header: list[str], header_line: int
) -> tuple[str, Transducer]:
    if len(header) != 2:
        raise ParseError(header_line, "expected: transducer NAME")
    name = _want_identifier(header[1], header_line, "transducer name")
    inputs: list[str] | None = None
    outputs: list[str] | None = None
    chaos: list[str] = []
    states: list[str] | None = None
    initial: str | None = None
    canonical = False
    emit: dict[str, list[tuple[dict, str]]] = {}
    clauses: list[tuple[str, tuple, tuple[str, ...]]] = []

    while True:
        row = lines.peek()
        if row is None or row[1][0] in ("component", "transducer", "system"):
            break
        line, tokens = lines.next()
        keyword = tokens[0]
        if keyword == "inputs":
            inputs = tokens[1:]
        elif keyword == "outputs":
            outputs = tokens[1:]
        elif keyword == "chaos":
            chaos = tokens[1:]
        elif keyword == "states":
            states = [
                _want_identifier(t, line, "state name") for t in tokens[1:]
            ]
        elif keyword == "init":
            if len(tokens) != 2:
                raise ParseError(line, "expected: init STATE")
            initial = tokens[1]
        elif keyword == "canonical":
            canonical = True
        elif keyword == "emit":
            if "->" not in tokens:
                raise ParseError(line, "emit line needs '-> MIDSTATE'")
            arrow = tokens.index("->")
            if arrow < 2 or len(tokens) != arrow + 2:
                raise ParseError(line, "expected: emit STATE ch=<..>* -> MIDSTATE")
            state, mid = tokens[1], tokens[arrow + 1]
            assignment: dict[str, Interval] = {}
            for item in tokens[2:arrow]:
                if "=" not in item:
                    raise ParseError(line, f"expected ch=<..>, got {item!r}")
                ch, _, literal = item.partition("=")
                if ch in assignment:
                    raise ParseError(line, f"channel {ch!r} assigned twice")
                assignment[ch] = _parse_interval(literal, alphabet, line)
            emit.setdefault(state, []).append((assignment, mid))
        elif keyword == "step":
            if "->" not in tokens:
                raise ParseError(line, "step line needs '-> TARGET...'")
            arrow = tokens.index("->")
            if arrow < 2 or len(tokens) < arrow + 2:
                raise ParseError(line, "expected: step STATE atom* -> TARGET...")
            state = tokens[1]
            atoms = []
            for item in tokens[2:arrow]:
                if "!=" in item:
                    ch, _, literal = item.partition("!=")
                    op = NE
                elif "=" in item:
                    ch, _, literal = item.partition("=")
                    op = EQ
                else:
                    raise ParseError(
                        line, f"expected ch=<..> or ch!=<..>, got {item!r}"
                    )
                atoms.append((ch, op, _parse_interval(literal, alphabet, line)))
            clauses.append((state, tuple(atoms), tuple(tokens[arrow + 1 :])))
        else:
            raise ParseError(line, f"unexpected keyword {keyword!r} in transducer")

    for what, value in (
        ("inputs", inputs), ("outputs", outputs),
        ("states", states), ("init", initial),
    ):
        if value is None:
            raise ParseError(header_line, f"transducer {name}: missing {what} line")
    try:
        machine = Transducer.build(
            alphabet=alphabet,
            inputs=inputs,
            outputs=outputs,
            states=tuple(states),
            initial=initial,
            emit=emit,
            absorb=clauses,
            chaos_outputs=chaos,
            canonical_choice=canonical,
        )
    except Exception as exc:
        raise ParseError(header_line, f"transducer {name}: {exc}") from exc
    return name, machine


def build_behavior(
    tokens: Sequence[str],
    alphabet: tuple[str, ...],
    inputs: Iterable[str],
    outputs: Iterable[str],
    bound: int,
    transducers: Mapping[str, Transducer],
    line: int,
) -> Transducer:
    """Resolve a behavior reference against an interface.

    tokens is the part after the `behavior` / `with` keyword: a transducer
    name or a builtin constructor expression.
    """
    tokens = list(tokens)
    if not tokens:
        raise ParseError(line, "missing behavior reference")
    head = tokens[0]
    try:
        if head == "silent":
            return silent_machine(alphabet, inputs, outputs)
        if head == "sink":
            return silent_machine(alphabet, inputs, ())
        if head == "chaos":
            return chaos_machine(alphabet, inputs, outputs)
        if head == "copy":
            if len(tokens) != 4 or tokens[2] != "->":
                raise ParseError(line, "expected: copy SRC -> DST")
            return copy_machine(
                alphabet, tokens[1], tokens[3], inputs, outputs, value_bound=bound
            )
        if head == "summarize":
            if "->" not in tokens:
                raise ParseError(
                    line, "expected: summarize SRC... -> DST delay K using NAME"
                )
            arrow = tokens.index("->")
            sources = tokens[1:arrow]
            rest = tokens[arrow + 1 :]
            if not sources or not rest:
                raise ParseError(line, "summarize needs sources and a target")
            target = rest[0]
            options = rest[1:]
            delay, skip = 1, 0
            combiner_name = None
            k = 0
            while k < len(options):
                if options[k] == "delay" and k + 1 < len(options):
                    delay = int(options[k + 1])
                elif options[k] == "skip" and k + 1 < len(options):
                    skip = int(options[k + 1])
                elif options[k] == "using" and k + 1 < len(options):
                    combiner_name = options[k + 1]
                else:
                    raise ParseError(
                        line, f"unexpected summarize option {options[k]!r}"
                    )
                k += 2
            if combiner_name is None:
                raise ParseError(line, "summarize needs 'using COMBINER'")
            combiner = build_combiner(combiner_name, alphabet, bound)
            if combiner.arity != len(sources):
                raise ParseError(
                    line,
                    f"combiner {combiner_name!r} takes {combiner.arity} "
                    f"sources, got {len(sources)}",
                )
            return summarizer_machine(
                alphabet,
                sources,
                target,
                inputs,
                outputs,
                combiner.fn,
                delay=delay,
                skip=skip,
                value_bound=bound,
                extra_source_values=sorted(combiner.source_values),
            )
        if head in transducers:
            return transducers[head]
        raise ParseError(
            line,
            f"unknown behavior {head!r}; expected a transducer name or one "
            "of silent, sink, chaos, copy, summarize",
        )
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(line, f"cannot build behavior: {exc}") from exc


def parse_document(text: str) -> ArchitectureDocument:
    """Parse a full document; reject inconsistent systems."""
    lines = _Lines.of(text)
    row = lines.peek()
    if row is None or row[1][0] != "system":
        raise ParseError(row[0] if row else 1, "document must start with: system NAME")
    line, tokens = lines.next()
    if len(tokens) != 2:
        raise ParseError(line, "expected: system NAME")
    system_name = _want_identifier(tokens[1], line, "system name")

    alphabet: tuple[str, ...] | None = None
    bound = 1
    sys_inputs: list[str] | None = None
    sys_outputs: list[str] | None = None
    component_rows: list[dict] = []
    transducers: dict[str, Transducer] = {}

    while (row := lines.peek()) is not None:
        line, tokens = row
        keyword = tokens[0]
        if keyword == "alphabet":
            lines.next()
            if alphabet is not None:
                raise ParseError(line, "alphabet declared twice")
            if len(tokens) < 2:
                raise ParseError(line, "alphabet needs at least one symbol")
            alphabet = tuple(tokens[1:])
        elif keyword == "bound":
            lines.next()
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(line, "expected: bound N")
            bound = int(tokens[1])
        elif keyword == "inputs" and not component_rows:
            lines.next()
            sys_inputs = tokens[1:]
        elif keyword == "outputs" and not component_rows:
            lines.next()
            sys_outputs = tokens[1:]
        elif keyword == "component":
            lines.next()
            if len(tokens) != 2:
                raise ParseError(line, "expected: component NAME")
            entry = {
                "name": _want_identifier(tokens[1], line, "component name"),
                "line": line,
                "inputs": [],
                "outputs": [],
                "behavior": None,
            }
            while (inner := lines.peek()) is not None and inner[1][0] in (
                "inputs", "outputs", "behavior",
            ):
                inner_line, inner_tokens = lines.next()
                if inner_tokens[0] == "behavior":
                    entry["behavior"] = (inner_tokens[1:], inner_line)
                else:
                    entry[inner_tokens[0]] = inner_tokens[1:]
            if entry["behavior"] is None:
                raise ParseError(line, f"component {tokens[1]}: missing behavior")
            component_rows.append(entry)
        elif keyword == "transducer":
            if alphabet is None:
                raise ParseError(line, "alphabet must be declared before transducers")
            header_line, header = lines.next()
            name, machine = _parse_transducer_block(
                lines, alphabet, header, header_line
            )
            if name in transducers:
                raise ParseError(header_line, f"transducer {name!r} declared twice")
            transducers[name] = machine
        else:
            raise ParseError(line, f"unexpected keyword {keyword!r}")

    if alphabet is None:
        raise ParseError(1, "document declares no alphabet")
    if sys_inputs is None or sys_outputs is None:
        raise ParseError(1, "document must declare system inputs and outputs")

    components = []
    for entry in component_rows:
        ref_tokens, ref_line = entry["behavior"]
        machine = build_behavior(
            ref_tokens, alphabet, entry["inputs"], entry["outputs"],
            bound, transducers, ref_line,
        )
        try:
            components.append(
                Component(
                    entry["name"],
                    frozenset(entry["inputs"]),
                    frozenset(entry["outputs"]),
                    machine,
                )
            )
        except Exception as exc:
            raise ParseError(entry["line"], str(exc)) from exc

    try:
        system = System(
            name=system_name,
            alphabet=alphabet,
            inputs=frozenset(sys_inputs),
            outputs=frozenset(sys_outputs),
            components=tuple(components),
        )
    except Exception as exc:
        raise ParseError(1, str(exc)) from exc

    report = check_consistency(system)
    if not report.ok:
        first = report.violations[0]
        raise ConsistencyError(
            f"document violates consistency condition {first.condition}: "
            f"{first.message}"
            + (
                f" (+{len(report.violations) - 1} more)"
                if len(report.violations) > 1
                else ""
            )
        )
    return ArchitectureDocument(system, bound)


def parse_architecture(text: str) -> System:
    return parse_document(text).system


# ----------------------------------------------------------------------
# canonical printing
# ----------------------------------------------------------------------


def _state_names(machine: Transducer) -> dict:
    if all(isinstance(s, str) and is_identifier(s) for s in machine.states):
        return {s: s for s in machine.states}
    return {s: f"s{k}" for k, s in enumerate(machine.states)}


def print_transducer(machine: Transducer, name: str) -> str:
    names = _state_names(machine)
    out = [f"transducer {name}"]
    out.append("  inputs " + " ".join(sorted(machine.inputs)))
    out.append("  outputs " + " ".join(sorted(machine.outputs)))
    if machine.chaos_outputs:
        out.append("  chaos " + " ".join(sorted(machine.chaos_outputs)))
    out.append("  states " + " ".join(names[s] for s in machine.states))
    out.append(f"  init {names[machine.initial]}")
    if machine.canonical_choice:
        out.append("  canonical")
    for state, choices in machine.emit:
        for assignment, mid in choices:
            parts = [f"{ch}={show_interval(iv)}" for ch, iv in assignment]
            body = (" " + " ".join(parts)) if parts else ""
            out.append(f"  emit {names[state]}{body} -> {names[mid]}")
    for clause in machine.absorb:
        parts = []
        for ch, op, iv in clause.atoms:
            sep = "=" if op == EQ else "!="
            parts.append(f"{ch}{sep}{show_interval(iv)}")
        body = (" " + " ".join(parts)) if parts else ""
        targets = " ".join(names[t] for t in clause.targets)
        out.append(f"  step {names[clause.state]}{body} -> {targets}")
    return "\n".join(out)


def print_architecture(system: System) -> str:
    """Canonical text form; equal systems print byte-identically."""
    out = [f"system {system.name}"]
    out.append("alphabet " + " ".join(system.alphabet))
    out.append(("inputs " + " ".join(sorted(system.inputs))).rstrip())
    out.append(("outputs " + " ".join(sorted(system.outputs))).rstrip())
    for c in system.components:
        out.append("")
        out.append(f"component {c.name}")
        out.append(("  inputs " + " ".join(sorted(c.inputs))).rstrip())
        out.append(("  outputs " + " ".join(sorted(c.outputs))).rstrip())
        out.append(f"  behavior {c.name}_behavior")
    for c in system.components:
        out.append("")
        out.append(print_transducer(c.behavior, f"{c.name}_behavior"))
    return "\n".join(out) + "\n"


def digest(system: System) -> str:
    """Stable content hash of the canonical printed form."""
    return hashlib.sha256(print_architecture(system).encode()).hexdigest()
