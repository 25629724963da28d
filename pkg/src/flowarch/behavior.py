"""Executable behaviors as nondeterministic interval transducers.

A transducer processes one tick at a time in two phases.  First it emits:
from the current state it picks one of finitely many choices, each choice
fixing the output intervals for this tick and an intermediate state.  Then it
absorbs the input intervals of the same tick, moving from the intermediate
state to one of finitely many successor states.  Because the emitted
intervals are chosen before the inputs of the tick are seen, every behavior
reacts to input with a delay of at least one tick.

Absorption is written as pattern clauses.  A clause constrains some input
channels with equality or inequality atoms and lists the possible successor
states; the successors for a concrete input are the union over all matching
clauses.  Channels may also be declared as unconstrained outputs: the machine
then places no restriction at all on their content, and they are expanded to
concrete intervals only when a finite enumeration bound is supplied.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .errors import (
    AlphabetError,
    DomainError,
    InterfaceError,
    PreconditionError,
    TotalityError,
)
from .streams import (
    EMPTY_INTERVAL,
    Interval,
    StreamTuple,
    check_alphabet,
    enumerate_intervals,
    interval_key,
    iter_tuples,
)

State = Hashable
Assignment = tuple[tuple[str, Interval], ...]
Atom = tuple[str, str, Interval]

EQ = "eq"
NE = "ne"


def _freeze_assignment(mapping: Mapping[str, Iterable[str]]) -> Assignment:
    return tuple(sorted((ch, tuple(iv)) for ch, iv in mapping.items()))


def _freeze_atoms(pattern) -> tuple[Atom, ...]:
    if isinstance(pattern, Mapping):
        atoms = [(ch, EQ, tuple(iv)) for ch, iv in pattern.items()]
    else:
        atoms = [(ch, op, tuple(iv)) for ch, op, iv in pattern]
    return tuple(sorted(atoms))


@dataclass(frozen=True)
class AbsorbClause:
    state: State
    atoms: tuple[Atom, ...]
    targets: tuple[State, ...]

    def matches(self, assignment: Mapping[str, Interval]) -> bool:
        for channel, op, value in self.atoms:
            actual = assignment.get(channel, EMPTY_INTERVAL)
            if op == EQ and actual != value:
                return False
            if op == NE and actual == value:
                return False
        return True


@dataclass(frozen=True)
class Transducer:
    """A finite emit/absorb machine over a shared message alphabet.

    chaos_outputs lists output channels whose content the machine leaves
    completely unconstrained; they never appear in emit assignments.  When
    canonical_choice is set, emission and absorption both resolve to the
    single least option under the canonical order, which makes the machine
    deterministic.
    """

    alphabet: tuple[str, ...]
    inputs: frozenset[str]
    outputs: frozenset[str]
    states: tuple[State, ...]
    initial: State
    emit: tuple[tuple[State, tuple[tuple[Assignment, State], ...]], ...]
    absorb: tuple[AbsorbClause, ...]
    chaos_outputs: frozenset[str] = frozenset()
    canonical_choice: bool = False

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def build(
        cls,
        alphabet: Sequence[str],
        inputs: Iterable[str],
        outputs: Iterable[str],
        states: Sequence[State],
        initial: State,
        emit: Mapping[State, Iterable[tuple[Mapping[str, Iterable[str]], State]]],
        absorb: Iterable[tuple[State, object, Iterable[State]]],
        chaos_outputs: Iterable[str] = (),
        canonical_choice: bool = False,
    ) -> "Transducer":
        alphabet = tuple(alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise AlphabetError(f"duplicate symbols in alphabet {alphabet}")
        inputs = frozenset(inputs)
        outputs = frozenset(outputs)
        chaos = frozenset(chaos_outputs)
        states = tuple(states)
        if len(set(states)) != len(states) or not states:
            raise DomainError("states must be nonempty and unique")
        if initial not in states:
            raise DomainError(f"initial state {initial!r} not declared")
        if not chaos <= outputs:
            raise InterfaceError("unconstrained channels must be outputs")
        real = outputs - chaos

        index = {s: k for k, s in enumerate(states)}

        def _choice_key(choice: tuple[Assignment, State]):
            assignment, mid = choice
            return (
                tuple(interval_key(iv, alphabet) for _, iv in assignment),
                index[mid],
            )

        emit_rows = []
        for state, choices in emit.items():
            if state not in index:
                raise DomainError(f"emit from undeclared state {state!r}")
            row = set()
            for mapping, mid in choices:
                if mid not in index:
                    raise DomainError(f"emit targets undeclared state {mid!r}")
                assignment = _freeze_assignment(mapping)
                if {ch for ch, _ in assignment} != real:
                    raise InterfaceError(
                        f"emit assignment channels {[c for c, _ in assignment]} "
                        f"differ from constrained outputs {sorted(real)}"
                    )
                for _, iv in assignment:
                    check_alphabet(iv, alphabet)
                row.add((assignment, mid))
            emit_rows.append((state, tuple(sorted(row, key=_choice_key))))
        emit_rows.sort(key=lambda row: index[row[0]])

        clauses = []
        for state, pattern, targets in absorb:
            if state not in index:
                raise DomainError(f"absorb from undeclared state {state!r}")
            atoms = _freeze_atoms(pattern)
            eq_channels = [ch for ch, op, _ in atoms if op == EQ]
            if len(eq_channels) != len(set(eq_channels)):
                raise DomainError("clause has two equality atoms on one channel")
            for ch, _, iv in atoms:
                if ch not in inputs:
                    raise InterfaceError(f"clause constrains non-input {ch!r}")
                check_alphabet(iv, alphabet)
            tgt = tuple(sorted(set(targets), key=index.__getitem__))
            if not tgt:
                raise DomainError("absorb clause needs at least one target")
            for t in tgt:
                if t not in index:
                    raise DomainError(f"absorb targets undeclared state {t!r}")
            clauses.append(AbsorbClause(state, atoms, tgt))

        def _clause_key(c: AbsorbClause):
            return (
                index[c.state],
                tuple(
                    (ch, op, interval_key(iv, alphabet)) for ch, op, iv in c.atoms
                ),
                tuple(index[t] for t in c.targets),
            )

        clauses.sort(key=_clause_key)
        return cls(
            alphabet=alphabet,
            inputs=inputs,
            outputs=outputs,
            states=states,
            initial=initial,
            emit=tuple(emit_rows),
            absorb=tuple(clauses),
            chaos_outputs=chaos,
            canonical_choice=canonical_choice,
        )

    # ------------------------------------------------------------------
    # derived views
    # ------------------------------------------------------------------

    @cached_property
    def state_index(self) -> dict[State, int]:
        return {s: k for k, s in enumerate(self.states)}

    @cached_property
    def constrained_outputs(self) -> frozenset[str]:
        return self.outputs - self.chaos_outputs

    @cached_property
    def _emit_map(self) -> dict[State, tuple[tuple[Assignment, State], ...]]:
        return dict(self.emit)

    @cached_property
    def _clauses_by_state(self) -> dict[State, tuple[AbsorbClause, ...]]:
        grouped: dict[State, list[AbsorbClause]] = {}
        for clause in self.absorb:
            grouped.setdefault(clause.state, []).append(clause)
        return {s: tuple(cs) for s, cs in grouped.items()}

    @cached_property
    def mentioned_inputs(self) -> frozenset[str]:
        """Input channels that occur in at least one absorb atom."""
        return frozenset(ch for c in self.absorb for ch, _, _ in c.atoms)

    def emit_choices(self, state: State) -> tuple[tuple[Assignment, State], ...]:
        choices = self._emit_map.get(state, ())
        if not choices:
            raise TotalityError(f"state {state!r} has no emit choice")
        if self.canonical_choice:
            return choices[:1]
        return choices

    def absorb_targets(
        self, state: State, assignment: Mapping[str, Interval]
    ) -> tuple[State, ...]:
        found: set[State] = set()
        for clause in self._clauses_by_state.get(state, ()):
            if clause.matches(assignment):
                found.update(clause.targets)
        if not found:
            raise TotalityError(
                f"state {state!r} has no absorb clause for {dict(assignment)}"
            )
        ordered = sorted(found, key=self.state_index.__getitem__)
        if self.canonical_choice:
            return (ordered[0],)
        return tuple(ordered)

    def check_total(self, bound: int) -> None:
        """Verify emit and absorb totality over the bounded input space.

        Walks the states reachable from the initial one and raises
        TotalityError on the first gap.
        """
        intervals = enumerate_intervals(self.alphabet, bound)
        channels = sorted(self.inputs)
        seen: set[State] = set()
        frontier = [self.initial]
        while frontier:
            state = frontier.pop()
            if state in seen:
                continue
            seen.add(state)
            for _, mid in self.emit_choices(state):
                for combo in itertools.product(intervals, repeat=len(channels)):
                    assignment = dict(zip(channels, combo))
                    for nxt in self.absorb_targets(mid, assignment):
                        if nxt not in seen:
                            frontier.append(nxt)


# ----------------------------------------------------------------------
# bounded denotation
# ----------------------------------------------------------------------


def _materialized_emits(
    machine: Transducer, state: State, bound: int | None
) -> list[tuple[Assignment, State]]:
    chaos = sorted(machine.chaos_outputs)
    base = machine.emit_choices(state)
    if not chaos:
        return list(base)
    if bound is None:
        raise PreconditionError(
            "an interval bound is required to expand unconstrained outputs"
        )
    intervals = enumerate_intervals(machine.alphabet, bound)
    combos = list(itertools.product(intervals, repeat=len(chaos)))
    if machine.canonical_choice:
        combos = combos[:1]
    out = []
    for assignment, mid in base:
        for combo in combos:
            extended = tuple(sorted(assignment + tuple(zip(chaos, combo))))
            out.append((extended, mid))
    return out


def _run(
    machine: Transducer,
    inputs: StreamTuple,
    horizon: int,
    bound: int | None,
    project: frozenset[str],
) -> frozenset[tuple[Assignment, ...]]:
    """All reachable output histories, each a tick-indexed assignment list."""
    if frozenset(inputs.channels) != machine.inputs:
        raise InterfaceError(
            f"input channels {inputs.channels} differ from {sorted(machine.inputs)}"
        )
    if inputs.horizon is not None and inputs.horizon != horizon:
        raise InterfaceError(
            f"input horizon {inputs.horizon} differs from requested {horizon}"
        )
    ticks = [inputs.tick(k) for k in range(horizon)] if machine.inputs else [
        {} for _ in range(horizon)
    ]
    absorb_cache: dict[tuple[State, int], tuple[State, ...]] = {}
    memo: dict[tuple[State, int], frozenset] = {}
    # Unconstrained channels never feed back into the step relation, so
    # they only need expanding when the projection actually reads them.
    expand = bool(machine.chaos_outputs & project)

    def suffixes(state: State, t: int) -> frozenset:
        if t == horizon:
            return frozenset({()})
        key = (state, t)
        cached = memo.get(key)
        if cached is not None:
            return cached
        acc = set()
        emits = (
            _materialized_emits(machine, state, bound)
            if expand
            else machine.emit_choices(state)
        )
        for assignment, mid in emits:
            visible = tuple(p for p in assignment if p[0] in project)
            ck = (mid, t)
            nxt = absorb_cache.get(ck)
            if nxt is None:
                nxt = machine.absorb_targets(mid, ticks[t])
                absorb_cache[ck] = nxt
            for successor in nxt:
                for rest in suffixes(successor, t + 1):
                    acc.add((visible,) + rest)
        result = frozenset(acc)
        memo[key] = result
        return result

    return suffixes(machine.initial, 0)


def _history_to_tuple(history: tuple[Assignment, ...], channels: frozenset[str]):
    streams = {ch: [] for ch in channels}
    for tick in history:
        for ch, iv in tick:
            streams[ch].append(iv)
    return StreamTuple(tuple((ch, tuple(ivs)) for ch, ivs in sorted(streams.items())))


def denote(
    machine: Transducer,
    inputs: StreamTuple,
    horizon: int,
    bound: int | None = None,
) -> frozenset[StreamTuple]:
    """The set of output stream tuples the machine can produce on an input.

    Unconstrained output channels are expanded to every interval of length
    at most bound, so the result is always a finite set.
    """
    histories = _run(machine, inputs, horizon, bound, machine.outputs)
    return frozenset(_history_to_tuple(h, machine.outputs) for h in histories)


def denote_constrained(
    machine: Transducer, inputs: StreamTuple, horizon: int
) -> frozenset[StreamTuple]:
    """Denotation projected to the constrained outputs only.

    Needs no bound because unconstrained channels are dropped rather than
    expanded.
    """
    project = machine.constrained_outputs
    histories = _run(machine, inputs, horizon, None, project)
    return frozenset(_history_to_tuple(h, project) for h in histories)


def admits(
    machine: Transducer, inputs: StreamTuple, output: StreamTuple, horizon: int
) -> bool:
    """Membership in the denotation, exact even for unconstrained channels."""
    from .streams import restrict

    if frozenset(output.channels) != machine.outputs:
        raise InterfaceError("output tuple does not match machine outputs")
    constrained = restrict(output, machine.constrained_outputs)
    return constrained in denote_constrained(machine, inputs, horizon)


# ----------------------------------------------------------------------
# verdicts
# ----------------------------------------------------------------------


class Outcome(Enum):
    HOLDS = "holds"
    HOLDS_UP_TO_BOUND = "holds-up-to-bound"
    FAILS = "fails"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    horizon: int | None = None
    bound: int | None = None
    counterexample: tuple | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.outcome is not Outcome.FAILS


# ----------------------------------------------------------------------
# operations on behaviors
# ----------------------------------------------------------------------


def adapt(
    machine: Transducer, inputs: Iterable[str], outputs: Iterable[str]
) -> Transducer:
    """Widen the input channels and restrict the output channels.

    Added inputs are ignored; dropped outputs are projected away.  The
    denotation over the new signature is exactly the restriction of the old
    one applied to the restricted input.
    """
    new_in = frozenset(inputs)
    new_out = frozenset(outputs)
    if not machine.inputs <= new_in:
        raise InterfaceError(
            f"adapted inputs {sorted(new_in)} must include {sorted(machine.inputs)}"
        )
    if not new_out <= machine.outputs:
        raise InterfaceError(
            f"adapted outputs {sorted(new_out)} must lie in {sorted(machine.outputs)}"
        )
    keep_real = new_out & machine.constrained_outputs
    emit = {
        state: [
            (dict(p for p in assignment if p[0] in keep_real), mid)
            for assignment, mid in choices
        ]
        for state, choices in machine.emit
    }
    return Transducer.build(
        alphabet=machine.alphabet,
        inputs=new_in,
        outputs=new_out,
        states=machine.states,
        initial=machine.initial,
        emit=emit,
        absorb=[(c.state, c.atoms, c.targets) for c in machine.absorb],
        chaos_outputs=machine.chaos_outputs & new_out,
        canonical_choice=machine.canonical_choice,
    )


def chaos_extend(machine: Transducer, channel: str) -> Transducer:
    """Add a fresh output channel with completely unconstrained content.

    The channel stays symbolic: it is expanded against an interval bound
    only when a denotation is actually enumerated, so no bound is baked
    into the machine itself.
    """
    if channel in machine.outputs:
        raise InterfaceError(f"channel {channel!r} is already an output")
    return Transducer.build(
        alphabet=machine.alphabet,
        inputs=machine.inputs,
        outputs=machine.outputs | {channel},
        states=machine.states,
        initial=machine.initial,
        emit={s: [(dict(a), m) for a, m in cs] for s, cs in machine.emit},
        absorb=[(c.state, c.atoms, c.targets) for c in machine.absorb],
        chaos_outputs=machine.chaos_outputs | {channel},
        canonical_choice=machine.canonical_choice,
    )


def refines(
    candidate: Transducer,
    reference: Transducer,
    horizon: int,
    bound: int,
) -> Verdict:
    """Check that every candidate output is admitted by the reference.

    Enumerates all bounded inputs over the shared signature.  A structurally
    identical pair holds unconditionally; otherwise the verdict is bounded.
    """
    if (
        candidate.inputs != reference.inputs
        or candidate.outputs != reference.outputs
    ):
        raise InterfaceError("refinement requires identical signatures")
    if candidate == reference:
        return Verdict(Outcome.HOLDS, detail="structurally identical")
    for i in iter_tuples(candidate.inputs, candidate.alphabet, horizon, bound):
        for produced in denote(candidate, i, horizon, bound):
            if not admits(reference, i, produced, horizon):
                return Verdict(
                    Outcome.FAILS,
                    horizon,
                    bound,
                    counterexample=(i, produced),
                    detail="output not admitted by reference behavior",
                )
    return Verdict(Outcome.HOLDS_UP_TO_BOUND, horizon, bound)


def independent_of(
    machine: Transducer, channel: str, horizon: int, bound: int
) -> Verdict:
    """Check that the denotation never depends on one input channel.

    If no absorb clause mentions the channel the machine cannot observe it
    and the verdict holds outright.  Otherwise all bounded inputs differing
    only on that channel are compared pairwise.
    """
    if channel not in machine.inputs:
        raise InterfaceError(f"channel {channel!r} is not an input")
    if channel not in machine.mentioned_inputs:
        return Verdict(Outcome.HOLDS, detail="channel unmentioned by any clause")
    rest = machine.inputs - {channel}
    from .streams import merge

    variants = list(
        iter_tuples({channel}, machine.alphabet, horizon, bound)
    )
    for base in iter_tuples(rest, machine.alphabet, horizon, bound):
        reference_input = merge(base, variants[0])
        reference = denote(machine, reference_input, horizon, bound)
        for variant in variants[1:]:
            other_input = merge(base, variant)
            if denote(machine, other_input, horizon, bound) != reference:
                return Verdict(
                    Outcome.FAILS,
                    horizon,
                    bound,
                    counterexample=(reference_input, other_input),
                    detail="denotations differ on inputs equal elsewhere",
                )
    return Verdict(Outcome.HOLDS_UP_TO_BOUND, horizon, bound)


def restrict_input(
    machine: Transducer,
    channel: str,
    horizon: int | None = None,
    bound: int | None = None,
    assume_independent: bool = False,
) -> Transducer:
    """Drop an input channel the machine does not depend on.

    The result behaves like the original with the channel pinned to the
    all-empty stream.  Dependence is refuted structurally when possible,
    by bounded enumeration when a horizon and bound are supplied, and
    otherwise the call is rejected.
    """
    if channel not in machine.inputs:
        raise InterfaceError(f"channel {channel!r} is not an input")
    if not assume_independent and channel in machine.mentioned_inputs:
        if horizon is None or bound is None:
            raise PreconditionError(
                f"cannot rule out dependence on {channel!r} structurally"
            )
        verdict = independent_of(machine, channel, horizon, bound)
        if not verdict:
            raise PreconditionError(
                f"machine depends on input {channel!r}: {verdict.detail}"
            )
    clauses = []
    for c in machine.absorb:
        kept = []
        dead = False
        for ch, op, iv in c.atoms:
            if ch != channel:
                kept.append((ch, op, iv))
            elif op == EQ and iv != EMPTY_INTERVAL:
                dead = True
            elif op == NE and iv == EMPTY_INTERVAL:
                dead = True
        if not dead:
            clauses.append((c.state, tuple(kept), c.targets))
    return Transducer.build(
        alphabet=machine.alphabet,
        inputs=machine.inputs - {channel},
        outputs=machine.outputs,
        states=machine.states,
        initial=machine.initial,
        emit={s: [(dict(a), m) for a, m in cs] for s, cs in machine.emit},
        absorb=clauses,
        chaos_outputs=machine.chaos_outputs,
        canonical_choice=machine.canonical_choice,
    )


def extract_strategy(machine: Transducer) -> Transducer:
    """The deterministic sub-behavior picking the least option everywhere.

    Emit choices collapse to the canonically least one, unconstrained
    outputs collapse to the empty interval, and absorption resolves to the
    least matching successor.  The result is a single strategy contained in
    the original behavior.
    """
    index = machine.state_index
    chaos = sorted(machine.chaos_outputs)
    emit = {}
    for state, choices in machine.emit:
        if not choices:
            raise TotalityError(f"state {state!r} has no emit choice")
        least = min(
            choices,
            key=lambda c: (
                tuple(interval_key(iv, machine.alphabet) for _, iv in c[0]),
                index[c[1]],
            ),
        )
        assignment = dict(least[0])
        for ch in chaos:
            assignment[ch] = EMPTY_INTERVAL
        emit[state] = [(assignment, least[1])]
    return Transducer.build(
        alphabet=machine.alphabet,
        inputs=machine.inputs,
        outputs=machine.outputs,
        states=machine.states,
        initial=machine.initial,
        emit=emit,
        absorb=[(c.state, c.atoms, c.targets) for c in machine.absorb],
        chaos_outputs=frozenset(),
        canonical_choice=True,
    )


# ----------------------------------------------------------------------
# stock machines
# ----------------------------------------------------------------------


def silent_machine(
    alphabet: Sequence[str], inputs: Iterable[str], outputs: Iterable[str]
) -> Transducer:
    """Emits the empty interval on every output at every tick."""
    outputs = frozenset(outputs)
    return Transducer.build(
        alphabet=alphabet,
        inputs=inputs,
        outputs=outputs,
        states=("s0",),
        initial="s0",
        emit={"s0": [({ch: EMPTY_INTERVAL for ch in outputs}, "s0")]},
        absorb=[("s0", (), ("s0",))],
    )


def sink_machine(alphabet: Sequence[str], inputs: Iterable[str]) -> Transducer:
    """Absorbs its inputs and produces nothing."""
    return silent_machine(alphabet, inputs, ())


def chaos_machine(
    alphabet: Sequence[str], inputs: Iterable[str], outputs: Iterable[str]
) -> Transducer:
    """Places no constraint at all on any of its outputs."""
    return Transducer.build(
        alphabet=alphabet,
        inputs=inputs,
        outputs=outputs,
        states=("s0",),
        initial="s0",
        emit={"s0": [({}, "s0")]},
        absorb=[("s0", (), ("s0",))],
        chaos_outputs=outputs,
    )


def _interval_state_name(prefix: str, interval: Interval) -> str:
    parts = [prefix, str(len(interval))] + list(interval)
    return "_".join(parts)


def copy_machine(
    alphabet: Sequence[str],
    source: str,
    target: str,
    inputs: Iterable[str],
    outputs: Iterable[str],
    value_bound: int = 1,
) -> Transducer:
    """Forwards the source interval to the target channel one tick later.

    Only intervals of length at most value_bound are recognized; anything
    longer is forwarded as the empty interval.  Other outputs stay empty and
    other inputs are ignored.
    """
    alphabet = tuple(alphabet)
    inputs = frozenset(inputs)
    outputs = frozenset(outputs)
    if source not in inputs:
        raise InterfaceError(f"copy source {source!r} must be an input")
    if target not in outputs:
        raise InterfaceError(f"copy target {target!r} must be an output")
    values = enumerate_intervals(alphabet, value_bound)
    names = {v: _interval_state_name("h", v) for v in values}
    others = {ch: EMPTY_INTERVAL for ch in outputs if ch != target}
    emit = {
        names[v]: [({target: v, **others}, names[v])] for v in values
    }
    clauses: list[tuple[State, object, tuple[State, ...]]] = []
    for state in names.values():
        for v in values:
            clauses.append((state, {source: v}, (names[v],)))
        clauses.append(
            (
                state,
                tuple((source, NE, v) for v in values),
                (names[EMPTY_INTERVAL],),
            )
        )
    return Transducer.build(
        alphabet=alphabet,
        inputs=inputs,
        outputs=outputs,
        states=tuple(names[v] for v in values),
        initial=names[EMPTY_INTERVAL],
        emit=emit,
        absorb=clauses,
    )


def summarizer_machine(
    alphabet: Sequence[str],
    sources: Sequence[str],
    target: str,
    inputs: Iterable[str],
    outputs: Iterable[str],
    combine: Callable[..., Interval],
    delay: int = 1,
    skip: int = 0,
    value_bound: int = 1,
    extra_source_values: Iterable[Interval] = (),
) -> Transducer:
    """Emits a combination of earlier source intervals on the target channel.

    At tick t the machine emits combine of the source intervals seen at tick
    t - delay, or the empty interval while t - delay < skip.  The recognized
    source intervals are those of length at most value_bound plus any listed
    extras; unrecognized inputs combine to the empty interval.  All other
    outputs stay empty.
    """
    alphabet = tuple(alphabet)
    sources = tuple(sources)
    inputs = frozenset(inputs)
    outputs = frozenset(outputs)
    if delay < 1:
        raise DomainError("summarizer delay must be at least 1")
    if skip < 0:
        raise DomainError("summarizer skip must not be negative")
    for s in sources:
        if s not in inputs:
            raise InterfaceError(f"summarizer source {s!r} must be an input")
    if target not in outputs:
        raise InterfaceError(f"summarizer target {target!r} must be an output")

    recognized = list(enumerate_intervals(alphabet, value_bound))
    for extra in extra_source_values:
        iv = tuple(extra)
        if iv not in recognized:
            recognized.append(iv)
    combos = list(itertools.product(recognized, repeat=len(sources)))
    values = [EMPTY_INTERVAL]
    for combo in combos:
        result = check_alphabet(combine(*combo), alphabet)
        if result not in values:
            values.append(result)

    def name(count: int, queue: tuple[Interval, ...]) -> str:
        parts = [f"k{count}"] + [_interval_state_name("q", v) for v in queue]
        return "__".join(parts)

    states = []
    for count in range(skip + 1):
        for queue in itertools.product(values, repeat=delay):
            states.append(name(count, queue))
    initial = name(0, (EMPTY_INTERVAL,) * delay)
    others = {ch: EMPTY_INTERVAL for ch in outputs if ch != target}

    emit = {}
    clauses = []
    for count in range(skip + 1):
        for queue in itertools.product(values, repeat=delay):
            state = name(count, queue)
            emit[state] = [({target: queue[0], **others}, state)]
            nxt_count = min(count + 1, skip)
            for combo in combos:
                pushed = (
                    check_alphabet(combine(*combo), alphabet)
                    if count >= skip
                    else EMPTY_INTERVAL
                )
                successor = name(nxt_count, queue[1:] + (pushed,))
                clauses.append((state, dict(zip(sources, combo)), (successor,)))
            blank = name(nxt_count, queue[1:] + (EMPTY_INTERVAL,))
            # Complement of the recognized grid: first source out of range,
            # or first in range with the second out of range, and so on.
            for k, src in enumerate(sources):
                for prefix_combo in itertools.product(recognized, repeat=k):
                    atoms = [
                        (sources[j], EQ, prefix_combo[j]) for j in range(k)
                    ] + [(src, NE, v) for v in recognized]
                    clauses.append((state, tuple(atoms), (blank,)))
    return Transducer.build(
        alphabet=alphabet,
        inputs=inputs,
        outputs=outputs,
        states=tuple(states),
        initial=initial,
        emit=emit,
        absorb=clauses,
    )
