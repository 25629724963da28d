"""System-level semantics: composition, black boxes, oracle, invariants.

Two independent routes compute what a system looks like from outside.  The
primary route builds the product transducer of all components and hides the
internal channels.  The oracle route enumerates every bounded assignment of
all channels and keeps those where each component admits its own slice; it
exists purely to cross-check the first route and shares none of its
machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .behavior import (
    EQ,
    NE,
    Outcome,
    Transducer,
    Verdict,
    adapt,
    admits,
    denote,
    denote_constrained,
    silent_machine,
)
from .errors import (
    AlphabetError,
    InterfaceError,
    PreconditionError,
    UnknownReferenceError,
)
from .model import System, assert_consistent
from .registry import Invariant
from .streams import (
    Interval,
    StreamTuple,
    enumerate_intervals,
    interval_key,
    iter_tuples,
    restrict,
)

# ----------------------------------------------------------------------
# parallel composition
# ----------------------------------------------------------------------


def compose(
    machines: Sequence[Transducer],
    alphabet: tuple[str, ...] | None = None,
    bound: int | None = None,
) -> Transducer:
    """Product transducer of machines with pairwise disjoint outputs.

    Outputs are the union of all member outputs; inputs are the member
    inputs not produced inside.  Each tick every member first emits, the
    emitted intervals are combined with the environment input into one
    assignment of all channels, and then every member absorbs its own slice
    of that assignment.  A member output that another member reads and that
    is declared unconstrained must be expanded to concrete intervals, which
    is the only reason composition may need a bound.
    """
    machines = list(machines)
    if not machines:
        if alphabet is None:
            raise AlphabetError("composing nothing requires an explicit alphabet")
        return silent_machine(alphabet, (), ())
    if any(m.canonical_choice for m in machines):
        raise PreconditionError(
            "canonical-choice machines are analysis artifacts; compose the "
            "behaviors they were extracted from instead"
        )
    alphabets = {m.alphabet for m in machines}
    if len(alphabets) > 1:
        raise AlphabetError(f"members use different alphabets: {alphabets}")
    sigma = machines[0].alphabet
    if alphabet is not None and tuple(alphabet) != sigma:
        raise AlphabetError(f"members use {sigma}, requested {tuple(alphabet)}")

    outputs: frozenset[str] = frozenset()
    for m in machines:
        clash = outputs & m.outputs
        if clash:
            raise InterfaceError(f"outputs written twice: {sorted(clash)}")
        outputs |= m.outputs
    read = frozenset(ch for m in machines for ch in m.inputs)
    inputs = read - outputs
    feedback = read & outputs

    # Unconstrained member outputs stay symbolic unless some member reads
    # them, in which case concrete feedback values are required.
    symbolic: frozenset[str] = frozenset()
    for m in machines:
        symbolic |= m.chaos_outputs - feedback
    needs_expansion = [tuple(sorted(m.chaos_outputs & feedback)) for m in machines]
    if any(needs_expansion) and bound is None:
        raise PreconditionError(
            "composition feeds unconstrained channels back; a bound is required"
        )
    grid = enumerate_intervals(sigma, bound) if bound is not None else []

    def member_emits(k: int, state):
        base = machines[k].emit_choices(state)
        extra = needs_expansion[k]
        if not extra:
            return [(dict(a), mid) for a, mid in base]
        out = []
        for a, mid in base:
            for combo in itertools.product(grid, repeat=len(extra)):
                d = dict(a)
                d.update(zip(extra, combo))
                out.append((d, mid))
        return out

    initial = ("st", tuple(m.initial for m in machines))
    states: list = [initial]
    seen = {initial}
    emit_rows: dict = {}
    clauses: list[tuple[object, tuple, tuple]] = []
    done_mids = set()
    frontier = [initial]
    while frontier:
        current = frontier.pop()
        member_states = current[1]
        choices = []
        for combo in itertools.product(
            *(member_emits(k, s) for k, s in enumerate(member_states))
        ):
            full: dict[str, Interval] = {}
            for assignment, _ in combo:
                full.update(assignment)
            fb = tuple(sorted((ch, full[ch]) for ch in feedback))
            mid = ("mid", tuple(mid for _, mid in combo), fb)
            if mid not in seen:
                seen.add(mid)
                states.append(mid)
            choices.append((full, mid))
            if mid in done_mids:
                continue
            done_mids.add(mid)
            fb_values = dict(fb)
            per_member = []
            for k, m in enumerate(machines):
                alive = []
                for clause in m._clauses_by_state.get(combo[k][1], ()):
                    env_atoms = []
                    ok = True
                    for ch, op, iv in clause.atoms:
                        if ch in feedback:
                            actual = fb_values[ch]
                            if (op == EQ) != (actual == iv):
                                ok = False
                                break
                        else:
                            env_atoms.append((ch, op, iv))
                    if ok:
                        alive.append((tuple(env_atoms), clause.targets))
                per_member.append(alive)
            for clause_combo in itertools.product(*per_member):
                merged = _merge_atoms([a for atoms, _ in clause_combo for a in atoms])
                if merged is None:
                    continue
                targets = []
                for target_combo in itertools.product(
                    *(tgts for _, tgts in clause_combo)
                ):
                    succ = ("st", tuple(target_combo))
                    if succ not in seen:
                        seen.add(succ)
                        states.append(succ)
                        frontier.append(succ)
                    targets.append(succ)
                clauses.append((mid, merged, tuple(targets)))
        emit_rows[current] = choices

    return Transducer.build(
        alphabet=sigma,
        inputs=inputs,
        outputs=outputs,
        states=tuple(states),
        initial=initial,
        emit=emit_rows,
        absorb=clauses,
        chaos_outputs=symbolic,
    )


def _merge_atoms(atoms):
    """Conjoin atoms from several clauses; None when unsatisfiable."""
    eqs: dict[str, Interval] = {}
    nes: dict[str, set[Interval]] = {}
    for ch, op, iv in atoms:
        if op == EQ:
            if ch in eqs and eqs[ch] != iv:
                return None
            eqs[ch] = iv
        else:
            nes.setdefault(ch, set()).add(iv)
    merged: list[tuple[str, str, Interval]] = []
    for ch, iv in eqs.items():
        if iv in nes.get(ch, ()):
            return None
        merged.append((ch, EQ, iv))
    for ch, values in nes.items():
        if ch in eqs:
            continue
        merged.extend((ch, NE, iv) for iv in values)
    return tuple(merged)


# ----------------------------------------------------------------------
# black box via composition
# ----------------------------------------------------------------------


def black_box(system: System, bound: int | None = None) -> Transducer:
    """The externally visible behavior: compose everything, hide internals."""
    assert_consistent(system)
    product = compose(
        [c.behavior for c in system.components],
        alphabet=system.alphabet,
        bound=bound,
    )
    return adapt(product, system.inputs, system.outputs)


# ----------------------------------------------------------------------
# direct network execution
# ----------------------------------------------------------------------


def network_histories(
    system: System,
    env_input: StreamTuple,
    horizon: int,
    bound: int,
    record: frozenset[str],
) -> frozenset[tuple]:
    """Run all components in lockstep and record selected channels per tick.

    Equivalent to denoting the composed product but without materializing
    the product machine, which keeps invariant checks and refinement sweeps
    affordable.  Unconstrained outputs are expanded only when some component
    reads them or they are recorded.
    """
    members = [c.behavior for c in system.components]
    read = frozenset(ch for m in members for ch in m.inputs)
    grid = enumerate_intervals(system.alphabet, bound)
    expansions = [tuple(sorted(m.chaos_outputs & (read | record))) for m in members]
    env_ticks = [env_input.tick(k) for k in range(horizon)]

    emit_cache: dict[tuple[int, object], list] = {}

    def member_emits(k: int, state):
        key = (k, state)
        found = emit_cache.get(key)
        if found is None:
            base = members[k].emit_choices(state)
            found = []
            for a, mid in base:
                if expansions[k]:
                    for combo in itertools.product(grid, repeat=len(expansions[k])):
                        d = dict(a)
                        d.update(zip(expansions[k], combo))
                        found.append((d, mid))
                else:
                    found.append((dict(a), mid))
            emit_cache[key] = found
        return found

    record_order = sorted(record)
    memo: dict[tuple, frozenset] = {}

    def suffixes(joint: tuple, t: int) -> frozenset:
        if t == horizon:
            return frozenset({()})
        key = (joint, t)
        cached = memo.get(key)
        if cached is not None:
            return cached
        acc = set()
        for combo in itertools.product(
            *(member_emits(k, s) for k, s in enumerate(joint))
        ):
            tick: dict[str, Interval] = dict(env_ticks[t])
            for assignment, _ in combo:
                tick.update(assignment)
            visible = tuple((ch, tick[ch]) for ch in record_order)
            successor_sets = [
                members[k].absorb_targets(combo[k][1], tick)
                for k in range(len(members))
            ]
            for joint_next in itertools.product(*successor_sets):
                for rest in suffixes(joint_next, t + 1):
                    acc.add((visible,) + rest)
        result = frozenset(acc)
        memo[key] = result
        return result

    start = tuple(m.initial for m in members)
    return suffixes(start, 0)


def _histories_to_tuples(histories, record: frozenset[str]) -> frozenset[StreamTuple]:
    out = set()
    for history in histories:
        streams: dict[str, list[Interval]] = {ch: [] for ch in record}
        for tick in history:
            for ch, iv in tick:
                streams[ch].append(iv)
        out.add(
            StreamTuple(tuple((ch, tuple(s)) for ch, s in sorted(streams.items())))
        )
    return frozenset(out)


def denotation(
    system: System, env_input: StreamTuple, horizon: int, bound: int
) -> frozenset[StreamTuple]:
    """Black-box denotation for one input, computed by direct execution."""
    histories = network_histories(
        system, env_input, horizon, bound, frozenset(system.outputs)
    )
    return _histories_to_tuples(histories, frozenset(system.outputs))


def valid_tuples(
    system: System, horizon: int, bound: int
) -> Iterator[StreamTuple]:
    """Every bounded assignment of all channels that all components admit."""
    channels = system.inputs | system.component_outputs
    for env in iter_tuples(system.inputs, system.alphabet, horizon, bound):
        histories = network_histories(system, env, horizon, bound, channels)
        for full in sorted(
            _histories_to_tuples(histories, channels), key=lambda t: t.entries
        ):
            yield full


# ----------------------------------------------------------------------
# enumeration oracle
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DenotationTable:
    """Fully materialized bounded black-box semantics."""

    horizon: int
    bound: int
    entries: tuple[tuple[StreamTuple, frozenset[StreamTuple]], ...]

    def get(self, env_input: StreamTuple) -> frozenset[StreamTuple]:
        for key, value in self.entries:
            if key == env_input:
                return value
        raise UnknownReferenceError("input outside the enumerated table")

    @property
    def inputs(self) -> tuple[StreamTuple, ...]:
        return tuple(key for key, _ in self.entries)


def black_box_oracle(system: System, horizon: int, bound: int) -> DenotationTable:
    """Black-box semantics by raw enumeration, independent of composition.

    Walks every bounded stream tuple over all system channels and keeps
    those in which every component admits its own output slice given its
    input slice.  Deliberately brute force: this is the trust anchor the
    product construction is compared against.
    """
    assert_consistent(system)
    channels = system.inputs | system.component_outputs
    table: dict[StreamTuple, set[StreamTuple]] = {
        i: set()
        for i in iter_tuples(system.inputs, system.alphabet, horizon, bound)
    }
    member_cache: dict[tuple[str, StreamTuple], frozenset[StreamTuple]] = {}

    def member_admits(component, full: StreamTuple) -> bool:
        machine = component.behavior
        local_in = restrict(full, machine.inputs)
        key = (component.name, local_in)
        allowed = member_cache.get(key)
        if allowed is None:
            allowed = denote_constrained(machine, local_in, horizon)
            member_cache[key] = allowed
        produced = restrict(full, machine.constrained_outputs)
        return produced in allowed

    for full in iter_tuples(channels, system.alphabet, horizon, bound):
        if all(member_admits(c, full) for c in system.components):
            table[restrict(full, system.inputs)].add(restrict(full, system.outputs))

    entries = tuple(
        (key, frozenset(values))
        for key, values in sorted(table.items(), key=lambda kv: kv[0].entries)
    )
    return DenotationTable(horizon, bound, entries)


def denotation_table(system: System, horizon: int, bound: int) -> DenotationTable:
    """The same table shape as the oracle, via the execution route."""
    assert_consistent(system)
    entries = tuple(
        (env, frozenset(denotation(system, env, horizon, bound)))
        for env in iter_tuples(system.inputs, system.alphabet, horizon, bound)
    )
    return DenotationTable(horizon, bound, entries)


# ----------------------------------------------------------------------
# refinement and invariants over systems
# ----------------------------------------------------------------------


def system_refines(
    old: System, new: System, horizon: int, bound: int
) -> Verdict:
    """Every black-box reaction of new must be possible for old."""
    if old.inputs != new.inputs or old.outputs != new.outputs:
        raise InterfaceError("system refinement requires identical interfaces")
    if old.alphabet != new.alphabet:
        raise AlphabetError("system refinement requires identical alphabets")
    assert_consistent(old)
    assert_consistent(new)
    if old == new:
        return Verdict(Outcome.HOLDS, detail="structurally identical")
    for env in iter_tuples(old.inputs, old.alphabet, horizon, bound):
        new_set = denotation(new, env, horizon, bound)
        old_set = denotation(old, env, horizon, bound)
        extra = new_set - old_set
        if extra:
            witness = min(extra, key=lambda t: t.entries)
            return Verdict(
                Outcome.FAILS,
                horizon,
                bound,
                counterexample=(env, witness),
                detail="output possible after refinement but not before",
            )
    return Verdict(Outcome.HOLDS_UP_TO_BOUND, horizon, bound)


def invariant_valid(
    system: System, invariant: Invariant, horizon: int, bound: int
) -> Verdict:
    """Check the invariant on every admissible full-channel assignment."""
    assert_consistent(system)
    scope = system.inputs | system.component_outputs
    missing = set(invariant.channels) - scope
    if missing:
        raise UnknownReferenceError(
            f"invariant {invariant.name!r} references channels outside the "
            f"system: {sorted(missing)}"
        )
    for full in valid_tuples(system, horizon, bound):
        k = invariant.first_violation(full)
        if k is not None:
            return Verdict(
                Outcome.FAILS,
                horizon,
                bound,
                counterexample=(full, k),
                detail=f"window at tick {k} violates {invariant.name}",
            )
    return Verdict(Outcome.HOLDS_UP_TO_BOUND, horizon, bound)


def satisfying_inputs(
    channels: Iterable[str],
    invariant: Invariant,
    alphabet: tuple[str, ...],
    horizon: int,
    bound: int,
) -> Iterator[StreamTuple]:
    """All bounded tuples over the channels on which the invariant holds.

    The enumeration domain of a channel is the bounded interval grid plus
    any extra values the invariant declares for it.  Tuples are built tick
    by tick and a branch is abandoned as soon as a completed window fails,
    which keeps the walk far below the raw product space.
    """
    names = sorted(set(channels))
    missing = set(invariant.channels) - set(names)
    if missing:
        raise UnknownReferenceError(
            f"invariant {invariant.name!r} constrains channels outside the "
            f"enumeration scope: {sorted(missing)}"
        )
    extra = invariant.value_domains(alphabet, bound)
    domains: list[list[Interval]] = []
    for ch in names:
        base = list(enumerate_intervals(alphabet, bound))
        for iv in sorted(extra.get(ch, ()), key=lambda v: interval_key(v, alphabet)):
            if iv not in base:
                base.append(iv)
        domains.append(base)
    position = {ch: names.index(ch) for ch in invariant.channels}

    def extend(prefix_streams: tuple[tuple[Interval, ...], ...], t: int):
        if t == horizon:
            yield StreamTuple(tuple(zip(names, prefix_streams)))
            return
        for combo in itertools.product(*domains):
            streams = tuple(
                prefix_streams[j] + (combo[j],) for j in range(len(names))
            )
            k = t + 1 - invariant.window
            if k >= 0:
                slices = {
                    ch: streams[position[ch]][k : t + 1]
                    for ch in invariant.channels
                }
                if not invariant.predicate(k, slices):
                    continue
            yield from extend(streams, t + 1)

    yield from extend(tuple(() for _ in names), 0)


def conditional_refines(
    system: System,
    component_name: str,
    candidate: Transducer,
    invariant: Invariant,
    horizon: int,
    bound: int,
) -> Verdict:
    """Refinement of one component under an invariant assumption.

    Quantifies over every bounded assignment of the component inputs that
    extends to a tuple satisfying the invariant, and requires the candidate
    outputs to be admitted by the current behavior there.
    """
    component = system.component(component_name)
    scope = frozenset(component.inputs) | set(invariant.channels)
    checked: set[StreamTuple] = set()
    for x in satisfying_inputs(
        scope, invariant, system.alphabet, horizon, bound
    ):
        local = restrict(x, component.inputs)
        if local in checked:
            continue
        checked.add(local)
        for produced in denote(candidate, local, horizon, bound):
            if not admits(component.behavior, local, produced, horizon):
                return Verdict(
                    Outcome.FAILS,
                    horizon,
                    bound,
                    counterexample=(local, produced),
                    detail="candidate output not admitted under the invariant",
                )
    return Verdict(Outcome.HOLDS_UP_TO_BOUND, horizon, bound)
