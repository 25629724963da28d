"""Write-once registries for named combiners and invariant predicates.

Scripts and documents refer to combination functions and invariants by name
only; the concrete callables live here.  Each registry rejects duplicate
registration so a name can never silently change meaning mid-run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import DomainError, RegistryError, UnknownReferenceError
from .streams import (
    EMPTY_INTERVAL,
    Interval,
    StreamTuple,
    enumerate_intervals,
)


class Registry:
    def __init__(self, kind: str):
        self._kind = kind
        self._entries: dict[str, object] = {}

    def register(self, name: str, entry: object) -> None:
        if name in self._entries:
            raise RegistryError(f"{self._kind} {name!r} is already registered")
        self._entries[name] = entry

    def get(self, name: str):
        try:
            return self._entries[name]
        except KeyError:
            known = ", ".join(sorted(self._entries)) or "none"
            raise UnknownReferenceError(
                f"unknown {self._kind} {name!r} (registered: {known})"
            ) from None

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._entries))

    def __contains__(self, name: str) -> bool:
        return name in self._entries


# ----------------------------------------------------------------------
# combiners
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Combiner:
    """A named total function from interval tuples to one interval.

    source_values lists intervals beyond the bounded enumeration grid that a
    machine built around this combiner must still recognize on its source
    channels.
    """

    name: str
    arity: int
    fn: Callable[..., Interval]
    source_values: frozenset[Interval] = frozenset()


CombinerFactory = Callable[[tuple[str, ...], int], Combiner]

COMBINERS = Registry("combiner")


def build_combiner(name: str, alphabet: tuple[str, ...], bound: int) -> Combiner:
    factory: CombinerFactory = COMBINERS.get(name)
    return factory(alphabet, bound)


def pair_encode(alphabet: tuple[str, ...]) -> Callable[[Interval, Interval], Interval]:
    """Injective combination of two intervals into one.

    Each argument is length-prefixed in unary before concatenation, so the
    pair can always be recovered: tag^len(w) sep w, with tag and sep the
    first two alphabet symbols.
    """
    if len(alphabet) < 2:
        raise DomainError("pair encoding needs an alphabet of at least two symbols")
    tag, sep = alphabet[0], alphabet[1]

    def fn(u: Interval, v: Interval) -> Interval:
        return (
            (tag,) * len(u) + (sep,) + tuple(u)
            + (tag,) * len(v) + (sep,) + tuple(v)
        )

    return fn


def pair_encode_images(alphabet: tuple[str, ...], bound: int) -> frozenset[Interval]:
    """All values of the pair encoding over the bounded interval grid."""
    fn = pair_encode(alphabet)
    grid = enumerate_intervals(alphabet, bound)
    return frozenset(fn(u, v) for u in grid for v in grid)


def _process_factory(alphabet: tuple[str, ...], bound: int) -> Combiner:
    return Combiner("process", 2, pair_encode(alphabet))


def _relay_factory(alphabet: tuple[str, ...], bound: int) -> Combiner:
    """Identity on pair-encoded values, empty elsewhere.

    Lets a machine forward summaries it recognizes while staying finite
    state: the recognized set is exactly the bounded image of process.
    """
    images = pair_encode_images(alphabet, bound)

    def fn(v: Interval) -> Interval:
        return v if v in images else EMPTY_INTERVAL

    return Combiner("relay", 1, fn, source_values=images)


COMBINERS.register("process", _process_factory)
COMBINERS.register("relay", _relay_factory)


# ----------------------------------------------------------------------
# invariants
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Invariant:
    """A named sliding-window predicate over a set of channels.

    The predicate is evaluated at every tick k with k + window <= horizon on
    the window-sized slices of the referenced channels; the invariant holds
    on a tuple when every window passes.  extra_values, when present, names
    interval values beyond the bounded grid that enumeration over a channel
    must include for the predicate to be satisfiable at all.
    """

    name: str
    channels: tuple[str, ...]
    window: int
    predicate: Callable[[int, Mapping[str, tuple[Interval, ...]]], bool]
    extra_values: Callable[
        [tuple[str, ...], int], Mapping[str, frozenset[Interval]]
    ] | None = None

    def first_violation(self, t: StreamTuple) -> int | None:
        horizon = t.horizon or 0
        for k in range(horizon - self.window + 1):
            window = t.window(k, self.window)
            slices = {ch: window[ch] for ch in self.channels}
            if not self.predicate(k, slices):
                return k
        return None

    def holds(self, t: StreamTuple) -> bool:
        return self.first_violation(t) is None

    def value_domains(
        self, alphabet: tuple[str, ...], bound: int
    ) -> dict[str, frozenset[Interval]]:
        if self.extra_values is None:
            return {}
        return dict(self.extra_values(alphabet, bound))


INVARIANTS = Registry("invariant")


def make_summary_invariant(
    name: str,
    alphabet: tuple[str, ...] = ("a", "b"),
    shifted: bool = False,
) -> Invariant:
    """Relates a reports channel to the encoded pair of the previous tick.

    The shipped form requires reports at tick k+1 to equal the pair encoding
    of ordpay' and progress at tick k.  The shifted variant demands the same
    at tick k itself, which no causal producer can satisfy; it exists as a
    deliberately falsified twin.
    """
    fn = pair_encode(alphabet)

    def extra(alpha: tuple[str, ...], bound: int):
        return {"reports": pair_encode_images(alpha, bound)}

    if shifted:
        def predicate(k, slices):
            return slices["reports"][0] == fn(
                slices["ordpay'"][0], slices["progress"][0]
            )

        return Invariant(name, ("ordpay'", "progress", "reports"), 1, predicate, extra)

    def predicate(k, slices):
        return slices["reports"][1] == fn(
            slices["ordpay'"][0], slices["progress"][0]
        )

    return Invariant(name, ("ordpay'", "progress", "reports"), 2, predicate, extra)


INVARIANTS.register("true", Invariant("true", (), 1, lambda k, slices: True))
INVARIANTS.register("summary", make_summary_invariant("summary"))
INVARIANTS.register(
    "summary_at_k", make_summary_invariant("summary_at_k", shifted=True)
)
