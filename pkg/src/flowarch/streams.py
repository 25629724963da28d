"""Finite-horizon timed streams and named stream tuples.

A timed stream over a horizon H is a sequence of H intervals; each interval
is a finite sequence of messages transmitted during one clock tick.  A named
stream tuple assigns one stream to every channel of a finite channel set,
with all streams sharing the same horizon.  Exhaustive enumeration is bounded
by a per-interval message count so every check below stays finite.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import (
    AlphabetError,
    DomainError,
    HorizonError,
    MergeConflictError,
)

Interval = tuple[str, ...]
TimedStream = tuple[Interval, ...]

EMPTY_INTERVAL: Interval = ()

# Channel, component, state and message names all share one grammar.  The
# trailing prime is allowed so names like ordpay' survive round-trips.
_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


def check_identifier(name: str) -> str:
    if not is_identifier(name):
        raise DomainError(f"invalid identifier: {name!r}")
    return name


@dataclass(frozen=True, order=True)
class StreamTuple:
    """A total map from channel names to streams of equal horizon.

    Entries are kept sorted by channel name, so structural equality and
    hashing coincide with extensional equality of the map, and tuples
    order lexicographically by their sorted entries.
    """

    entries: tuple[tuple[str, TimedStream], ...]

    def __post_init__(self):
        names = [name for name, _ in self.entries]
        if names != sorted(names):
            object.__setattr__(self, "entries", tuple(sorted(self.entries)))
            names = sorted(names)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate channels in stream tuple: {names}")
        horizons = {len(stream) for _, stream in self.entries}
        if len(horizons) > 1:
            raise HorizonError(f"streams have unequal horizons: {horizons}")

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[Iterable[str]]]) -> "StreamTuple":
        entries = tuple(
            (name, tuple(tuple(iv) for iv in stream))
            for name, stream in sorted(mapping.items())
        )
        return cls(entries)

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    @property
    def horizon(self) -> int | None:
        """Shared horizon, or None for the tuple over no channels."""
        if not self.entries:
            return None
        return len(self.entries[0][1])

    def stream(self, channel: str) -> TimedStream:
        for name, s in self.entries:
            if name == channel:
                return s
        raise DomainError(f"channel {channel!r} not in tuple domain")

    def as_dict(self) -> dict[str, TimedStream]:
        return dict(self.entries)

    def tick(self, k: int) -> dict[str, Interval]:
        """The intervals of every channel at tick k."""
        h = self.horizon
        if h is not None and not 0 <= k < h:
            raise HorizonError(f"tick {k} outside horizon {h}")
        return {name: s[k] for name, s in self.entries}

    def window(self, k: int, width: int) -> dict[str, tuple[Interval, ...]]:
        """Slices of width consecutive intervals starting at tick k."""
        h = self.horizon if self.horizon is not None else 0
        if k < 0 or k + width > h:
            raise HorizonError(f"window [{k}, {k + width}) outside horizon {h}")
        return {name: s[k : k + width] for name, s in self.entries}


EMPTY_TUPLE = StreamTuple(())


def prefix(stream: TimedStream, i: int) -> TimedStream:
    """First i intervals of a stream; i may not exceed the horizon."""
    if not 0 <= i <= len(stream):
        raise HorizonError(f"prefix length {i} outside horizon {len(stream)}")
    return stream[:i]


def tuple_prefix(t: StreamTuple, i: int) -> StreamTuple:
    return StreamTuple(tuple((name, prefix(s, i)) for name, s in t.entries))


def restrict(t: StreamTuple, channels: Iterable[str]) -> StreamTuple:
    """Sub-tuple over the given channels, which must lie in the domain."""
    wanted = frozenset(channels)
    missing = wanted - set(t.channels)
    if missing:
        raise DomainError(f"channels not in tuple domain: {sorted(missing)}")
    return StreamTuple(tuple(e for e in t.entries if e[0] in wanted))


def merge(t1: StreamTuple, t2: StreamTuple) -> StreamTuple:
    """Union of two tuples; shared channels must carry equal streams."""
    d1, d2 = t1.as_dict(), t2.as_dict()
    for name in d1.keys() & d2.keys():
        if d1[name] != d2[name]:
            raise MergeConflictError(f"tuples disagree on channel {name!r}")
    if (
        t1.horizon is not None
        and t2.horizon is not None
        and t1.horizon != t2.horizon
    ):
        raise HorizonError(
            f"cannot merge horizons {t1.horizon} and {t2.horizon}"
        )
    d1.update(d2)
    return StreamTuple(tuple(sorted(d1.items())))


def check_alphabet(interval: Iterable[str], alphabet: tuple[str, ...]) -> Interval:
    iv = tuple(interval)
    for sym in iv:
        if sym not in alphabet:
            raise AlphabetError(f"message {sym!r} outside alphabet {alphabet}")
    return iv


def interval_key(interval: Interval, alphabet: tuple[str, ...]):
    """Canonical sort key: by length, then by alphabet position."""
    try:
        return (len(interval), tuple(alphabet.index(s) for s in interval))
    except ValueError:
        raise AlphabetError(
            f"interval {interval} outside alphabet {alphabet}"
        ) from None


def enumerate_intervals(alphabet: tuple[str, ...], bound: int) -> list[Interval]:
    """All intervals of length at most bound, in canonical order."""
    out: list[Interval] = []
    for length in range(bound + 1):
        out.extend(itertools.product(alphabet, repeat=length))
    return out


def enumerate_streams(
    alphabet: tuple[str, ...], horizon: int, bound: int
) -> list[TimedStream]:
    """All streams of the given horizon with intervals of length <= bound."""
    ivs = enumerate_intervals(alphabet, bound)
    return [tuple(combo) for combo in itertools.product(ivs, repeat=horizon)]


def iter_tuples(
    channels: Iterable[str],
    alphabet: tuple[str, ...],
    horizon: int,
    bound: int,
) -> Iterator[StreamTuple]:
    """Lazily enumerate every stream tuple over the channel set.

    The result has exactly (sum of |alphabet|^k for k <= bound) raised to
    (horizon * |channels|) elements; the sole tuple over no channels is the
    empty tuple.
    """
    names = sorted(set(channels))
    streams = enumerate_streams(alphabet, horizon, bound)
    for combo in itertools.product(streams, repeat=len(names)):
        yield StreamTuple(tuple(zip(names, combo)))


def enumerate_tuples(
    channels: Iterable[str],
    alphabet: tuple[str, ...],
    horizon: int,
    bound: int,
) -> list[StreamTuple]:
    return list(iter_tuples(channels, alphabet, horizon, bound))


def tuple_space_size(
    n_channels: int, alphabet_size: int, horizon: int, bound: int
) -> int:
    """Cardinality of the bounded tuple space, without enumerating it."""
    per_interval = sum(alphabet_size**k for k in range(bound + 1))
    return per_interval ** (horizon * n_channels)
