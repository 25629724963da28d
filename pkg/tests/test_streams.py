from __future__ import annotations

import pytest

from flowarch.errors import (
    AlphabetError,
    DomainError,
    HorizonError,
    MergeConflictError,
)
from flowarch.streams import (
    EMPTY_INTERVAL,
    StreamTuple,
    check_alphabet,
    enumerate_intervals,
    interval_key,
    is_identifier,
    iter_tuples,
    merge,
    restrict,
    tuple_space_size,
)


def test_enumerate_intervals_order_and_count():
    assert enumerate_intervals(("a", "b"), 1) == [(), ("a",), ("b",)]
    assert enumerate_intervals(("a",), 2) == [(), ("a",), ("a", "a")]
    # sum over k <= 2 of 2^k = 7
    assert len(enumerate_intervals(("a", "b"), 2)) == 7


def test_interval_key_orders_by_length_then_symbols():
    grid = enumerate_intervals(("a", "b"), 2)
    keys = [interval_key(iv, ("a", "b")) for iv in grid]
    assert keys == sorted(keys)


def test_identifiers():
    assert is_identifier("ordpay'")
    assert is_identifier("C1")
    assert is_identifier("a_b'c")
    assert not is_identifier("1x")
    assert not is_identifier("")
    assert not is_identifier("has space")
    assert not is_identifier("dash-ed")


def test_check_alphabet_rejects_foreign_symbols():
    assert check_alphabet(("a", "b"), ("a", "b")) == ("a", "b")
    with pytest.raises(AlphabetError):
        check_alphabet(("c",), ("a", "b"))


def test_stream_tuple_sorts_and_validates():
    t = StreamTuple((("q", ((), ("a",))), ("p", (("a",), ()))))
    assert t.channels == ("p", "q")
    assert t.horizon == 2
    assert t.tick(0) == {"p": ("a",), "q": ()}
    assert t.tick(1) == {"p": (), "q": ("a",)}


def test_stream_tuple_rejects_mixed_horizons():
    with pytest.raises(HorizonError):
        StreamTuple((("p", ((),)), ("q", ((), ()))))


def test_stream_tuple_rejects_duplicate_channels():
    with pytest.raises(DomainError):
        StreamTuple((("p", ((),)), ("p", ((),))))


def test_window_slices_consecutive_ticks():
    t = StreamTuple((("p", (("a",), (), ("b",))),))
    assert t.window(0, 2) == {"p": (("a",), ())}
    assert t.window(1, 2) == {"p": ((), ("b",))}


def test_restrict_and_merge_roundtrip():
    t = StreamTuple((("p", (("a",),)), ("q", ((),))))
    p_only = restrict(t, {"p"})
    q_only = restrict(t, {"q"})
    assert p_only.channels == ("p",)
    assert merge(p_only, q_only) == t


def test_merge_allows_agreement_rejects_conflict():
    t = StreamTuple((("p", (("a",),)),))
    assert merge(t, t) == t
    other = StreamTuple((("p", (("b",),)),))
    with pytest.raises(MergeConflictError):
        merge(t, other)


def test_iter_tuples_counts_match_formula():
    # one channel, singleton alphabet, one tick: <> and <a>
    assert len(list(iter_tuples({"p"}, ("a",), 1, 1))) == 2
    assert tuple_space_size(1, 1, 1, 1) == 2
    # one channel, two symbols, two ticks: 3 intervals per tick
    assert len(list(iter_tuples({"p"}, ("a", "b"), 2, 1))) == 9
    assert tuple_space_size(1, 2, 2, 1) == 9
    # two channels
    assert len(list(iter_tuples({"p", "q"}, ("a", "b"), 2, 1))) == 81
    assert tuple_space_size(2, 2, 2, 1) == 81


def test_iter_tuples_is_sorted_and_duplicate_free():
    seen = list(iter_tuples({"p", "q"}, ("a",), 2, 1))
    assert len(set(seen)) == len(seen)
    assert seen == sorted(seen)


def test_empty_interval_constant():
    assert EMPTY_INTERVAL == ()
