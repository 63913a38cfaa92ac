import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snpforge.rng import ALGORITHM, CounterRng


def reference_u64(seed, stream, counter):
    digest = hashlib.blake2b(f"{seed}:{stream}:{counter}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def test_words_match_hash_of_counter():
    rng = CounterRng(7, "s")
    assert [rng.next_u64() for _ in range(5)] == [reference_u64(7, "s", c) for c in range(5)]
    assert ALGORITHM == "blake2b-counter-v1"


def test_streams_are_independent():
    a, b = CounterRng(1, "x"), CounterRng(1, "y")
    assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]


def test_child_stream_name():
    c = CounterRng(3, "main").child("sub")
    assert c.stream == "main/sub" and c.next_u64() == reference_u64(3, "main/sub", 0)


def test_bernoulli_edges():
    rng = CounterRng(0)
    assert not any(rng.bernoulli(0.0) for _ in range(50))
    assert all(rng.bernoulli(1.0) for _ in range(50))
    # edges consume no words
    assert rng.counter == 0


def test_randbelow_rejects_nonpositive():
    with pytest.raises(ValueError):
        CounterRng(0).randbelow(0)


@given(st.integers(0, 2**32), st.text(max_size=8), st.integers(1, 1000))
def test_randbelow_in_range_and_replayable(seed, stream, n):
    xs = [CounterRng(seed, stream).randbelow(n) for _ in range(2)]
    assert xs[0] == xs[1] and 0 <= xs[0] < n


@given(st.integers(0, 10**6))
def test_random_unit_interval(seed):
    rng = CounterRng(seed)
    assert all(0.0 <= rng.random() < 1.0 for _ in range(20))


def test_roughly_uniform():
    rng = CounterRng(11, "uniform")
    counts = [0] * 4
    for _ in range(4000):
        counts[rng.randbelow(4)] += 1
    assert all(900 < c < 1100 for c in counts)
