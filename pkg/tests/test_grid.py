import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from evosum.errors import DuplicateMessageError, UnknownSourceError
from evosum.grid import Grid, build_grid, horizontal_slice, vertical_slice
from evosum.schema import UNFILLED, Message
from helpers import random_messages


@pytest.fixture(scope="module")
def synthetic_grid(noiseless):
    return build_grid(noiseless.gold_messages, noiseless.corpus.sources)


def test_noiseless_grid_shape(synthetic_grid, noiseless):
    assert len(noiseless.corpus) == 90
    assert synthetic_grid.time_range == (1, 30)
    assert synthetic_grid.sources == ("A", "B", "C")


def test_horizontal_slice_round5(synthetic_grid, noiseless):
    hs = horizontal_slice(synthetic_grid, 5)
    # oracle: count the generator's gold messages for round 5 per source
    want = {}
    for m in noiseless.gold_messages:
        if m.time == 5:
            want[m.source] = want.get(m.source, 0) + 1
    assert {s: len(v) for s, v in hs.items()} == want
    assert list(hs) == ["A", "B", "C"]


def test_vertical_slice(synthetic_grid):
    vs = vertical_slice(synthetic_grid, "A")
    assert sorted(vs) == list(range(1, 31))
    with pytest.raises(UnknownSourceError):
        vertical_slice(synthetic_grid, "Z")


def test_outside_time_range(synthetic_grid):
    assert horizontal_slice(synthetic_grid, 99) == {}


def test_empty_grid():
    g = build_grid([])
    assert len(g) == 0 and g.time_range is None


def test_duplicates_rejected():
    m = Message.create("performance", {"entity": "X"}, 1, "A", "d", (0,))
    with pytest.raises(DuplicateMessageError):
        build_grid([m, m])


def test_undeclared_source():
    m = Message.create("performance", {"entity": "X"}, 1, "Q", "d", (0,))
    with pytest.raises(UnknownSourceError):
        build_grid([m], sources=["A"])


def test_partial_messages_excluded_by_default():
    m = Message.create("performance", {"entity": UNFILLED}, 1, "A", "d", (0,))
    assert len(build_grid([m])) == 0
    assert len(build_grid([m], include_partial=True)) == 1


def test_manifest_source_order():
    ms = [Message.create("t", {}, 1, s, s, (0,)) for s in ("A", "B", "C")]
    g = build_grid(ms, sources=["C", "A", "B"])
    assert list(horizontal_slice(g, 1)) == ["C", "A", "B"]


def test_dump_round_trip(synthetic_grid):
    again = Grid.from_dict(json.loads(json.dumps(synthetic_grid.to_dict())))
    assert list(again.messages()) == list(synthetic_grid.messages())


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 60))
def test_slices_partition(seed, n):
    from evosum import football_pack
    pack = football_pack()
    rng = random.Random(seed)
    msgs = random_messages(rng, pack.registry, pack.ontology, n)
    g = build_grid(msgs, include_partial=True)
    by_time = [m for t in g.times for ms in horizontal_slice(g, t).values() for m in ms]
    by_source = [m for s in g.sources for ms in vertical_slice(g, s).values() for m in ms]
    assert len(by_time) == len(by_source) == len(msgs)
    assert set(by_time) == set(by_source) == set(msgs)
    for t in g.times:
        assert all(m.time == t for ms in horizontal_slice(g, t).values() for m in ms)
    for s in g.sources:
        assert all(m.source == s for ms in vertical_slice(g, s).values() for m in ms)
    shuffled = list(msgs)
    rng.shuffle(shuffled)
    assert g.to_dict() == build_grid(shuffled, include_partial=True).to_dict()
