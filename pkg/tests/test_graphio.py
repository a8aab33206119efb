from __future__ import annotations

import pytest
from hypothesis import given

from decaylaw.errors import InvalidInput
from decaylaw.graphio import file_digest, format_graph, format_pair, parse_graph_text, read_graph, write_graph
from decaylaw.patterns import BUILTIN, load_pattern
from decaylaw.structures import Pair, Structure

from strategies import plain_structures, successor_structures

TEXT = """\
# a small host
model m1
n 4
alpha 7/10
edge 1 3
succ 1 2
succ 2 3
succ 3 4
pf 1
"""


def test_parse_example():
    gf = parse_graph_text(TEXT)
    assert gf.model == "m1" and gf.alpha == "7/10"
    assert gf.structure.edges.tolist() == [[1, 3]]
    assert gf.structure.succ == ((1, 2), (2, 3), (3, 4))
    assert gf.ignored == ("pf 1",)
    assert gf.base is None


@pytest.mark.parametrize("text", [
    "edge 1 2\n",                 # no n
    "n 3\nedge 2 1\n",            # i > j
    "n 3\nfoo 1\n",               # unknown directive
    "n 3\nedge 1\n",              # malformed
    "n 3\nkind plain\nsucc 1 2\n",
    "model m7\nn 3\n",
])
def test_parse_errors(text):
    with pytest.raises(InvalidInput):
        parse_graph_text(text)


def test_pair_file_roundtrip(tmp_path):
    pair = BUILTIN["path2"]
    path = tmp_path / "p.txt"
    path.write_text(format_pair(pair))
    name, loaded = load_pattern(str(path))
    assert name == "p" and loaded == pair


def test_unknown_pattern():
    with pytest.raises(InvalidInput):
        load_pattern("no-such-pattern")


def test_digest_stable(tmp_path):
    S = Structure(5, [(1, 2), (3, 5)])
    write_graph(tmp_path / "a", S, model="m0")
    write_graph(tmp_path / "b", S, model="m0")
    assert file_digest(tmp_path / "a") == file_digest(tmp_path / "b")
    assert read_graph(tmp_path / "a").structure == S


@given(plain_structures(max_size=8))
def test_roundtrip_plain(S):
    assert parse_graph_text(format_graph(S)).structure == S


@given(successor_structures(max_size=8))
def test_roundtrip_successor(S):
    gf = parse_graph_text(format_graph(S, base=[1]))
    assert gf.structure == S and gf.base == frozenset({1})
    assert gf.pair() == Pair(S, frozenset({1}))
