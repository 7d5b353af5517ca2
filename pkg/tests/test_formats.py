import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from monodt.boolfn import TruthTable
from monodt.circuits import markov_circuit, truth_tables
from monodt.corpus import random_mdl, random_rmdt, random_wrmdt
from monodt.decomp import alternation_decomposition
from monodt.formats import (
    FormatError,
    artifact_kind,
    artifact_tables,
    dumps_model,
    loads_model,
    parse_artifact,
    serialize_artifact,
)
from monodt.models import mdt_build, mdt_from_mdl, namdt_build
from monodt.stochastic import (
    function_at_half,
    m1_to_m2,
    nmdt_build,
    nmdt_table,
    rmdt_accept_prob,
    rmdt_to_majority_form,
    wrmdt_accept_prob,
)

from conftest import tables, tt

XOR2 = tt(2, "0110")


def round_trip(model):
    text = dumps_model(model)
    back = loads_model(text)
    assert dumps_model(back) == text
    return back


@given(tables())
@settings(max_examples=50, deadline=None)
def test_deterministic_models_round_trip(f):
    for model in (mdt_build(f), namdt_build(f)):
        back = round_trip(model)
        assert back.truth_table() == f and back.height == model.height


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_list_round_trip(seed):
    rng = random.Random(seed)
    lst = random_mdl(rng.randint(0, 4), rng.randint(1, 6), rng)
    back = round_trip(lst)
    assert back.constants == lst.constants and back.truth_table() == lst.truth_table()


@given(tables())
@settings(max_examples=40, deadline=None)
def test_nondet_round_trip(f):
    t1 = nmdt_build(f)
    assert nmdt_table(round_trip(t1)) == f
    assert nmdt_table(round_trip(m1_to_m2(t1))) == f


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_randomized_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    t = random_rmdt(n, rng.randint(1, 4), rng)
    back = round_trip(t)
    assert back.coin_count == t.coin_count
    assert all(rmdt_accept_prob(back, x) == rmdt_accept_prob(t, x) for x in range(1 << n))
    q = random_wrmdt(n, rng.randint(1, 3), rng.choice([1, 2, 4]), rng)
    qb = round_trip(q)
    assert qb.w == q.w
    assert all(wrmdt_accept_prob(qb, x) == wrmdt_accept_prob(q, x) for x in range(1 << n))


def test_majority_list_round_trip():
    trees = rmdt_to_majority_form(random_rmdt(2, 0, random.Random(1)))
    back = round_trip(trees)
    assert artifact_kind(back) == "mdt_list"
    assert artifact_tables(back) == artifact_tables(trees)


def test_json_layout():
    doc = json.loads(dumps_model(mdt_build(XOR2)))
    assert doc["kind"] == "mdt" and doc["n"] == 2
    assert "queries" in doc and "root" in doc


@pytest.mark.parametrize(
    "text",
    [
        '{"kind": "nope", "n": 2}',
        '{"kind": "mdt", "n": 2',
        '{"kind": "mdt", "n": 2, "queries": [], "root": {"q": 5, "c0": {"leaf": 0}, "c1": {"leaf": 1}}}',
    ],
)
def test_bad_json(text):
    with pytest.raises((FormatError, ValueError)):
        parse_artifact(text)


def test_sniffing():
    assert artifact_kind(parse_artifact("n=2\n6\n")) == "table"
    decomp = serialize_artifact(alternation_decomposition(XOR2))
    assert artifact_kind(parse_artifact(decomp)) == "decomposition"
    assert artifact_kind(parse_artifact("INPUTS 2\ng1=AND(x1,x2)\nOUTPUTS g1\n")) == "circuit"
    assert artifact_kind(parse_artifact(dumps_model(mdt_from_mdl(random_mdl(2, 3, random.Random(0)))))) == "mdt"


def test_artifact_tables_agree():
    c, _ = markov_circuit(XOR2)
    for obj in (XOR2, alternation_decomposition(XOR2), c, mdt_build(XOR2), nmdt_build(XOR2)):
        assert artifact_tables(parse_artifact(serialize_artifact(obj))) == [XOR2]
    assert truth_tables(parse_artifact(serialize_artifact(c))) == [XOR2]


def test_randomized_reduces_at_half():
    t = random_rmdt(2, 3, random.Random(5))
    assert artifact_tables(t) == [function_at_half(t)]


def test_arity_cap_applies():
    with pytest.raises(Exception):
        parse_artifact(serialize_artifact(TruthTable.const(5, 1)), max_n=3)
