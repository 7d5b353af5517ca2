"""Seeded generators for random monotone functions, lists and randomized trees."""

from __future__ import annotations

import random

from .boolfn import TruthTable
from .models import Leaf, MonotoneDecisionList, Node
from .queries import TableQuery, const_query
from .stochastic import Coin, QSet, QuerySetRMDT, RandomizedMDT


def random_monotone(n: int, rng: random.Random) -> TruthTable:
    """OR of up to three random variable conjunctions, or occasionally a constant."""
    roll = rng.random()
    if roll < 0.1 or n == 0:
        return TruthTable.const(n, rng.randrange(2))
    bits = 0
    for _ in range(rng.randint(1, 3)):
        term = TruthTable.const(n, 1)
        for i in range(1, n + 1):
            if rng.random() < 0.4:
                term = term & TruthTable.var(n, i)
        bits |= term.bits
    return TruthTable(n, bits)


def random_mdl(n: int, length: int, rng: random.Random) -> MonotoneDecisionList:
    nodes = [(TableQuery(random_monotone(n, rng)), rng.randrange(2)) for _ in range(length - 1)]
    nodes.append((const_query(n, 1), rng.randrange(2)))
    return MonotoneDecisionList(n, tuple(nodes))


def random_rmdt(
    n: int, height: int, rng: random.Random, coin_rate: float = 0.3, max_coins: int = 10
) -> RandomizedMDT:
    budget = [max_coins]

    def grow(h: int):
        if h == 0 or rng.random() < 0.2:
            return Leaf(rng.randrange(2))
        if budget[0] > 0 and rng.random() < coin_rate:
            budget[0] -= 1
            return Coin(grow(h - 1), grow(h - 1))
        return Node(TableQuery(random_monotone(n, rng)), grow(h - 1), grow(h - 1))

    return RandomizedMDT(n, grow(height))


def random_wrmdt(n: int, height: int, w: int, rng: random.Random) -> QuerySetRMDT:
    def grow(h: int):
        if h == 0 or rng.random() < 0.2:
            return Leaf(rng.randrange(2))
        qs = tuple(TableQuery(random_monotone(n, rng)) for _ in range(w))
        return QSet(qs, grow(h - 1), grow(h - 1))

    return QuerySetRMDT(n, grow(height), w)


def random_circuit(n: int, nots: int, size: int, rng: random.Random):
    """Single-output circuit over AND/OR/TH gates with ``nots`` NOT gates mixed in."""
    from .circuits import CircuitBuilder, simplify

    b = CircuitBuilder(n)
    wires = list(b.inputs)
    kinds = ["NOT"] * nots + ["MONO"] * max(size - nots, 1)
    rng.shuffle(kinds)
    for kind in kinds:
        if kind == "NOT":
            w = b.not_(rng.choice(wires))
        else:
            args = rng.sample(wires, min(len(wires), rng.randint(2, 3)))
            op = rng.choice(("AND", "OR", "TH"))
            if op == "AND":
                w = b.and_(args)
            elif op == "OR":
                w = b.or_(args)
            else:
                w = b.th(rng.randint(1, len(args)), args)
        wires.append(w)
    return simplify(b.build([wires[-1]]))
