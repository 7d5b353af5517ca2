"""Nondeterministic and randomized monotone decision trees."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .boolfn import MAX_N, ArityError, TruthTable
from .circuits import CircuitBuilder, _fischer, mdt_from_circuit, simplify
from .decomp import MonotoneDecomposition, alternation_decomposition
from .models import (
    Leaf,
    ModelError,
    MonotoneDecisionTree,
    Node,
    _check_monotone,
    flip_leaves,
)
from .queries import Query, TableQuery, const_query

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)


# -- nondeterministic trees ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class M1Node:
    """Edges are (query, polarity, child); polarity 1 is active when the query is 1."""

    edges: tuple[tuple[Query, int, object], ...]


@dataclass(frozen=True, eq=False)
class M2Node:
    """Node labeled by a query; edges are (label, child), active when label = query(x)."""

    query: Query
    edges: tuple[tuple[int, object], ...]


@dataclass(frozen=True)
class NondetMDT_M1:
    n: int
    root: object

    def __post_init__(self):
        _check_monotone(list(_nondet_queries(self.root)), self.n)

    @property
    def height(self) -> int:
        return _nondet_height(self.root)

    @property
    def branch_count(self) -> int:
        return len(self.root.edges) if isinstance(self.root, M1Node) else 0


@dataclass(frozen=True)
class NondetMDT_M2:
    n: int
    root: object

    def __post_init__(self):
        _check_monotone(list(_nondet_queries(self.root)), self.n)

    @property
    def height(self) -> int:
        return _nondet_height(self.root)


def _nondet_queries(node) -> Iterator[Query]:
    if isinstance(node, M1Node):
        for q, _, child in node.edges:
            yield q
            yield from _nondet_queries(child)
    elif isinstance(node, M2Node):
        yield node.query
        for _, child in node.edges:
            yield from _nondet_queries(child)


def _nondet_height(node) -> int:
    if isinstance(node, Leaf):
        return 0
    kids = [e[-1] for e in node.edges]
    return 1 + max(map(_nondet_height, kids)) if kids else 0


def nmdt_eval(tree, x: int) -> int:
    """1 iff some root-to-1-leaf path has every edge active."""

    def accepts(node) -> bool:
        if isinstance(node, Leaf):
            return node.label == 1
        if isinstance(node, M1Node):
            return any(q(x) == pol and accepts(child) for q, pol, child in node.edges)
        v = node.query(x)
        return any(lab == v and accepts(child) for lab, child in node.edges)

    return int(accepts(tree.root))


def nmdt_table(tree) -> TruthTable:
    return TruthTable(tree.n, sum(nmdt_eval(tree, x) << x for x in range(1 << tree.n)))


def nmdt_build(f: TruthTable, max_n: int = MAX_N) -> NondetMDT_M1:
    """Height-2 tree: one branch ~f_{2i-1} -> f_{2i} -> 1 per pair of components."""
    d = alternation_decomposition(f, max_n)
    if not d.components:
        # constant 0: keep the height-2 shape with a branch that never fires
        zero = TruthTable.const(f.n, 0)
        d = MonotoneDecomposition((zero, zero), f)
    comps = d.padded_even().components
    branches = []
    for i in range(0, len(comps), 2):
        inner = M1Node(((TableQuery(comps[i + 1]), 1, Leaf(1)),))
        branches.append((TableQuery(comps[i]), 0, inner))
    return NondetMDT_M1(f.n, M1Node(tuple(branches)))


def m2_to_m1(tree: NondetMDT_M2) -> NondetMDT_M1:
    def conv(node):
        if isinstance(node, Leaf):
            return node
        return M1Node(tuple((node.query, lab, conv(child)) for lab, child in node.edges))

    return NondetMDT_M1(tree.n, conv(tree.root))


def m1_to_m2(tree: NondetMDT_M1) -> NondetMDT_M2:
    """Each edge becomes an always-active edge into a node that asks the edge's query."""
    one = const_query(tree.n, 1)

    def conv(node):
        if isinstance(node, Leaf):
            return node
        edges = tuple((1, M2Node(q, ((pol, conv(child)),))) for q, pol, child in node.edges)
        return M2Node(one, edges)

    return NondetMDT_M2(tree.n, conv(tree.root))


# -- randomized trees ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coin:
    child0: object
    child1: object


@dataclass(frozen=True, eq=False)
class QSet:
    queries: tuple[Query, ...]
    child0: object
    child1: object


RNode = Union[Leaf, Node, Coin]


@dataclass(frozen=True)
class RandomizedMDT:
    n: int
    root: object

    def __post_init__(self):
        qs = list(_rqueries(self.root))
        if any(q.n != self.n for q in qs):
            raise ArityError("query arity differs from tree arity")
        _check_monotone(qs, self.n)

    @property
    def height(self) -> int:
        return _rheight(self.root)

    @property
    def coin_count(self) -> int:
        return _count_coins(self.root)


def _rqueries(node) -> Iterator[Query]:
    if isinstance(node, Node):
        yield node.query
    elif isinstance(node, QSet):
        yield from node.queries
    if not isinstance(node, Leaf):
        yield from _rqueries(node.child0)
        yield from _rqueries(node.child1)


def _rheight(node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_rheight(node.child0), _rheight(node.child1))


def _count_coins(node) -> int:
    if isinstance(node, Leaf):
        return 0
    return int(isinstance(node, Coin)) + _count_coins(node.child0) + _count_coins(node.child1)


def from_mdt(tree: MonotoneDecisionTree) -> RandomizedMDT:
    return RandomizedMDT(tree.n, tree.root)


@dataclass(frozen=True)
class LeafRecord:
    label: int
    coins: int
    passed: tuple[Query, ...]
    failed: tuple[Query, ...]

    def characteristic(self, x: int) -> int:
        return int(all(q(x) for q in self.passed) and not any(q(x) for q in self.failed))


def leaf_records(tree: RandomizedMDT) -> list[LeafRecord]:
    """Leaves left to right with coin counts and passed/failed queries on their paths."""
    out: list[LeafRecord] = []

    def walk(node, coins, passed, failed):
        if isinstance(node, Leaf):
            out.append(LeafRecord(node.label, coins, passed, failed))
        elif isinstance(node, Coin):
            walk(node.child0, coins + 1, passed, failed)
            walk(node.child1, coins + 1, passed, failed)
        elif isinstance(node, Node):
            walk(node.child0, coins, passed, failed + (node.query,))
            walk(node.child1, coins, passed + (node.query,), failed)
        else:
            raise ModelError(f"unexpected node {node!r} in a randomized tree")

    walk(tree.root, 0, (), ())
    return out


def rmdt_accept_prob(tree: RandomizedMDT, x: int) -> Fraction:
    """Sum over 1-leaves of 2^-coins times the leaf's characteristic function."""
    return sum(
        (Fraction(1, 1 << r.coins) for r in leaf_records(tree) if r.label and r.characteristic(x)),
        Fraction(0),
    )


def accept_prob_by_coin_strings(tree: RandomizedMDT, x: int, max_coins: int = 20) -> Fraction:
    """Oracle: run the tree once per assignment to every coin node."""
    coins: dict[int, int] = {}

    def number(node):
        if isinstance(node, Leaf):
            return
        if isinstance(node, Coin):
            coins[id(node)] = len(coins)
        number(node.child0)
        number(node.child1)

    number(tree.root)
    total = len(coins)
    if total > max_coins:
        raise ValueError(f"{total} coins exceed the enumeration cap {max_coins}")
    hits = 0
    for s in range(1 << total):
        node = tree.root
        while not isinstance(node, Leaf):
            if isinstance(node, Coin):
                bit = (s >> coins[id(node)]) & 1
            else:
                bit = node.query(x)
            node = node.child1 if bit else node.child0
        hits += node.label
    return Fraction(hits, 1 << total)


def rmdt_computes(tree: RandomizedMDT, f: TruthTable, theta: Fraction = TWO_THIRDS) -> bool:
    theta = Fraction(theta)
    if f.n != tree.n:
        raise ArityError("function and tree arity differ")
    for x in range(f.size):
        p = rmdt_accept_prob(tree, x)
        if theta == HALF:
            if (p >= HALF) != bool(f(x)):
                return False
        elif theta == TWO_THIRDS:
            if (p if f(x) else 1 - p) < TWO_THIRDS:
                return False
        else:
            raise ValueError("theta must be 1/2 or 2/3")
    return True


def function_at_half(tree: RandomizedMDT) -> TruthTable:
    return TruthTable(
        tree.n, sum(int(rmdt_accept_prob(tree, x) >= HALF) << x for x in range(1 << tree.n))
    )


def function_at_two_thirds(tree: RandomizedMDT) -> TruthTable:
    bits = 0
    for x in range(1 << tree.n):
        p = rmdt_accept_prob(tree, x)
        if p >= TWO_THIRDS:
            bits |= 1 << x
        elif p > 1 - TWO_THIRDS:
            raise ModelError(f"acceptance probability {p} at x={x} is within the 2/3 gap")
    return TruthTable(tree.n, bits)


# -- normal forms ------------------------------------------------------------------------------------


def _max_coins(node) -> int:
    if isinstance(node, Leaf):
        return 0
    return int(isinstance(node, Coin)) + max(_max_coins(node.child0), _max_coins(node.child1))


def _equalize_coins(node, seen: int, r: int):
    if isinstance(node, Leaf):
        for _ in range(r - seen):
            node = Coin(node, node)
        return node
    if isinstance(node, Coin):
        return Coin(_equalize_coins(node.child0, seen + 1, r), _equalize_coins(node.child1, seen + 1, r))
    return Node(node.query, _equalize_coins(node.child0, seen, r), _equalize_coins(node.child1, seen, r))


def _complete(node, depth: int, height: int, one: Query):
    if isinstance(node, Leaf):
        if depth == height:
            return node
        pad = _complete(node, depth + 1, height, one)
        return Node(one, pad, pad)
    cls = Coin if isinstance(node, Coin) else None
    c0 = _complete(node.child0, depth + 1, height, one)
    c1 = _complete(node.child1, depth + 1, height, one)
    return Coin(c0, c1) if cls else Node(node.query, c0, c1)


def _fix_coins(node, bits: list[int], seen: int, zero: Query, one: Query):
    """T_s: the i-th coin on any path becomes the constant query s_i."""
    if isinstance(node, Leaf):
        return node
    c0 = _fix_coins(node.child0, bits, seen + isinstance(node, Coin), zero, one)
    c1 = _fix_coins(node.child1, bits, seen + isinstance(node, Coin), zero, one)
    if isinstance(node, Coin):
        return Node(one if bits[seen] else zero, c0, c1)
    return Node(node.query, c0, c1)


def normal_form_parts(tree: RandomizedMDT) -> tuple[int, list]:
    """Coin levels r and the 2^r deterministic subtrees T_s, indexed by s."""
    r = _max_coins(tree.root)
    root = _equalize_coins(tree.root, 0, r)
    one, zero = const_query(tree.n, 1), const_query(tree.n, 0)
    root = _complete(root, 0, _rheight(root), one)
    subtrees = []
    for s in range(1 << r):
        bits = [(s >> (r - 1 - i)) & 1 for i in range(r)]  # first coin reads the top bit
        subtrees.append(_fix_coins(root, bits, 0, zero, one))
    return r, subtrees


def rmdt_normalize(tree: RandomizedMDT) -> RandomizedMDT:
    """Equal coin counts, then a complete tree, then all coins lifted to the top."""
    r, subtrees = normal_form_parts(tree)

    def top(level: int, prefix: int):
        if level == r:
            return subtrees[prefix]
        return Coin(top(level + 1, prefix << 1), top(level + 1, (prefix << 1) | 1))

    return RandomizedMDT(tree.n, top(0, 0))


def rmdt_to_majority_form(tree: RandomizedMDT) -> list[MonotoneDecisionTree]:
    function_at_two_thirds(tree)  # raises unless every x is on one side of the gap
    _, subtrees = normal_form_parts(tree)
    return [MonotoneDecisionTree(tree.n, s) for s in subtrees]


def majority_eval(trees: list[MonotoneDecisionTree], x: int) -> int:
    from .models import mdt_eval

    ones = sum(mdt_eval(t, x) for t in trees)
    return int(2 * ones > len(trees))


# -- derandomization -----------------------------------------------------------------------------------


def _threshold_circuit(n: int, records: list[LeafRecord], h: int, k: int):
    """[sum of 2^(h-coins) * c_i >= k] with all complements from one Fischer inverter."""
    b = CircuitBuilder(n)
    passed_w, failed_w = [], []
    for rec in records:
        ps = [b.realize(q) for q in rec.passed]
        passed_w.append(b.const(1) if not ps else ps[0] if len(ps) == 1 else b.and_(ps))
        fs = [b.realize(q) for q in rec.failed]
        failed_w.append(None if not fs else fs[0] if len(fs) == 1 else b.or_(fs))
    negated = [w for w in failed_w if w is not None]
    inverted = dict(zip(negated, _fischer(b, negated)))
    args = []
    for rec, pw, fw in zip(records, passed_w, failed_w):
        c = pw if fw is None else b.and_([pw, inverted[fw]])
        args.extend([c] * (1 << (h - rec.coins)))
    out = b.th(k, args) if len(args) >= k else b.const(0)
    return simplify(b.build([out])), len(negated)


def rmdt_derandomize(tree: RandomizedMDT) -> MonotoneDecisionTree:
    """Deterministic tree, no taller than ``tree``, for x -> [Pr(accept) >= 1/2]."""
    h = tree.height
    if h == 0:
        return MonotoneDecisionTree(tree.n, tree.root)
    records = leaf_records(tree)
    ones = [r for r in records if r.label == 1]
    zeros = [r for r in records if r.label == 0]
    inputs_needed = sum(1 for r in ones if r.failed)
    if inputs_needed.bit_length() <= h - 1:
        circuit, _ = _threshold_circuit(tree.n, ones, h, 1 << (h - 1))
        out = mdt_from_circuit(circuit)
    else:
        # flipped leaves: Pr(accept) >= 1/2 iff flipped acceptance <= 1/2
        circuit, _ = _threshold_circuit(tree.n, zeros, h, (1 << (h - 1)) + 1)
        out = MonotoneDecisionTree(tree.n, flip_leaves(mdt_from_circuit(circuit).root))
    if out.height > h:
        raise ModelError(f"derandomized height {out.height} exceeds {h}")
    return out


# -- query-set trees ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class QuerySetRMDT:
    n: int
    root: object
    w: int

    def __post_init__(self):
        def check(node):
            if isinstance(node, Leaf):
                return
            if not isinstance(node, QSet) or len(node.queries) != self.w:
                raise ModelError(f"every internal node needs a query set of size {self.w}")
            check(node.child0)
            check(node.child1)

        check(self.root)
        _check_monotone(list(_rqueries(self.root)), self.n)

    @property
    def height(self) -> int:
        return _rheight(self.root)


def wrmdt_accept_prob(tree: QuerySetRMDT, x: int) -> Fraction:
    def prob(node) -> Fraction:
        if isinstance(node, Leaf):
            return Fraction(node.label)
        p1 = Fraction(sum(q(x) for q in node.queries), len(node.queries))
        return (1 - p1) * prob(node.child0) + p1 * prob(node.child1)

    return prob(tree.root)


def wrmdt_to_rmdt(tree: QuerySetRMDT) -> RandomizedMDT:
    """Each query-set node becomes k coin levels over its 2^k members."""
    w = tree.w
    if w < 1 or w & (w - 1):
        raise ValueError(f"w={w} is not a power of two")
    k = w.bit_length() - 1

    def conv(node):
        if isinstance(node, Leaf):
            return node
        left, right = conv(node.child0), conv(node.child1)

        def coins(level: int, idx: int):
            if level == k:
                return Node(node.queries[idx], left, right)
            return Coin(coins(level + 1, idx << 1), coins(level + 1, (idx << 1) | 1))

        return coins(0, 0)

    return RandomizedMDT(tree.n, conv(tree.root))


def rmdt_to_wrmdt(tree: RandomizedMDT, w: int) -> QuerySetRMDT:
    """Query q becomes w copies of q; a coin becomes w/2 zeros and w/2 ones."""
    if w < 2 or w % 2:
        raise ValueError("w must be even")
    zero, one = const_query(tree.n, 0), const_query(tree.n, 1)

    def conv(node):
        if isinstance(node, Leaf):
            return node
        qs = (zero,) * (w // 2) + (one,) * (w // 2) if isinstance(node, Coin) else (node.query,) * w
        return QSet(qs, conv(node.child0), conv(node.child1))

    return QuerySetRMDT(tree.n, conv(tree.root), w)
