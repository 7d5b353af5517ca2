"""Monotone decision lists and trees, their normal forms and conversions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

from .boolfn import MAX_N, ArityError, TruthTable, alternation
from .decomp import MonotoneDecomposition, alternation_decomposition, implication_holds
from .queries import AndQuery, OrQuery, Query, TableQuery, as_query, const_query, is_const

# materialize queries for invariant checks only up to this arity
CHECK_MAX_N = 16


class ModelError(ValueError):
    pass


def _check_monotone(queries, n):
    if n <= CHECK_MAX_N:
        for q in queries:
            if not q.is_monotone():
                raise ModelError(f"query {q!r} is not monotone")


# -- decision lists ------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneDecisionList:
    n: int
    nodes: tuple[tuple[Query, int], ...]

    def __post_init__(self):
        nodes = tuple((as_query(q), int(c)) for q, c in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not nodes:
            raise ModelError("empty decision list")
        for q, c in nodes:
            if q.n != self.n:
                raise ArityError(f"query arity {q.n} differs from list arity {self.n}")
            if c not in (0, 1):
                raise ModelError(f"node constant must be 0/1, got {c}")
        if self.n <= CHECK_MAX_N and not is_const(nodes[-1][0], 1):
            raise ModelError("last query must be the constant-1 function")
        _check_monotone([q for q, _ in nodes], self.n)

    def __len__(self):
        return len(self.nodes)

    @property
    def queries(self) -> list[Query]:
        return [q for q, _ in self.nodes]

    @property
    def constants(self) -> list[int]:
        return [c for _, c in self.nodes]

    def truth_table(self) -> TruthTable:
        full = (1 << (1 << self.n)) - 1
        bits = 0
        for q, c in reversed(self.nodes):
            qb = q.table.bits
            bits = (qb if c else 0) | (bits & (full ^ qb))
        return TruthTable(self.n, bits)


def mdl_eval(lst: MonotoneDecisionList, x: int) -> int:
    for q, c in lst.nodes:
        if q(x):
            return c
    raise ModelError("no node activated; list lacks a constant-1 tail")


def is_forward_firing(lst: MonotoneDecisionList) -> bool:
    return implication_holds([q.table for q in lst.queries])


def mdl_normalize_alternating(lst: MonotoneDecisionList) -> MonotoneDecisionList:
    """Merge maximal runs of equal constants into one node with the OR query."""
    out = []
    run: list[Query] = []
    for i, (q, c) in enumerate(lst.nodes):
        run.append(q)
        if i + 1 == len(lst.nodes) or lst.nodes[i + 1][1] != c:
            out.append((run[0] if len(run) == 1 else OrQuery(run), c))
            run = []
    return MonotoneDecisionList(lst.n, tuple(out))


def mdl_normalize_forward_firing(lst: MonotoneDecisionList) -> MonotoneDecisionList:
    """Replace query i by the OR of queries 1..i (no-op if already firing forward)."""
    if lst.n <= CHECK_MAX_N and is_forward_firing(lst):
        return lst
    out = []
    prefix: list[Query] = []
    for q, c in lst.nodes:
        prefix.append(q)
        out.append((q if len(prefix) == 1 else OrQuery(list(prefix)), c))
    return MonotoneDecisionList(lst.n, tuple(out))


def mdl_from_decomposition(d: MonotoneDecomposition) -> MonotoneDecisionList:
    comps = list(d.components)
    n = d.n
    if not implication_holds(comps):
        raise ModelError("decomposition violates the implication chain")
    if d.xor() != d.target:
        raise ModelError("decomposition does not XOR to its target")
    m = len(comps)
    # first passing component j leaves m - j ones in the sorted value vector
    nodes = [(TableQuery(c), (m - j) % 2) for j, c in enumerate(comps)]
    if not comps or comps[-1].bits != comps[-1].mask:
        nodes.append((const_query(n, 1), 0))
    return MonotoneDecisionList(n, tuple(nodes))


# -- decision trees --------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True, eq=False)
class Node:
    query: Query
    child0: "TreeNode"
    child1: "TreeNode"


TreeNode = Union[Leaf, Node]


@dataclass(frozen=True)
class MonotoneDecisionTree:
    n: int
    root: TreeNode

    def __post_init__(self):
        qs = list(iter_queries(self.root))
        for q in qs:
            if q.n != self.n:
                raise ArityError("query arity differs from tree arity")
        _check_monotone(qs, self.n)

    @property
    def height(self) -> int:
        return node_height(self.root)

    def truth_table(self) -> TruthTable:
        return TruthTable(self.n, _tree_bits(self.root, (1 << (1 << self.n)) - 1))


def iter_queries(node) -> Iterator[Query]:
    if isinstance(node, Node):
        yield node.query
        yield from iter_queries(node.child0)
        yield from iter_queries(node.child1)


def node_height(node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(node_height(node.child0), node_height(node.child1))


def _tree_bits(node, full: int) -> int:
    if isinstance(node, Leaf):
        return full if node.label else 0
    qb = node.query.table.bits
    return (_tree_bits(node.child1, full) & qb) | (_tree_bits(node.child0, full) & (full ^ qb))


def mdt_eval(tree: MonotoneDecisionTree, x: int) -> int:
    node = tree.root
    while isinstance(node, Node):
        node = node.child1 if node.query(x) else node.child0
    return node.label


def mdt_height(tree: MonotoneDecisionTree) -> int:
    return tree.height


def flip_leaves(node):
    if isinstance(node, Leaf):
        return Leaf(1 - node.label)
    return Node(node.query, flip_leaves(node.child0), flip_leaves(node.child1))


def mdt_from_mdl(lst: MonotoneDecisionList) -> MonotoneDecisionTree:
    """Binary search for the activated node of a forward-firing list."""
    lst = mdl_normalize_forward_firing(lst)
    nodes = lst.nodes

    def build(lo: int, hi: int):  # 0-based inclusive range of candidate nodes
        if lo == hi:
            return Leaf(nodes[lo][1])
        mid = (lo + hi) // 2
        # query fails: activated node lies to the right
        return Node(nodes[mid][0], build(mid + 1, hi), build(lo, mid))

    return MonotoneDecisionTree(lst.n, build(0, len(nodes) - 1))


def leaf_paths(node, path=()) -> Iterator[tuple[tuple[tuple[Query, int], ...], Leaf]]:
    """Leaves right to left, each with its (query, branch) path."""
    if isinstance(node, Leaf):
        yield path, node
        return
    yield from leaf_paths(node.child1, path + ((node.query, 1),))
    yield from leaf_paths(node.child0, path + ((node.query, 0),))


def mdl_from_mdt(tree: MonotoneDecisionTree) -> MonotoneDecisionList:
    nodes = []
    for path, leaf in leaf_paths(tree.root):
        passed = [q for q, b in path if b]
        nodes.append((AndQuery(passed, tree.n), leaf.label))
    return MonotoneDecisionList(tree.n, tuple(nodes))


def optimal_mdt_height(alt: int) -> int:
    return math.ceil(math.log2(alt + 1)) if alt > 0 else 0


def mdt_build(f: TruthTable, max_n: int = MAX_N) -> MonotoneDecisionTree:
    return mdt_from_mdl(mdl_from_decomposition(alternation_decomposition(f, max_n)))


# -- non-adaptive trees ----------------------------------------------------------


@dataclass(frozen=True)
class NonAdaptiveMDT:
    n: int
    queries: tuple[Query, ...]
    leaf_labels: int  # bit r holds the label for result string r (query 1 = LSB)

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(as_query(q) for q in self.queries))
        _check_monotone(self.queries, self.n)

    @property
    def height(self) -> int:
        return len(self.queries)

    def result_index(self, x: int) -> int:
        return sum(q(x) << j for j, q in enumerate(self.queries))

    def truth_table(self) -> TruthTable:
        return TruthTable(
            self.n, sum(self(x) << x for x in range(1 << self.n))
        )

    def __call__(self, x: int) -> int:
        return (self.leaf_labels >> self.result_index(x)) & 1


def namdt_eval(t: NonAdaptiveMDT, x: int) -> int:
    return t(x)


def namdt_build(f: TruthTable, max_n: int = MAX_N) -> NonAdaptiveMDT:
    d = alternation_decomposition(f, max_n)
    comps = d.components[:-1] if f(0) else d.components
    h = len(comps)
    flip = f(0)
    labels = sum(((bin(r).count("1") & 1) ^ flip) << r for r in range(1 << h))
    return NonAdaptiveMDT(f.n, tuple(TableQuery(c) for c in comps), labels)


# -- certificates ------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateSet:
    functions: tuple[Query, ...]
    anchor: int | None = None

    def __len__(self):
        return len(self.functions)


def adaptive_certificate(f: TruthTable, x: int) -> CertificateSet:
    """AND of the variables set in x and OR of the variables clear in x."""
    n = f.n
    ones = [TableQuery(TruthTable.var(n, i + 1)) for i in range(n) if (x >> i) & 1]
    zeros = [TableQuery(TruthTable.var(n, i + 1)) for i in range(n) if not (x >> i) & 1]
    return CertificateSet((AndQuery(ones, n), OrQuery(zeros, n)), anchor=x)


def nonadaptive_certificate(f: TruthTable, max_n: int = MAX_N) -> CertificateSet:
    return CertificateSet(namdt_build(f, max_n).queries)


def verify_certificate(f: TruthTable, cert: CertificateSet, anchor: int | None = None) -> bool:
    if anchor is None:
        anchor = cert.anchor
    full = f.mask
    if anchor is not None:
        agree = full
        for q in cert.functions:
            qb = q.table.bits
            agree &= qb if (qb >> anchor) & 1 else full ^ qb
        hit = f.bits & agree
        return hit == 0 or hit == agree
    seen: dict[tuple[int, ...], int] = {}
    tables = [q.table.bits for q in cert.functions]
    for x in range(f.size):
        sig = tuple((b >> x) & 1 for b in tables)
        v = f(x)
        if seen.setdefault(sig, v) != v:
            return False
    return True


def check_alt_height(f: TruthTable, height: int) -> bool:
    """Lower-bound sanity: a height-h tree computes only f with alt(f) <= 2^h."""
    return alternation(f) <= 2 ** height
