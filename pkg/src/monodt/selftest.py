"""Exhaustive and corpus-based checks behind ``monodt selftest``.

Each ``criterion_<k>`` returns a :class:`Check`.  Two scopes exist: ``quick``
(n <= 3, small corpora) and ``full`` (n <= 4 exhaustive, m <= 256 inverters).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from multiprocessing import Pool

from .boolfn import (
    TruthTable,
    alternation,
    decrease_count,
    is_monotone,
    is_uniform_alternation,
    threshold,
)
from .circuits import (
    block_inverter_negations,
    depth,
    fischer_inverter,
    invert_sorted_blocks,
    invert_sorted_log,
    markov_circuit,
    mdt_from_circuit,
    negation_count,
    negation_lower_bound,
    simulate,
    truth_table_of,
    truth_tables,
)
from .corpus import random_circuit, random_mdl, random_rmdt, random_wrmdt
from .decomp import (
    alternation_decomposition,
    implication_holds,
    threshold_interleaved_decomposition,
    uniform_chain_decomposition,
    verify_decomposition,
    xor_all,
)
from .models import (
    Leaf,
    MonotoneDecisionList,
    MonotoneDecisionTree,
    Node,
    adaptive_certificate,
    iter_queries,
    mdl_from_mdt,
    mdt_build,
    mdt_from_mdl,
    namdt_build,
    nonadaptive_certificate,
    optimal_mdt_height,
    verify_certificate,
)
from .queries import TableQuery, const_query
from .stochastic import (
    accept_prob_by_coin_strings,
    function_at_half,
    m1_to_m2,
    m2_to_m1,
    nmdt_build,
    nmdt_table,
    rmdt_accept_prob,
    rmdt_derandomize,
    wrmdt_accept_prob,
    wrmdt_to_rmdt,
)

DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Scope:
    name: str
    n_max: int
    log_inverter_m: int
    fischer_m: int
    mdl_corpus: int
    rmdt_corpus: int
    wrmdt_corpus: int
    seed: int = DEFAULT_SEED
    jobs: int = 1


def scope(level: str, seed: int = DEFAULT_SEED, jobs: int = 1) -> Scope:
    if level == "quick":
        return Scope("quick", 3, 32, 8, 100, 60, 10, seed, jobs)
    if level == "full":
        return Scope("full", 4, 256, 12, 500, 200, 30, seed, jobs)
    raise ValueError(f"unknown selftest level {level!r}")


@dataclass
class Check:
    criterion: int
    title: str
    ok: bool
    detail: str = ""
    records: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.criterion:2d}: {self.title} ({self.detail})"


# -- sweep plumbing ----------------------------------------------------------------------


def _chunks(n: int, parts: int):
    size = 1 << (1 << n)
    step = max(1, -(-size // parts))
    return [(n, lo, min(size, lo + step)) for lo in range(0, size, step)]


def _sweep(worker, n_values, jobs: int):
    """Run ``worker(n, lo, hi)`` over every function table; merge in chunk order."""
    tasks = [t for n in n_values for t in _chunks(n, max(1, jobs) * 4)]
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.starmap(worker, tasks)
    else:
        results = [worker(*t) for t in tasks]
    failures, records = [], []
    for fails, recs in results:
        failures.extend(fails)
        records.extend(recs)
    return failures, records


def _fmt_fail(failures) -> str:
    return f"{len(failures)} failures, first {failures[0]}" if failures else ""


# -- criteria 1-3: adaptive/non-adaptive trees and decompositions ----------------------


def _w_mdt(n, lo, hi):
    fails, recs = [], set()
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        k = alternation(f)
        t = mdt_build(f)
        recs.add((k, t.height))
        if t.height != optimal_mdt_height(k) or t.truth_table() != f:
            fails.append((n, hex(bits)))
    return fails, sorted(recs)


def criterion_1(sc: Scope) -> Check:
    fails, recs = _sweep(_w_mdt, [sc.n_max], sc.jobs)
    ok = not fails
    return Check(1, f"mdt_build height = ceil(log(alt+1)), all n={sc.n_max} functions", ok,
                 _fmt_fail(fails) or f"{1 << (1 << sc.n_max)} functions", recs)


def _w_namdt(n, lo, hi):
    fails = []
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        t = namdt_build(f)
        if t.height != alternation(f) or t.truth_table() != f:
            fails.append((n, hex(bits)))
    return fails, []


def criterion_2(sc: Scope) -> Check:
    fails, _ = _sweep(_w_namdt, [sc.n_max], sc.jobs)
    return Check(2, f"namdt height = alt, all n={sc.n_max} functions", not fails,
                 _fmt_fail(fails) or "exact")


def _w_decomp(n, lo, hi):
    fails = []
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        d = alternation_decomposition(f)
        rep = verify_decomposition(f, d)
        want = alternation(f) + f(0)
        if not rep.ok or len(d) != want:
            fails.append((n, hex(bits)))
    return fails, []


def criterion_3(sc: Scope) -> Check:
    fails, _ = _sweep(_w_decomp, [sc.n_max], sc.jobs)
    return Check(3, f"alternation decomposition valid and minimal, all n={sc.n_max} functions",
                 not fails, _fmt_fail(fails) or "exact")


# -- criteria 4-5: threshold-interleaved and uniform-chain decompositions -------------


def _w_threshold(n, lo, hi):
    fails = []
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        d = threshold_interleaved_decomposition(f)
        if (
            len(d) != 2 * n + 1
            or xor_all(d.components, n) != f
            or not implication_holds(d.components)
            or not all(is_monotone(c) for c in d.components)
        ):
            fails.append((n, hex(bits)))
    return fails, []


def criterion_4(sc: Scope) -> Check:
    exhaustive = [n for n in range(0, 4) if n <= sc.n_max]
    fails, _ = _sweep(_w_threshold, exhaustive, sc.jobs)
    # n = 4 (and 1..n_max generally): named functions plus a seeded sample
    rng = random.Random(sc.seed)
    sample = 0
    for n in range(1, 5):
        named = [threshold(n, k) for k in range(n + 2)]
        named += [TruthTable(n, rng.getrandbits(1 << n)) for _ in range(200)]
        for f in named:
            sample += 1
            fails += _w_threshold(n, f.bits, f.bits + 1)[0]
    return Check(4, "threshold-interleaved decomposition has 2n+1 valid parts", not fails,
                 _fmt_fail(fails) or f"exhaustive n<=3 plus {sample} sampled n<=4")


def _w_uniform(n, lo, hi):
    fails, count = [], 0
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        if not is_uniform_alternation(f):
            continue
        count += 1
        if uniform_chain_decomposition(f).components != alternation_decomposition(f).components:
            fails.append((n, hex(bits)))
    return fails, [count]


def criterion_5(sc: Scope) -> Check:
    fails, counts = _sweep(_w_uniform, range(sc.n_max + 1), sc.jobs)
    return Check(5, "uniform-chain decomposition equals the alternation decomposition",
                 not fails, _fmt_fail(fails) or f"{sum(counts)} uniform functions")


# -- criterion 6: MDL <-> MDT ---------------------------------------------------------------


def figure_one_tree() -> tuple:
    """Tree built from an 8-node forward-firing list, as a nested shape.

    A leaf is named c_j when f_j is the first passing query on its path (c_8 if none).
    """
    n = 7
    qs = [TableQuery(threshold(n, n - i)) for i in range(7)]  # f_1 => f_2 => ... => f_7
    nodes = tuple((q, i % 2) for i, q in enumerate(qs)) + ((const_query(n, 1), 1),)
    t = mdt_from_mdl(MonotoneDecisionList(n, nodes))
    index = {q: i + 1 for i, q in enumerate(qs)}

    def shape(node, passed):
        if isinstance(node, Leaf):
            return f"c{min(passed, default=8)}"
        i = index[node.query]
        return (f"f{i}", shape(node.child0, passed), shape(node.child1, passed + [i]))

    return shape(t.root, [])


FIGURE_ONE = (
    "f4",
    ("f6", ("f7", "c8", "c7"), ("f5", "c6", "c5")),
    ("f2", ("f3", "c4", "c3"), ("f1", "c2", "c1")),
)


def figure_two_list() -> list[tuple[tuple[str, ...], str]]:
    """Complete height-3 tree with queries f_1..f_7 in breadth-first order."""
    n = 7
    qs = [TableQuery(TruthTable.var(n, i + 1)) for i in range(7)]
    names = {q: f"f{i + 1}" for i, q in enumerate(qs)}

    def node(i):
        if i > 7:
            return Leaf(0)
        return Node(qs[i - 1], node(2 * i), node(2 * i + 1))

    t = MonotoneDecisionTree(n, node(1))
    lst = mdl_from_mdt(t)
    # c_j numbers the leaves left to right; mdl_from_mdt walks right to left
    out = []
    for j, (q, _) in enumerate(lst.nodes):
        parts = sorted((names[p] for p in q.parts), key=lambda s: int(s[1:]))
        out.append((tuple(parts), f"c{8 - j}"))
    return out


FIGURE_TWO_PREFIX = [
    (("f1", "f3", "f7"), "c8"),
    (("f1", "f3"), "c7"),
    (("f1", "f6"), "c6"),
    (("f1",), "c5"),
]


def criterion_6(sc: Scope) -> Check:
    rng = random.Random(sc.seed + 6)
    fails, recs = [], set()
    for i in range(sc.mdl_corpus):
        n = rng.randint(1, 5)
        lst = random_mdl(n, rng.randint(1, 9), rng)
        f = lst.truth_table()
        t = mdt_from_mdl(lst)
        back = mdl_from_mdt(t)
        again = mdt_from_mdl(back)
        recs.add((alternation(f), t.height))
        if (
            t.truth_table() != f
            or back.truth_table() != f
            or again.truth_table() != f
            or t.height > math.ceil(math.log2(len(lst)))
            or len(back) != _leaf_count(t.root)
        ):
            fails.append(i)
    fig1 = figure_one_tree() == FIGURE_ONE
    fig2_full = figure_two_list()
    fig2 = fig2_full[:4] == FIGURE_TWO_PREFIX and fig2_full[-1] == ((), "c1")
    ok = not fails and fig1 and fig2
    detail = f"{sc.mdl_corpus} lists, fig1={'match' if fig1 else 'MISMATCH'}, fig2={'match' if fig2 else 'MISMATCH'}"
    if fails:
        detail += f", {len(fails)} corpus failures"
    return Check(6, "MDT <-> MDL round trips and figure shapes", ok, detail, sorted(recs))


def _leaf_count(node) -> int:
    return 1 if isinstance(node, Leaf) else _leaf_count(node.child0) + _leaf_count(node.child1)


# -- criterion 7: certificates ---------------------------------------------------------------


def _w_cert(n, lo, hi):
    fails = []
    certs = [adaptive_certificate(TruthTable.const(n, 0), x) for x in range(1 << n)]
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        for x, c in enumerate(certs):
            if len(c) > 2 or not verify_certificate(f, c, x):
                fails.append((n, hex(bits), x))
        na = nonadaptive_certificate(f)
        if len(na) != alternation(f) or not verify_certificate(f, na):
            fails.append((n, hex(bits), "na"))
    return fails, []


def criterion_7(sc: Scope) -> Check:
    fails, _ = _sweep(_w_cert, range(sc.n_max + 1), sc.jobs)
    return Check(7, "adaptive certificates of size <= 2 and non-adaptive of size alt",
                 not fails, _fmt_fail(fails) or f"all f, all x, n<={sc.n_max}")


# -- criterion 8: nondeterministic trees ---------------------------------------------------


def _w_nmdt(n, lo, hi):
    fails = []
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        k = alternation(f)
        t = nmdt_build(f)
        b = t.branch_count
        if t.height != 2 or not -(-k // 2) <= b <= -(-(k + 1) // 2) or nmdt_table(t) != f:
            fails.append((n, hex(bits), "build"))
            continue
        t2 = m1_to_m2(t)
        t1 = m2_to_m1(t2)
        if t2.height != 2 * t.height or t1.height != t2.height or nmdt_table(t2) != f or nmdt_table(t1) != f:
            fails.append((n, hex(bits), "convert"))
    return fails, []


def criterion_8(sc: Scope) -> Check:
    fails, _ = _sweep(_w_nmdt, range(sc.n_max + 1), sc.jobs)
    return Check(8, "height-2 NMDT with ceil(alt/2)..ceil((alt+1)/2) branches; M1<->M2",
                 not fails, _fmt_fail(fails) or f"all f, n<={sc.n_max}")


# -- criteria 9-10: randomized trees ------------------------------------------------------


def rmdt_corpus(sc: Scope):
    rng = random.Random(sc.seed + 9)
    return [random_rmdt(rng.randint(1, 6), rng.randint(1, 5), rng) for _ in range(sc.rmdt_corpus)]


def criterion_9(sc: Scope) -> Check:
    fails, recs = [], set()
    for i, t in enumerate(rmdt_corpus(sc)):
        if any(rmdt_accept_prob(t, x) != accept_prob_by_coin_strings(t, x) for x in range(1 << t.n)):
            fails.append((i, "prob"))
            continue
        f = function_at_half(t)
        d = rmdt_derandomize(t)
        recs.add((alternation(f), d.height))
        if d.height > t.height or d.truth_table() != f:
            fails.append((i, "derandomize"))
    return Check(9, "closed-form = coin-enumeration probability; derandomized height <= h",
                 not fails, _fmt_fail(fails) or f"{sc.rmdt_corpus} trees", sorted(recs))


def criterion_10(sc: Scope) -> Check:
    rng = random.Random(sc.seed + 10)
    fails, total = [], 0
    for w in (2, 4, 8):
        k = w.bit_length() - 1
        for i in range(sc.wrmdt_corpus):
            t = random_wrmdt(rng.randint(1, 4), rng.randint(1, 3), w, rng)
            r = wrmdt_to_rmdt(t)
            total += 1
            if r.height != (1 + k) * t.height or any(
                wrmdt_accept_prob(t, x) != rmdt_accept_prob(r, x) for x in range(1 << t.n)
            ):
                fails.append((w, i))
    return Check(10, "w-RMDT -> RMDT height factor 1+k, probabilities preserved", not fails,
                 _fmt_fail(fails) or f"{total} trees, w in 2,4,8")


# -- criteria 11-13: circuits --------------------------------------------------------------


def _sorted_ok(c, m: int) -> bool:
    # lane j carries the sorted input 0^j 1^(m-j); bit i is set iff i >= j
    lanes = m + 1
    words = [(1 << (i + 1)) - 1 for i in range(m)]
    vals = simulate(c, words, lanes)
    full = (1 << lanes) - 1
    return all(vals[o] == full ^ words[i] for i, o in enumerate(c.outputs))


BLOCK_GRID = [(m, t, lv) for m in (8, 16, 64) for t in (2, 4, 8) for lv in (1, 2, 3)]


def inverter_circuits(sc: Scope):
    """(label, circuit, measured alternation of the inverting function, ok)."""
    out = []
    for m in range(0, sc.log_inverter_m + 1):
        c = invert_sorted_log(m)
        ok = _sorted_ok(c, m) and negation_count(c) == math.ceil(math.log2(m + 1))
        out.append((f"sorted_log m={m}", c, m, ok))
    for m in range(0, sc.fischer_m + 1):
        c = fischer_inverter(m)
        tabs = truth_tables(c)
        ok = all(t == ~TruthTable.var(m, i + 1) for i, t in enumerate(tabs))
        ok = ok and negation_count(c) == math.ceil(math.log2(m + 1))
        out.append((f"fischer m={m}", c, m, ok))
    for m, t, lv in BLOCK_GRID:
        c = invert_sorted_blocks(m, t, lv)
        ok = _sorted_ok(c, m) and negation_count(c) == block_inverter_negations(m, t, lv)
        out.append((f"blocks m={m} t={t} levels={lv}", c, m, ok))
    return out


def criterion_11(sc: Scope) -> Check:
    circuits = inverter_circuits(sc)
    bad = [label for label, _, _, ok in circuits if not ok]
    return Check(11, "sorted-log, Fischer and block inverters", not bad,
                 f"{len(bad)} failures, first {bad[0]}" if bad else f"{len(circuits)} circuits",
                 [(label, negation_count(c), depth(c), k) for label, c, k, _ in circuits])


def _w_markov(n, lo, hi):
    fails, recs = [], []
    for bits in range(lo, hi):
        f = TruthTable(n, bits)
        k = alternation(f)
        c, rep = markov_circuit(f)
        negs = negation_count(c)
        if negs > math.ceil(math.log2(k + 1)) or truth_table_of(c) != f or not rep.within_budget:
            fails.append((n, hex(bits)))
        recs.append((f"markov n={n} f={bits:x}", negs, depth(c), k, decrease_count(f)))
    return fails, recs


def criterion_12(sc: Scope) -> Check:
    fails, recs = _sweep(_w_markov, [sc.n_max], sc.jobs)
    return Check(12, "markov_circuit within ceil(log(alt+1)) negations, equivalent",
                 not fails, _fmt_fail(fails) or f"all n={sc.n_max} functions", recs)


def criterion_13(sc: Scope, inverters: Check | None = None, markov: Check | None = None,
                 measure: str = "alt") -> Check:
    """Depth lower bound d((k+1)^(1/d) - 1) on every circuit of criteria 11-12.

    ``measure='alt'`` takes k = alt(f) (all flips); ``measure='decrease'`` takes
    k = the number of 1 -> 0 drops, the quantity the cited bound is stated for.
    For inverters both measures equal m: every step of the sorted chain drops
    exactly one output from 1 to 0.
    """
    inverters = inverters or criterion_11(sc)
    markov = markov or criterion_12(sc)
    rows = [(lab, negs, d, k) for lab, negs, d, k in inverters.records]
    for lab, negs, d, k, dec in markov.records:
        rows.append((lab, negs, d, k if measure == "alt" else dec))
    bad = [r for r in rows if r[1] < negation_lower_bound(r[3], r[2]) - 1e-9]
    title = "negations >= d(k+1)^(1/d) - d" + (" with k = alt" if measure == "alt" else " with k = 1->0 drops")
    detail = f"{len(rows)} circuits"
    if bad:
        lab, negs, d, k = bad[0]
        detail += f", {len(bad)} violations, first {lab}: {negs} NOTs at depth {d}, bound {negation_lower_bound(k, d):.3f}"
    return Check(13, title, not bad, detail)


# -- criterion 14: alt <= 2^height for every constructed tree ------------------------------


def _w_circuit_trees(seed, count):
    rng = random.Random(seed)
    fails, recs = [], set()
    for i in range(count):
        n = rng.randint(1, 8)
        c = random_circuit(n, rng.randint(0, 6), rng.randint(4, 16), rng)
        t = mdt_from_circuit(c)
        f = truth_table_of(c)
        recs.add((alternation(f), t.height))
        if t.height > negation_count(c) + 1 or t.truth_table() != f or not all(
            q.is_monotone() for q in iter_queries(t.root)
        ):
            fails.append(i)
    return fails, sorted(recs)


def criterion_14(sc: Scope, *upstream: Check) -> Check:
    recs = set()
    for chk in upstream:
        recs.update(tuple(r) for r in chk.records)
    fails, circ = _w_circuit_trees(sc.seed + 14, 200 if sc.name == "full" else 40)
    recs.update(circ)
    bad = [(k, h) for k, h in recs if k > 2 ** h]
    ok = not bad and not fails
    detail = f"{len(recs)} distinct (alt, height) pairs"
    if bad:
        detail += f", violations {bad[:3]}"
    if fails:
        detail += f", {len(fails)} mdt_from_circuit failures"
    return Check(14, "alt(f) <= 2^height for every constructed MDT", ok, detail)


# -- driver ----------------------------------------------------------------------------------


def run(level: str = "quick", seed: int = DEFAULT_SEED, jobs: int = 1, emit=print) -> list[Check]:
    sc = scope(level, seed, jobs)
    checks: dict[int, Check] = {}
    for k in range(1, 13):
        checks[k] = globals()[f"criterion_{k}"](sc)
        emit(checks[k].line())
    checks[13] = criterion_13(sc, checks[11], checks[12], "alt")
    emit(checks[13].line())
    supplement = criterion_13(sc, checks[11], checks[12], "decrease")
    emit(supplement.line().replace("criterion 13", "criterion 13b"))
    checks[14] = criterion_14(sc, checks[1], checks[6], checks[9])
    emit(checks[14].line())
    return [checks[k] for k in sorted(checks)] + [supplement]
