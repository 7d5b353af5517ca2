"""Gate-level circuit IR with negation accounting, inverters and synthesis passes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .boolfn import MAX_N, ArityError, TruthTable, alternation, var_mask
from .decomp import alternation_decomposition
from .queries import AndQuery, CircuitQuery, OrQuery, Query, TableQuery

OPS = ("INPUT", "CONST", "AND", "OR", "NOT", "TH")


class CircuitError(ValueError):
    pass


class Gate(NamedTuple):
    op: str
    args: tuple[int, ...] = ()
    # INPUT: variable index (0-based); CONST: value; TH: threshold k
    param: int = 0


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(Gate(*g) for g in self.gates))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        for i, g in enumerate(self.gates):
            if g.op not in OPS:
                raise CircuitError(f"gate {i}: unknown op {g.op}")
            if any(not 0 <= a < i for a in g.args):
                raise CircuitError(f"gate {i}: fanin not defined before use")
            if g.op == "INPUT" and not 0 <= g.param < self.n:
                raise CircuitError(f"gate {i}: input index {g.param} out of range")
            if g.op == "NOT" and len(g.args) != 1:
                raise CircuitError(f"gate {i}: NOT takes one fanin")
            if g.op == "TH" and not 0 <= g.param <= len(g.args) + 1:
                raise CircuitError(f"gate {i}: TH{g.param} over {len(g.args)} fanins")
        if any(not 0 <= o < len(self.gates) for o in self.outputs):
            raise CircuitError("output refers to an unknown gate")

    @property
    def negation_count(self) -> int:
        return sum(g.op == "NOT" for g in self.gates)


@dataclass(frozen=True)
class NegationBudgetReport:
    negations_used: int
    bound: int
    bound_formula: str

    @property
    def within_budget(self) -> bool:
        return self.negations_used <= self.bound


class CircuitBuilder:
    """Appends gates in topological order; identical gates are shared."""

    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = [Gate("INPUT", (), i) for i in range(n)]
        self._index: dict[Gate, int] = {g: i for i, g in enumerate(self.gates)}
        self._realized: dict[int, int] = {}
        self._keep: list = []

    @property
    def inputs(self) -> list[int]:
        return list(range(self.n))

    def add(self, gate: Gate) -> int:
        idx = self._index.get(gate)
        if idx is None:
            idx = len(self.gates)
            self.gates.append(gate)
            self._index[gate] = idx
        return idx

    def const(self, value: int) -> int:
        return self.add(Gate("CONST", (), int(bool(value))))

    def and_(self, args: Sequence[int]) -> int:
        return self.add(Gate("AND", tuple(args)))

    def or_(self, args: Sequence[int]) -> int:
        return self.add(Gate("OR", tuple(args)))

    def not_(self, a: int) -> int:
        return self.add(Gate("NOT", (a,)))

    def th(self, k: int, args: Sequence[int]) -> int:
        return self.add(Gate("TH", tuple(args), k))

    def embed(self, circuit: Circuit, inputs: Sequence[int]) -> list[int]:
        """Copy ``circuit`` with its variables wired to ``inputs``; return its outputs."""
        if len(inputs) != circuit.n:
            raise ArityError("embedding needs one wire per circuit input")
        remap: list[int] = []
        for g in circuit.gates:
            if g.op == "INPUT":
                remap.append(inputs[g.param])
            else:
                remap.append(self.add(Gate(g.op, tuple(remap[a] for a in g.args), g.param)))
        return [remap[o] for o in circuit.outputs]

    def monotone_table(self, table: TruthTable, inputs: Sequence[int] | None = None) -> int:
        """OR over the minimal true points, each an AND of its 1-variables."""
        inputs = self.inputs if inputs is None else list(inputs)
        if table.bits == 0:
            return self.const(0)
        if table(0):
            return self.const(1)
        terms = []
        for x in minimal_true_points(table):
            lits = [inputs[i] for i in range(table.n) if (x >> i) & 1]
            terms.append(lits[0] if len(lits) == 1 else self.and_(lits))
        return terms[0] if len(terms) == 1 else self.or_(terms)

    def realize(self, q: Query) -> int:
        """Monotone subcircuit for a query reference."""
        key = id(q)
        if key in self._realized:
            return self._realized[key]
        if isinstance(q, TableQuery):
            w = self.monotone_table(q.table)
        elif isinstance(q, (AndQuery, OrQuery)):
            parts = [self.realize(p) for p in q.parts]
            if not parts:
                w = self.const(1 if isinstance(q, AndQuery) else 0)
            elif len(parts) == 1:
                w = parts[0]
            else:
                w = self.and_(parts) if isinstance(q, AndQuery) else self.or_(parts)
        elif isinstance(q, CircuitQuery):
            sub = q.circuit
            w = self.embed(Circuit(sub.n, sub.gates, (sub.outputs[q.output],)), self.inputs)[0]
        else:
            raise TypeError(f"cannot realize {q!r}")
        self._realized[key] = w
        self._keep.append(q)
        return w

    def build(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(self.n, tuple(self.gates), tuple(outputs))


def minimal_true_points(table: TruthTable) -> list[int]:
    bits = table.bits
    out = []
    for x in range(table.size):
        if (bits >> x) & 1 and all(
            not (bits >> (x & ~(1 << i))) & 1 for i in range(table.n) if (x >> i) & 1
        ):
            out.append(x)
    return out


# -- evaluation -------------------------------------------------------------------


def simulate(circuit: Circuit, words: Sequence[int], lanes: int) -> list[int]:
    """Bit-parallel evaluation: bit j of ``words[i]`` is x_{i+1} in lane j."""
    full = (1 << lanes) - 1
    vals: list[int] = []
    for g in circuit.gates:
        op = g.op
        if op == "INPUT":
            v = words[g.param]
        elif op == "CONST":
            v = full if g.param else 0
        elif op == "AND":
            v = full
            for a in g.args:
                v &= vals[a]
        elif op == "OR":
            v = 0
            for a in g.args:
                v |= vals[a]
        elif op == "NOT":
            v = full ^ vals[g.args[0]]
        else:
            k = g.param
            if k == 0:
                v = full
            elif k > len(g.args):
                v = 0
            else:
                # atleast[j]: lanes where at least j+1 fanins seen so far are 1
                atleast = [0] * k
                for a in g.args:
                    w = vals[a]
                    for j in range(k - 1, 0, -1):
                        atleast[j] |= atleast[j - 1] & w
                    atleast[0] |= w
                v = atleast[k - 1]
        vals.append(v)
    return vals


def circuit_eval(circuit: Circuit, x: int) -> tuple[int, ...]:
    words = [(x >> i) & 1 for i in range(circuit.n)]
    vals = simulate(circuit, words, 1)
    return tuple(vals[o] for o in circuit.outputs)


def truth_tables(circuit: Circuit, max_n: int = MAX_N) -> list[TruthTable]:
    n = circuit.n
    if n > max_n:
        raise ArityError(f"n={n} exceeds max_n={max_n}")
    vals = simulate(circuit, [var_mask(n, i) for i in range(n)], 1 << n)
    return [TruthTable(n, vals[o]) for o in circuit.outputs]


def truth_table_of(circuit: Circuit, output: int = 0, max_n: int = MAX_N) -> TruthTable:
    n = circuit.n
    if n > max_n:
        raise ArityError(f"n={n} exceeds max_n={max_n}")
    vals = simulate(circuit, [var_mask(n, i) for i in range(n)], 1 << n)
    return TruthTable(n, vals[circuit.outputs[output]])


def negation_count(circuit: Circuit) -> int:
    return circuit.negation_count


def is_syntactically_monotone(circuit: Circuit) -> bool:
    return all(g.op != "NOT" for g in circuit.gates)


def depth(circuit: Circuit) -> int:
    """Gates on the longest input-to-output path (inputs and constants excluded)."""
    d: list[int] = []
    for g in circuit.gates:
        if g.op in ("INPUT", "CONST"):
            d.append(0)
        else:
            d.append(1 + max((d[a] for a in g.args), default=0))
    return max((d[o] for o in circuit.outputs), default=0)


def negation_lower_bound(alt: int, d: int) -> float:
    """Fewest negations any depth-d circuit for an alternation-``alt`` function needs."""
    if d <= 0:
        return 0.0
    return d * (alt + 1) ** (1.0 / d) - d


# -- simplification ---------------------------------------------------------------------


def simplify(circuit: Circuit) -> Circuit:
    """Constant propagation, alias removal and dead-gate elimination."""
    b = CircuitBuilder(circuit.n)
    # each old gate maps to ("c", value) or ("w", new wire)
    m: list[tuple[str, int]] = []
    for g in circuit.gates:
        args = [m[a] for a in g.args]
        op = g.op
        if op == "INPUT":
            m.append(("w", g.param))
        elif op == "CONST":
            m.append(("c", g.param))
        elif op == "NOT":
            kind, v = args[0]
            m.append(("c", 1 - v) if kind == "c" else ("w", b.not_(v)))
        elif op in ("AND", "OR"):
            absorbing = 0 if op == "AND" else 1
            if ("c", absorbing) in args:
                m.append(("c", absorbing))
                continue
            wires = list(dict.fromkeys(v for kind, v in args if kind == "w"))
            if not wires:
                m.append(("c", 1 - absorbing))
            elif len(wires) == 1:
                m.append(("w", wires[0]))
            else:
                m.append(("w", b.and_(wires) if op == "AND" else b.or_(wires)))
        else:
            k = g.param - sum(v for kind, v in args if kind == "c")
            wires = [v for kind, v in args if kind == "w"]
            if k <= 0:
                m.append(("c", 1))
            elif k > len(wires):
                m.append(("c", 0))
            elif k == 1:
                uniq = list(dict.fromkeys(wires))
                m.append(("w", uniq[0] if len(uniq) == 1 else b.or_(uniq)))
            elif k == len(wires):
                uniq = list(dict.fromkeys(wires))
                m.append(("w", uniq[0] if len(uniq) == 1 else b.and_(uniq)))
            else:
                m.append(("w", b.th(k, wires)))
    outs = [b.const(v) if kind == "c" else v for kind, v in (m[o] for o in circuit.outputs)]
    return prune(b.build(outs))


def prune(circuit: Circuit) -> Circuit:
    """Drop gates unreachable from the outputs; inputs always stay first."""
    live = [False] * len(circuit.gates)
    for o in circuit.outputs:
        live[o] = True
    for i in range(len(circuit.gates) - 1, -1, -1):
        if live[i]:
            for a in circuit.gates[i].args:
                live[a] = True
    b = CircuitBuilder(circuit.n)
    remap: dict[int, int] = {}
    for i, g in enumerate(circuit.gates):
        if g.op == "INPUT":
            remap[i] = g.param
        elif live[i]:
            remap[i] = b.add(Gate(g.op, tuple(remap[a] for a in g.args), g.param))
    return b.build([remap[o] for o in circuit.outputs])


def substitute_not(circuit: Circuit, gate: int, value: int) -> Circuit:
    """Replace NOT gate ``gate`` by a constant and propagate."""
    if circuit.gates[gate].op != "NOT":
        raise CircuitError(f"gate {gate} is not a NOT gate")
    gates = list(circuit.gates)
    gates[gate] = Gate("CONST", (), int(bool(value)))
    return simplify(Circuit(circuit.n, tuple(gates), circuit.outputs))


def cone(circuit: Circuit, gate: int) -> Circuit:
    """Single-output subcircuit computing ``gate``."""
    return prune(Circuit(circuit.n, circuit.gates, (gate,)))


# -- netlist text format ------------------------------------------------------------------

_GATE_RE = re.compile(r"^g(\d+)=(AND|OR|NOT|TH(\d+)|CONST0|CONST1)(?:\((.*)\))?$")


def emit_netlist(circuit: Circuit) -> str:
    names: list[str] = []
    lines = [f"INPUTS {circuit.n}"]
    next_id = 1
    for g in circuit.gates:
        if g.op == "INPUT":
            names.append(f"x{g.param + 1}")
            continue
        name = f"g{next_id}"
        next_id += 1
        names.append(name)
        if g.op == "CONST":
            body = f"CONST{g.param}"
        else:
            op = f"TH{g.param}" if g.op == "TH" else g.op
            body = f"{op}({','.join(names[a] for a in g.args)})"
        lines.append(f"{name}={body}")
    lines.append("OUTPUTS " + ",".join(names[o] for o in circuit.outputs))
    return "\n".join(lines) + "\n"


def parse_netlist(text: str) -> Circuit:
    statements = [s.strip() for s in re.split(r"[;\n]", text) if s.strip()]
    n = None
    b = None
    wires: dict[str, int] = {}
    outputs = None
    for st in statements:
        if st.startswith("#"):
            continue
        head = st.split(None, 1)
        if head[0] == "INPUTS":
            if n is not None:
                raise CircuitError("INPUTS declared twice")
            n = int(head[1])
            b = CircuitBuilder(n)
            wires = {f"x{i + 1}": i for i in range(n)}
            continue
        if head[0] == "OUTPUTS":
            refs = "".join(head[1:]).replace(" ", "")
            outputs = [_lookup(wires, r) for r in refs.split(",") if r]
            continue
        if b is None:
            # the INPUTS line may be omitted; infer n from the highest x<i>
            n = max((int(v) for v in re.findall(r"x(\d+)", text)), default=0)
            b = CircuitBuilder(n)
            wires = {f"x{i + 1}": i for i in range(n)}
        m = _GATE_RE.match(re.sub(r"\s+", "", st))
        if not m:
            raise CircuitError(f"cannot parse gate line {st!r}")
        name = f"g{int(m.group(1))}"
        if name in wires:
            raise CircuitError(f"{name} redefined")
        op, k, body = m.group(2), m.group(3), m.group(4)
        args = [_lookup(wires, r) for r in (body or "").split(",") if r]
        if op in ("CONST0", "CONST1"):
            wire = b.add(Gate("CONST", (), int(op[-1])))
        elif op == "NOT":
            if len(args) != 1:
                raise CircuitError(f"{name}: NOT takes one operand")
            wire = b.add(Gate("NOT", tuple(args)))
        elif op.startswith("TH"):
            kk = int(k)
            if kk > len(args) + 1:
                raise CircuitError(f"{name}: bad threshold TH{kk} over {len(args)} operands")
            wire = b.add(Gate("TH", tuple(args), kk))
        else:
            wire = b.add(Gate(op, tuple(args)))
        wires[name] = wire
    if b is None:
        raise CircuitError("empty netlist")
    if outputs is None:
        raise CircuitError("missing OUTPUTS line")
    return b.build(outputs)


def _lookup(wires: dict[str, int], ref: str) -> int:
    if ref not in wires:
        raise CircuitError(f"unknown or forward reference {ref!r}")
    return wires[ref]


# -- monotone decision trees from circuits ---------------------------------------------------


def mdt_from_circuit(circuit: Circuit):
    """Peel negations bottom-up; each NOT contributes one query level."""
    from .models import Leaf, MonotoneDecisionTree, Node

    if len(circuit.outputs) != 1:
        raise CircuitError("mdt_from_circuit needs a single-output circuit")

    def build(c: Circuit):
        out = c.gates[c.outputs[0]]
        if out.op == "CONST":
            return Leaf(out.param)
        first_not = next((i for i, g in enumerate(c.gates) if g.op == "NOT"), None)
        if first_not is None:
            return Node(CircuitQuery(c), Leaf(0), Leaf(1))
        query = CircuitQuery(cone(c, c.gates[first_not].args[0]))
        return Node(
            query,
            build(substitute_not(c, first_not, 1)),
            build(substitute_not(c, first_not, 0)),
        )

    return MonotoneDecisionTree(circuit.n, build(simplify(circuit)))


# -- inverters ----------------------------------------------------------------------------------


def sorted_log_negations(m: int) -> int:
    return m.bit_length()


def _invert_sorted_log(b: CircuitBuilder, s: list[int]) -> list[int]:
    m = len(s)
    if m == 0:
        return []
    if m == 1:
        return [b.not_(s[0])]
    mid = (m - 1) // 2
    left, pivot, right = s[:mid], s[mid], s[mid + 1 :]
    c = b.not_(pivot)
    # pivot = 0: the unknown boundary lies right of it, else left of it
    z = []
    for i, r in enumerate(right):
        from_left = b.and_([pivot, left[i]]) if i < len(left) else pivot
        z.append(b.or_([b.and_([c, r]), from_left]))
    negz = _invert_sorted_log(b, z)
    out_left = [b.or_([c, b.and_([pivot, negz[i]])]) for i in range(len(left))]
    out_right = [b.and_([c, negz[i]]) for i in range(len(right))]
    return out_left + [c] + out_right


def invert_sorted_log(m: int) -> Circuit:
    """Complements any ascending sorted input 0^j 1^(m-j) with bit_length(m) NOTs."""
    if m < 0:
        raise ValueError("m must be non-negative")
    b = CircuitBuilder(m)
    return b.build(_invert_sorted_log(b, b.inputs))


def block_inverter_negations(m: int, t: int, levels: int) -> int:
    if m == 0:
        return 0
    if levels == 0 or m <= t:
        return m
    p = -(-m // t)
    return 2 * (-(-m // p)) + block_inverter_negations(p, t, levels - 1)


def _invert_sorted_blocks(b: CircuitBuilder, s: list[int], t: int, levels: int) -> list[int]:
    m = len(s)
    if levels == 0 or m <= t:
        return [b.not_(w) for w in s]
    p = -(-m // t)
    blocks = [s[i : i + p] for i in range(0, m, p)]
    first_neg, mixed, mixed_neg = [], [], []
    for blk in blocks:
        nc = b.not_(blk[0])
        bi = b.and_([nc, blk[-1]])  # first XOR last, on a sorted block
        first_neg.append(nc)
        mixed.append(bi)
        mixed_neg.append(b.not_(bi))
    # the one mixed block, padded with virtual trailing 1s
    special = []
    for j in range(p):
        terms = [b.and_([bi, blk[j]]) if j < len(blk) else bi for bi, blk in zip(mixed, blocks)]
        special.append(terms[0] if len(terms) == 1 else b.or_(terms))
    special_neg = _invert_sorted_blocks(b, special, t, levels - 1)
    out = []
    for blk, bi, nbi, nc in zip(blocks, mixed, mixed_neg, first_neg):
        rest = b.and_([nbi, nc])
        out.extend(b.or_([b.and_([bi, special_neg[j]]), rest]) for j in range(len(blk)))
    return out


def invert_sorted_blocks(m: int, t: int, levels: int) -> Circuit:
    """Sorted-input inverter built from t blocks per level, constant depth per level."""
    if m < 0 or t < 1 or levels < 1:
        raise ValueError("need m >= 0, t >= 1, levels >= 1")
    b = CircuitBuilder(m)
    return b.build(_invert_sorted_blocks(b, b.inputs, t, levels))


def _fischer(b: CircuitBuilder, z: list[int]) -> list[int]:
    m = len(z)
    if m == 0:
        return []
    th = [None] + [b.th(k, z) for k in range(1, m + 1)]
    # (Th_m, ..., Th_1) is ascending sorted
    inv = _invert_sorted_log(b, [th[k] for k in range(m, 0, -1)])
    th_neg = {k: inv[m - k] for k in range(1, m + 1)}
    weight_is = [th_neg[1]] + [b.and_([th[k], th_neg[k + 1]]) for k in range(1, m)]
    out = []
    for i in range(m):
        others = z[:i] + z[i + 1 :]
        terms = [weight_is[0]] + [
            b.and_([weight_is[k], b.th(k, others)]) for k in range(1, m)
        ]
        out.append(terms[0] if len(terms) == 1 else b.or_(terms))
    return out


def fischer_inverter(m: int) -> Circuit:
    """Complements arbitrary inputs with bit_length(m) NOTs."""
    if m < 0:
        raise ValueError("m must be non-negative")
    b = CircuitBuilder(m)
    return b.build(_fischer(b, b.inputs))


# -- synthesis -------------------------------------------------------------------------------------


def _pair_circuit(b: CircuitBuilder, neg_wires: list[int], positive: list[int]) -> int:
    terms = [b.and_([nw, p]) for nw, p in zip(neg_wires, positive)]
    if not terms:
        return b.const(0)
    return terms[0] if len(terms) == 1 else b.or_(terms)


def markov_circuit(f: TruthTable, max_n: int = MAX_N) -> tuple[Circuit, NegationBudgetReport]:
    """Circuit for f with at most ceil(log2(alt(f)+1)) NOT gates."""
    d = alternation_decomposition(f, max_n).padded_even()
    b = CircuitBuilder(f.n)
    wires = [b.monotone_table(c) for c in d.components]
    odd, even = wires[0::2], wires[1::2]
    out = _pair_circuit(b, _invert_sorted_log(b, odd), even)
    circuit = simplify(b.build([out]))
    alt = alternation(f, max_n)
    bound = math.ceil(math.log2(alt + 1))
    return circuit, NegationBudgetReport(circuit.negation_count, bound, "ceil(log2(alt+1))")


def circuit_from_mdl(lst, t: int, levels: int) -> tuple[Circuit, NegationBudgetReport]:
    """Realize a decision list as OR of (~g_{j-1} & g_j) over its 1-nodes."""
    from .models import mdl_normalize_alternating, mdl_normalize_forward_firing

    lst = mdl_normalize_forward_firing(mdl_normalize_alternating(lst))
    b = CircuitBuilder(lst.n)
    gw = [b.realize(q) for q in lst.queries]
    negated, positive = [], []
    for j, c in enumerate(lst.constants):
        if c:
            negated.append(gw[j - 1] if j else b.const(0))
            positive.append(gw[j])
    neg_wires = _invert_sorted_blocks(b, negated, t, levels)
    out = _pair_circuit(b, neg_wires, positive)
    circuit = simplify(b.build([out]))
    bound = block_inverter_negations(len(negated), t, levels)
    return circuit, NegationBudgetReport(
        circuit.negation_count, bound, f"block inverter m={len(negated)} t={t} levels={levels}"
    )
