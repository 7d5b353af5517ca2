"""Query references: monotone functions given as a table, a formula or a circuit."""

from __future__ import annotations

from functools import cached_property

from .boolfn import ArityError, TruthTable, is_monotone


class Query:
    n: int

    @cached_property
    def table(self) -> TruthTable:
        return self._materialize()

    def _materialize(self) -> TruthTable:
        raise NotImplementedError

    def __call__(self, idx: int) -> int:
        return (self.table.bits >> idx) & 1

    def is_monotone(self) -> bool:
        return is_monotone(self.table)


class TableQuery(Query):
    def __init__(self, table: TruthTable):
        self.n = table.n
        self.__dict__["table"] = table

    def _materialize(self):
        return self.table

    def __repr__(self):
        return f"TableQuery({self.table.to_hex()})"


class AndQuery(Query):
    """Conjunction; the empty conjunction is constant-1."""

    def __init__(self, parts, n: int | None = None):
        self.parts = tuple(parts)
        self.n = _arity(self.parts, n)

    def _materialize(self):
        bits = (1 << (1 << self.n)) - 1
        for p in self.parts:
            bits &= p.table.bits
        return TruthTable(self.n, bits)

    def __repr__(self):
        return f"AndQuery({list(self.parts)})"


class OrQuery(Query):
    """Disjunction; the empty disjunction is constant-0."""

    def __init__(self, parts, n: int | None = None):
        self.parts = tuple(parts)
        self.n = _arity(self.parts, n)

    def _materialize(self):
        bits = 0
        for p in self.parts:
            bits |= p.table.bits
        return TruthTable(self.n, bits)

    def __repr__(self):
        return f"OrQuery({list(self.parts)})"


class CircuitQuery(Query):
    def __init__(self, circuit, output: int = 0):
        self.circuit = circuit
        self.output = output
        self.n = circuit.n

    def _materialize(self):
        from .circuits import truth_table_of

        return truth_table_of(self.circuit, self.output)

    def __repr__(self):
        return f"CircuitQuery(<{len(self.circuit.gates)} gates>, output={self.output})"


def _arity(parts, n):
    if not parts:
        if n is None:
            raise ArityError("empty conjunction/disjunction needs an explicit n")
        return n
    ns = {p.n for p in parts}
    if len(ns) != 1 or (n is not None and n not in ns):
        raise ArityError(f"mixed arities {sorted(ns)}")
    return ns.pop()


def as_query(q) -> Query:
    if isinstance(q, Query):
        return q
    if isinstance(q, TruthTable):
        return TableQuery(q)
    raise TypeError(f"cannot use {type(q).__name__} as a query")


def const_query(n: int, value: int) -> TableQuery:
    return TableQuery(TruthTable.const(n, value))


def is_const(q: Query, value: int) -> bool:
    return q.table == TruthTable.const(q.n, value)


# -- serialization -------------------------------------------------------------


class QueryCodec:
    """Assigns ids to queries and renders the id-indexed query table."""

    def __init__(self):
        self.entries: list[str] = []
        self.circuits: dict[str, str] = {}
        self._ids: dict[int, int] = {}
        self._keep: list[Query] = []

    def ref(self, q: Query) -> int:
        key = id(q)
        if key in self._ids:
            return self._ids[key]
        if isinstance(q, TableQuery):
            entry = f"tt:{q.table.to_hex()}"
        elif isinstance(q, (AndQuery, OrQuery)):
            kind = "and" if isinstance(q, AndQuery) else "or"
            ids = [self.ref(p) for p in q.parts]
            entry = f"{kind}:[{','.join(map(str, ids))}]" if ids else f"{kind}:[]"
        elif isinstance(q, CircuitQuery):
            from .circuits import emit_netlist

            name = f"c{len(self.circuits)}"
            self.circuits[name] = emit_netlist(q.circuit)
            entry = f"circuit:{name}#{q.output}"
        else:
            raise TypeError(f"unsupported query {q!r}")
        self._ids[key] = len(self.entries)
        self.entries.append(entry)
        self._keep.append(q)
        return self._ids[key]

    def dump(self) -> dict:
        out = {"queries": list(self.entries)}
        if self.circuits:
            out["circuits"] = dict(self.circuits)
        return out


def load_queries(n: int, entries: list[str], circuits: dict | None = None) -> list[Query]:
    from .circuits import parse_netlist

    circuits = circuits or {}
    parsed_circuits: dict[str, object] = {}
    out: list[Query] = []
    for entry in entries:
        kind, _, body = entry.partition(":")
        if kind == "tt":
            out.append(TableQuery(TruthTable.from_hex(n, body)))
        elif kind in ("and", "or"):
            ids = [int(t) for t in body.strip("[]").split(",") if t.strip()]
            if any(i >= len(out) for i in ids):
                raise ValueError(f"query {entry!r} references a later id")
            parts = [out[i] for i in ids]
            out.append((AndQuery if kind == "and" else OrQuery)(parts, n))
        elif kind == "circuit":
            name, _, output = body.partition("#")
            if name not in parsed_circuits:
                if name not in circuits:
                    raise ValueError(f"unknown circuit {name!r}")
                parsed_circuits[name] = parse_netlist(circuits[name])
            c = parsed_circuits[name]
            if c.n != n:
                raise ArityError(f"circuit {name} has n={c.n}, expected {n}")
            out.append(CircuitQuery(c, int(output or 0)))
        else:
            raise ValueError(f"unknown query kind in {entry!r}")
    return out
