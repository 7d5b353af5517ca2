"""Monotone decompositions: f as the XOR of an implication chain of monotone parts."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .boolfn import (
    MAX_N,
    ArityError,
    TruthTable,
    alt_profile,
    alternation,
    is_monotone,
    is_uniform_alternation,
    threshold,
)


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class MonotoneDecomposition:
    """Components stored in ascending implication order: ``f_i => f_{i+1}``."""

    components: tuple[TruthTable, ...]
    target: TruthTable

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for c in self.components:
            if c.n != self.target.n:
                raise ArityError("component arity differs from target")

    @property
    def n(self) -> int:
        return self.target.n

    def __len__(self):
        return len(self.components)

    def xor(self) -> TruthTable:
        return xor_all(self.components, self.n)

    def padded_even(self) -> "MonotoneDecomposition":
        """Prepend constant-0 if the length is odd (keeps ascending order)."""
        if len(self.components) % 2 == 0:
            return self
        return MonotoneDecomposition(
            (TruthTable.const(self.n, 0),) + self.components, self.target
        )


def xor_all(tables, n: int) -> TruthTable:
    return TruthTable(n, reduce(lambda acc, t: acc ^ t.bits, tables, 0))


def implication_holds(components) -> bool:
    return all(a.implies(b) for a, b in zip(components, components[1:]))


def alternation_decomposition(f: TruthTable, max_n: int = MAX_N) -> MonotoneDecomposition:
    prof = alt_profile(f, max_n)
    k = prof.values[0]
    if f.n > 12:
        a = np.asarray(prof.values)
        comps = [TruthTable.from_array(a < i) for i in range(1, k + 1)]
    else:
        comps = []
        for i in range(1, k + 1):
            comps.append(TruthTable(f.n, sum(1 << x for x, v in enumerate(prof.values) if v < i)))
    if f(0):
        comps.append(TruthTable.const(f.n, 1))
    return MonotoneDecomposition(tuple(comps), f)


@dataclass(frozen=True)
class DecompositionReport:
    xor_equals_target: bool
    all_monotone: bool
    implication_holds: bool
    length: int
    is_optimal_length: bool

    @property
    def ok(self) -> bool:
        return (
            self.xor_equals_target
            and self.all_monotone
            and self.implication_holds
            and self.is_optimal_length
        )


def verify_decomposition(f: TruthTable, d: MonotoneDecomposition) -> DecompositionReport:
    if f.n != d.n:
        raise ArityError("decomposition arity differs from function")
    comps = d.components
    optimal = alternation(f) + (1 if f(0) else 0)
    return DecompositionReport(
        xor_equals_target=xor_all(comps, f.n) == f,
        all_monotone=all(is_monotone(c) for c in comps),
        implication_holds=implication_holds(comps),
        length=len(comps),
        is_optimal_length=len(comps) == optimal,
    )


def threshold_interleaved_decomposition(f: TruthTable) -> MonotoneDecomposition:
    """2n+1 parts: Th_k and Th_{k+1} | (Th_k & f), interleaved by weight."""
    n = f.n
    th = [threshold(n, k) for k in range(n + 2)]
    # written order has f_{i+1} => f_i, with f_{2k} = Th_k; stored reversed
    desc = []
    for i in range(1, 2 * n + 2):
        k = i // 2
        desc.append(th[k] if i % 2 == 0 else th[k + 1] | (th[k] & f))
    return MonotoneDecomposition(tuple(reversed(desc)), f)


def _clear_leftmost(x: int) -> int:
    # "leftmost" is x_1, the least-significant bit
    return x & (x - 1)


def uniform_chain_decomposition(f: TruthTable, max_n: int = MAX_N) -> MonotoneDecomposition:
    """Components read off one chain per point, valid under uniform alternation."""
    if not is_uniform_alternation(f, max_n):
        raise DecompositionError("function does not have uniform alternation")
    n, k = f.n, alternation(f, max_n)
    flips = []
    for x in range(1 << n):
        seq = [f(x)]
        y = x
        for _ in range(n):
            y = _clear_leftmost(y)
            seq.append(f(y))
        flips.append(sum(a != b for a, b in zip(seq, seq[1:])))
    comps = [
        TruthTable(n, sum(1 << x for x, c in enumerate(flips) if c >= k - i + 1))
        for i in range(1, k + 1)
    ]
    if f(0):
        comps.append(TruthTable.const(n, 1))
    return MonotoneDecomposition(tuple(comps), f)


def four_forms(components, n: int) -> tuple[TruthTable, TruthTable, TruthTable, TruthTable]:
    """XOR, decision-list, DNF-of-pairs and CNF-of-pairs forms of an even chain."""
    comps = list(components)
    if len(comps) % 2:
        raise DecompositionError("four forms need an even number of components")
    full = (1 << (1 << n)) - 1
    xor = reduce(lambda acc, t: acc ^ t.bits, comps, 0)

    dl = 0
    for idx in range(1 << n):
        out = 0
        for j, c in enumerate(comps):
            if c(idx):
                out = j % 2  # constants 0,1,0,1,... ; tail (1,0)
                break
        dl |= out << idx

    dnf = 0
    for j in range(0, len(comps), 2):
        dnf |= ~comps[j].bits & comps[j + 1].bits
    dnf &= full

    cnf = full
    prev = 0  # leading constant 0
    for j in range(0, len(comps), 2):
        cnf &= prev | (full ^ comps[j].bits)
        prev = comps[j + 1].bits
    cnf &= prev  # last clause (f_k | ~1)

    return tuple(TruthTable(n, b) for b in (xor, dl, dnf, cnf))


def four_forms_check(d: MonotoneDecomposition) -> bool:
    if not implication_holds(d.components):
        raise DecompositionError("implication chain violated")
    forms = four_forms(d.padded_even().components, d.n)
    return all(form == forms[0] for form in forms[1:])


# -- file format ---------------------------------------------------------------


def format_decomposition(d: MonotoneDecomposition) -> str:
    lines = [f"n={d.n} m={len(d)} dir=asc"]
    lines += [c.to_hex() for c in d.components]
    lines.append(d.target.to_hex())
    return "\n".join(lines) + "\n"


def parse_decomposition(text: str, max_n: int = MAX_N) -> MonotoneDecomposition:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty decomposition file")
    fields = dict(part.split("=", 1) for part in lines[0].split())
    n, m = int(fields["n"]), int(fields["m"])
    if fields.get("dir", "asc") != "asc":
        raise ValueError("only dir=asc decompositions are supported")
    if n > max_n:
        raise ArityError(f"n={n} exceeds max_n={max_n}")
    if len(lines) != m + 2:
        raise ValueError(f"expected {m} component lines plus a target line")
    comps = tuple(TruthTable.from_hex(n, ln) for ln in lines[1 : m + 1])
    return MonotoneDecomposition(comps, TruthTable.from_hex(n, lines[m + 1]))
