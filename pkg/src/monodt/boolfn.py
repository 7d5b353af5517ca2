"""Truth tables, hypercube chains and the alternation dynamic program.

Index convention: assignment ``x = (x_1, ..., x_n)`` lives at index
``sum(x_i << (i - 1))``, so ``x_1`` is the least-significant bit.  A truth
table is stored as one Python integer whose bit ``idx`` is ``f(x)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_N = 20
BRUTEFORCE_MAX_N = 6
# above this arity the DPs switch to the numpy layer sweep
_NUMPY_CUTOFF = 12


class ArityError(ValueError):
    pass


def _full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


@lru_cache(maxsize=None)
def var_mask(n: int, i: int) -> int:
    """Table of the projection x_{i+1} (0-based ``i``) on ``n`` variables."""
    if not 0 <= i < n:
        raise ArityError(f"variable {i} out of range for n={n}")
    block = 1 << i
    period = block << 1
    # one set bit every `period` positions, then widen each to a run of `block`
    spikes = _full_mask(n) // ((1 << period) - 1)
    return spikes * (((1 << block) - 1) << block)


@dataclass(frozen=True)
class Assignment:
    n: int
    idx: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.idx < (1 << self.n):
            raise ArityError(f"index {self.idx} out of range for n={self.n}")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Assignment":
        """Build from ``(x_1, ..., x_n)``."""
        return cls(len(bits), sum((int(b) & 1) << i for i, b in enumerate(bits)))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.idx >> i) & 1 for i in range(self.n))

    def precedes(self, other: "Assignment") -> bool:
        """Strict bitwise order ``self < other``."""
        return self.idx != other.idx and self.idx & ~other.idx == 0

    def __str__(self):
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class TruthTable:
    n: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise ArityError(f"arity {self.n} outside [0, {MAX_N}]")
        if not 0 <= self.bits <= _full_mask(self.n):
            raise ValueError("bit pattern longer than 2^n")

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, n: int, value: int) -> "TruthTable":
        return cls(n, _full_mask(n) if value else 0)

    @classmethod
    def var(cls, n: int, i: int) -> "TruthTable":
        """Projection onto ``x_i`` (1-based, as in formulas)."""
        return cls(n, var_mask(n, i - 1))

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "TruthTable":
        values = list(values)
        n = len(values).bit_length() - 1
        if len(values) != 1 << n:
            raise ValueError(f"need 2^n values, got {len(values)}")
        return cls(n, sum((int(v) & 1) << i for i, v in enumerate(values)))

    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple[int, ...]], int]) -> "TruthTable":
        bits = 0
        for idx in range(1 << n):
            if fn(tuple((idx >> i) & 1 for i in range(n))):
                bits |= 1 << idx
        return cls(n, bits)

    @classmethod
    def from_array(cls, arr) -> "TruthTable":
        arr = np.asarray(arr, dtype=bool)
        n = arr.size.bit_length() - 1
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(n, int.from_bytes(packed, "little"))

    # -- queries ----------------------------------------------------------

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def mask(self) -> int:
        return _full_mask(self.n)

    def __call__(self, idx: int) -> int:
        return (self.bits >> idx) & 1

    def values(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.size)]

    def to_array(self) -> np.ndarray:
        raw = self.bits.to_bytes(max(1, (self.size + 7) // 8), "little")
        out = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return out[: self.size].astype(np.int8)

    def is_constant(self) -> bool:
        return self.bits == 0 or self.bits == self.mask

    def implies(self, other: "TruthTable") -> bool:
        """Pointwise implication ``self(x) = 1 => other(x) = 1``."""
        self._check(other)
        return self.bits & ~other.bits == 0

    def weight(self) -> int:
        return bin(self.bits).count("1")

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "TruthTable"):
        if self.n != other.n:
            raise ArityError(f"arity mismatch: {self.n} vs {other.n}")

    def __and__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n, self.bits & other.bits)

    def __or__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n, self.bits | other.bits)

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        self._check(other)
        return TruthTable(self.n, self.bits ^ other.bits)

    def __invert__(self) -> "TruthTable":
        return TruthTable(self.n, self.mask ^ self.bits)

    def __repr__(self):
        return f"TruthTable(n={self.n}, bits={''.join(map(str, self.values()))})"

    # -- text format ------------------------------------------------------

    def to_hex(self) -> str:
        digits = max(1, (self.size + 3) // 4)
        return format(self.bits, "x").zfill(digits)

    @classmethod
    def from_hex(cls, n: int, text: str) -> "TruthTable":
        text = text.strip().lower()
        if text.startswith("0x"):
            text = text[2:]
        digits = max(1, ((1 << n) + 3) // 4)
        if len(text) != digits:
            raise ValueError(f"expected {digits} hex digits for n={n}, got {len(text)}")
        return cls(n, int(text, 16))


def format_truth_table(f: TruthTable) -> str:
    return f"n={f.n}\n{f.to_hex()}\n"


def parse_truth_table(text: str, max_n: int = MAX_N) -> TruthTable:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("n="):
        raise ValueError("truth table file must be 'n=<k>' followed by one hex line")
    n = int(lines[0][2:])
    if n > max_n:
        raise ArityError(f"n={n} exceeds max_n={max_n}")
    return TruthTable.from_hex(n, lines[1])


# -- evaluation and monotonicity ---------------------------------------------


def eval_at(f: TruthTable, x: Assignment | int) -> int:
    if isinstance(x, Assignment):
        if x.n != f.n:
            raise ArityError(f"assignment has n={x.n}, table has n={f.n}")
        x = x.idx
    if not 0 <= x < f.size:
        raise ArityError(f"index {x} out of range for n={f.n}")
    return (f.bits >> x) & 1


def is_monotone(f: TruthTable) -> bool:
    """True iff ``f(x) <= f(x | e_i)`` on every covering pair."""
    bits = f.bits
    for i in range(f.n):
        low = f.mask ^ var_mask(f.n, i)
        # positions x with x_i = 0 where f(x)=1 but f(x + e_i)=0
        if bits & low & ~(bits >> (1 << i)):
            return False
    return True


# -- chains ------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    points: tuple[Assignment, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for a, b in zip(pts, pts[1:]):
            if a.n != b.n or not a.precedes(b):
                raise ValueError(f"chain not strictly increasing at {a} -> {b}")

    def __len__(self):
        return len(self.points)


def chain_alternation(f: TruthTable, chain: Chain) -> int:
    vals = [eval_at(f, p) for p in chain.points]
    return sum(a != b for a, b in zip(vals, vals[1:]))


def maximal_chains(n: int) -> Iterable[Chain]:
    """All n! chains 0^n < ... < 1^n, one per variable ordering."""
    for perm in itertools.permutations(range(n)):
        idx = 0
        pts = [Assignment(n, 0)]
        for i in perm:
            idx |= 1 << i
            pts.append(Assignment(n, idx))
        yield Chain(tuple(pts))


# -- alternation -------------------------------------------------------------


@dataclass(frozen=True)
class AltProfile:
    """``values[x]``: most flips of ``f`` along any chain starting at ``x``."""

    n: int
    values: tuple[int, ...]

    def __getitem__(self, idx: int) -> int:
        return self.values[idx]

    @property
    def alternation(self) -> int:
        return self.values[0]


@lru_cache(maxsize=None)
def _weight_layers(n: int) -> tuple[np.ndarray, ...]:
    idx = np.arange(1 << n, dtype=np.int64)
    wt = np.zeros_like(idx)
    for i in range(n):
        wt += (idx >> i) & 1
    return tuple(idx[wt == w] for w in range(n + 1))


def _profile_python(f: TruthTable, pick) -> list[int]:
    n, bits = f.n, f.bits
    size = 1 << n
    a = [0] * size
    # descending index order visits every cover x|e_i before x
    for x in range(size - 2, -1, -1):
        fx = (bits >> x) & 1
        best = None
        for i in range(n):
            b = 1 << i
            if x & b:
                continue
            y = x | b
            cand = a[y] + (fx ^ ((bits >> y) & 1))
            best = cand if best is None else pick(best, cand)
        a[x] = best
    return a


def _profile_numpy(f: TruthTable, use_max: bool) -> list[int]:
    n = f.n
    fv = f.to_array()
    a = np.zeros(1 << n, dtype=np.int16)
    layers = _weight_layers(n)
    for w in range(n - 1, -1, -1):
        idx = layers[w]
        best = np.full(idx.shape, -1 if use_max else 1 << 14, dtype=np.int16)
        for i in range(n):
            free = ((idx >> i) & 1) == 0
            y = idx | (1 << i)
            cand = a[y] + (fv[idx] != fv[y])
            if use_max:
                best = np.where(free, np.maximum(best, cand), best)
            else:
                best = np.where(free, np.minimum(best, cand), best)
        a[idx] = best
    return a.tolist()


def _check_arity(f: TruthTable, max_n: int):
    if f.n > max_n:
        raise ArityError(f"n={f.n} exceeds max_n={max_n}")


def alt_profile(f: TruthTable, max_n: int = MAX_N) -> AltProfile:
    _check_arity(f, max_n)
    if f.n > _NUMPY_CUTOFF:
        return AltProfile(f.n, tuple(_profile_numpy(f, True)))
    return AltProfile(f.n, tuple(_profile_python(f, max)))


def min_alt_profile(f: TruthTable, max_n: int = MAX_N) -> AltProfile:
    """Same recurrence with min: fewest flips over maximal chains from ``x``."""
    _check_arity(f, max_n)
    if f.n > _NUMPY_CUTOFF:
        return AltProfile(f.n, tuple(_profile_numpy(f, False)))
    return AltProfile(f.n, tuple(_profile_python(f, min)))


def alternation(f: TruthTable, max_n: int = MAX_N) -> int:
    return alt_profile(f, max_n).values[0]


def decrease_count(f: TruthTable, max_n: int = MAX_N) -> int:
    """Most 1 -> 0 drops along any chain (Markov's inversion measure)."""
    _check_arity(f, max_n)
    n, bits = f.n, f.bits
    size = 1 << n
    d = [0] * size
    for x in range(size - 2, -1, -1):
        fx = (bits >> x) & 1
        d[x] = max(
            d[x | 1 << i] + (fx & ~(bits >> (x | 1 << i)) & 1)
            for i in range(n)
            if not x >> i & 1
        )
    return d[0] if size else 0


def alternation_bruteforce(f: TruthTable) -> int:
    """Max flips over all n! maximal chains; independent of the DP."""
    if f.n > BRUTEFORCE_MAX_N:
        raise ArityError(f"chain enumeration capped at n={BRUTEFORCE_MAX_N}")
    return max(chain_alternation(f, c) for c in maximal_chains(f.n))


def is_uniform_alternation(f: TruthTable, max_n: int = MAX_N) -> bool:
    return min_alt_profile(f, max_n).values[0] == alternation(f, max_n)


# -- named families -----------------------------------------------------------


def threshold(n: int, k: int) -> TruthTable:
    if not 0 <= k <= n + 1:
        raise ValueError(f"threshold k={k} outside [0, {n + 1}]")
    return TruthTable(n, sum(1 << x for x in range(1 << n) if bin(x).count("1") >= k))


def parity(n: int) -> TruthTable:
    return TruthTable(n, sum(1 << x for x in range(1 << n) if bin(x).count("1") & 1))


def candidate_fn(n: int) -> TruthTable:
    """``~x1 x2 | ~x3 x4 | ... | ~x_{n-1} x_n``."""
    if n % 2:
        raise ValueError("candidate_fn needs even n")
    bits = 0
    for j in range(0, n, 2):
        bits |= var_mask(n, j + 1) & ~var_mask(n, j)
    return TruthTable(n, bits & _full_mask(n))


def point_indicator(n: int, point: Sequence[int] | int) -> TruthTable:
    idx = point if isinstance(point, int) else Assignment.from_bits(point).idx
    if isinstance(point, (list, tuple)) and len(point) != n:
        raise ArityError("point length differs from n")
    if not 0 <= idx < 1 << n:
        raise ArityError(f"point {idx} out of range")
    return TruthTable(n, 1 << idx)


def family(name: str, n: int, **params) -> TruthTable:
    if name in ("threshold", "th"):
        return threshold(n, int(params["k"]))
    if name in ("parity", "xor"):
        return parity(n)
    if name == "candidate_fn":
        return candidate_fn(n)
    if name == "point_indicator":
        return point_indicator(n, params["point"])
    if name == "const0":
        return TruthTable.const(n, 0)
    if name == "const1":
        return TruthTable.const(n, 1)
    raise ValueError(f"unknown family {name!r}")
