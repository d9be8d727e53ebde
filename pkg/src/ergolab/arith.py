"""Exact sieves for multiplicative arithmetic functions.

This module produces exact integer tables of the Mobius function mu(n),
the Liouville function lambda(n) = (-1)^Omega(n), B-free indicators, and
Mertens prefix sums M(x) = sum_{n<=x} mu(n).

Tables are computed by a segmented, vectorized sieve: each segment keeps a
one-byte value array plus a transient 8-byte accumulator used to detect the
single prime factor above sqrt(hi).  Memory is therefore one byte per table
entry plus O(segment) scratch; the hard limit is 2^31 - 1 entries (about
2 GiB of output), with desk-scale use expected at 1e8 and below.

All values are exact; nothing here is floating point.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, ResourceLimitError

MAX_SIEVE_LIMIT = 2**31 - 1
_SEGMENT = 1 << 20

_HEADER = struct.Struct("<6sHII")
_MAGIC = b"ATBL01"
_KIND_CODES = {"mobius": 1, "liouville": 2, "bfree-indicator": 3}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}
_KIND_RANGES = {
    "mobius": (-1, 1),
    "liouville": (-1, 1),
    "bfree-indicator": (0, 1),
}


@dataclass(frozen=True)
class ArithmeticTable:
    """Exact values of an arithmetic function on the integer window [lo, hi].

    Attributes:
        kind: one of "mobius", "liouville", "bfree-indicator".
        lo, hi: inclusive window bounds, 1 <= lo <= hi.
        values: int8 array of length hi - lo + 1; values[i] is f(lo + i).
    """

    kind: str
    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ParameterError(f"unknown table kind {self.kind!r}")
        if not (1 <= self.lo <= self.hi):
            raise ParameterError(f"bad window [{self.lo}, {self.hi}]")
        if self.values.dtype != np.int8:
            raise ParameterError("table values must be int8")
        if len(self.values) != self.hi - self.lo + 1:
            raise ParameterError("value array does not match window size")
        low, high = _KIND_RANGES[self.kind]
        if self.values.size and (self.values.min() < low or self.values.max() > high):
            raise ParameterError(f"values out of range for kind {self.kind!r}")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def value_at(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise ParameterError(f"n={n} outside table window [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(_MAGIC, _KIND_CODES[self.kind], self.lo, self.hi)
        return header + self.values.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ArithmeticTable":
        if len(blob) < _HEADER.size:
            raise ParameterError("table blob shorter than header")
        magic, code, lo, hi = _HEADER.unpack_from(blob)
        if magic != _MAGIC:
            raise ParameterError("bad magic in table blob")
        if code not in _CODE_KINDS:
            raise ParameterError(f"unknown kind code {code}")
        if hi < lo:
            raise ParameterError("corrupt header: hi < lo")
        body = blob[_HEADER.size :]
        if len(body) != hi - lo + 1:
            raise ParameterError("table blob length does not match header window")
        values = np.frombuffer(body, dtype=np.int8).copy()
        return cls(_CODE_KINDS[code], lo, hi, values)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n", "value"])
            for i, v in enumerate(self.values):
                writer.writerow([self.lo + i, int(v)])


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (empty for n < 2)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _check_window(lo: int, hi: int) -> None:
    if lo < 1 or hi < lo:
        raise ParameterError(f"bad sieve window [{lo}, {hi}]; need 1 <= lo <= hi")
    if hi > MAX_SIEVE_LIMIT:
        raise ResourceLimitError(
            f"sieve bound {hi} exceeds the supported limit {MAX_SIEVE_LIMIT}"
        )


def _first_multiple(q: int, lo: int) -> int:
    return ((lo + q - 1) // q) * q


def _mobius_block(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    size = hi - lo + 1
    mu = np.ones(size, dtype=np.int8)
    acc = np.ones(size, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = _first_multiple(p, lo)
        if start <= hi:
            sl = slice(start - lo, size, p)
            np.negative(mu[sl], out=mu[sl])
            acc[sl] *= p
        p2 = p * p
        start2 = _first_multiple(p2, lo)
        if start2 <= hi:
            mu[start2 - lo :: p2] = 0
    leftover = acc != np.arange(lo, hi + 1, dtype=np.int64)
    np.negative(mu, where=leftover, out=mu)
    return mu


def _liouville_block(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    size = hi - lo + 1
    lam = np.ones(size, dtype=np.int8)
    acc = np.ones(size, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        q = p
        while q <= hi:
            start = _first_multiple(q, lo)
            if start <= hi:
                sl = slice(start - lo, size, q)
                np.negative(lam[sl], out=lam[sl])
                acc[sl] *= p
            q *= p
    leftover = acc != np.arange(lo, hi + 1, dtype=np.int64)
    np.negative(lam, where=leftover, out=lam)
    return lam


def _sieve_range(kind: str, lo: int, hi: int) -> ArithmeticTable:
    _check_window(lo, hi)
    primes = primes_up_to(math.isqrt(hi))
    block = _mobius_block if kind == "mobius" else _liouville_block
    parts = []
    for seg_lo in range(lo, hi + 1, _SEGMENT):
        seg_hi = min(seg_lo + _SEGMENT - 1, hi)
        parts.append(block(seg_lo, seg_hi, primes))
    values = parts[0] if len(parts) == 1 else np.concatenate(parts)
    return ArithmeticTable(kind, lo, hi, values)


def sieve_mobius(limit: int) -> ArithmeticTable:
    """Exact mu(n) for 1 <= n <= limit."""
    return _sieve_range("mobius", 1, limit) if limit >= 1 else _bad_limit(limit)


def sieve_mobius_range(lo: int, hi: int) -> ArithmeticTable:
    """Exact mu(n) on the window [lo, hi]; identical to slicing a full run."""
    return _sieve_range("mobius", lo, hi)


def sieve_liouville(limit: int) -> ArithmeticTable:
    """Exact lambda(n) for 1 <= n <= limit."""
    return _sieve_range("liouville", 1, limit) if limit >= 1 else _bad_limit(limit)


def sieve_liouville_range(lo: int, hi: int) -> ArithmeticTable:
    """Exact lambda(n) on the window [lo, hi]."""
    return _sieve_range("liouville", lo, hi)


def _bad_limit(limit: int):
    raise ParameterError(f"sieve limit must be >= 1, got {limit}")


def brute_arith(n: int) -> tuple[int, int]:
    """(mu(n), lambda(n)) by trial division; the slow reference route."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    omega = 0
    big_omega = 0
    squarefree = True
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            omega += 1
            mult = 0
            while m % d == 0:
                m //= d
                mult += 1
            big_omega += mult
            if mult > 1:
                squarefree = False
        d = 3 if d == 2 else d + 2
    if m > 1:
        omega += 1
        big_omega += 1
    mu = (-1) ** omega if squarefree else 0
    return mu, (-1) ** big_omega


# ---------------------------------------------------------------------------
# Mertens prefix sums


@dataclass(frozen=True)
class MertensPrefix:
    """Prefix sums M(x) for 0 <= x <= limit, prefix[0] == 0, 64-bit exact."""

    limit: int
    prefix: np.ndarray

    def m(self, x: int) -> int:
        if not 0 <= x <= self.limit:
            raise ParameterError(f"x={x} outside [0, {self.limit}]")
        return int(self.prefix[x])

    def range_sum(self, x: int, y: int) -> int:
        """M(y) - M(x) = sum of mu over (x, y], in O(1)."""
        if not 0 <= x <= y <= self.limit:
            raise ParameterError(f"bad range ({x}, {y}] for limit {self.limit}")
        return int(self.prefix[y] - self.prefix[x])


def mertens_prefix(source: int | ArithmeticTable) -> MertensPrefix:
    """Mertens prefix sums from a Mobius table (or a fresh sieve to `source`)."""
    if isinstance(source, int):
        table = sieve_mobius(source)
    else:
        table = source
        if table.kind != "mobius":
            raise ParameterError(f"need a mobius table, got kind {table.kind!r}")
        if table.lo != 1:
            raise ParameterError("prefix sums need a table starting at n=1")
    prefix = np.zeros(table.hi + 1, dtype=np.int64)
    np.cumsum(table.values, dtype=np.int64, out=prefix[1:])
    return MertensPrefix(table.hi, prefix)


# ---------------------------------------------------------------------------
# B-free integers


@dataclass(frozen=True)
class BFreeSpec:
    """A finite family of pairwise coprime moduli b_1 < b_2 < ... (each >= 2).

    An integer is B-free when no member divides it.  `truncate(K)` keeps the
    first K members, which is the standard finite approximation.
    """

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(int(b) for b in self.members)
        object.__setattr__(self, "members", members)
        for b in members:
            if b < 2:
                raise ParameterError(f"member {b} must be >= 2")
        for a, b in zip(members, members[1:]):
            if a >= b:
                raise ParameterError("members must be strictly increasing")
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                g = math.gcd(a, b)
                if g != 1:
                    raise ParameterError(
                        f"members {a} and {b} are not coprime (share factor {g})"
                    )

    @classmethod
    def prime_squares(cls, limit: int) -> "BFreeSpec":
        """Members p^2 <= limit; B-free then means squarefree up to limit."""
        ps = primes_up_to(math.isqrt(limit))
        return cls(tuple(int(p) * int(p) for p in ps))

    def truncate(self, k: int) -> "BFreeSpec":
        if not 0 <= k <= len(self.members):
            raise ParameterError(f"truncation index {k} outside [0, {len(self.members)}]")
        return BFreeSpec(self.members[:k])

    def tail_sum(self, k: int) -> float:
        """sum of 1/b over members after the first k."""
        if not 0 <= k <= len(self.members):
            raise ParameterError(f"truncation index {k} outside [0, {len(self.members)}]")
        return float(sum(1.0 / b for b in self.members[k:]))

    def period(self) -> int:
        """lcm of the members; the multiple-set indicator has this period."""
        return math.lcm(*self.members) if self.members else 1


def bfree_indicator(
    spec: BFreeSpec, limit: int
) -> tuple[ArithmeticTable, ArithmeticTable]:
    """Indicator tables (chi_Bfree, chi_multiples) on [1, limit].

    The second table is the pointwise complement: the indicator of the
    multiple set {n : some member divides n}.
    """
    _check_window(1, limit)
    free = np.ones(limit, dtype=np.int8)
    for b in spec.members:
        if b <= limit:
            free[b - 1 :: b] = 0
    mult = (1 - free).astype(np.int8)
    return (
        ArithmeticTable("bfree-indicator", 1, limit, free),
        ArithmeticTable("bfree-indicator", 1, limit, mult),
    )


# ---------------------------------------------------------------------------
# Admissibility of finite blocks


@dataclass(frozen=True)
class ModulusCheck:
    """Outcome of the residue test for one modulus.

    checked is False when the modulus was skipped (larger than the block
    length or its span, so it cannot be covered).  omitted_residue is the
    smallest residue class mod `modulus` missed by the block, or None when
    the block covers every class.
    """

    modulus: int
    checked: bool
    omitted_residue: int | None


def admissibility_report(
    block: Sequence[int] | Iterable[int], spec: BFreeSpec
) -> list[ModulusCheck]:
    """Per-modulus residue coverage for a finite integer block."""
    items = [int(x) for x in block]
    rows = []
    if items:
        span = max(items) - min(items) + 1
    for b in spec.members:
        if not items or b > len(items) or b > span:
            rows.append(ModulusCheck(b, False, None))
            continue
        residues = {x % b for x in items}
        missing = set(range(b)) - residues
        rows.append(ModulusCheck(b, True, min(missing) if missing else None))
    return rows


def is_admissible(block: Sequence[int] | Iterable[int], spec: BFreeSpec) -> bool:
    """True when the block omits a residue class modulo every relevant member.

    Members exceeding the block length (or its span) are skipped: a block of
    n integers occupies at most n residue classes, so such moduli always
    leave a class free.
    """
    return all(
        row.omitted_residue is not None
        for row in admissibility_report(block, spec)
        if row.checked
    )
