"""Reference implementations used as independent oracles in the tests.

Everything here is deliberately naive: trial division, explicit loops,
O(N^2) correlation sums.  Slow but obviously correct, so the fast package
code can be checked against it.
"""

from __future__ import annotations

import math


def ref_factorization(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d = 3 if d == 2 else d + 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def ref_mobius(n: int) -> int:
    fs = ref_factorization(n)
    if any(e > 1 for e in fs.values()):
        return 0
    return (-1) ** len(fs)


def ref_liouville(n: int) -> int:
    return (-1) ** sum(ref_factorization(n).values())


def ref_mertens(x: int) -> int:
    return sum(ref_mobius(n) for n in range(1, x + 1))


def ref_is_bfree(n: int, members) -> bool:
    return all(n % b != 0 for b in members)


def ref_squarefree(n: int) -> bool:
    return ref_mobius(n) != 0


def ref_correlation(values, m: int, n_max: int) -> int:
    """sum_{n=1..n_max} v(n) v(n+m) with values[i] holding v(i+1)."""
    total = 0
    for n in range(1, n_max + 1):
        total += int(values[n - 1]) * int(values[n + m - 1])
    return total


def ref_subword_count(word, k: int) -> int:
    """Number of distinct length-k blocks in the sequence."""
    seen = set()
    for i in range(len(word) - k + 1):
        seen.add(tuple(int(c) for c in word[i : i + k]))
    return len(seen)


def gcd_all_pairs_coprime(members) -> bool:
    ms = list(members)
    for i in range(len(ms)):
        for j in range(i + 1, len(ms)):
            if math.gcd(ms[i], ms[j]) != 1:
                return False
    return True
