"""End-to-end verification suite.

Each criterion is an exact-oracle equality check or a monotone-trend
property sized to run on a desk machine, reported as a single pass/fail
row.  The quick suite covers the exact checks; the full suite adds the
trend and Monte-Carlo criteria plus a thread-determinism comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    BFreeSpec,
    bfree_indicator,
    brute_arith,
    mertens_prefix,
    sieve_liouville,
    sieve_mobius,
)
from .averaging import FolnerSchedule, bfree_approximation_gap
from .dynsys import VeechSpec, veech_window_closure
from .errors import ParameterError
from .experiments import (
    chowla_decay,
    correlations,
    davenport_sum,
    interval_second_moment,
    partition_mertens_sum,
    random_mertens_sim,
    short_interval_sup,
)
from .gc_stats import (
    BernoulliCoordinateFamily,
    RotationFamily,
    entropy_rate,
    shattering_probability,
)
from .harness import csv_bytes

__all__ = ["CriterionResult", "run_suite", "QUICK", "FULL"]

_ALPHA = math.sqrt(2) - 1


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def criterion_1(threads: int = 1, corrupt=None) -> CriterionResult:
    """Sieved mu/lambda equal trial division; divisor sums of mu vanish off 1."""
    t0 = time.perf_counter()
    limit, small = 10**6, 10**4
    mob = sieve_mobius(limit)
    lio = sieve_liouville(limit)
    if corrupt is not None:
        corrupt(mob.values)
    rng = np.random.default_rng(0)
    points = [int(n) for n in rng.integers(1, limit + 1, size=10**4)]
    points += list(range(1, small + 1))
    bad = 0
    for n in points:
        bm, bl = brute_arith(n)
        if mob.value_at(n) != bm or lio.value_at(n) != bl:
            bad += 1
    acc = np.zeros(small + 1, dtype=np.int64)
    head = mob.values[:small].astype(np.int64)
    for d in range(1, small + 1):
        acc[d::d] += head[d - 1]
    identity_bad = int(acc[1] != 1) + int(np.count_nonzero(acc[2:]))
    passed = bad == 0 and identity_bad == 0
    detail = (
        f"{bad} mismatches vs trial division on {len(points)} points, "
        f"{identity_bad} divisor-sum failures below {small}"
    )
    return CriterionResult(1, "sieve-exactness", passed, detail, time.perf_counter() - t0)


def criterion_2(threads: int = 1) -> CriterionResult:
    """Mertens prefix increments reproduce mu pointwise; M(10) = -1."""
    t0 = time.perf_counter()
    limit = 10**6
    table = sieve_mobius(limit)
    prefix = mertens_prefix(table)
    step_bad = int(np.count_nonzero(np.diff(prefix.prefix) != table.values.astype(np.int64)))
    m10 = prefix.m(10)
    passed = step_bad == 0 and m10 == -1
    detail = f"{step_bad} increment mismatches up to {limit}; M(10)={m10}"
    return CriterionResult(2, "mertens-consistency", passed, detail, time.perf_counter() - t0)


@lru_cache(maxsize=4)
def _correlation_runs(threads: int = 1):
    n = 1 << 12
    runs = {}
    for kind, sieve in (("mobius", sieve_mobius), ("liouville", sieve_liouville)):
        table = sieve(2 * n)
        runs[kind] = (
            correlations(table, n, method="fft"),
            correlations(table, n, method="direct"),
        )
    rows = [
        (kind, m + 1, int(fft[m]), int(direct[m]))
        for kind, (fft, direct) in runs.items()
        for m in range(n)
    ]
    blob = {"correlations.csv": csv_bytes(("kind", "m", "fft", "direct"), rows)}
    return runs, blob


def criterion_3(threads: int = 1) -> CriterionResult:
    """FFT autocorrelations match the O(N^2) direct sums exactly at N=4096."""
    t0 = time.perf_counter()
    runs, _ = _correlation_runs(threads)
    bad = {kind: int(np.count_nonzero(f != d)) for kind, (f, d) in runs.items()}
    passed = all(v == 0 for v in bad.values())
    detail = ", ".join(f"{kind}: {v} lag mismatches" for kind, v in bad.items())
    return CriterionResult(3, "correlation-fft-vs-direct", passed, detail, time.perf_counter() - t0)


def criterion_4(threads: int = 1) -> CriterionResult:
    """Order-two average correlation of lambda decays and at least halves."""
    t0 = time.perf_counter()
    series = chowla_decay("liouville", tuple(1 << j for j in (12, 14, 16, 18, 20)))
    vals = series.values
    halved = bool(vals[-1] < vals[0] / 2)
    passed = series.strictly_decreasing and halved
    detail = (
        "D=" + "/".join(f"{v:.4f}" for v in vals)
        + f", strict decrease={series.strictly_decreasing}, end/start={vals[-1] / vals[0]:.3f}"
    )
    return CriterionResult(4, "chowla-average-decay", passed, detail, time.perf_counter() - t0)


def criterion_5(threads: int = 1) -> CriterionResult:
    """Exponential-sum peak: theta=0 value is |M(x)|; normalized peak shrinks."""
    t0 = time.perf_counter()
    table = sieve_mobius(10**6)
    prefix = mertens_prefix(table)
    results = {x: davenport_sum(table, x) for x in (10**3, 10**4, 10**5, 10**6)}
    exact = {x: results[x].theta0 == abs(prefix.m(x)) for x in (10**3, 10**4, 10**5)}
    ratios = [results[x].ratio for x in (10**4, 10**5, 10**6)]
    trend = all(b <= 1.2 * a for a, b in zip(ratios, ratios[1:]))
    passed = all(exact.values()) and trend
    detail = (
        f"theta0 exact at {sum(exact.values())}/3 points; "
        "ratios " + "/".join(f"{r:.4f}" for r in ratios) + f" non-increasing(1.2x)={trend}"
    )
    return CriterionResult(5, "davenport-peak", passed, detail, time.perf_counter() - t0)


def criterion_6(threads: int = 1) -> CriterionResult:
    """Short-interval sups shrink with x; normalized second moment decreases."""
    t0 = time.perf_counter()
    prefix = mertens_prefix(2 * 10**7)
    sups = [short_interval_sup(prefix, x, 0.6).sup for x in (10**4, 10**5, 10**6, 10**7)]
    sup_trend = all(b <= 1.2 * a for a, b in zip(sups, sups[1:]))
    moments = [
        interval_second_moment(prefix, big_x, int(big_x**0.2)).normalized
        for big_x in (10**4, 10**5, 10**6)
    ]
    moment_trend = all(b < a for a, b in zip(moments, moments[1:]))
    passed = sup_trend and moment_trend
    detail = (
        "sups " + "/".join(f"{s:.5f}" for s in sups) + f" non-increasing(1.2x)={sup_trend}; "
        "moments " + "/".join(f"{m:.4f}" for m in moments) + f" decreasing={moment_trend}"
    )
    return CriterionResult(6, "short-interval-trend", passed, detail, time.perf_counter() - t0)


def criterion_7(threads: int = 1) -> CriterionResult:
    """Partition variation of M: square partition shrinks >= 25%; unit partition
    counts squarefree integers exactly."""
    t0 = time.perf_counter()
    table = sieve_mobius(10**6)
    prefix = mertens_prefix(table)
    ratios = {
        top: partition_mertens_sum(prefix, [k * k for k in range(1, math.isqrt(top) + 1)]).ratio
        for top in (10**4, 10**6)
    }
    drop = 1.0 - ratios[10**6] / ratios[10**4]
    top = 10**4
    unit = partition_mertens_sum(prefix, range(1, top + 1))
    squarefree = int(np.count_nonzero(table.values[1:top]))
    exact = unit.abs_sum == squarefree and unit.ratio == squarefree / top
    passed = drop >= 0.25 and exact
    detail = (
        f"square-partition ratio {ratios[10**4]:.4f}->{ratios[10**6]:.4f} (drop {drop:.1%}); "
        f"unit-partition sum {unit.abs_sum} vs squarefree count {squarefree}"
    )
    return CriterionResult(7, "partition-variation", passed, detail, time.perf_counter() - t0)


_GRID = tuple(1 << j for j in range(10, 21))


@lru_cache(maxsize=4)
def _random_walk_runs(threads: int = 1):
    runs = {
        tau: random_mertens_sim(_GRID, tau, paths=256, seed=0, threads=threads)
        for tau in (0.5, 0.6)
    }
    sup_rows = [
        (tau, path, x, res.sups[path, i])
        for tau, res in runs.items()
        for path in range(res.paths)
        for i, x in enumerate(res.grid)
    ]
    rms_rows = [
        (tau, x, res.rms[i], res.bound[i])
        for tau, res in runs.items()
        for i, x in enumerate(res.grid)
    ]
    blob = {
        "walk-sups.csv": csv_bytes(("tau", "path", "x", "sup"), sup_rows),
        "walk-rms.csv": csv_bytes(("tau", "x", "rms", "bound"), rms_rows),
    }
    return runs, blob


def criterion_8(threads: int = 1) -> CriterionResult:
    """Random-walk analogue: RMS sup bounded at tau=1/2; small tails at tau=0.6."""
    t0 = time.perf_counter()
    runs, _ = _random_walk_runs(threads)
    rms_ok = bool(np.all(runs[0.5].rms <= 2.414))
    tail = float(np.mean(runs[0.6].sups[:, -1] < 0.05))
    passed = rms_ok and tail >= 0.95
    detail = (
        f"max RMS {runs[0.5].rms.max():.4f} (cap 2.414); "
        f"{tail:.1%} of paths below 0.05 at x=2^20 (need 95%)"
    )
    return CriterionResult(8, "random-walk-mertens", passed, detail, time.perf_counter() - t0)


def _window_text(window) -> str:
    return "".join("+0-"[1 - int(v)] for v in window)


def criterion_9(threads: int = 1) -> CriterionResult:
    """Window-closure scan of the alternating triangular step function finds
    exactly the three constant windows."""
    t0 = time.perf_counter()
    spec = VeechSpec.generated("triangular", "alternating")
    scan = veech_window_closure(spec, 8, budget=256)
    found = set(scan.above_threshold)
    length = 2 * scan.w + 1
    want = {(1,) * length, (-1,) * length, (0,) * length}
    passed = found == want
    shown = ", ".join(sorted(_window_text(w) for w in found)) or "none"
    detail = f"{len(found)} persistent windows: {shown}"
    return CriterionResult(9, "step-function-window-closure", passed, detail, time.perf_counter() - t0)


@lru_cache(maxsize=4)
def _gc_runs(threads: int = 1):
    rotation = RotationFamily(_ALPHA, 256)
    bernoulli = BernoulliCoordinateFamily(1 << 14)
    rot_entropy = entropy_rate(rotation, (64, 1024), eps=0.1, reps=32, seed=0, threads=threads)
    ber_entropy = entropy_rate(bernoulli, (2, 4, 6, 8, 10, 12), eps=0.1, reps=8, seed=0, threads=threads)
    ber_shatter = shattering_probability(bernoulli, 8, 0.25, 0.75, reps=64, seed=0, threads=threads)
    rot_shatter = [
        shattering_probability(rotation, n, 0.25, 0.75, reps=64, seed=0, threads=threads)
        for n in (2, 4, 6)
    ]
    entropy_rows = [("rotation", pt.n, pt.e_mean, pt.e_std) for pt in rot_entropy]
    entropy_rows += [("bernoulli", pt.n, pt.e_mean, pt.e_std) for pt in ber_entropy]
    shatter_rows = [("bernoulli", ber_shatter.n, ber_shatter.fraction, ber_shatter.root)]
    shatter_rows += [("rotation", s.n, s.fraction, s.root) for s in rot_shatter]
    blob = {
        "entropy.csv": csv_bytes(("family", "n", "e_mean", "e_std"), entropy_rows),
        "shatter.csv": csv_bytes(("family", "n", "fraction", "root"), shatter_rows),
    }
    return (rot_entropy, ber_entropy, ber_shatter, rot_shatter), blob


def criterion_10(threads: int = 1) -> CriterionResult:
    """Covering entropy collapses for rotations but not for coordinate maps;
    shattering probability separates the two the same way."""
    t0 = time.perf_counter()
    (rot_entropy, ber_entropy, ber_shatter, rot_shatter), _ = _gc_runs(threads)
    rot_ratio = rot_entropy[0].e_mean / rot_entropy[1].e_mean
    rot_ok = rot_ratio >= 4.0
    ber_floor = min(pt.e_mean for pt in ber_entropy)
    ber_ok = ber_floor >= 0.5 * math.log(2)
    shatter_ok = ber_shatter.root >= 0.9
    roots = [s.root for s in rot_shatter]
    roots_ok = all(b < a for a, b in zip(roots, roots[1:]))
    passed = rot_ok and ber_ok and shatter_ok and roots_ok
    detail = (
        f"rotation e_64/e_1024={rot_ratio:.1f} (need >=4); "
        f"bernoulli min e_n={ber_floor:.3f} (need >={0.5 * math.log(2):.3f}); "
        f"bernoulli root={ber_shatter.root:.3f} (need >=0.9); "
        "rotation roots " + "/".join(f"{r:.3f}" for r in roots) + f" strictly decreasing={roots_ok}"
    )
    return CriterionResult(10, "entropy-shattering-contrast", passed, detail, time.perf_counter() - t0)


def criterion_11(threads: int = 1) -> CriterionResult:
    """Truncation gap density for {2,3} sits at 1/6 under the tail bound;
    the prime-square indicator reproduces mu^2 exactly."""
    t0 = time.perf_counter()
    n = 10**6
    spec = BFreeSpec((2, 3))
    gap = bfree_approximation_gap(spec, 1, FolnerSchedule((n,)))
    g = float(gap.gaps[-1])
    near = abs(g - 1.0 / 6.0) <= 1e-2
    bounded = g <= spec.tail_sum(1) + 2.0 / math.sqrt(n)
    mob = sieve_mobius(n)
    free, _ = bfree_indicator(BFreeSpec.prime_squares(n), n)
    chi_bad = int(np.count_nonzero(free.values.astype(np.int64) != mob.values.astype(np.int64) ** 2))
    passed = near and bounded and chi_bad == 0
    detail = (
        f"gap {g:.6f} vs 1/6 (|diff|={abs(g - 1 / 6):.2e}, bound ok={bounded}); "
        f"{chi_bad} mu^2 mismatches up to {n}"
    )
    return CriterionResult(11, "bfree-approximation", passed, detail, time.perf_counter() - t0)


def criterion_12(threads: int = 1) -> CriterionResult:
    """Identical seeds with different thread counts emit byte-identical CSVs."""
    t0 = time.perf_counter()
    checks = []
    for label, fn in (
        ("correlations", _correlation_runs),
        ("random-walk", _random_walk_runs),
        ("entropy-shattering", _gc_runs),
    ):
        _, one = fn(1)
        _, two = fn(2)
        same = set(one) == set(two) and all(one[k] == two[k] for k in one)
        checks.append((label, same))
    passed = all(same for _, same in checks)
    detail = ", ".join(f"{label} {'identical' if same else 'DIFFERS'}" for label, same in checks)
    return CriterionResult(12, "thread-determinism", passed, detail, time.perf_counter() - t0)


_CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}

QUICK = (1, 2, 3, 5, 7, 9, 11)
FULL = tuple(sorted(_CRITERIA))


def run_suite(which: str = "quick", threads: int = 1) -> list[CriterionResult]:
    """Run the named suite and return one result row per criterion."""
    if which == "quick":
        cids = QUICK
    elif which == "full":
        cids = FULL
    else:
        raise ParameterError(f"unknown suite {which!r}; expected 'quick' or 'full'")
    return [_CRITERIA[cid](threads=threads) for cid in cids]
