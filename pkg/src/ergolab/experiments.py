"""Desk-scale statistics built on the sieves: weighted orbit averages,
exponential-sum maximization, pair correlations and their Cesàro averages,
short-interval partial-sum statistics, partition sums, and a random-walk
analogue of the Mertens function.

All limit statements behind these quantities are finitized as monotone-trend
checks over geometric grids; nothing here asserts an asymptotic.  Estimated
suprema over continuous parameters (`davenport_sum`, `zhan_sup`) are honest
lower bounds: a dense grid plus local refinement, with the grid parameters
recorded in the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import map_indexed
from .arith import ArithmeticTable, MertensPrefix, sieve_liouville, sieve_mobius
from .dynsys import OrbitStream, VeechSpec
from .errors import ParameterError

_MAX_FFT = 1 << 25
_GOLDEN = (math.sqrt(5) - 1) / 2


def _table_head(table: ArithmeticTable, n: int) -> np.ndarray:
    """Values v(1..n) from a table, validating coverage."""
    if table.lo > 1 or table.hi < n:
        raise ParameterError(
            f"table covers [{table.lo}, {table.hi}] but values on [1, {n}] are needed"
        )
    start = 1 - table.lo
    return np.asarray(table.values)[start : start + n]


# ---------------------------------------------------------------------------
# weighted orbit averages


@dataclass(frozen=True)
class DisjointnessResult:
    """Running averages (1/k) sum_{n<=k} nu(n) f(T^n x) for k = 1..N."""

    n: int
    path: np.ndarray

    @property
    def value(self):
        return self.path[-1].item()


def disjointness_sum(nu: ArithmeticTable, orbit: OrbitStream, n: int) -> DisjointnessResult:
    """(1/N) sum_{n=1}^{N} nu(n) f(T^n x), with the full partial-sum path.

    The stream's start point is x; the sum pairs nu(n) with the n-th
    iterate, so the first observable used is f(Tx).
    """
    n = int(n)
    if n < 1:
        raise ParameterError("need n >= 1")
    weights = _table_head(nu, n).astype(np.float64)
    observed = orbit.advance(1).take(n)
    terms = weights * np.asarray(observed)
    path = np.cumsum(terms) / np.arange(1, n + 1)
    return DisjointnessResult(n, path)


# ---------------------------------------------------------------------------
# exponential-sum maximization


@dataclass(frozen=True)
class DavenportResult:
    """Grid/refined maximum of |sum_{k<=x} v(k) e^(ik theta)| over theta.

    theta0 is the exact integer |sum v(k)| (the theta = 0 grid value);
    max_value is a lower bound for the true supremum; ratio compares it
    against x / (log x)^a.
    """

    x: int
    a: float
    grid_size: int
    theta0: int
    grid_max: float
    max_value: float
    argmax_theta: float
    ratio: float


def davenport_sum(table: ArithmeticTable, x: int, a: float = 2.0, refine: bool = True) -> DavenportResult:
    x = int(x)
    if x < 2:
        raise ParameterError("need x >= 2")
    pad = 1 << (4 * x - 1).bit_length()
    if pad > _MAX_FFT:
        raise ParameterError(f"transform length {pad} exceeds the memory cap {_MAX_FFT}")
    v = _table_head(table, x).astype(np.float64)
    buf = np.zeros(pad)
    buf[1 : x + 1] = v
    mags = np.abs(np.fft.rfft(buf))
    theta0 = abs(int(_table_head(table, x).astype(np.int64).sum()))
    mags[0] = float(theta0)
    j = int(np.argmax(mags))
    grid_max = float(mags[j])
    argmax_theta = 2 * math.pi * j / pad
    max_value = grid_max
    if refine:
        ks = np.arange(1, x + 1, dtype=np.float64)

        def g(theta: float) -> float:
            return float(np.abs(np.dot(v, np.exp(1j * theta * ks))))

        step = 2 * math.pi / pad
        lo, hi = argmax_theta - step, argmax_theta + step
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        fc, fd = g(c), g(d)
        for _ in range(48):
            if fc < fd:
                lo, c, fc = c, d, fd
                d = lo + _GOLDEN * (hi - lo)
                fd = g(d)
            else:
                hi, d, fd = d, c, fc
                c = hi - _GOLDEN * (hi - lo)
                fc = g(c)
        theta_r = (lo + hi) / 2
        value_r = g(theta_r)
        if value_r > max_value:
            max_value = value_r
            argmax_theta = theta_r % (2 * math.pi)
    ratio = max_value / (x / math.log(x) ** a)
    return DavenportResult(x, float(a), pad, theta0, grid_max, max_value, argmax_theta, ratio)


# ---------------------------------------------------------------------------
# pair correlations


def _correlation_input(values, n: int) -> np.ndarray:
    if isinstance(values, ArithmeticTable):
        return _table_head(values, 2 * n).astype(np.int64)
    arr = np.asarray(values)
    if arr.ndim != 1 or len(arr) < 2 * n:
        raise ParameterError(f"need at least {2 * n} values, have {arr.size}")
    return arr[: 2 * n].astype(np.int64)


def correlations(values, n: int, method: str = "fft") -> np.ndarray:
    """c(m) = sum_{k=1}^{n} v(k) v(k+m) for m = 1..n, as exact integers.

    The FFT route computes all lags at once and rounds to integers; the
    direct route is the O(n^2) reference summation.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("need n >= 1")
    if method not in ("fft", "direct"):
        raise ParameterError(f"unknown method {method!r}; use 'fft' or 'direct'")
    v = _correlation_input(values, n)
    if method == "direct":
        head = v[:n]
        return np.array([head @ v[m : m + n] for m in range(1, n + 1)], dtype=np.int64)
    pad = 1 << (3 * n - 1).bit_length()
    fa = np.fft.rfft(v, pad)
    fb = np.fft.rfft(v[:n], pad)
    cross = np.fft.irfft(fa * np.conj(fb), pad)
    return np.rint(cross[1 : n + 1]).astype(np.int64)


@dataclass(frozen=True)
class ChowlaPoint:
    """D(N) = (1/N^2) sum_{m=1}^{N} |c(m)| with its exact integer numerator."""

    n: int
    numerator: int

    @property
    def value(self) -> float:
        return self.numerator / self.n**2


def average_chowla(values, n: int, method: str = "fft") -> ChowlaPoint:
    c = correlations(values, n, method)
    return ChowlaPoint(int(n), int(np.abs(c).sum()))


_DECAY_KINDS = {"mobius", "liouville", "ones"}


@dataclass(frozen=True)
class DecaySeries:
    """D(N_j) over a schedule with a least-squares fit D ~ C / (log N)^kappa.

    The fit regresses log D on log log N; residual is the RMS misfit in log
    space.  Non-positive values make the fit undefined (NaN parameters).
    """

    abscissae: tuple[int, ...]
    values: np.ndarray
    c: float
    kappa: float
    residual: float
    strictly_decreasing: bool

    def refit(self, values) -> "DecaySeries":
        return _fit_decay(self.abscissae, np.asarray(values, dtype=np.float64))


def _fit_decay(ns: tuple[int, ...], ds: np.ndarray) -> DecaySeries:
    decreasing = bool(np.all(np.diff(ds) < 0))
    if len(ns) >= 2 and np.all(ds > 0):
        x = np.log(np.log(np.asarray(ns, dtype=np.float64)))
        y = np.log(ds)
        slope, intercept = np.polyfit(x, y, 1)
        residual = float(np.sqrt(np.mean((y - (intercept + slope * x)) ** 2)))
        return DecaySeries(ns, ds, float(np.exp(intercept)), float(-slope), residual, decreasing)
    return DecaySeries(ns, ds, math.nan, math.nan, math.nan, decreasing)


def chowla_decay(kind: str, schedule) -> DecaySeries:
    """D(N) across a strictly increasing schedule, with the decay fit."""
    if kind not in _DECAY_KINDS:
        raise ParameterError(f"unknown weight kind {kind!r}; use one of {sorted(_DECAY_KINDS)}")
    ns = tuple(int(n) for n in schedule)
    if len(ns) < 2:
        raise ParameterError("need at least two schedule points")
    if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise ParameterError("schedule must be strictly increasing and positive")
    top = 2 * ns[-1]
    if kind == "ones":
        values = np.ones(top, dtype=np.int8)
    elif kind == "mobius":
        values = sieve_mobius(top).values
    else:
        values = sieve_liouville(top).values
    ds = np.array([average_chowla(values[: 2 * n], n).value for n in ns])
    return _fit_decay(ns, ds)


# ---------------------------------------------------------------------------
# short-interval statistics


@dataclass(frozen=True)
class IntervalStat:
    """sup over integer h in [h_min, h_max] of |M(x+h) - M(x)| / h."""

    x: int
    tau: float
    h_min: int
    h_max: int
    sup: float
    argmax_h: int


def _h_floor(x: int, tau: float) -> int:
    if not 0 < tau <= 1:
        raise ParameterError(f"tau={tau} outside (0, 1]")
    return min(max(1, math.ceil(x**tau)), x)


def short_interval_sup(prefix: MertensPrefix, x: int, tau: float) -> IntervalStat:
    """Exact sup by scanning every integer h in [ceil(x^tau), x]; O(x) work."""
    x = int(x)
    if x < 1:
        raise ParameterError("need x >= 1")
    h_min = _h_floor(x, tau)
    if prefix.limit < 2 * x:
        raise ParameterError(f"prefix limit {prefix.limit} below the required 2x = {2 * x}")
    hs = np.arange(h_min, x + 1, dtype=np.int64)
    deltas = prefix.prefix[x + hs] - prefix.prefix[x]
    ratios = np.abs(deltas) / hs
    k = int(np.argmax(ratios))
    return IntervalStat(x, float(tau), h_min, x, float(ratios[k]), int(hs[k]))


@dataclass(frozen=True)
class SecondMoment:
    """(1/X) sum_{x=X}^{2X-1} |M(x+h) - M(x)|^2 and its h^2 normalization."""

    x: int
    h: int
    value: float

    @property
    def normalized(self) -> float:
        return self.value / self.h**2 if self.h else 0.0


def interval_second_moment(prefix: MertensPrefix, big_x: int, h: int) -> SecondMoment:
    big_x, h = int(big_x), int(h)
    if big_x < 1 or h < 0:
        raise ParameterError("need X >= 1 and h >= 0")
    if prefix.limit < 2 * big_x + h:
        raise ParameterError(
            f"prefix limit {prefix.limit} below the required 2X + h = {2 * big_x + h}"
        )
    xs = np.arange(big_x, 2 * big_x, dtype=np.int64)
    deltas = prefix.prefix[xs + h] - prefix.prefix[xs]
    return SecondMoment(big_x, h, float(np.dot(deltas, deltas) / big_x))


@dataclass(frozen=True)
class PartitionResult:
    """Normalized variation of M over a partition, with the step signs.

    signs[k] = sgn(M(x_{k+1}) - M(x_k)) with sgn(0) := +1.  When the
    partition gaps strictly increase, the signed steps materialize as a
    step-function spec in `veech`.
    """

    points: tuple[int, ...]
    deltas: tuple[int, ...]
    signs: tuple[int, ...]
    abs_sum: int
    ratio: float
    veech: VeechSpec | None


def partition_mertens_sum(prefix: MertensPrefix, partition) -> PartitionResult:
    points = tuple(int(p) for p in partition)
    if len(points) < 2:
        raise ParameterError("need at least two partition points")
    if points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise ParameterError("partition must be strictly increasing and start at >= 1")
    if points[-1] > prefix.limit:
        raise ParameterError(f"partition end {points[-1]} beyond prefix limit {prefix.limit}")
    mvals = prefix.prefix[np.asarray(points, dtype=np.int64)]
    deltas = np.diff(mvals)
    signs = tuple(1 if d >= 0 else -1 for d in deltas)
    abs_sum = int(np.abs(deltas).sum())
    gaps = np.diff(np.asarray(points))
    veech = None
    if np.all(gaps[1:] > gaps[:-1]):
        veech = VeechSpec.explicit(points, signs)
    return PartitionResult(points, tuple(int(d) for d in deltas), signs, abs_sum, abs_sum / points[-1], veech)


# ---------------------------------------------------------------------------
# random-walk analogue of the Mertens function


@dataclass(frozen=True)
class RandomMertensResult:
    """Per-path short-interval sups for a +-1 random walk, against the
    reference curve (sqrt(2)+1) x^(1/2 - tau)."""

    grid: tuple[int, ...]
    tau: float
    paths: int
    sups: np.ndarray  # shape (paths, len(grid))
    rms: np.ndarray
    bound: np.ndarray


def random_mertens_sim(
    grid, tau: float, paths: int = 256, p: float = 0.5, seed: int = 0, threads: int = 1
) -> RandomMertensResult:
    """Walk M(n) = sum of i.i.d. +-1 with P(+1) = p; per path and per grid x,
    the exact sup over h in [ceil(x^tau), x] of |M(x+h) - M(x)| / h.

    Path i draws from a generator seeded with seed XOR i, so results do not
    depend on the thread count.
    """
    xs = tuple(int(x) for x in grid)
    if not xs or xs[0] < 1 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ParameterError("grid must be nonempty, positive, strictly increasing")
    if paths < 1:
        raise ParameterError("need paths >= 1")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"bias p={p} outside [0, 1]")
    h_mins = [_h_floor(x, tau) for x in xs]
    n_max = 2 * xs[-1]

    def one(path: int) -> np.ndarray:
        rng = np.random.default_rng(seed ^ path)
        steps = np.where(rng.random(n_max) < p, 1, -1)
        walk = np.concatenate([[0], np.cumsum(steps, dtype=np.int64)])
        out = np.empty(len(xs))
        for i, x in enumerate(xs):
            hs = np.arange(h_mins[i], x + 1, dtype=np.int64)
            out[i] = np.max(np.abs(walk[x + hs] - walk[x]) / hs)
        return out

    sups = np.array(map_indexed(one, paths, threads))
    rms = np.sqrt(np.mean(sups**2, axis=0))
    bound = (math.sqrt(2) + 1) * np.asarray(xs, dtype=np.float64) ** (0.5 - tau)
    return RandomMertensResult(xs, float(tau), int(paths), sups, rms, bound)


# ---------------------------------------------------------------------------
# short-interval exponential sums


@dataclass(frozen=True)
class ZhanResult:
    """Double sup of |(1/h) sum_{x<n<=x+h} v(n) e^(in theta)| over a dyadic
    h ladder and an equispaced theta grid; a lower bound with the grid
    parameters recorded."""

    x: int
    tau: float
    thetas: int
    h_values: tuple[int, ...]
    per_h: np.ndarray
    theta0_values: np.ndarray
    sup: float
    argmax_h: int
    argmax_theta: float


def zhan_sup(table: ArithmeticTable, x: int, tau: float, thetas: int = 64) -> ZhanResult:
    x = int(x)
    if x < 1:
        raise ParameterError("need x >= 1")
    if thetas < 1:
        raise ParameterError("need at least one theta grid point")
    h_min = _h_floor(x, tau)
    if table.lo > 1 or table.hi < 2 * x:
        raise ParameterError(
            f"table covers [{table.lo}, {table.hi}] but values on [1, {2 * x}] are needed"
        )
    h_values = [h_min]
    while h_values[-1] < x:
        h_values.append(min(2 * h_values[-1], x))
    window = _table_head(table, 2 * x)[x:].astype(np.float64)
    ns = np.arange(x + 1, 2 * x + 1, dtype=np.float64)
    theta_grid = 2 * math.pi * np.arange(thetas) / thetas
    per_h, theta0_vals = [], []
    sup, argmax_h, argmax_theta = -1.0, h_values[0], 0.0
    for h in h_values:
        v, nn = window[:h], ns[:h]
        best_h, best_theta = -1.0, 0.0
        for theta in theta_grid:
            s = float(np.abs(np.dot(v, np.exp(1j * theta * nn)))) / h
            if theta == 0.0:
                theta0_vals.append(s)
            if s > best_h:
                best_h, best_theta = s, float(theta)
        per_h.append(best_h)
        if best_h > sup:
            sup, argmax_h, argmax_theta = best_h, h, best_theta
    return ZhanResult(
        x, float(tau), int(thetas), tuple(h_values),
        np.array(per_h), np.array(theta0_vals), sup, argmax_h, argmax_theta,
    )
