"""Uniform random S-restricted compositions.

The first part k of a uniform composition of r has probability A_{r-k}/A_r
= c_{r-k} p^k / c_r.  Far from the end (r - k >= J, where c_r has settled to
floating precision) that is just p^k, so parts are drawn
i.i.d. from the limit kernel in bulk.  Once the remaining sum drops to R* or
below, per-row inverse-CDF tables built from exact counts take over.  Both
regimes are vectorised across compositions.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Union

import numpy as np

from .counting import _exact_counts, scaled_counts
from .part_set import PartSet, TruncatedPartSet
from .roots import principal_root

__all__ = [
    "Composition",
    "UnrepresentableError",
    "CompositionSampler",
    "make_generator",
    "sample_composition",
    "sample_truncated",
    "sample_log_products",
    "RNG_NAME",
    "SHARD_SIZE",
]

Universe = Union[PartSet, TruncatedPartSet]

RNG_NAME = "numpy.PCG64"
SHARD_SIZE = 10_000
_CHUNK = 4096
_CONVERGED_STEP = 1e-14
_HEAD_TAIL_MASS = 1e-17
_EXACT_ROW_LIMIT = 1500
_BUCKETS = 1 << 16


class UnrepresentableError(ValueError):
    pass


@dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...]

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def log_product(self) -> float:
        return math.fsum(math.log(k) for k in self.parts)

    def product(self) -> int:
        return math.prod(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for (seed, stream); distinct streams are independent."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


class CompositionSampler:
    """Exact uniform sampler over Λ_n (or Λ_n^β for a truncated part set)."""

    def __init__(self, universe: Universe, n: int):
        if n < 1:
            raise UnrepresentableError("n must be a positive integer")
        self.universe = universe
        self.n = n
        self.scale = 1
        if isinstance(universe, TruncatedPartSet):
            parts = universe.parts()
            d = reduce(math.gcd, parts)
            if n % d:
                raise UnrepresentableError(f"n={n} is not representable with parts {parts}")
            self.scale = d
            self._finite = [k // d for k in parts]
            self._m = n // d
            self.p = _finite_root(self._finite)
            self.max_part = max(self._finite)
        else:
            self._finite = None
            self._excluded = universe.excluded
            self._m = n
            self.p = principal_root(universe)
            self.max_part = None
        self._build()

    # construction ---------------------------------------------------------

    def _reduced_universe(self):
        if self._finite is None:
            return self.universe
        return _FiniteParts(tuple(self._finite))

    def _build(self):
        m, p = self._m, self.p
        uni = self._reduced_universe()
        self.c = _scaled(uni, m, p)
        if self.c[m] == 0.0:
            raise UnrepresentableError(f"n={self.n} is not representable in {self._describe()}")

        # limit kernel p^k over allowed parts, head + analytic geometric tail
        if self._finite is None:
            K = max(self._excluded[-1] + 1, math.ceil(math.log(_HEAD_TAIL_MASS) / math.log(p)))
            head = np.array(self.universe.parts_up_to(K))
            tail_mass = p ** (K + 1) / (1.0 - p)
        else:
            K = self.max_part
            head = np.array(self._finite)
            tail_mass = 0.0
        w = p ** head.astype(float)
        total = w.sum() + tail_mass
        self._head = head
        self._head_cdf = np.cumsum(w) / total
        self._head_K = K
        self._has_tail = tail_mass > 0
        # bucketed inversion: a bucket of u lying inside one cdf step resolves directly
        grid = np.arange(_BUCKETS + 1) / _BUCKETS
        idx = np.searchsorted(self._head_cdf, grid, side="right")
        self._bucket = np.where(idx[:-1] == idx[1:], idx[:-1], -1)

        if self._finite is None:
            # sum_{k in S} k p^k = p/(1-p)^2 - sum_{k in S̄} k p^k
            limit = 1.0 / (p / (1 - p) ** 2 - math.fsum(k * p**k for k in self._excluded))
        else:
            limit = 1.0 / math.fsum(k * p**k for k in self._finite)
        self.c_limit = limit
        # The weights only see ratios c_{r-k}/c_r, so convergence is judged by
        # consecutive steps; a slow drift from rounding in p is harmless.
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.abs(np.diff(self.c)) / self.c[1:]
        bad = np.nonzero(~(step <= _CONVERGED_STEP))[0] + 1
        J = int(bad[-1]) + 1 if len(bad) else 0
        self.J = J
        self.R = J + K  # phase-2 threshold
        rows = min(m, self.R)
        self._rows = rows
        width = rows if self._finite is None else min(rows, self.max_part)
        self._width = max(width, 1)
        self._row_cdf = self._row_tables(rows, self._width)

        need = m - self.R
        probs = np.diff(np.concatenate(([0.0], self._head_cdf)))
        mean = float(np.dot(self._head, probs))
        var = float(np.dot(self._head.astype(float) ** 2, probs)) - mean * mean
        # renewal count: mean need/mean, variance need var / mean^3
        sd = math.sqrt(max(need, 0) * var / mean**3)
        self._phase1_len = int(need / mean + 8 * sd + 16) if need > 0 else 0
        self._chunk = max(8, min(_CHUNK, 4_000_000 // max(1, self._phase1_len)))

    def _describe(self):
        return str(self.universe.to_json())

    def _allowed_mask(self, upto):
        mask = np.zeros(upto + 1, dtype=bool)
        if self._finite is None:
            mask[1:] = True
            for k in self._excluded:
                if k <= upto:
                    mask[k] = False
        else:
            for k in self._finite:
                if k <= upto:
                    mask[k] = True
        return mask

    def _row_tables(self, rows, width):
        """cdf[r, k-1] = P(first part <= k | remaining r), for r <= rows."""
        cdf = np.ones((rows + 1, width))
        allowed = self._allowed_mask(width)
        exact_upto = min(rows, _EXACT_ROW_LIMIT)
        if self._finite is None:
            A = _exact_counts(self.universe, exact_upto)
        else:
            A = _finite_counts(self._finite, exact_upto)
        p, c = self.p, self.c
        for r in range(1, rows + 1):
            kmax = min(r, width)
            probs = np.zeros(width)
            if c[r] == 0.0:
                continue
            for k in range(1, kmax + 1):
                if not allowed[k]:
                    continue
                if r <= exact_upto:
                    probs[k - 1] = A[r - k] / A[r]
                else:
                    probs[k - 1] = c[r - k] * p**k / c[r]
            s = probs.sum()
            row = np.cumsum(probs) / s
            last = np.nonzero(probs)[0][-1]
            row[last:] = 1.0
            cdf[r] = row
        return cdf

    # drawing --------------------------------------------------------------

    def _limit_draws(self, gen, shape):
        u = gen.random(shape)
        idx = self._bucket[(u * _BUCKETS).astype(np.intp)]
        amb = idx < 0
        if amb.any():
            idx[amb] = np.searchsorted(self._head_cdf, u[amb], side="right")
        out = np.empty(shape, dtype=np.int64)
        inside = idx < len(self._head)
        out[inside] = self._head[idx[inside]]
        if not inside.all():
            nt = int((~inside).sum())
            if self._has_tail:
                out[~inside] = self._head_K + gen.geometric(1.0 - self.p, nt)
            else:
                out[~inside] = self._head[-1]
        return out

    def _exact_step(self, r, gen):
        """One first-part draw from remaining r using the full row (slow path)."""
        p, c = self.p, self.c
        ks = np.nonzero(self._allowed_mask(r))[0]
        probs = c[r - ks] * p ** ks.astype(float)
        probs /= probs.sum()
        return int(ks[np.searchsorted(np.cumsum(probs), gen.random(), side="right").clip(0, len(ks) - 1)])

    def _phase1(self, count, gen):
        """Parts drawn while remaining > R; returns (list of arrays, remainders)."""
        m, R = self._m, self.R
        need = m - R
        if need <= 0:
            return [np.empty(0, dtype=np.int64)] * count, np.full(count, m, dtype=np.int64)
        L = self._phase1_len
        draws = self._limit_draws(gen, (count, L))
        cs = np.cumsum(draws, axis=1)
        hit = cs >= need  # remaining m - cs <= R
        reached = hit.any(axis=1)
        t = np.where(reached, hit.argmax(axis=1), L - 1)
        chunks, rem = [], np.empty(count, dtype=np.int64)
        for i in range(count):
            parts = draws[i, : t[i] + 1]
            r = m - int(cs[i, t[i]])
            if not reached[i] or r < self.J:
                parts, r = self._repair(list(parts), r, gen)
            chunks.append(parts)
            rem[i] = r
        return chunks, rem

    def _repair(self, parts, r, gen):
        """Slow path: extend a short phase-1 run, or redo a last draw that
        left the converged regime (r - k < J) with the exact row."""
        if r < self.J:
            r += parts.pop()
        while r > self.R:
            k = int(self._limit_draws(gen, 1)[0])
            if r - k < self.J:
                k = self._exact_step(r, gen)
            parts.append(k)
            r -= k
        return np.array(parts, dtype=np.int64), r

    def _phase2(self, rem, gen):
        """Finish every composition from its remainder using the row tables."""
        count = len(rem)
        r = rem.copy()
        cols = []
        active = r > 0
        while active.any():
            idx = np.nonzero(active)[0]
            u = gen.random(len(idx))
            rows = self._row_cdf[r[idx]]
            k = (rows <= u[:, None]).sum(axis=1) + 1
            step = np.zeros(count, dtype=np.int64)
            step[idx] = k
            cols.append(step)
            r = r - step
            active = r > 0
        if r.min() < 0:
            raise AssertionError("phase-2 table produced a part larger than the remainder")
        if not cols:
            return np.zeros((count, 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def _batch(self, count, gen):
        heads, rem = self._phase1(count, gen)
        tails = self._phase2(rem, gen)
        out = []
        for i in range(count):
            tail = tails[i]
            arr = np.concatenate((heads[i], tail[tail > 0]))
            out.append(arr * self.scale if self.scale != 1 else arr)
        return out

    def iter_parts(self, count: int, gen: np.random.Generator) -> Iterator[np.ndarray]:
        """Yield ``count`` independent uniform compositions as int arrays."""
        done = 0
        while done < count:
            b = min(self._chunk, count - done)
            yield from self._batch(b, gen)
            done += b

    def sample(self, gen: np.random.Generator) -> Composition:
        arr = next(self.iter_parts(1, gen))
        return Composition(tuple(int(k) for k in arr))

    def sample_many(self, count: int, gen: np.random.Generator) -> list[Composition]:
        return [Composition(tuple(int(k) for k in a)) for a in self.iter_parts(count, gen)]

    def log_products(self, count: int, gen: np.random.Generator, with_max: bool = False):
        """log B of ``count`` uniform compositions (and the largest part seen)."""
        out = np.empty(count)
        biggest = 0
        for i, a in enumerate(self.iter_parts(count, gen)):
            out[i] = np.log(a).sum()
            if with_max:
                biggest = max(biggest, int(a.max()))
        return (out, biggest) if with_max else out


@dataclass(frozen=True)
class _FiniteParts:
    """Internal finite part universe (used after gcd reduction)."""

    parts_tuple: tuple[int, ...]

    def parts(self):
        return list(self.parts_tuple)


def _finite_root(parts):
    if len(parts) == 1:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 - math.fsum(mid**k for k in parts) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scaled(uni, m, p):
    if isinstance(uni, _FiniteParts):
        ks = np.array(uni.parts())
        c = np.zeros(m + 1)
        c[0] = 1.0
        pk = p ** ks.astype(float)
        # exact zeros for small m come from integer counts
        exact = _finite_counts(ks, min(m, 200))
        for r in range(1, m + 1):
            if r <= 200:
                c[r] = exact[r] * p**r
            else:
                sel = ks <= r
                c[r] = np.dot(c[r - ks[sel]], pk[sel])
        return c
    return scaled_counts(uni, m, p).c


def _finite_counts(ks, m):
    A = [0] * (m + 1)
    A[0] = 1
    for r in range(1, m + 1):
        A[r] = sum(A[r - k] for k in ks if k <= r)
    return A


def sample_composition(ps: PartSet, n: int, gen: np.random.Generator) -> Composition:
    """One uniform composition of n with parts in S."""
    return CompositionSampler(ps, n).sample(gen)


def sample_truncated(tps: TruncatedPartSet, n: int, gen: np.random.Generator) -> Composition:
    """One uniform composition of n with parts in S ∩ [1, β]."""
    return CompositionSampler(tps, n).sample(gen)


def sample_log_products(
    universe: Universe, n: int, count: int, seed: int, threads: int = 1, with_max: bool = False
):
    """log B for ``count`` samples, sharded into fixed-size streams.

    Shard i always uses stream i, so the output does not depend on ``threads``.
    """
    sampler = CompositionSampler(universe, n)
    sizes = [min(SHARD_SIZE, count - s) for s in range(0, count, SHARD_SIZE)]

    def run(i):
        return sampler.log_products(sizes[i], make_generator(seed, i), with_max=True)

    if threads <= 1 or len(sizes) <= 1:
        shards = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            shards = list(ex.map(run, range(len(sizes))))
    logs = np.concatenate([s[0] for s in shards]) if shards else np.empty(0)
    if with_max:
        return logs, max((s[1] for s in shards), default=0)
    return logs
