"""Combinatorial oracles for q-Gaussian limits and exact finite-n SYK sums.

Limit formulas (q-Wick moments, q-Brownian mixed moments, fluctuation
limits) are finite sums over pair partitions. Finite-n quantities are sums
of traces over coupling index assignments; their summands are +-1, so they
are returned as exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .majorana import MultiIndex, psi_table
from .partitions import (
    IntervalPartition,
    PairPartition,
    SetPartition,
    crossings,
    double_factorial,
    enumerate_set_partitions,
    join,
    kernel,
    mobius_to_top,
    pair_partitions,
)

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    """A brute-force sum would need more trace evaluations than allowed."""


@dataclass(frozen=True)
class FiniteModel:
    """SYK size parameters: n Majoranas, interaction order q_n (``q``)."""

    n: int
    q: int

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if not 1 <= self.q <= self.n // 2:
            raise ValueError(f"need 1 <= q_n <= n/2, got q_n={self.q}, n={self.n}")

    @property
    def size(self) -> int:
        """|I_n| = binomial(n, q_n)."""
        return math.comb(self.n, self.q)

    @property
    def lam(self) -> float:
        return self.q**2 / self.n


@dataclass(frozen=True)
class QParameter:
    """Crossing weight q = +-exp(-2 lambda), sign set by the parity of q_n."""

    q: float
    lam: float | None = None
    parity: str | None = None

    @classmethod
    def from_lambda(cls, lam: float, parity: str = "even") -> "QParameter":
        if parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
        if lam < 0:
            raise ValueError("lambda must be nonnegative")
        mag = 0.0 if math.isinf(lam) else math.exp(-2 * lam)
        return cls(mag if parity == "even" else -mag, lam, parity)


def q_from_model(n: int, q_n: int) -> QParameter:
    """Finite-n proxy: lambda_n = q_n^2 / n and q = +-exp(-2 lambda_n)."""
    model = FiniteModel(n, q_n)
    return QParameter.from_lambda(model.lam, "even" if q_n % 2 == 0 else "odd")


@dataclass(frozen=True)
class FluctuationSpec:
    """Interval sizes (k_1, ..., k_m) and a color word eps of length sum(k_i)."""

    sizes: tuple[int, ...]
    eps: tuple[int, ...]
    theta: IntervalPartition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "eps", tuple(self.eps))
        theta = IntervalPartition(self.sizes)
        if theta.k != len(self.eps):
            raise ValueError(f"sizes sum to {theta.k} but eps has length {len(self.eps)}")
        object.__setattr__(self, "theta", theta)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def k(self) -> int:
        return len(self.eps)

    def words(self) -> list[tuple[int, ...]]:
        """The restrictions eps|T_i, one per interval."""
        return [tuple(self.eps[t - 1] for t in T) for T in self.theta.intervals]


# ---------------------------------------------------------------------------
# limit formulas


def _admissible(labels: tuple) -> Iterator[list[tuple[int, int]]]:
    """Pairings of positions 1..k whose blocks join equal labels."""

    def rec(rest: tuple[int, ...]):
        if not rest:
            yield []
            return
        first, tail = rest[0], rest[1:]
        for j, partner in enumerate(tail):
            if labels[partner - 1] == labels[first - 1]:
                for sub in rec(tail[:j] + tail[j + 1:]):
                    yield [(first, partner)] + sub

    if len(labels) % 2 == 0:
        yield from rec(tuple(range(1, len(labels) + 1)))


def admissible_pairings(eps: Sequence) -> list[PairPartition]:
    """All pi in P_2(k) with pi <= ker(eps)."""
    return [PairPartition(len(eps), tuple(p)) for p in _admissible(tuple(eps))]


@lru_cache(maxsize=4096)
def _wick_histogram(rgs: tuple[int, ...]) -> tuple[int, ...]:
    hist: Counter[int] = Counter()
    for p in _admissible(rgs):
        hist[crossings(PairPartition(len(rgs), tuple(p)))] += 1
    if not hist:
        return ()
    top = max(hist)
    return tuple(hist.get(j, 0) for j in range(top + 1))


def wick_polynomial(eps: Sequence) -> tuple[int, ...]:
    """Coefficients c_j = #{pi <= ker eps : cr(pi) = j}; empty tuple means 0."""
    return _wick_histogram(kernel(eps).rgs)


def _poly(coeffs: Sequence[int], q):
    # q**0 == 1 also for q == 0, which is the convention we need
    return sum(c * q**j for j, c in enumerate(coeffs))


def q_wick_moment(eps: Sequence, q):
    """Sum of q^cr(pi) over pair partitions pi <= ker(eps); 0 for odd length.

    ``q`` may be a float, int or Fraction; the result has the same type.
    """
    coeffs = wick_polynomial(eps)
    return _poly(coeffs, q) if coeffs else 0 * q


def q_brownian_moment(times: Sequence[float], q):
    """tau(S_q(t_1) ... S_q(t_k)): pairings weighted by q^cr times min-covariances."""
    times = tuple(times)
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    total = 0 * q
    for pi in pair_partitions(len(times)):
        w = q ** crossings(pi)
        for a, b in pi.blocks:
            w = w * min(times[a - 1], times[b - 1])
        total = total + w
    return total


def _connects(pi: SetPartition, theta: IntervalPartition) -> bool:
    return len(join(pi, theta.partition())) == 1


@lru_cache(maxsize=1024)
def _within_interval_pairings(sizes: tuple[int, ...]) -> tuple[tuple[PairPartition, int], ...]:
    """Every pi' <= theta, built as a product of per-interval pairings, with cr(pi')."""
    theta = IntervalPartition(sizes)
    per_interval = []
    for T in theta.intervals:
        if len(T) % 2:
            return ()
        offset = T[0] - 1
        per_interval.append([
            tuple((a + offset, b + offset) for a, b in p.blocks)
            for p in pair_partitions(len(T))
        ])
    out = []
    for combo in itertools.product(*per_interval):
        pi2 = PairPartition(theta.k, tuple(blk for part in combo for blk in part))
        out.append((pi2, crossings(pi2)))
    return tuple(out)


def fluctuation_terms(spec: FluctuationSpec) -> list[tuple[PairPartition, PairPartition, int]]:
    """All (pi, pi', cr(pi')) contributing to the fluctuation limit of ``spec``."""
    primes = _within_interval_pairings(spec.sizes)
    if not primes:
        return []
    target = spec.k // 2 - spec.m + 1
    candidates = [p for p in admissible_pairings(spec.eps) if _connects(p, spec.theta)]
    return [
        (pi, pi2, cr2)
        for pi in candidates
        for pi2, cr2 in primes
        if len(join(pi, pi2)) == target
    ]


def fluctuation_limit(spec: FluctuationSpec, q):
    """Limit of |I_n|^(m-1) c_m(tr H_{eps_1}, ..., tr H_{eps_m}).

    Double sum of q^cr(pi') over pairs (pi, pi') with pi v theta = 1_k,
    pi' <= theta, pi <= ker eps and |pi v pi'| = k/2 - m + 1.
    """
    total = 0 * q
    for _, _, cr2 in fluctuation_terms(spec):
        total = total + q**cr2
    return total


# ---------------------------------------------------------------------------
# exact finite-n sums


def _check_budget(evaluations: int, budget: int):
    if evaluations > budget:
        raise BudgetExceeded(
            f"brute force needs {evaluations:.3g} trace evaluations, budget is "
            f"{budget:.3g}; reduce n or k, or raise the budget explicitly"
        )


_GRID_CELLS = 1 << 22


def _count_block_assignments(job):
    """Signed trace count over a slab of block assignments (worker entry point).

    ``job`` = (n, q, positions, n_free, fixed, outer_slice, distinct).
    ``positions[j]`` names the block occupying word position j; blocks
    ``0..n_free-1`` range over all of I_n, ``fixed`` maps further block ids to
    a fixed rank. The last free block is vectorized, the one before it is
    vectorized in chunks, earlier blocks are looped. ``outer_slice`` limits the
    first free block. Returns (plus, minus, imaginary, other) counts.
    """
    n, q, positions, n_free, fixed, outer, distinct = job
    table = psi_table(n, q)
    N = len(table)
    plus = minus = imag = zero = 0
    looped = max(n_free - 2, 0)
    ranges = [range(N)] * looped
    if looped and outer is not None:
        ranges[0] = range(*outer)
    for head in itertools.product(*ranges):
        if n_free >= 2:
            lo, hi = (0, N) if (looped or outer is None) else outer
            step = max(1, _GRID_CELLS // N)
            chunks = [(a, min(a + step, hi)) for a in range(lo, hi, step)]
        else:
            chunks = [(0, 1)]
        for a, b in chunks:
            values: dict[int, np.ndarray] = {}
            for blk, rank in fixed.items():
                values[blk] = np.array(rank)
            for i, rank in enumerate(head):
                values[i] = np.array(rank)
            if n_free >= 2:
                values[n_free - 2] = np.arange(a, b)[:, None]
                values[n_free - 1] = np.arange(N)[None, :]
            elif n_free == 1:
                values[0] = np.arange(N)
            x, z, ph = table.word(values[blk] for blk in positions)
            x, z, ph = np.broadcast_arrays(x, z, ph)
            ident = (x == 0) & (z == 0)
            if distinct:
                vals = [values[i] for i in range(n_free)]
                mask = np.ones(ident.shape, dtype=bool)
                for u in range(len(vals)):
                    for v in range(u + 1, len(vals)):
                        mask &= np.broadcast_to(vals[u] != vals[v], mask.shape)
                ident &= mask
                zero += int(mask.sum()) - int(ident.sum())
            else:
                zero += int(ident.size - ident.sum())
            plus += int(np.count_nonzero(ident & (ph == 0)))
            minus += int(np.count_nonzero(ident & (ph == 2)))
            imag += int(np.count_nonzero(ident & (ph % 2 == 1)))
    return plus, minus, imag, zero


def _signed_sum(model: FiniteModel, positions: tuple[int, ...], n_free: int,
                fixed: dict[int, int] | None = None, distinct: bool = False,
                workers: int = 1) -> int:
    fixed = dict(fixed or {})
    N = model.size
    jobs = []
    if workers > 1 and n_free >= 2:
        cuts = np.linspace(0, N, workers + 1).astype(int)
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b > a:
                jobs.append((model.n, model.q, positions, n_free, fixed, (int(a), int(b)), distinct))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_block_assignments, jobs))
    else:
        results = [_count_block_assignments(
            (model.n, model.q, positions, n_free, fixed, None, distinct))]
    plus = sum(r[0] for r in results)
    minus = sum(r[1] for r in results)
    imag = sum(r[2] for r in results)
    if imag:
        raise ArithmeticError("imaginary traces in a sum that should be real")
    return plus - minus


def _block_positions(pi: SetPartition) -> tuple[int, ...]:
    return pi.rgs


def s_pi(pi: PairPartition, model: FiniteModel, budget: int = DEFAULT_BUDGET,
         workers: int = 1) -> Fraction:
    """S(pi, n) = |I_n|^(-k/2) * sum over alpha with ker(alpha) >= pi of tr(Psi_alpha).

    Brute force over one multi-index per block of ``pi``.
    """
    if not pi.is_pairing():
        raise ValueError("s_pi needs a pair partition")
    b = len(pi)
    N = model.size
    _check_budget(N**b, budget)
    if b == 0:
        return Fraction(1)
    total = _signed_sum(model, _block_positions(pi), b, workers=workers)
    return Fraction(total, N**b)


def s_pi_restricted(pi: PairPartition, V: Sequence[int], R: MultiIndex | Sequence[int],
                    model: FiniteModel, budget: int = DEFAULT_BUDGET) -> Fraction:
    """The sum defining S(pi, n) with alpha(V) = R held fixed, over |I_n|^((k-2)/2)."""
    V = tuple(sorted(V))
    if V not in pi.blocks:
        raise ValueError(f"{V} is not a block of {pi}")
    if not isinstance(R, MultiIndex):
        R = MultiIndex(tuple(R), model.n)
    if R.n != model.n or R.q != model.q:
        raise ValueError("R does not belong to this model's index set")
    table = psi_table(model.n, model.q)
    rank = table.indices.index(R)
    b = len(pi)
    N = model.size
    _check_budget(N ** (b - 1), budget)
    vb = pi.blocks.index(V)
    # relabel blocks so the fixed one gets the last id
    order = [i for i in range(b) if i != vb] + [vb]
    relabel = {old: new for new, old in enumerate(order)}
    positions = tuple(relabel[blk] for blk in pi.rgs)
    total = _signed_sum(model, positions, b - 1, fixed={b - 1: rank})
    return Fraction(total, N ** (b - 1))


def gaussian_moment(m: int) -> int:
    """E[J^m] for a standard Gaussian."""
    return 0 if m % 2 else double_factorial(m - 1)


def exact_finite_n_moment(eps: Sequence, model: FiniteModel,
                          coupling_moment: Callable[[int], Fraction | int] = gaussian_moment,
                          budget: int = DEFAULT_BUDGET) -> Fraction:
    """E[tr(H_{eps(1)} ... H_{eps(k)})] exactly, for independent copies per color.

    Sums over the exact kernel sigma = ker(alpha): each sigma carries the
    coupling expectation prod_B prod_color E[J^{#color in B}] and is summed
    over injective multi-index assignments to its blocks. With the default
    Gaussian law this equals the sum of S(pi, n) over pi <= ker(eps), but it
    is computed without going through pairings. ``coupling_moment(m)`` must
    return E[J^m] of the coupling law (exact types keep the result exact).
    """
    eps = tuple(eps)
    k = len(eps)
    if k == 0:
        return Fraction(1)
    N = model.size
    terms = []
    evaluations = 0
    for sigma in enumerate_set_partitions(k):
        weight = Fraction(1)
        for block in sigma.blocks:
            counts = Counter(eps[i - 1] for i in block)
            for c in counts.values():
                weight *= Fraction(coupling_moment(c))
            if weight == 0:
                break
        if weight == 0 or len(sigma) > N:
            continue
        terms.append((sigma, weight))
        evaluations += N ** len(sigma)
    _check_budget(evaluations, budget)
    total = Fraction(0)
    for sigma, weight in terms:
        signed = _signed_sum(model, sigma.rgs, len(sigma), distinct=True)
        total += weight * signed
    if k % 2 == 0:
        return total / N ** (k // 2)
    return _odd_normalize(total, N, k)


def _odd_normalize(total: Fraction, N: int, k: int) -> Fraction:
    if total == 0:
        return Fraction(0)
    # |I_n|^(k/2) is irrational for odd k unless N is a square
    root = math.isqrt(N)
    if root * root != N:
        raise ArithmeticError("odd-k moment is nonzero and not rational")
    return total / Fraction(root) ** k


def exact_finite_n_process_moment(times: Sequence, model: FiniteModel,
                                  budget: int = DEFAULT_BUDGET):
    """E[tr(H(t_1) ... H(t_k))] for Brownian couplings at finite n.

    Gaussian pairing expansion with covariances min(t_r, t_s), each pairing
    weighted by S(pi, n). Passing ``Fraction`` times gives an exact result.
    """
    times = tuple(times)
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    total = 0
    for pi in pair_partitions(len(times)):
        w = 1
        for a, c in pi.blocks:
            w = w * min(times[a - 1], times[c - 1])
        if w:
            total = total + w * s_pi(pi, model, budget)
    return total


def pairwise_sign_expectation(model: FiniteModel) -> Fraction:
    """E[(-1)^|Q ∩ R|] for independent uniform Q, R in I_n."""
    n, q = model.n, model.q
    num = sum((-1) ** j * math.comb(q, j) * math.comb(n - q, q - j) for j in range(q + 1))
    return Fraction(num, math.comb(n, q))


# ---------------------------------------------------------------------------
# classical cumulants


def classical_cumulant(moment: Callable[[tuple[int, ...]], float], m: int):
    """Joint classical cumulant c_m(a_0, ..., a_{m-1}) by Möbius inversion.

    ``moment(idx)`` returns E[prod_{i in idx} a_i] for a tuple of 0-based
    indices.
    """
    total = 0
    for sigma in enumerate_set_partitions(m):
        term = mobius_to_top(sigma)
        for block in sigma.blocks:
            term = term * moment(tuple(i - 1 for i in block))
        total = total + term
    return total


def frac_json(x: Fraction) -> dict:
    """Serialization used by the CLI: ``{"num": .., "den": .., "float": ..}``."""
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "float": float(x)}
