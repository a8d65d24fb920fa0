"""Monte Carlo sampling of static and Brownian SYK Hamiltonians.

Random numbers come from Philox streams keyed by ``(seed, stream tag, chunk
index)``, so a run is reproducible regardless of how chunks are scheduled.
All Monte Carlo figures carry a leave-one-batch-out jackknife error.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .majorana import MultiIndex, PsiTable, psi_table
from .qmoments import FiniteModel, FluctuationSpec, classical_cumulant, gaussian_moment

DEFAULT_SEED = 20190527
DENSE_DIM_LIMIT = 1 << 12

_STATIC, _PROCESS, _PROBES = 0, 1, 2


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class CouplingLaw:
    """A mean-zero, unit-variance coupling distribution.

    ``moment(m)`` gives E[J^m] and feeds the exact finite-n oracles; ``bound``
    is a uniform bound on |J| (``None`` for unbounded laws such as the
    Gaussian, which still has moments of all orders).
    """

    name: str
    draw: Callable[[np.random.Generator, tuple[int, ...]], np.ndarray] = field(repr=False)
    moment: Callable[[int], Fraction | int | float] = field(repr=False)
    bound: float | None = None

    @property
    def is_gaussian(self) -> bool:
        return self.name == "gaussian"


GAUSSIAN = CouplingLaw(
    "gaussian", lambda rng, shape: rng.standard_normal(shape), gaussian_moment, None
)
RADEMACHER = CouplingLaw(
    "rademacher",
    lambda rng, shape: 2.0 * rng.integers(0, 2, size=shape) - 1.0,
    lambda m: 1 if m % 2 == 0 else 0,
    1.0,
)


def discrete_law(values: Sequence[float], probs: Sequence[float], name: str = "discrete") -> CouplingLaw:
    """A bounded law on finitely many atoms; must have mean 0 and variance 1."""
    values = np.asarray(values, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if values.shape != probs.shape or np.any(probs < 0) or not math.isclose(probs.sum(), 1.0):
        raise ValueError("probs must be a probability vector matching values")
    mean = float(values @ probs)
    var = float(values**2 @ probs)
    if abs(mean) > 1e-12 or abs(var - 1.0) > 1e-12:
        raise ValueError(f"coupling law needs E[J]=0, E[J^2]=1; got {mean:.3g}, {var:.3g}")

    def draw(rng, shape):
        return rng.choice(values, size=shape, p=probs)

    return CouplingLaw(name, draw, lambda m: float(values**m @ probs), float(np.abs(values).max()))


LAWS = {"gaussian": GAUSSIAN, "rademacher": RADEMACHER}


@dataclass
class EstimatorConfig:
    """How traces are evaluated and how many Monte Carlo repetitions to run.

    ``mode`` is ``"dense"`` (exact traces, dimension <= 2**12),
    ``"hutchinson"`` (matrix-free with Rademacher probes) or ``"auto"``.
    """

    mode: str = "auto"
    n_samples: int = 100_000
    seed: int = DEFAULT_SEED
    batches: int = 20
    probes: int = 64
    chunk_size: int = 4096
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("auto", "dense", "hutchinson"):
            raise ValueError(f"unknown estimator mode {self.mode!r}")
        if self.probes < 1:
            raise ValueError("probe count must be >= 1")
        if self.batches < 2:
            raise ValueError("jackknife needs at least 2 batches")
        if self.n_samples < self.batches:
            raise ValueError("need at least one sample per jackknife batch")

    def resolve(self, model: FiniteModel) -> str:
        dim = 1 << (model.n // 2)
        if self.mode == "auto":
            return "dense" if dim <= DENSE_DIM_LIMIT else "hutchinson"
        if self.mode == "dense" and dim > DENSE_DIM_LIMIT:
            raise ValueError(f"dense mode limited to dimension {DENSE_DIM_LIMIT}, model has {dim}")
        return self.mode


@dataclass
class CumulantEstimate:
    value: float
    stderr: float
    n_samples: int
    target: str

    def z_score(self, reference: float) -> float:
        return (self.value - reference) / self.stderr if self.stderr > 0 else math.nan

    def agrees_with(self, reference: float, sigmas: float = 3.0) -> bool:
        return abs(self.value - reference) <= sigmas * self.stderr

    def to_record(self, model: FiniteModel, seed: int) -> dict:
        return {
            "target": self.target,
            "estimate": self.value,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "model": {"n": model.n, "q_n": model.q},
            "seed": seed,
        }


# ---------------------------------------------------------------------------
# Hamiltonian building blocks


class _Action:
    """Signed-permutation form of every Psi_R: (Psi_R v)[c] = coef[R, c] * v[c ^ x_R]."""

    _CACHE_LIMIT = 1 << 24

    def __init__(self, model: FiniteModel):
        self.model = model
        self.table: PsiTable = psi_table(model.n, model.q)
        self.dim = 1 << (model.n // 2)
        self.norm = 1.0 / math.sqrt(model.size)
        r = model.n // 2
        self._idx = np.arange(self.dim, dtype=np.int64)
        self._xs = _reverse_bits(self.table.x, r)
        self._zs = _reverse_bits(self.table.z, r)
        self._phase = (1j) ** self.table.phase
        self._terms = None
        if len(self.table) * self.dim <= self._CACHE_LIMIT:
            self._terms = [self._make_term(R) for R in range(len(self.table))]

    def _make_term(self, R: int) -> tuple[np.ndarray, np.ndarray]:
        src = self._idx ^ self._xs[R]
        parity = np.bitwise_count(src & self._zs[R]) & 1
        return src, self._phase[R] * (1 - 2 * parity.astype(np.int8))

    def term(self, R: int) -> tuple[np.ndarray, np.ndarray]:
        return self._terms[R] if self._terms is not None else self._make_term(R)

    @property
    def stack(self) -> np.ndarray:
        """Dense (N, D*D) matrices of all Psi_R, flattened row-major."""
        if not hasattr(self, "_stack"):
            N, D = len(self.table), self.dim
            st = np.zeros((N, D, D), dtype=complex)
            rows = np.arange(D)
            for R in range(N):
                src, coef = self.term(R)
                st[R, rows, src] = coef
            self._stack = st.reshape(N, D * D)
        return self._stack

    def dense(self, J: np.ndarray) -> np.ndarray:
        """Batch of dense H for couplings J of shape (B, N)."""
        N, D = len(self.table), self.dim
        if N * D * D <= self._CACHE_LIMIT:
            return (J @ self.stack).reshape(J.shape[0], D, D) * self.norm
        H = np.zeros((J.shape[0], D, D), dtype=complex)
        rows = np.arange(D)
        for R in range(N):
            src, coef = self.term(R)
            H[:, rows, src] += J[:, R, None] * coef[None, :]
        return H * self.norm

    def matvec(self, J: np.ndarray, v: np.ndarray) -> np.ndarray:
        """H v for one coupling vector J (N,) and probes v (D, m)."""
        out = np.zeros(v.shape, dtype=complex)
        for R in range(len(J)):
            src, coef = self.term(R)
            out += (J[R] * coef)[:, None] * v[src]
        return out * self.norm


def _reverse_bits(masks: np.ndarray, r: int) -> np.ndarray:
    out = np.zeros_like(masks)
    for j in range(r):
        out |= ((masks >> j) & 1) << (r - 1 - j)
    return out


@lru_cache(maxsize=8)
def _action(model: FiniteModel) -> _Action:
    return _Action(model)


# ---------------------------------------------------------------------------
# samples


@dataclass
class SykSample:
    """One draw of couplings J_R, stored in the lexicographic rank order of I_n."""

    model: FiniteModel
    couplings: np.ndarray
    seed: int
    law: CouplingLaw = GAUSSIAN

    def coupling(self, R: MultiIndex | Sequence[int]) -> float:
        if not isinstance(R, MultiIndex):
            R = MultiIndex(tuple(R), self.model.n)
        return float(self.couplings[psi_table(self.model.n, self.model.q).indices.index(R)])

    def hamiltonian(self) -> np.ndarray:
        """Dense H_{n,q_n}."""
        if (1 << (self.model.n // 2)) > DENSE_DIM_LIMIT:
            raise ValueError("dense Hamiltonian limited to dimension 2**12")
        return _action(self.model).dense(self.couplings[None, :])[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        flat = v.ndim == 1
        out = _action(self.model).matvec(self.couplings, v[:, None] if flat else v)
        return out[:, 0] if flat else out


def sample(model: FiniteModel, law: CouplingLaw = GAUSSIAN, seed: int = DEFAULT_SEED) -> SykSample:
    """Draw all |I_n| couplings i.i.d. from ``law``; deterministic in ``seed``."""
    J = law.draw(_rng(seed), (model.size,))
    return SykSample(model, np.asarray(J, dtype=float), seed, law)


@dataclass
class BrownianCouplings:
    """Brownian coupling paths J_R(t) sampled on a time grid; ``values`` is (T, N)."""

    model: FiniteModel
    times: np.ndarray
    values: np.ndarray
    seed: int

    def at(self, t: float) -> SykSample:
        j = int(np.flatnonzero(self.times == t)[0])
        return SykSample(self.model, self.values[j], self.seed)


def _check_grid(times: Sequence[float]) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be nonnegative and strictly increasing")
    return t


def _brownian(rng: np.random.Generator, grid: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    dt = np.diff(np.concatenate([[0.0], grid]))
    inc = rng.standard_normal(shape[:-1] + (len(grid), shape[-1])) * np.sqrt(dt)[:, None]
    return np.cumsum(inc, axis=-2)


def dynamical_sample(model: FiniteModel, times: Sequence[float], seed: int = DEFAULT_SEED) -> BrownianCouplings:
    """Independent Brownian paths for every R, built from Gaussian increments."""
    grid = _check_grid(times)
    vals = _brownian(_rng(seed, _PROCESS), grid, (model.size,))
    return BrownianCouplings(model, grid, vals, seed)


# ---------------------------------------------------------------------------
# traces


def _word_trace_dense(H: dict[int, np.ndarray], word: Sequence[int]) -> np.ndarray:
    prod = H[word[0]]
    for c in word[1:]:
        prod = prod @ H[c]
    D = prod.shape[-1]
    return np.trace(prod, axis1=-2, axis2=-1).real / D


def _word_trace_hutchinson(act: _Action, J: dict[int, np.ndarray], word: Sequence[int],
                           rng: np.random.Generator, probes: int) -> tuple[float, float]:
    v = rng.integers(0, 2, size=(act.dim, probes)) * 2.0 - 1.0
    w = v.astype(complex)
    for c in reversed(word):
        w = act.matvec(J[c], w)
    per_probe = np.einsum("ip,ip->p", v, w).real / act.dim
    err = per_probe.std(ddof=1) / math.sqrt(probes) if probes > 1 else math.inf
    return float(per_probe.mean()), float(err)


def trace_power(smp: SykSample, k: int, config: EstimatorConfig | None = None,
                return_stderr: bool = False):
    """Normalized trace tr(H^k) of one sample.

    Exact in dense mode. In Hutchinson mode the result is an unbiased
    estimate; with ``return_stderr`` the probe standard error comes along
    (it is 0 for dense evaluation).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    config = config or EstimatorConfig()
    mode = config.resolve(smp.model)
    if mode == "dense":
        H = smp.hamiltonian()
        val = float(np.trace(np.linalg.matrix_power(H, k)).real / H.shape[0])
        err = 0.0
    else:
        val, err = _word_trace_hutchinson(
            _action(smp.model), {1: smp.couplings}, [1] * k,
            _rng(config.seed, _PROBES, smp.seed), config.probes)
    return (val, err) if return_stderr else val


# ---------------------------------------------------------------------------
# estimators


def _chunks(config: EstimatorConfig) -> list[tuple[int, int]]:
    n, c = config.n_samples, config.chunk_size
    return [(i, min(c, n - i * c)) for i in range((n + c - 1) // c)]


def _run_chunks(fn, config: EstimatorConfig) -> np.ndarray:
    chunks = _chunks(config)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(lambda c: fn(*c), chunks))
    else:
        parts = [fn(*c) for c in chunks]
    return np.concatenate(parts, axis=0)


def _static_traces(words: list[tuple[int, ...]], model: FiniteModel, law: CouplingLaw,
                   config: EstimatorConfig) -> np.ndarray:
    """Array (n_samples, len(words)) of tr(H_word) with independent copies per color."""
    mode = config.resolve(model)
    act = _action(model)
    colors = sorted({c for w in words for c in w})

    def chunk(idx: int, size: int) -> np.ndarray:
        J = {c: np.asarray(law.draw(_rng(config.seed, _STATIC, c, idx), (size, model.size)), float)
             for c in colors}
        if mode == "dense":
            H = {c: act.dense(J[c]) for c in colors}
            return np.stack([_word_trace_dense(H, w) for w in words], axis=1)
        rng = _rng(config.seed, _PROBES, idx)
        out = np.empty((size, len(words)))
        for s in range(size):
            Js = {c: J[c][s] for c in colors}
            for i, w in enumerate(words):
                out[s, i] = _word_trace_hutchinson(act, Js, w, rng, config.probes)[0]
        return out

    return _run_chunks(chunk, config)


def _batches(n: int, b: int) -> list[np.ndarray]:
    return np.array_split(np.arange(n), b)


def jackknife(data: np.ndarray, estimator: Callable[[np.ndarray], float], batches: int) -> tuple[float, float]:
    """Full-sample estimate and leave-one-batch-out jackknife standard error."""
    full = float(estimator(data))
    groups = _batches(len(data), batches)
    keep = np.ones(len(data), dtype=bool)
    loo = []
    for g in groups:
        keep[g] = False
        loo.append(estimator(data[keep]))
        keep[g] = True
    loo = np.asarray(loo, dtype=float)
    B = len(groups)
    err = math.sqrt((B - 1) / B * np.sum((loo - loo.mean()) ** 2))
    return full, err


def joint_kstat(X: np.ndarray) -> float:
    """Unbiased estimate of the joint cumulant of the columns of X (shape (N, m)).

    Exact k-statistics for m <= 4; higher orders fall back to the plug-in
    Möbius formula on sample moments, which is biased at O(1/N).
    """
    X = np.asarray(X, dtype=float)
    N, m = X.shape
    if m == 1:
        return float(X[:, 0].mean())
    d = X - X.mean(axis=0)
    S = lambda *cols: float(np.prod(d[:, list(cols)], axis=1).sum())
    if m == 2:
        return S(0, 1) / (N - 1)
    if m == 3:
        return N * S(0, 1, 2) / ((N - 1) * (N - 2))
    if m == 4:
        pairs = S(0, 1) * S(2, 3) + S(0, 2) * S(1, 3) + S(0, 3) * S(1, 2)
        return (N * (N + 1) * S(0, 1, 2, 3) - (N - 1) * pairs) / ((N - 1) * (N - 2) * (N - 3))
    return float(classical_cumulant(lambda idx: np.prod(X[:, list(idx)], axis=1).mean(), m))


def mc_moment(eps: Sequence[int], model: FiniteModel, law: CouplingLaw = GAUSSIAN,
              config: EstimatorConfig | None = None) -> CumulantEstimate:
    """Monte Carlo E[tr(H_{eps(1)} ... H_{eps(k)})], one independent copy per color."""
    config = config or EstimatorConfig()
    eps = tuple(eps)
    vals = _static_traces([eps], model, law, config)[:, 0]
    value, err = jackknife(vals, np.mean, config.batches)
    return CumulantEstimate(value, err, len(vals), f"E tr H_{''.join(map(str, eps))}")


def mc_fluctuation(spec: FluctuationSpec, model: FiniteModel, config: EstimatorConfig | None = None,
                   law: CouplingLaw = GAUSSIAN) -> CumulantEstimate:
    """|I_n|^(m-1) times the sample joint cumulant of tr(H_{eps_1}), ..., tr(H_{eps_m})."""
    if not law.is_gaussian:
        raise ValueError("the fluctuation limit is only established for centered Gaussian couplings")
    config = config or EstimatorConfig()
    Y = _static_traces(spec.words(), model, law, config)
    scale = float(model.size) ** (spec.m - 1)
    value, err = jackknife(Y, joint_kstat, config.batches)
    return CumulantEstimate(scale * value, scale * err, len(Y),
                            f"c_{spec.m} sizes={spec.sizes} eps={''.join(map(str, spec.eps))}")


def mc_process_moment(times: Sequence[float], model: FiniteModel,
                      config: EstimatorConfig | None = None) -> CumulantEstimate:
    """Monte Carlo E[tr(H(t_1) ... H(t_k))] for Brownian couplings."""
    config = config or EstimatorConfig()
    times = tuple(float(t) for t in times)
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    grid = np.array(sorted(set(times)))
    slot = {t: i for i, t in enumerate(grid)}
    word = [slot[t] for t in times]
    mode = config.resolve(model)
    act = _action(model)

    def chunk(idx: int, size: int) -> np.ndarray:
        J = _brownian(_rng(config.seed, _PROCESS, idx), grid, (size, model.size))
        if mode == "dense":
            H = {j: act.dense(J[:, j, :]) for j in set(word)}
            return _word_trace_dense(H, word)
        rng = _rng(config.seed, _PROBES, idx)
        return np.array([
            _word_trace_hutchinson(act, {j: J[s, j] for j in set(word)}, word, rng, config.probes)[0]
            for s in range(size)
        ])

    vals = _run_chunks(chunk, config)
    value, err = jackknife(vals, np.mean, config.batches)
    return CumulantEstimate(value, err, len(vals), f"E tr H(t) word={times}")
