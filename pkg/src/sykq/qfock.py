"""Truncated q-deformed Fock space and the scalar continued-fraction Cauchy transform.

Vectors are expanded in the raw word basis (tensor products of orthonormal
letters ``h_1 .. h_p``); the q-inner product is carried separately as a
block-diagonal Gram matrix. Creation prepends a letter, annihilation uses the
explicit formula ``a(h) h_1..h_n = sum_r q^(r-1) <h, h_r> h_1..^h_r..h_n``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

Word = tuple[int, ...]


def inversions(perm: Sequence[int]) -> int:
    return sum(1 for a, b in itertools.combinations(range(len(perm)), 2) if perm[a] > perm[b])


def q_inner_bruteforce(u: Word, v: Word, q: float) -> float:
    """Definition of <u, v>_q as a sum over all permutations; for small degree only."""
    if len(u) != len(v):
        return 0.0
    total = 0.0
    for sigma in itertools.permutations(range(len(u))):
        if all(u[r] == v[sigma[r]] for r in range(len(u))):
            total += q ** inversions(sigma)
    return total


@lru_cache(maxsize=None)
def _q_inner(u: Word, v: Word, q: float) -> float:
    if len(u) != len(v):
        return 0.0
    if not u:
        return 1.0
    # <h (x) u', v> = <u', a(h) v>
    h, rest = u[0], u[1:]
    total = 0.0
    for r, letter in enumerate(v):
        if letter == h:
            total += q**r * _q_inner(rest, v[:r] + v[r + 1:], q)
    return total


def q_inner(u: Sequence[int], v: Sequence[int], q: float) -> float:
    """q-deformed inner product of two words over orthonormal letters."""
    if abs(q) > 1:
        raise ValueError("need |q| <= 1")
    return _q_inner(tuple(u), tuple(v), float(q))


@dataclass
class FockOperators:
    """Truncated creation/annihilation matrices on words of degree <= d.

    ``create[i]`` and ``annihilate[i]`` are the matrices of a*(h_{i+1}) and
    a(h_{i+1}) in the word basis ``words``; ``gram`` is the q-inner product
    on that basis.
    """

    p: int
    q: float
    d: int
    words: list[Word]
    create: list[np.ndarray]
    annihilate: list[np.ndarray]
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.words)

    def degree_slice(self, j: int) -> slice:
        start = sum(self.p**i for i in range(j))
        return slice(start, start + self.p**j)

    def s(self, i: int) -> np.ndarray:
        """s_q(h_i) = a(h_i) + a*(h_i) for a 1-based color ``i``."""
        return self.annihilate[i - 1] + self.create[i - 1]

    def vacuum(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[0] = 1.0
        return e


def build_operators(p: int, q: float, d: int) -> FockOperators:
    """Matrices of a*(h_i), a(h_i) on the span of words of degree <= d."""
    if abs(q) >= 1:
        raise ValueError(
            "q-Fock truncation needs |q| < 1 (the Gram form is degenerate at "
            "q = +-1); use qmoments.q_wick_moment for those moments"
        )
    if d < 1 or p < 1:
        raise ValueError("need p >= 1 and d >= 1")
    return _build(p, float(q), d)


@lru_cache(maxsize=32)
def _build(p: int, q: float, d: int) -> FockOperators:
    words: list[Word] = []
    for j in range(d + 1):
        words.extend(itertools.product(range(1, p + 1), repeat=j))
    pos = {w: i for i, w in enumerate(words)}
    dim = len(words)
    create, annihilate = [], []
    for h in range(1, p + 1):
        A_star = np.zeros((dim, dim))
        A = np.zeros((dim, dim))
        for w, col in pos.items():
            if len(w) < d:
                A_star[pos[(h,) + w], col] = 1.0
            for r, letter in enumerate(w):
                if letter == h:
                    A[pos[w[:r] + w[r + 1:]], col] += q**r
        create.append(A_star)
        annihilate.append(A)
    gram = np.zeros((dim, dim))
    start = 0
    for j in range(d + 1):
        block = words[start:start + p**j]
        for a, u in enumerate(block):
            for b in range(a, len(block)):
                gram[start + a, start + b] = gram[start + b, start + a] = _q_inner(u, block[b], q)
        start += p**j
    return FockOperators(p, q, d, words, create, annihilate, gram)


def vacuum_moment(eps: Sequence[int], q: float, d: int | None = None) -> float:
    """<Omega, s_q(h_eps(1)) ... s_q(h_eps(k)) Omega>_q with colors 1..p."""
    eps = tuple(eps)
    k = len(eps)
    if d is None:
        d = max(k // 2, 1)
    if d < k // 2:
        raise ValueError(f"truncation degree {d} < k/2 = {k // 2} would cut live paths")
    if not eps:
        return 1.0
    ops = build_operators(max(eps), q, d)
    vec = ops.vacuum()
    for c in reversed(eps):
        vec = ops.s(c) @ vec
    # Omega is orthogonal to every higher degree and has norm one
    return float(vec[0])


def q_integer(j: int, q: float) -> float:
    """[j]_q = 1 + q + ... + q^(j-1)."""
    return sum(q**i for i in range(j))


def cauchy_continued_fraction(z, q: float, depth: int = 500):
    """Depth-truncated continued fraction for the q-Gaussian Cauchy transform.

    G(z) = 1 / (z - [1]_q / (z - [2]_q / (z - ...))) evaluated from the
    deepest level outward. ``z`` may be a scalar or an array; every point
    must lie in the open upper half-plane.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("cauchy_continued_fraction needs Im z > 0")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    tail = np.zeros_like(z)
    for j in range(depth - 1, 0, -1):
        tail = q_integer(j, q) / (z - tail)
    out = 1.0 / (z - tail)
    return out.item() if out.ndim == 0 else out


def continued_fraction_moments(q: float, depth: int, order: int) -> np.ndarray:
    """Taylor coefficients m_0..m_order of G(1/w)/w from the truncated fraction.

    The same depth-truncated fraction as :func:`cauchy_continued_fraction`,
    expanded as a power series in w with ``1/(1 - c_j w^2 / (1 - ...))``.
    """
    size = order + 1

    def inv_one_minus(t: np.ndarray) -> np.ndarray:
        # 1/(1 - t) for a series t with zero constant term
        out = np.zeros(size)
        out[0] = 1.0
        for i in range(1, size):
            out[i] = np.dot(t[1:i + 1], out[i - 1::-1][:i])
        return out

    tail = np.zeros(size)
    for j in range(depth - 1, 0, -1):
        shifted = np.zeros(size)
        shifted[2:] = inv_one_minus(tail)[:size - 2]
        tail = q_integer(j, q) * shifted
    return inv_one_minus(tail)


def semicircle_cauchy(z):
    """Closed form (z - sqrt(z - 2) sqrt(z + 2)) / 2 of the standard semicircle."""
    z = np.asarray(z, dtype=complex)
    out = (z - np.sqrt(z - 2) * np.sqrt(z + 2)) / 2
    return out.item() if out.ndim == 0 else out
