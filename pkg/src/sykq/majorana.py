"""Majorana fermions and SYK monomials as signed Pauli strings.

A :class:`PauliString` on ``r`` qubit sites is ``i**phase * prod_j X_j^x_j Z_j^z_j``
where bit ``j`` of ``x``/``z`` refers to site ``j`` (site 0 is the leftmost
tensor factor). With this ordering a site with both bits set holds
``XZ = -iY``, so ``Y`` itself is stored as ``x = z = 1`` with one extra unit of
phase. Multiplying two strings only needs two XORs and one popcount.

Everything here is exact integer bit algebra; :func:`dense_matrix` is the
small-``n`` oracle used by the tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

DENSE_CAP = 7

_PHASES = (1, 1j, -1, -1j)


class SiteMismatch(ValueError):
    """Raised when combining Pauli strings that act on different numbers of sites."""


@dataclass(frozen=True)
class PauliString:
    r: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)
        if self.x >> self.r or self.z >> self.r:
            raise ValueError(f"masks exceed {self.r} sites")

    @classmethod
    def identity(cls, r: int) -> "PauliString":
        return cls(r)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        """Build from a site-by-site label such as ``"XZY1"`` (``1``/``I`` is identity)."""
        x = z = 0
        for j, ch in enumerate(label):
            if ch == "X":
                x |= 1 << j
            elif ch == "Z":
                z |= 1 << j
            elif ch == "Y":
                x |= 1 << j
                z |= 1 << j
                phase += 1
            elif ch not in "1I":
                raise ValueError(f"unknown Pauli letter {ch!r}")
        return cls(len(label), x, z, phase)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def is_hermitian(self) -> bool:
        return self.phase % 2 == (self.x & self.z).bit_count() % 2

    def letters(self) -> list[str]:
        out = []
        for j in range(self.r):
            bx, bz = (self.x >> j) & 1, (self.z >> j) & 1
            out.append("1XZY"[bx + 2 * bz])
        return out

    def __str__(self) -> str:
        # Y sites absorb one unit of phase each, so the printed prefix is the
        # coefficient in front of the literal X/Y/Z word.
        shown = (self.phase - (self.x & self.z).bit_count()) % 4
        return f"i^{shown} · " + " ".join(self.letters())


def multiply(P: PauliString, Q: PauliString) -> PauliString:
    """Exact product ``P Q``."""
    if P.r != Q.r:
        raise SiteMismatch(f"cannot multiply strings on {P.r} and {Q.r} sites")
    # moving Z^{z_P} past X^{x_Q} costs a sign per shared site
    phase = P.phase + Q.phase + 2 * (P.z & Q.x).bit_count()
    return PauliString(P.r, P.x ^ Q.x, P.z ^ Q.z, phase)


def normalized_trace(P: PauliString) -> complex:
    """Trace divided by the dimension ``2**r``: zero unless ``P`` is a multiple of I."""
    return P.coefficient if P.is_identity() else 0


@dataclass(frozen=True)
class MultiIndex:
    """A strictly increasing tuple of Majorana labels in [1, n]."""

    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        e = tuple(int(i) for i in self.entries)
        object.__setattr__(self, "entries", e)
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if not 1 <= len(e) <= self.n // 2:
            raise ValueError(f"need 1 <= q_n <= n/2, got q_n={len(e)} for n={self.n}")
        if any(a >= b for a, b in zip(e, e[1:])) or e[0] < 1 or e[-1] > self.n:
            raise ValueError(f"{e} is not strictly increasing inside [1, {self.n}]")

    @property
    def q(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def overlap(self, other: "MultiIndex") -> int:
        return len(set(self.entries) & set(other.entries))


def index_set(n: int, q: int) -> list[MultiIndex]:
    """All of I_n in lexicographic order (the rank order used everywhere else)."""
    return [MultiIndex(c, n) for c in itertools.combinations(range(1, n + 1), q)]


@dataclass(frozen=True)
class MajoranaRep:
    """The tensor-product realization of n Majoranas on r = n/2 sites."""

    n: int

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")

    @property
    def r(self) -> int:
        return self.n // 2

    @cached_property
    def generators(self) -> tuple[PauliString, ...]:
        return tuple(_majorana(i, self.n) for i in range(1, self.n + 1))


def _majorana(i: int, n: int) -> PauliString:
    r = n // 2
    j = i - 1 if i <= r else i - r - 1
    zstring = (1 << j) - 1
    if i <= r:
        return PauliString(r, 1 << j, zstring, 0)
    # Y on site j: x = z = 1 plus one unit of phase, but Z on the earlier
    # sites multiplies first, which is already the X^x Z^z normal order.
    return PauliString(r, 1 << j, zstring | (1 << j), 1)


def majorana(i: int, rep: MajoranaRep) -> PauliString:
    """The Majorana psi_i (1-based) of ``rep``."""
    if not 1 <= i <= rep.n:
        raise IndexError(f"Majorana index {i} outside [1, {rep.n}]")
    return rep.generators[i - 1]


def _as_multi(R, n: int | None = None) -> MultiIndex:
    if isinstance(R, MultiIndex):
        return R
    if n is None:
        raise TypeError("a plain tuple needs an explicit n")
    return MultiIndex(tuple(R), n)


def psi_R(R: MultiIndex | Sequence[int], rep: MajoranaRep) -> PauliString:
    """Psi_R = psi_{i_1} ... psi_{i_q} * i**floor(q/2); hermitian and squares to I."""
    R = _as_multi(R, rep.n)
    if R.n != rep.n:
        raise ValueError(f"multi-index for n={R.n} used with rep n={rep.n}")
    out = PauliString.identity(rep.r)
    for i in R:
        out = multiply(out, rep.generators[i - 1])
    return PauliString(out.r, out.x, out.z, out.phase + R.q // 2)


def commutation_sign(Q: MultiIndex, R: MultiIndex) -> int:
    """Sign s with Psi_Q Psi_R = s Psi_R Psi_Q, namely (-1)^(q + |Q ∩ R|)."""
    if Q.n != R.n or Q.q != R.q:
        raise ValueError("multi-indices must share n and q_n")
    if Q == R:
        raise ValueError("commutation sign is defined for distinct multi-indices")
    return -1 if (Q.q + Q.overlap(R)) % 2 else 1


def word_product(alphas: Sequence[MultiIndex]) -> PauliString:
    """Ordered product Psi_{alpha(1)} ... Psi_{alpha(k)} by left-to-right multiplication."""
    if not alphas:
        raise ValueError("empty word has no site count; pass at least one multi-index")
    n, q = alphas[0].n, alphas[0].q
    if any(a.n != n or a.q != q for a in alphas):
        raise ValueError("all multi-indices in a word must share n and q_n")
    rep = MajoranaRep(n)
    out = PauliString.identity(rep.r)
    for a in alphas:
        out = multiply(out, _psi_cached(a))
    return out


@lru_cache(maxsize=1 << 16)
def _psi_cached(R: MultiIndex) -> PauliString:
    return psi_R(R, MajoranaRep(R.n))


def trace_word(alphas: Sequence[MultiIndex]) -> int | complex:
    """Exact normalized trace of Psi_{alpha(1)} ... Psi_{alpha(k)}.

    Real values come back as ``int`` (0, 1 or -1); a purely imaginary trace
    is returned as ``complex``.
    """
    t = normalized_trace(word_product(alphas))
    if isinstance(t, complex):
        return int(t.real) if t.imag == 0 else t
    return t


def _index_masks(P: PauliString) -> tuple[int, int]:
    # site j is bit (r-1-j) of a basis index (site 0 is the leading kron factor)
    rev = lambda m: int(format(m, f"0{P.r}b")[::-1], 2) if P.r else 0
    return rev(P.x), rev(P.z)


def apply(P: PauliString, v: np.ndarray) -> np.ndarray:
    """Matrix-free ``P @ v`` for ``v`` of shape ``(2**r,)`` or ``(2**r, m)``."""
    v = np.asarray(v)
    dim = 1 << P.r
    if v.shape[0] != dim:
        raise ValueError(f"vector has leading dimension {v.shape[0]}, expected {dim}")
    xm, zm = _index_masks(P)
    idx = np.arange(dim)
    src = idx ^ xm
    # X^x Z^z |b> = (-1)^{|z & b|} |b ^ x>
    signs = 1 - 2 * (np.bitwise_count(src & zm) & 1).astype(np.int8)
    coeff = P.coefficient * signs
    if v.ndim > 1:
        coeff = coeff.reshape((dim,) + (1,) * (v.ndim - 1))
    return coeff * v[src]


_SIGMA = {
    "1": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_matrix(P: PauliString, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit ``2**r x 2**r`` matrix, built as a literal Kronecker product."""
    if P.r > cap:
        raise ValueError(f"dense oracle limited to r <= {cap} sites (got r={P.r})")
    out = np.ones((1, 1), dtype=complex)
    for j in range(P.r):
        bx, bz = (P.x >> j) & 1, (P.z >> j) & 1
        site = _SIGMA["X"] if bx else _SIGMA["1"]
        if bz:
            site = site @ _SIGMA["Z"]
        out = np.kron(out, site)
    return P.coefficient * out


class PsiTable:
    """All Psi_R of a model as parallel int64 arrays, indexed by rank in I_n.

    Backs the vectorized brute-force sums; only usable for r <= 62.
    """

    def __init__(self, n: int, q: int):
        if n // 2 > 62:
            raise ValueError("vectorized tables need r <= 62; use the PauliString path")
        self.n, self.q = n, q
        self.indices = index_set(n, q)
        strings = [_psi_cached(R) for R in self.indices]
        self.x = np.array([s.x for s in strings], dtype=np.int64)
        self.z = np.array([s.z for s in strings], dtype=np.int64)
        self.phase = np.array([s.phase for s in strings], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.indices)

    def word(self, ranks: Iterable[np.ndarray]):
        """Broadcast product of the strings at ``ranks`` (one array per position).

        Returns ``(x, z, phase)`` arrays of the broadcast shape.
        """
        ranks = list(ranks)
        x = self.x[ranks[0]]
        z = self.z[ranks[0]]
        ph = self.phase[ranks[0]]
        for rk in ranks[1:]:
            xr, zr = self.x[rk], self.z[rk]
            ph = ph + self.phase[rk] + 2 * np.bitwise_count(z & xr).astype(np.int64)
            x = x ^ xr
            z = z ^ zr
        return x, z, ph & 3


@lru_cache(maxsize=16)
def psi_table(n: int, q: int) -> PsiTable:
    return PsiTable(n, q)
