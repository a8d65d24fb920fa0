"""Fast exact self-checks: Majorana algebra, trace sign law, oracle triangle."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable

from .majorana import (
    MajoranaRep,
    MultiIndex,
    commutation_sign,
    index_set,
    majorana,
    multiply,
    psi_R,
    trace_word,
)
from .partitions import crossings, double_factorial, pair_partitions
from .qfock import vacuum_moment
from .qmoments import (
    FiniteModel,
    admissible_pairings,
    exact_finite_n_moment,
    q_wick_moment,
    s_pi,
    s_pi_restricted,
)


def closed_form_trace(alpha: list[MultiIndex], pairs) -> int:
    """Sign (-1)^(q cr(pi) + sum over crossing blocks of |alpha(V) ∩ alpha(W)|)."""
    q = alpha[0].q
    exponent = 0
    for (a, b), (c, d) in itertools.combinations(pairs, 2):
        if a < c < b < d or c < a < d < b:
            exponent += q + alpha[a - 1].overlap(alpha[c - 1])
    return -1 if exponent % 2 else 1


def check_anticommutation(n: int) -> bool:
    rep = MajoranaRep(n)
    I = multiply(majorana(1, rep), majorana(1, rep))
    if not (I.is_identity() and I.phase == 0):
        return False
    for i, j in itertools.combinations(range(1, n + 1), 2):
        a = multiply(majorana(i, rep), majorana(j, rep))
        b = multiply(majorana(j, rep), majorana(i, rep))
        if (a.x, a.z) != (b.x, b.z) or (a.phase - b.phase) % 4 != 2:
            return False
        sq = multiply(majorana(i, rep), majorana(i, rep))
        if not sq.is_identity() or sq.phase != 0:
            return False
    return True


def check_psi_laws(n: int, q: int, trials: int, rng: random.Random) -> bool:
    rep = MajoranaRep(n)
    idx = index_set(n, q)
    for _ in range(trials):
        Q, R = rng.sample(idx, 2) if len(idx) > 1 else (idx[0], idx[0])
        PQ, PR = psi_R(Q, rep), psi_R(R, rep)
        sq = multiply(PR, PR)
        if not sq.is_identity() or sq.phase != 0:
            return False
        if Q != R:
            a, b = multiply(PQ, PR), multiply(PR, PQ)
            sign = 1 if a.phase == b.phase else -1
            if sign != commutation_sign(Q, R):
                return False
    return True


def check_trace_formula(n: int, q: int, k: int, trials: int, rng: random.Random) -> bool:
    idx = index_set(n, q)
    for pi in pair_partitions(k):
        for _ in range(trials):
            values = [rng.choice(idx) for _ in pi.blocks]
            alpha = [None] * k
            for v, (a, b) in zip(values, pi.blocks):
                alpha[a - 1] = alpha[b - 1] = v
            if trace_word(alpha) != closed_form_trace(alpha, pi.blocks):
                return False
    return True


def checks() -> list[tuple[str, Callable[[], bool]]]:
    rng = random.Random(7)
    m82 = FiniteModel(8, 2)
    cross = pair_partitions(4)[1]  # {1,3}{2,4}
    return [
        ("anticommutation n<=12", lambda: all(check_anticommutation(n) for n in range(2, 13, 2))),
        ("Psi_R^2 = I and commutation sign n<=12", lambda: all(
            check_psi_laws(n, q, 50, rng) for n in range(2, 13, 2) for q in range(1, n // 2 + 1))),
        ("trace sign formula k<=6 at n=8", lambda: all(
            check_trace_formula(8, q, k, 20, rng) for q in (2, 3) for k in (2, 4, 6))),
        ("pair partition counts", lambda: all(
            len(pair_partitions(k)) == double_factorial(k - 1) for k in range(0, 11, 2))),
        ("S({13}{24}) at (8,2) = 1/7", lambda: s_pi(cross, m82) == Fraction(1, 7)),
        ("restricted sum invariance at (8,2)", lambda: all(
            s_pi_restricted(cross, V, R, m82) == Fraction(1, 7)
            for V in cross.blocks for R in index_set(8, 2))),
        ("moment triangle k<=6 at (8,2)", lambda: all(
            exact_finite_n_moment((1,) * k, m82) == sum(
                (s_pi(p, m82) for p in admissible_pairings((1,) * k)), Fraction(0))
            for k in (2, 4, 6))),
        ("q-Wick at q=1,0,-1", lambda: all(
            q_wick_moment((1,) * k, 1) == double_factorial(k - 1)
            and q_wick_moment((1,) * k, -1) == 1
            for k in range(0, 13, 2))),
        ("Fock vacuum = Wick", lambda: all(
            abs(vacuum_moment(w, 0.5) - q_wick_moment(w, 0.5)) < 1e-10
            for k in range(1, 7) for w in itertools.product((1, 2), repeat=k))),
        ("crossing count of {13}{24}", lambda: crossings(cross) == 1),
    ]


def run_selftest(echo: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn in checks():
        try:
            passed = bool(fn())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        echo(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= passed
    return ok
