"""
The crossing weight along lambda = 1/2
======================================

S({1,3}{2,4}) is the average sign picked up when two random q_n-subsets
are swapped past each other. Along n = 2 q_n^2 it approaches
+exp(-1) for even q_n and -exp(-1) for odd q_n. The (32,4) point takes
about a minute of brute force, so it is left out here; the acceptance
suite covers it.
"""
# %%
import math

from sykq.partitions import PairPartition
from sykq.qmoments import FiniteModel, pairwise_sign_expectation, q_from_model, s_pi

cross = PairPartition.parse("{1,3}{2,4}")
print(f"{'n':>3} {'q_n':>3} {'S':>10} {'target':>10} {'E(-1)^|Q&R|':>13}")
for n, qn in [(8, 2), (18, 3)]:
    model = FiniteModel(n, qn)
    s = s_pi(cross, model)
    target = q_from_model(n, qn).q
    sign = pairwise_sign_expectation(model)
    print(f"{n:>3} {qn:>3} {float(s):>10.5f} {target:>10.5f} {float(sign):>13.5f}")

# %%
# The pairwise sign has a closed form for any size, so the trend can be
# followed much further than the brute force can go.
for qn in range(2, 12):
    model = FiniteModel(2 * qn * qn, qn)
    print(qn, f"{float(pairwise_sign_expectation(model)):.6f}", f"{math.exp(-1):.6f}")
