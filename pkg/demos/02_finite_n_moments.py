"""
Exact moments at n = 8 and a Monte Carlo check
==============================================

The fourth moment of the 2-body model on 8 Majoranas is computed twice,
once from the kernel of the index map and once as a sum over pair
partitions. A Monte Carlo run then checks both answers.
"""
# %%
from fractions import Fraction

from sykq.partitions import crossings
from sykq.qmoments import FiniteModel, admissible_pairings, exact_finite_n_moment, q_from_model, q_wick_moment, s_pi
from sykq.sykmc import EstimatorConfig, mc_moment

model = FiniteModel(8, 2)
eps = (1, 1, 1, 1)

direct = exact_finite_n_moment(eps, model)
terms = {str(p): s_pi(p, model) for p in admissible_pairings(eps)}
print("kernel route:  ", direct)
for name, value in terms.items():
    print(f"  S({name}) = {value}")
print("pairing route: ", sum(terms.values(), Fraction(0)))

# %%
# Only the crossing pairing differs from 1. In the double-scaled limit it
# tends to q = exp(-2 lambda), which gives the q-Gaussian value 2 + q.
q = q_from_model(model.n, model.q).q
print("q-Gaussian value:", q_wick_moment(eps, q))

# %%
est = mc_moment(eps, model, config=EstimatorConfig(n_samples=20_000))
print(f"Monte Carlo: {est.value:.4f} +- {est.stderr:.4f}  (z = {est.z_score(float(direct)):+.2f})")
