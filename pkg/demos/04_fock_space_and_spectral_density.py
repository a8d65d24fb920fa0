"""
q-Fock space and the spectral density
=====================================

The same moments come out of a third construction: creation and
annihilation matrices on a truncated q-deformed Fock space. The Cauchy
transform from a continued fraction then recovers the density by
Stieltjes inversion, rho(x) = -Im G(x + i0) / pi.
"""
# %%
import numpy as np

from sykq.qfock import cauchy_continued_fraction, vacuum_moment
from sykq.qmoments import q_wick_moment

q = 0.5
for w in [(1, 1), (1, 1, 1, 1), (1, 2, 1, 2), (1, 2, 2, 1), (1,) * 6]:
    print(w, f"vacuum {vacuum_moment(w, q):.6f}", f"wick {float(q_wick_moment(w, q)):.6f}")

# %%
# A depth-500 fraction is a discrete measure with 500 atoms, so the
# evaluation height has to exceed their spacing to see a smooth density.
x = np.linspace(-3, 3, 13)
for qq in (0.0, 0.5, 0.9):
    rho = -cauchy_continued_fraction(x + 0.05j, qq, depth=500).imag / np.pi
    print(f"q={qq}:", " ".join(f"{r:.3f}" for r in rho))

# %%
# At q = 0 the density is the semicircle sqrt(4 - x^2) / (2 pi).
print("semicircle at 0:", 1 / np.pi)
