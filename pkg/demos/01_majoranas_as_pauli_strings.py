"""
Majoranas as Pauli strings
==========================

Eight Majorana operators live on four qubits. Each one is a string of Z's
followed by an X or a Y, and products of them never leave the Pauli group,
so every trace below is an exact integer.
"""
# %%
from sykq.majorana import MajoranaRep, MultiIndex, majorana, psi_R, trace_word

rep = MajoranaRep(8)
for i in range(1, 9):
    print(f"psi_{i} = {majorana(i, rep)}")

# %%
# A 2-index product picks up a factor of i so that it stays Hermitian.
Q = MultiIndex((1, 2), 8)
R = MultiIndex((2, 5), 8)
print("Psi_Q =", psi_R(Q, rep))
print("Psi_R =", psi_R(R, rep))

# %%
# Q and R share one label, so the two strings anticommute and the crossing
# word Q R Q R has normalized trace -1. Disjoint labels commute instead.
print("tr(Psi_Q Psi_R Psi_Q Psi_R) =", trace_word([Q, R, Q, R]))
S = MultiIndex((3, 4), 8)
print("tr(Psi_Q Psi_S Psi_Q Psi_S) =", trace_word([Q, S, Q, S]))
