"""
Trigonometric majorants of a box
================================

Build the degree-M polynomials squeezing an interval indicator on the
circle, symmetrize them over the Weyl group of SU(2), and read off the
character coefficients that enter the certificate.
"""

import numpy as np

from frobscope.erdos_turan import build_majorants, s_tilde_table, symmetrize_to_S
from frobscope.root_system import BoxSpec, box_measure, build_root_system, wrap_box_indicator

box = BoxSpec(((0.05, 0.30),))
x = (np.arange(10_000) + 0.5) / 10_000
chi = wrap_box_indicator(box, x[:, None]).astype(float)

# The sandwich holds for every M; the gap in the constant term shrinks like 1/M.
for M in (8, 16, 32, 64):
    pair = build_majorants(box, M)
    lower = np.min(chi - pair.b_minus(x))
    upper = np.min(pair.b_plus(x) - chi)
    gap = pair.b_plus.coeff([0]).real - box.volume
    print(f"M = {M:3d}: min(chi - B-) = {lower:8.4f}   min(B+ - chi) = {upper:8.4f}   (B+^(0) - vol) M = {gap * M:7.1f}")

# Symmetrizing over W = {+1, -1} gives even polynomials around the image of the box.
a1 = build_root_system("A1")
pair = build_majorants(box, 32)
s_plus, s_minus = symmetrize_to_S(a1, pair)
print("\nS+ is even:", np.allclose(s_plus.coeffs, s_plus.coeffs[::-1]))

# Character coefficients: the constant term approaches the Sato-Tate mass of the box.
table = s_tilde_table(a1, pair)
print(f"mu(D) = {box_measure(a1, box):.6f}   S+~(0) = {table.plus[0].real:.3f}   S-~(0) = {table.minus[0].real:.3f}")
print("first coefficients S+~(k):", np.round(table.plus[1:6].real, 3))
