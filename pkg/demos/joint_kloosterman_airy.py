"""
Kloosterman and Airy angles together
====================================

For primes p = 1 mod 3 each parameter x gives a pair of angles, one from
each sum.  The pairs spread out like two independent Sato-Tate variables.
"""

import math

from frobscope.discrepancy import ExperimentConfig, joint_angles, joint_char_sums, run_joint
from frobscope.finite_field import make_ext_field

p = 10009
pairs = joint_angles(make_ext_field(p))
print(f"{len(pairs)} angle pairs over F_{p}")

# The (0, 0) entry is the sample count; every mixed sum stays near the square-root scale.
sums = joint_char_sums(pairs, 3)
for k in range(4):
    print("  ".join(f"{sums[k, kk] / math.sqrt(p):8.3f}" for kk in range(4)))

# A 4 x 4 grid of boxes compared with the product measure.
report = run_joint(ExperimentConfig(p=p))
print(f"\nM = {report.M}, max deviation {report.max_deviation:.4f}, rate scale p^(-1/6) = {p ** (-1 / 6):.3f}")
