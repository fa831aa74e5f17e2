"""
Growth of the weighted lattice sums
===================================

The sums of c(lambda) ||lambda||^r over dominant weights grow like
M^r (log M)^(n-1).  Over practical ranges of M the logarithm still tilts
the log-log slope visibly in rank two.
"""

import math

from frobscope.erdos_turan import loglog_slope, scn_sum
from frobscope.root_system import build_root_system

Ms = [64, 128, 256, 512]
for name, r in (("A1", 1), ("A1", 2), ("A2", 3)):
    rs = build_root_system(name)
    vals = [scn_sum(rs, M, r) for M in Ms]
    raw = loglog_slope(Ms, vals)
    corrected = loglog_slope(Ms, [v / math.log(M) ** (rs.rank - 1) for v, M in zip(vals, Ms)])
    print(f"{name} r = {r}: slope {raw:.3f}, after dividing by (log M)^(n-1) {corrected:.3f}")

# For A1 and r = 0 the sum is twice a harmonic sum.
a1 = build_root_system("A1")
for M in Ms:
    print(f"M = {M}: scn / log M = {scn_sum(a1, M, 0) / math.log(M):.3f}")
