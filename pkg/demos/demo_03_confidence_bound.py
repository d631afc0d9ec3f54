"""
How many claimed duplicates are genuine?
========================================

When there are too many claimed groups to inspect by hand, a simple random
sample is inspected instead and the result turned into a lower confidence
bound on the number of genuine groups in the whole population.
"""

from __future__ import annotations

from fractions import Fraction

from canvasskit import dup_forensics as df

# Draw which of 916 groups to inspect.  The seed fixes the draw, so anyone can
# repeat it.
draw = df.sample_verification(list(range(916)), 100, seed=2020)
print("first ten sampled groups:", draw.indices[:10])

# Suppose 98 of the 100 inspected groups turn out genuine.  The bound is the
# smallest number M of genuine groups for which seeing 98 or more in the
# sample has probability above 5%.  Everything is exact integer arithmetic.
bound = df.hypergeometric_lcb(916, 100, 98, Fraction(95, 100))
print(bound.as_dict())

# The non-strict convention (probability at least 5%) gives the same answer
# here, so the choice of convention does not move this bound.
print("non-strict:", df.hypergeometric_lcb(916, 100, 98, 0.95, strict=False).lower_bound)

# How the bound moves with the number of agreements and the confidence level.
print("agreements  90%   95%   99%")
for k in (100, 99, 98, 95, 90):
    row = [df.hypergeometric_lcb(916, 100, k, c).lower_bound for c in ("0.9", "0.95", "0.99")]
    print(f"{k:>10}  " + "  ".join(f"{v:>4}" for v in row))
