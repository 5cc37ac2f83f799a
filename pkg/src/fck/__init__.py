"""fck: free cumulant kit.

Exact-arithmetic machinery for noncommutative probability: partition
lattices, free and Boolean cumulant calculus, truncated series, joint
moments of free pairs, subordination, closed-form conditional
expectations, and the regression characterizations of the free Poisson
and free binomial laws.
"""

__version__ = "0.1.0"
