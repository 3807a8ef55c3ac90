"""dnclab: a desk-scale laboratory for deformation spaces, tangent
groupoids, Fredholm structure groups, flags and generalized filtrations.

Infinite-dimensional objects are modeled exactly at desk scale: compact
operators as finite-rank perturbations, sequence-space tails as structured
shifts, manifolds as finite-dimensional embedded submanifolds.
"""

__version__ = "0.1.0"
