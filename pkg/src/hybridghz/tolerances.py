"""Shared numerical tolerance constants.

Everything is double precision; these thresholds separate "numerical dust"
from genuine failures and are referenced across the package instead of
being scattered as magic numbers.
"""

ATOL_NORM = 1e-10
"""Norm preservation required of every gate application."""

ATOL_ORACLE = 1e-12
"""Agreement demanded between contraction paths and brute-force operators."""

LEAK_MAX = 1e-6
"""Truncation-leakage estimate above which a displacement is refused."""

PROB_DEGENERATE = 1e-14
"""Measurement branch treated as impossible (unnormalizable) below this."""

ANCILLA_RESET_TOL = 1e-8
"""Excited-state population allowed in a qubit that must start reset."""

ENCODING_OVERLAP_MAX = 0.05
"""exp(-|beta|^2) above this voids the {vacuum, coherent} logical encoding."""
