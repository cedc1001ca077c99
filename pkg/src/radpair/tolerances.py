"""Numerical tolerances shared across modules."""

HERMITIAN_RTOL = 1e-12
EIG_RESIDUAL_RTOL = 1e-10
EIG_ORTHO_ATOL = 1e-10
# eigenvalues closer than this fraction of max|value| count as degenerate
DEGENERACY_RTOL = 1e-9
OVERLAP_MIN_WEIGHT = 1e-10
YIELD_DENOM_MIN = 1e-12
MAX_HILBERT_DIM = 1024
MAX_ABS_HYPERFINE_UT = 1e7
