"""Calibrated sketch-dimension constants.

The theory fixes only the shape of each dimension formula; the constants
below were set by scripts/calibrate_constants.py, which sweeps random
well-spread and coherent test spaces and requires >= 90% of seeds to land
under the target distortion. Rerun that script after changing any formula.
"""

# Sparse embedding: t = C * (r/eps)^2 * max(1, log(r/eps)), floor 4.
SPARSE_DIM_C = 1.0
SPARSE_DIM_FLOOR = 4

# Generalized sparse embedding (outer buckets q, inner repetitions k, range v):
#   k = ceil(GEN_K_C * log(r/(eps*delta)) / eps)
#   v = ceil(GEN_V_C / eps)
#   q = ceil(GEN_Q_C * r * (r + log(1/(delta*eps))) / eps^2)
GEN_K_C = 1.0
GEN_V_C = 1.0
GEN_Q_C = 1.0

# SRHT subspace-embedding rows: t = C * (sqrt(r) + sqrt(log n))^2 * log(r+1) / eps^2.
SRHT_DIM_C = 1.5

# Leverage-score pipeline: SRHT stage C * r * log(r)^2 rows (floored),
# JL estimator C * log(n) / eps^2 columns.
LEVERAGE_F_C = 40.0
LEVERAGE_JL_C = 16.0

# Coreset regression: t = C * (r/eps + r log r).
CORESET_T_C = 4.0

# Low-rank pipeline: t_r = C * (k/eps) * max(1, log(k/eps)), affine stage
# v = C * (t_r/eps)^2 * max(1, log(t_r/eps)) and v' = C * (t_r/eps) * max(1, log(t_r/eps))^2.
LOWRANK_TR_C = 0.5
LOWRANK_V_C = 1.0
LOWRANK_VP_C = 1.0

# lp-regression coreset: t = C * r * eps^-2 * r^{|p/2-1|}.
LP_T_C = 12.0
