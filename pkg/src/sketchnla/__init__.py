"""sketchnla: randomized numerical linear algebra in input-sparsity time.

Sketch operators (sparse/CountSketch-style embeddings, generalized block
embeddings, SRHT, leverage-score samplers, Gaussian JL), with the solvers
built on them: sketch-and-solve and coreset least squares, preconditioned
iterative regression, nonnegative regression, leverage-score approximation,
rank-k approximation, and sampled lp regression. Exact dense oracles live in
``sketchnla.linalg``; everything randomized is validated against them.
"""

from .estimators import (
    LeverageScoreEstimator,
    LpRegression,
    RandomizedLowRank,
    SketchedLinearRegression,
)
from .leverage import LeverageScores, approx_leverage_scores, sampling_probs_from_scores
from .linalg import (
    SvdFactors,
    Tolerances,
    best_rank_k,
    condition_number,
    exact_least_squares,
    exact_leverage_scores,
    thin_qr,
    thin_svd,
)
from .lowrank import (
    LowRankFactors,
    LowRankResult,
    best_rank_k_error,
    low_rank_approx,
    sketch_dims_lowrank,
    truncate_rank_k,
)
from .lp import (
    ConditionedBasis,
    LpParams,
    build_block_embedding,
    condition_basis,
    lp_regress,
    lp_sampling_probs,
)
from .io import load_dense, load_matrix_market, save_coordinate, save_csv, save_dense
from .regress import (
    Coreset,
    Preconditioner,
    RegressionSolution,
    SolverError,
    cgnr_solve,
    generalized_regression,
    lawson_hanson_nnls,
    nonneg_regression,
    precondition,
    richardson_solve,
    sketch_solve_ls,
)
from .sketch import (
    SketchOperator,
    apply_left,
    apply_right,
    compose,
    default_sparse_dim,
    default_srht_dim,
    from_descriptor,
    full_srht,
    make_gaussian_jl,
    make_generalized_sparse_embedding,
    make_leverage_sampler,
    make_sparse_embedding,
    make_srht,
    to_descriptor,
)
from .verify import (
    DistortionReport,
    affine_embedding_error,
    frobenius_error,
    matrix_product_error,
    max_distortion,
)

__version__ = "0.1.0"
