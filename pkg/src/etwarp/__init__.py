"""Elastic time warping with a Hellinger penalty on time stretching."""

__version__ = "0.1.0"

from .core import (
    DegenerateWarpError,
    EtwResult,
    Move,
    PiecewiseLinearDiffeo,
    SimilarityMatrix,
    TimeSeries,
    ValueMetric,
    WarpingPath,
    build_similarity_matrix,
    build_time_series,
    exp_kernel,
    normalize_timestamps,
)
from .etw import (
    block_f_value,
    block_g_value,
    decode_path,
    dtw_baseline,
    elastic_similarity,
    etw_similarity,
    evaluate_objective,
    fill_table,
    path_value,
    reconstruct_alpha,
)
from .hellinger import (
    compose,
    hellinger_affinity,
    hellinger_distance,
    invert,
    sine_distance,
    theta_distance,
)
from .oracle import brute_force_similarity, enumerate_patterns
