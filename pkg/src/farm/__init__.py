"""Forward aligned relevance metric (FARM) for exogenous time series."""

from .alignment import AlignedPair, WarpPath, align, apply_warp, path_to_matrix_trace
from .baselines import amss_align, compare_paths, ddtw, dtw
from .distance import (CrossoverReport, DistanceParams, farm_distance,
                       transfer_crossover_scan, vector_angle)
from .estimators import FarmRelevanceSelector, ForwardAligner
from .exceptions import (FarmError, FarmIOError, InvalidInputError, ParseError,
                         UndefinedResultError)
from .relevance import (RelevanceParams, RelevanceReport, farm_relevance, global_relevance,
                        local_relevance, rank_exogenous)
from .signal import (DeltaSeries, TimeSeries, WarpSpec, apply_warp_spec, gen_base_signal,
                     gen_sec4_pair, to_deltas)

__version__ = "0.1.0"

__all__ = [
    "AlignedPair", "WarpPath", "align", "apply_warp", "path_to_matrix_trace",
    "amss_align", "compare_paths", "ddtw", "dtw",
    "CrossoverReport", "DistanceParams", "farm_distance", "transfer_crossover_scan",
    "vector_angle",
    "FarmRelevanceSelector", "ForwardAligner",
    "FarmError", "FarmIOError", "InvalidInputError", "ParseError", "UndefinedResultError",
    "RelevanceParams", "RelevanceReport", "farm_relevance", "global_relevance",
    "local_relevance", "rank_exogenous",
    "DeltaSeries", "TimeSeries", "WarpSpec", "apply_warp_spec", "gen_base_signal",
    "gen_sec4_pair", "to_deltas",
]
