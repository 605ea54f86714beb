from .correlator import correlate_batch, correlate_detect, correlation_scores
from .features import (
    N_FEATURES,
    DmrsFeatureVector,
    NormalizationState,
    dmrs_extract,
    features_from_rf,
    interleave,
    normalize,
    to_complex,
)
from .receiver import Reception, receive
from .search import (
    NoCellFound,
    SearchResult,
    cell_search,
    common_phase,
    find_ssbs,
    pss_correlation,
    pss_search,
    sss_detect,
)
from .selector import SelectorState, selector_step

__all__ = [
    "N_FEATURES",
    "DmrsFeatureVector",
    "NoCellFound",
    "NormalizationState",
    "Reception",
    "SearchResult",
    "SelectorState",
    "cell_search",
    "common_phase",
    "correlate_batch",
    "correlate_detect",
    "correlation_scores",
    "find_ssbs",
    "dmrs_extract",
    "features_from_rf",
    "interleave",
    "normalize",
    "pss_correlation",
    "pss_search",
    "receive",
    "selector_step",
    "sss_detect",
    "to_complex",
]
