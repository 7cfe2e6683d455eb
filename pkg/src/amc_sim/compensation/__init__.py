"""Error metrics and optimal-bias search"""

from .bias_search import BiasSearchConfig, BiasSearchResult, bias_sweep, search_optimal_bias
from .metrics import delta_re, re_egv, re_inv, re_mvm

__all__ = [
    "BiasSearchConfig",
    "BiasSearchResult",
    "bias_sweep",
    "delta_re",
    "re_egv",
    "re_inv",
    "re_mvm",
    "search_optimal_bias",
]
