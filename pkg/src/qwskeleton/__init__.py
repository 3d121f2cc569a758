"""Quantum walks, their replicating random walks and the skeleton structure."""

__version__ = "0.1.0"

from .coin import CoinSpec, build_coin, hadamard
from .engine import WalkState, evolve, path_weight, run_walk
from .qwrw import qwrw_marginal, sample_qwrw, transition_field
from .skeleton import SkeletonFn, sample_qsrw

__all__ = [
    "CoinSpec",
    "SkeletonFn",
    "WalkState",
    "build_coin",
    "evolve",
    "hadamard",
    "path_weight",
    "qwrw_marginal",
    "run_walk",
    "sample_qsrw",
    "sample_qwrw",
    "transition_field",
]
