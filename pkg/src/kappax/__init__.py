"""Chance-corrected agreement for raters who may pick several categories per subject."""

from .baselines import (
    Agreement,
    averaged_cohen,
    cohen_kappa,
    icc_kappa,
    mezzich_kappa,
    pooled_cohen,
    rank_kappa,
)
from .data import ClassificationTensor, build_tensor, parse_ratings, parse_roster, tally
from .hierarchy import compute_possible, parse_hierarchy
from .inference import BootstrapConfig, bootstrap_ci
from .kappa import (
    KappaReport,
    fleiss_kappa,
    generalized_kappa,
    interpret_kappa,
    score_weights,
)

__version__ = "0.1.0"
