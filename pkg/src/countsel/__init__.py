"""Poisson versus geometric model selection with MDL, objective Bayes and MML codes."""
from .counts_model import (CountData, DegenerateError, GeomParam, ModelClass, fisher, mle,
                           negloglik, sample, suff_stats)
from .mdl_criteria import CriterionId, CriterionKind
from .mml_core import MmlFit, PriorSpec, mml_estimate, mml87_message_length
from .selection import SelectionResult, UndefinedCriterionError, evaluate, regret, regret_curve

__version__ = "0.1.0"

__all__ = [
    "CountData", "CriterionId", "CriterionKind", "DegenerateError", "GeomParam", "MmlFit",
    "ModelClass", "PriorSpec", "SelectionResult", "UndefinedCriterionError", "evaluate", "fisher",
    "mle", "mml87_message_length", "mml_estimate", "negloglik", "regret", "regret_curve",
    "sample", "suff_stats",
]
