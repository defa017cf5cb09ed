"""Mamdani fuzzy inference for choosing speech framing parameters."""

from .estimator import MamdaniRegressor
from .fis_config import FisParseError, ParseIssue, paper_fis, parse_fis, serialize_fis, validate
from .fuzzy_core import (
    FisDefinition,
    FuzzyRule,
    FuzzyVariable,
    InferenceTrace,
    MembershipFunction,
    eval_gaussmf,
    eval_trimf,
    fuzzify,
    infer,
    rule_strength,
)
from .framing import frame_plan, frame_size_paper, hamming, segment, snr_db, window_size_samples, word_accuracy

__all__ = [
    "FisDefinition",
    "FisParseError",
    "FuzzyRule",
    "FuzzyVariable",
    "InferenceTrace",
    "MamdaniRegressor",
    "MembershipFunction",
    "ParseIssue",
    "eval_gaussmf",
    "eval_trimf",
    "frame_plan",
    "frame_size_paper",
    "fuzzify",
    "hamming",
    "infer",
    "paper_fis",
    "parse_fis",
    "rule_strength",
    "segment",
    "serialize_fis",
    "snr_db",
    "validate",
    "window_size_samples",
    "word_accuracy",
]

__version__ = "0.1.0"
