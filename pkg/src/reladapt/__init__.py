"""Inference-time reliability engine for code models.

Validate a model's prediction with uncertainty metrics; when the combined
validity score falls below threshold, adapt the input (semantics-preserving
program rewrites, prompt edits, bounded latent ascent, grammar-constrained
decoding) and keep the variant the model handles most reliably.
"""
from .errors import (
    AdapterError, AdapterUnavailable, ConfigError, DegenerateGeometry,
    DegenerateInput, DimensionMismatch, InapplicableTransform, ManifestError,
    MissingCapability, MissingMetric, NoApplicableTransforms, NoViableToken,
    ObjectiveFailure, ParseError, ReladaptError, UnknownToken,
)
from .config import build_config, load_config, parse_config
from .latent import LatentConfig, perturb_latent
from .metrics import (
    ClusterProbe, GenerationResult, MetricValue, ProbVector, PrototypeSet,
)
from .pipeline import (
    MetricEvaluation, PipelineConfig, RunReport, adaptation_gain,
    evaluate_metrics, run_pipeline,
)
from .scoring import Scorer
from .search import (
    Candidate, GenerationStats, SearchConfig, constrained_decode, evolve,
    replay_lineage, revise_decode,
)
from .validator import (
    EvalRecord, ValidatorConfig, ValidityReport, combine_v, roc_auc,
)

__all__ = [
    "AdapterError", "AdapterUnavailable", "ConfigError", "DegenerateGeometry",
    "DegenerateInput", "DimensionMismatch", "InapplicableTransform",
    "ManifestError", "MissingCapability", "MissingMetric",
    "NoApplicableTransforms", "NoViableToken", "ObjectiveFailure",
    "ParseError", "ReladaptError", "UnknownToken",
    "build_config", "load_config", "parse_config",
    "LatentConfig", "perturb_latent",
    "ClusterProbe", "GenerationResult", "MetricValue", "ProbVector",
    "PrototypeSet",
    "MetricEvaluation", "PipelineConfig", "RunReport", "adaptation_gain",
    "evaluate_metrics", "run_pipeline",
    "Scorer",
    "Candidate", "GenerationStats", "SearchConfig", "constrained_decode",
    "evolve", "replay_lineage", "revise_decode",
    "EvalRecord", "ValidatorConfig", "ValidityReport", "combine_v", "roc_auc",
]
