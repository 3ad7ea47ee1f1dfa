"""Uncertainty signals for classification and generation.

Every metric returns a MetricValue whose u lands in [0,1], oriented so that
higher u means the prediction is more likely wrong. Natural logarithms
throughout; normalizers (ln K, ln N, ln |vocab|, 4x variance, nat caps) keep
each signal in range so they can be combined into a single validity score.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .errors import DegenerateGeometry, DegenerateInput, DimensionMismatch, MissingCapability
from .minilang import DEFAULT_FUEL, parse, probe_vectors, run_outcomes, outcome_key
from .errors import ParseError
from .transforms.prompts import PROMPT_KINDS, PromptText, nl_perturb

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ProbVector:
    """A distribution over K >= 2 classes."""
    probs: tuple[float, ...]

    def __init__(self, probs):
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))
        if len(self.probs) < 2:
            raise DegenerateInput("need at least 2 classes")
        if any(p < 0.0 or p > 1.0 for p in self.probs):
            raise DegenerateInput("probabilities must lie in [0,1]")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise DegenerateInput(f"probabilities sum to {total!r}, not 1")

    def __len__(self) -> int:
        return len(self.probs)


def _as_probs(p) -> ProbVector:
    return p if isinstance(p, ProbVector) else ProbVector(p)


@dataclass(frozen=True)
class GenerationResult:
    """One decoded output: token texts, per-token ln-probabilities, and
    (when the adapter exposes them) full per-step distributions.

    complete is False when decoding stopped at the length cap instead of the
    end marker."""
    tokens: tuple[str, ...]
    logprobs: tuple[float, ...]
    step_dists: tuple[ProbVector, ...] | None = None
    complete: bool = True

    def __init__(self, tokens, logprobs, step_dists=None, complete=True):
        object.__setattr__(self, "tokens", tuple(tokens))
        object.__setattr__(self, "logprobs", tuple(float(x) for x in logprobs))
        object.__setattr__(self, "complete", bool(complete))
        if step_dists is not None:
            step_dists = tuple(_as_probs(d) for d in step_dists)
        object.__setattr__(self, "step_dists", step_dists)
        if len(self.tokens) != len(self.logprobs):
            raise DegenerateInput("tokens and logprobs lengths differ")
        if any(lp > 0.0 for lp in self.logprobs):
            raise DegenerateInput("logprobs must be <= 0")
        if step_dists is not None and len(step_dists) != len(self.tokens):
            raise DegenerateInput("step_dists length differs from tokens")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class PrototypeSet:
    """Per-class mean embeddings plus a scale normalizer."""
    labels: tuple[str, ...]
    means: tuple[tuple[float, ...], ...]
    scale: float

    @property
    def dimension(self) -> int:
        return len(self.means[0])


@dataclass(frozen=True)
class MetricValue:
    kind: str
    u: float
    raw: float
    aux: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ClusterProbe:
    """Configuration for execution-equivalence clustering of samples."""
    seed: int = 0
    count: int = 10
    fuel: int = DEFAULT_FUEL


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


# --- classification ---------------------------------------------------------

def vanilla_confidence(p) -> MetricValue:
    probs = _as_probs(p)
    raw = max(probs.probs)
    return MetricValue("vanilla", _clamp01(1.0 - raw), raw)


def _shannon(probs) -> float:
    return -math.fsum(q * math.log(q) for q in probs if q > 0.0)


def entropy(p) -> MetricValue:
    probs = _as_probs(p)
    raw = _shannon(probs.probs)
    return MetricValue("entropy", _clamp01(raw / math.log(len(probs))), raw)


def _mean_class_variance(kind: str, passes) -> MetricValue:
    vectors = [_as_probs(p) for p in passes]
    if len(vectors) < 2:
        raise DegenerateInput("need at least 2 passes")
    k = len(vectors[0])
    if any(len(v) != k for v in vectors):
        raise DegenerateInput("passes must share a class count")
    per_class = [statistics.pvariance([v.probs[i] for v in vectors])
                 for i in range(k)]
    raw = math.fsum(per_class) / k
    return MetricValue(kind, _clamp01(4.0 * raw), raw,
                       {"per_class": per_class})


def mcd_variance(passes) -> MetricValue:
    return _mean_class_variance("mcd", passes)


def ensemble_variance(member_outputs) -> MetricValue:
    return _mean_class_variance("ensemble", member_outputs)


def fit_prototypes(embeddings, labels) -> PrototypeSet:
    if len(embeddings) != len(labels) or not embeddings:
        raise DegenerateInput("need one label per embedding")
    dim = len(embeddings[0])
    if any(len(e) != dim for e in embeddings):
        raise DegenerateInput("embeddings must share a dimension")
    by_label: dict[str, list] = {}
    for emb, lab in zip(embeddings, labels):
        by_label.setdefault(lab, []).append(emb)
    if len(by_label) < 2:
        raise DegenerateInput("need at least 2 classes")
    ordered = tuple(sorted(by_label))
    means = tuple(
        tuple(math.fsum(e[i] for e in by_label[lab]) / len(by_label[lab])
              for i in range(dim))
        for lab in ordered)
    pairwise = [math.dist(means[a], means[b])
                for a in range(len(means)) for b in range(a + 1, len(means))]
    scale = statistics.median(pairwise)
    if scale == 0.0:
        raise DegenerateGeometry("coincident class prototypes")
    return PrototypeSet(ordered, means, scale)


def repr_distance(z, protos: PrototypeSet) -> MetricValue:
    if len(z) != protos.dimension:
        raise DimensionMismatch(
            f"embedding has dimension {len(z)}, prototypes {protos.dimension}")
    raw = min(math.dist(z, mu) for mu in protos.means) / protos.scale
    return MetricValue("proto_dist", min(1.0, raw), raw)


# --- generation -------------------------------------------------------------

def perplexity(g: GenerationResult) -> MetricValue:
    if not g.tokens:
        raise DegenerateInput("empty generation")
    mean_lp = math.fsum(g.logprobs) / len(g.logprobs)
    return MetricValue("perplexity", 1.0 - math.exp(mean_lp),
                       math.exp(-mean_lp))


def mean_token_entropy(g: GenerationResult) -> MetricValue:
    if g.step_dists is None:
        raise MissingCapability("generation carries no step distributions")
    if not g.step_dists:
        raise DegenerateInput("empty generation")
    vocab = len(g.step_dists[0])
    raw = math.fsum(_shannon(d.probs) for d in g.step_dists) / len(g.step_dists)
    return MetricValue("token_entropy", _clamp01(raw / math.log(vocab)), raw)


def semantic_key(text: str, probe: ClusterProbe) -> str:
    """Equivalence-class key: programs that parse are keyed by their interpret
    outcomes on the probe's seeded argument vectors; everything else by its
    whitespace-normalized text."""
    try:
        program = parse(text)
    except ParseError:
        program = None
    if program is not None and program.functions:
        entry = program.functions[0]
        vectors = probe_vectors(probe.seed, len(entry.params), probe.count)
        outcomes = run_outcomes(program, entry.name, vectors, probe.fuel)
        return f"prog:{len(entry.params)}:{outcome_key(outcomes)}"
    return "text:" + " ".join(text.split())


def _sample_keys(samples, probe: ClusterProbe) -> list[str]:
    return [semantic_key(s.text if isinstance(s, GenerationResult) else s, probe)
            for s in samples]


def semantic_entropy(samples, cluster_probe: ClusterProbe | None = None) -> MetricValue:
    if len(samples) < 2:
        raise DegenerateInput("need at least 2 samples")
    probe = cluster_probe or ClusterProbe()
    keys = _sample_keys(samples, probe)
    counts: dict[str, int] = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    n = len(samples)
    raw = -math.fsum((c / n) * math.log(c / n) for c in counts.values())
    return MetricValue("semantic_entropy", _clamp01(raw / math.log(n)), raw,
                       {"clusters": sorted(counts.values(), reverse=True)})


def bb_lab_prob(greedy, samples, cluster_probe: ClusterProbe | None = None) -> MetricValue:
    if not samples:
        raise DegenerateInput("need at least 1 sample")
    probe = cluster_probe or ClusterProbe()
    target = _sample_keys([greedy], probe)[0]
    keys = _sample_keys(samples, probe)
    raw = sum(1 for k in keys if k == target) / len(keys)
    return MetricValue("bb_lab_prob", _clamp01(1.0 - raw), raw)


def traj_signal(g: GenerationResult, drop_cap: float = 10.0,
                disp_cap: float = 5.0) -> MetricValue:
    if len(g.tokens) < 2:
        raise DegenerateInput("need at least 2 tokens")
    drop = max(0.0, max(a - b for a, b in zip(g.logprobs, g.logprobs[1:])))
    disp = statistics.pstdev(g.logprobs)
    u = min(1.0, max(drop / drop_cap, disp / disp_cap))
    return MetricValue("trajectory", u, max(drop, disp),
                       {"drop": drop, "disp": disp})


def prompt_consistency(prompt, adapter, perturbation_count: int = 4,
                       seed: int = 0,
                       cluster_probe: ClusterProbe | None = None) -> MetricValue:
    """Agreement of greedy outputs across meaning-preserving prompt variants."""
    if perturbation_count < 2:
        raise DegenerateInput("need at least 2 perturbations")
    text = prompt.text if isinstance(prompt, PromptText) else prompt
    probe = cluster_probe or ClusterProbe()
    outputs = []
    for i in range(perturbation_count):
        kind = PROMPT_KINDS[i % len(PROMPT_KINDS)]
        variant = nl_perturb(text, kind, seed * 31 + i)
        outputs.append(adapter.generate(variant))
    keys = _sample_keys(outputs, probe)
    n = len(keys)
    same = sum(1 for a in range(n) for b in range(a + 1, n)
               if keys[a] == keys[b])
    total = n * (n - 1) // 2
    agreement = same / total
    return MetricValue("prompt_consistency", _clamp01(1.0 - agreement),
                       agreement, {"keys": keys})
