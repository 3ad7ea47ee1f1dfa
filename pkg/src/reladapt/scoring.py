"""Validity scoring against a live adapter.

The validator combines metric u-values it is handed; this module is the part
that actually produces them.  A Scorer owns one adapter plus one
ValidatorConfig and computes exactly the metrics the config weights, for
whichever payload shape the task uses: a Program (classification), a raw
embedding (latent variants), or a prompt (generation).
"""
from __future__ import annotations

from .adapters.base import Adapter
from .adapters.corpusgen import bundled_corpus_texts
from .errors import ConfigError, MissingCapability
from .metrics import (
    ClusterProbe, MetricValue, bb_lab_prob, entropy, ensemble_variance,
    fit_prototypes, mcd_variance, mean_token_entropy, perplexity,
    prompt_consistency, repr_distance, semantic_entropy, traj_signal,
    vanilla_confidence,
)
from .minilang import Program, parse
from .validator import ValidatorConfig, ValidityReport, combine_v

# Metric kinds computable from each payload shape.  Embeddings support only
# the subset that needs no concrete program to re-infer on; "constant" is a
# calibration baseline (u fixed at 0.5) available everywhere.
CLASSIFICATION_KINDS = ("vanilla", "entropy", "mcd", "ensemble", "proto_dist",
                        "constant")
EMBEDDING_KINDS = ("vanilla", "entropy", "proto_dist", "constant")
GENERATION_KINDS = ("perplexity", "token_entropy", "semantic_entropy",
                    "bb_lab_prob", "trajectory", "prompt_consistency",
                    "constant")
RESULT_KINDS = ("perplexity", "token_entropy", "trajectory", "constant")


def constant_baseline() -> MetricValue:
    return MetricValue("constant", 0.5, 0.5)


def predicted_label(adapter: Adapter, probs) -> str:
    """Argmax label for a classification output (first label wins ties)."""
    labels = adapter.capabilities().labels
    best = max(range(len(probs)), key=lambda i: (probs.probs[i], -i))
    return labels[best] if labels else str(best)


class Scorer:
    """Metric computation bound to one adapter and one validator config.

    Prototypes for the representation-distance metric are fitted lazily from
    the bundled corpus, labelling each program with the adapter's own argmax
    prediction; pass a PrototypeSet to override.
    """

    def __init__(self, adapter: Adapter, config: ValidatorConfig, *,
                 prototypes=None, seed: int = 0,
                 probe: ClusterProbe | None = None):
        self.adapter = adapter
        self.config = config
        self.seed = seed
        self._prototypes = prototypes
        self._probe = probe if probe is not None else ClusterProbe(seed=seed)

    # --- payload dispatch --------------------------------------------------

    def metrics_for(self, payload) -> dict[str, MetricValue]:
        if isinstance(payload, Program):
            return self.classification_metrics(payload)
        return self.generation_metrics(payload)

    def validity(self, payload, provenance: dict | None = None) -> ValidityReport:
        return combine_v(self.metrics_for(payload), self.config, provenance)

    # --- classification ------------------------------------------------------

    def classification_metrics(self, program: Program) -> dict[str, MetricValue]:
        cfg = self.config
        out: dict[str, MetricValue] = {}
        probs = None
        for kind in cfg.weights:
            if kind == "constant":
                out[kind] = constant_baseline()
            elif kind in ("vanilla", "entropy"):
                if probs is None:
                    probs = self.adapter.classify(program)
                out[kind] = (vanilla_confidence(probs) if kind == "vanilla"
                             else entropy(probs))
            elif kind == "mcd":
                passes = [self.adapter.classify_stochastic(
                              program, seed=f"mcd:{self.seed}:{i}")
                          for i in range(cfg.mcd_passes)]
                out[kind] = mcd_variance(passes)
            elif kind == "ensemble":
                members = [self.adapter.classify_stochastic(
                               program, seed=f"ens:{self.seed}:{i}")
                           for i in range(cfg.ensemble_size)]
                out[kind] = ensemble_variance(members)
            elif kind == "proto_dist":
                out[kind] = repr_distance(self.adapter.embed(program),
                                          self.prototypes())
            else:
                raise ConfigError(
                    f"metric {kind!r} does not apply to classification")
        return out

    def embedding_metrics(self, z) -> dict[str, MetricValue]:
        cfg = self.config
        out: dict[str, MetricValue] = {}
        probs = None
        for kind in cfg.weights:
            if kind == "constant":
                out[kind] = constant_baseline()
            elif kind in ("vanilla", "entropy"):
                if probs is None:
                    probs = self.adapter.classify_embedding(z)
                out[kind] = (vanilla_confidence(probs) if kind == "vanilla"
                             else entropy(probs))
            elif kind == "proto_dist":
                out[kind] = repr_distance(z, self.prototypes())
            else:
                raise MissingCapability(
                    f"metric {kind!r} needs a concrete input, not an embedding")
        return out

    def embedding_validity(self, z, provenance: dict | None = None) -> ValidityReport:
        return combine_v(self.embedding_metrics(z), self.config, provenance)

    # --- generation ------------------------------------------------------------

    def generation_metrics(self, prompt) -> dict[str, MetricValue]:
        cfg = self.config
        out: dict[str, MetricValue] = {}
        greedy = None
        samples = None

        def _greedy():
            nonlocal greedy
            if greedy is None:
                greedy = self.adapter.generate(prompt)
            return greedy

        def _samples():
            nonlocal samples
            if samples is None:
                samples = self.adapter.sample(
                    prompt, cfg.sample_count, temperature=cfg.temperature,
                    seed=self.seed)
            return samples

        for kind in cfg.weights:
            if kind == "constant":
                out[kind] = constant_baseline()
            elif kind == "perplexity":
                out[kind] = perplexity(_greedy())
            elif kind == "token_entropy":
                out[kind] = mean_token_entropy(_greedy())
            elif kind == "trajectory":
                out[kind] = traj_signal(_greedy())
            elif kind == "semantic_entropy":
                out[kind] = semantic_entropy(_samples(), self._probe)
            elif kind == "bb_lab_prob":
                out[kind] = bb_lab_prob(_greedy(), _samples(), self._probe)
            elif kind == "prompt_consistency":
                out[kind] = prompt_consistency(prompt, self.adapter,
                                               seed=self.seed,
                                               cluster_probe=self._probe)
            else:
                raise ConfigError(
                    f"metric {kind!r} does not apply to generation")
        return out

    def result_metrics(self, result) -> dict[str, MetricValue]:
        """Metrics computable from a decoded result alone (no prompt to
        resample from): the likelihood-shaped subset."""
        out: dict[str, MetricValue] = {}
        for kind in self.config.weights:
            if kind == "constant":
                out[kind] = constant_baseline()
            elif kind == "perplexity":
                out[kind] = perplexity(result)
            elif kind == "token_entropy":
                out[kind] = mean_token_entropy(result)
            elif kind == "trajectory":
                out[kind] = traj_signal(result)
            else:
                raise MissingCapability(
                    f"metric {kind!r} cannot be scored from a decoded result")
        return out

    def result_validity(self, result, provenance: dict | None = None) -> ValidityReport:
        return combine_v(self.result_metrics(result), self.config, provenance)

    # --- prototypes ---------------------------------------------------------

    def prototypes(self):
        if self._prototypes is None:
            embeddings, labels = [], []
            for text in bundled_corpus_texts():
                program = parse(text)
                labels.append(predicted_label(self.adapter,
                                              self.adapter.classify(program)))
                embeddings.append(self.adapter.embed(program))
            self._prototypes = fit_prototypes(embeddings, labels)
        return self._prototypes
