"""Scorer: metric collection per payload form, and validity wiring."""
import pytest

from reladapt.adapters import make_adapter
from reladapt.errors import ConfigError, MissingCapability
from reladapt.metrics import GenerationResult
from reladapt.minilang import parse
from reladapt.scoring import (
    CLASSIFICATION_KINDS, EMBEDDING_KINDS, GENERATION_KINDS, RESULT_KINDS,
    Scorer, constant_baseline, predicted_label,
)
from reladapt.transforms import PromptText
from reladapt.validator import ValidatorConfig


@pytest.fixture(scope="module")
def classifier():
    return make_adapter("builtin:classifier")


@pytest.fixture(scope="module")
def generator():
    return make_adapter("builtin:generator")


def scorer_for(adapter, weights, **kw):
    return Scorer(adapter, ValidatorConfig(weights=weights), **kw)


class TestConstant:
    def test_fixed_midpoint(self):
        m = constant_baseline()
        assert m.kind == "constant" and m.u == 0.5

    def test_present_in_every_kind_tuple(self):
        for kinds in (CLASSIFICATION_KINDS, EMBEDDING_KINDS,
                      GENERATION_KINDS, RESULT_KINDS):
            assert "constant" in kinds


class TestClassification:
    def test_requested_kinds_only(self, classifier):
        s = scorer_for(classifier, {"entropy": 0.5, "mcd": 0.5})
        metrics = s.metrics_for(parse("fn f(alpha) { return alpha; }"))
        assert sorted(metrics) == ["entropy", "mcd"]
        assert all(kind == m.kind for kind, m in metrics.items())

    def test_validity_matches_hand_combination(self, classifier):
        p = parse("fn f(alpha) { return alpha; }")
        s = scorer_for(classifier, {"entropy": 1.0})
        rep = s.validity(p)
        m = s.metrics_for(p)["entropy"]
        assert rep.v == pytest.approx(1.0 - m.u)

    def test_unknown_kind_rejected(self, classifier):
        s = scorer_for(classifier, {"startle": 1.0})
        with pytest.raises(ConfigError):
            s.metrics_for(parse("fn f() { return 1; }"))

    def test_mcd_uses_configured_passes(self, classifier):
        calls = []

        class Counting:
            def __getattr__(self, name):
                attr = getattr(classifier, name)
                if name == "classify_stochastic":
                    def wrapped(program, seed):
                        calls.append(seed)
                        return attr(program, seed)
                    return wrapped
                return attr

        cfg = ValidatorConfig(weights={"mcd": 1.0}, mcd_passes=3)
        s = Scorer(Counting(), cfg)
        m = s.metrics_for(parse("fn f(alpha) { return alpha; }"))["mcd"]
        assert len(calls) == 3 and len(set(calls)) == 3
        assert len(m.aux["per_class"]) == 2

    def test_proto_dist_available(self, classifier):
        s = scorer_for(classifier, {"proto_dist": 1.0})
        m = s.metrics_for(parse("fn f(alpha) { return alpha; }"))["proto_dist"]
        assert 0.0 <= m.u <= 1.0

    def test_deterministic_given_seed(self, classifier):
        p = parse("fn f(alpha) { return alpha; }")
        a = scorer_for(classifier, {"mcd": 1.0}, seed=4).validity(p)
        b = scorer_for(classifier, {"mcd": 1.0}, seed=4).validity(p)
        assert a.v == b.v


class TestEmbedding:
    def test_embedding_validity_entropy(self, classifier):
        p = parse("fn f(alpha) { return alpha; }")
        z = classifier.embed(p)
        s = scorer_for(classifier, {"entropy": 1.0})
        rep = s.embedding_validity(z)
        assert 0.0 <= rep.v <= 1.0

    def test_surface_only_kind_rejected(self, classifier):
        z = classifier.embed(parse("fn f() { return 1; }"))
        s = scorer_for(classifier, {"mcd": 1.0})
        with pytest.raises(MissingCapability):
            s.embedding_metrics(z)


class TestGeneration:
    def test_prompt_metrics(self, generator):
        s = scorer_for(generator, {"perplexity": 0.5, "semantic_entropy": 0.5})
        metrics = s.metrics_for(PromptText("fn main"))
        assert sorted(metrics) == ["perplexity", "semantic_entropy"]
        assert all(0.0 <= m.u <= 1.0 for m in metrics.values())

    def test_string_prompt_accepted(self, generator):
        s = scorer_for(generator, {"perplexity": 1.0})
        rep = s.validity(PromptText("fn main"))
        assert rep.decision in ("Keep", "Adapt")

    def test_classifier_kind_on_prompt_rejected(self, generator):
        s = scorer_for(generator, {"mcd": 1.0})
        with pytest.raises(ConfigError):
            s.metrics_for(PromptText("fn main"))


class TestResult:
    def result(self, generator):
        return generator.generate("fn main", max_len=20)

    def test_result_metrics(self, generator):
        s = scorer_for(generator, {"perplexity": 0.4, "token_entropy": 0.3,
                                   "trajectory": 0.3})
        metrics = s.result_metrics(self.result(generator))
        assert sorted(metrics) == ["perplexity", "token_entropy", "trajectory"]

    def test_sampling_kind_rejected_on_result(self, generator):
        s = scorer_for(generator, {"semantic_entropy": 1.0})
        with pytest.raises(MissingCapability):
            s.result_metrics(self.result(generator))

    def test_result_validity(self, generator):
        s = scorer_for(generator, {"perplexity": 1.0})
        rep = s.result_validity(self.result(generator))
        assert 0.0 <= rep.v <= 1.0


class TestPredictedLabel:
    def test_argmax(self, classifier):
        p = parse("fn compute(alpha, beta) { return alpha + beta; }")
        assert predicted_label(classifier, classifier.classify(p)) == "clean"

    def test_prototypes_cached(self, classifier):
        s = scorer_for(classifier, {"proto_dist": 1.0})
        assert s.prototypes() is s.prototypes()
