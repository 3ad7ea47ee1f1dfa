import json
import math

import pytest

from conftest import fixture_snippets
from relbridge import BridgeConfig, LoadError, TinyCodeModel
from relbridge.errors import WrongDimension

DIVISION = "fn measure(value, count) { return value / count; }"
ADDER = "fn compute(left, right) { return left + right; }"


@pytest.fixture(scope="module")
def model() -> TinyCodeModel:
    return TinyCodeModel.load(BridgeConfig())


class TestLoading:
    def test_bundled_default(self, model):
        assert model.adapter_id == "relbridge:tiny-code-v0"
        assert model.labels == ("clean", "defective")
        assert model.embedding.shape == (len(model.tokenizer), model.dim)

    def test_unknown_bundled_name(self):
        with pytest.raises(LoadError, match="no bundled model"):
            TinyCodeModel.load(BridgeConfig(model="nonesuch"))

    def test_missing_path(self):
        with pytest.raises(LoadError, match="no checkpoint file"):
            TinyCodeModel.load(BridgeConfig(model="/nowhere/model.json"))

    def test_unsupported_device(self):
        with pytest.raises(LoadError, match="cpu-only"):
            TinyCodeModel.load(BridgeConfig(device="cuda"))

    def test_unparsable_checkpoint(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        with pytest.raises(LoadError, match="cannot read"):
            TinyCodeModel.load(BridgeConfig(model=str(path)))

    def test_wrong_format_tag(self, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps({"format": "somebody-elses-v9"}))
        with pytest.raises(LoadError, match="format"):
            TinyCodeModel.load(BridgeConfig(model=str(path)))

    def test_shape_mismatch(self, tmp_path, model):
        bundled = json.loads(json.dumps({
            "format": "relbridge-checkpoint-v1", "model_id": "x",
            "dim": model.dim, "labels": list(model.labels),
            "vocab": model.tokenizer.vocab,
            "embedding": [[0.0] * model.dim],
            "head_weight": [[0.0] * model.dim] * 2, "head_bias": [0.0, 0.0],
            "bigram": {}, "dropout": 0.1}))
        path = tmp_path / "short.json"
        path.write_text(json.dumps(bundled))
        with pytest.raises(LoadError, match="embedding table"):
            TinyCodeModel.load(BridgeConfig(model=str(path)))


class TestClassification:
    def test_fixture_accuracy(self, model):
        cases = fixture_snippets()
        hits = 0
        for case in cases:
            probs = model.classify(case["program"])
            hits += model.labels[probs.index(max(probs))] == case["label"]
        assert hits / len(cases) >= 0.9

    def test_probabilities_are_valid(self, model):
        probs = model.classify(DIVISION)
        assert len(probs) == len(model.labels)
        assert all(0.0 <= p <= 1.0 for p in probs)
        assert math.isclose(sum(probs), 1.0, abs_tol=1e-9)

    def test_deterministic(self, model):
        assert model.classify(ADDER) == model.classify(ADDER)

    def test_empty_text_is_answerable(self, model):
        probs = model.classify("")
        assert math.isclose(sum(probs), 1.0, abs_tol=1e-9)

    def test_pooling_ignores_order(self, model):
        # bag-of-pieces pooling is permutation invariant up to float
        # rounding, so statement order (and loop nesting) cannot move
        # the prediction
        a = "fn solve(n) { let a = 1; let b = 2; return a + b; }"
        b = "fn solve(n) { let b = 2; let a = 1; return b + a; }"
        assert model.embed(a) == pytest.approx(model.embed(b), rel=1e-9)
        assert model.classify(a) == pytest.approx(model.classify(b), rel=1e-9)


class TestStochastic:
    def test_seed_reproducible(self, model):
        one = model.classify_stochastic(ADDER, 5)
        two = model.classify_stochastic(ADDER, 5)
        assert one == two

    def test_seeds_differ(self, model):
        outs = {tuple(model.classify_stochastic(ADDER, s)) for s in range(8)}
        assert len(outs) > 1

    def test_valid_distribution(self, model):
        probs = model.classify_stochastic(DIVISION, 0)
        assert math.isclose(sum(probs), 1.0, abs_tol=1e-9)


class TestEmbeddings:
    def test_dimension(self, model):
        assert len(model.embed(ADDER)) == model.dim

    def test_head_on_own_embedding_matches_classify(self, model):
        assert model.classify_embedding(model.embed(ADDER)) == \
            model.classify(ADDER)

    def test_wrong_dimension_rejected(self, model):
        with pytest.raises(WrongDimension):
            model.classify_embedding([1.0])


class TestGeneration:
    def test_greedy_deterministic(self, model):
        one = model.generate("fn compute (", max_len=20)
        two = model.generate("fn compute (", max_len=20)
        assert one == two

    def test_logprobs_track_the_model(self, model):
        out = model.generate("fn compute (", max_len=20)
        assert len(out["logprobs"]) == len(out["tokens"])
        prev = model._prompt_ids("fn compute (")[-1]
        for token, lp in zip(out["tokens"], out["logprobs"]):
            dist = model._dist(prev)
            idx = model.tokenizer.vocab.index(token)
            assert lp == pytest.approx(math.log(dist[idx]))
            assert lp <= 0.0
            prev = idx

    def test_max_len_zero(self, model):
        out = model.generate("fn", max_len=0)
        assert out["tokens"] == []
        assert not out["complete"]

    def test_config_cap_applies(self):
        capped = TinyCodeModel.load(BridgeConfig(max_tokens=5))
        assert len(capped.generate("fn")["tokens"]) <= 5

    def test_step_dists_hidden_by_default(self, model):
        assert model.generate("fn", max_len=3)["step_dists"] is None

    def test_step_dists_exposed_on_request(self):
        exposed = TinyCodeModel.load(BridgeConfig(expose_step=True))
        out = exposed.generate("fn", max_len=3)
        assert len(out["step_dists"]) == len(out["tokens"])
        for dist in out["step_dists"]:
            assert len(dist) == len(exposed.tokenizer)
            assert math.isclose(sum(dist), 1.0, abs_tol=1e-9)


class TestSampling:
    def test_count_and_seed_determinism(self, model):
        a = model.sample("fn compute (", 3, seed=4, max_len=10)
        b = model.sample("fn compute (", 3, seed=4, max_len=10)
        assert len(a) == 3
        assert a == b

    def test_seeds_vary_output(self, model):
        a = model.sample("fn compute (", 1, seed=0, max_len=15)
        b = model.sample("fn compute (", 1, seed=1, max_len=15)
        assert a != b

    def test_temperature_validated(self, model):
        with pytest.raises(ValueError):
            model.sample("fn", 1, temperature=0.0)

    def test_logprobs_nonpositive(self, model):
        for out in model.sample("fn compute (", 4, seed=2, max_len=12):
            assert all(lp <= 0.0 for lp in out["logprobs"])


class TestStep:
    def test_distribution_over_vocabulary(self, model):
        probs = model.step(["fn"])
        assert len(probs) == len(model.tokenizer)
        assert math.isclose(sum(probs), 1.0, abs_tol=1e-9)

    def test_empty_prefix_uses_start_row(self, model):
        probs = model.step([])
        best = model.tokenizer.vocab[probs.index(max(probs))]
        assert best == "fn"
