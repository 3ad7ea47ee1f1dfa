"""Config file parsing: schema enforcement, typed defaults, and the merge
with command-line overrides."""
import pytest

from reladapt.config import build_config, infer_task, load_config, parse_config
from reladapt.errors import ConfigError

FULL = """
[adapter]
selector = builtin:classifier
task = classification

[validator]
weights = entropy:0.6, mcd:0.4
threshold = 0.62
mcd_passes = 4
ensemble_size = 3
sample_count = 6
temperature = 0.8

[search]
population = 6
generations = 3
elites = 1
mutations = 2
seed = 11
eval_budget = 40
strategies = s1, s2
max_rounds = 2

[latent]
radius = 0.5
step = 0.1
probe = 0.02
budget = 30
seed = 4

[minilang]
fuel = 500000
probe_count = 6
"""


class TestParsing:
    def test_full_file_round_trips_every_field(self):
        cfg = parse_config(FULL)
        assert cfg.task == "classification"
        assert cfg.adapter == "builtin:classifier"
        assert cfg.validator.weights == {"entropy": 0.6, "mcd": 0.4}
        assert cfg.validator.threshold == 0.62
        assert cfg.validator.mcd_passes == 4
        assert cfg.validator.ensemble_size == 3
        assert cfg.validator.sample_count == 6
        assert cfg.validator.temperature == 0.8
        assert cfg.search.population == 6
        assert cfg.search.generations == 3
        assert cfg.search.elites == 1
        assert cfg.search.mutations == 2
        assert cfg.search.seed == 11
        assert cfg.search.eval_budget == 40
        assert cfg.strategies == ("S1-search", "S2-latent")
        assert cfg.max_rounds == 2
        assert cfg.latent.radius == 0.5
        assert cfg.latent.step == 0.1
        assert cfg.latent.probe == 0.02
        assert cfg.latent.budget == 30
        assert cfg.latent.seed == 4
        assert cfg.fuel == 500000
        assert cfg.probe_count == 6

    def test_empty_text_gives_defaults(self):
        cfg = parse_config("")
        assert cfg.task == "classification"
        assert cfg.adapter == "builtin:classifier"
        assert cfg.validator is None
        assert cfg.resolved_validator().weights == {"entropy": 1.0}
        assert cfg.strategies is None
        assert cfg.resolved_strategies() == ("S1-search", "S2-latent")
        assert cfg.search.population == 8
        assert cfg.latent.budget == 60

    def test_generator_selector_implies_generation_task(self):
        cfg = parse_config("[adapter]\nselector = builtin:generator\n")
        assert cfg.task == "generation"
        assert cfg.resolved_validator().weights == {"perplexity": 1.0}
        assert cfg.resolved_strategies() == ("S1-search", "decode")

    def test_partial_validator_section_keeps_other_defaults(self):
        cfg = parse_config("[validator]\nthreshold = 0.9\n")
        assert cfg.validator.threshold == 0.9
        assert cfg.validator.weights == {"entropy": 1.0}
        assert cfg.validator.mcd_passes == 8

    def test_eval_budget_none_spelling(self):
        cfg = parse_config("[search]\neval_budget = none\n")
        assert cfg.search.eval_budget is None

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown config section"):
            parse_config("[valiadtor]\nthreshold = 0.5\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config("[search]\npop = 8\n")

    def test_malformed_ini_rejected(self):
        with pytest.raises(ConfigError, match="malformed config"):
            parse_config("population = 8\n")

    def test_bad_number_names_section_and_key(self):
        with pytest.raises(ConfigError, match=r"\[search\] population"):
            parse_config("[search]\npopulation = many\n")

    def test_weights_need_kind_weight_pairs(self):
        with pytest.raises(ConfigError, match="kind:weight"):
            parse_config("[validator]\nweights = entropy\n")
        with pytest.raises(ConfigError, match="bad weight"):
            parse_config("[validator]\nweights = entropy:lots\n")
        with pytest.raises(ConfigError, match="at least one"):
            parse_config("[validator]\nweights = ,\n")

    def test_weights_must_normalize(self):
        with pytest.raises(ConfigError):
            parse_config("[validator]\nweights = entropy:0.6, mcd:0.6\n")

    def test_unknown_strategy_rejected_at_parse_time(self):
        with pytest.raises(ConfigError, match="unknown strategy"):
            parse_config("[search]\nstrategies = s9\n")


class TestLoading:
    def test_load_reads_file(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(FULL, encoding="utf-8")
        assert load_config(path) == parse_config(FULL)

    def test_missing_file_is_a_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config(tmp_path / "absent.ini")


class TestBuild:
    def test_no_file_no_overrides(self):
        cfg = build_config()
        assert cfg.task == "classification"
        assert cfg.seed == 0
        assert cfg.report_path is None

    def test_overrides_apply(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[validator]\nthreshold = 0.4\n", encoding="utf-8")
        cfg = build_config(path, seed=9, threshold=0.8,
                           report=str(tmp_path / "out.jsonl"))
        assert cfg.seed == 9
        assert cfg.validator.threshold == 0.8
        assert cfg.report_path == str(tmp_path / "out.jsonl")

    def test_threshold_override_without_validator_section(self):
        cfg = build_config(threshold=0.8)
        assert cfg.validator.threshold == 0.8
        assert cfg.validator.weights == {"entropy": 1.0}

    def test_adapter_override_reinfers_task(self):
        cfg = build_config(adapter="builtin:generator")
        assert cfg.task == "generation"

    def test_pinned_task_survives_adapter_override(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[adapter]\ntask = classification\n",
                        encoding="utf-8")
        cfg = build_config(path, adapter="builtin:generator")
        assert cfg.adapter == "builtin:generator"
        assert cfg.task == "classification"

    def test_missing_file_is_a_config_error(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            build_config(tmp_path / "absent.ini")


class TestTaskInference:
    def test_known_selectors(self):
        assert infer_task("builtin:classifier") == "classification"
        assert infer_task("builtin:generator") == "generation"

    def test_unknown_selector_defaults_to_classification(self):
        assert infer_task("some-binary --flag") == "classification"
