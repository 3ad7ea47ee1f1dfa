"""End-to-end orchestration: infer, validate, and, when the validity score
falls short, adapt the input and re-infer, keeping whichever variant scores
highest.  Also runs the two batch experiments: per-metric ROC-AUC tables and
the adaptation accuracy gain.

Seeding: the pipeline's global seed is added to the search and latent
sub-seeds, so one flag reseeds every stochastic phase while configs keep
their own offsets.
"""
from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .adapters.base import Adapter, make_adapter
from .errors import (
    ConfigError, DegenerateInput, ManifestError, MissingCapability,
    ParseError,
)
from .latent import LatentConfig, perturb_latent
from .metrics import ClusterProbe, GenerationResult
from .minilang import DEFAULT_FUEL, Program, outcomes_digest, parse, pretty
from .scoring import EMBEDDING_KINDS, Scorer, predicted_label
from .search import SearchConfig, constrained_decode, evolve
from .transforms import PromptText
from .validator import (
    ADAPT, KEEP, EvalRecord, ValidatorConfig, ValidityReport, render_table,
    roc_auc,
)

TASKS = ("classification", "generation")
STRATEGIES = ("S1-search", "S2-latent", "decode")

_DEFAULT_WEIGHTS = {
    "classification": {"entropy": 1.0},
    "generation": {"perplexity": 1.0},
}
_DEFAULT_STRATEGIES = {
    "classification": ("S1-search", "S2-latent"),
    "generation": ("S1-search", "decode"),
}


def _canon_strategy(name: str) -> str:
    key = name.strip().lower()
    aliases = {"s1": "S1-search", "s1-search": "S1-search",
               "s2": "S2-latent", "s2-latent": "S2-latent",
               "decode": "decode"}
    if key not in aliases:
        raise ConfigError(f"unknown strategy {name!r}")
    return aliases[key]


@dataclass
class PipelineConfig:
    task: str = "classification"
    adapter: str = "builtin:classifier"
    validator: ValidatorConfig | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    latent: LatentConfig = field(default_factory=LatentConfig)
    strategies: tuple[str, ...] | None = None
    max_rounds: int = 1
    seed: int = 0
    fuel: int = DEFAULT_FUEL
    probe_count: int = 10
    report_path: str | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.strategies is not None:
            self.strategies = tuple(_canon_strategy(s) for s in self.strategies)
        if self.max_rounds < 1:
            raise ConfigError("max_rounds must be at least 1")
        if self.fuel < 1 or self.probe_count < 1:
            raise ConfigError("fuel and probe_count must be positive")

    def resolved_validator(self) -> ValidatorConfig:
        if self.validator is not None:
            return self.validator
        return ValidatorConfig(weights=dict(_DEFAULT_WEIGHTS[self.task]))

    def resolved_strategies(self) -> tuple[str, ...]:
        if self.strategies is not None:
            return self.strategies
        return _DEFAULT_STRATEGIES[self.task]

    def digest(self) -> str:
        """Digest of every field that affects computation (report path is
        deliberately excluded)."""
        vcfg = self.resolved_validator()
        blob = json.dumps({
            "task": self.task,
            "adapter": self.adapter,
            "validator": {
                "weights": dict(sorted(vcfg.weights.items())),
                "threshold": vcfg.threshold,
                "mcd_passes": vcfg.mcd_passes,
                "ensemble_size": vcfg.ensemble_size,
                "sample_count": vcfg.sample_count,
                "temperature": vcfg.temperature,
            },
            "search": [self.search.population, self.search.generations,
                       self.search.elites, self.search.mutations,
                       self.search.seed, self.search.eval_budget],
            "latent": [self.latent.radius, self.latent.step,
                       self.latent.probe, self.latent.budget,
                       self.latent.seed],
            "strategies": list(self.resolved_strategies()),
            "max_rounds": self.max_rounds,
            "seed": self.seed,
            "fuel": self.fuel,
            "probe_count": self.probe_count,
        }, sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class RunReport:
    input_digest: str
    task: str
    seed: int
    config_digest: str
    original_prediction: str
    original: ValidityReport
    decision: str
    strategy: str | None = None
    lineage: tuple[str, ...] = ()
    final_prediction: str | None = None
    final: ValidityReport | None = None
    skipped: tuple[str, ...] = ()
    rounds: int = 0
    timing: dict = field(default_factory=dict, compare=False)

    def to_record(self) -> dict:
        """JSON-ready dict; `timing` is the only nondeterministic key."""
        def _report(rep: ValidityReport | None):
            if rep is None:
                return None
            return {"v": rep.v, "threshold": rep.threshold,
                    "decision": rep.decision,
                    "metrics": {k: {"u": m.u, "raw": m.raw}
                                for k, m in sorted(rep.metrics.items())}}

        return {
            "input": self.input_digest,
            "task": self.task,
            "seed": self.seed,
            "config": self.config_digest,
            "original_prediction": self.original_prediction,
            "original": _report(self.original),
            "decision": self.decision,
            "strategy": self.strategy,
            "lineage": list(self.lineage),
            "final_prediction": self.final_prediction,
            "final": _report(self.final),
            "skipped": list(self.skipped),
            "rounds": self.rounds,
            "timing": dict(self.timing),
        }


@dataclass(frozen=True)
class _Variant:
    strategy: str
    v: float
    prediction: str
    report: ValidityReport
    lineage: tuple[str, ...]
    payload: object | None  # re-adaptable payload, None for latent/decode


def _normalize_input(input_payload, task: str):
    if task == "classification":
        if isinstance(input_payload, Program):
            return input_payload
        return parse(str(input_payload))
    if isinstance(input_payload, PromptText):
        prompt = input_payload
    else:
        prompt = PromptText(str(input_payload))
    if not prompt.text.strip():
        raise DegenerateInput("prompt is empty")
    return prompt


def _input_digest(payload) -> str:
    text = pretty(payload) if isinstance(payload, Program) else payload.text
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _predict(adapter: Adapter, payload, task: str) -> str:
    if task == "classification":
        return predicted_label(adapter, adapter.classify(payload))
    return adapter.generate(payload).text


def _run_s1(payload, adapter, scorer, vcfg, search_cfg, task) -> _Variant:
    best, _history = evolve(payload, adapter, vcfg, search_cfg, scorer=scorer)
    report = scorer.validity(best.payload)
    return _Variant("S1-search", best.fitness,
                    _predict(adapter, best.payload, task), report,
                    tuple(site.ident() for site in best.lineage),
                    best.payload)


def _run_s2(payload, adapter, scorer, latent_cfg) -> _Variant:
    caps = adapter.capabilities()
    for flag in ("embed", "classify_embedding"):
        if not caps.supports(flag):
            raise MissingCapability(f"adapter does not support {flag}")
    unsupported = sorted(k for k in scorer.config.weights
                         if k not in EMBEDDING_KINDS)
    if unsupported:
        raise MissingCapability(
            f"metrics not computable from an embedding: {', '.join(unsupported)}")
    if not isinstance(payload, Program):
        raise MissingCapability("latent ascent needs a classification input")
    z0 = adapter.embed(payload)
    z, best_f, _evals = perturb_latent(
        z0, lambda z_: scorer.embedding_validity(z_).v, latent_cfg)
    report = scorer.embedding_validity(z)
    prediction = predicted_label(adapter, adapter.classify_embedding(z))
    return _Variant("S2-latent", best_f, prediction, report, (), None)


def _run_decode(adapter, scorer, seed: int) -> _Variant:
    result = constrained_decode(adapter, seed=seed)
    report = scorer.result_validity(result)
    return _Variant("decode", report.v, result.text, report, (), None)


_RUNNERS = ("S1-search", "S2-latent", "decode")


def run_pipeline(input_payload, cfg: PipelineConfig,
                 adapter: Adapter | None = None) -> RunReport:
    """Validate one input; adapt and re-infer when V falls below threshold.

    The returned report never carries a final V below the original's: the
    original prediction is itself a candidate in the final selection.
    """
    own_adapter = adapter is None
    if own_adapter:
        adapter = make_adapter(cfg.adapter)
    try:
        report = _run_pipeline(input_payload, cfg, adapter)
    finally:
        if own_adapter:
            adapter.close()
    if cfg.report_path:
        with open(cfg.report_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(report.to_record()) + "\n")
    return report


def _run_pipeline(input_payload, cfg: PipelineConfig,
                  adapter: Adapter) -> RunReport:
    t_total = time.perf_counter()
    payload = _normalize_input(input_payload, cfg.task)
    vcfg = cfg.resolved_validator()
    probe = ClusterProbe(seed=cfg.seed, count=cfg.probe_count, fuel=cfg.fuel)
    scorer = Scorer(adapter, vcfg, seed=cfg.seed, probe=probe)
    timing: dict[str, float] = {}

    t0 = time.perf_counter()
    original_prediction = _predict(adapter, payload, cfg.task)
    timing["infer"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    original_report = scorer.validity(payload)
    timing["validate"] = time.perf_counter() - t0

    base = dict(
        input_digest=_input_digest(payload), task=cfg.task, seed=cfg.seed,
        config_digest=cfg.digest(), original_prediction=original_prediction,
        original=original_report, timing=timing)

    if original_report.keep:
        timing["total"] = time.perf_counter() - t_total
        return RunReport(decision=KEEP, **base)

    search_cfg = replace(cfg.search, seed=cfg.search.seed + cfg.seed)
    latent_cfg = replace(cfg.latent, seed=cfg.latent.seed + cfg.seed)

    t0 = time.perf_counter()
    skipped: list[str] = []
    best = _Variant("original", original_report.v, original_prediction,
                    original_report, (), payload)
    lineage: tuple[str, ...] = ()
    strategy: str | None = None
    rounds = 0

    current = payload
    base_lineage: tuple[str, ...] = ()  # lineage of `current` itself
    for _round in range(cfg.max_rounds):
        improved = False
        for name in cfg.resolved_strategies():
            try:
                if name == "S1-search":
                    variant = _run_s1(current, adapter, scorer, vcfg,
                                      search_cfg, cfg.task)
                elif name == "S2-latent":
                    variant = _run_s2(current, adapter, scorer, latent_cfg)
                else:
                    variant = _run_decode(adapter, scorer, cfg.seed)
            except MissingCapability as exc:
                note = f"{name}: {exc}"
                if note not in skipped:
                    skipped.append(note)
                continue
            if variant.v > best.v:
                best = variant
                strategy = variant.strategy
                lineage = base_lineage + variant.lineage
                improved = True
        rounds += 1
        if not improved or best.report.keep or best.payload is None:
            break
        current = best.payload
        base_lineage = lineage
    timing["adapt"] = time.perf_counter() - t0
    timing["total"] = time.perf_counter() - t_total

    return RunReport(decision=ADAPT, strategy=strategy, lineage=lineage,
                     final_prediction=best.prediction, final=best.report,
                     skipped=tuple(skipped), rounds=rounds, **base)


# --- batch experiments -------------------------------------------------------

def _manifest_rows(path, fieldnames) -> list[dict]:
    manifest = Path(path)
    try:
        with open(manifest, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != list(fieldnames):
                raise ManifestError(
                    f"{manifest}: header must be {','.join(fieldnames)}, "
                    f"got {reader.fieldnames}")
            rows = list(reader)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {manifest}: {exc}") from exc
    if not rows:
        raise ManifestError(f"{manifest} lists no entries")
    for row in rows:
        if any(v is None or v == "" for v in row.values()):
            raise ManifestError(f"{manifest}: short or empty row: {row}")
    return rows


def _read_input_file(manifest_path, rel: str) -> str:
    target = Path(manifest_path).parent / rel
    try:
        return target.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read {target}: {exc}") from exc


def read_classification_manifest(path) -> list[tuple[str, Program, str]]:
    """CSV `path,label` rows -> (path, parsed program, expected label)."""
    entries = []
    for row in _manifest_rows(path, ("path", "label")):
        source = _read_input_file(path, row["path"])
        try:
            program = parse(source)
        except ParseError as exc:
            raise ManifestError(f"{row['path']}: {exc}") from exc
        entries.append((row["path"], program, row["label"]))
    return entries


def read_generation_manifest(path) -> list[tuple[str, str, str, int, str]]:
    """CSV `path,entry,probe_seed,expected_digest` rows ->
    (path, prompt text, entry, probe_seed, expected_digest)."""
    entries = []
    for row in _manifest_rows(path, ("path", "entry", "probe_seed",
                                     "expected_digest")):
        prompt = _read_input_file(path, row["path"])
        try:
            probe_seed = int(row["probe_seed"])
        except ValueError as exc:
            raise ManifestError(
                f"{row['path']}: probe_seed must be an integer") from exc
        entries.append((row["path"], prompt, row["entry"], probe_seed,
                        row["expected_digest"]))
    return entries


def _completed_text(adapter: Adapter, prompt: str, result: GenerationResult) -> str:
    """The program a generation stands for: prompt + continuation when the
    prompt is a token prefix, the continuation alone when it is prose."""
    vocabulary = set(adapter.capabilities().vocabulary)
    words = prompt.split()
    if words and all(w in vocabulary for w in words):
        return " ".join(words + list(result.tokens))
    return result.text


def generation_correct(adapter: Adapter, prompt: str, entry: str,
                       probe_seed: int, expected_digest: str,
                       probe: ClusterProbe) -> bool:
    result = adapter.generate(prompt)
    text = _completed_text(adapter, prompt, result)
    try:
        program = parse(text)
    except ParseError:
        return False
    if all(fn.name != entry for fn in program.functions):
        return False
    digest = outcomes_digest(program, entry, probe_seed, probe.count,
                             probe.fuel)
    return digest == expected_digest


@dataclass(frozen=True)
class MetricEvaluation:
    records: tuple[EvalRecord, ...]
    aucs: dict[str, float]
    degenerate: dict[str, str]
    table: str
    csv: str


def evaluate_metrics(manifest_path, adapter: Adapter, metrics, seed: int = 0,
                     *, task: str = "classification",
                     validator: ValidatorConfig | None = None,
                     benchmark: str | None = None) -> MetricEvaluation:
    """Score every manifest input with every requested metric, label each
    prediction against ground truth, and pivot per-metric ROC-AUC into the
    report table."""
    metrics = list(metrics)
    if not metrics:
        raise ConfigError("need at least one metric")
    if validator is not None:
        vcfg = validator
        missing = [m for m in metrics if m not in vcfg.weights]
        if missing:
            raise ConfigError(f"validator weights missing metrics: {missing}")
    else:
        vcfg = ValidatorConfig(weights={m: 1.0 / len(metrics) for m in metrics})
    scorer = Scorer(adapter, vcfg, seed=seed)
    benchmark = benchmark or Path(manifest_path).stem
    model = adapter.adapter_id

    records: list[EvalRecord] = []
    if task == "classification":
        for _, program, label in read_classification_manifest(manifest_path):
            values = scorer.classification_metrics(program)
            verdict = ("correct" if _predict(adapter, program, task) == label
                       else "incorrect")
            for m in metrics:
                records.append(EvalRecord(values[m].u, verdict, m, model,
                                          benchmark))
    elif task == "generation":
        probe = ClusterProbe(seed=seed)
        for _, prompt, entry, probe_seed, digest in (
                read_generation_manifest(manifest_path)):
            values = scorer.generation_metrics(prompt)
            verdict = ("correct" if generation_correct(
                adapter, prompt, entry, probe_seed, digest, probe)
                else "incorrect")
            for m in metrics:
                records.append(EvalRecord(values[m].u, verdict, m, model,
                                          benchmark))
    else:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")

    aucs: dict[str, float] = {}
    degenerate: dict[str, str] = {}
    rows = []
    for m in metrics:
        subset = [r for r in records if r.metric == m]
        try:
            aucs[m] = roc_auc(subset)
            rows.append({"metric": m, "model": model, "benchmark": benchmark,
                         "auc": aucs[m]})
        except DegenerateInput as exc:
            degenerate[m] = str(exc)
    table, table_csv = render_table(rows)
    return MetricEvaluation(tuple(records), aucs, degenerate, table,
                            table_csv)


def adaptation_gain(manifest_path, cfg: PipelineConfig,
                    adapter: Adapter | None = None,
                    strategy_sets=(("S1-search",),
                                   ("S1-search", "S2-latent"))) -> dict[str, float]:
    """Accuracy before and after adaptation on a labelled corpus.

    Returns {"base": ..., "<strategies joined by +>": ...} with accuracy as
    the fraction of predictions matching the manifest label."""
    entries = read_classification_manifest(manifest_path)
    own_adapter = adapter is None
    if own_adapter:
        adapter = make_adapter(cfg.adapter)
    try:
        out: dict[str, float] = {}
        hits = sum(1 for _, program, label in entries
                   if _predict(adapter, program, "classification") == label)
        out["base"] = hits / len(entries)
        for strategies in strategy_sets:
            run_cfg = replace(cfg, strategies=tuple(strategies),
                              report_path=None)
            hits = 0
            for _, program, label in entries:
                report = run_pipeline(program, run_cfg, adapter)
                final = (report.final_prediction
                         if report.final_prediction is not None
                         else report.original_prediction)
                hits += final == label
            out["+".join(run_cfg.strategies)] = hits / len(entries)
        return out
    finally:
        if own_adapter:
            adapter.close()
