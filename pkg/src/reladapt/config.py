"""INI-style configuration for the pipeline.

Five sections are recognized ([validator], [search], [latent], [adapter],
[minilang]), all optional, every key optional.  Unknown sections or keys are
rejected rather than ignored so a typo cannot silently fall back to a
default.
"""
from __future__ import annotations

import configparser
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError
from .latent import LatentConfig
from .pipeline import PipelineConfig
from .search import SearchConfig
from .validator import ValidatorConfig

_SCHEMA = {
    "validator": ("weights", "threshold", "mcd_passes", "ensemble_size",
                  "sample_count", "temperature"),
    "search": ("population", "generations", "elites", "mutations", "seed",
               "eval_budget", "strategies", "max_rounds"),
    "latent": ("radius", "step", "probe", "budget", "seed"),
    "adapter": ("selector", "task"),
    "minilang": ("fuel", "probe_count"),
}

_DEFAULT_TASKS = {"builtin:classifier": "classification",
                  "builtin:generator": "generation"}


def infer_task(selector: str) -> str:
    return _DEFAULT_TASKS.get(selector, "classification")


def _parse_weights(raw: str) -> dict[str, float]:
    weights: dict[str, float] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        kind, sep, value = part.partition(":")
        if not sep:
            raise ConfigError(
                f"weights entries look like kind:weight, got {part!r}")
        try:
            weights[kind.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad weight for {kind.strip()!r}: {value!r}") from exc
    if not weights:
        raise ConfigError("weights must list at least one kind:weight pair")
    return weights


class _Section:
    """Typed access to one parsed section with located error messages."""

    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.present = parser.has_section(name)
        self._section = parser[name] if self.present else {}

    def __contains__(self, key: str) -> bool:
        return key in self._section

    def get(self, key: str, conv, default):
        if key not in self._section:
            return default
        raw = self._section[key]
        try:
            return conv(raw)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"[{self.name}] {key}: cannot parse {raw!r}") from exc


def _budget(raw: str):
    if raw.strip().lower() in ("none", ""):
        return None
    return int(raw)


def _strategy_list(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def parse_config(text: str) -> PipelineConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    adapter = _Section(parser, "adapter")
    selector = adapter.get("selector", str, "builtin:classifier")
    task = adapter.get("task", str, None)
    if task is None:
        task = infer_task(selector)

    validator = _Section(parser, "validator")
    vcfg = None
    if validator.present:
        defaults = PipelineConfig(task=task).resolved_validator()
        vcfg = ValidatorConfig(
            weights=validator.get("weights", _parse_weights,
                                  dict(defaults.weights)),
            threshold=validator.get("threshold", float, defaults.threshold),
            mcd_passes=validator.get("mcd_passes", int, defaults.mcd_passes),
            ensemble_size=validator.get("ensemble_size", int,
                                        defaults.ensemble_size),
            sample_count=validator.get("sample_count", int,
                                       defaults.sample_count),
            temperature=validator.get("temperature", float,
                                      defaults.temperature))

    search = _Section(parser, "search")
    scfg = SearchConfig(
        population=search.get("population", int, 8),
        generations=search.get("generations", int, 5),
        elites=search.get("elites", int, 2),
        mutations=search.get("mutations", int, 1),
        seed=search.get("seed", int, 0),
        eval_budget=search.get("eval_budget", _budget, None))

    latent = _Section(parser, "latent")
    lcfg = LatentConfig(
        radius=latent.get("radius", float, 1.0),
        step=latent.get("step", float, 0.25),
        probe=latent.get("probe", float, 0.05),
        budget=latent.get("budget", int, 60),
        seed=latent.get("seed", int, 0))

    minilang = _Section(parser, "minilang")
    base = PipelineConfig()  # defaults for fuel / probe_count

    return PipelineConfig(
        task=task,
        adapter=selector,
        validator=vcfg,
        search=scfg,
        latent=lcfg,
        strategies=search.get("strategies", _strategy_list, None),
        max_rounds=search.get("max_rounds", int, 1),
        fuel=minilang.get("fuel", int, base.fuel),
        probe_count=minilang.get("probe_count", int, base.probe_count))


def load_config(path) -> PipelineConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def build_config(path=None, *, adapter: str | None = None,
                 seed: int | None = None, threshold: float | None = None,
                 report: str | None = None) -> PipelineConfig:
    """Config file (optional) plus command-line overrides, merged in that
    order.  Overriding the adapter re-infers the task unless the file pinned
    one explicitly."""
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = parse_config(text)
        probe = configparser.ConfigParser(interpolation=None)
        probe.read_string(text)
        task_pinned = probe.has_option("adapter", "task")
    else:
        cfg = PipelineConfig()
        task_pinned = False

    if adapter is not None:
        cfg.adapter = adapter
        if not task_pinned:
            cfg.task = infer_task(adapter)
    if seed is not None:
        cfg.seed = seed
    if threshold is not None:
        vcfg = cfg.validator
        if vcfg is None:
            vcfg = PipelineConfig(task=cfg.task).resolved_validator()
        cfg.validator = replace(vcfg, threshold=threshold)
    if report is not None:
        cfg.report_path = report
    return cfg
