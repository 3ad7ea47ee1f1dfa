"""Command-line front end.

Subcommands mirror the pipeline phases: `validate` scores one input,
`adapt` searches for a better variant, `run` does both end to end,
`transform` applies a single named rewrite, `eval-metrics` builds the
per-metric ROC-AUC table over a manifest, and `serve-mock` exposes a
built-in model over the line protocol for subprocess adapters.
"""
from __future__ import annotations

import argparse
import difflib
import sys
from dataclasses import replace
from pathlib import Path

from .adapters import make_adapter, serve
from .config import build_config
from .errors import ConfigError, ReladaptError
from .metrics import ClusterProbe
from .pipeline import (
    PipelineConfig, _normalize_input, evaluate_metrics, run_pipeline,
)
from .scoring import Scorer
from .search import evolve
from .minilang import parse, pretty
from .transforms import (
    CODE_KINDS, PROMPT_KINDS, PromptText, apply_transform,
    enumerate_applicable, nl_perturb,
)
from .validator import write_records


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="INI config file")
    sub.add_argument("--seed", type=int, help="global seed")
    sub.add_argument("--adapter", metavar="SELECTOR",
                     help='adapter: builtin:<name> or cmd:"..."')
    sub.add_argument("--threshold", type=float,
                     help="validity threshold T in [0,1]")
    sub.add_argument("--report", metavar="PATH",
                     help="where to append structured results")


def _config_from(args: argparse.Namespace) -> PipelineConfig:
    return build_config(args.config, adapter=args.adapter, seed=args.seed,
                        threshold=args.threshold, report=args.report)


def _read_input(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read input {path}: {exc}") from exc


def _print_validity(rep) -> None:
    for kind, m in sorted(rep.metrics.items()):
        print(f"  {kind}: u={m.u:.4f} (raw={m.raw:.4f})")
    print(f"V = {rep.v:.4f}  threshold = {rep.threshold}  -> {rep.decision}")


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    report = run_pipeline(_read_input(args.input), cfg)
    print(f"input {report.input_digest}  task {report.task}  "
          f"decision {report.decision}")
    print(f"original: {report.original_prediction}  "
          f"V={report.original.v:.4f} (T={report.original.threshold})")
    if report.decision == "Adapt":
        if report.strategy is None:
            print("no strategy improved on the original; kept it")
        else:
            print(f"adapted via {report.strategy}: {report.final_prediction}  "
                  f"V={report.final.v:.4f}")
        if report.lineage:
            print("lineage: " + " + ".join(report.lineage))
        for note in report.skipped:
            print(f"skipped {note}")
    if cfg.report_path:
        print(f"report appended to {cfg.report_path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    adapter = make_adapter(cfg.adapter)
    try:
        payload = _normalize_input(_read_input(args.input), cfg.task)
        probe = ClusterProbe(seed=cfg.seed, count=cfg.probe_count,
                             fuel=cfg.fuel)
        scorer = Scorer(adapter, cfg.resolved_validator(), seed=cfg.seed,
                        probe=probe)
        _print_validity(scorer.validity(payload))
    finally:
        adapter.close()
    return 0


def _cmd_adapt(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    adapter = make_adapter(cfg.adapter)
    try:
        payload = _normalize_input(_read_input(args.input), cfg.task)
        search_cfg = replace(cfg.search, seed=cfg.search.seed + cfg.seed)
        best, history = evolve(payload, adapter, cfg.resolved_validator(),
                               search_cfg)
        print(f"fitness {best.fitness:.4f} after {len(history)} generations")
        print("lineage: " + best.describe())
        before = (pretty(payload) if cfg.task == "classification"
                  else payload.text + "\n")
        after = (pretty(best.payload) if cfg.task == "classification"
                 else best.payload.text + "\n")
        diff = difflib.unified_diff(before.splitlines(keepends=True),
                                    after.splitlines(keepends=True),
                                    fromfile="original", tofile="adapted")
        sys.stdout.writelines(diff)
    finally:
        adapter.close()
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    source = _read_input(args.input)
    if args.kind in PROMPT_KINDS:
        print(nl_perturb(PromptText(source.strip()), args.kind,
                         args.seed or 0).text)
        return 0
    if args.kind not in CODE_KINDS:
        raise ConfigError(
            f"unknown transform {args.kind!r}; code kinds: "
            f"{', '.join(CODE_KINDS)}; prompt kinds: {', '.join(PROMPT_KINDS)}")
    program = parse(source)
    sites = [s for s in enumerate_applicable(program) if s.kind == args.kind]
    if not sites:
        raise ConfigError(f"no applicable site for {args.kind}")
    if not 0 <= args.site < len(sites):
        raise ConfigError(
            f"site index {args.site} out of range; {len(sites)} applicable")
    print(pretty(apply_transform(program, sites[args.site], args.seed or 0)),
          end="")
    return 0


def _cmd_eval_metrics(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    adapter = make_adapter(cfg.adapter)
    try:
        result = evaluate_metrics(args.manifest, adapter, metrics,
                                  seed=cfg.seed, task=cfg.task,
                                  validator=cfg.validator)
    finally:
        adapter.close()
    print(result.table, end="")
    for metric, reason in sorted(result.degenerate.items()):
        print(f"{metric}: no AUC ({reason})")
    if cfg.report_path:
        write_records(cfg.report_path, result.records)
        print(f"records written to {cfg.report_path}")
    return 0


def _cmd_serve_mock(args: argparse.Namespace) -> int:
    selector = args.adapter or "builtin:classifier"
    if not selector.startswith("builtin:"):
        raise ConfigError("serve-mock serves built-in adapters only")
    adapter = make_adapter(selector)
    try:
        serve(adapter)
    finally:
        adapter.close()
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reladapt",
        description="Validate a code model's predictions and adapt "
                    "unreliable inputs.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="validate, then adapt if needed")
    run.add_argument("input", help="program or prompt file")
    _common_flags(run)
    run.set_defaults(func=_cmd_run)

    validate = sub.add_parser("validate", help="score one input")
    validate.add_argument("input")
    _common_flags(validate)
    validate.set_defaults(func=_cmd_validate)

    adapt = sub.add_parser("adapt",
                           help="search for a better variant, print the diff")
    adapt.add_argument("input")
    _common_flags(adapt)
    adapt.set_defaults(func=_cmd_adapt)

    transform = sub.add_parser("transform", help="apply one named rewrite")
    transform.add_argument("input")
    transform.add_argument("--kind", required=True,
                           help="e.g. T2_FlipIf or P3_Normalize")
    transform.add_argument("--site", type=int, default=0,
                           help="index among applicable sites of that kind")
    _common_flags(transform)
    transform.set_defaults(func=_cmd_transform)

    evalm = sub.add_parser("eval-metrics",
                           help="per-metric ROC-AUC table over a manifest")
    evalm.add_argument("--manifest", required=True, help="dataset CSV")
    evalm.add_argument("--metrics", default="entropy,vanilla",
                       help="comma-separated metric kinds")
    _common_flags(evalm)
    evalm.set_defaults(func=_cmd_eval_metrics)

    serve_mock = sub.add_parser("serve-mock",
                                help="serve a built-in model over the "
                                     "line protocol")
    _common_flags(serve_mock)
    serve_mock.set_defaults(func=_cmd_serve_mock)

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ReladaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
