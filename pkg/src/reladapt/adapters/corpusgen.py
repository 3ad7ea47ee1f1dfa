"""Seeded MiniLang program generation: the bundled training corpus for the
n-gram generator and the planted-bias evaluation corpus for the classifier.

Generated programs keep loops counter-bounded and draw integer literals from
a small pool so interpretation stays cheap and token vocabularies stay small.
"""
from __future__ import annotations

import csv
import importlib.resources
import random
from pathlib import Path

from ..minilang import parse
from .classifier import hidden_label

LONG_NAMES = ("alpha", "beta", "gamma", "delta", "omega", "total", "count",
              "value", "accum", "limit", "index", "scale", "shift", "bound",
              "level", "width")
SHORT_NAMES = ("a", "b", "c", "x", "y", "z", "n", "m", "i", "j", "k", "p")
FN_NAMES = ("main", "compute", "process", "evaluate", "reduce", "measure",
            "combine", "resolve")
INT_POOL = (0, 1, 2, 3, 5, 7, 10)

SHAPES = ("plain", "branch", "loop", "divide", "nested", "helper")


def _pick_names(rng: random.Random, count: int, short: bool) -> list[str]:
    pool = SHORT_NAMES if short else LONG_NAMES
    return rng.sample(pool, count)


def _small(rng: random.Random) -> int:
    return rng.choice((1, 2, 3, 5, 7))


def _lit(rng: random.Random) -> int:
    return rng.choice(INT_POOL)


def generate_program(seed: int, shape: str | None = None,
                     short_idents: bool = False) -> str:
    """One well-formed program; same (seed, shape, short_idents) -> same text."""
    rng = random.Random(f"corpus:{seed}:{shape}:{int(short_idents)}")
    if shape is None:
        shape = rng.choice(SHAPES)
    fn = rng.choice(FN_NAMES)
    names = _pick_names(rng, 5, short_idents)
    a, b, c, d, e = names

    if shape == "plain":
        return (f"fn {fn}({a}, {b}) {{\n"
                f"  let {c} = {a} + {_lit(rng)};\n"
                f"  let {d} = {b} * {_lit(rng)};\n"
                f"  return {c} + {d};\n"
                f"}}\n")
    if shape == "branch":
        return (f"fn {fn}({a}, {b}) {{\n"
                f"  let {c} = {_lit(rng)};\n"
                f"  if ({a} < {b}) {{\n"
                f"    {c} = {a} + {_lit(rng)};\n"
                f"  }} else {{\n"
                f"    {c} = {b} - {_lit(rng)};\n"
                f"  }}\n"
                f"  return {c};\n"
                f"}}\n")
    if shape == "loop":
        return (f"fn {fn}({a}) {{\n"
                f"  let {c} = {_small(rng)};\n"
                f"  let {d} = 0;\n"
                f"  while ({c} > 0) {{\n"
                f"    {d} = {d} + {a};\n"
                f"    {c} = {c} - 1;\n"
                f"  }}\n"
                f"  return {d};\n"
                f"}}\n")
    if shape == "divide":
        op = rng.choice(("/", "%"))
        return (f"fn {fn}({a}, {b}) {{\n"
                f"  let {c} = {a} {op} {_small(rng)};\n"
                f"  let {d} = {b} * {_lit(rng)};\n"
                f"  return {c} + {d};\n"
                f"}}\n")
    if shape == "nested":
        return (f"fn {fn}({a}) {{\n"
                f"  let {c} = {_small(rng)};\n"
                f"  let {d} = 0;\n"
                f"  while ({c} > 0) {{\n"
                f"    let {e} = {_small(rng)};\n"
                f"    while ({e} > 0) {{\n"
                f"      {d} = {d} + {a};\n"
                f"      {e} = {e} - 1;\n"
                f"    }}\n"
                f"    {c} = {c} - 1;\n"
                f"  }}\n"
                f"  return {d};\n"
                f"}}\n")
    if shape == "helper":
        helper = rng.choice([h for h in FN_NAMES if h != fn])
        return (f"fn {fn}({a}, {b}) {{\n"
                f"  let {c} = {helper}({a});\n"
                f"  return {c} + {b};\n"
                f"}}\n"
                f"fn {helper}({d}) {{\n"
                f"  return {d} * {_lit(rng)};\n"
                f"}}\n")
    raise ValueError(f"unknown shape {shape!r}")


def write_bias_corpus(directory, count: int = 200, seed: int = 0) -> Path:
    """Half the programs use short identifiers (the planted bias trigger);
    shapes cycle so both hidden labels occur in both halves. Returns the
    manifest path; rows are `path,label` with ground-truth labels."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(count):
        short = i % 2 == 1
        shape = SHAPES[:5][(i // 2) % 5]  # helper shape omitted: single entry fn
        text = generate_program(seed * 100000 + i, shape, short_idents=short)
        parse(text)  # refuse to emit anything ill-formed
        name = f"prog_{i:04d}.mini"
        (directory / name).write_text(text, encoding="utf-8")
        rows.append((name, hidden_label(text)))
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(rows)
    return manifest


def write_training_corpus(directory, count: int = 60, seed: int = 7) -> list[Path]:
    """Long-identifier programs across all shapes; the generator's food."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        shape = SHAPES[i % len(SHAPES)]
        text = generate_program(seed * 100000 + i, shape, short_idents=False)
        parse(text)
        path = directory / f"sample_{i:03d}.mini"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths


def bundled_corpus_dir():
    """Traversable directory holding the shipped .mini corpus."""
    return importlib.resources.files("reladapt").joinpath("corpus")


def bundled_corpus_texts() -> list[str]:
    root = bundled_corpus_dir()
    texts = [entry.read_text(encoding="utf-8")
             for entry in sorted(root.iterdir(), key=lambda e: e.name)
             if entry.name.endswith(".mini")]
    return texts
