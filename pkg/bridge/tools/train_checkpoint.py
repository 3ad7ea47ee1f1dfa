"""Regenerate the bundled tiny-code-v0 checkpoint.

Builds a seeded corpus of labeled snippets, fits the tokenizer
vocabulary, freezes a random-feature embedding table, trains the
linear classification head, counts the subword bigram table, and
writes everything as one JSON checkpoint. Fully deterministic: the
output file is byte-identical across runs.

Usage: python3 tools/train_checkpoint.py [--out PATH]
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from relbridge.tokenizer import Tokenizer, build_vocab  # noqa: E402

MODEL_ID = "tiny-code-v0"
DIM = 64
LABELS = ("clean", "defective")

LONG_NAMES = ("alpha", "beta", "gamma", "delta", "total", "count", "limit",
              "value", "accum", "result", "left", "right", "size", "index")
SHORT_NAMES = ("a", "b", "c", "i", "j", "k", "n", "q", "x", "y")


def _names(rng: random.Random, count: int) -> list[str]:
    # identifier style is drawn independently of the label so the head
    # cannot learn a surface shortcut from naming
    pool = LONG_NAMES if rng.random() < 0.5 else SHORT_NAMES
    return list(rng.sample(pool, count))


def _snippet(rng: random.Random, shape: str) -> tuple[str, str]:
    f, = rng.sample(("measure", "compute", "process", "solve", "score"), 1)
    k1, k2 = rng.randrange(10), rng.randrange(1, 10)
    op = rng.choice(("+", "-", "*"))
    cmp_ = rng.choice(("<", ">"))
    if shape == "add":
        a, b = _names(rng, 2)
        return (f"fn {f}({a}, {b}) {{ return {a} {op} {b}; }}", "clean")
    if shape == "lets":
        a, b, c = _names(rng, 3)
        return (f"fn {f}({a}) {{ let {b} = {a} {op} {k2}; "
                f"let {c} = {b} {op} {a}; return {c} + {b}; }}", "clean")
    if shape == "branch":
        a, b = _names(rng, 2)
        return (f"fn {f}({a}, {b}) {{ if ({a} {cmp_} {b}) "
                f"{{ return {b}; }} else {{ return {a}; }} }}", "clean")
    if shape == "loop":
        a, s, i = _names(rng, 3)
        return (f"fn {f}({a}) {{ let {s} = {k1}; let {i} = 0; "
                f"while ({i} < {a}) {{ let {s} = {s} {op} {i}; "
                f"let {i} = {i} + 1; }} return {s}; }}", "clean")
    if shape == "twoloops":
        a, s, i = _names(rng, 3)
        loop1 = (f"while ({i} < {a}) {{ let {s} = {s} + {i}; "
                 f"let {i} = {i} + 1; }}")
        loop2 = (f"let {i} = 0; while ({i} < {s}) {{ let {i} = {i} + {k2}; }}")
        return (f"fn {f}({a}) {{ let {s} = 0; let {i} = 0; "
                f"{loop1} {loop2} return {s}; }}", "clean")
    if shape == "divide":
        a, b = _names(rng, 2)
        return (f"fn {f}({a}, {b}) {{ return {a} / {b}; }}", "defective")
    if shape == "modulo":
        a, b, c = _names(rng, 3)
        return (f"fn {f}({a}, {b}) {{ let {c} = {a} % {b}; "
                f"return {c} {op} {k2}; }}", "defective")
    if shape == "nested":
        a, s, i, j = _names(rng, 4)
        inner = f"while ({j} < {a}) {{ let {j} = {j} + 1; }}"
        return (f"fn {f}({a}) {{ let {s} = 0; let {i} = 0; "
                f"while ({i} < {a}) {{ let {j} = 0; {inner} "
                f"let {i} = {i} + 1; }} return {s}; }}", "defective")
    if shape == "loopdiv":
        a, s, i = _names(rng, 3)
        return (f"fn {f}({a}) {{ let {s} = {k2}; let {i} = 0; "
                f"while ({i} < {a}) {{ let {s} = {s} / 2; "
                f"let {i} = {i} + 1; }} return {s}; }}", "defective")
    raise ValueError(shape)


SHAPES = ("add", "lets", "branch", "loop", "twoloops",
          "divide", "modulo", "nested", "loopdiv")


def make_corpus(count: int, seed: int) -> list[tuple[str, str]]:
    rng = random.Random(f"tiny-code:corpus:{seed}")
    out = []
    for i in range(count):
        out.append(_snippet(rng, SHAPES[i % len(SHAPES)]))
    return out


def embed_table(vocab_size: int) -> np.ndarray:
    rng = random.Random("tiny-code:embed:0")
    scale = 1.0 / math.sqrt(DIM)
    rows = [[rng.gauss(0.0, scale) for _ in range(DIM)]
            for _ in range(vocab_size)]
    return np.array(rows)


def pool(tok: Tokenizer, table: np.ndarray, text: str) -> np.ndarray:
    ids = tok.encode(text)
    if not ids:
        return np.zeros(DIM)
    return table[ids].mean(axis=0)


def train_head(x: np.ndarray, y: np.ndarray,
               epochs: int = 3000, lr: float = 2.0,
               l2: float = 1e-4) -> tuple[np.ndarray, np.ndarray]:
    """Logistic head by full-batch gradient descent.

    Features are standardized for conditioning; the affine scaler is
    folded back into the returned weights so the checkpoint applies
    directly to raw pooled embeddings.
    """
    n = len(y)
    mu = x.mean(axis=0)
    sd = x.std(axis=0) + 1e-9
    xs = (x - mu) / sd
    w = np.zeros((2, DIM))
    b = np.zeros(2)
    onehot = np.eye(2)[y]
    for _ in range(epochs):
        logits = xs @ w.T + b
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        grad = (p - onehot) / n
        w -= lr * (grad.T @ xs + l2 * w)
        b -= lr * grad.sum(axis=0)
    return w / sd, b - (w * (mu / sd)).sum(axis=1)


def accuracy(x, y, w, b) -> float:
    pred = (x @ w.T + b).argmax(axis=1)
    return float((pred == y).mean())


def bigram_counts(tok: Tokenizer, texts: list[str]) -> dict[str, dict[str, int]]:
    counts: dict[str, dict[str, int]] = {}
    for text in texts:
        chain = [-1] + tok.encode(text) + [tok.end_id]
        for prev, nxt in zip(chain, chain[1:]):
            row = counts.setdefault(str(prev), {})
            row[str(nxt)] = row.get(str(nxt), 0) + 1
    return counts


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    default_out = (Path(__file__).resolve().parents[1]
                   / "src" / "relbridge" / "data" / f"{MODEL_ID}.json")
    ap.add_argument("--out", type=Path, default=default_out)
    args = ap.parse_args()

    corpus = make_corpus(700, seed=1)
    train, heldout = corpus[:600], corpus[600:]
    vocab = build_vocab([text for text, _ in train])
    tok = Tokenizer(vocab)
    table = embed_table(len(vocab))

    def matrix(pairs):
        x = np.stack([pool(tok, table, text) for text, _ in pairs])
        y = np.array([LABELS.index(label) for _, label in pairs])
        return x, y

    x_train, y_train = matrix(train)
    x_held, y_held = matrix(heldout)
    w, b = train_head(x_train, y_train)
    acc_train = accuracy(x_train, y_train, w, b)
    acc_held = accuracy(x_held, y_held, w, b)
    print(f"train accuracy   {acc_train:.3f} ({len(train)} snippets)")
    print(f"heldout accuracy {acc_held:.3f} ({len(heldout)} snippets)")

    checkpoint = {
        "format": "relbridge-checkpoint-v1",
        "model_id": MODEL_ID,
        "dim": DIM,
        "labels": list(LABELS),
        "vocab": vocab,
        "embedding": [[float(v) for v in row] for row in table],
        "head_weight": [[float(v) for v in row] for row in w],
        "head_bias": [float(v) for v in b],
        "bigram": bigram_counts(tok, [text for text, _ in train]),
        "dropout": 0.15,
        "train_meta": {"examples": len(train),
                       "heldout_accuracy": round(acc_held, 4),
                       "corpus_seed": 1},
    }
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(checkpoint, sort_keys=True) + "\n",
                        encoding="utf-8")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
