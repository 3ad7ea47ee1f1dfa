"""Record golden protocol transcripts from the engine's mock servers.

Launches `reladapt serve-mock` for both built-ins, sends a fixed list
of requests (including deliberately broken ones), and freezes each
exchange as one JSON line: {"send": <raw request line>, "response":
<parsed response>}. The conformance tests replay the same lines against
`relbridge serve` and compare envelope structure and error codes.

Usage: python3 tools/record_golden.py
"""
from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"

CLASSIFIER_REQUESTS: list = [
    {"id": 3, "op": "capabilities"},
    {"id": 17, "op": "classify",
     "payload": {"program": "fn f(a, b) { return a / b; }"}},
    {"id": 4, "op": "classify",
     "payload": {"program": "fn add(alpha, beta) { return alpha + beta; }"}},
    {"id": 99, "op": "classify_stochastic",
     "payload": {"program": "fn add(alpha, beta) { return alpha + beta; }",
                 "seed": 7}},
    {"id": 100, "op": "embed",
     "payload": {"program": "fn add(alpha, beta) { return alpha + beta; }"}},
    # id 101 is chained onto the embed response by the recorder loop
    {"id": 102, "op": "classify_embedding", "payload": {"embedding": [1.0]}},
    {"id": 0, "op": "step", "payload": {"prefix": []}},
    {"id": -5, "op": "frobnicate", "payload": {}},
    {"id": 6, "op": "classify", "payload": {}},
    "this is not json",
    {"id": 8, "op": 5, "payload": {}},
    {"id": 9, "op": "classify", "payload": {"program": 17}},
]

GENERATOR_REQUESTS: list = [
    {"id": 11, "op": "capabilities"},
    {"id": 12, "op": "generate",
     "payload": {"prompt": "fn main ( ) {", "max_len": 12}},
    {"id": 13, "op": "sample",
     "payload": {"prompt": "fn main ( ) {", "n": 3, "temperature": 0.8,
                 "seed": 5, "max_len": 12}},
    {"id": 14, "op": "generate",
     "payload": {"prompt": "write a sorting function", "max_len": 10}},
    {"id": 15, "op": "classify",
     "payload": {"program": "fn f() { return 1; }"}},
    {"id": 16, "op": "step", "payload": {"prefix": ["fn"]}},
    {"id": 18, "op": "generate", "payload": {"prompt": "fn", "max_len": 0}},
    {"id": 19, "op": "sample", "payload": {"prompt": "fn"}},
]


def record(adapter: str, requests: list) -> list[dict]:
    proc = subprocess.Popen(
        ["reladapt", "serve-mock", "--adapter", adapter],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1)
    exchanges = []
    try:
        for request in requests:
            line = request if isinstance(request, str) else json.dumps(request)
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
            response = json.loads(proc.stdout.readline())
            exchanges.append({"send": line, "response": response})
            if (isinstance(request, dict) and request["id"] == 100
                    and response.get("ok")):
                chained = {"id": 101, "op": "classify_embedding",
                           "payload": {"embedding":
                                       response["result"]["embedding"]}}
                line = json.dumps(chained)
                proc.stdin.write(line + "\n")
                proc.stdin.flush()
                response = json.loads(proc.stdout.readline())
                exchanges.append({"send": line, "response": response})
    finally:
        proc.stdin.close()
        proc.wait(timeout=10)
    return exchanges


def main() -> None:
    if shutil.which("reladapt") is None:
        sys.exit("reladapt is not on PATH; install the engine first")
    DATA.mkdir(parents=True, exist_ok=True)
    for name, adapter, requests in (
            ("golden_classifier.jsonl", "builtin:classifier",
             CLASSIFIER_REQUESTS),
            ("golden_generator.jsonl", "builtin:generator",
             GENERATOR_REQUESTS)):
        exchanges = record(adapter, requests)
        path = DATA / name
        path.write_text(
            "".join(json.dumps(e) + "\n" for e in exchanges),
            encoding="utf-8")
        print(f"wrote {path} ({len(exchanges)} exchanges)")


if __name__ == "__main__":
    main()
