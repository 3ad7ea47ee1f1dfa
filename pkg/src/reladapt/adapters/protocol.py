"""Line-delimited JSON protocol between the engine and an adapter process.

Request:  {"id": n, "op": "...", "payload": {...}}
Response: {"id": n, "ok": true, "result": {...}}
      or  {"id": n, "ok": false, "error": {"code": "...", "message": "..."}}

One request per line, one response per line, in order. Floats survive the
wire exactly: json round-trips Python floats through repr.
"""
from __future__ import annotations

import json
import shlex
import subprocess
import sys

from ..errors import (
    AdapterError, AdapterUnavailable, DegenerateInput, DimensionMismatch,
    MissingCapability, ParseError, ReladaptError, UnknownToken,
)
from ..metrics import GenerationResult, ProbVector
from ..minilang import pretty
from .base import Adapter, AdapterCapabilities

_CODE_OF = (
    (ParseError, "parse_error"),
    (DegenerateInput, "degenerate_input"),
    (MissingCapability, "missing_capability"),
    (DimensionMismatch, "dimension_mismatch"),
    (UnknownToken, "unknown_token"),
)

_ERROR_BY_CODE = {
    "degenerate_input": DegenerateInput,
    "missing_capability": MissingCapability,
    "dimension_mismatch": DimensionMismatch,
    "unknown_token": UnknownToken,
}


def _error_code(exc: Exception) -> str:
    for klass, code in _CODE_OF:
        if isinstance(exc, klass):
            return code
    if isinstance(exc, (ValueError, TypeError, KeyError)):
        return "bad_request"
    return "internal"


def _generation_payload(g: GenerationResult) -> dict:
    return {
        "tokens": list(g.tokens),
        "logprobs": list(g.logprobs),
        "step_dists": (None if g.step_dists is None
                       else [list(d.probs) for d in g.step_dists]),
        "complete": g.complete,
    }


def _generation_from(payload: dict) -> GenerationResult:
    return GenerationResult(payload["tokens"], payload["logprobs"],
                            payload["step_dists"],
                            payload.get("complete", True))


def handle_request(adapter: Adapter, op: str, payload: dict) -> dict:
    if op == "capabilities":
        caps = adapter.capabilities()
        return {"adapter_id": adapter.adapter_id,
                "flags": sorted(caps.flags),
                "labels": list(caps.labels),
                "vocabulary": list(caps.vocabulary)}
    if op == "classify":
        return {"probs": list(adapter.classify(payload["program"]).probs)}
    if op == "classify_stochastic":
        probs = adapter.classify_stochastic(payload["program"],
                                            int(payload["seed"]))
        return {"probs": list(probs.probs)}
    if op == "embed":
        return {"embedding": list(adapter.embed(payload["program"]))}
    if op == "classify_embedding":
        probs = adapter.classify_embedding(payload["embedding"])
        return {"probs": list(probs.probs)}
    if op == "generate":
        result = adapter.generate(payload["prompt"],
                                  *_optional_len(payload))
        return _generation_payload(result)
    if op == "sample":
        samples = adapter.sample(payload["prompt"], int(payload["n"]),
                                 payload.get("temperature"),
                                 int(payload.get("seed", 0)),
                                 *_optional_len(payload))
        return {"samples": [_generation_payload(s) for s in samples]}
    if op == "step":
        return {"probs": list(adapter.step(payload["prefix"]).probs)}
    raise AdapterError(f"unknown op {op!r}", code="unknown_op")


def _optional_len(payload: dict) -> tuple:
    return (int(payload["max_len"]),) if "max_len" in payload else ()


def serve(adapter: Adapter, stdin=None, stdout=None) -> None:
    """Answer protocol requests until end of input."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        request_id = None
        try:
            request = json.loads(line)
            request_id = request.get("id")
            op = request["op"]
            payload = request.get("payload", {})
            if not isinstance(op, str) or not isinstance(payload, dict):
                raise AdapterError("op must be a string and payload an object",
                                   code="bad_request")
            response = {"id": request_id, "ok": True,
                        "result": handle_request(adapter, op, payload)}
        except json.JSONDecodeError as exc:
            response = {"id": request_id, "ok": False,
                        "error": {"code": "bad_request", "message": str(exc)}}
        except AdapterError as exc:
            response = {"id": request_id, "ok": False,
                        "error": {"code": exc.code, "message": str(exc)}}
        except Exception as exc:
            response = {"id": request_id, "ok": False,
                        "error": {"code": _error_code(exc),
                                  "message": str(exc)}}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


class SubprocessAdapter(Adapter):
    """Client side of the protocol: runs a command and proxies every
    operation to it over pipes."""

    def __init__(self, command: str):
        self.adapter_id = f"cmd:{command}"
        try:
            self._proc = subprocess.Popen(
                shlex.split(command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, text=True, bufsize=1)
        except OSError as exc:
            raise AdapterUnavailable(f"cannot launch {command!r}: {exc}") from exc
        self._next_id = 0
        self._caps: AdapterCapabilities | None = None

    def _call(self, op: str, payload: dict) -> dict:
        if self._proc.poll() is not None:
            raise AdapterError("adapter process has exited")
        self._next_id += 1
        request = {"id": self._next_id, "op": op, "payload": payload}
        self._proc.stdin.write(json.dumps(request) + "\n")
        self._proc.stdin.flush()
        line = self._proc.stdout.readline()
        if not line:
            raise AdapterError("adapter closed the stream mid-request")
        response = json.loads(line)
        if response.get("id") != self._next_id:
            raise AdapterError(
                f"response id {response.get('id')} does not match request")
        if response.get("ok"):
            return response["result"]
        error = response.get("error", {})
        code = error.get("code", "internal")
        message = error.get("message", "adapter error")
        klass = _ERROR_BY_CODE.get(code)
        if klass is not None:
            raise klass(message)
        raise AdapterError(message, code=code)

    def capabilities(self) -> AdapterCapabilities:
        if self._caps is None:
            result = self._call("capabilities", {})
            self._caps = AdapterCapabilities(
                frozenset(result["flags"]),
                labels=tuple(result["labels"]),
                vocabulary=tuple(result["vocabulary"]))
        return self._caps

    def classify(self, program) -> ProbVector:
        payload = {"program": _wire_program(program)}
        return ProbVector(self._call("classify", payload)["probs"])

    def classify_stochastic(self, program, seed: int) -> ProbVector:
        result = self._call("classify_stochastic",
                            {"program": _wire_program(program), "seed": seed})
        return ProbVector(result["probs"])

    def embed(self, program) -> tuple[float, ...]:
        payload = {"program": _wire_program(program)}
        return tuple(self._call("embed", payload)["embedding"])

    def classify_embedding(self, embedding) -> ProbVector:
        result = self._call("classify_embedding",
                            {"embedding": list(embedding)})
        return ProbVector(result["probs"])

    def generate(self, prompt, max_len: int | None = None) -> GenerationResult:
        payload = {"prompt": _wire_prompt(prompt)}
        if max_len is not None:
            payload["max_len"] = max_len
        return _generation_from(self._call("generate", payload))

    def sample(self, prompt, n: int, temperature: float | None = None,
               seed: int = 0, max_len: int | None = None) -> list[GenerationResult]:
        payload = {"prompt": _wire_prompt(prompt), "n": n, "seed": seed}
        if temperature is not None:
            payload["temperature"] = temperature
        if max_len is not None:
            payload["max_len"] = max_len
        result = self._call("sample", payload)
        return [_generation_from(s) for s in result["samples"]]

    def step(self, prefix) -> ProbVector:
        return ProbVector(self._call("step", {"prefix": list(prefix)})["probs"])

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
                self._proc.wait()


def _wire_prompt(prompt):
    if isinstance(prompt, (list, tuple)):
        return list(prompt)
    return getattr(prompt, "text", prompt)


def _wire_program(program) -> str:
    return program if isinstance(program, str) else pretty(program)
