"""Line-delimited JSON protocol server.

Request:  {"id": n, "op": "...", "payload": {...}}
Response: {"id": n, "ok": true, "result": {...}}
      or  {"id": n, "ok": false, "error": {"code": "...", "message": "..."}}

One request per line, one response per line, in order. The envelope and
error codes match the engine's own mock servers, so this process drops
in anywhere a cmd: adapter is accepted. If the model failed to load,
every request is answered with a structured model_error instead of a
dead pipe.
"""
from __future__ import annotations

import json
import sys

from .config import BridgeConfig
from .errors import BridgeError, LoadError, Unsupported
from .model import TinyCodeModel


def handle_request(model: TinyCodeModel, op: str, payload: dict) -> dict:
    flags = model.cfg.active_flags()
    if op == "capabilities":
        return {"adapter_id": model.adapter_id,
                "flags": sorted(flags),
                "labels": list(model.labels),
                "vocabulary": list(model.tokenizer.vocab)}
    if op in ("classify", "classify_stochastic", "embed",
              "classify_embedding", "generate", "sample", "step"):
        if op not in flags:
            raise Unsupported(f"{model.adapter_id} does not support {op}")
    if op == "classify":
        return {"probs": model.classify(payload["program"])}
    if op == "classify_stochastic":
        return {"probs": model.classify_stochastic(payload["program"],
                                                   int(payload["seed"]))}
    if op == "embed":
        return {"embedding": model.embed(payload["program"])}
    if op == "classify_embedding":
        return {"probs": model.classify_embedding(payload["embedding"])}
    if op == "generate":
        return model.generate(payload["prompt"], *_optional_len(payload))
    if op == "sample":
        samples = model.sample(payload["prompt"], int(payload["n"]),
                               payload.get("temperature"),
                               int(payload.get("seed", 0)),
                               *_optional_len(payload))
        return {"samples": samples}
    if op == "step":
        return {"probs": model.step(payload["prefix"])}
    raise BridgeError(f"unknown op {op!r}", code="unknown_op")


def _optional_len(payload: dict) -> tuple:
    return (int(payload["max_len"]),) if "max_len" in payload else ()


def _error(code: str, message: str) -> dict:
    return {"code": code, "message": message}


def serve(model: TinyCodeModel | LoadError, stdin=None, stdout=None) -> None:
    """Answer protocol requests until end of input.

    Passing a LoadError instead of a model serves the degraded mode in
    which every operation reports the load failure.
    """
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
                raise BridgeError("op must be a string and payload an object",
                                  code="bad_request")
            if isinstance(model, LoadError):
                raise model
            response = {"id": request_id, "ok": True,
                        "result": handle_request(model, op, payload)}
        except json.JSONDecodeError as exc:
            response = {"id": request_id, "ok": False,
                        "error": _error("bad_request", str(exc))}
        except BridgeError as exc:
            response = {"id": request_id, "ok": False,
                        "error": _error(exc.code, str(exc))}
        except (KeyError, ValueError, TypeError) as exc:
            response = {"id": request_id, "ok": False,
                        "error": _error("bad_request", str(exc))}
        except MemoryError as exc:
            response = {"id": request_id, "ok": False,
                        "error": _error("oom", str(exc) or "out of memory")}
        except Exception as exc:
            response = {"id": request_id, "ok": False,
                        "error": _error("internal", str(exc))}
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()


def serve_config(cfg: BridgeConfig, stdin=None, stdout=None) -> None:
    try:
        model: TinyCodeModel | LoadError = TinyCodeModel.load(cfg)
    except LoadError as exc:
        print(f"warning: serving without a model: {exc}", file=sys.stderr)
        model = exc
    serve(model, stdin, stdout)
