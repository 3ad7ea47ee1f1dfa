"""Shared helpers: a served bridge process and golden transcript access."""
from __future__ import annotations

import json
import subprocess
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


class Server:
    """One `relbridge serve` process driven line by line."""

    def __init__(self, *args: str):
        self.proc = subprocess.Popen(
            ["relbridge", "serve", *args],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.PIPE, text=True, bufsize=1)

    def ask(self, request) -> dict:
        line = request if isinstance(request, str) else json.dumps(request)
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()
        answer = self.proc.stdout.readline()
        assert answer, "server closed the stream"
        return json.loads(answer)

    def close(self) -> None:
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


@pytest.fixture(scope="module")
def server():
    srv = Server()
    yield srv
    srv.close()


def golden(name: str) -> list[dict]:
    path = DATA / f"golden_{name}.jsonl"
    return [json.loads(line) for line in path.read_text().splitlines()]


def fixture_snippets() -> list[dict]:
    path = DATA / "fixtures.jsonl"
    return [json.loads(line) for line in path.read_text().splitlines()]
