"""Model adapters: built-in mocks and the wire-protocol client/server.

An adapter is anything that answers inference requests behind the
`Adapter` interface: the deterministic built-in mocks, or an external
process speaking the line-delimited protocol.
"""
from .base import Adapter, AdapterCapabilities, make_adapter
from .classifier import ClassifierSpec, MockClassifier, feature_vector, hidden_label
from .generator import GeneratorSpec, MockGenerator
from .corpusgen import bundled_corpus_dir, generate_program, write_bias_corpus
from .protocol import SubprocessAdapter, serve

__all__ = [
    "Adapter", "AdapterCapabilities", "make_adapter",
    "ClassifierSpec", "MockClassifier", "feature_vector", "hidden_label",
    "GeneratorSpec", "MockGenerator",
    "bundled_corpus_dir", "generate_program", "write_bias_corpus",
    "SubprocessAdapter", "serve",
]
