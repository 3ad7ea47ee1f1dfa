"""Subword tokenizer with whole-word entries and character fallback.

The vocabulary holds specials, punctuation, frequent whole words, and
every ASCII identifier character both bare and in "##" continuation
form. A word outside the vocabulary splits greedily into the longest
matching prefix and "##" pieces; a word with no matching prefix at all
becomes a single unknown piece. This is deliberately not aligned with
any host language's token alphabet.
"""
from __future__ import annotations

UNK = "<unk>"
END = "<end>"
CONT = "##"

_WORD_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def pretokenize(text: str) -> list[str]:
    """Split text into word runs and single punctuation characters."""
    out: list[str] = []
    word = []
    for ch in text:
        if ch in _WORD_CHARS:
            word.append(ch)
            continue
        if word:
            out.append("".join(word))
            word = []
        if not ch.isspace():
            out.append(ch)
    if word:
        out.append("".join(word))
    return out


class Tokenizer:
    def __init__(self, vocab: list[str]):
        if len(set(vocab)) != len(vocab):
            raise ValueError("vocabulary has duplicate entries")
        if UNK not in vocab or END not in vocab:
            raise ValueError("vocabulary must contain the special pieces")
        self.vocab = list(vocab)
        self._index = {piece: i for i, piece in enumerate(vocab)}
        self.unk_id = self._index[UNK]
        self.end_id = self._index[END]

    def __len__(self) -> int:
        return len(self.vocab)

    def piece_id(self, piece: str) -> int:
        return self._index.get(piece, self.unk_id)

    def _split_word(self, word: str) -> list[int]:
        if word in self._index:
            return [self._index[word]]
        ids: list[int] = []
        start = 0
        while start < len(word):
            prefix = CONT if start else ""
            end = len(word)
            while end > start:
                piece = prefix + word[start:end]
                if piece in self._index:
                    ids.append(self._index[piece])
                    break
                end -= 1
            else:
                # no prefix matches at all; unknown swallows the rest
                ids.append(self.unk_id)
                break
            start = end
        return ids

    def encode(self, text: str) -> list[int]:
        ids: list[int] = []
        for pre in pretokenize(text):
            if pre[0] in _WORD_CHARS:
                ids.extend(self._split_word(pre))
            else:
                ids.append(self.piece_id(pre))
        return ids

    def decode(self, ids: list[int]) -> str:
        parts: list[str] = []
        for i in ids:
            piece = self.vocab[i]
            if piece.startswith(CONT) and parts:
                parts[-1] += piece[len(CONT):]
            else:
                parts.append(piece)
        return " ".join(parts)


def build_vocab(texts: list[str], min_count: int = 4) -> list[str]:
    """Assemble the vocabulary from a training corpus.

    Layout: specials, then punctuation seen in the corpus, then frequent
    whole words, then the character fallback tier. Order is frozen into
    checkpoints, so each tier is sorted.
    """
    words: dict[str, int] = {}
    punct: set[str] = set()
    for text in texts:
        for pre in pretokenize(text):
            if pre[0] in _WORD_CHARS:
                words[pre] = words.get(pre, 0) + 1
            else:
                punct.add(pre)
    frequent = sorted(w for w, n in words.items()
                      if n >= min_count and len(w) > 1)
    fallback: list[str] = []
    for ch in sorted(_WORD_CHARS):
        fallback.append(ch)
        fallback.append(CONT + ch)
    return [UNK, END] + sorted(punct) + frequent + fallback
