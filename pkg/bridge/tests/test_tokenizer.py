import pytest

from relbridge.tokenizer import CONT, END, UNK, Tokenizer, build_vocab, pretokenize

SAMPLE = ["fn measure(alpha, beta) { return alpha / beta; }",
          "fn measure(alpha) { let beta = alpha + 1; return beta; }",
          "fn compute(alpha, beta) { return alpha % beta; }",
          "fn compute(beta) { while (beta < 9) { let beta = beta + 1; } return beta; }"]


def make() -> Tokenizer:
    return Tokenizer(build_vocab(SAMPLE, min_count=2))


class TestPretokenize:
    def test_words_and_punctuation(self):
        assert pretokenize("fn f(a) { return a; }") == [
            "fn", "f", "(", "a", ")", "{", "return", "a", ";", "}"]

    def test_whitespace_only(self):
        assert pretokenize("  \n\t ") == []

    def test_digits_stay_in_words(self):
        assert pretokenize("v1 = 10") == ["v1", "=", "10"]


class TestVocab:
    def test_specials_lead(self):
        vocab = build_vocab(SAMPLE, min_count=2)
        assert vocab[0] == UNK
        assert vocab[1] == END
        assert len(set(vocab)) == len(vocab)

    def test_frequent_words_enter_whole(self):
        vocab = build_vocab(SAMPLE, min_count=2)
        assert "alpha" in vocab
        assert "return" in vocab

    def test_rare_words_stay_out(self):
        vocab = build_vocab(SAMPLE, min_count=3)
        assert "compute" not in vocab

    def test_missing_specials_rejected(self):
        with pytest.raises(ValueError):
            Tokenizer(["a", "b"])

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            Tokenizer([UNK, END, "a", "a"])


class TestEncode:
    def test_known_word_is_one_piece(self):
        tok = make()
        ids = tok.encode("alpha")
        assert ids == [tok.piece_id("alpha")]

    def test_unknown_word_splits_to_pieces(self):
        tok = make()
        pieces = [tok.vocab[i] for i in tok.encode("zq")]
        assert pieces == ["z", CONT + "q"]

    def test_greedy_prefers_longest_prefix(self):
        # "alphabet" starts with the whole-word entry "alpha"
        tok = make()
        pieces = [tok.vocab[i] for i in tok.encode("alphabet")]
        assert pieces[0] == "alpha"
        assert all(p.startswith(CONT) for p in pieces[1:])

    def test_unknown_character_becomes_unk(self):
        tok = make()
        assert tok.encode("§") == [tok.unk_id]

    def test_deterministic(self):
        tok = make()
        text = SAMPLE[0]
        assert tok.encode(text) == tok.encode(text)


class TestDecode:
    def test_continuations_reattach(self):
        tok = make()
        assert tok.decode(tok.encode("zq")) == "zq"

    def test_program_text_round_trips_words(self):
        tok = make()
        text = "fn measure ( alpha ) { return alpha ; }"
        assert tok.decode(tok.encode(text)) == text
