import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexhier.preprocess import (
    Lemmatizer,
    RawDocument,
    clean,
    default_lemmatizer,
    lemmatize,
    load_lemma_exceptions,
    load_stopwords,
    preprocess,
    read_corpus,
    read_token_file,
    tokenize,
    write_token_file,
)

ALPHA = re.compile(r"^[a-z]+$")


class TestTokenize:
    def test_empty_text(self):
        assert tokenize(RawDocument("d", "")) == []

    def test_sentence_splitting(self):
        assert tokenize("Good food. Bad staff!") == [["Good", "food"], ["Bad", "staff"]]

    def test_hyphen_splits(self):
        assert tokenize("wi-fi") == [["wi", "fi"]]

    def test_casing_preserved(self):
        assert tokenize("HELLO world") == [["HELLO", "world"]]

    def test_question_marks_and_runs(self):
        assert tokenize("Really?! Yes... ok") == [["Really"], ["Yes"], ["ok"]]

    def test_symbols_stay_in_tokens(self):
        # emoji are not punctuation: they survive tokenize and die in clean
        assert tokenize("nice 🙂 day") == [["nice", "🙂", "day"]]


class TestClean:
    def test_drops_nonalpha_tokens(self):
        assert clean([["Good", "food", "123", "🙂"]], set()) == [["good", "food"]]

    def test_stopwords_case_insensitive(self):
        assert clean([["The", "food"]], {"the"}) == [["food"]]

    def test_lowercases(self):
        assert clean([["FOOD"]], set()) == [["food"]]

    def test_drops_accented_tokens(self):
        # output alphabet is strictly [a-z]+
        assert clean([["café", "menu"]], set()) == [["menu"]]

    def test_empty_sentences_removed(self):
        assert clean([["123"], ["food"]], set()) == [["food"]]

    @given(
        st.lists(
            st.lists(st.text(min_size=1, max_size=8), min_size=0, max_size=6),
            max_size=6,
        )
    )
    @settings(max_examples=200)
    def test_idempotent_and_alphabet(self, stream):
        stops = {"the", "a", "of"}
        once = clean(stream, stops)
        assert clean(once, stops) == once
        for sentence in once:
            for token in sentence:
                assert ALPHA.match(token)
                assert token not in stops

    def test_order_preservation(self):
        stream = [["Zebra", "123", "apple", "Fork", "🙂", "spoon"]]
        assert clean(stream, set()) == [["zebra", "apple", "fork", "spoon"]]


class TestLemmatizer:
    def test_identity_on_base_forms(self):
        assert lemmatize([["table"]]) == [["table"]]

    def test_sibilant_es(self):
        assert lemmatize([["dishes"]]) == [["dish"]]

    def test_doubled_consonant_ing(self):
        assert lemmatize([["running"]]) == [["run"]]

    @pytest.mark.parametrize(
        "word,lemma",
        [
            ("plates", "plate"),
            ("berries", "berry"),
            ("tomatoes", "tomato"),
            ("glasses", "glass"),
            ("boxes", "box"),
            ("making", "make"),
            ("cooked", "cook"),
            ("stopped", "stop"),
            ("ordered", "order"),
            ("tried", "try"),
            ("children", "child"),
            ("menus", "menu"),
            ("delicious", "delicious"),
            ("grilling", "grill"),
        ],
    )
    def test_rule_table(self, word, lemma):
        lem = default_lemmatizer()
        assert lem.lemma(word) == lemma

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=14))
    @settings(max_examples=500)
    def test_idempotent(self, word):
        lem = default_lemmatizer()
        assert lem.lemma(lem.lemma(word)) == lem.lemma(word)

    def test_exception_table_is_terminal(self):
        lem = Lemmatizer({"went": "go"})
        assert lem.lemma("went") == "go"

    def test_stream_idempotence(self):
        stream = [["dishes", "running", "dressings", "knives"]]
        once = lemmatize(stream)
        assert lemmatize(once) == once


class TestPipeline:
    def test_full_preprocess(self):
        doc = RawDocument("r1", "The dishes were AMAZING! Prices 20% off.")
        out = preprocess(doc)
        assert out == [["dish", "amaze"], ["price"]]

    def test_lemma_landing_on_stopword_is_removed(self):
        # "cans" -> "can", which is a stopword
        out = preprocess(RawDocument("d", "cans of soup"), stops={"can", "of"})
        assert out == [["soup"]]


class TestDataFiles:
    def test_default_stopwords_lowercase(self):
        stops = load_stopwords()
        assert stops and all(w == w.lower() for w in stops)

    def test_lemma_exceptions_are_fixpoints(self):
        lem = Lemmatizer(load_lemma_exceptions())
        for target in set(lem.exceptions.values()):
            assert lem.lemma(target) == target

    def test_custom_files(self, tmp_path):
        stop_path = tmp_path / "stops.txt"
        stop_path.write_text("foo\nbar\n")
        assert load_stopwords(stop_path) == {"foo", "bar"}
        exc_path = tmp_path / "lemmas.txt"
        exc_path.write_text("oxen ox\n")
        assert load_lemma_exceptions(exc_path) == {"oxen": "ox"}


class TestCorpusIO:
    def test_read_line_delimited(self, tmp_path):
        path = tmp_path / "corpus.txt"
        path.write_text("first doc\nsecond doc\n")
        docs = list(read_corpus(path))
        assert [d.text for d in docs] == ["first doc", "second doc"]
        assert len({d.id for d in docs}) == 2

    def test_read_directory(self, tmp_path):
        (tmp_path / "b.txt").write_text("bravo")
        (tmp_path / "a.txt").write_text("alpha")
        docs = list(read_corpus(tmp_path))
        assert [d.id for d in docs] == ["a", "b"]

    def test_token_file_round_trip(self, tmp_path):
        stream = [["good", "food"], ["bad", "staff"]]
        path = tmp_path / "tokens.txt"
        write_token_file(path, stream)
        assert read_token_file(path) == stream
