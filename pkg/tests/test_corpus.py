import numpy as np
import pytest

from supertag.corpus import (PAD, RARE, UNK, CapClass, Sentence, TagSet, Vocab, build_charset,
                             build_vocab_tagset, capitalization_class, load_corpus, load_embeddings,
                             preprocess_token, read_corpus, read_embeddings, write_corpus)
from supertag.errors import CorpusError


@pytest.mark.parametrize("surface, expected", [
    ("Mar1988", "mar9999"),
    ("THE", "the"),
    ("B2B-2.0", "b9b-9.9"),
])
def test_preprocess_token(surface, expected):
    assert preprocess_token(surface) == expected
    assert preprocess_token(expected) == expected


@pytest.mark.parametrize("surface, expected", [
    ("the", CapClass.LOWER),
    ("The", CapClass.FIRST_UPPER),
    ("IBM", CapClass.ALL_UPPER),
    ("McDonald", CapClass.MIXED),
    ("9.5", CapClass.NO_ALPHA),
    (",", CapClass.NO_ALPHA),
])
def test_capitalization_class(surface, expected):
    assert capitalization_class(surface) == expected


def test_read_two_and_three_field_tokens():
    plain = read_corpus(["He|NP eats|(S\\NP)/NP"])
    with_pos = read_corpus(["He|PRP|NP eats|VBZ|(S\\NP)/NP"])
    assert plain == with_pos
    assert plain[0].surfaces == ["He", "eats"]
    assert plain[0].words == ["he", "eats"]
    assert plain[0].supertags == ["NP", "(S\\NP)/NP"]


def test_malformed_token_names_line():
    with pytest.raises(CorpusError, match="corpus.txt:2"):
        read_corpus(["He|NP", "He"], path="corpus.txt")


def test_blank_lines_inside_corpus_rejected_but_trailing_allowed():
    assert len(read_corpus(["a|N", "b|N", "", ""])) == 2
    with pytest.raises(CorpusError, match=":2:"):
        read_corpus(["a|N", "", "b|N"], path="c")


def test_corpus_file_round_trip(tmp_path):
    path = tmp_path / "train.txt"
    sentences = [Sentence.from_pairs([("The", "NP[nb]/N"), ("dog", "N")])]
    write_corpus(sentences, path)
    assert load_corpus(path) == sentences


def test_vocab_and_tagset_from_toy_corpus():
    train = read_corpus(["The|NP[nb]/N dog|N barks|S[dcl]\\NP", "the|NP[nb]/N cat|N ran|S[dcl]\\NP"])
    vocab, tagset = build_vocab_tagset(train)
    assert len(vocab) == 5 + 2
    assert vocab.symbols[:2] == [PAD, UNK]
    assert len(tagset) == 3 + 1
    assert tagset.id("(S\\NP)/NP") == tagset.rare_id
    assert tagset.symbol(tagset.rare_id) == RARE
    assert vocab.id("zebra") == vocab.unk_id


def test_min_word_count_maps_rare_words_to_unk():
    train = read_corpus(["zebra|N dog|N", "dog|N"])
    vocab, _ = build_vocab_tagset(train, min_word_count=2)
    assert vocab.id("zebra") == vocab.unk_id
    assert vocab.id("dog") != vocab.unk_id


def test_min_tag_count_moves_tags_to_rare():
    train = read_corpus(["a|N b|N c|NP"])
    _, tagset = build_vocab_tagset(train, min_tag_count=2)
    assert "NP" not in tagset
    assert tagset.id("NP") == tagset.rare_id


def test_empty_training_set():
    with pytest.raises(CorpusError):
        build_vocab_tagset([])


def test_vocab_ids_are_a_bijection_and_reload(tmp_path):
    train = read_corpus(["The|NP[nb]/N dog|N barks|S[dcl]\\NP"])
    vocab, tagset = build_vocab_tagset(train)
    assert sorted(vocab.index.values()) == list(range(len(vocab)))
    vocab.save(tmp_path / "words.txt")
    tagset.save(tmp_path / "tags.txt")
    assert Vocab.load(tmp_path / "words.txt") == vocab
    assert TagSet.load(tmp_path / "tags.txt") == tagset


def test_vocab_file_must_be_dense():
    with pytest.raises(CorpusError, match="dense"):
        Vocab.from_lines(["0\t<PAD>", "1\t<UNK>", "3\tdog"])


def test_charset_holds_preprocessed_characters():
    charset = build_charset(read_corpus(["Ab1|N"]))
    assert "a" in charset and "9" in charset
    assert "A" not in charset


def test_read_embeddings():
    table = read_embeddings(["the 1 2 3 4", "dog 0 0 0 1", "cat 1 1 1 1"], 4)
    assert len(table) == 3
    np.testing.assert_array_equal(table.get("dog"), [0, 0, 0, 1])
    assert table.get("zebra") is None


def test_embedding_dimension_mismatch_names_line():
    with pytest.raises(CorpusError, match="vec.txt:2"):
        read_embeddings(["the 1 2 3 4", "dog 1 2 3"], 4, path="vec.txt")


def test_embedding_bad_number():
    with pytest.raises(CorpusError, match="unreadable"):
        read_embeddings(["the 1 2 x 4"], 4)


def test_duplicate_embedding_last_wins(caplog):
    table = read_embeddings(["the 1 1", "the 2 2"], 2)
    np.testing.assert_array_equal(table.get("the"), [2, 2])
    assert "Duplicate embedding" in caplog.text


def test_load_embeddings_file(tmp_path):
    path = tmp_path / "vec.txt"
    path.write_text("the 0.5 0.25\n", encoding="utf-8")
    assert load_embeddings(path, 2).dim == 2
