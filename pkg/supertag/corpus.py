"""
Supertag corpora, pretrained embeddings and vocabularies.

Corpus files hold one sentence per line. Tokens are separated by spaces and
each token is ``surface|supertag`` or ``surface|POS|supertag``; the POS
column is read and discarded.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Tuple

import numpy as np

from .categories import validate_tagset
from .errors import CorpusError

logger = logging.getLogger(__name__)

# Preprocessed forms are lowercase, so upper-case specials never collide.
PAD = "<PAD>"
UNK = "<UNK>"
RARE = "<RARE>"

_DIGIT = re.compile(r"[0-9]")


class CapClass(IntEnum):
    LOWER = 0
    FIRST_UPPER = 1
    ALL_UPPER = 2
    MIXED = 3
    NO_ALPHA = 4


def preprocess_token(surface):
    """Lowercase and map every ASCII digit to '9'."""
    return _DIGIT.sub("9", surface.lower())


def capitalization_class(surface):
    """Capitalization class of the original (not lowercased) surface."""
    letters = [ch for ch in surface if ch.isalpha()]
    if not letters:
        return CapClass.NO_ALPHA
    if all(ch.islower() for ch in letters):
        return CapClass.LOWER
    if letters[0].isupper() and all(ch.islower() for ch in letters[1:]):
        return CapClass.FIRST_UPPER
    if all(ch.isupper() for ch in letters):
        return CapClass.ALL_UPPER
    return CapClass.MIXED


@dataclass(frozen=True)
class Token:
    surface: str
    supertag: str

    @property
    def word(self):
        return preprocess_token(self.surface)


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("Sentence must contain at least one token")

    def __len__(self):
        return len(self.tokens)

    @property
    def surfaces(self):
        return [tok.surface for tok in self.tokens]

    @property
    def words(self):
        return [tok.word for tok in self.tokens]

    @property
    def supertags(self):
        return [tok.supertag for tok in self.tokens]

    @classmethod
    def from_pairs(cls, pairs):
        return cls(tuple(Token(surface, tag) for surface, tag in pairs))


def parse_corpus_line(line, path=None, line_number=None):
    tokens = []
    for item in line.split():
        fields = item.split("|")
        if len(fields) == 2:
            surface, tag = fields
        elif len(fields) == 3:
            surface, _pos, tag = fields
        else:
            raise CorpusError(
                f"token {item!r} has {len(fields)} field(s), expected surface|tag or surface|POS|tag",
                path, line_number)
        if not surface or not tag:
            raise CorpusError(f"token {item!r} has an empty field", path, line_number)
        tokens.append(Token(surface, tag))
    return Sentence(tuple(tokens))


def read_corpus(lines, path=None):
    """Parse corpus lines. Trailing blank lines are allowed, inner ones are not."""
    sentences = []
    blank_at = None
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            if blank_at is None:
                blank_at = number
            continue
        if blank_at is not None and sentences:
            raise CorpusError("empty line inside the corpus", path, blank_at)
        blank_at = None
        sentences.append(parse_corpus_line(line, path, number))
    return sentences


def load_corpus(path, format="pipe"):
    if format != "pipe":
        raise CorpusError(f"unsupported corpus format {format!r}", path)
    with open(path, encoding="utf-8") as f:
        sentences = read_corpus(f, path)
    logger.info("Loaded %d sentences (%d tokens) from %s",
                len(sentences), sum(len(s) for s in sentences), path)
    return sentences


def write_corpus(sentences, path):
    with open(path, "w", encoding="utf-8") as f:
        for sentence in sentences:
            f.write(" ".join(f"{tok.surface}|{tok.supertag}" for tok in sentence.tokens))
            f.write("\n")


class Vocab:
    """Dense symbol ↔ id map with reserved special symbols at the lowest ids.

    Unknown symbols map to ``fallback``.
    """

    def __init__(self, symbols, specials=(PAD, UNK), fallback=UNK, counts=None):
        self.specials = tuple(specials)
        self.fallback = fallback
        self.symbols = list(self.specials)
        for symbol in symbols:
            if symbol not in self.specials:
                self.symbols.append(symbol)
        self.index = {symbol: i for i, symbol in enumerate(self.symbols)}
        if len(self.index) != len(self.symbols):
            raise ValueError("Duplicate symbols in vocabulary")
        self.counts = Counter(counts or {})

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, symbol):
        return symbol in self.index

    def __eq__(self, other):
        return isinstance(other, Vocab) and self.symbols == other.symbols

    def id(self, symbol):
        return self.index.get(symbol, self.index[self.fallback])

    def ids(self, symbols):
        return [self.id(s) for s in symbols]

    def symbol(self, i):
        return self.symbols[i]

    @property
    def pad_id(self):
        return self.index[PAD]

    @property
    def unk_id(self):
        return self.index[self.fallback]

    def lines(self):
        return [f"{i}\t{symbol}" for i, symbol in enumerate(self.symbols)]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(self.lines()) + "\n")

    @classmethod
    def from_lines(cls, lines, specials=(PAD, UNK), fallback=UNK, path=None):
        symbols = []
        for number, raw in enumerate(lines, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            try:
                i, symbol = line.split("\t", 1)
                i = int(i)
            except ValueError:
                raise CorpusError(f"expected 'id<TAB>symbol', got {line!r}", path, number) from None
            if i != len(symbols):
                raise CorpusError(f"ids must be dense and ordered, got {i}", path, number)
            symbols.append(symbol)
        if tuple(symbols[:len(specials)]) != tuple(specials):
            raise CorpusError(f"vocabulary must start with {specials}", path)
        return cls(symbols, specials=specials, fallback=fallback)

    @classmethod
    def load(cls, path, **kwargs):
        with open(path, encoding="utf-8") as f:
            return cls.from_lines(f, path=path, **kwargs)


class TagSet(Vocab):
    """Supertag ids. Tags missing from training map to the RARE id."""

    def __init__(self, symbols, counts=None):
        super().__init__(symbols, specials=(RARE,), fallback=RARE, counts=counts)

    @property
    def rare_id(self):
        return self.index[RARE]

    @classmethod
    def from_lines(cls, lines, path=None, **_):
        vocab = Vocab.from_lines(lines, specials=(RARE,), fallback=RARE, path=path)
        return cls(vocab.symbols[1:])


def build_charset(sentences):
    """Character inventory of the preprocessed training words."""
    chars = sorted({ch for s in sentences for w in s.words for ch in w})
    return Vocab(chars)


def build_vocab_tagset(train, min_word_count=1, min_tag_count=1):
    """Word vocabulary and tagset from training sentences.

    Words seen fewer than ``min_word_count`` times map to UNK. Tags seen
    fewer than ``min_tag_count`` times (off by default) join the RARE bucket
    together with every tag absent from training.
    """
    if not train:
        raise CorpusError("empty training set")
    word_counts = Counter(w for s in train for w in s.words)
    tag_counts = Counter(t for s in train for t in s.supertags)
    # first-occurrence order keeps ids stable across runs
    words = [w for w in dict.fromkeys(w for s in train for w in s.words)
             if word_counts[w] >= min_word_count]
    tags = [t for t in dict.fromkeys(t for s in train for t in s.supertags)
            if tag_counts[t] >= min_tag_count]
    report = validate_tagset(tags)
    for tag, error in report.failures:
        logger.warning("Training tag does not parse: %s", error)
    vocab = Vocab(words, counts=word_counts)
    tagset = TagSet(tags, counts=tag_counts)
    logger.info("Vocabulary: %d words (%d below min count), %d tags + RARE",
                len(vocab) - 2, len(word_counts) - len(words), len(tagset) - 1)
    return vocab, tagset


@dataclass
class EmbeddingTable:
    index: dict
    vectors: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.index)

    def __contains__(self, token):
        return token in self.index

    def get(self, token):
        row = self.index.get(token)
        return None if row is None else self.vectors[row]


def read_embeddings(lines, expected_dim, path=None):
    index = {}
    rows: List[List[float]] = []
    for number, raw in enumerate(lines, start=1):
        fields = raw.split()
        if not fields:
            continue
        token, values = fields[0], fields[1:]
        if len(values) != expected_dim:
            raise CorpusError(f"expected {expected_dim} values for {token!r}, got {len(values)}",
                              path, number)
        try:
            vector = [float(v) for v in values]
        except ValueError as e:
            raise CorpusError(f"unreadable number ({e})", path, number) from None
        if token in index:
            logger.warning("Duplicate embedding for %r at line %d; last occurrence wins", token, number)
            rows[index[token]] = vector
        else:
            index[token] = len(rows)
            rows.append(vector)
    vectors = np.array(rows, dtype=np.float64).reshape(len(rows), expected_dim)
    return EmbeddingTable(index, vectors)


def load_embeddings(path, expected_dim):
    with open(path, encoding="utf-8") as f:
        table = read_embeddings(f, expected_dim, path)
    logger.info("Loaded %d pretrained %d-dim vectors from %s", len(table), expected_dim, path)
    return table
