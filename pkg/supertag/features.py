"""
Token features and context windows.

A token feature is the concatenation of a word embedding, a capitalization
embedding and the embeddings of the leftmost and rightmost characters of the
word. A context window of radius rho concatenates the features of the 2*rho+1
tokens centred on the current one; positions outside the sentence use the
feature vector of the PAD token.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import CapClass, Vocab, capitalization_class, preprocess_token
from .errors import ConfigError
from .numerics import init_gaussian

logger = logging.getLogger(__name__)

# Capitalization table rows: the five classes plus one row for padding.
PAD_CAP = len(CapClass)
CAP_TABLE_SIZE = PAD_CAP + 1


@dataclass
class FeatureConfig:
    word_dim: int = 200
    cap_dim: int = 5
    char_dim: int = 5
    chars_per_side: int = 5
    window_radius: Optional[int] = None  # None: architecture default
    use_chars: bool = True

    def __post_init__(self):
        for name in ("word_dim", "cap_dim", "char_dim", "chars_per_side"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", name)
        if self.window_radius is not None and self.window_radius < 0:
            raise ConfigError("must be >= 0", "window_radius")

    @property
    def char_slots(self):
        return 2 * self.chars_per_side if self.use_chars else 0

    @property
    def token_dim(self):
        return self.word_dim + self.cap_dim + self.char_slots * self.char_dim

    @property
    def slots(self):
        return 2 * self.window_radius + 1

    @property
    def window_dim(self):
        return self.slots * self.token_dim


@dataclass
class LookupTables:
    """Trainable word, capitalization and character tables and their vocabularies."""
    words: np.ndarray
    caps: np.ndarray
    chars: Optional[np.ndarray]
    vocab: Vocab
    charset: Vocab
    config: FeatureConfig


@dataclass
class TokenIds:
    words: np.ndarray   # (T,)
    caps: np.ndarray    # (T,)
    chars: np.ndarray   # (T, 2 * chars_per_side)

    def __len__(self):
        return len(self.words)


def init_lookup_tables(config, vocab, charset, rng, embeddings=None, scale=0.1):
    """Gaussian-initialized tables; word rows found in ``embeddings`` are copied."""
    words = init_gaussian(len(vocab), config.word_dim, 1, rng, scale)
    if embeddings is not None:
        if embeddings.dim != config.word_dim:
            raise ConfigError(f"pretrained vectors are {embeddings.dim}-dim, "
                              f"word_dim is {config.word_dim}", "word_dim")
        found = 0
        for i, word in enumerate(vocab.symbols):
            vector = embeddings.get(word)
            if vector is not None:
                words[i] = vector
                found += 1
        logger.info("Copied %d of %d word rows from pretrained vectors", found, len(vocab))
    caps = init_gaussian(CAP_TABLE_SIZE, config.cap_dim, 1, rng, scale)
    chars = init_gaussian(len(charset), config.char_dim, 1, rng, scale) if config.use_chars else None
    return LookupTables(words, caps, chars, vocab, charset, config)


def char_slot_ids(word, charset, chars_per_side):
    """Left slots hold the first characters, right slots the last; short words pad with PAD."""
    ids = charset.ids(word)
    pad = [charset.pad_id] * max(0, chars_per_side - len(ids))
    left = (ids[:chars_per_side] + pad)[:chars_per_side]
    right = (pad + ids[-chars_per_side:])[-chars_per_side:]
    return left + right


def encode_tokens(surfaces, vocab, charset, config):
    words = [preprocess_token(s) for s in surfaces]
    word_ids = np.array(vocab.ids(words), dtype=np.intp)
    cap_ids = np.array([capitalization_class(s) for s in surfaces], dtype=np.intp)
    if config.use_chars:
        char_ids = np.array([char_slot_ids(w, charset, config.chars_per_side) for w in words],
                            dtype=np.intp).reshape(len(words), config.char_slots)
    else:
        char_ids = np.zeros((len(words), 0), dtype=np.intp)
    return TokenIds(word_ids, cap_ids, char_ids)


def feature_matrix(tables, ids):
    """(T, F) matrix of token features."""
    parts = [tables.words[ids.words], tables.caps[ids.caps]]
    if tables.chars is not None:
        parts.append(tables.chars[ids.chars].reshape(len(ids), -1))
    return np.concatenate(parts, axis=1)


def pad_feature(tables):
    config = tables.config
    parts = [tables.words[tables.vocab.pad_id], tables.caps[PAD_CAP]]
    if tables.chars is not None:
        parts.append(np.tile(tables.chars[tables.charset.pad_id], config.char_slots))
    return np.concatenate(parts)


def token_feature(tables, config, surface):
    """Feature vector of a single token."""
    ids = encode_tokens([surface], tables.vocab, tables.charset, config)
    return feature_matrix(tables, ids)[0]


def context_window(features, t, radius, pad):
    """Window around position t of a list/array of token features."""
    n = len(features)
    slots = [features[i] if 0 <= i < n else pad for i in range(t - radius, t + radius + 1)]
    return np.concatenate(slots)


def windows(features, pad, radius):
    """(T, (2*radius+1)*F) stack of every window of a sentence."""
    n = features.shape[0]
    padded = np.vstack([np.tile(pad, (radius, 1)), features, np.tile(pad, (radius, 1))])
    return np.concatenate([padded[k:k + n] for k in range(2 * radius + 1)], axis=1)


def windows_backward(d_windows, radius, token_dim):
    """Fold window gradients back onto token features and the PAD feature."""
    n = d_windows.shape[0]
    slots = 2 * radius + 1
    d_slots = d_windows.reshape(n, slots, token_dim)
    d_padded = np.zeros((n + 2 * radius, token_dim))
    for k in range(slots):
        d_padded[k:k + n] += d_slots[:, k]
    d_pad = d_padded[:radius].sum(axis=0) + d_padded[radius + n:].sum(axis=0)
    return d_padded[radius:radius + n], d_pad


class SparseRows:
    """Row-sparse gradient of a lookup table."""

    def __init__(self, shape):
        self.shape = shape
        self._ids = []
        self._values = []

    def add(self, ids, values):
        ids = np.atleast_1d(np.asarray(ids, dtype=np.intp))
        self._ids.append(ids)
        self._values.append(np.asarray(values).reshape(len(ids), self.shape[1]))

    def coalesce(self):
        """Unique row ids and their summed gradients."""
        if not self._ids:
            return np.zeros(0, dtype=np.intp), np.zeros((0, self.shape[1]))
        ids = np.concatenate(self._ids)
        values = np.concatenate(self._values)
        unique, inverse = np.unique(ids, return_inverse=True)
        summed = np.zeros((len(unique), self.shape[1]))
        np.add.at(summed, inverse, values)
        return unique, summed

    def to_dense(self):
        dense = np.zeros(self.shape)
        ids, values = self.coalesce()
        dense[ids] = values
        return dense

    def apply(self, table, learning_rate):
        """In-place SGD update touching only rows with a gradient."""
        ids, values = self.coalesce()
        table[ids] -= learning_rate * values


def tables_backward(tables, ids, d_features, d_pad):
    """Row-sparse gradients of the three tables from feature gradients."""
    config = tables.config
    n, m = config.word_dim, config.cap_dim
    grads = {}
    g_words = SparseRows(tables.words.shape)
    g_words.add(ids.words, d_features[:, :n])
    g_words.add(tables.vocab.pad_id, d_pad[:n])
    grads['words'] = g_words
    g_caps = SparseRows(tables.caps.shape)
    g_caps.add(ids.caps, d_features[:, n:n + m])
    g_caps.add(PAD_CAP, d_pad[n:n + m])
    grads['caps'] = g_caps
    if tables.chars is not None:
        c = config.char_dim
        g_chars = SparseRows(tables.chars.shape)
        g_chars.add(ids.chars.reshape(-1), d_features[:, n + m:].reshape(-1, c))
        g_chars.add(np.full(config.char_slots, tables.charset.pad_id), d_pad[n + m:].reshape(-1, c))
        grads['chars'] = g_chars
    return grads
