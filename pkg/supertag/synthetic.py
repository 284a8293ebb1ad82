"""
Seeded synthetic corpus over a 12-category toy CCG tagset.

Sentences come from a small template grammar:

    sentence := clause [conj clause] "."
    clause   := subject predicate [modifier]
    subject  := name | det adj* noun
    predicate:= tverb object | iverb | pverb prep object

Some words ("saw", "watch", "run") are both nouns and verbs; the tag is
decided by the previous word, so a tagger must read its context. With
``distractor_rate`` > 0, nonce adverbs are sprinkled into sentences.
"""

import logging
import string

from .corpus import Sentence, Token
from .numerics import make_rng

logger = logging.getLogger(__name__)

DET = "NP[nb]/N"
ADJ = "N/N"
NOUN = "N"
NAME = "NP"
TVERB = "(S[dcl]\\NP)/NP"
IVERB = "S[dcl]\\NP"
PVERB = "(S[dcl]\\NP)/PP"
PREP = "PP/NP"
ADV_PREP = "((S\\NP)\\(S\\NP))/NP"
ADV = "(S\\NP)\\(S\\NP)"
CONJ = "conj"
STOP = "."

SYNTHETIC_TAGS = [DET, ADJ, NOUN, NAME, TVERB, IVERB, PVERB, PREP, ADV_PREP, ADV, CONJ, STOP]

LEXICON = {
    DET: ["the", "a", "every", "some"],
    ADJ: ["big", "red", "old", "small", "happy"],
    NOUN: ["dog", "cat", "man", "park", "telescope", "saw", "watch", "run"],
    NAME: ["John", "Mary", "London", "IBM"],
    TVERB: ["sees", "likes", "saw", "watch", "owns"],
    IVERB: ["sleeps", "laughs", "run", "walked"],
    PVERB: ["looks", "relies", "waits"],
    PREP: ["at", "on", "for"],
    ADV_PREP: ["in", "near", "with"],
    ADV: ["quickly", "today", "again"],
    CONJ: ["and", "but"],
    STOP: ["."],
}

# Prepositions selected by each PP-taking verb.
PP_HEADS = {"looks": "at", "relies": "on", "waits": "for"}


def _pick(rng, items):
    return items[int(rng.integers(len(items)))]


def _noun_phrase(rng):
    if rng.random() < 0.3:
        return [(_pick(rng, LEXICON[NAME]), NAME)]
    tokens = [(_pick(rng, LEXICON[DET]), DET)]
    while rng.random() < 0.35:
        tokens.append((_pick(rng, LEXICON[ADJ]), ADJ))
    tokens.append((_pick(rng, LEXICON[NOUN]), NOUN))
    return tokens


def _clause(rng):
    tokens = _noun_phrase(rng)
    roll = rng.random()
    if roll < 0.45:
        tokens.append((_pick(rng, LEXICON[TVERB]), TVERB))
        tokens.extend(_noun_phrase(rng))
    elif roll < 0.75:
        tokens.append((_pick(rng, LEXICON[IVERB]), IVERB))
    else:
        verb = _pick(rng, LEXICON[PVERB])
        tokens.append((verb, PVERB))
        tokens.append((PP_HEADS[verb], PREP))
        tokens.extend(_noun_phrase(rng))
    roll = rng.random()
    if roll < 0.2:
        tokens.append((_pick(rng, LEXICON[ADV]), ADV))
    elif roll < 0.35:
        tokens.append((_pick(rng, LEXICON[ADV_PREP]), ADV_PREP))
        tokens.extend(_noun_phrase(rng))
    return tokens


def nonce_word(rng, length=6):
    return "".join(_pick(rng, string.ascii_lowercase) for _ in range(length))


def generate_sentence(rng, distractor_rate=0.0):
    tokens = _clause(rng)
    if rng.random() < 0.2:
        tokens.append((_pick(rng, LEXICON[CONJ]), CONJ))
        tokens.extend(_clause(rng))
    tokens.append((".", STOP))
    if distractor_rate > 0:
        noisy = []
        for i, token in enumerate(tokens):
            noisy.append(token)
            if i < len(tokens) - 1 and rng.random() < distractor_rate:
                noisy.append((nonce_word(rng), ADV))
        tokens = noisy
    surface, tag = tokens[0]
    tokens[0] = (surface[0].upper() + surface[1:], tag)
    return Sentence(tuple(Token(s, t) for s, t in tokens))


def generate_corpus(count, seed=0, distractor_rate=0.0):
    """``count`` sentences; the same seed always yields the same corpus."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if not 0.0 <= distractor_rate < 1.0:
        raise ValueError(f"distractor_rate must be in [0, 1), got {distractor_rate}")
    rng = make_rng(seed)
    sentences = [generate_sentence(rng, distractor_rate) for _ in range(count)]
    logger.debug("Generated %d synthetic sentences (seed %d)", count, seed)
    return sentences


def acceptance_corpus():
    """The bundled 50-sentence overfit corpus."""
    return generate_corpus(50, seed=0)
