"""
CCG lexical categories: parsing, printing and simple analysis.

A category is an atom such as ``N`` or ``S[dcl]``, or a functor built with a
forward slash (``X/Y``, argument to the right) or a backward slash (``X\\Y``,
argument to the left). The canonical basis atoms are N, NP, PP and S, but any
atom name is accepted so that corpus tags like ``conj`` or ``,`` parse.

Unbracketed slash chains associate to the left: ``S\\NP/NP`` is read as
``(S\\NP)/NP``.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .errors import CategoryParseError

logger = logging.getLogger(__name__)

# Characters allowed inside atom and feature names, besides letters and digits.
NAME_PUNCTUATION = "_.,;:-'`$#&"


@dataclass(frozen=True)
class Atom:
    name: str
    feature: Optional[str] = None

    def __str__(self):
        return print_category(self)


@dataclass(frozen=True)
class Forward:
    """X/Y: yields ``result`` given ``argument`` to the right."""
    result: "Category"
    argument: "Category"

    def __str__(self):
        return print_category(self)


@dataclass(frozen=True)
class Backward:
    """X\\Y: yields ``result`` given ``argument`` to the left."""
    result: "Category"
    argument: "Category"

    def __str__(self):
        return print_category(self)


Category = Union[Atom, Forward, Backward]

SLASHES = {"/": Forward, "\\": Backward}


def _is_name_char(ch):
    return ch.isascii() and (ch.isalnum() or ch in NAME_PUNCTUATION)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message, offset=None):
        return CategoryParseError(message, self.text, self.pos if offset is None else offset)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        cat = self.category()
        if self.pos != len(self.text):
            if self.peek() == ")":
                raise self.error("unbalanced ')'")
            raise self.error(f"illegal character {self.peek()!r}")
        return cat

    def category(self):
        cat = self.term()
        while self.peek() and self.peek() in SLASHES:
            functor = SLASHES[self.peek()]
            self.pos += 1
            if not self.peek() or self.peek() in "/\\)":
                raise self.error("dangling slash", self.pos - 1)
            cat = functor(cat, self.term())
        return cat

    def term(self):
        ch = self.peek()
        if ch == "(":
            start = self.pos
            self.pos += 1
            if self.peek() == ")":
                raise self.error("empty parentheses")
            cat = self.category()
            if self.peek() != ")":
                if not self.peek():
                    raise self.error("unbalanced '('", start)
                raise self.error(f"unexpected character {self.peek()!r}")
            self.pos += 1
            return cat
        if not ch:
            raise self.error("empty category")
        if ch in "/\\":
            raise self.error("missing result before slash")
        if ch == ")":
            raise self.error("unbalanced ')'")
        return self.atom()

    def name(self, what):
        start = self.pos
        while self.pos < len(self.text) and _is_name_char(self.text[self.pos]):
            self.pos += 1
        if self.pos == start:
            ch = self.peek()
            if ch:
                raise self.error(f"illegal character {ch!r} in {what}")
            raise self.error(f"empty {what}")
        return self.text[start:self.pos]

    def atom(self):
        name = self.name("atom")
        feature = None
        if self.peek() == "[":
            self.pos += 1
            feature = self.name("feature")
            if self.peek() != "]":
                raise self.error("unterminated feature")
            self.pos += 1
        return Atom(name, feature)


def parse_category(text):
    """Parse a category string into a Category tree.

    Raises CategoryParseError naming the offending byte offset.
    """
    if not text:
        raise CategoryParseError("empty category", text, 0)
    return _Parser(text).parse()


def print_category(cat, bracket_results=False):
    """Print a category with the minimal number of parentheses.

    Arguments that are functors are always bracketed; functor results only
    when ``bracket_results`` is set, which gives the CCGBank spelling
    ``(S\\NP)/NP`` instead of the minimal ``S\\NP/NP``.
    """
    if isinstance(cat, Atom):
        return cat.name if cat.feature is None else f"{cat.name}[{cat.feature}]"
    slash = "/" if isinstance(cat, Forward) else "\\"
    result = print_category(cat.result, bracket_results)
    if bracket_results and not isinstance(cat.result, Atom):
        result = f"({result})"
    argument = print_category(cat.argument, bracket_results)
    if not isinstance(cat.argument, Atom):
        argument = f"({argument})"
    return f"{result}{slash}{argument}"


def category_arity(cat):
    """Number of arguments along the functor spine."""
    arity = 0
    while not isinstance(cat, Atom):
        arity += 1
        cat = cat.result
    return arity


def category_depth(cat):
    if isinstance(cat, Atom):
        return 0
    return 1 + max(category_depth(cat.result), category_depth(cat.argument))


def category_atoms(cat):
    """Atoms of a category in left-to-right order."""
    if isinstance(cat, Atom):
        return [cat]
    return category_atoms(cat.result) + category_atoms(cat.argument)


@dataclass
class TagsetReport:
    """Outcome of validating a list of tag strings."""
    parsed: dict = field(default_factory=dict)
    failures: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        return f"parsed={len(self.parsed)} failed={len(self.failures)}"


def validate_tagset(tags):
    """Parse every tag string; failures are collected rather than raised."""
    report = TagsetReport()
    for tag in tags:
        if tag in report.parsed:
            continue
        try:
            report.parsed[tag] = parse_category(tag)
        except CategoryParseError as e:
            report.failures.append((tag, str(e)))
    if report.failures:
        logger.warning("%d of %d tags do not parse as categories",
                       len(report.failures), len(report.failures) + len(report.parsed))
    return report
