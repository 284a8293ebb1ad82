import itertools
from pathlib import Path

import numpy as np
import pytest

import supertag
from supertag.categories import (Atom, Backward, Forward, category_arity, category_atoms,
                                 category_depth, parse_category, print_category, validate_tagset)
from supertag.errors import CategoryParseError

N, NP, S = Atom("N"), Atom("NP"), Atom("S")
CATEGORY_FILE = Path(supertag.__file__).parent / "data" / "ccgbank_categories.txt"


def test_parse_atoms_and_features():
    assert parse_category("N") == N
    assert parse_category("S[dcl]") == Atom("S", "dcl")
    assert parse_category("conj") == Atom("conj")
    assert parse_category(",") == Atom(",")


def test_parse_functors():
    assert parse_category("N/N") == Forward(N, N)
    assert parse_category("(S\\NP)/NP") == Forward(Backward(S, NP), NP)
    assert parse_category("NP\\NP") == Backward(NP, NP)


def test_unbracketed_slashes_associate_left():
    assert parse_category("S\\NP/NP") == parse_category("(S\\NP)/NP")
    assert parse_category("S/NP\\NP/N") == Forward(Backward(Forward(S, NP), NP), N)


@pytest.mark.parametrize("atoms", [3, 4, 5])
def test_left_association_against_every_bracketing(atoms):
    names = [Atom(f"A{i}") for i in range(atoms)]
    for slashes in itertools.product("/\\", repeat=atoms - 1):
        text = names[0].name
        expected = names[0]
        for slash, atom in zip(slashes, names[1:]):
            text += slash + atom.name
            expected = (Forward if slash == "/" else Backward)(expected, atom)
        fully_bracketed = names[0].name
        for slash, atom in zip(slashes, names[1:]):
            fully_bracketed = f"({fully_bracketed}){slash}{atom.name}"
        assert parse_category(text) == expected
        assert parse_category(fully_bracketed) == expected


def test_print_minimal_and_bracketed():
    cat = parse_category("(S[dcl]\\NP)/NP")
    assert print_category(cat) == "S[dcl]\\NP/NP"
    assert print_category(cat, bracket_results=True) == "(S[dcl]\\NP)/NP"
    assert print_category(parse_category("((S\\NP)\\(S\\NP))/NP")) == "S\\NP\\(S\\NP)/NP"
    assert str(Forward(N, N)) == "N/N"


@pytest.mark.parametrize("text, offset, message", [
    ("(S\\NP", 0, "unbalanced '('"),
    ("S\\NP)", 4, "unbalanced ')'"),
    ("S/", 1, "dangling slash"),
    ("S/)", 1, "dangling slash"),
    ("()", 1, "empty parentheses"),
    ("S/%", 2, "illegal character"),
    ("/NP", 0, "missing result before slash"),
    ("S[dcl", 5, "unterminated feature"),
    ("", 0, "empty category"),
])
def test_parse_errors_name_offset(text, offset, message):
    with pytest.raises(CategoryParseError) as info:
        parse_category(text)
    assert info.value.offset == offset
    assert message in str(info.value)


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        parse_category("S//NP")


def test_arity_depth_atoms():
    transitive = parse_category("(S[dcl]\\NP)/NP")
    assert category_arity(transitive) == 2
    assert category_arity(N) == 0
    assert category_arity(parse_category("((S\\NP)\\(S\\NP))/NP")) == 3
    assert category_depth(transitive) == 2
    assert [a.name for a in category_atoms(transitive)] == ["S", "NP", "NP"]


def test_bundled_ccgbank_categories_parse_and_round_trip():
    tags = CATEGORY_FILE.read_text(encoding="utf-8").split()
    assert len(tags) == 200
    assert len(set(tags)) == 200
    report = validate_tagset(tags)
    assert report.ok, report.failures
    for tag, cat in report.parsed.items():
        assert parse_category(print_category(cat)) == cat
        assert print_category(cat, bracket_results=True) == tag


def _random_category(rng, depth=0):
    if depth >= 4 or rng.random() < 0.4:
        name = ["N", "NP", "PP", "S", "conj", ","][rng.integers(6)]
        feature = ["dcl", "b", "nb", None][rng.integers(4)] if name in ("S", "NP") else None
        return Atom(name, feature)
    functor = Forward if rng.random() < 0.5 else Backward
    return functor(_random_category(rng, depth + 1), _random_category(rng, depth + 1))


def test_random_trees_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        cat = _random_category(rng)
        assert parse_category(print_category(cat)) == cat
        assert parse_category(print_category(cat, bracket_results=True)) == cat


def test_validate_tagset_collects_failures():
    report = validate_tagset(["N", "(S\\NP", "NP", "N"])
    assert not report.ok
    assert set(report.parsed) == {"N", "NP"}
    assert [tag for tag, _ in report.failures] == ["(S\\NP"]
    assert report.summary() == "parsed=2 failed=1"
