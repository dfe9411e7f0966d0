#!/usr/bin/env python3
"""
Tests for seeded text generation
"""
import numpy as np
import pytest

from automata import Alphabet, AlphabetError, EmptyLanguageError, Nfa, nfa_accepts
from automata_samples import make_nfa
from regex_parser import parse_regex, regex_to_nfa, regexp_family_pattern
from ridfa_builder import build_ridfa
from text_generator import TextMode, gen_text


def test_uniform_text_is_reproducible(sample_chunking_nfa):
    first = gen_text('uniform', 500, 3, sample_chunking_nfa)
    second = gen_text(TextMode.UNIFORM, 500, 3, sample_chunking_nfa)
    assert first.dtype == np.int64
    assert len(first) == 500
    assert np.array_equal(first, second)
    assert set(first.tolist()) == {0, 1, 2}
    assert not np.array_equal(first, gen_text('uniform', 500, 4, sample_chunking_nfa))


def test_zero_length():
    nfa = make_nfa(1, 'a', [], [0], [])
    assert gen_text('walk', 0, 0, nfa).size == 0


def test_negative_length(sample_chunking_nfa):
    with pytest.raises(ValueError):
        gen_text('uniform', -1, 0, sample_chunking_nfa)


def test_unknown_mode(sample_chunking_nfa):
    with pytest.raises(ValueError):
        gen_text('markov', 10, 0, sample_chunking_nfa)


def test_uniform_needs_symbols():
    nfa = Nfa.from_edges(1, Alphabet(()), [], [0], [0])
    with pytest.raises(AlphabetError):
        gen_text('uniform', 3, 0, nfa)


def test_walk_restarts_at_dead_ends():
    """ "ab" has a single path, so the walk repeats it whatever the seed """
    ast = parse_regex("ab", 'custom')
    nfa = regex_to_nfa(ast)
    for seed in (0, 1, 2):
        assert nfa.alphabet.decode(gen_text('walk', 6, seed, nfa)) == list("ababab")


def test_walk_stays_in_the_language_prefixes():
    nfa = regex_to_nfa(parse_regex("a(b|c)*d", 'custom'))
    text = gen_text('walk', 300, 5, nfa).tolist()
    d = nfa.alphabet.index('d')
    pieces = []
    start = 0
    for i, symbol in enumerate(text):
        if symbol == d:
            pieces.append(text[start:i + 1])
            start = i + 1
    assert pieces
    assert all(nfa_accepts(nfa, piece) for piece in pieces)


def test_walk_over_family_uses_both_symbols():
    nfa = regex_to_nfa(parse_regex(regexp_family_pattern(3)))
    text = gen_text('walk', 1000, 0, nfa)
    counts = np.bincount(text, minlength=2)
    assert counts.min() > 400


def test_walk_needs_an_accepting_machine():
    nfa = make_nfa(2, 'a', [(0, 'a', 1)], [0], [])
    with pytest.raises(EmptyLanguageError):
        gen_text('walk', 5, 0, nfa)


def test_walk_needs_a_non_empty_string():
    nfa = make_nfa(1, 'a', [], [0], [0])
    with pytest.raises(EmptyLanguageError):
        gen_text('walk', 5, 0, nfa)


def test_walk_over_dfa_and_ridfa(sample_parity_dfa, sample_chunking_nfa):
    assert len(gen_text('walk', 40, 1, sample_parity_dfa)) == 40
    ridfa = build_ridfa(sample_chunking_nfa)
    assert np.array_equal(gen_text('walk', 40, 1, ridfa), gen_text('walk', 40, 1, sample_chunking_nfa))


def test_walk_over_ridfa_with_several_initials():
    ridfa = build_ridfa(make_nfa(2, 'a', [(0, 'a', 1)], [0, 1], [1]))
    with pytest.raises(EmptyLanguageError):
        gen_text('walk', 5, 0, ridfa)
