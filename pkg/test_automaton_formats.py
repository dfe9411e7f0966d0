#!/usr/bin/env python3
"""
Tests for Timbuk reading, automaton documents, text loading and reports
"""
import json

import numpy as np
import pytest

from automata import Alphabet, Dfa, Nfa, nfa_accepts
from automata_samples import all_strings, random_nfa
from automaton_formats import (FORMAT_VERSION, DocumentValidationError, ForeignSymbolError,
                               FormatVersionError, TimbukParseError, UnsupportedFormatError,
                               automaton_to_document, encode_bytes, load_automaton,
                               load_report, load_text, load_timbuk, parse_timbuk, save_automaton,
                               save_report, timbuk_to_nfa)
from parallel_recognizer import Variant, prepare_chunk_automaton, recognize_parallel
from ridfa_builder import RiDfa, build_ridfa, reduce_interface

TIMBUK_SAMPLE = """\
Ops a:1 b:1 start:0

# words a b* a
Automaton sample
States q0 q1 q2:0
Final States q2
Transitions
start -> q0
a(q0) -> q1
b(q1) -> q1
a(q1) -> q2
"""


def _with_rules(rules: str, ops: str = "a:1 b:1 start:0") -> str:
    return (f"Ops {ops}\nAutomaton broken\nStates q0 q1\nFinal States q1\nTransitions\n"
            f"start -> q0\n{rules}")


###################################################################################################
# Timbuk
###################################################################################################

def test_parse_timbuk_sections():
    doc = parse_timbuk(TIMBUK_SAMPLE)
    assert doc.name == 'sample'
    assert doc.operators == {'a': 1, 'b': 1, 'start': 0}
    assert doc.states == ['q0', 'q1', 'q2']
    assert doc.final_states == ['q2']
    assert len(doc.rules) == 4
    assert doc.rules[1].line == 9


def test_timbuk_to_nfa():
    nfa = timbuk_to_nfa(parse_timbuk(TIMBUK_SAMPLE))
    assert nfa.alphabet.symbols == ('a', 'b')
    assert nfa.initials == frozenset([0])
    assert nfa.finals == frozenset([2])
    assert nfa_accepts(nfa, nfa.alphabet.encode("abba"))
    assert not nfa_accepts(nfa, nfa.alphabet.encode("ab"))


def test_timbuk_membership_up_to_length_four():
    """ a b* a over {a, b}: of the 31 strings up to length 4 only aa, aba, abba are words """
    nfa = timbuk_to_nfa(parse_timbuk(TIMBUK_SAMPLE))
    accepted = {''.join(nfa.alphabet.decode(word)) for word in all_strings(2, 4)
                if nfa_accepts(nfa, list(word))}
    assert accepted == {'aa', 'aba', 'abba'}


def test_timbuk_single_letter_language():
    text = ("Ops x:0 a:1\nAutomaton one\nStates q0 q1\nFinal States q1\nTransitions\n"
            "x -> q0\na(q0) -> q1\n")
    nfa = timbuk_to_nfa(parse_timbuk(text))
    assert nfa.alphabet.symbols == ('a',)
    accepted = [word for word in all_strings(1, 2) if nfa_accepts(nfa, list(word))]
    assert accepted == [(0,)]


def test_timbuk_without_finals_rejects_everything():
    text = "Ops x:0 a:1\nAutomaton none\nStates q0\nFinal States\nTransitions\nx -> q0\na(q0) -> q0\n"
    nfa = timbuk_to_nfa(parse_timbuk(text))
    assert not any(nfa_accepts(nfa, list(word)) for word in all_strings(1, 3))


def test_load_timbuk_file(tmp_path):
    path = tmp_path / "sample.timbuk"
    path.write_text(TIMBUK_SAMPLE)
    assert load_timbuk(path).state_count == 3


def test_undeclared_state_reports_line():
    with pytest.raises(TimbukParseError) as info:
        parse_timbuk(_with_rules("a(q0) -> q1\nb(q9) -> q1\n"))
    assert info.value.line == 8


def test_undeclared_operator_reports_line():
    with pytest.raises(TimbukParseError) as info:
        parse_timbuk(_with_rules("c(q0) -> q1\n"))
    assert info.value.line == 7


def test_tree_operators_are_unsupported():
    with pytest.raises(UnsupportedFormatError) as info:
        parse_timbuk(_with_rules("", ops="a:1 f:2 start:0"))
    assert info.value.operator == 'f'
    with pytest.raises(UnsupportedFormatError):
        parse_timbuk(_with_rules("a(q0, q1) -> q1\n"))


def test_unit_rules_are_unsupported():
    with pytest.raises(UnsupportedFormatError):
        parse_timbuk(_with_rules("q0 -> q1\n"))


def test_truncated_document():
    with pytest.raises(TimbukParseError):
        parse_timbuk("Ops a:1\nAutomaton x\nStates q0\nFinal States q0\n")


def test_timbuk_without_initial_state_rejects_everything():
    text = "Ops a:1\nAutomaton x\nStates q0\nFinal States q0\nTransitions\na(q0) -> q0\n"
    nfa = timbuk_to_nfa(parse_timbuk(text))
    assert nfa.initials == frozenset()
    assert not nfa_accepts(nfa, [])


###################################################################################################
# Documents
###################################################################################################

def test_nfa_document_keeps_ids(sample_chunking_nfa):
    document = automaton_to_document(sample_chunking_nfa)
    assert document['kind'] == 'nfa'
    assert document['format_version'] == FORMAT_VERSION
    assert [1, 'b', 2] in document['transitions']
    loaded = load_automaton(document)
    assert isinstance(loaded, Nfa)
    assert loaded.edges() == sample_chunking_nfa.edges()
    assert loaded.initials == sample_chunking_nfa.initials
    assert loaded.finals == sample_chunking_nfa.finals


def test_dfa_document_through_a_file(tmp_path, sample_parity_dfa):
    path = tmp_path / "dfa.json"
    save_automaton(sample_parity_dfa, path)
    loaded = load_automaton(str(path))
    assert isinstance(loaded, Dfa)
    assert np.array_equal(loaded.delta, sample_parity_dfa.delta)
    assert loaded.finals == sample_parity_dfa.finals


def test_reduced_ridfa_document_keeps_delegation(sample_delegation_nfa):
    reduced = reduce_interface(build_ridfa(sample_delegation_nfa))
    loaded = load_automaton(json.loads(json.dumps(save_automaton(reduced))))
    assert isinstance(loaded, RiDfa)
    assert loaded.delegation == {3: 1}
    assert loaded.interface == reduced.interface
    assert loaded.content == reduced.content
    assert loaded.subsets == reduced.subsets
    assert loaded.construction_log == reduced.construction_log
    assert np.array_equal(loaded.delta, reduced.delta)
    text = loaded.alphabet.encode("caaaab")
    assert recognize_parallel(loaded, Variant.RIDFA, text, 2).per_chunk_transitions == [3, 6]


def test_random_machines_survive_a_json_round_trip():
    """ 100 random NFAs, each saved as NFA, minimal DFA and RI-DFA with and without reduction """
    rng = np.random.default_rng(4242)
    for _ in range(100):
        nfa = random_nfa(rng)
        ridfa = build_ridfa(nfa)
        machines = [nfa, prepare_chunk_automaton(nfa, Variant.DFA), ridfa, reduce_interface(ridfa)]
        for machine in machines:
            document = json.loads(json.dumps(automaton_to_document(machine)))
            loaded = load_automaton(document)
            assert type(loaded) is type(machine)
            assert automaton_to_document(loaded) == document


def test_other_format_version_is_refused(sample_parity_dfa):
    document = automaton_to_document(sample_parity_dfa)
    document['format_version'] = FORMAT_VERSION + 1
    with pytest.raises(FormatVersionError):
        load_automaton(document)


def test_unknown_kind(sample_parity_dfa):
    document = automaton_to_document(sample_parity_dfa)
    document['kind'] = 'pda'
    with pytest.raises(DocumentValidationError):
        load_automaton(document)


def test_nondeterministic_dfa_document(sample_parity_dfa):
    document = automaton_to_document(sample_parity_dfa)
    document['transitions'].append([0, 'a', 0])
    with pytest.raises(DocumentValidationError):
        load_automaton(document)


def test_document_with_unknown_state(sample_chunking_nfa):
    document = automaton_to_document(sample_chunking_nfa)
    document['transitions'].append([0, 'a', 5])
    with pytest.raises(DocumentValidationError):
        load_automaton(document)


def test_document_missing_fields(sample_parity_dfa):
    document = automaton_to_document(sample_parity_dfa)
    del document['initial']
    with pytest.raises(DocumentValidationError):
        load_automaton(document)


def test_document_with_unknown_symbol(sample_parity_dfa):
    document = automaton_to_document(sample_parity_dfa)
    document['transitions'].append([1, 'z', 1])
    with pytest.raises(DocumentValidationError):
        load_automaton(document)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(DocumentValidationError):
        load_automaton(path)


###################################################################################################
# Texts and reports
###################################################################################################

def test_encode_bytes_strict():
    alphabet = Alphabet(('a', 'b', 'c'))
    assert encode_bytes(b"abca", alphabet).tolist() == [0, 1, 2, 0]
    with pytest.raises(ForeignSymbolError) as info:
        encode_bytes(b"abxa", alphabet)
    assert info.value.offset == 2
    assert info.value.symbol == 'x'


def test_encode_bytes_sink():
    alphabet = Alphabet(('a', 'b'))
    assert encode_bytes(b"axb", alphabet, 'sink').tolist() == [0, 2, 1]


def test_encode_unknown_policy():
    with pytest.raises(ValueError):
        encode_bytes(b"a", Alphabet(('a',)), 'ignore')


def test_load_text_reads_bytes(tmp_path, sample_chunking_nfa):
    path = tmp_path / "text.txt"
    path.write_bytes(b"aabcab")
    text = load_text(path, sample_chunking_nfa.alphabet)
    assert text.dtype == np.int64
    dfa = prepare_chunk_automaton(sample_chunking_nfa, Variant.DFA)
    assert recognize_parallel(dfa, Variant.DFA, text, 2).total_transitions == 15


def test_report_round_trip(tmp_path, sample_parity_dfa):
    report = recognize_parallel(sample_parity_dfa, Variant.DFA, sample_parity_dfa.alphabet.encode("babaaa"), 2)
    path = tmp_path / "report.json"
    save_report(report, path)
    assert load_report(path) == report
