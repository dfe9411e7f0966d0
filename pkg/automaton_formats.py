#!/usr/bin/env python3
"""
Automaton and text input/output
Timbuk word-automaton reader, versioned JSON automaton documents, byte
text loading and recognition report documents
"""
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from pydantic import ValidationError as PydanticValidationError

from automata import Alphabet, AutomatonError, Dfa, Nfa, NO_TRANSITION
from parallel_recognizer import RecognitionReport
from ridfa_builder import RiDfa, SeedGrowth

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
TEXT_POLICIES = ('strict', 'sink')


class TimbukParseError(AutomatonError):
    """Malformed Timbuk document; `line` is 1-based"""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedFormatError(AutomatonError):
    """A Timbuk document needs features beyond word automata"""

    def __init__(self, message: str, operator: Optional[str] = None):
        super().__init__(message)
        self.operator = operator


class FormatVersionError(AutomatonError):
    """Automaton document written with another format version"""


class DocumentValidationError(AutomatonError):
    """Automaton document that does not describe a valid machine"""


class ForeignSymbolError(AutomatonError):
    """Text byte outside the alphabet under the strict policy"""

    def __init__(self, symbol: str, offset: int):
        super().__init__(f"symbol {symbol!r} at offset {offset} is not in the alphabet")
        self.symbol = symbol
        self.offset = offset


# ---------------------------------------------------------------- Timbuk

_TOKEN = re.compile(r"->|[(),:]|(?:(?!->)[^\s(),:#])+")


@dataclass
class TimbukRule:
    operator: str
    source: Optional[str]
    target: str
    line: int


@dataclass
class TimbukDocument:
    operators: Dict[str, int] = field(default_factory=dict)
    name: str = ''
    states: List[str] = field(default_factory=list)
    final_states: List[str] = field(default_factory=list)
    rules: List[TimbukRule] = field(default_factory=list)


class _TokenStream:
    def __init__(self, text: str):
        self.tokens: List[Tuple[str, int]] = []
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.split('#', 1)[0]
            self.tokens.extend((token, number) for token in _TOKEN.findall(line))
        self.pos = 0

    def peek(self, offset: int = 0) -> Optional[str]:
        i = self.pos + offset
        return self.tokens[i][0] if i < len(self.tokens) else None

    @property
    def line(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return self.tokens[-1][1] if self.tokens else 1

    def take(self) -> str:
        if self.pos >= len(self.tokens):
            raise TimbukParseError("unexpected end of document", self.line)
        token = self.tokens[self.pos][0]
        self.pos += 1
        return token

    def expect(self, token: str):
        line = self.line
        found = self.take()
        if found != token:
            raise TimbukParseError(f"expected {token!r}, found {found!r}", line)


def parse_timbuk(text: str) -> TimbukDocument:
    """
    Parse the Ops / Automaton / States / Final States / Transitions sections

    Operators of arity two or more are rejected with UnsupportedFormatError.
    """
    stream = _TokenStream(text)
    doc = TimbukDocument()

    stream.expect('Ops')
    while stream.peek() not in (None, 'Automaton'):
        line = stream.line
        name = stream.take()
        stream.expect(':')
        arity_token = stream.take()
        if not arity_token.isdigit():
            raise TimbukParseError(f"arity of {name!r} must be a number", line)
        arity = int(arity_token)
        if arity >= 2:
            raise UnsupportedFormatError(
                f"operator {name!r} has arity {arity}; only word automata are supported", name)
        if name in doc.operators:
            raise TimbukParseError(f"operator {name!r} declared twice", line)
        doc.operators[name] = arity

    stream.expect('Automaton')
    doc.name = stream.take()

    stream.expect('States')
    while stream.peek() not in (None, 'Final'):
        line = stream.line
        state = stream.take()
        if stream.peek() == ':':
            # optional sort annotation, e.g. q0:0
            stream.take()
            stream.take()
        if state in doc.states:
            raise TimbukParseError(f"state {state!r} declared twice", line)
        doc.states.append(state)

    stream.expect('Final')
    stream.expect('States')
    declared = set(doc.states)
    while stream.peek() not in (None, 'Transitions'):
        line = stream.line
        state = stream.take()
        if state not in declared:
            raise TimbukParseError(f"final state {state!r} is not declared", line)
        doc.final_states.append(state)

    stream.expect('Transitions')
    while stream.peek() is not None:
        doc.rules.append(_parse_rule(stream, doc, declared))
    return doc


def _parse_rule(stream: _TokenStream, doc: TimbukDocument, declared: set) -> TimbukRule:
    line = stream.line
    operator = stream.take()
    source = None
    if stream.peek() == '(':
        stream.take()
        source = stream.take()
        if stream.peek() == ',':
            raise UnsupportedFormatError(f"line {line}: rule for {operator!r} has several arguments", operator)
        stream.expect(')')
    stream.expect('->')
    target = stream.take()

    if operator not in doc.operators:
        if source is None and operator in declared:
            raise UnsupportedFormatError(f"line {line}: unit rule {operator} -> {target} is not supported")
        raise TimbukParseError(f"operator {operator!r} is not declared", line)
    expected_arity = 0 if source is None else 1
    if doc.operators[operator] != expected_arity:
        raise TimbukParseError(
            f"operator {operator!r} has arity {doc.operators[operator]} but is used with {expected_arity}", line)
    for state in (source, target):
        if state is not None and state not in declared:
            raise TimbukParseError(f"state {state!r} is not declared", line)
    return TimbukRule(operator=operator, source=source, target=target, line=line)


def timbuk_to_nfa(doc: TimbukDocument) -> Nfa:
    """
    Word NFA of a unary Timbuk document

    Targets of nullary rules are the initial states, a unary rule a(q) -> q'
    is the edge q -a-> q', and unary operators form the alphabet in
    declaration order.
    """
    if not doc.states:
        raise TimbukParseError("document declares no states", 1)
    state_index = {name: i for i, name in enumerate(doc.states)}
    alphabet = Alphabet(tuple(name for name, arity in doc.operators.items() if arity == 1))
    edges = []
    initials = set()
    for rule in doc.rules:
        if rule.source is None:
            initials.add(state_index[rule.target])
        else:
            edges.append((state_index[rule.source], alphabet.index(rule.operator), state_index[rule.target]))
    if not initials:
        logger.warning(f"Timbuk automaton {doc.name!r} has no initial state and rejects everything")
    return Nfa.from_edges(len(doc.states), alphabet, edges, initials,
                          [state_index[name] for name in doc.final_states])


def load_timbuk(path: Union[str, Path]) -> Nfa:
    """Read a Timbuk file into an NFA"""
    with open(path, 'r', encoding='utf-8') as f:
        doc = parse_timbuk(f.read())
    nfa = timbuk_to_nfa(doc)
    logger.info(f"Loaded Timbuk automaton {doc.name!r} from {path}: "
                f"{nfa.state_count} states, {len(nfa.alphabet)} symbols")
    return nfa


# ---------------------------------------------------------------- documents

Edge = Tuple[int, str, int]


class _DocumentBase(BaseModel):
    format_version: int
    alphabet: List[str]
    state_count: int = Field(ge=1)
    transitions: List[Edge] = Field(default_factory=list)
    finals: List[int] = Field(default_factory=list)


class NfaDocument(_DocumentBase):
    kind: Literal['nfa'] = 'nfa'
    initials: List[int] = Field(default_factory=list)


class DfaDocument(_DocumentBase):
    kind: Literal['dfa'] = 'dfa'
    initial: int
    origin: Optional[List[List[int]]] = None


class RiDfaDocument(_DocumentBase):
    kind: Literal['ridfa'] = 'ridfa'
    nfa_state_count: int = Field(ge=1)
    subsets: List[List[int]]
    content: List[List[int]]
    interface: List[int]
    designated_initial: List[int]
    delegation: List[Tuple[int, int]] = Field(default_factory=list)
    construction_log: List[Tuple[int, int, int]] = Field(default_factory=list)


_DOCUMENT_MODELS = {'nfa': NfaDocument, 'dfa': DfaDocument, 'ridfa': RiDfaDocument}
Machine = Union[Nfa, Dfa, RiDfa]


def _table_edges(machine: Union[Dfa, RiDfa]) -> List[Edge]:
    symbols = machine.alphabet.symbols
    rows, cols = np.nonzero(machine.delta != NO_TRANSITION)
    return [(int(q), str(symbols[a]), int(machine.delta[q, a])) for q, a in zip(rows, cols)]


def automaton_to_document(machine: Machine) -> Dict[str, Any]:
    """Versioned JSON-ready document of an Nfa, Dfa or RiDfa"""
    alphabet = [str(symbol) for symbol in machine.alphabet.symbols]
    common = {'format_version': FORMAT_VERSION, 'alphabet': alphabet,
              'finals': sorted(machine.finals)}
    if isinstance(machine, Nfa):
        symbols = machine.alphabet.symbols
        model = NfaDocument(state_count=machine.state_count, initials=sorted(machine.initials),
                            transitions=[(q, str(symbols[a]), t) for q, a, t in machine.edges()],
                            **common)
    elif isinstance(machine, Dfa):
        origin = None if machine.origin is None else [sorted(s) for s in machine.origin]
        model = DfaDocument(state_count=machine.state_count, initial=machine.initial,
                            transitions=_table_edges(machine), origin=origin, **common)
    elif isinstance(machine, RiDfa):
        model = RiDfaDocument(
            state_count=machine.state_count,
            nfa_state_count=machine.nfa_state_count,
            transitions=_table_edges(machine),
            subsets=[sorted(s) for s in machine.subsets],
            content=[sorted(s) for s in machine.content],
            interface=list(machine.interface),
            designated_initial=sorted(machine.designated_initial),
            delegation=sorted(machine.delegation.items()),
            construction_log=[(g.seed, g.new_states, g.new_transitions) for g in machine.construction_log],
            **common,
        )
    else:
        raise TypeError(f"cannot serialize {type(machine).__name__}")
    return model.model_dump(mode='json')


def _dense_table(doc: _DocumentBase, alphabet: Alphabet) -> np.ndarray:
    table = np.full((doc.state_count, len(alphabet)), NO_TRANSITION, dtype=np.int32)
    for source, symbol, target in doc.transitions:
        a = alphabet.index(symbol)
        if table[source, a] != NO_TRANSITION:
            raise DocumentValidationError(
                f"state {source} has more than one transition on {symbol!r}")
        table[source, a] = target
    return table


def document_to_automaton(data: Dict[str, Any]) -> Machine:
    """Validate a document and rebuild the machine with identical state ids"""
    if not isinstance(data, dict):
        raise DocumentValidationError("automaton document must be a JSON object")
    version = data.get('format_version')
    if version != FORMAT_VERSION:
        raise FormatVersionError(f"format_version {version!r} is not supported (expected {FORMAT_VERSION})")
    model_class = _DOCUMENT_MODELS.get(data.get('kind'))
    if model_class is None:
        raise DocumentValidationError(f"unknown automaton kind {data.get('kind')!r}")

    try:
        doc = model_class.model_validate(data)
        alphabet = Alphabet(tuple(doc.alphabet))
        for source, _, target in doc.transitions:
            if not (0 <= source < doc.state_count and 0 <= target < doc.state_count):
                raise DocumentValidationError(f"edge {source}->{target} references an unknown state")
        if isinstance(doc, NfaDocument):
            edges = [(q, alphabet.index(symbol), t) for q, symbol, t in doc.transitions]
            return Nfa.from_edges(doc.state_count, alphabet, edges, doc.initials, doc.finals)
        table = _dense_table(doc, alphabet)
        if isinstance(doc, DfaDocument):
            origin = None if doc.origin is None else tuple(frozenset(s) for s in doc.origin)
            return Dfa(alphabet=alphabet, delta=table, initial=doc.initial,
                       finals=frozenset(doc.finals), origin=origin)
        return RiDfa(
            alphabet=alphabet,
            delta=table,
            subsets=tuple(frozenset(s) for s in doc.subsets),
            content=tuple(frozenset(s) for s in doc.content),
            interface=tuple(doc.interface),
            finals=frozenset(doc.finals),
            designated_initial=frozenset(doc.designated_initial),
            nfa_state_count=doc.nfa_state_count,
            delegation=dict(doc.delegation),
            construction_log=tuple(SeedGrowth(*entry) for entry in doc.construction_log),
        )
    except PydanticValidationError as e:
        raise DocumentValidationError(f"invalid {data.get('kind')} document: {e}") from e
    except DocumentValidationError:
        raise
    except AutomatonError as e:
        raise DocumentValidationError(str(e)) from e


def save_automaton(machine: Machine, path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Build the document of `machine` and write it to `path` when given"""
    document = automaton_to_document(machine)
    if path is not None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f, indent=2)
        logger.info(f"Saved {document['kind']} document to {path}")
    return document


def load_automaton(source: Union[str, Path, Dict[str, Any]]) -> Machine:
    """Load a machine from a document dict or a JSON file path"""
    if isinstance(source, dict):
        return document_to_automaton(source)
    try:
        with open(source, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DocumentValidationError(f"{source} is not valid JSON: {e}") from e
    return document_to_automaton(data)


# ---------------------------------------------------------------- texts

def encode_bytes(data: bytes, alphabet: Alphabet, policy: str = 'strict') -> np.ndarray:
    """
    Map raw bytes to symbol ids

    Each byte stands for the single-character symbol of the same code.
    Under 'strict' a foreign byte raises ForeignSymbolError; under 'sink'
    it becomes the sink id len(alphabet), which no automaton can read.
    """
    if policy not in TEXT_POLICIES:
        raise ValueError(f"unknown text policy {policy!r}")
    lookup = np.full(256, -1, dtype=np.int64)
    for symbol_id, symbol in enumerate(alphabet.symbols):
        if isinstance(symbol, str) and len(symbol) == 1 and ord(symbol) < 256:
            lookup[ord(symbol)] = symbol_id
    ids = lookup[np.frombuffer(data, dtype=np.uint8)]
    foreign = np.flatnonzero(ids < 0)
    if foreign.size:
        if policy == 'strict':
            offset = int(foreign[0])
            raise ForeignSymbolError(chr(data[offset]), offset)
        logger.warning(f"{foreign.size} foreign bytes mapped to the sink symbol")
        ids[foreign] = len(alphabet)
    return ids


def load_text(path: Union[str, Path], alphabet: Alphabet, policy: str = 'strict') -> np.ndarray:
    """Read a text file into memory as symbol ids"""
    with open(path, 'rb') as f:
        data = f.read()
    return encode_bytes(data, alphabet, policy)


# ---------------------------------------------------------------- reports

def save_report(report: RecognitionReport, path: Union[str, Path]) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(report.model_dump_json(indent=2))


def load_report(path: Union[str, Path]) -> RecognitionReport:
    with open(path, 'r', encoding='utf-8') as f:
        return RecognitionReport.model_validate_json(f.read())
