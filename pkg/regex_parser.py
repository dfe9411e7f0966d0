#!/usr/bin/env python3
"""
Regular expression parsing and position-automaton construction
Supports literals, escapes, '.', '|', '*', '+', '?', groups and bracket
classes with ranges. No anchors, no backreferences, no counted repetition.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Union

from automata import Alphabet, AutomatonError, Nfa

logger = logging.getLogger(__name__)

ALPHABET_MODES = ('bytes', 'custom')
BYTE_SYMBOLS = tuple(chr(code) for code in range(256))

_META = set('()|*+?.[]\\^${}')
_QUANTIFIERS = set('*+?')


class RegexSyntaxError(AutomatonError):
    """Pattern outside the supported syntax; `position` is a character offset"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class CharClass:
    symbols: FrozenSet[str]


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Concat:
    children: Tuple["RegexAst", ...]


@dataclass(frozen=True)
class Alt:
    children: Tuple["RegexAst", ...]


@dataclass(frozen=True)
class Star:
    child: "RegexAst"


@dataclass(frozen=True)
class Plus:
    child: "RegexAst"


@dataclass(frozen=True)
class Opt:
    child: "RegexAst"


RegexAst = Union[Literal, CharClass, AnyChar, Epsilon, Concat, Alt, Star, Plus, Opt]
_ATOMS = (Literal, CharClass, AnyChar)


class RegexParser:
    """Recursive-descent parser producing a RegexAst"""

    def __init__(self, pattern: str, alphabet_mode: str = 'bytes'):
        if alphabet_mode not in ALPHABET_MODES:
            raise ValueError(f"unknown alphabet mode {alphabet_mode!r}")
        self.pattern = pattern
        self.alphabet_mode = alphabet_mode
        self.pos = 0

    def parse(self) -> RegexAst:
        if not self.pattern:
            raise RegexSyntaxError("empty pattern", 0)
        node = self._alternation()
        if self.pos < len(self.pattern):
            # only a ')' can stop the top-level alternation early
            raise RegexSyntaxError("unbalanced ')'", self.pos)
        return node

    def _peek(self) -> Optional[str]:
        return self.pattern[self.pos] if self.pos < len(self.pattern) else None

    def _symbol(self, char: str, position: int) -> str:
        if self.alphabet_mode == 'bytes' and ord(char) > 255:
            raise RegexSyntaxError(f"symbol {char!r} is not a byte", position)
        return char

    def _alternation(self) -> RegexAst:
        branches = [self._concatenation()]
        while self._peek() == '|':
            self.pos += 1
            branches.append(self._concatenation())
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def _concatenation(self) -> RegexAst:
        items: List[RegexAst] = []
        while True:
            char = self._peek()
            if char is None or char in '|)':
                break
            items.append(self._repetition())
        if not items:
            return Epsilon()
        return items[0] if len(items) == 1 else Concat(tuple(items))

    def _repetition(self) -> RegexAst:
        node = self._atom()
        while self._peek() in _QUANTIFIERS:
            quantifier = self.pattern[self.pos]
            self.pos += 1
            node = {'*': Star, '+': Plus, '?': Opt}[quantifier](node)
        return node

    def _atom(self) -> RegexAst:
        start = self.pos
        char = self.pattern[start]
        if char == '(':
            self.pos += 1
            node = self._alternation()
            if self._peek() != ')':
                raise RegexSyntaxError("unclosed '('", start)
            self.pos += 1
            return node
        if char == '[':
            return self._bracket_class()
        if char == '.':
            self.pos += 1
            return AnyChar()
        if char == '\\':
            if start + 1 >= len(self.pattern):
                raise RegexSyntaxError("dangling escape", start)
            self.pos += 2
            return Literal(self._symbol(self.pattern[start + 1], start + 1))
        if char in _QUANTIFIERS:
            raise RegexSyntaxError(f"quantifier {char!r} has nothing to repeat", start)
        if char in _META:
            raise RegexSyntaxError(f"unsupported metacharacter {char!r}", start)
        self.pos += 1
        return Literal(self._symbol(char, start))

    def _class_char(self, opening: int) -> str:
        char = self._peek()
        if char is None:
            raise RegexSyntaxError("unclosed '['", opening)
        if char == '\\':
            if self.pos + 1 >= len(self.pattern):
                raise RegexSyntaxError("unclosed '['", opening)
            self.pos += 2
            return self._symbol(self.pattern[self.pos - 1], self.pos - 1)
        self.pos += 1
        return self._symbol(char, self.pos - 1)

    def _bracket_class(self) -> RegexAst:
        opening = self.pos
        self.pos += 1
        if self._peek() == '^':
            raise RegexSyntaxError("negated classes are not supported", self.pos)
        if self._peek() == ']':
            raise RegexSyntaxError("empty character class", opening)
        symbols: Set[str] = set()
        while self._peek() != ']':
            low_at = self.pos
            low = self._class_char(opening)
            following = self.pattern[self.pos + 1] if self.pos + 1 < len(self.pattern) else None
            if self._peek() == '-' and following is not None and following != ']':
                self.pos += 1
                high = self._class_char(opening)
                if ord(high) < ord(low):
                    raise RegexSyntaxError(f"reversed range {low}-{high}", low_at)
                symbols.update(chr(code) for code in range(ord(low), ord(high) + 1))
            else:
                symbols.add(low)
        self.pos += 1
        return CharClass(frozenset(symbols))


def parse_regex(pattern: str, alphabet_mode: str = 'bytes') -> RegexAst:
    """
    Parse a pattern into a RegexAst

    Args:
        pattern: regular expression text
        alphabet_mode: 'bytes' (symbols are the 256 byte values) or 'custom'
                       (symbols are whatever the pattern names)

    Returns:
        The root node of the expression tree
    """
    return RegexParser(pattern, alphabet_mode).parse()


def _collect_symbols(node: RegexAst, found: Set[str]) -> bool:
    """Add literal/class symbols to `found`; True when an AnyChar occurs"""
    if isinstance(node, Literal):
        found.add(node.symbol)
        return False
    if isinstance(node, CharClass):
        found.update(node.symbols)
        return False
    if isinstance(node, AnyChar):
        return True
    if isinstance(node, (Concat, Alt)):
        any_char = False
        for child in node.children:
            any_char = _collect_symbols(child, found) or any_char
        return any_char
    if isinstance(node, (Star, Plus, Opt)):
        return _collect_symbols(node.child, found)
    return False


def implied_alphabet(ast: RegexAst, alphabet_mode: str = 'custom') -> Alphabet:
    """
    Smallest alphabet covering every symbol the expression names

    In bytes mode a '.' widens the alphabet to all 256 byte values. In custom
    mode '.' ranges over the named symbols, so it needs at least one of them.
    """
    found: Set[str] = set()
    any_char = _collect_symbols(ast, found)
    if any_char and alphabet_mode == 'bytes':
        return Alphabet(BYTE_SYMBOLS)
    if any_char and not found:
        raise RegexSyntaxError("'.' needs at least one named symbol in custom mode", 0)
    return Alphabet.from_text(found)


class _PositionIndex:
    """Nullable/first/last/follow bookkeeping for the position construction"""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.symbols: List[FrozenSet[int]] = []
        self.follow: List[Set[int]] = []

    def _new_position(self, symbol_ids: FrozenSet[int]) -> int:
        self.symbols.append(symbol_ids)
        self.follow.append(set())
        return len(self.symbols) - 1

    def _atom_ids(self, node: RegexAst) -> FrozenSet[int]:
        if isinstance(node, Literal):
            return frozenset([self.alphabet.index(node.symbol)])
        if isinstance(node, CharClass):
            return frozenset(self.alphabet.index(symbol) for symbol in node.symbols)
        return frozenset(range(len(self.alphabet)))

    def visit(self, node: RegexAst) -> Tuple[bool, Set[int], Set[int]]:
        if isinstance(node, _ATOMS):
            p = self._new_position(self._atom_ids(node))
            return False, {p}, {p}
        if isinstance(node, Alt) and all(isinstance(child, _ATOMS) for child in node.children):
            # a choice between single symbols occupies one position
            ids = frozenset().union(*(self._atom_ids(child) for child in node.children))
            p = self._new_position(ids)
            return False, {p}, {p}
        if isinstance(node, Epsilon):
            return True, set(), set()
        if isinstance(node, Alt):
            nullable, first, last = False, set(), set()
            for child in node.children:
                n, f, l = self.visit(child)
                nullable = nullable or n
                first |= f
                last |= l
            return nullable, first, last
        if isinstance(node, Concat):
            nullable, first, last = True, set(), set()
            for child in node.children:
                n, f, l = self.visit(child)
                for p in last:
                    self.follow[p] |= f
                if nullable:
                    first |= f
                last = (last | l) if n else l
                nullable = nullable and n
            return nullable, first, last
        if isinstance(node, (Star, Plus)):
            n, f, l = self.visit(node.child)
            for p in l:
                self.follow[p] |= f
            return n or isinstance(node, Star), f, l
        if isinstance(node, Opt):
            _, f, l = self.visit(node.child)
            return True, f, l
        raise TypeError(f"not a regex node: {node!r}")


def _merge_equivalent_rows(state_count: int, rows: List[List[Set[int]]],
                           finals: Set[int]) -> Tuple[int, List[List[Set[int]]], Set[int]]:
    """Merge states with equal finality and equal successor rows until stable"""
    while True:
        keeper: Dict[tuple, int] = {}
        mapping = list(range(state_count))
        for q in range(state_count):
            signature = (q in finals, tuple(frozenset(cell) for cell in rows[q]))
            mapping[q] = keeper.setdefault(signature, q)
        if all(mapping[q] == q for q in range(state_count)):
            return state_count, rows, finals
        survivors = sorted(set(mapping))
        renumber = {old: new for new, old in enumerate(survivors)}
        rows = [[{renumber[mapping[t]] for t in cell} for cell in rows[old]] for old in survivors]
        finals = {renumber[mapping[q]] for q in finals}
        state_count = len(survivors)


def regex_to_nfa(ast: RegexAst, alphabet: Optional[Alphabet] = None) -> Nfa:
    """
    Epsilon-free NFA for the expression by the position (Glushkov) construction

    State 0 is the single initial state; states 1.. are the symbol positions.
    States with the same finality and successor rows are merged afterwards,
    so the result has at most positions + 1 states.

    Args:
        ast: parsed expression
        alphabet: alphabet to build over; defaults to the implied one

    Returns:
        Nfa with initials {0}
    """
    if alphabet is None:
        alphabet = implied_alphabet(ast)
    index = _PositionIndex(alphabet)
    nullable, first, last = index.visit(ast)

    state_count = len(index.symbols) + 1
    rows: List[List[Set[int]]] = [[set() for _ in range(len(alphabet))] for _ in range(state_count)]
    for p in first:
        for a in index.symbols[p]:
            rows[0][a].add(p + 1)
    for p, followers in enumerate(index.follow):
        for target in followers:
            for a in index.symbols[target]:
                rows[p + 1][a].add(target + 1)
    finals = {p + 1 for p in last}
    if nullable:
        finals.add(0)

    positions = state_count - 1
    state_count, rows, finals = _merge_equivalent_rows(state_count, rows, finals)
    logger.debug(f"Position automaton: {positions} positions, {state_count} states after merging")

    edges = [(q, a, t) for q in range(state_count) for a in range(len(alphabet)) for t in rows[q][a]]
    return Nfa.from_edges(state_count, alphabet, edges, initials=[0], finals=finals)


def ast_matches(ast: RegexAst, symbols) -> bool:
    """Brute-force membership test straight on the expression tree"""
    text = list(symbols)
    memo: Dict[Tuple[int, int], FrozenSet[int]] = {}

    def ends(node: RegexAst, start: int) -> FrozenSet[int]:
        key = (id(node), start)
        if key in memo:
            return memo[key]
        if isinstance(node, Literal):
            result = frozenset([start + 1]) if start < len(text) and text[start] == node.symbol else frozenset()
        elif isinstance(node, CharClass):
            result = frozenset([start + 1]) if start < len(text) and text[start] in node.symbols else frozenset()
        elif isinstance(node, AnyChar):
            result = frozenset([start + 1]) if start < len(text) else frozenset()
        elif isinstance(node, Epsilon):
            result = frozenset([start])
        elif isinstance(node, Concat):
            current = {start}
            for child in node.children:
                current = set().union(*(ends(child, i) for i in current))
            result = frozenset(current)
        elif isinstance(node, Alt):
            result = frozenset().union(*(ends(child, start) for child in node.children))
        elif isinstance(node, Opt):
            result = ends(node.child, start) | {start}
        else:
            seen = {start} if isinstance(node, Star) else set(ends(node.child, start))
            frontier = list(seen)
            while frontier:
                i = frontier.pop()
                for j in ends(node.child, i):
                    if j not in seen:
                        seen.add(j)
                        frontier.append(j)
            result = frozenset(seen)
        memo[key] = result
        return result

    return len(text) in ends(ast, 0)


def regexp_family_pattern(k: int) -> str:
    """Pattern of the benchmark family: (a|b)*a followed by k copies of (a|b)"""
    if k < 0:
        raise ValueError("k must be non-negative")
    return "(a|b)*a" + "(a|b)" * k
