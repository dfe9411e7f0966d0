#!/usr/bin/env python3
"""
Finite automata core types
Alphabets, epsilon-free NFAs, partial dense-table DFAs, the accessible
powerset construction and the serial simulation oracles
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Marker stored in dense tables for an undefined (state, symbol) move
NO_TRANSITION = -1

SymbolId = int
StateId = int


class AutomatonError(Exception):
    """Base class for every error raised by the automata modules"""


class AlphabetError(AutomatonError):
    """A concrete symbol is missing from the alphabet or duplicated"""


class ValidationError(AutomatonError):
    """An automaton violates one of its structural invariants"""


class StateLimitExceeded(AutomatonError):
    """A construction produced more states than the caller allowed"""

    def __init__(self, limit: int):
        super().__init__(f"construction exceeded the limit of {limit} states")
        self.limit = limit


class EmptyLanguageError(AutomatonError):
    """An operation needs at least one accepted string"""


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct concrete symbols with dense integer ids"""

    symbols: Tuple[Hashable, ...]
    lookup: Dict[Hashable, SymbolId] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        lookup = {symbol: index for index, symbol in enumerate(symbols)}
        if len(lookup) != len(symbols):
            raise AlphabetError(f"duplicate symbols in alphabet {symbols!r}")
        object.__setattr__(self, 'symbols', symbols)
        object.__setattr__(self, 'lookup', lookup)

    @classmethod
    def from_text(cls, text: Iterable[Hashable]) -> "Alphabet":
        """Alphabet of the distinct symbols of `text`, sorted"""
        return cls(tuple(sorted(set(text))))

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.lookup

    def index(self, symbol: Hashable) -> SymbolId:
        try:
            return self.lookup[symbol]
        except KeyError:
            raise AlphabetError(f"symbol {symbol!r} is not in the alphabet") from None

    def encode(self, text: Iterable[Hashable]) -> List[SymbolId]:
        """Map a sequence of concrete symbols to symbol ids"""
        return [self.index(symbol) for symbol in text]

    def decode(self, ids: Iterable[SymbolId]) -> list:
        return [self.symbols[i] for i in ids]


@dataclass(frozen=True, eq=False)
class Nfa:
    """
    Epsilon-free nondeterministic automaton

    transitions[q][a] is the frozenset of successors of state q on symbol a.
    Several initial states are allowed.
    """

    state_count: int
    alphabet: Alphabet
    transitions: Tuple[Tuple[FrozenSet[StateId], ...], ...]
    initials: FrozenSet[StateId]
    finals: FrozenSet[StateId]

    def __post_init__(self):
        if self.state_count < 1:
            raise ValidationError("an NFA needs at least one state")
        if len(self.transitions) != self.state_count:
            raise ValidationError(
                f"transition rows ({len(self.transitions)}) != state count ({self.state_count})")
        sigma = len(self.alphabet)
        for q, row in enumerate(self.transitions):
            if len(row) != sigma:
                raise ValidationError(f"state {q} has {len(row)} columns, alphabet has {sigma}")
            for successors in row:
                for target in successors:
                    if not 0 <= target < self.state_count:
                        raise ValidationError(f"state {q} moves to unknown state {target}")
        for name, states in (('initial', self.initials), ('final', self.finals)):
            for q in states:
                if not 0 <= q < self.state_count:
                    raise ValidationError(f"{name} state {q} is out of range")

    @classmethod
    def from_edges(cls, state_count: int, alphabet: Alphabet,
                   edges: Iterable[Tuple[StateId, SymbolId, StateId]],
                   initials: Iterable[StateId], finals: Iterable[StateId],
                   epsilon_edges: Iterable[Tuple[StateId, StateId]] = ()) -> "Nfa":
        """
        Build an NFA from (source, symbol id, target) triples

        Epsilon edges are removed on the way in: a state inherits the symbol
        moves of its epsilon closure and becomes final when the closure holds
        a final state.
        """
        sigma = len(alphabet)
        rows = [[set() for _ in range(sigma)] for _ in range(state_count)]
        for source, symbol, target in edges:
            if not 0 <= source < state_count or not 0 <= target < state_count:
                raise ValidationError(f"edge {source}->{target} references an unknown state")
            if not 0 <= symbol < sigma:
                raise ValidationError(f"edge {source}->{target} uses unknown symbol id {symbol}")
            rows[source][symbol].add(target)

        finals = set(finals)
        epsilon = [set() for _ in range(state_count)]
        for source, target in epsilon_edges:
            if not 0 <= source < state_count or not 0 <= target < state_count:
                raise ValidationError(f"epsilon edge {source}->{target} references an unknown state")
            epsilon[source].add(target)

        if any(epsilon):
            closures = [_epsilon_closure(q, epsilon) for q in range(state_count)]
            rows = [
                [set().union(*(rows[p][a] for p in closures[q])) for a in range(sigma)]
                for q in range(state_count)
            ]
            finals = {q for q in range(state_count) if closures[q] & finals}

        return cls(
            state_count=state_count,
            alphabet=alphabet,
            transitions=tuple(tuple(frozenset(cell) for cell in row) for row in rows),
            initials=frozenset(initials),
            finals=frozenset(finals),
        )

    def edges(self) -> List[Tuple[StateId, SymbolId, StateId]]:
        """All (source, symbol, target) triples in sorted order"""
        return [
            (q, a, target)
            for q, row in enumerate(self.transitions)
            for a, successors in enumerate(row)
            for target in sorted(successors)
        ]

    @property
    def transition_count(self) -> int:
        return sum(len(successors) for row in self.transitions for successors in row)

    def successors(self, q: StateId, symbol: SymbolId) -> FrozenSet[StateId]:
        # the sink symbol (id == |alphabet|) has no moves
        row = self.transitions[q]
        return row[symbol] if symbol < len(row) else frozenset()


def _epsilon_closure(q: StateId, epsilon: List[set]) -> set:
    closure = {q}
    stack = [q]
    while stack:
        p = stack.pop()
        for r in epsilon[p]:
            if r not in closure:
                closure.add(r)
                stack.append(r)
    return closure


@dataclass(frozen=True, eq=False)
class Dfa:
    """
    Deterministic automaton over a dense (states x symbols) int32 table

    Undefined moves hold NO_TRANSITION; no dead state is materialized.
    `origin` optionally records the NFA subset each state stands for.
    """

    alphabet: Alphabet
    delta: np.ndarray
    initial: StateId
    finals: FrozenSet[StateId]
    origin: Optional[Tuple[FrozenSet[StateId], ...]] = None

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.int32)
        if delta.flags.writeable:
            delta = delta.copy()
        if delta.ndim != 2 or delta.shape[1] != len(self.alphabet):
            raise ValidationError(
                f"transition table shape {delta.shape} does not fit an alphabet of {len(self.alphabet)}")
        if delta.shape[0] < 1:
            raise ValidationError("a DFA needs at least one state")
        n = delta.shape[0]
        if delta.size and (delta.min() < NO_TRANSITION or delta.max() >= n):
            raise ValidationError("transition table references an unknown state")
        if not 0 <= self.initial < n:
            raise ValidationError(f"initial state {self.initial} is out of range")
        if any(not 0 <= q < n for q in self.finals):
            raise ValidationError("final state out of range")
        if self.origin is not None and len(self.origin) != n:
            raise ValidationError("origin must list one subset per state")
        delta.flags.writeable = False
        object.__setattr__(self, 'delta', delta)
        object.__setattr__(self, 'finals', frozenset(self.finals))

    @property
    def state_count(self) -> int:
        return int(self.delta.shape[0])

    @property
    def transition_count(self) -> int:
        return int(np.count_nonzero(self.delta != NO_TRANSITION))

    def step(self, q: StateId, symbol: SymbolId) -> StateId:
        if symbol >= self.delta.shape[1]:
            return NO_TRANSITION
        return int(self.delta[q, symbol])


def powerset_from(nfa: Nfa, start: Iterable[StateId],
                  state_limit: Optional[int] = None) -> Dfa:
    """
    Accessible subset construction seeded with `start`

    States are numbered in breadth-first discovery order (symbols scanned in
    alphabet order); each subset is canonicalized as a sorted tuple.
    """
    seed = tuple(sorted(set(start)))
    if not seed:
        raise ValidationError("powerset construction needs a non-empty start set")
    for q in seed:
        if not 0 <= q < nfa.state_count:
            raise ValidationError(f"start state {q} is out of range")

    sigma = len(nfa.alphabet)
    index: Dict[Tuple[StateId, ...], StateId] = {seed: 0}
    subsets: List[Tuple[StateId, ...]] = [seed]
    rows: List[List[StateId]] = []
    queue = deque([seed])
    while queue:
        subset = queue.popleft()
        row = []
        for a in range(sigma):
            target = tuple(sorted(set().union(*(nfa.transitions[q][a] for q in subset))))
            if not target:
                row.append(NO_TRANSITION)
                continue
            if target not in index:
                if state_limit is not None and len(subsets) >= state_limit:
                    raise StateLimitExceeded(state_limit)
                index[target] = len(subsets)
                subsets.append(target)
                queue.append(target)
            row.append(index[target])
        rows.append(row)

    finals = frozenset(i for i, subset in enumerate(subsets) if nfa.finals.intersection(subset))
    logger.debug(f"Powerset from {set(seed)}: {len(subsets)} states")
    return Dfa(
        alphabet=nfa.alphabet,
        delta=np.array(rows, dtype=np.int32).reshape(len(subsets), sigma),
        initial=0,
        finals=finals,
        origin=tuple(frozenset(subset) for subset in subsets),
    )


def nfa_reach(nfa: Nfa, states: Iterable[StateId], text: Sequence[SymbolId]) -> FrozenSet[StateId]:
    """States reached by the NFA from `states` after reading `text`"""
    current = frozenset(states)
    for symbol in text:
        if not current:
            break
        current = frozenset().union(*(nfa.successors(q, symbol) for q in current))
    return current


def nfa_accepts(nfa: Nfa, text: Sequence[SymbolId]) -> bool:
    """Membership oracle: some run from an initial state ends in a final state"""
    return bool(nfa_reach(nfa, nfa.initials, text) & nfa.finals)


def dfa_run(dfa: Dfa, start: StateId, text: Sequence[SymbolId]) -> Tuple[Optional[StateId], int]:
    """
    Serial run of a deterministic table from `start`

    Returns (end state or None when the run exits early, successful moves).
    """
    state = start
    moves = 0
    for symbol in text:
        state = dfa.step(state, symbol)
        if state == NO_TRANSITION:
            return None, moves
        moves += 1
    return state, moves


def dfa_accepts(dfa: Dfa, text: Sequence[SymbolId]) -> bool:
    end, _ = dfa_run(dfa, dfa.initial, text)
    return end is not None and end in dfa.finals
