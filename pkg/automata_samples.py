#!/usr/bin/env python3
"""
Sample machines and random instances used by the tests
"""
import itertools
from typing import Iterable, Iterator, List, Tuple

import numpy as np
from hypothesis import strategies as st

from automata import NO_TRANSITION, Alphabet, Dfa, Nfa

SYMBOLS = 'abc'


def make_nfa(state_count: int, symbols: str, edges: Iterable[Tuple[int, str, int]],
             initials: Iterable[int], finals: Iterable[int]) -> Nfa:
    """NFA from edges written with concrete one-character symbols"""
    alphabet = Alphabet(tuple(symbols))
    expanded = []
    for source, label, target in edges:
        for symbol in label:
            expanded.append((source, alphabet.index(symbol), target))
    return Nfa.from_edges(state_count, alphabet, expanded, initials, finals)


def chunking_nfa() -> Nfa:
    """
    Three-state NFA over a, b, c

    0 -a,c-> 1, 1 -a-> 1, 1 -b-> 2, 2 -b-> 1 and 1 -a,b,c-> 0; initial 0,
    finals 0 and 2. Its minimal DFA has four states.
    """
    return make_nfa(3, 'abc',
                    [(0, 'ac', 1), (1, 'a', 1), (1, 'b', 2), (2, 'b', 1), (1, 'abc', 0)],
                    initials=[0], finals=[0, 2])


def parity_dfa() -> Dfa:
    """Two-state DFA over a, b: q0 -b-> q0, q0 -a-> q1, q1 -a,b-> q0; final q1"""
    alphabet = Alphabet(('a', 'b'))
    return Dfa(alphabet=alphabet,
               delta=np.array([[1, 0], [0, 0]], dtype=np.int32),
               initial=0, finals=frozenset([1]))


def delegation_nfa() -> Nfa:
    """
    Four-state NFA whose RI-DFA has two equivalent singletons, {1} and {3}

    0 -a-> 1, 0 -c-> 3, 1 -a,b,c-> 0, 1 -b-> 2, 1 -a-> 3, 2 -b-> 1,
    3 -a,b,c-> 0, 3 -a-> 1, 3 -b-> 2; initial 0, final 2.
    """
    return make_nfa(4, 'abc',
                    [(0, 'a', 1), (0, 'c', 3), (1, 'abc', 0), (1, 'b', 2), (1, 'a', 3),
                     (2, 'b', 1), (3, 'abc', 0), (3, 'a', 1), (3, 'b', 2)],
                    initials=[0], finals=[2])


def random_nfa(rng: np.random.Generator, max_states: int = 6, max_symbols: int = 3,
               max_density: float = 0.5, multi_initial: float = 0.2) -> Nfa:
    """Random NFA; each possible edge is present with a random density <= max_density"""
    state_count = int(rng.integers(1, max_states + 1))
    sigma = int(rng.integers(1, max_symbols + 1))
    density = float(rng.uniform(0, max_density))
    present = rng.random((state_count, sigma, state_count)) < density
    edges = [(int(q), int(a), int(t)) for q, a, t in zip(*np.nonzero(present))]
    if rng.random() < multi_initial:
        initials = [q for q in range(state_count) if rng.random() < 0.5] or [0]
    else:
        initials = [0]
    finals = [q for q in range(state_count) if rng.random() < 0.3]
    return Nfa.from_edges(state_count, Alphabet(tuple(SYMBOLS[:sigma])), edges, initials, finals)


def random_text(rng: np.random.Generator, sigma: int, max_length: int = 12) -> List[int]:
    length = int(rng.integers(0, max_length + 1))
    return [int(a) for a in rng.integers(0, sigma, size=length)] if sigma else []


def all_strings(sigma: int, max_length: int) -> Iterator[Tuple[int, ...]]:
    """Every symbol-id string of length 0..max_length in length-lexicographic order"""
    for length in range(max_length + 1):
        yield from itertools.product(range(sigma), repeat=length)


def encode(machine, text: str) -> List[int]:
    return machine.alphabet.encode(text)


@st.composite
def nfas(draw, max_states: int = 6, max_symbols: int = 3):
    """Hypothesis strategy for small NFAs with possibly several initial states"""
    state_count = draw(st.integers(1, max_states))
    sigma = draw(st.integers(1, max_symbols))
    triples = st.tuples(st.integers(0, state_count - 1), st.integers(0, sigma - 1),
                        st.integers(0, state_count - 1))
    edges = draw(st.lists(triples, max_size=state_count * sigma * 2))
    states = st.integers(0, state_count - 1)
    initials = draw(st.sets(states, min_size=1, max_size=state_count))
    finals = draw(st.sets(states, max_size=state_count))
    return Nfa.from_edges(state_count, Alphabet(tuple(SYMBOLS[:sigma])), edges, initials, finals)


def random_dfa(rng: np.random.Generator, state_count: int = 6, sigma: int = 2,
               missing: float = 0.2) -> Dfa:
    """Random partial DFA; each move is undefined with probability `missing`"""
    delta = rng.integers(0, state_count, size=(state_count, sigma))
    delta[rng.random((state_count, sigma)) < missing] = NO_TRANSITION
    finals = [q for q in range(state_count) if rng.random() < 0.4]
    return Dfa(alphabet=Alphabet(tuple(SYMBOLS[:sigma])), delta=delta, initial=0, finals=frozenset(finals))


def equivalent_states(machine, p: int, q: int) -> bool:
    """
    Pairwise search from (p, q) over a deterministic table

    A reachable pair with differing finality tells p and q apart; the
    undefined move is a shared non-final dead state.
    """
    dead = NO_TRANSITION
    seen = {(p, q)}
    stack = [(p, q)]
    while stack:
        left, right = stack.pop()
        if (left in machine.finals) != (right in machine.finals):
            return False
        for a in range(len(machine.alphabet)):
            pair = (dead if left == dead else machine.step(left, a),
                    dead if right == dead else machine.step(right, a))
            if pair != (dead, dead) and pair not in seen:
                seen.add(pair)
                stack.append(pair)
    return True


def language_signature(accepts, sigma: int, max_length: int) -> Tuple[bool, ...]:
    """Acceptance of every string up to max_length, as a hashable tuple"""
    return tuple(accepts(list(word)) for word in all_strings(sigma, max_length))
