#!/usr/bin/env python3
"""
Seeded benchmark text generation
"""
import logging
from enum import Enum
from typing import Union

import numpy as np

from automata import NO_TRANSITION, AlphabetError, Dfa, EmptyLanguageError, Nfa
from parallel_recognizer import Variant, prepare_chunk_automaton
from ridfa_builder import RiDfa
from state_partition import minimize_dfa

logger = logging.getLogger(__name__)


class TextMode(str, Enum):
    UNIFORM = 'uniform'
    WALK = 'walk'


def _walk_machine(machine: Union[Dfa, Nfa, RiDfa]) -> Dfa:
    if isinstance(machine, Nfa):
        return prepare_chunk_automaton(machine, Variant.DFA)
    if isinstance(machine, RiDfa):
        if len(machine.designated_initial) != 1:
            raise EmptyLanguageError("language-walk over an RI-DFA needs exactly one designated initial state")
        # from its designated initial state the RI-DFA is an ordinary DFA
        (initial,) = machine.designated_initial
        machine = Dfa(alphabet=machine.alphabet, delta=machine.delta, initial=initial, finals=machine.finals)
    return minimize_dfa(machine)


def gen_text(mode: Union[TextMode, str], length: int, seed: int,
             machine: Union[Dfa, Nfa, RiDfa]) -> np.ndarray:
    """
    Generate a reproducible text of symbol ids

    Args:
        mode: 'uniform' draws i.i.d. symbols of the alphabet; 'walk' follows
              random transitions of the minimal DFA, so every prefix read so
              far can still be extended to an accepted string. A walk that
              reaches a state without moves restarts from the initial state.
        length: number of symbols, 0 or more
        seed: seed of the numpy generator
        machine: Dfa, Nfa or RiDfa supplying the alphabet (and the language for walks)

    Returns:
        int64 array of symbol ids
    """
    mode = TextMode(mode)
    if length < 0:
        raise ValueError(f"text length must be non-negative, got {length}")
    rng = np.random.default_rng(seed)
    sigma = len(machine.alphabet)
    if length == 0:
        return np.zeros(0, dtype=np.int64)

    if mode is TextMode.UNIFORM:
        if sigma == 0:
            raise AlphabetError("cannot draw symbols from an empty alphabet")
        return rng.integers(0, sigma, size=length, dtype=np.int64)

    dfa = _walk_machine(machine)
    choices = [np.flatnonzero(dfa.delta[q] != NO_TRANSITION) for q in range(dfa.state_count)]
    if not dfa.finals:
        raise EmptyLanguageError("language-walk needs a machine that accepts something")
    if choices[dfa.initial].size == 0:
        raise EmptyLanguageError("language-walk needs a machine that accepts a non-empty string")

    text = np.empty(length, dtype=np.int64)
    state = dfa.initial
    restarts = 0
    for i in range(length):
        if choices[state].size == 0:
            state = dfa.initial
            restarts += 1
        symbol = int(rng.choice(choices[state]))
        text[i] = symbol
        state = int(dfa.delta[state, symbol])
    if restarts:
        logger.debug(f"Language walk restarted {restarts} times over {length} symbols")
    return text
