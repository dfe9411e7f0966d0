#!/usr/bin/env python3
"""
Reduced-interface DFA construction
Incremental powerset from every NFA state, the interface function and
initial-state reduction by delegation
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from automata import (NO_TRANSITION, Alphabet, AutomatonError, Nfa, StateId,
                      StateLimitExceeded, ValidationError)
from state_partition import nerode_partition

logger = logging.getLogger(__name__)

InterfaceImage = FrozenSet[StateId]


class InterfaceCorruptionError(AutomatonError):
    """An interface lookup referenced a state the machine does not have"""


@dataclass(frozen=True)
class SeedGrowth:
    """States and transitions first explored while expanding one seed"""
    seed: StateId
    new_states: int
    new_transitions: int


@dataclass(frozen=True, eq=False)
class RiDfa:
    """
    Multi-entry deterministic machine over powerset states

    NFA state q is represented by powerset state q, so the first
    `nfa_state_count` states are the singletons; aggregate states follow in
    discovery order. `subsets` holds the powerset subset of every state and
    never changes; `content` is the same view after delegation has extended
    the delegates.
    """

    alphabet: Alphabet
    delta: np.ndarray
    subsets: Tuple[FrozenSet[StateId], ...]
    content: Tuple[FrozenSet[StateId], ...]
    interface: Tuple[StateId, ...]
    finals: FrozenSet[StateId]
    designated_initial: FrozenSet[StateId]
    nfa_state_count: int
    delegation: Mapping[StateId, StateId] = field(default_factory=dict)
    construction_log: Tuple[SeedGrowth, ...] = ()

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.int32)
        if delta.flags.writeable:
            delta = delta.copy()
        if delta.ndim != 2 or delta.shape[1] != len(self.alphabet):
            raise ValidationError(f"transition table shape {delta.shape} does not fit the alphabet")
        n = delta.shape[0]
        if delta.size and (delta.min() < NO_TRANSITION or delta.max() >= n):
            raise ValidationError("transition table references an unknown state")
        if len(self.subsets) != n or len(self.content) != n:
            raise ValidationError("subsets and content must list one entry per state")
        ell = self.nfa_state_count
        if not 1 <= ell <= n:
            raise ValidationError(f"NFA state count {ell} does not fit {n} states")
        for q in range(ell):
            if self.subsets[q] != frozenset([q]):
                raise ValidationError(f"state {q} must be the singleton {{{q}}}")
        for p, subset in enumerate(self.subsets):
            if not subset or any(not 0 <= q < ell for q in subset):
                raise ValidationError(f"state {p} has an invalid subset {sorted(subset)}")
        if len(set(self.interface)) != len(self.interface) or any(not 0 <= p < ell for p in self.interface):
            raise ValidationError("interface must hold distinct singleton states")
        for source, delegate in self.delegation.items():
            if source in self.interface or delegate not in self.interface:
                raise ValidationError(f"delegation {source}->{delegate} is inconsistent with the interface")
        if set(self.interface) | set(self.delegation) != set(range(ell)):
            raise ValidationError("every singleton must be in the interface or delegated")
        if any(not 0 <= p < n for p in self.finals):
            raise ValidationError("final state out of range")
        if any(not 0 <= p < ell for p in self.designated_initial):
            raise ValidationError("designated initial states must be singletons")
        delta.flags.writeable = False
        object.__setattr__(self, 'delta', delta)
        object.__setattr__(self, 'delegation', dict(self.delegation))
        object.__setattr__(self, '_by_subset', {subset: p for p, subset in enumerate(self.subsets)})

    @property
    def state_count(self) -> int:
        return int(self.delta.shape[0])

    @property
    def transition_count(self) -> int:
        return int(np.count_nonzero(self.delta != NO_TRANSITION))

    @property
    def is_reduced(self) -> bool:
        return bool(self.delegation)

    def state_of(self, subset: Iterable[StateId]) -> StateId:
        """Powerset state whose original subset is `subset`"""
        key = frozenset(subset)
        try:
            return self._by_subset[key]
        except KeyError:
            raise KeyError(f"no state for subset {sorted(key)}") from None

    def step(self, p: StateId, symbol: int) -> StateId:
        if symbol >= self.delta.shape[1]:
            return NO_TRANSITION
        return int(self.delta[p, symbol])


def build_ridfa(nfa: Nfa, state_limit: Optional[int] = None) -> RiDfa:
    """
    Build the RI-DFA of an NFA

    The subset construction runs once per NFA state q, seeded with {q}, in
    state order; each run reuses every state and transition found by the
    earlier runs.

    Args:
        nfa: epsilon-free source machine
        state_limit: optional cap on the number of powerset states

    Returns:
        Unreduced RiDfa whose interface is all singletons
    """
    ell = nfa.state_count
    sigma = len(nfa.alphabet)
    subsets: List[Tuple[StateId, ...]] = [(q,) for q in range(ell)]
    index: Dict[Tuple[StateId, ...], StateId] = {subset: q for q, subset in enumerate(subsets)}
    rows: List[Optional[List[StateId]]] = [None] * ell
    if state_limit is not None and ell > state_limit:
        raise StateLimitExceeded(state_limit)

    log: List[SeedGrowth] = []
    for seed in range(ell):
        new_states = 0
        new_transitions = 0
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            if rows[p] is not None:
                continue
            row = []
            for a in range(sigma):
                target = tuple(sorted(set().union(*(nfa.transitions[q][a] for q in subsets[p]))))
                if not target:
                    row.append(NO_TRANSITION)
                    continue
                if target not in index:
                    if state_limit is not None and len(subsets) >= state_limit:
                        raise StateLimitExceeded(state_limit)
                    index[target] = len(subsets)
                    subsets.append(target)
                    rows.append(None)
                target_id = index[target]
                if rows[target_id] is None:
                    queue.append(target_id)
                row.append(target_id)
                new_transitions += 1
            rows[p] = row
            new_states += 1
        log.append(SeedGrowth(seed=seed, new_states=new_states, new_transitions=new_transitions))

    frozen = tuple(frozenset(subset) for subset in subsets)
    finals = frozenset(p for p, subset in enumerate(frozen) if subset & nfa.finals)
    ridfa = RiDfa(
        alphabet=nfa.alphabet,
        delta=np.array(rows, dtype=np.int32).reshape(len(subsets), sigma),
        subsets=frozen,
        content=frozen,
        interface=tuple(range(ell)),
        finals=finals,
        designated_initial=frozenset(nfa.initials),
        nfa_state_count=ell,
        construction_log=tuple(log),
    )
    logger.info(f"Built RI-DFA: {ridfa.state_count} states, interface {ell}, "
                f"{ridfa.transition_count} transitions")
    return ridfa


def _check_states(ridfa: RiDfa, plas: Iterable[StateId]) -> List[StateId]:
    states = list(plas)
    for p in states:
        if not 0 <= p < ridfa.state_count:
            raise InterfaceCorruptionError(f"state {p} is not in the RI-DFA")
    return states


def interface_map(ridfa: RiDfa, plas: Iterable[StateId]) -> InterfaceImage:
    """Singleton states of every NFA state held by the states in `plas`"""
    image = set()
    for p in _check_states(ridfa, plas):
        for q in ridfa.subsets[p]:
            if q >= ridfa.nfa_state_count:
                raise InterfaceCorruptionError(f"state {p} holds NFA state {q} with no singleton")
            image.add(q)
    return frozenset(image)


def interface_map_min(ridfa: RiDfa, plas: Iterable[StateId]) -> InterfaceImage:
    """Interface function of a reduced machine: downgraded singletons go to their delegates"""
    return frozenset(ridfa.delegation.get(q, q) for q in interface_map(ridfa, plas))


def nst(ridfa: RiDfa, plas: Iterable[StateId]) -> FrozenSet[StateId]:
    """Union of the NFA states represented by the states in `plas`"""
    return frozenset().union(*(ridfa.subsets[p] for p in _check_states(ridfa, plas)))


def reduce_interface(ridfa: RiDfa) -> RiDfa:
    """
    Downgrade language-equivalent interface states

    For each class of equivalent interface states the lowest id stays in
    the interface and the others delegate to it; the delegate's content
    absorbs their NFA states. The transition table is shared unchanged.
    """
    interface = set(ridfa.interface)
    delegation = dict(ridfa.delegation)
    content = list(ridfa.content)
    for members in nerode_partition(ridfa):
        initial_members = [p for p in members if p in interface]
        if len(initial_members) < 2:
            continue
        delegate, *downgraded = initial_members
        for source in downgraded:
            delegation[source] = delegate
            interface.discard(source)
            content[delegate] = content[delegate] | ridfa.subsets[source]
        logger.debug(f"States {downgraded} delegate to {delegate}")

    if len(interface) == len(ridfa.interface):
        return ridfa
    logger.info(f"Reduced interface from {len(ridfa.interface)} to {len(interface)} states")
    return replace(
        ridfa,
        content=tuple(content),
        interface=tuple(sorted(interface)),
        delegation=delegation,
    )
