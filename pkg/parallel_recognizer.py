#!/usr/bin/env python3
"""
Speculative data-parallel recognition
Splits a text into chunks, runs every chunk from all possible start states
in parallel (reach phase) and folds the partial mappings serially (join
phase). Supports DFA, NFA and RI-DFA chunk automata and counts every
executed transition.
"""
import logging
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from automata import (NO_TRANSITION, AutomatonError, Dfa, Nfa, StateId,
                      powerset_from)
from ridfa_builder import (InterfaceCorruptionError, RiDfa, build_ridfa,
                           interface_map_min, reduce_interface)
from state_partition import minimize_dfa

logger = logging.getLogger(__name__)

Automaton = Union[Dfa, Nfa, RiDfa]


class Variant(str, Enum):
    DFA = 'dfa'
    NFA = 'nfa'
    RIDFA = 'ridfa'


_VARIANT_KIND = {Variant.DFA: Dfa, Variant.NFA: Nfa, Variant.RIDFA: RiDfa}


class VariantMismatchError(AutomatonError):
    """The automaton kind does not match the requested chunk-automaton variant"""


class JoinError(AutomatonError):
    """The partial mappings of the reach phase cannot be folded consistently"""


class EmptyInputError(AutomatonError):
    """A text of length zero cannot be split into chunks"""


@dataclass(frozen=True)
class ChunkPlan:
    """Half-open [start, end) offsets of consecutive non-empty chunks"""
    bounds: Tuple[Tuple[int, int], ...]

    @property
    def chunk_count(self) -> int:
        return len(self.bounds)

    def sizes(self) -> List[int]:
        return [end - start for start, end in self.bounds]


@dataclass
class ChunkMapping:
    """
    Partial mapping from start states to last active states of one chunk

    Deterministic variants map a start to one state, the NFA variant to a
    frozenset of states. Starts whose run dies are absent.
    """
    entries: Dict[StateId, Union[StateId, FrozenSet[StateId]]] = field(default_factory=dict)
    transitions: int = 0
    runs: int = 0

    @property
    def pis(self) -> FrozenSet[StateId]:
        """Possible initial states: starts whose run survives the chunk"""
        return frozenset(self.entries)

    def image(self, states) -> FrozenSet[StateId]:
        """Union of the end states of every start in `states`"""
        result = set()
        for q in states:
            end = self.entries[q]
            if isinstance(end, frozenset):
                result |= end
            else:
                result.add(end)
        return frozenset(result)


@dataclass(frozen=True)
class JoinStep:
    """One fold of the join: PLAS_i = mapping_i(interface_image & PIS_i)"""
    index: int
    pis: FrozenSet[StateId]
    interface_image: FrozenSet[StateId]
    plas: FrozenSet[StateId]


class RecognitionReport(BaseModel):
    """Verdict, transition counts and phase timings of one recognition"""

    accepted: bool
    variant: Variant
    text_length: int = Field(ge=0)
    chunk_count: int = Field(ge=0)
    per_chunk_transitions: List[int] = Field(default_factory=list)
    total_transitions: int = Field(ge=0)
    per_chunk_runs: List[int] = Field(default_factory=list)
    total_runs: int = Field(ge=0)
    reach_ms: float = 0.0
    join_ms: float = 0.0

    @model_validator(mode='after')
    def check_totals(self):
        if len(self.per_chunk_transitions) != self.chunk_count:
            raise ValueError("one transition count is required per chunk")
        if self.total_transitions != sum(self.per_chunk_transitions):
            raise ValueError("total_transitions must equal the per-chunk sum")
        if self.total_runs != sum(self.per_chunk_runs):
            raise ValueError("total_runs must equal the per-chunk sum")
        return self


def split_chunks(text_length: int, c: int) -> ChunkPlan:
    """
    Near-equal segmentation of a text

    Args:
        text_length: number of symbols, at least 1
        c: requested chunk count; clamped to text_length

    Returns:
        ChunkPlan whose chunk sizes differ by at most one
    """
    if text_length == 0:
        raise EmptyInputError("cannot split an empty text")
    if text_length < 0 or c < 1:
        raise ValueError(f"invalid split of {text_length} symbols into {c} chunks")
    c = min(c, text_length)
    base, extra = divmod(text_length, c)
    bounds = []
    start = 0
    for i in range(c):
        end = start + base + (1 if i < extra else 0)
        bounds.append((start, end))
        start = end
    return ChunkPlan(tuple(bounds))


def _extended_table(delta: np.ndarray) -> np.ndarray:
    """Table with a dead row and a sink column; undefined moves go to the dead row"""
    n, sigma = delta.shape
    extended = np.full((n + 1, sigma + 1), n, dtype=np.int64)
    extended[:n, :sigma] = np.where(delta == NO_TRANSITION, n, delta)
    return extended


def reach_deterministic(table: Union[Dfa, RiDfa], starts, chunk: Sequence[int]) -> ChunkMapping:
    """
    Run a deterministic table from every start over one chunk

    All runs advance together over the chunk; a run leaves the batch at its
    first undefined move and only successful moves are counted.
    """
    start_ids = np.array(sorted(set(starts)), dtype=np.int64)
    n, sigma = table.delta.shape
    if start_ids.size and (start_ids.min() < 0 or start_ids.max() >= n):
        raise JoinError(f"start states {start_ids.tolist()} are not all in the table")
    symbols = np.minimum(np.asarray(chunk, dtype=np.int64), sigma)
    extended = _extended_table(table.delta)

    current = start_ids.copy()
    transitions = 0
    for symbol in symbols:
        current = extended[current, symbol]
        alive = int(np.count_nonzero(current != n))
        transitions += alive
        if alive == 0:
            break

    entries = {int(s): int(e) for s, e in zip(start_ids, current) if e != n}
    return ChunkMapping(entries=entries, transitions=transitions, runs=int(start_ids.size))


def reach_nondeterministic(nfa: Nfa, starts, chunk: Sequence[int]) -> ChunkMapping:
    """
    Frontier simulation of the NFA from each start separately

    Every explored (state, symbol, successor) edge counts as one transition.
    """
    symbols = [int(a) for a in chunk]
    start_ids = sorted(set(starts))
    entries: Dict[StateId, FrozenSet[StateId]] = {}
    transitions = 0
    for q in start_ids:
        if not 0 <= q < nfa.state_count:
            raise JoinError(f"start state {q} is not in the NFA")
        frontier = frozenset([q])
        for symbol in symbols:
            following = set()
            for p in frontier:
                successors = nfa.successors(p, symbol)
                transitions += len(successors)
                following |= successors
            frontier = frozenset(following)
            if not frontier:
                break
        if frontier:
            entries[q] = frontier
    return ChunkMapping(entries=entries, transitions=transitions, runs=len(start_ids))


def _check_kind(automaton: Automaton, variant: Variant) -> Variant:
    variant = Variant(variant)
    expected = _VARIANT_KIND[variant]
    if not isinstance(automaton, expected):
        raise VariantMismatchError(
            f"variant {variant.value} needs a {expected.__name__}, got {type(automaton).__name__}")
    return variant


def designated_starts(automaton: Automaton) -> FrozenSet[StateId]:
    if isinstance(automaton, Dfa):
        return frozenset([automaton.initial])
    if isinstance(automaton, Nfa):
        return automaton.initials
    return automaton.designated_initial


def speculative_starts(automaton: Automaton) -> FrozenSet[StateId]:
    """Start set of every chunk after the first"""
    if isinstance(automaton, Dfa):
        return frozenset(range(automaton.state_count))
    if isinstance(automaton, Nfa):
        return frozenset(range(automaton.state_count))
    return frozenset(automaton.interface)


def _reach(automaton: Automaton, starts, chunk) -> ChunkMapping:
    if isinstance(automaton, Nfa):
        return reach_nondeterministic(automaton, starts, chunk)
    return reach_deterministic(automaton, starts, chunk)


def run_reach_phase(automaton: Automaton, variant: Variant, text: Sequence[int],
                    plan: ChunkPlan, executor: Optional[Executor] = None) -> List[ChunkMapping]:
    """
    Compute the mapping of every chunk, one worker per chunk

    The first chunk starts from the designated initial states, the others
    from the full speculative start set. Results come back in chunk order
    once every worker has finished; a failing worker re-raises here.
    """
    _check_kind(automaton, variant)
    symbols = np.asarray(text, dtype=np.int64)
    first = designated_starts(automaton)
    others = speculative_starts(automaton)
    jobs = [(first if i == 0 else others, symbols[start:end])
            for i, (start, end) in enumerate(plan.bounds)]

    own_executor = executor is None
    if own_executor:
        executor = ThreadPoolExecutor(max_workers=max(1, plan.chunk_count))
    try:
        futures = [executor.submit(_reach, automaton, starts, chunk) for starts, chunk in jobs]
        return [future.result() for future in futures]
    finally:
        if own_executor:
            executor.shutdown(wait=True)


def _checked_image(mapping: ChunkMapping, states, state_count: Optional[int], index: int) -> FrozenSet[StateId]:
    image = mapping.image(states)
    if state_count is not None and any(not 0 <= q < state_count for q in image):
        raise JoinError(f"chunk {index} maps to a state outside the automaton")
    return image


def trace_join_classic(mappings: List[ChunkMapping], first_starts,
                       state_count: Optional[int] = None) -> List[JoinStep]:
    """Fold PLAS_i = mapping_i(PLAS_{i-1} & PIS_i), recording every step"""
    if not mappings:
        raise JoinError("no chunk mappings to join")
    steps: List[JoinStep] = []
    previous = frozenset(first_starts)
    for index, mapping in enumerate(mappings, start=1):
        pis = mapping.pis
        plas = _checked_image(mapping, previous & pis, state_count, index)
        steps.append(JoinStep(index=index, pis=pis, interface_image=previous, plas=plas))
        previous = plas
    return steps


def join_classic(mappings: List[ChunkMapping], first_starts, finals,
                 state_count: Optional[int] = None) -> bool:
    """Accept iff the last PLAS meets the final states"""
    steps = trace_join_classic(mappings, first_starts, state_count)
    return bool(steps[-1].plas & frozenset(finals))


def trace_join_rid(mappings: List[ChunkMapping], ridfa: RiDfa) -> List[JoinStep]:
    """
    Fold PLAS_i = mapping_i(iota(PLAS_{i-1}) & PIS_i) over an RI-DFA

    The interface function follows delegations, so the same fold serves
    reduced and unreduced machines.
    """
    if not mappings:
        raise JoinError("no chunk mappings to join")
    steps: List[JoinStep] = []
    plas = None
    for index, mapping in enumerate(mappings, start=1):
        pis = mapping.pis
        if plas is None:
            image = frozenset(ridfa.designated_initial)
        else:
            try:
                image = interface_map_min(ridfa, plas)
            except InterfaceCorruptionError as e:
                raise JoinError(f"chunk {index - 1}: {e}") from e
        plas = _checked_image(mapping, image & pis, ridfa.state_count, index)
        steps.append(JoinStep(index=index, pis=pis, interface_image=image, plas=plas))
    return steps


def join_rid(mappings: List[ChunkMapping], ridfa: RiDfa) -> bool:
    steps = trace_join_rid(mappings, ridfa)
    return bool(steps[-1].plas & ridfa.finals)


def _finals(automaton: Automaton) -> FrozenSet[StateId]:
    return frozenset(automaton.finals)


def _join(automaton: Automaton, variant: Variant, mappings: List[ChunkMapping]) -> bool:
    if variant is Variant.RIDFA:
        return join_rid(mappings, automaton)
    state_count = automaton.state_count
    return join_classic(mappings, designated_starts(automaton), _finals(automaton), state_count)


def _empty_report(automaton: Automaton, variant: Variant) -> RecognitionReport:
    accepted = bool(designated_starts(automaton) & _finals(automaton))
    return RecognitionReport(accepted=accepted, variant=variant, text_length=0, chunk_count=0,
                             total_transitions=0, total_runs=0)


def _report(variant: Variant, text_length: int, mappings: List[ChunkMapping], accepted: bool,
            reach_ms: float, join_ms: float) -> RecognitionReport:
    per_chunk = [m.transitions for m in mappings]
    runs = [m.runs for m in mappings]
    return RecognitionReport(
        accepted=accepted,
        variant=variant,
        text_length=text_length,
        chunk_count=len(mappings),
        per_chunk_transitions=per_chunk,
        total_transitions=sum(per_chunk),
        per_chunk_runs=runs,
        total_runs=sum(runs),
        reach_ms=reach_ms,
        join_ms=join_ms,
    )


def variant_of(automaton: Automaton) -> Variant:
    for variant, kind in _VARIANT_KIND.items():
        if isinstance(automaton, kind):
            return variant
    raise VariantMismatchError(f"not an automaton: {type(automaton).__name__}")


def recognize_serial(automaton: Automaton, text: Sequence[int]) -> RecognitionReport:
    """
    Single pass over the whole text from the designated initial states

    This is the one-chunk case of the parallel device, executed inline.
    """
    variant = variant_of(automaton)
    n = len(text)
    if n == 0:
        return _empty_report(automaton, variant)
    started = time.perf_counter()
    mapping = _reach(automaton, designated_starts(automaton), text)
    reached = time.perf_counter()
    accepted = _join(automaton, variant, [mapping])
    joined = time.perf_counter()
    return _report(variant, n, [mapping], accepted,
                   (reached - started) * 1000, (joined - reached) * 1000)


def recognize_parallel(automaton: Automaton, variant: Variant, text: Sequence[int], c: int,
                       executor: Optional[Executor] = None) -> RecognitionReport:
    """
    Chunked recognition: concurrent reach phase, then serial join

    Args:
        automaton: chunk automaton whose kind matches `variant`
        variant: dfa, nfa or ridfa
        text: symbol ids (the sink id |alphabet| is allowed)
        c: requested chunk count, clamped to the text length
        executor: optional pool to run the workers on

    Returns:
        RecognitionReport with per-chunk counts and phase timings
    """
    variant = _check_kind(automaton, variant)
    if c < 1:
        raise ValueError(f"chunk count must be at least 1, got {c}")
    n = len(text)
    if n == 0:
        return _empty_report(automaton, variant)

    plan = split_chunks(n, c)
    started = time.perf_counter()
    mappings = run_reach_phase(automaton, variant, text, plan, executor)
    reached = time.perf_counter()
    accepted = _join(automaton, variant, mappings)
    joined = time.perf_counter()

    report = _report(variant, n, mappings, accepted,
                     (reached - started) * 1000, (joined - reached) * 1000)
    logger.debug(f"{variant.value}: {n} symbols, {plan.chunk_count} chunks, "
                 f"{report.total_transitions} transitions, accepted={accepted}")
    return report


def prepare_chunk_automaton(nfa: Nfa, variant: Variant, reduce: bool = True,
                            state_limit: Optional[int] = None, minimize: bool = True) -> Automaton:
    """
    Chunk automaton a variant runs on

    dfa: minimal DFA of the powerset from the NFA initials (the raw powerset
    when minimize is off); nfa: the NFA itself; ridfa: the RI-DFA, with its
    interface reduced unless disabled.
    """
    variant = Variant(variant)
    if variant is Variant.NFA:
        return nfa
    if variant is Variant.DFA:
        if not nfa.initials:
            # no initial state: the empty language
            return Dfa(alphabet=nfa.alphabet,
                       delta=np.full((1, len(nfa.alphabet)), NO_TRANSITION, dtype=np.int32),
                       initial=0, finals=frozenset())
        dfa = powerset_from(nfa, nfa.initials, state_limit)
        return minimize_dfa(dfa) if minimize else dfa
    ridfa = build_ridfa(nfa, state_limit)
    return reduce_interface(ridfa) if reduce else ridfa
