#!/usr/bin/env python3
"""
Language-equivalence partitioning and DFA minimization over dense tables
"""
import logging
from collections import deque
from typing import Dict, List, Tuple

import numpy as np

from automata import NO_TRANSITION, Dfa

logger = logging.getLogger(__name__)


def _refine_blocks(delta: np.ndarray, finals) -> np.ndarray:
    """
    Moore refinement over the table extended with a virtual dead state

    Returns one block id per state; index `len(delta)` is the dead state.
    The dead state starts in the non-final block, so states with an empty
    suffix language end up in its block.
    """
    n = delta.shape[0]
    dead = n
    extended = np.where(delta == NO_TRANSITION, dead, delta).astype(np.int64)
    extended = np.vstack([extended, np.full((1, delta.shape[1]), dead, dtype=np.int64)])

    blocks = np.zeros(n + 1, dtype=np.int64)
    for q in finals:
        blocks[q] = 1
    _, blocks = np.unique(blocks, return_inverse=True)
    blocks = blocks.reshape(-1)
    block_count = int(blocks.max()) + 1

    while True:
        signature = np.column_stack([blocks, blocks[extended]]) if extended.shape[1] else blocks[:, None]
        _, refined = np.unique(signature, axis=0, return_inverse=True)
        refined = refined.reshape(-1)
        refined_count = int(refined.max()) + 1
        blocks = refined
        if refined_count == block_count:
            return blocks
        block_count = refined_count


def nerode_partition(machine) -> List[Tuple[int, ...]]:
    """
    Partition the states of a deterministic table into language-equivalence classes

    Args:
        machine: anything with a dense `delta` table and a `finals` set
                 (a Dfa or an RiDfa)

    Returns:
        Classes as sorted tuples of state ids, ordered by their lowest member
    """
    delta = np.asarray(machine.delta)
    blocks = _refine_blocks(delta, machine.finals)
    n = delta.shape[0]
    grouped: Dict[int, List[int]] = {}
    for q in range(n):
        grouped.setdefault(int(blocks[q]), []).append(q)
    classes = sorted((tuple(members) for members in grouped.values()), key=lambda c: c[0])
    logger.debug(f"Partitioned {n} states into {len(classes)} classes")
    return classes


def _reachable(dfa: Dfa) -> List[bool]:
    seen = [False] * dfa.state_count
    seen[dfa.initial] = True
    queue = deque([dfa.initial])
    while queue:
        q = queue.popleft()
        for target in dfa.delta[q]:
            if target != NO_TRANSITION and not seen[target]:
                seen[target] = True
                queue.append(int(target))
    return seen


def minimize_dfa(dfa: Dfa) -> Dfa:
    """
    Minimal partial DFA for the language of `dfa`

    Unreachable states and states equivalent to the dead state are dropped,
    each class is represented by its lowest state id, and the result is
    renumbered breadth-first from the initial state. The dead state is never
    materialized; origin is not carried over.
    """
    sigma = len(dfa.alphabet)
    blocks = _refine_blocks(dfa.delta, dfa.finals)
    dead_block = int(blocks[dfa.state_count])
    reachable = _reachable(dfa)

    if blocks[dfa.initial] == dead_block:
        logger.info("Minimized DFA accepts nothing; collapsing to one state")
        return Dfa(alphabet=dfa.alphabet,
                   delta=np.full((1, sigma), NO_TRANSITION, dtype=np.int32),
                   initial=0, finals=frozenset())

    representative: Dict[int, int] = {}
    for q in range(dfa.state_count):
        if reachable[q] and blocks[q] != dead_block:
            representative.setdefault(int(blocks[q]), q)

    numbering: Dict[int, int] = {int(blocks[dfa.initial]): 0}
    order = [int(blocks[dfa.initial])]
    rows: List[List[int]] = []
    cursor = 0
    while cursor < len(order):
        source = representative[order[cursor]]
        cursor += 1
        row = []
        for a in range(sigma):
            target = int(dfa.delta[source, a])
            if target == NO_TRANSITION or blocks[target] == dead_block:
                row.append(NO_TRANSITION)
                continue
            block = int(blocks[target])
            if block not in numbering:
                numbering[block] = len(order)
                order.append(block)
            row.append(numbering[block])
        rows.append(row)

    finals = frozenset(numbering[block] for block in order
                       if representative[block] in dfa.finals)
    logger.info(f"Minimized DFA from {dfa.state_count} to {len(order)} states")
    return Dfa(alphabet=dfa.alphabet,
               delta=np.array(rows, dtype=np.int32).reshape(len(order), sigma),
               initial=0, finals=finals)
