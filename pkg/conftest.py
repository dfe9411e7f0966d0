#!/usr/bin/env python3
"""
Shared pytest fixtures
"""
from concurrent.futures import ThreadPoolExecutor

import pytest

from automata_samples import chunking_nfa, delegation_nfa, parity_dfa


@pytest.fixture
def sample_chunking_nfa():
    return chunking_nfa()


@pytest.fixture
def sample_parity_dfa():
    return parity_dfa()


@pytest.fixture
def sample_delegation_nfa():
    return delegation_nfa()


@pytest.fixture(scope="module")
def executor():
    """One worker pool reused by every recognition in a test module"""
    with ThreadPoolExecutor(max_workers=8) as pool:
        yield pool
