#!/usr/bin/env python3
"""
Tests for benchmark configuration, sweeps and construction statistics
"""
import csv
import json

import pytest

from automaton_formats import save_automaton
from bench_config import ConfigError, SourceConfig, build_bench_config, load_bench_config
from bench_pipeline import (BenchPipeline, build_statistics, collection_statistics,
                            load_source_nfa, summarize_rows)
from export_manager import BenchExportManager

TIMBUK_TEMPLATE = """\
Ops a:1 b:1 init:0
Automaton {name}
States q0 q1 q2
Final States q2
Transitions
init -> q0
a(q0) -> q0
b(q0) -> q0
a(q0) -> q1
a(q1) -> q2
b(q1) -> q2
"""


def _config(tmp_path, **overrides):
    values = {
        'source': {'regexp_family': 3},
        'chunk_counts': [1, 4],
        'texts': {'generated': {'lengths': [64, 128], 'seed': 1}},
        'repetitions': 2,
        'export_dir': str(tmp_path),
        'csv_name': 'bench.csv',
    }
    values.update(overrides)
    return build_bench_config(**values)


def _read_rows(path):
    with open(path, newline='', encoding='utf-8') as f:
        return list(csv.DictReader(f))


###################################################################################################
# Configuration
###################################################################################################

def test_config_defaults(tmp_path):
    config = _config(tmp_path)
    assert config.benchmark_name == 'regexp-k3'
    assert [v.value for v in config.variants] == ['dfa', 'nfa', 'ridfa']
    assert config.reduce_interface
    assert config.texts.generated.mode.value == 'walk'


@pytest.mark.parametrize("overrides", [
    {'source': {'regexp_family': 3, 'regex': 'ab'}},
    {'source': {}},
    {'texts': {}},
    {'chunk_counts': [0, 4]},
    {'chunk_counts': []},
    {'repetitions': 0},
    {'variants': ['lazy-dfa']},
    {'texts': {'generated': {'lengths': [-1]}}},
])
def test_invalid_configs(tmp_path, overrides):
    with pytest.raises(ConfigError):
        _config(tmp_path, **overrides)


def test_load_config_file(tmp_path):
    path = tmp_path / "bench.json"
    path.write_text(json.dumps({
        'benchmark': 'family',
        'source': {'regex': '(a|b)*a(a|b)', 'alphabet_mode': 'custom'},
        'texts': {'generated': {'lengths': [10], 'mode': 'uniform'}},
    }))
    config = load_bench_config(path)
    assert config.benchmark_name == 'family'
    assert config.repetitions == 5
    assert config.chunk_counts == [2, 10, 18, 26, 34, 42, 50, 58, 66]


def test_load_config_rejects_bad_json(tmp_path):
    path = tmp_path / "bench.json"
    path.write_text("[1, 2")
    with pytest.raises(ConfigError):
        load_bench_config(path)
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_bench_config(path)


###################################################################################################
# Sources and statistics
###################################################################################################

def test_load_source_from_regex():
    nfa = load_source_nfa(SourceConfig(regex='(a|b)*a(a|b)', alphabet_mode='custom'))
    assert nfa.state_count == 3


def test_load_source_refuses_non_nfa_documents(tmp_path, sample_parity_dfa):
    path = tmp_path / "dfa.json"
    save_automaton(sample_parity_dfa, path)
    with pytest.raises(ConfigError):
        load_source_nfa(SourceConfig(automaton=str(path)))


def test_build_statistics_examples(sample_chunking_nfa, sample_delegation_nfa):
    stats = build_statistics(sample_chunking_nfa)
    assert (stats['nfa_states'], stats['min_dfa_states'], stats['ridfa_states']) == (3, 4, 5)
    assert (stats['interface_before'], stats['interface_after']) == (3, 3)
    assert not stats['overflow']

    stats = build_statistics(sample_delegation_nfa)
    assert stats['ridfa_states'] == 8
    assert (stats['interface_before'], stats['interface_after']) == (4, 3)
    assert stats['ridfa'].delegation == {3: 1}
    assert not stats['ridfa_unreduced'].is_reduced


def test_build_statistics_overflow(sample_delegation_nfa):
    stats = build_statistics(sample_delegation_nfa, state_limit=5)
    assert stats['overflow']
    assert stats['ridfa'] is None


def test_collection_statistics(tmp_path):
    (tmp_path / "good.timbuk").write_text(TIMBUK_TEMPLATE.format(name='good'))
    (tmp_path / "tree.timbuk").write_text("Ops f:2\nAutomaton t\n")
    results = collection_statistics([str(tmp_path)])
    assert not results['success']
    assert len(results['rows']) == 1
    assert len(results['errors']) == 1
    row = results['rows'][0]
    assert row['automaton'] == 'good.timbuk'
    assert row['nfa_states'] == 3
    assert row['min_dfa_states'] == 4
    assert row['interface_before'] == 3


def test_collection_statistics_records_overflow(tmp_path):
    path = tmp_path / "good.timbuk"
    path.write_text(TIMBUK_TEMPLATE.format(name='good'))
    results = collection_statistics([str(path)], state_limit=2)
    assert results['success']
    assert results['rows'][0]['overflow'] is True


###################################################################################################
# Sweeps
###################################################################################################

def test_add_ratios():
    rows = [
        {'benchmark': 'b', 'chunks': 2, 'text_length': 6, 'text_source': 't',
         'variant': 'dfa', 'transitions_total': 15},
        {'benchmark': 'b', 'chunks': 2, 'text_length': 6, 'text_source': 't',
         'variant': 'nfa', 'transitions_total': 14},
        {'benchmark': 'b', 'chunks': 2, 'text_length': 6, 'text_source': 't',
         'variant': 'ridfa', 'transitions_total': 9},
        {'benchmark': 'b', 'chunks': 4, 'text_length': 6, 'text_source': 't',
         'variant': 'dfa', 'transitions_total': 20, 'ratio_dfa_rid': ''},
    ]
    BenchPipeline.add_ratios(rows)
    assert rows[0]['ratio_dfa_rid'] == round(15 / 9, 6)
    assert rows[2]['ratio_nfa_rid'] == round(14 / 9, 6)
    assert rows[3]['ratio_dfa_rid'] == ''


def test_run_sweep_writes_valid_csv(tmp_path):
    results = BenchPipeline(_config(tmp_path)).run_sweep()
    assert results['success'], results['errors']
    assert len(results['rows']) == 2 * 2 * 3
    rows = _read_rows(results['csv_path'])
    assert list(rows[0].keys()) == BenchExportManager.BENCH_COLUMNS
    assert results['warnings'] == []
    validation = BenchExportManager(str(tmp_path)).validate_export(rows)
    assert validation['valid']
    assert validation['warnings'] == []
    accepted = {(row['text_length'], row['chunks']): set() for row in rows}
    for row in rows:
        accepted[(row['text_length'], row['chunks'])].add(row['accepted'])
    assert all(len(verdicts) == 1 for verdicts in accepted.values())
    assert summarize_rows(results['rows'])['rows'] == 12


def test_sweep_rows_are_reproducible(tmp_path):
    first = BenchPipeline(_config(tmp_path / "one")).run_sweep()
    second = BenchPipeline(_config(tmp_path / "two")).run_sweep()
    timing = set(BenchExportManager.TIMING_COLUMNS)

    def stable(path):
        return [{k: v for k, v in row.items() if k not in timing} for row in _read_rows(path)]

    assert stable(first['csv_path']) == stable(second['csv_path'])


def test_sweep_over_text_files(tmp_path):
    text = tmp_path / "input.txt"
    text.write_bytes(b"abab" * 50)
    config = _config(tmp_path, texts={'files': [str(text)]}, chunk_counts=[3], repetitions=1)
    results = BenchPipeline(config).run_sweep()
    assert results['success']
    assert {row['text_source'] for row in results['rows']} == {'input.txt'}
    assert all(row['text_length'] == 200 for row in results['rows'])


def test_sweep_setup_failure_is_reported(tmp_path):
    text = tmp_path / "input.txt"
    text.write_bytes(b"abz")
    config = _config(tmp_path, texts={'files': [str(text)]})
    results = BenchPipeline(config).run_sweep()
    assert not results['success']
    assert results['rows'] == []
    assert results['csv_path'] is None
    assert results['errors']


def test_sink_policy_lets_foreign_bytes_through(tmp_path):
    text = tmp_path / "input.txt"
    text.write_bytes(b"abzab")
    config = _config(tmp_path, texts={'files': [str(text)]}, sink_foreign=True,
                     chunk_counts=[2], repetitions=1)
    results = BenchPipeline(config).run_sweep()
    assert results['success']
    assert not any(row['accepted'] for row in results['rows'])


def test_ratio_trend_on_family_k8(tmp_path):
    """ (a|b)*a(a|b)^8 with 32 chunks: the RI-DFA wins by a stable factor over growing texts """
    config = _config(tmp_path, source={'regexp_family': 8}, chunk_counts=[32], repetitions=1,
                     texts={'generated': {'lengths': [4096, 8192, 16384], 'seed': 0}})
    results = BenchPipeline(config).run_sweep()
    assert results['success'], results['errors']
    rid_rows = [row for row in results['rows'] if row['variant'] == 'ridfa']
    assert len(rid_rows) == 3
    for column, floor in (('ratio_dfa_rid', 10), ('ratio_nfa_rid', 1)):
        values = [row[column] for row in rid_rows]
        assert min(values) > floor
        assert (max(values) - min(values)) / max(values) < 0.2


def test_sweep_reports_ratio_warnings_and_still_exports(tmp_path, monkeypatch):
    def skewed_ratios(rows):
        for row in rows:
            row['ratio_dfa_rid'] = 1.0
        return rows

    monkeypatch.setattr(BenchPipeline, 'add_ratios', staticmethod(skewed_ratios))
    results = BenchPipeline(_config(tmp_path, chunk_counts=[2], repetitions=1)).run_sweep()
    assert results['success']
    assert results['csv_path'] is not None
    assert any('ratio_dfa_rid=1.0' in warning for warning in results['warnings'])


def test_sweep_with_incomplete_rows_is_not_exported(tmp_path, monkeypatch):
    original = BenchPipeline.run_cell

    def without_timing(self, *args, **kwargs):
        row = original(self, *args, **kwargs)
        del row['join_ms']
        return row

    monkeypatch.setattr(BenchPipeline, 'run_cell', without_timing)
    results = BenchPipeline(_config(tmp_path, chunk_counts=[2], repetitions=1)).run_sweep()
    assert not results['success']
    assert results['csv_path'] is None
    assert len(results['rows']) == 2 * 3
    assert any('join_ms' in error for error in results['errors'])
    assert not (tmp_path / "bench.csv").exists()
