#!/usr/bin/env python3
"""
Benchmark Pipeline
Connects machine preparation, text sources, chunked recognition and CSV export
"""
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from automata import AutomatonError, Nfa, StateLimitExceeded
from automaton_formats import load_automaton, load_text, load_timbuk
from bench_config import BenchConfig, ConfigError, SourceConfig, load_bench_config
from export_manager import BenchExportManager
from parallel_recognizer import Variant, prepare_chunk_automaton, recognize_parallel
from regex_parser import implied_alphabet, parse_regex, regex_to_nfa, regexp_family_pattern
from ridfa_builder import build_ridfa, reduce_interface
from text_generator import gen_text

logger = logging.getLogger(__name__)


class InconsistentCountsError(AutomatonError):
    """Repetitions of one cell executed different numbers of transitions"""


def load_source_nfa(source: SourceConfig) -> Nfa:
    """
    NFA named by a source: a pattern, a regexp-family member, a Timbuk file
    or an NFA document
    """
    if source.regex is not None or source.regexp_family is not None:
        pattern = source.regex if source.regex is not None else regexp_family_pattern(source.regexp_family)
        ast = parse_regex(pattern, source.alphabet_mode)
        return regex_to_nfa(ast, implied_alphabet(ast, source.alphabet_mode))
    if source.timbuk is not None:
        return load_timbuk(source.timbuk)
    machine = load_automaton(source.automaton)
    if not isinstance(machine, Nfa):
        raise ConfigError(f"{source.automaton} holds a {type(machine).__name__}, an NFA document is needed")
    return machine


def build_statistics(nfa: Nfa, state_limit: Optional[int] = None) -> Dict[str, Any]:
    """
    Construction statistics of one NFA

    Returns:
        Dict with state counts, interface sizes, durations in ms, the
        machines themselves (None on overflow) and an overflow flag
    """
    stats: Dict[str, Any] = {
        'nfa_states': nfa.state_count,
        'min_dfa_states': None,
        'ridfa_states': None,
        'interface_before': None,
        'interface_after': None,
        'dfa_ms': None,
        'ridfa_ms': None,
        'overflow': False,
        'dfa': None,
        'ridfa': None,
        'ridfa_unreduced': None,
    }
    try:
        started = time.perf_counter()
        dfa = prepare_chunk_automaton(nfa, Variant.DFA, state_limit=state_limit)
        stats['dfa_ms'] = round((time.perf_counter() - started) * 1000, 3)
        stats['min_dfa_states'] = dfa.state_count
        stats['dfa'] = dfa

        started = time.perf_counter()
        ridfa = build_ridfa(nfa, state_limit)
        reduced = reduce_interface(ridfa)
        stats['ridfa_ms'] = round((time.perf_counter() - started) * 1000, 3)
        stats['ridfa_states'] = ridfa.state_count
        stats['interface_before'] = len(ridfa.interface)
        stats['interface_after'] = len(reduced.interface)
        stats['ridfa'] = reduced
        stats['ridfa_unreduced'] = ridfa
    except StateLimitExceeded as e:
        logger.warning(f"Construction overflow: {e}")
        stats['overflow'] = True
    return stats


class BenchPipeline:
    """Sweep of chunked recognitions over variants, chunk counts and texts"""

    def __init__(self, config: BenchConfig):
        self.config = config
        self.export_manager = BenchExportManager(config.export_dir)
        self.machines: Dict[Variant, Any] = {}
        self.nfa: Optional[Nfa] = None

    def prepare_machines(self) -> Dict[Variant, Any]:
        """Build the chunk automaton of every configured variant"""
        self.nfa = load_source_nfa(self.config.source)
        logger.info(f"Benchmark {self.config.benchmark_name}: NFA with {self.nfa.state_count} states")
        for variant in self.config.variants:
            self.machines[variant] = prepare_chunk_automaton(
                self.nfa, variant, reduce=self.config.reduce_interface,
                state_limit=self.config.state_limit)
        return self.machines

    def build_texts(self) -> List[Tuple[str, np.ndarray]]:
        """Load file texts and generate seeded texts, labelled by source"""
        if self.nfa is None:
            self.prepare_machines()
        texts = []
        policy = 'sink' if self.config.sink_foreign else 'strict'
        for path in self.config.texts.files:
            texts.append((Path(path).name, load_text(path, self.nfa.alphabet, policy)))
        generated = self.config.texts.generated
        if generated is not None:
            walk_machine = self.machines.get(Variant.DFA) or self.nfa
            for length in generated.lengths:
                text = gen_text(generated.mode, length, generated.seed, walk_machine)
                texts.append((f"{generated.mode.value}:{generated.seed}", text))
        return texts

    def run_cell(self, variant: Variant, text: np.ndarray, chunks: int,
                 executor: Optional[ThreadPoolExecutor] = None) -> Dict[str, Any]:
        """
        Repeat one recognition and summarize it as a CSV row

        Timings are medians over the repetitions; transition counts must be
        identical in every repetition.
        """
        machine = self.machines[variant]
        reports = [recognize_parallel(machine, variant, text, chunks, executor)
                   for _ in range(self.config.repetitions)]
        first = reports[0]
        for report in reports[1:]:
            if (report.per_chunk_transitions != first.per_chunk_transitions
                    or report.accepted != first.accepted):
                raise InconsistentCountsError(
                    f"{variant.value} c={chunks}: repetitions disagree on transition counts")
        return {
            'benchmark': self.config.benchmark_name,
            'variant': variant.value,
            'chunks': chunks,
            'text_length': first.text_length,
            'transitions_total': first.total_transitions,
            'transitions_per_chunk': ';'.join(str(t) for t in first.per_chunk_transitions),
            'runs_total': first.total_runs,
            'accepted': first.accepted,
            'reach_ms': round(float(np.median([r.reach_ms for r in reports])), 3),
            'join_ms': round(float(np.median([r.join_ms for r in reports])), 3),
            'ratio_dfa_rid': '',
            'ratio_nfa_rid': '',
        }

    @staticmethod
    def add_ratios(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        """Fill DFA/RID and NFA/RID transition ratios per (benchmark, chunks, text) group"""
        groups: Dict[tuple, Dict[str, int]] = {}
        for row in rows:
            key = (row['benchmark'], row['chunks'], row['text_length'], row['text_source'])
            groups.setdefault(key, {})[row['variant']] = row['transitions_total']
        for row in rows:
            totals = groups[(row['benchmark'], row['chunks'], row['text_length'], row['text_source'])]
            rid = totals.get(Variant.RIDFA.value)
            if not rid:
                continue
            if Variant.DFA.value in totals:
                row['ratio_dfa_rid'] = round(totals[Variant.DFA.value] / rid, 6)
            if Variant.NFA.value in totals:
                row['ratio_nfa_rid'] = round(totals[Variant.NFA.value] / rid, 6)
        return rows

    def run_sweep(self) -> Dict[str, Any]:
        """Run every cell of the sweep and export the CSV series"""
        results = {
            'success': False,
            'benchmark': self.config.benchmark_name,
            'rows': [],
            'errors': [],
            'csv_path': None,
            'warnings': [],
        }
        try:
            self.prepare_machines()
            texts = self.build_texts()
        except (AutomatonError, OSError) as e:
            logger.error(f"Benchmark setup failed: {e}")
            results['errors'].append(str(e))
            return results

        workers = max(1, max(self.config.chunk_counts))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for text_source, text in texts:
                for chunks in self.config.chunk_counts:
                    for variant in self.config.variants:
                        try:
                            row = self.run_cell(variant, text, chunks, executor)
                            row['text_source'] = text_source
                            results['rows'].append(row)
                        except Exception as e:
                            logger.error(f"Cell {variant.value} c={chunks} "
                                         f"len={len(text)} failed: {e}")
                            results['errors'].append(
                                f"{variant.value} c={chunks} {text_source} len={len(text)}: {e}")
                logger.info(f"Finished text {text_source} ({len(text)} symbols)")

        self.add_ratios(results['rows'])
        if results['rows']:
            # Validate before export
            validation = self.export_manager.validate_export(results['rows'])
            results['warnings'] = validation['warnings']
            for warning in validation['warnings']:
                logger.warning(f"Sweep rows: {warning}")
            if validation['valid']:
                results['csv_path'] = self.export_manager.export_bench_rows(
                    results['rows'], self.config.csv_name)
            else:
                results['errors'].append(
                    f"Invalid sweep rows: missing {', '.join(validation['missing_required'])}")
        results['success'] = not results['errors']
        return results


def collection_statistics(paths: List[str], state_limit: Optional[int] = None) -> Dict[str, Any]:
    """
    Construction statistics over Timbuk files and directories of them

    Returns:
        Result dict with one row per loaded automaton and the load errors
    """
    results = {'success': True, 'rows': [], 'errors': []}
    files: List[Path] = []
    for path in paths:
        path = Path(path)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.is_file()))
        else:
            files.append(path)

    for path in files:
        try:
            nfa = load_timbuk(path)
        except (AutomatonError, OSError, UnicodeDecodeError) as e:
            logger.warning(f"Skipping {path}: {e}")
            results['errors'].append(f"{path}: {e}")
            continue
        stats = build_statistics(nfa, state_limit)
        row = {key: stats[key] for key in BenchExportManager.STATS_COLUMNS if key in stats}
        row['automaton'] = path.name
        results['rows'].append(row)

    reduced = sum(1 for row in results['rows']
                  if row['interface_after'] is not None and row['interface_after'] < row['interface_before'])
    logger.info(f"Collection: {len(results['rows'])} automata, {reduced} with a reduced interface, "
                f"{len(results['errors'])} skipped")
    results['success'] = not results['errors']
    return results


def summarize_rows(rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Mean ratio columns over a sweep, for the console summary"""
    summary = {'rows': len(rows)}
    for column in ('ratio_dfa_rid', 'ratio_nfa_rid'):
        values = [row[column] for row in rows if row.get(column) not in (None, '')]
        if values:
            summary[f"mean_{column}"] = round(float(np.mean(values)), 3)
    return summary


if __name__ == "__main__":
    import sys

    logging.basicConfig(level=logging.INFO,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    if len(sys.argv) > 1:
        config = load_bench_config(sys.argv[1])
        results = BenchPipeline(config).run_sweep()
        print(json.dumps({'csv_path': results['csv_path'], 'errors': results['errors'],
                          **summarize_rows(results['rows'])}, indent=2))
    else:
        print("Usage: python bench_pipeline.py CONFIG.json")
