#!/usr/bin/env python3
"""
Export Manager for benchmark results
Writes plot-ready CSV series and collection statistics
"""
import csv
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class BenchExportManager:
    """Export benchmark and statistics rows into an export directory"""

    # One row per (benchmark, variant, chunks, text) cell
    BENCH_COLUMNS = [
        'benchmark',
        'variant',
        'chunks',
        'text_length',
        'text_source',
        'transitions_total',
        'transitions_per_chunk',
        'runs_total',
        'accepted',
        'reach_ms',
        'join_ms',
        'ratio_dfa_rid',
        'ratio_nfa_rid',
    ]

    # Columns that change between identical runs
    TIMING_COLUMNS = ['reach_ms', 'join_ms']

    STATS_COLUMNS = [
        'automaton',
        'nfa_states',
        'min_dfa_states',
        'ridfa_states',
        'interface_before',
        'interface_after',
        'dfa_ms',
        'ridfa_ms',
        'overflow',
    ]

    def __init__(self, export_dir: str = "exports"):
        self.export_dir = Path(export_dir)
        self.export_dir.mkdir(parents=True, exist_ok=True)

    def _target(self, filename: Optional[str], prefix: str, suffix: str) -> Path:
        if not filename:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"{prefix}_{timestamp}{suffix}"
        return self.export_dir / filename

    def _write_csv(self, filepath: Path, columns: List[str], rows: List[Dict[str, Any]]) -> str:
        with open(filepath, 'w', newline='', encoding='utf-8') as csvfile:
            writer = csv.DictWriter(csvfile, fieldnames=columns, extrasaction='ignore')
            writer.writeheader()
            writer.writerows(rows)
        logger.info(f"Exported {len(rows)} rows to {filepath}")
        return str(filepath)

    def export_bench_rows(self, rows: List[Dict[str, Any]], filename: str = None) -> str:
        """
        Write sweep rows as CSV

        Args:
            rows: one dict per benchmark cell, keyed by BENCH_COLUMNS
            filename: optional file name inside the export directory

        Returns:
            Path to the CSV file
        """
        return self._write_csv(self._target(filename, 'bench', '.csv'), self.BENCH_COLUMNS, rows)

    def export_stats_rows(self, rows: List[Dict[str, Any]], filename: str = None) -> str:
        """Write one construction-statistics row per automaton"""
        return self._write_csv(self._target(filename, 'stats', '.csv'), self.STATS_COLUMNS, rows)

    def validate_export(self, rows: List[Dict[str, Any]]) -> Dict[str, Any]:
        """
        Check sweep rows before export

        Returns:
            Validation result with missing columns and ratio warnings
        """
        validation = {
            'valid': True,
            'missing_required': [],
            'warnings': []
        }
        if not rows:
            validation['missing_required'].append('rows')
            validation['valid'] = False
            return validation

        for i, row in enumerate(rows):
            missing = [column for column in self.BENCH_COLUMNS if column not in row]
            if missing:
                validation['missing_required'].append(f"Row {i+1}: {', '.join(missing)}")
                validation['valid'] = False
                continue
            per_chunk = [int(x) for x in str(row['transitions_per_chunk']).split(';') if x != '']
            if sum(per_chunk) != int(row['transitions_total']):
                validation['warnings'].append(f"Row {i+1}: per-chunk transitions do not add up")

        for issue in self._ratio_issues(rows):
            validation['warnings'].append(issue)
        return validation

    def _ratio_issues(self, rows: List[Dict[str, Any]]) -> List[str]:
        """Ratios must be recomputable from the raw totals of their group"""
        issues = []
        groups: Dict[tuple, Dict[str, int]] = {}
        for row in rows:
            key = (row['benchmark'], str(row['chunks']), str(row['text_length']), row['text_source'])
            groups.setdefault(key, {})[row['variant']] = int(row['transitions_total'])
        for row in rows:
            key = (row['benchmark'], str(row['chunks']), str(row['text_length']), row['text_source'])
            totals = groups[key]
            for column, other in (('ratio_dfa_rid', 'dfa'), ('ratio_nfa_rid', 'nfa')):
                value = row.get(column)
                if value in (None, ''):
                    continue
                rid = totals.get('ridfa')
                if not rid or other not in totals:
                    issues.append(f"{key}: {column} has no raw totals to check against")
                elif abs(float(value) - totals[other] / rid) > 1e-6:
                    issues.append(f"{key}: {column}={value} but raw totals give {totals[other] / rid}")
        return issues

    def get_export_summary(self, filepath: str) -> Dict[str, Any]:
        """Get summary of an exported sweep file"""
        try:
            with open(filepath, 'r', encoding='utf-8') as csvfile:
                rows = list(csv.DictReader(csvfile))
        except OSError as e:
            return {'error': str(e)}

        variants: Dict[str, Dict[str, int]] = {}
        for row in rows:
            entry = variants.setdefault(row.get('variant', ''), {'rows': 0, 'accepted': 0, 'transitions': 0})
            entry['rows'] += 1
            entry['accepted'] += row.get('accepted') == 'True'
            entry['transitions'] += int(row.get('transitions_total') or 0)
        return {
            'file': filepath,
            'total_rows': len(rows),
            'benchmarks': sorted({row.get('benchmark', '') for row in rows}),
            'variants': variants,
        }
