#!/usr/bin/env python3
"""
Chunked Recognizer - Command Line Version
Build chunk automata, recognize texts, run benchmark sweeps and collect
construction statistics
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from automata import AutomatonError
from automaton_formats import load_automaton, load_text, save_automaton, save_report
from bench_config import (DEFAULT_CHUNK_COUNTS, DEFAULT_EXPORT_DIR, DEFAULT_REPETITIONS,
                          DEFAULT_SEED, ConfigError, SourceConfig, build_bench_config,
                          load_bench_config)
from bench_pipeline import (BenchPipeline, build_statistics, collection_statistics,
                            load_source_nfa, summarize_rows)
from export_manager import BenchExportManager
from parallel_recognizer import (Variant, prepare_chunk_automaton, recognize_parallel,
                                 variant_of)
from text_generator import TextMode, gen_text

logger = logging.getLogger(__name__)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

_SOURCE_FLAGS = ('re', 'regexp_family', 'timbuk', 'automaton')


def _int_list(value: str) -> List[int]:
    try:
        return [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def _source_config(args) -> SourceConfig:
    values = {
        'regex': args.re,
        'regexp_family': args.regexp_family,
        'timbuk': args.timbuk,
        'automaton': args.automaton,
        'alphabet_mode': args.alphabet_mode,
    }
    try:
        return SourceConfig(**values)
    except ValueError as e:
        raise ConfigError(f"invalid source: {e}") from e


def _add_source_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('machine source (exactly one)')
    group.add_argument("--re", help="regular expression")
    group.add_argument("--regexp-family", type=int, metavar="K",
                       help="member K of the (a|b)*a(a|b)^K family")
    group.add_argument("--timbuk", help="Timbuk word-automaton file")
    group.add_argument("--automaton", help="automaton JSON document")
    parser.add_argument("--alphabet-mode", choices=['bytes', 'custom'], default='bytes',
                        help="symbol universe of patterns (default: bytes)")
    parser.add_argument("--state-limit", type=int, default=None,
                        help="abort constructions that exceed this many states")
    parser.add_argument("--reduce-interface", action=argparse.BooleanOptionalAction, default=True,
                        help="downgrade equivalent RI-DFA interface states (default: on)")


def _public_stats(stats: dict) -> dict:
    return {key: value for key, value in stats.items() if key not in ('dfa', 'ridfa', 'ridfa_unreduced')}


def cmd_build(args) -> int:
    """Write nfa.json, dfa.json and ridfa.json and print construction statistics"""
    nfa = load_source_nfa(_source_config(args))
    stats = build_statistics(nfa, args.state_limit)
    if stats['overflow']:
        print(json.dumps(_public_stats(stats), indent=2))
        logger.error(f"Construction exceeded the state limit of {args.state_limit}")
        return EXIT_USAGE

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ridfa = stats['ridfa'] if args.reduce_interface else stats['ridfa_unreduced']
    dfa = stats['dfa']
    if not args.minimize:
        dfa = prepare_chunk_automaton(nfa, Variant.DFA, state_limit=args.state_limit, minimize=False)
    save_automaton(nfa, out_dir / "nfa.json")
    save_automaton(dfa, out_dir / "dfa.json")
    save_automaton(ridfa, out_dir / "ridfa.json")
    print(json.dumps({**_public_stats(stats), 'dfa_states': dfa.state_count}, indent=2))
    return EXIT_ACCEPT


def cmd_recognize(args) -> int:
    """Recognize one text and print the report; exit 0 on accept, 1 on reject"""
    if args.automaton is not None and not any(getattr(args, flag) is not None for flag in _SOURCE_FLAGS[:3]):
        machine = load_automaton(args.automaton)
        variant = Variant(args.variant) if args.variant else variant_of(machine)
    else:
        nfa = load_source_nfa(_source_config(args))
        variant = Variant(args.variant or Variant.RIDFA.value)
        machine = prepare_chunk_automaton(nfa, variant, reduce=args.reduce_interface,
                                          state_limit=args.state_limit)
    logger.info(f"Effective alphabet: {''.join(str(s) for s in machine.alphabet.symbols)!r}")

    if args.text is not None:
        text = load_text(args.text, machine.alphabet, 'sink' if args.sink_foreign else 'strict')
    else:
        text = gen_text(args.gen, args.len, args.seed, machine)

    report = recognize_parallel(machine, variant, text, args.chunks)
    if args.out:
        save_report(report, args.out)
    print(report.model_dump_json(indent=2))
    return EXIT_ACCEPT if report.accepted else EXIT_REJECT


def cmd_bench(args) -> int:
    """Run a benchmark sweep from --config or from flags"""
    if args.config:
        config = load_bench_config(args.config)
    else:
        generated = None
        if args.gen:
            generated = {'mode': args.gen, 'lengths': args.len or [], 'seed': args.seed}
        config = build_bench_config(
            source=_source_config(args).model_dump(),
            variants=args.variant or list(Variant),
            chunk_counts=args.chunks,
            texts={'files': args.text or [], 'generated': generated},
            repetitions=args.reps,
            reduce_interface=args.reduce_interface,
            sink_foreign=args.sink_foreign,
            state_limit=args.state_limit,
            export_dir=args.out,
            csv_name=args.csv,
        )
    results = BenchPipeline(config).run_sweep()
    output = {'csv_path': results['csv_path'], 'errors': results['errors'],
              'warnings': results['warnings'], **summarize_rows(results['rows'])}
    if results['csv_path']:
        output['export'] = BenchExportManager(config.export_dir).get_export_summary(results['csv_path'])
    print(json.dumps(output, indent=2))
    if not results['rows'] and results['errors']:
        return EXIT_USAGE
    return EXIT_ACCEPT if results['success'] else EXIT_INTERNAL


def cmd_stats(args) -> int:
    """Construction statistics for Timbuk files and directories"""
    results = collection_statistics(args.paths, args.state_limit)
    csv_path = None
    if results['rows']:
        csv_path = BenchExportManager(args.out).export_stats_rows(results['rows'], args.csv)
    print(json.dumps({'csv_path': csv_path, 'automata': len(results['rows']),
                      'errors': results['errors']}, indent=2))
    return EXIT_ACCEPT if results['success'] else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Speculative chunked recognition with DFA, NFA and RI-DFA chunk automata")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="build and save the NFA, minimal DFA and RI-DFA")
    _add_source_flags(build)
    build.add_argument("--minimize", action=argparse.BooleanOptionalAction, default=True,
                       help="save the minimal DFA rather than the raw powerset (default: on)")
    build.add_argument("-o", "--out", default="automata", help="output directory (default: automata)")
    build.set_defaults(handler=cmd_build)

    recognize = commands.add_parser("recognize", help="recognize one text")
    _add_source_flags(recognize)
    recognize.add_argument("--variant", choices=[v.value for v in Variant],
                           help="chunk automaton (default: kind of --automaton, else ridfa)")
    recognize.add_argument("--chunks", type=_positive_int, default=1, help="number of chunks (default: 1)")
    texts = recognize.add_mutually_exclusive_group(required=True)
    texts.add_argument("--text", help="text file")
    texts.add_argument("--gen", choices=[m.value for m in TextMode], help="generate the text")
    recognize.add_argument("--len", type=int, default=1024, help="generated text length (default: 1024)")
    recognize.add_argument("--seed", type=int, default=DEFAULT_SEED, help="generator seed")
    recognize.add_argument("--sink-foreign", action="store_true",
                           help="map bytes outside the alphabet to a rejecting sink symbol")
    recognize.add_argument("-o", "--out", help="also save the report as JSON")
    recognize.set_defaults(handler=cmd_recognize)

    bench = commands.add_parser("bench", help="run a benchmark sweep and write CSV")
    _add_source_flags(bench)
    bench.add_argument("--config", help="JSON benchmark configuration (overrides the flags)")
    bench.add_argument("--variant", action="append", choices=[v.value for v in Variant],
                       help="variant to run, repeatable (default: all)")
    bench.add_argument("--chunks", type=_int_list, default=list(DEFAULT_CHUNK_COUNTS),
                       help="comma-separated chunk counts (default: 2,10,...,66)")
    bench.add_argument("--text", action="append", help="text file, repeatable")
    bench.add_argument("--gen", choices=[m.value for m in TextMode], help="generate texts")
    bench.add_argument("--len", type=_int_list, help="comma-separated generated text lengths")
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED, help="generator seed")
    bench.add_argument("--reps", type=_positive_int, default=DEFAULT_REPETITIONS, help="repetitions per cell")
    bench.add_argument("--sink-foreign", action="store_true",
                       help="map bytes outside the alphabet to a rejecting sink symbol")
    bench.add_argument("-o", "--out", default=DEFAULT_EXPORT_DIR, help="export directory")
    bench.add_argument("--csv", help="CSV file name inside the export directory")
    bench.set_defaults(handler=cmd_bench)

    stats = commands.add_parser("stats", help="construction statistics over Timbuk files")
    stats.add_argument("paths", nargs="+", help="Timbuk files or directories")
    stats.add_argument("--state-limit", type=int, default=None,
                       help="record an overflow instead of exceeding this many states")
    stats.add_argument("-o", "--out", default=DEFAULT_EXPORT_DIR, help="export directory")
    stats.add_argument("--csv", help="CSV file name inside the export directory")
    stats.set_defaults(handler=cmd_stats)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    try:
        return args.handler(args)
    except (AutomatonError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"Internal error during {args.command}: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
