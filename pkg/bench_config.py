#!/usr/bin/env python3
"""
Benchmark sweep configuration
Pydantic models shared by JSON config files and command-line flags
"""
import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from automata import AutomatonError
from parallel_recognizer import Variant
from text_generator import TextMode

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_COUNTS = list(range(2, 67, 8))
DEFAULT_REPETITIONS = 5
DEFAULT_EXPORT_DIR = "exports"
DEFAULT_SEED = 0


class ConfigError(AutomatonError):
    """Benchmark configuration that fails validation"""


class SourceConfig(BaseModel):
    """Exactly one machine source"""
    regex: Optional[str] = None
    regexp_family: Optional[int] = Field(default=None, ge=0)
    timbuk: Optional[str] = None
    automaton: Optional[str] = None
    alphabet_mode: Literal['bytes', 'custom'] = 'bytes'

    @model_validator(mode='after')
    def one_source(self):
        given = [name for name in ('regex', 'regexp_family', 'timbuk', 'automaton')
                 if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one source is required, got {given or 'none'}")
        return self

    def label(self) -> str:
        if self.regexp_family is not None:
            return f"regexp-k{self.regexp_family}"
        if self.regex is not None:
            return f"re:{self.regex}"
        return Path(self.timbuk or self.automaton).stem


class GeneratedTexts(BaseModel):
    lengths: List[int] = Field(min_length=1)
    seed: int = DEFAULT_SEED
    mode: TextMode = TextMode.WALK

    @field_validator('lengths')
    @classmethod
    def non_negative(cls, lengths: List[int]) -> List[int]:
        if any(n < 0 for n in lengths):
            raise ValueError("text lengths must be non-negative")
        return lengths


class TextSources(BaseModel):
    files: List[str] = Field(default_factory=list)
    generated: Optional[GeneratedTexts] = None

    @model_validator(mode='after')
    def at_least_one(self):
        if not self.files and self.generated is None:
            raise ValueError("at least one text source is required")
        return self


class BenchConfig(BaseModel):
    """One benchmark sweep: a machine, its variants, chunk counts and texts"""
    benchmark: Optional[str] = None
    source: SourceConfig
    variants: List[Variant] = Field(default_factory=lambda: list(Variant), min_length=1)
    chunk_counts: List[int] = Field(default_factory=lambda: list(DEFAULT_CHUNK_COUNTS), min_length=1)
    texts: TextSources
    repetitions: int = Field(default=DEFAULT_REPETITIONS, ge=1)
    reduce_interface: bool = True
    sink_foreign: bool = False
    state_limit: Optional[int] = Field(default=None, ge=1)
    export_dir: str = DEFAULT_EXPORT_DIR
    csv_name: Optional[str] = None

    @field_validator('chunk_counts')
    @classmethod
    def positive_chunks(cls, counts: List[int]) -> List[int]:
        if any(c < 1 for c in counts):
            raise ValueError("chunk counts must be at least 1")
        return counts

    @property
    def benchmark_name(self) -> str:
        return self.benchmark or self.source.label()


def build_bench_config(**values) -> BenchConfig:
    """Validate keyword values into a BenchConfig, raising ConfigError"""
    try:
        return BenchConfig.model_validate(values)
    except PydanticValidationError as e:
        raise ConfigError(f"invalid benchmark configuration: {e}") from e


def load_bench_config(path: Union[str, Path]) -> BenchConfig:
    """Load a BenchConfig from a JSON file"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            values = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(values, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    config = build_bench_config(**values)
    logger.info(f"Loaded benchmark config {config.benchmark_name!r} from {path}")
    return config
