"""Machin-like arctangent relations: exact certification, candidate sieving,
PSLQ subset search and Alferov extension, with a JSONL relation store."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    DigitCapExceeded,
    Exhausted,
    InvalidInput,
    LimitTooLarge,
    MachinError,
    MeasureUndefined,
    NotCertified,
    NotSmooth,
    NotTwoOver,
    PoleError,
    WindingUnresolved,
)
from .exact import (
    GaussianRational,
    Relation,
    Term,
    VerificationReport,
    arctan_add,
    arctan_scale,
    eval_numeric,
    expand_relation,
    expand_two_over,
    format_lambda,
    lehmer_measure,
    parse_relation,
    verify_exact,
)
from .extend import (
    AngleRemainder,
    ExtendConfig,
    Strategy,
    alferov_complete,
    alferov_relation,
    alferov_remainder,
    continued_fraction_starts,
    truncate_and_extend,
)
from .numeric import arctan_real, pi_real
from .pipeline import PipelineConfig, PipelineReport, pipeline_run
from .pslq import PslqOutcome, PslqProblem, PslqStatus, pslq_find
from .search import SearchConfig, SearchResult, evolve_prime_sets, gosper_next, subset_search
from .sieve import Candidate, PrimeSet, enumerate_candidates, factor_over, viability_filter
from .store import InsertResult, RelationRecord, RelationStore, Source, import_relations, leaderboard

__all__ = [name for name in dir() if not name.startswith("_")]
