"""End-to-end run: sieve, viability filter, subset search, extensions, store."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Sequence

from .errors import DigitCapExceeded, InvalidInput, PoleError
from .exact import expand_relation, lehmer_measure
from .extend import ExtendConfig, truncate_and_extend
from .search import SearchConfig, SearchReport, subset_search
from .sieve import PrimeSet, candidates_from_xs, enumerate_candidates, viability_filter
from .store import InsertResult, RelationRecord, RelationStore, Source

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    max_x: int | None = None
    candidates: Sequence[int] | None = None
    numerators: tuple[int, ...] = (1,)
    search: SearchConfig = field(default_factory=SearchConfig)
    expand_two_over: bool = True
    truncate_sweep: bool = False
    extend: ExtendConfig = field(default_factory=ExtendConfig)
    lambda_max: Decimal | None = None

    def __post_init__(self):
        if self.max_x is None and self.candidates is None:
            raise InvalidInput("either max_x or an explicit candidate list is required")


@dataclass
class PipelineReport:
    primes: tuple[int, ...]
    candidates: list[str] = field(default_factory=list)
    viable: bool = False
    search: SearchReport | None = None
    found: int = 0
    zero_relations: int = 0
    inserted: int = 0
    duplicates: int = 0
    filtered: int = 0
    expanded: int = 0
    extended: int = 0
    elapsed: float = 0.0

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "search"}
        out["primes"] = list(self.primes)
        out["search"] = self.search.to_json() if self.search else None
        out["elapsed"] = round(self.elapsed, 3)
        return out


def pipeline_run(P: PrimeSet | Iterable[int], cfg: PipelineConfig,
                 store: RelationStore | None = None) -> tuple[PipelineReport, RelationStore]:
    t0 = time.monotonic()
    P = P if isinstance(P, PrimeSet) else PrimeSet.of(P)
    store = store if store is not None else RelationStore()
    report = PipelineReport(P.primes)

    if cfg.candidates is not None:
        cands = candidates_from_xs(cfg.candidates, P)
    else:
        cands = enumerate_candidates(P, cfg.max_x, cfg.numerators)
    report.candidates = [c.label() for c in cands]
    report.viable = viability_filter(cands, P)
    if not report.viable:
        log.info("prime set %s is not viable with %d candidates", P, len(cands))
        report.elapsed = time.monotonic() - t0
        return report, store

    result = subset_search(cands, P, cfg.search)
    report.search = result.report
    report.found = len(result.relations)
    report.zero_relations = len(result.zero_relations)

    def keep(rel) -> bool:
        if cfg.lambda_max is not None and lehmer_measure(rel) >= cfg.lambda_max:
            report.filtered += 1
            return False
        return True

    def put(rel, source: Source) -> bool:
        rec = RelationRecord.create(rel, source, P.primes)
        if store.insert(rec) is InsertResult.INSERTED:
            report.inserted += 1
            return True
        report.duplicates += 1
        return False

    for rel in result.relations:
        if keep(rel):
            put(rel, Source.PSLQ)

    if cfg.expand_two_over:
        for rel in result.relations:
            if any(t.a == 2 for t in rel.terms):
                expanded = expand_relation(rel)
                if keep(expanded) and put(expanded, Source.EXPAND2A):
                    report.expanded += 1

    if cfg.truncate_sweep:
        for rel in result.relations:
            if rel.k <= 0 or any(t.a != 1 for t in rel.terms):
                continue
            for n_keep in range(1, len(rel.terms)):
                try:
                    ext = truncate_and_extend(rel, n_keep, cfg.extend)
                except (DigitCapExceeded, InvalidInput, PoleError):
                    continue
                if keep(ext) and put(ext, Source.TRUNCATE_EXTEND):
                    report.extended += 1

    report.elapsed = time.monotonic() - t0
    return report, store
