"""Combinatorial subset search over candidates, driving PSLQ.

Subsets are walked from the largest size down, each size in Gosper order.
A subset is skipped when its mask was already the support of a PSLQ hit,
or when some odd prime of its norms divides only one selected norm (such
a prime cannot cancel in the Gaussian product).  Every hit is certified
exactly before it is reported.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .errors import Exhausted, InvalidInput
from .exact import Relation, lehmer_measure, verify_exact
from .numeric import atan_fixed, pi_fixed
from .pslq import PI, PslqStatus, classify_vector, default_max_iterations, pslq_fixed
from .sieve import Candidate, PrimeSet, enumerate_candidates, primes_upto, viability_filter

log = logging.getLogger(__name__)


# ---------------------------
# Gosper's hack
# ---------------------------

def gosper_next(mask: int, width: int | None = None) -> int:
    """Next larger integer with the same popcount; Exhausted past ``width`` bits."""
    if mask <= 0:
        raise InvalidInput("mask must be positive")
    c = mask & -mask
    r = mask + c
    nxt = (((r ^ mask) >> 2) // c) | r
    if width is not None and nxt >> width:
        raise Exhausted(f"no mask of popcount {bin(mask).count('1')} above {mask:#b} in {width} bits")
    return nxt


def masks_of_size(width: int, size: int) -> Iterator[int]:
    if size < 1 or size > width:
        return
    mask = (1 << size) - 1
    while True:
        yield mask
        try:
            mask = gosper_next(mask, width)
        except Exhausted:
            return


def mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# ---------------------------
# Configuration and results
# ---------------------------

@dataclass
class SearchConfig:
    min_x: int | None = None
    max_subset_size: int | None = None
    min_subset_size: int = 2
    precision_bits: int = 1024
    coeff_bound: int = 32
    detection_threshold_bits: int | None = None
    iteration_factor: float = 1.0
    stale_iteration_cap: int | None = None
    consecutive_failure_cap: int | None = None
    pslq_budget: int | None = None
    skip_supersets: bool = False
    prune: bool = True
    width: int = 24
    jobs: int = 1
    chunk_size: int = 64

    def __post_init__(self):
        if self.min_subset_size < 2:
            raise InvalidInput("min_subset_size must be >= 2")
        if self.max_subset_size is not None and self.max_subset_size < self.min_subset_size:
            raise InvalidInput("max_subset_size must be >= min_subset_size")
        for name in ("stale_iteration_cap", "consecutive_failure_cap", "pslq_budget"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InvalidInput(f"{name} must be >= 1")

    def threshold_fixed(self) -> int:
        bits = self.detection_threshold_bits
        if bits is None:
            bits = self.precision_bits // 2
        return 1 << max(0, self.precision_bits - bits)


@dataclass
class MaskCache:
    seen_masks: set[int] = field(default_factory=set)

    def __contains__(self, mask: int) -> bool:
        return mask in self.seen_masks

    def add(self, mask: int) -> bool:
        if mask in self.seen_masks:
            return False
        self.seen_masks.add(mask)
        return True

    def covers(self, mask: int) -> bool:
        """True if some stored mask is a subset of ``mask``."""
        return any(s & mask == s for s in self.seen_masks)


@dataclass
class SearchReport:
    candidates: int = 0
    min_x: int = 0
    masks_enumerated: int = 0
    cache_hits: int = 0
    pruned: int = 0
    pslq_calls: int = 0
    pslq_failures: Counter = field(default_factory=Counter)
    relations: int = 0
    zero_relations: int = 0
    duplicates: int = 0
    uncertified: int = 0
    aborted: str | None = None
    elapsed: float = 0.0

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["pslq_failures"] = dict(self.pslq_failures)
        out["elapsed"] = round(self.elapsed, 3)
        return out


@dataclass
class SearchResult:
    relations: list[Relation]
    zero_relations: list[Relation]
    report: SearchReport
    candidates: list[Candidate]

    def best(self) -> Relation | None:
        rels = [r for r in self.relations if r.k != 0]
        return min(rels, key=lambda r: (lehmer_measure(r), r.max_denominator()), default=None)


def choose_min_x(cands: Sequence[Candidate], width: int = 24) -> int:
    """Smallest alpha leaving at most ``width`` candidates (0 when <= 12 or already fits)."""
    if len(cands) <= 12 or len(cands) <= width:
        return 0
    xs = sorted(c.x for c in cands)
    return xs[len(xs) - width]


def _args(cands: Sequence[Candidate]) -> list[Fraction]:
    return [Fraction(c.numerator, c.x) for c in cands]


# ---------------------------
# PSLQ evaluation (local or in worker processes)
# ---------------------------

_WORKER: dict = {}


def _worker_init(values, prec, coeff_bound, threshold, factor):
    _WORKER.update(values=values, prec=prec, coeff_bound=coeff_bound,
                   threshold=threshold, factor=factor)


def _run_masks(masks: Sequence[int]) -> list[tuple[int, str, list[int] | None]]:
    vals = _WORKER["values"]
    out = []
    for mask in masks:
        idx = mask_indices(mask)
        xs = [vals[0]] + [vals[i + 1] for i in idx]
        o = pslq_fixed(xs, _WORKER["prec"], coeff_bound=_WORKER["coeff_bound"],
                       threshold_fixed=_WORKER["threshold"],
                       max_iterations=default_max_iterations(len(xs), _WORKER["factor"]))
        out.append((mask, o.status.value, o.vector))
    return out


def _chunks(seq: Sequence[int], size: int) -> Iterator[Sequence[int]]:
    for i in range(0, len(seq), size):
        yield seq[i:i + size]


# ---------------------------
# The search
# ---------------------------

def subset_search(cands: Sequence[Candidate], P: PrimeSet | Iterable[int] | None = None,
                  cfg: SearchConfig | None = None, cache: MaskCache | None = None) -> SearchResult:
    """Run PSLQ on [pi] + arctans of candidate subsets and collect certified relations."""
    cfg = cfg or SearchConfig()
    t_start = time.monotonic()
    report = SearchReport()
    alpha = cfg.min_x if cfg.min_x is not None else choose_min_x(cands, cfg.width)
    cands = sorted((c for c in cands if c.x >= alpha), key=lambda c: (c.x, c.numerator))
    report.candidates = len(cands)
    report.min_x = alpha
    width = len(cands)
    relations: dict[tuple, Relation] = {}
    zeros: dict[tuple, Relation] = {}
    if P is not None and not viability_filter(cands, P):
        log.info("candidate set fails the viability filter for %s", P)
    if width == 0:
        report.elapsed = time.monotonic() - t_start
        return SearchResult([], [], report, list(cands))

    cache = cache if cache is not None else MaskCache()
    args = _args(cands)
    inputs = [PI] + args
    prec = cfg.precision_bits
    values = [pi_fixed(prec)] + [atan_fixed(a.numerator, a.denominator, prec) for a in args]
    threshold = cfg.threshold_fixed()

    # odd primes of each norm as a bitmask over distinct primes
    prime_index: dict[int, int] = {}
    pmask = []
    for c in cands:
        m = 0
        for p in c.odd_primes:
            m |= 1 << prime_index.setdefault(p, len(prime_index))
        pmask.append(m)

    def cancels(mask: int) -> bool:
        once = twice = 0
        for i in mask_indices(mask):
            pm = pmask[i]
            twice |= once & pm
            once |= pm
        return once == twice

    max_size = min(cfg.max_subset_size or width, width)
    stale = 0
    failures_in_row = 0
    pool = None
    if cfg.jobs > 1:
        pool = ProcessPoolExecutor(cfg.jobs, initializer=_worker_init,
                                   initargs=(values, prec, cfg.coeff_bound, threshold, cfg.iteration_factor))
    else:
        _worker_init(values, prec, cfg.coeff_bound, threshold, cfg.iteration_factor)

    def handle(mask: int, status: str, vector: list[int] | None) -> None:
        nonlocal stale, failures_in_row
        report.pslq_calls += 1
        if status != PslqStatus.RELATION.value:
            report.pslq_failures[status] += 1
            failures_in_row += 1
            stale += 1
            return
        failures_in_row = 0
        idx = mask_indices(mask)
        support = 0
        for pos, i in enumerate(idx):
            if vector[pos + 1]:
                support |= 1 << i
        cache.add(support)
        sub_inputs = [PI] + [inputs[i + 1] for i in idx]
        rel = classify_vector(vector, sub_inputs)
        key = rel.key()
        if rel.k == 0:
            if key in zeros:
                report.duplicates += 1
                stale += 1
            else:
                zeros[key] = rel
                report.zero_relations += 1
                stale = 0
            return
        if key in relations:
            report.duplicates += 1
            stale += 1
            return
        if not verify_exact(rel).valid:
            report.uncertified += 1
            log.warning("PSLQ hit failed certification: %s", rel)
            stale += 1
            return
        relations[key] = rel
        report.relations += 1
        stale = 0

    def abort_reason() -> str | None:
        if cfg.stale_iteration_cap is not None and stale >= cfg.stale_iteration_cap:
            return "stale_iteration_cap"
        if cfg.consecutive_failure_cap is not None and failures_in_row >= cfg.consecutive_failure_cap:
            return "consecutive_failure_cap"
        if cfg.pslq_budget is not None and report.pslq_calls >= cfg.pslq_budget:
            return "pslq_budget"
        return None

    try:
        for size in range(max_size, cfg.min_subset_size - 1, -1):
            todo = []
            for mask in masks_of_size(width, size):
                report.masks_enumerated += 1
                if mask in cache or (cfg.skip_supersets and cache.covers(mask)):
                    report.cache_hits += 1
                elif cfg.prune and not cancels(mask):
                    report.pruned += 1
                else:
                    todo.append(mask)
            if pool is None:
                results: Iterable = (r for m in todo for r in _run_masks([m]))
            else:
                results = (r for batch in pool.map(_run_masks, _chunks(todo, cfg.chunk_size)) for r in batch)
            for mask, status, vector in results:
                handle(mask, status, vector)
                report.aborted = abort_reason()
                if report.aborted:
                    break
            if report.aborted:
                break
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)

    report.elapsed = time.monotonic() - t_start
    ordered = sorted(relations.values(), key=lambda r: (lehmer_measure(r), r.key()))
    ordered_zero = sorted(zeros.values(), key=lambda r: r.key())
    return SearchResult(ordered, ordered_zero, report, list(cands))


# ---------------------------
# Prime-set strategies
# ---------------------------

def evolve_prime_sets(seeds: Sequence[PrimeSet | Iterable[int]], beam_width: int,
                      prime_pool: Iterable[int], score: Callable[[PrimeSet], float]) -> list[PrimeSet]:
    """One generation: extend each seed by one pool prime and keep the best ``beam_width``."""
    if beam_width < 1:
        raise InvalidInput("beam_width must be >= 1")
    pool = sorted(set(prime_pool))
    extensions: dict[tuple[int, ...], PrimeSet] = {}
    for seed in seeds:
        base = seed.primes if isinstance(seed, PrimeSet) else tuple(sorted(seed))
        for p in pool:
            if p in base:
                continue
            ext = PrimeSet(tuple(sorted((*base, p))))
            extensions.setdefault(ext.primes, ext)
    scored = []
    for ps in extensions.values():
        s = score(ps)
        scored.append((math.inf if s is None else float(s), ps.primes, ps))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [ps for _, _, ps in scored[:beam_width]]


def budgeted_score(max_x: int, cfg: SearchConfig | None = None,
                   budget: int = 2000) -> Callable[[PrimeSet], float]:
    """Score a prime set by the lowest Lehmer measure a budgeted search finds."""
    base = cfg or SearchConfig()

    def score(ps: PrimeSet) -> float:
        cands = enumerate_candidates(ps, max_x)
        if len(cands) < 2 or not viability_filter(cands, ps):
            return math.inf
        run_cfg = SearchConfig(**{**base.__dict__, "pslq_budget": budget})
        best = subset_search(cands, ps, run_cfg).best()
        return math.inf if best is None else float(lehmer_measure(best))

    return score


def _sqrt_minus_one(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ValueError(f"no square root of -1 modulo {p}")


def norm_derived_prime_pool(x_limit: int) -> list[int]:
    """Distinct odd primes dividing some x^2+1 with 1 <= x < x_limit."""
    if x_limit < 2:
        raise InvalidInput("x_limit must be >= 2")
    vals = [x * x + 1 for x in range(x_limit)]
    found: set[int] = set()
    for p in primes_upto(x_limit):
        if p % 4 != 1:
            continue
        r = _sqrt_minus_one(p)
        for root in {r, p - r}:
            for x in range(root, x_limit, p):
                v = vals[x]
                if v % p == 0:
                    found.add(p)
                    while v % p == 0:
                        v //= p
                    vals[x] = v
    for x in range(1, x_limit):
        v = vals[x]
        while v % 2 == 0:
            v //= 2
        # at most one prime factor of x^2+1 exceeds x
        if v > 1:
            found.add(v)
    return sorted(found)
