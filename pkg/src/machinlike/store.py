"""Append-only JSONL store of certified relations, with a leaderboard.

One record per line::

    {"k": 1, "terms": [{"c": 4, "a": 1, "b": 5}, {"c": -1, "a": 1, "b": 239}],
     "lambda": "1.8511276523", "source": "pslq", "primes": [13], ...}

Integers of 2**53 or more are written as decimal strings.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .errors import NotCertified
from .exact import Relation, Term, format_lambda, lehmer_measure, parse_relation, verify_exact

log = logging.getLogger(__name__)

LAMBDA_PLACES = 10
_JSON_SAFE = 2 ** 53


class Source(str, Enum):
    PSLQ = "pslq"
    EXPAND2A = "expand2a"
    ALFEROV = "alferov"
    TRUNCATE_EXTEND = "truncate_extend"
    IMPORT = "import"


class InsertResult(str, Enum):
    INSERTED = "Inserted"
    DUPLICATE = "Duplicate"


def _jint(v: int):
    return v if abs(v) < _JSON_SAFE else str(v)


def _now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def relation_to_json(rel: Relation) -> dict:
    return {"k": rel.k,
            "terms": [{"c": _jint(t.coeff), "a": _jint(t.a), "b": _jint(t.b)} for t in rel.terms]}


def relation_from_json(d: dict) -> Relation:
    terms = tuple(Term(int(t["c"]), Fraction(int(t.get("a", 1)), int(t["b"]))) for t in d["terms"])
    return Relation(int(d.get("k", 1)), terms)


@dataclass
class RelationRecord:
    relation: Relation
    lambda_: Decimal
    source: Source = Source.PSLQ
    primes: tuple[int, ...] | None = None
    discovered_at: str = field(default_factory=_now)
    certified: bool = False

    @classmethod
    def create(cls, relation: Relation, source: Source | str = Source.PSLQ,
               primes: Iterable[int] | None = None, discovered_at: str | None = None) -> "RelationRecord":
        rel = relation.canonical()
        return cls(rel, lehmer_measure(rel), Source(source),
                   tuple(primes) if primes is not None else None,
                   discovered_at or _now(), verify_exact(rel).valid)

    @property
    def lambda_text(self) -> str:
        return format_lambda(self.lambda_, LAMBDA_PLACES)

    def key(self) -> tuple:
        return self.relation.key()

    def to_json(self) -> dict:
        out = relation_to_json(self.relation)
        out["lambda"] = self.lambda_text
        out["source"] = self.source.value
        out["primes"] = list(self.primes) if self.primes is not None else None
        out["discovered_at"] = self.discovered_at
        out["certified"] = self.certified
        return out

    def to_line(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict, source: Source | str | None = None) -> "RelationRecord":
        rel = relation_from_json(d)
        rec = cls.create(rel, source or d.get("source", Source.IMPORT), d.get("primes"),
                         d.get("discovered_at"))
        stated = d.get("lambda")
        if stated is not None and Decimal(stated) != Decimal(rec.lambda_text):
            raise ValueError(f"stated lambda {stated} differs from recomputed {rec.lambda_text}")
        return rec


class RelationStore:
    """In-memory map from canonical key to record, optionally backed by a JSONL file."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._records: dict[tuple, RelationRecord] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with self.path.open() as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        rec = RelationRecord.from_json(json.loads(line))
                    except (ValueError, KeyError, TypeError) as exc:
                        log.warning("%s:%d: skipping record: %s", self.path, lineno, exc)
                        continue
                    if rec.certified:
                        self._records.setdefault(rec.key(), rec)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[RelationRecord]:
        return iter(self.snapshot())

    def __contains__(self, rel: Relation) -> bool:
        return rel.key() in self._records

    def snapshot(self) -> list[RelationRecord]:
        with self._lock:
            return list(self._records.values())

    def insert(self, rec: RelationRecord) -> InsertResult:
        if not rec.certified:
            raise NotCertified(f"relation does not certify: {rec.relation}")
        key = rec.key()
        with self._lock:
            if key in self._records:
                return InsertResult.DUPLICATE
            self._records[key] = rec
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a") as fh:
                    fh.write(rec.to_line() + "\n")
        return InsertResult.INSERTED

    def add(self, relation: Relation, source: Source | str = Source.PSLQ,
            primes: Iterable[int] | None = None) -> InsertResult:
        return self.insert(RelationRecord.create(relation, source, primes))

    def sorted_records(self) -> list[RelationRecord]:
        return sorted(self.snapshot(), key=lambda r: (len(r.relation), r.lambda_, r.key()))

    def export(self, path: str | Path) -> int:
        recs = self.sorted_records()
        with Path(path).open("w") as fh:
            for rec in recs:
                fh.write(rec.to_line() + "\n")
        return len(recs)


def store_insert(store: RelationStore, rec: RelationRecord) -> InsertResult:
    return store.insert(rec)


# ---------------------------
# Import
# ---------------------------

def _detect_format(path: Path) -> str:
    return "jsonl" if path.suffix in (".jsonl", ".json", ".ndjson") else "text"


def import_relations(store: RelationStore, path: str | Path, fmt: str | None = None,
                     rejections: list[tuple[int, str]] | None = None) -> int:
    """Certify and insert every relation in ``path``; returns the number inserted.

    ``fmt`` is ``"jsonl"`` (store records) or ``"text"`` (one bracket-notation
    relation per line, ``#`` comments).  Bad lines are logged and skipped.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"cannot read {path}")
    fmt = fmt or _detect_format(path)
    inserted = 0
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                if fmt == "jsonl":
                    rec = RelationRecord.from_json(json.loads(line))
                else:
                    rec = RelationRecord.create(parse_relation(line), Source.IMPORT)
                if store.insert(rec) is InsertResult.INSERTED:
                    inserted += 1
            except (ValueError, KeyError, TypeError, NotCertified) as exc:
                log.warning("%s:%d: rejected: %s", path, lineno, exc)
                if rejections is not None:
                    rejections.append((lineno, str(exc)))
    return inserted


# ---------------------------
# Leaderboard
# ---------------------------

@dataclass
class Leaderboard:
    best_by_terms: dict[int, RelationRecord]

    def rows(self) -> list[tuple[int, str, str]]:
        return [(n, format_lambda(rec.lambda_), rec.relation.render())
                for n, rec in sorted(self.best_by_terms.items())]

    def render(self) -> str:
        rows = self.rows()
        if not rows:
            return ""
        lines = [f"{'terms':>5}  {'lambda':>6}  relation"]
        for n, lam, text in rows:
            lines.append(f"{n:>5}  {lam:>6}  {text}")
        return "\n".join(lines)


def leaderboard(store: RelationStore | Iterable[RelationRecord]) -> Leaderboard:
    best: dict[int, RelationRecord] = {}
    for rec in store:
        if rec.relation.k == 0:
            continue
        n = len(rec.relation)
        cur = best.get(n)
        if cur is None or (rec.lambda_, rec.relation.max_denominator(), rec.key()) < (
                cur.lambda_, cur.relation.max_denominator(), cur.key()):
            best[n] = rec
    return Leaderboard(best)
