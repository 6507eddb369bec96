from __future__ import annotations

import json
import threading
from decimal import Decimal

import pytest

from machinlike import known
from machinlike.errors import NotCertified
from machinlike.exact import Relation, format_lambda, lehmer_measure, parse_relation
from machinlike.store import (
    InsertResult,
    RelationRecord,
    RelationStore,
    Source,
    import_relations,
    leaderboard,
    relation_from_json,
    relation_to_json,
    store_insert,
)

MACHIN = parse_relation(known.MACHIN)
TABLE = [text for _, _, text in known.BEST_BY_TERMS]


@pytest.fixture
def table_file(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# best relations\n" + "\n".join(TABLE) + "\n")
    return path


def test_insert_dedup():
    store = RelationStore()
    assert store_insert(store, RelationRecord.create(MACHIN)) is InsertResult.INSERTED
    assert store_insert(store, RelationRecord.create(MACHIN)) is InsertResult.DUPLICATE
    reversed_order = Relation.acot(1, [(-1, 239), (4, 5)])
    assert store.add(reversed_order) is InsertResult.DUPLICATE
    assert len(store) == 1


def test_insert_uncertified():
    with pytest.raises(NotCertified):
        RelationStore().add(Relation.acot(1, [(5, 5), (-1, 239)]))


def test_record_json_shape():
    rec = RelationRecord.create(MACHIN, Source.PSLQ, [13])
    d = json.loads(rec.to_line())
    assert d["k"] == 1 and d["terms"] == [{"c": 4, "a": 1, "b": 5}, {"c": -1, "a": 1, "b": 239}]
    assert d["lambda"] == "1.8511276523" and d["source"] == "pslq" and d["primes"] == [13]
    assert d["certified"] is True


def test_big_integers_are_strings():
    rel = parse_relation(known.RECORD6)
    d = relation_to_json(rel)
    assert d["terms"][-1]["b"] == "7939642926390344818"
    assert relation_from_json(json.loads(json.dumps(d))) == rel


def test_stated_lambda_mismatch_rejected():
    d = RelationRecord.create(MACHIN).to_json()
    d["lambda"] = "1.8511276524"
    with pytest.raises(ValueError):
        RelationRecord.from_json(d)


def test_stored_lambda_recomputes():
    store = RelationStore()
    for text in TABLE:
        store.add(parse_relation(text), Source.IMPORT)
    for rec in store:
        assert rec.lambda_text == format_lambda(lehmer_measure(rec.relation), 10)


# ---------------------------
# Persistence
# ---------------------------

def test_file_backed_store_reloads(tmp_path):
    path = tmp_path / "s.jsonl"
    store = RelationStore(path)
    store.add(MACHIN)
    store.add(parse_relation(known.GAUSS))
    again = RelationStore(path)
    assert len(again) == 2 and MACHIN in again


def test_export_import_roundtrip(tmp_path, table_file):
    store = RelationStore()
    import_relations(store, table_file)
    out1 = tmp_path / "a.jsonl"
    store.export(out1)
    copy = RelationStore()
    assert import_relations(copy, out1) == len(store)
    out2 = tmp_path / "b.jsonl"
    copy.export(out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_import_table(table_file):
    # the tables list one relation per term count, 2 through 15
    store = RelationStore()
    assert import_relations(store, table_file) == 14


def test_import_with_corruption(tmp_path):
    lines = list(TABLE)
    lines[3] = lines[3].replace("+", "+1", 1) if "+" in lines[3] else lines[3]
    assert lines[3] != TABLE[3]
    path = tmp_path / "bad.txt"
    path.write_text("\n".join(lines) + "\n")
    rejections: list = []
    assert import_relations(RelationStore(), path, rejections=rejections) == 13
    assert [ln for ln, _ in rejections] == [4]


def test_import_malformed_lines_continue(tmp_path):
    path = tmp_path / "x.jsonl"
    good = RelationRecord.create(MACHIN).to_line()
    path.write_text("{not json\n" + good + "\n" + '{"terms": []}\n')
    rejections: list = []
    assert import_relations(RelationStore(), path, rejections=rejections) == 1
    assert [ln for ln, _ in rejections] == [1, 3]


def test_import_empty_and_missing(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert import_relations(RelationStore(), empty) == 0
    with pytest.raises(FileNotFoundError):
        import_relations(RelationStore(), tmp_path / "nope.txt")


def test_concurrent_inserts():
    store = RelationStore()
    recs = [RelationRecord.create(parse_relation(t)) for t in TABLE]
    results: list = []

    def worker():
        for rec in recs:
            results.append(store.insert(rec))

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(store) == 14
    assert results.count(InsertResult.INSERTED) == 14


# ---------------------------
# Leaderboard
# ---------------------------

def test_leaderboard_table(table_file):
    store = RelationStore()
    import_relations(store, table_file)
    board = leaderboard(store)
    rows = {n: (lam, text) for n, lam, text in board.rows()}
    assert rows[5] == ("1.4572", parse_relation(known.RECORD5).render())
    assert sorted(rows) == list(range(2, 16))


def test_leaderboard_edge_cases():
    assert leaderboard(RelationStore()).render() == ""
    store = RelationStore()
    store.add(MACHIN)
    assert leaderboard(store).rows() == [(2, "1.8511", MACHIN.render())]


def test_leaderboard_minimality_matches_brute_force(table_file):
    store = RelationStore()
    import_relations(store, table_file)
    for text in (known.HUTTON, known.EULER, known.HERMANN, known.STORMER, known.TAKANO, known.ZERO_2_3_7):
        store.add(parse_relation(text))
    board = leaderboard(store)
    for n, rec in board.best_by_terms.items():
        same = [r for r in store if len(r.relation) == n and r.relation.k != 0]
        assert rec.lambda_ == min(r.lambda_ for r in same)


def test_leaderboard_tie_break():
    # equal measure forced by hand: the smaller largest denominator wins
    euler = parse_relation(known.EULER)
    tied = Decimal("1.5")
    recs = [RelationRecord(MACHIN, tied, certified=True), RelationRecord(euler, tied, certified=True)]
    assert leaderboard(recs).best_by_terms[2].relation == euler
    assert leaderboard(recs[::-1]).best_by_terms[2].relation == euler
