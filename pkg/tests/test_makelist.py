from __future__ import annotations

import itertools
import json
import shutil
import time

import jsonschema
import pytest

from twistedconj.automorphisms import check_conditions_d3f2
from twistedconj.linalg import Matrix, det
from twistedconj.makelist import (
    GL2_Z2,
    GOLDEN_ENV,
    SWAPPED_CLASSES,
    diff_table,
    golden_dir,
    golden_keys,
    load_witnesses,
    make_list,
    make_list_canonical,
    parity,
    spectrum_from_rows,
    swap_note,
    verify_tables,
    witness_check,
    witness_matrix,
)
from twistedconj.reidemeister import ResidueClassSet, r_number_d3f2, spectrum_d3f2

from .conftest import SCHEMAS

ROW_COUNTS = {
    (0, 0, 0, 0): 24, (0, 0, 0, 1): 24, (0, 0, 1, 0): 4, (0, 0, 1, 1): 4,
    (0, 1, 1, 0): 4, (0, 1, 1, 1): 4, (1, 0, 0, 0): 6, (1, 0, 0, 1): 6,
    (1, 0, 1, 0): 6, (1, 0, 1, 1): 6, (1, 1, 1, 0): 6, (1, 1, 1, 1): 6,
}


def rcs(*pairs):
    return ResidueClassSet(pairs)


def find_row(rows, M, d):
    (row,) = [r for r in rows if r.Mbar.tolist() == M and r.dbar == d]
    return row


class TestMakeList:
    def test_first_row_of_first_table(self):
        rows = make_list((0, 0, 0, 0))
        assert len(rows) == 24
        assert rows[0].Mbar.tolist() == [[0, 1], [1, 0]] and rows[0].dbar == (0, 0)
        assert rows[0].Rset == rcs((4, 4))

    def test_small_table(self):
        assert len(make_list((0, 0, 1, 0))) == 4

    def test_identity_row(self):
        row = find_row(make_list((1, 0, 0, 0)), [[1, 0], [0, 1]], (0, 0))
        assert row.Rset == rcs((8, 6)) and row.S == 3

    def test_row_counts(self):
        assert {k: len(make_list(k)) for k in golden_keys()} == ROW_COUNTS
        assert sum(ROW_COUNTS.values()) == 100

    def test_parity_reduction(self):
        assert [r.key() for r in make_list((2, 4, 6, 3))] == [r.key() for r in make_list((0, 0, 0, 1))]
        with pytest.raises(ValueError):
            parity((1, 2, 3))

    def test_order(self):
        for k in golden_keys():
            keys = [(r.Mbar.entries, r.dbar) for r in make_list(k)]
            assert keys == sorted(keys)

    def test_gl2(self):
        assert len(GL2_Z2) == 6
        assert all(det(m) % 2 == 1 for m in GL2_Z2)
        assert [m.entries for m in GL2_Z2] == sorted(m.entries for m in GL2_Z2)

    def test_row_invariants(self):
        for k in golden_keys():
            for r in make_list(k):
                assert 0 <= r.S <= 4
                p = r.progression
                if r.Mbar == Matrix.identity(2):
                    assert p.step == 8 and p.offset == 2 * r.S
                elif r.Mbar.trace() % 2 == 0:
                    assert p.step == 4 and p.offset == 2 * r.S
                else:
                    assert p.step == 4 and p.offset == 2 * r.S - 2

    def test_lift_independence(self):
        # conditions (a)-(c) depend only on parities: try both lifts of every entry
        for kbar in itertools.product((0, 1), repeat=4):
            for Mbar in GL2_Z2:
                e = [x for row in Mbar.tolist() for x in row]
                for dbar in itertools.product((0, 1), repeat=2):
                    base = check_conditions_d3f2(kbar, Mbar, dbar)
                    base = (base["a"], base["b"], base["c"])
                    for shift in itertools.product((0, 2), repeat=10):
                        k = [a + s for a, s in zip(kbar, shift[:4])]
                        m = [a + s for a, s in zip(e, shift[4:8])]
                        d = [a + s for a, s in zip(dbar, shift[8:])]
                        c = check_conditions_d3f2(k, [m[:2], m[2:]], d)
                        assert (c["a"], c["b"], c["c"]) == base

    def test_swapped_classes(self):
        assert SWAPPED_CLASSES.isdisjoint(golden_keys())
        assert len(golden_keys()) == 12
        k, rows = make_list_canonical((0, 1, 0, 0))
        assert k == (0, 0, 1, 0) and len(rows) == 4
        assert "(0, 0, 1, 0)" in swap_note((0, 1, 0, 0))
        assert swap_note((0, 0, 0, 1)) is None


class TestSpectrumFromRows:
    def test_examples(self):
        assert spectrum_from_rows(make_list((0, 0, 0, 1))) == rcs((2, 0))
        assert spectrum_from_rows(make_list((1, 1, 1, 1))) == rcs((4, -2))
        row = make_list((0, 0, 0, 0))[0]
        assert spectrum_from_rows([row]) == rcs((4, 4))

    def test_matches_spectrum(self):
        for k in golden_keys():
            assert spectrum_from_rows(make_list(k)) == spectrum_d3f2(k).with_infinity(False)


class TestGolden:
    def test_verify(self):
        t = time.perf_counter()
        rep = verify_tables()
        assert time.perf_counter() - t < 1.0
        assert rep == {"ok": True, "tables": 12, "rows": 100, "diffs": []}

    def test_parallel_same(self):
        assert verify_tables(parallel=4) == verify_tables()

    def test_schema(self):
        schema = json.loads((SCHEMAS / "golden_table.json").read_text())
        for k in golden_keys():
            doc = json.loads((golden_dir() / f"makelist_{''.join(map(str, k))}.json").read_text())
            jsonschema.validate(doc, schema)
            assert tuple(doc["k"]) == k and len(doc["rows"]) == ROW_COUNTS[k]

    def test_perturbed_row(self, tmp_path, monkeypatch):
        shutil.copytree(golden_dir(), tmp_path, dirs_exist_ok=True)
        path = tmp_path / "makelist_1000.json"
        doc = json.loads(path.read_text())
        doc["rows"][2]["R"]["offset"] = 2
        path.write_text(json.dumps(doc))
        monkeypatch.setenv(GOLDEN_ENV, str(tmp_path))
        rep = verify_tables()
        assert not rep["ok"]
        (d,) = rep["diffs"]
        assert d["k"] == [1, 0, 0, 0]
        assert d["missing"] == [{"M": [[1, 0], [0, 1]], "d": [0, 0], "R": {"step": 8, "offset": 2}}]
        assert d["extra"] == [{"M": [[1, 0], [0, 1]], "d": [0, 0], "R": {"step": 8, "offset": 6}}]

    def test_missing_file(self, tmp_path):
        shutil.copytree(golden_dir(), tmp_path, dirs_exist_ok=True)
        (tmp_path / "makelist_0011.json").unlink()
        rep = verify_tables(tmp_path)
        assert not rep["ok"] and "error" in rep["diffs"][0]

    def test_duplicate_row(self, tmp_path):
        shutil.copytree(golden_dir(), tmp_path, dirs_exist_ok=True)
        path = tmp_path / "makelist_0011.json"
        doc = json.loads(path.read_text())
        doc["rows"].append(doc["rows"][0])
        path.write_text(json.dumps(doc))
        assert "error" in diff_table((0, 0, 1, 1), tmp_path)


class TestWitnesses:
    def test_examples(self):
        assert r_number_d3f2((0, 0, 1, 1), [[1, 1], [6, 5]], (0, 0)) == 12
        assert r_number_d3f2((1, 0, 1, 1), [[1, 1], [1, 0]], (1, 1)) == 4
        assert r_number_d3f2((1, 1, 1, 0), [[0, 1], [1, 2]], (0, 0)) == 6

    def test_check(self):
        rep = witness_check()
        assert rep["ok"], rep["findings"]
        assert rep["rows"] == 12 and rep["m_values"] == 25

    def test_one_row_per_class(self):
        assert sorted(tuple(r["k"]) for r in load_witnesses()) == sorted(golden_keys())

    def test_values_in_make_list_spectrum(self):
        for row in load_witnesses():
            spec = spectrum_from_rows(make_list(row["k"]))
            for m in range(1, 26):
                assert r_number_d3f2(row["k"], witness_matrix(row, m), row["d"]) in spec

    def test_broken_witness_reported(self, tmp_path):
        shutil.copytree(golden_dir(), tmp_path, dirs_exist_ok=True)
        path = tmp_path / "witnesses.json"
        doc = json.loads(path.read_text())
        doc["rows"][0]["R"] = [4, 4]
        path.write_text(json.dumps(doc))
        rep = witness_check(range(1, 4), tmp_path)
        assert not rep["ok"] and rep["findings"]
