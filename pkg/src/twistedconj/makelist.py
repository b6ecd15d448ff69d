"""Enumerate the candidate Reidemeister sets of a D3F2 parity class, and check them
against the golden tables shipped with the package."""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .automorphisms import build_d3f2, check_conditions_d3f2
from .linalg import Matrix
from .reidemeister import (
    ResidueClassSet,
    compute_S,
    r_number_d3f2,
    residue_set_for,
    spectrum_d3f2,
    swap_parameters,
    union,
)

GOLDEN_ENV = "TWISTEDCONJ_GOLDEN_DIR"


def _gl2_z2() -> tuple[Matrix, ...]:
    out = []
    for a, b, c, d in itertools.product((0, 1), repeat=4):
        if (a * d - b * c) % 2:
            out.append(Matrix.of([[a, b], [c, d]]))
    return tuple(out)


# row-major lexicographic: 0110, 0111, 1001, 1011, 1101, 1110
GL2_Z2 = _gl2_z2()
Z2_SQUARED = tuple(itertools.product((0, 1), repeat=2))

# parity classes with no table: they are isomorphic to a listed one by swap_parameters
SWAPPED_CLASSES = frozenset(
    (a, 1, 0, d) for a in (0, 1) for d in (0, 1)
)


@dataclass(frozen=True)
class MakeListRow:
    Mbar: Matrix
    dbar: tuple[int, int]
    S: int
    Rset: ResidueClassSet

    @property
    def progression(self):
        (p,) = self.Rset.progressions
        return p

    def key(self) -> tuple:
        p = self.progression
        return (self.Mbar.entries, self.dbar, p.step, p.offset)

    def to_json(self) -> dict:
        p = self.progression
        return {"M": self.Mbar.tolist(), "d": list(self.dbar),
                "R": {"step": p.step, "offset": p.offset}}


def parity(k: Sequence[int]) -> tuple[int, int, int, int]:
    if len(k) != 4:
        raise ValueError("expected four parameters k1..k4")
    return tuple(int(x) % 2 for x in k)


def make_list(k: Sequence[int]) -> list[MakeListRow]:
    """Rows (Mbar, dbar, S, R-set) for every pair meeting the three parity conditions."""
    k = parity(k)
    rows = []
    for Mbar in GL2_Z2:
        for dbar in Z2_SQUARED:
            conds = check_conditions_d3f2(k, Mbar, dbar)
            if not (conds["a"] and conds["b"] and conds["c"]):
                continue
            S = compute_S(k, Mbar, dbar)
            rows.append(MakeListRow(Mbar, dbar, S, residue_set_for(Mbar, S)))
    return rows


def spectrum_from_rows(rows: Iterable[MakeListRow]) -> ResidueClassSet:
    return union(r.Rset for r in rows)


# -- golden data ----------------------------------------------------------------


def golden_dir() -> Path:
    override = os.environ.get(GOLDEN_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files(__package__) / "golden"))


def golden_keys() -> list[tuple[int, int, int, int]]:
    return [k for k in itertools.product((0, 1), repeat=4) if k not in SWAPPED_CLASSES]


def _table_name(k: Sequence[int]) -> str:
    return "makelist_" + "".join(str(x) for x in k) + ".json"


def load_table(k: Sequence[int], directory: Path | None = None) -> dict:
    path = (directory or golden_dir()) / _table_name(parity(k))
    with open(path) as fh:
        return json.load(fh)


def load_witnesses(directory: Path | None = None) -> list[dict]:
    with open((directory or golden_dir()) / "witnesses.json") as fh:
        return json.load(fh)["rows"]


def _golden_key(row: dict) -> tuple:
    M = tuple(tuple(r) for r in row["M"])
    return (M, tuple(row["d"]), row["R"]["step"], row["R"]["offset"])


def diff_table(k: Sequence[int], directory: Path | None = None) -> dict:
    """Set difference between computed and golden rows for one parity class."""
    k = parity(k)
    try:
        doc = load_table(k, directory)
    except (OSError, ValueError, KeyError) as exc:
        return {"k": list(k), "error": f"{type(exc).__name__}: {exc}", "missing": [], "extra": []}
    golden = [_golden_key(r) for r in doc["rows"]]
    computed = [r.key() for r in make_list(k)]
    missing = sorted(set(golden) - set(computed))
    extra = sorted(set(computed) - set(golden))
    out = {"k": list(k), "rows": len(golden), "missing": [_row_doc(x) for x in missing],
           "extra": [_row_doc(x) for x in extra]}
    if len(golden) != len(set(golden)):
        out["error"] = "duplicate golden rows"
    if list(doc.get("k", k)) != list(k):
        out["error"] = f"file is keyed {doc.get('k')}"
    return out


def _row_doc(key: tuple) -> dict:
    M, d, step, offset = key
    return {"M": [list(r) for r in M], "d": list(d), "R": {"step": step, "offset": offset}}


def _clean(entry: dict) -> bool:
    return not entry["missing"] and not entry["extra"] and "error" not in entry


def verify_tables(directory: Path | None = None, parallel: int = 1) -> dict:
    """Compare make_list against every golden table; ``ok`` iff no differences."""
    keys = golden_keys()
    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(lambda k: diff_table(k, directory), keys))
    else:
        results = [diff_table(k, directory) for k in keys]
    return {"ok": all(_clean(r) for r in results),
            "tables": len(results),
            "rows": sum(r.get("rows", 0) for r in results),
            "diffs": [r for r in results if not _clean(r)]}


# -- witness automorphisms ---------------------------------------------------------


def _lin(form: Sequence[int], m: int) -> int:
    return form[0] * m + form[1]


def witness_matrix(row: dict, m: int) -> list[list[int]]:
    return [[_lin(e, m) for e in r] for r in row["M"]]


def witness_check(m_range: Iterable[int] = range(1, 26), directory: Path | None = None) -> dict:
    """Evaluate each witness family for every m and compare with its closed form."""
    findings = []
    rows = load_witnesses(directory)
    m_values = list(m_range)
    for row in rows:
        k = tuple(row["k"])
        values = []
        for m in m_values:
            M = witness_matrix(row, m)
            try:
                build_d3f2(k, M, row["d"])
                R = r_number_d3f2(k, M, row["d"])
            except ValueError as exc:
                findings.append({"k": list(k), "m": m, "error": str(exc)})
                continue
            expected = _lin(row["R"], m)
            if R != expected:
                findings.append({"k": list(k), "m": m, "R": str(R), "expected": expected})
            values.append(R)
        claimed = ResidueClassSet.from_json(row["spectrum"])
        computed = spectrum_d3f2(k)
        if computed != claimed:
            findings.append({"k": list(k), "spectrum": str(computed), "expected": str(claimed)})
        # {a m + b : m >= 1} is exactly the progression (a, b)
        if ResidueClassSet([tuple(row["R"])]) != claimed.with_infinity(False):
            findings.append({"k": list(k), "closed_form": row["R"], "expected": str(claimed)})
        for p in claimed.progressions:
            if p.first not in values:
                findings.append({"k": list(k), "unrealised": p.first})
        stray = [v for v in values if v not in claimed]
        if stray:
            findings.append({"k": list(k), "outside_spectrum": stray})
    return {"ok": not findings, "rows": len(rows), "m_values": len(m_values),
            "findings": findings}


def swap_note(k: Sequence[int]) -> str | None:
    k = parity(k)
    if k not in SWAPPED_CLASSES:
        return None
    target = parity(swap_parameters(k))
    return (f"parameters {k} are isomorphic to {target} via (k1,k2,k3,k4) -> "
            f"(-k1,k3,k2,k4); rows shown are those of {target}")


def make_list_canonical(k: Sequence[int]) -> tuple[tuple[int, int, int, int], list[MakeListRow]]:
    """Rows for k, routed through the parameter swap when k has no table of its own."""
    k = parity(k)
    if k in SWAPPED_CLASSES:
        k = parity(swap_parameters(k))
    return k, make_list(k)
