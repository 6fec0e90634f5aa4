"""Exhaustive enumeration of small Cayley tables, counterexample search,
canonical forms, and the two verification campaigns.

Tables are visited in row-major lexicographic order of the flattened entry
sequence.  Cells are filled row by row with bitmask pruning: row-prefix
injectivity for left cancellation, column-prefix injectivity for right
cancellation, both for quasigroups.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Iterator, Sequence

from .magmas import CayleyTable, compiled_checker
from .terms import Identity
from .variety import REGISTRY_NAMES, _closure, builtin


class OrderGuardError(ValueError):
    """Raised when a requested order is outside the supported guard."""


STRUCTURES = ("none", "left_cancellative", "right_cancellative", "quasigroup")

_ALIASES = {"left": "left_cancellative", "right": "right_cancellative"}

# Worst-case full scans stay in the minutes range below these orders.
_MAX_ORDER = {
    "none": 6,
    "left_cancellative": 6,
    "right_cancellative": 6,
    "quasigroup": 7,
}


def normalize_structure(structure: str) -> str:
    structure = _ALIASES.get(structure, structure)
    if structure not in STRUCTURES:
        raise ValueError(
            f"unknown structure {structure!r}; valid: none, left, right, quasigroup")
    return structure


def _structure_flags(structure: str) -> tuple[bool, bool]:
    return (
        structure in ("left_cancellative", "quasigroup"),
        structure in ("right_cancellative", "quasigroup"),
    )


def _guard_order(n: int, structure: str) -> None:
    cap = _MAX_ORDER[structure]
    if not 1 <= n <= cap:
        raise OrderGuardError(
            f"order {n} outside 1..{cap} for structure {structure}")


def _scan_grids(n: int, row_inj: bool, col_inj: bool,
                emit: Callable, first_row: Sequence[int] | None = None) -> bool:
    """Drive ``emit`` over every constrained grid, in lexicographic order.

    ``emit`` receives the working list-of-lists grid; it must copy whatever
    it keeps.  A truthy return from ``emit`` aborts the scan.  Returns True
    if the scan was aborted.
    """
    rows = [[0] * n for _ in range(n)]
    rowmask = [0] * n
    colmask = [0] * n
    start = 0
    if first_row is not None:
        row0 = list(first_row)
        rows[0] = row0
        for c, v in enumerate(row0):
            rowmask[0] |= 1 << v
            colmask[c] = 1 << v
        start = n
    total = n * n
    stopped = False

    def fill(cell: int) -> None:
        nonlocal stopped
        if cell == total:
            if emit(rows):
                stopped = True
            return
        r, c = divmod(cell, n)
        row = rows[r]
        for v in range(n):
            bit = 1 << v
            if row_inj and rowmask[r] & bit:
                continue
            if col_inj and colmask[c] & bit:
                continue
            row[c] = v
            rowmask[r] |= bit
            colmask[c] |= bit
            fill(cell + 1)
            rowmask[r] ^= bit
            colmask[c] ^= bit
            if stopped:
                return

    fill(start)
    return stopped


def enumerate_tables(order: int, structure: str,
                     visitor: Callable[[CayleyTable], None] | None = None) -> int:
    """Visit every table of ``order`` with the given structure exactly once.

    Returns the visit count.  Structure is one of none, left (row
    injectivity), right (column injectivity), quasigroup (both).
    """
    structure = normalize_structure(structure)
    _guard_order(order, structure)
    row_inj, col_inj = _structure_flags(structure)
    count = 0

    def emit(rows):
        nonlocal count
        count += 1
        if visitor is not None:
            visitor(CayleyTable(order, tuple(tuple(r) for r in rows)))
        return False

    _scan_grids(order, row_inj, col_inj, emit)
    return count


@dataclass(frozen=True)
class Constraint:
    """What a searched table must look like.

    ``satisfies`` and ``refutes`` are registry identity names; a table
    matches when it has the structure, every satisfies-identity holds, and
    every refutes-identity fails.
    """

    structure: str = "none"
    satisfies: tuple[str, ...] = ()
    refutes: tuple[str, ...] = ()

    def __post_init__(self):
        normalize_structure(self.structure)
        for name in (*self.satisfies, *self.refutes):
            if name not in REGISTRY_NAMES:
                raise ValueError(f"unknown identity {name!r} in constraint")
        overlap = set(self.satisfies) & set(self.refutes)
        if overlap:
            raise ValueError(f"satisfies and refutes overlap: {sorted(overlap)}")


@dataclass
class OrderStats:
    order: int
    visited: int
    matched: int


@dataclass
class SearchReport:
    orders: list[OrderStats]
    witnesses: list[CayleyTable]
    exhausted: bool


def _first_rows(n: int, row_inj: bool) -> Iterator[tuple[int, ...]]:
    if row_inj:
        return permutations(range(n))
    return product(range(n), repeat=n)


def _search_branch(args) -> tuple[int, int, list, bool]:
    """Scan one first-row branch; the unit of work distributed to workers.

    Returns (visited, matched, witnesses, capped) where witnesses are
    (branch-local visit index, rows) pairs, at most ``limit`` of them.
    Counts are totals for the whole branch unless capped, in which case
    they stop at the capping table; the merge step never needs more.
    """
    n, row_inj, col_inj, first_row, satisfies, refutes, limit = args
    sat = [compiled_checker(builtin(name)) for name in satisfies]
    ref = [compiled_checker(builtin(name)) for name in refutes]
    dom = tuple(range(n))
    visited = 0
    matched = 0
    witnesses: list[tuple[int, tuple]] = []

    def emit(rows):
        nonlocal visited, matched
        visited += 1
        for chk in sat:
            if chk(rows, dom) is not None:
                return False
        for chk in ref:
            if chk(rows, dom) is None:
                return False
        matched += 1
        if limit:
            witnesses.append((visited - 1, tuple(tuple(r) for r in rows)))
            if len(witnesses) >= limit:
                return True
        return False

    capped = _scan_grids(n, row_inj, col_inj, emit, first_row)
    return visited, matched, witnesses, capped


def _branch_outcomes(tasks: Iterable, workers: int) -> Iterator:
    if workers <= 1:
        for task in tasks:
            yield _search_branch(task)
    else:
        with multiprocessing.Pool(workers) as pool:
            yield from pool.imap(_search_branch, tasks, chunksize=1)


def search(max_order: int, constraint: Constraint, limit: int = 1,
           workers: int = 1) -> SearchReport:
    """Scan orders 1..max_order for tables matching ``constraint``.

    Collects up to ``limit`` witnesses (0 means count only); the scan stops
    once the limit is reached, and ``exhausted`` reports whether the whole
    space was covered.  Work is split on the first row and merged in
    lexicographic branch order, so the report is identical for any number
    of workers.
    """
    structure = normalize_structure(constraint.structure)
    _guard_order(max_order, structure)
    row_inj, col_inj = _structure_flags(structure)
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    order_stats: list[OrderStats] = []
    witness_rows: list[tuple] = []
    exhausted = True
    for n in range(1, max_order + 1):
        tasks = ((n, row_inj, col_inj, fr, constraint.satisfies,
                  constraint.refutes, limit) for fr in _first_rows(n, row_inj))
        visited = 0
        matched = 0
        stopped = False
        for b_visited, b_matched, b_wit, _capped in _branch_outcomes(tasks, workers):
            if limit:
                take = limit - len(witness_rows)
                if take <= len(b_wit):
                    # the limit fills inside this branch: count only up to
                    # the table that filled it, as a sequential scan would
                    witness_rows.extend(rows for _, rows in b_wit[:take])
                    visited += b_wit[take - 1][0] + 1
                    matched += take
                    stopped = True
                    break
            witness_rows.extend(rows for _, rows in b_wit)
            visited += b_visited
            matched += b_matched
        order_stats.append(OrderStats(n, visited, matched))
        if stopped:
            exhausted = False
            break
    witnesses = [CayleyTable(len(rows), rows) for rows in witness_rows]
    return SearchReport(order_stats, witnesses, exhausted)


def canonical_form(table: CayleyTable) -> CayleyTable:
    """The lexicographically least flattened table over all n! relabelings.

    Two tables are isomorphic exactly when their canonical forms are equal.
    """
    n = table.order
    if n > 8:
        raise OrderGuardError(f"canonical_form supports order <= 8, got {n}")
    rows = table.rows
    best: tuple[int, ...] | None = None
    for perm in permutations(range(n)):
        flat = [0] * (n * n)
        for i in range(n):
            base = perm[i] * n
            row = rows[i]
            for j in range(n):
                flat[base + perm[j]] = perm[row[j]]
        key = tuple(flat)
        if best is None or key < best:
            best = key
    return CayleyTable(n, tuple(tuple(best[i * n:(i + 1) * n]) for i in range(n)))


@dataclass
class TheoremOrderStats:
    order: int
    visited: int
    satisfying: int
    witnesses: int


@dataclass
class TheoremReport:
    orders: list[TheoremOrderStats]
    witnesses: list[CayleyTable]
    passed: bool


def verify_theorem(max_order: int, force: bool = False) -> TheoremReport:
    """Scan all left-cancellative tables for ones satisfying i2 and i3 but
    not i1; finding none confirms the implication up to ``max_order``.

    Guarded at order 4 (order 5 scans (5!)^5 tables; pass ``force`` to
    allow it anyway).
    """
    cap = 5 if force else 4
    if not 1 <= max_order <= cap:
        hint = "" if force else " (use force for 5)"
        raise OrderGuardError(f"max_order {max_order} outside 1..{cap}{hint}")
    chk1 = compiled_checker(builtin("i1"))
    chk2 = compiled_checker(builtin("i2"))
    chk3 = compiled_checker(builtin("i3"))
    order_stats: list[TheoremOrderStats] = []
    witnesses: list[CayleyTable] = []
    for n in range(1, max_order + 1):
        dom = tuple(range(n))
        visited = 0
        satisfying = 0
        found_before = len(witnesses)

        def emit(rows):
            nonlocal visited, satisfying
            visited += 1
            if chk2(rows, dom) is None and chk3(rows, dom) is None:
                satisfying += 1
                if chk1(rows, dom) is not None:
                    witnesses.append(CayleyTable(n, tuple(tuple(r) for r in rows)))
            return False

        _scan_grids(n, True, False, emit)
        order_stats.append(
            TheoremOrderStats(n, visited, satisfying, len(witnesses) - found_before))
    return TheoremReport(order_stats, witnesses, not witnesses)


@dataclass
class EquivalenceOrderStats:
    order: int
    quasigroups: int
    s123: int
    kepka: int
    corollary: int
    trimedial: int
    medial: int
    agree: bool
    medial_subset: bool


@dataclass
class EquivalenceReport:
    orders: list[EquivalenceOrderStats]
    passed: bool
    disagreement: CayleyTable | None = None


def _trimedial_rows(rows, n: int, is_medial: bool, med_chk: Callable) -> bool:
    """Trimediality over a raw grid; ``is_medial`` is the whole-table status.

    Mirrors variety.trimedial_witness: a medial table is trimedial, and a
    seed whose closure is the whole (non-medial) carrier fails immediately.
    """
    if is_medial:
        return True
    seen: set[frozenset[int]] = set()
    for size in range(1, min(3, n) + 1):
        for seed in combinations(range(n), size):
            cl = _closure(rows, n, seed)
            if cl in seen:
                continue
            seen.add(cl)
            if len(cl) == n:
                return False
            if med_chk(rows, tuple(sorted(cl))) is not None:
                return False
    return True


def verify_equivalences(max_order: int) -> EquivalenceReport:
    """Enumerate all quasigroups per order and compare four sets of tables:
    those satisfying i1+i2+i3, those satisfying kepka, those satisfying
    corollary, and the trimedial ones.

    Passes when the four sets coincide at every order and every medial
    quasigroup is trimedial.  Each membership is computed independently
    from its own definition.
    """
    if not 1 <= max_order <= 5:
        raise OrderGuardError(f"max_order {max_order} outside 1..5")
    med = compiled_checker(builtin("medial"))
    chk1 = compiled_checker(builtin("i1"))
    chk2 = compiled_checker(builtin("i2"))
    chk3 = compiled_checker(builtin("i3"))
    chk_k = compiled_checker(builtin("kepka"))
    chk_c = compiled_checker(builtin("corollary"))
    order_stats: list[EquivalenceOrderStats] = []
    disagreement: CayleyTable | None = None
    for n in range(1, max_order + 1):
        dom = tuple(range(n))
        counts = {"total": 0, "s123": 0, "kepka": 0, "corollary": 0,
                  "trimedial": 0, "medial": 0}
        flags = {"agree": True, "medial_subset": True}

        def emit(rows):
            nonlocal disagreement
            counts["total"] += 1
            b_medial = med(rows, dom) is None
            b_123 = (chk1(rows, dom) is None and chk2(rows, dom) is None
                     and chk3(rows, dom) is None)
            b_kepka = chk_k(rows, dom) is None
            b_corollary = chk_c(rows, dom) is None
            b_trimedial = _trimedial_rows(rows, n, b_medial, med)
            counts["medial"] += b_medial
            counts["s123"] += b_123
            counts["kepka"] += b_kepka
            counts["corollary"] += b_corollary
            counts["trimedial"] += b_trimedial
            if not b_123 == b_kepka == b_corollary == b_trimedial:
                flags["agree"] = False
                if disagreement is None:
                    disagreement = CayleyTable(n, tuple(tuple(r) for r in rows))
            if b_medial and not b_trimedial:
                flags["medial_subset"] = False
            return False

        _scan_grids(n, True, True, emit)
        order_stats.append(EquivalenceOrderStats(
            n, counts["total"], counts["s123"], counts["kepka"],
            counts["corollary"], counts["trimedial"], counts["medial"],
            flags["agree"], flags["medial_subset"]))
    passed = all(s.agree and s.medial_subset for s in order_stats)
    return EquivalenceReport(order_stats, passed, disagreement)
