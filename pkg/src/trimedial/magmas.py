"""Finite groupoids as Cayley tables: evaluation, identity checking, cancellation.

Elements are the contiguous integers 0..n-1.  The text format for tables is
the first line ``n`` followed by n rows of n space-separated entries, row i
listing i*0 .. i*(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .terms import Identity, Prod, Term, Var


class TableFormatError(ValueError):
    """Raised on malformed table text."""


class UnassignedVariableError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} has no assigned value")
        self.name = name


Assignment = Mapping[str, int]


@dataclass(frozen=True)
class CayleyTable:
    """An order-n groupoid; ``rows[i][j]`` is the product i*j."""

    order: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.order
        if n < 1:
            raise TableFormatError(f"order must be >= 1, got {n}")
        if len(self.rows) != n:
            raise TableFormatError(f"expected {n} rows, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            if len(row) != n:
                raise TableFormatError(f"row {i} has {len(row)} entries, expected {n}")
            for j, v in enumerate(row):
                if not 0 <= v < n:
                    raise TableFormatError(f"entry {v} at ({i},{j}) out of range 0..{n - 1}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "CayleyTable":
        tup = tuple(tuple(r) for r in rows)
        return cls(len(tup), tup)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]


@dataclass(frozen=True)
class CancellationProfile:
    left_cancellative: bool
    right_cancellative: bool
    quasigroup: bool


@dataclass
class Counterexample:
    """A falsifying assignment for an identity, with both side values."""

    assignment: dict[str, int]
    lhs_value: int
    rhs_value: int


def load_table(text: str) -> CayleyTable:
    """Parse the table text format (header line ``n``, then n rows)."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TableFormatError("empty table text")
    head = lines[0].strip()
    try:
        n = int(head)
    except ValueError:
        raise TableFormatError(f"first line must be the order, got {head!r}") from None
    if n < 1:
        raise TableFormatError(f"order must be >= 1, got {n}")
    if len(lines) - 1 != n:
        raise TableFormatError(f"expected {n} rows after the header, got {len(lines) - 1}")
    rows = []
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != n:
            raise TableFormatError(f"row {i} has {len(tokens)} entries, expected {n}")
        row = []
        for tok in tokens:
            try:
                v = int(tok)
            except ValueError:
                raise TableFormatError(f"non-integer token {tok!r} in row {i}") from None
            if not 0 <= v < n:
                raise TableFormatError(f"entry {v} out of range 0..{n - 1} in row {i}")
            row.append(v)
        rows.append(tuple(row))
    return CayleyTable(n, tuple(rows))


def dump_table(table: CayleyTable) -> str:
    """Emit the text format, bit-exact: single spaces, newline-terminated rows."""
    out = [str(table.order)]
    for row in table.rows:
        out.append(" ".join(str(v) for v in row))
    return "\n".join(out) + "\n"


def evaluate(table: CayleyTable, term: Term, assignment: Assignment) -> int:
    """Evaluate ``term`` under ``assignment``, bottom up."""
    rows = table.rows
    n = table.order

    def go(t: Term) -> int:
        if isinstance(t, Var):
            try:
                v = assignment[t.name]
            except KeyError:
                raise UnassignedVariableError(t.name) from None
            if not 0 <= v < n:
                raise ValueError(f"assigned value {v} for {t.name!r} out of range 0..{n - 1}")
            return v
        return rows[go(t.left)][go(t.right)]

    return go(term)


# Per-identity checkers are compiled to nested loops once and cached; the
# loops iterate sorted variable names with values drawn from a domain
# sequence, so the first failure found is the lexicographically least one.
_checker_cache: dict[Identity, Callable] = {}


def _compile_checker(ident: Identity) -> Callable:
    names = sorted(ident.vars)
    index = {v: i for i, v in enumerate(names)}

    def expr(t: Term) -> str:
        if isinstance(t, Var):
            return f"a{index[t.name]}"
        return f"t[{expr(t.left)}][{expr(t.right)}]"

    pad = "    "
    lines = ["def _check(t, dom):"]
    for i in range(len(names)):
        lines.append(pad * (i + 1) + f"for a{i} in dom:")
    depth = pad * (len(names) + 1)
    tup = ", ".join(f"a{i}" for i in range(len(names)))
    lines.append(depth + f"if {expr(ident.lhs)} != {expr(ident.rhs)}:")
    lines.append(depth + pad + f"return ({tup},)")
    lines.append(pad + "return None")
    namespace: dict = {}
    exec("\n".join(lines), namespace)
    return namespace["_check"]


def compiled_checker(ident: Identity) -> Callable:
    """A function ``(rows, domain) -> falsifying value tuple | None``.

    ``domain`` is the ascending sequence of elements each variable ranges
    over; value tuples follow sorted variable-name order.
    """
    chk = _checker_cache.get(ident)
    if chk is None:
        chk = _compile_checker(ident)
        _checker_cache[ident] = chk
    return chk


def check_identity_over(table: CayleyTable, ident: Identity,
                        domain: Sequence[int]) -> Counterexample | None:
    """Check ``ident`` with all variables ranging over ``domain`` only."""
    values = compiled_checker(ident)(table.rows, tuple(domain))
    if values is None:
        return None
    assignment = dict(zip(sorted(ident.vars), values))
    return Counterexample(assignment,
                          evaluate(table, ident.lhs, assignment),
                          evaluate(table, ident.rhs, assignment))


def check_identity(table: CayleyTable, ident: Identity) -> Counterexample | None:
    """None if the identity holds on the whole table, else the least counterexample.

    Assignments are tried in lexicographic order of value tuples over the
    identity's sorted variable names.
    """
    return check_identity_over(table, ident, range(table.order))


def holds(table: CayleyTable, ident: Identity) -> bool:
    return check_identity(table, ident) is None


def _all_distinct(seq: Iterable[int]) -> bool:
    mask = 0
    for v in seq:
        bit = 1 << v
        if mask & bit:
            return False
        mask |= bit
    return True


def cancellation_profile(table: CayleyTable) -> CancellationProfile:
    """Row injectivity gives left cancellation, column injectivity right."""
    n = table.order
    left = all(_all_distinct(row) for row in table.rows)
    right = all(_all_distinct(table.rows[i][j] for i in range(n)) for j in range(n))
    return CancellationProfile(left, right, left and right)


def relabel(table: CayleyTable, perm: Sequence[int]) -> CayleyTable:
    """Apply a permutation of 0..n-1 to rows, columns, and entries at once."""
    n = table.order
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm!r}")
    new = [[0] * n for _ in range(n)]
    for i in range(n):
        row = table.rows[i]
        pi = perm[i]
        for j in range(n):
            new[pi][perm[j]] = perm[row[j]]
    return CayleyTable(n, tuple(tuple(r) for r in new))
