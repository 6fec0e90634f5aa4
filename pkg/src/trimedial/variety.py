"""Named identities of the medial family, subgroupoid closure, and the
medial/trimedial predicates."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .magmas import (
    CayleyTable,
    Counterexample,
    cancellation_profile,
    check_identity,
    check_identity_over,
    compiled_checker,
    evaluate,
)
from .terms import Identity, parse_identity

REGISTRY_TEXT = {
    "medial": "(w*x)*(y*z) = (w*y)*(x*z)",
    "i1": "(x*x)*(y*z) = (x*y)*(x*z)",
    "i2": "(y*z)*(x*x) = (y*x)*(z*x)",
    "i3": "(x*(x*x))*(u*v) = (x*u)*((x*x)*v)",
    "kepka": "((x*x)*(y*z))*(((x*y)*(u*u))*((w*(w*w))*(z*v)))"
             " = ((x*y)*(x*z))*(((x*u)*(y*u))*((w*z)*((w*w)*v)))",
    "corollary": "((x*y)*(u*u))*((w*(w*w))*(z*v)) = ((x*u)*(y*u))*((w*z)*((w*w)*v))",
}

REGISTRY_NAMES = tuple(REGISTRY_TEXT)


class UnknownIdentityError(ValueError):
    def __init__(self, name: str):
        valid = ", ".join(REGISTRY_NAMES)
        super().__init__(f"unknown identity {name!r}; valid names: {valid}")
        self.name = name


class NotClosedError(ValueError):
    def __init__(self, a: int, b: int, product: int):
        super().__init__(f"subset not closed: {a}*{b} = {product} is outside it")
        self.pair = (a, b)


@lru_cache(maxsize=None)
def builtin(name: str) -> Identity:
    """Look up one of the named identities by registry name."""
    if name not in REGISTRY_TEXT:
        raise UnknownIdentityError(name)
    return parse_identity(REGISTRY_TEXT[name])


def _closure(rows, n: int, seed: Iterable[int]) -> frozenset[int]:
    current = set(seed)
    members = list(current)
    frontier = list(current)
    while frontier:
        added = []
        for a in frontier:
            row_a = rows[a]
            for b in members:
                for c in (row_a[b], rows[b][a]):
                    if c not in current:
                        current.add(c)
                        added.append(c)
        members.extend(added)
        frontier = added
    return frozenset(current)


def subgroupoid_closure(table: CayleyTable, seed: Iterable[int]) -> frozenset[int]:
    """Least superset of ``seed`` closed under the product."""
    seed = set(seed)
    for e in seed:
        if not 0 <= e < table.order:
            raise ValueError(f"seed element {e} out of range 0..{table.order - 1}")
    return _closure(table.rows, table.order, seed)


def is_medial_on(table: CayleyTable, subset: Iterable[int]) -> Counterexample | None:
    """Check the medial identity with all four variables ranging over ``subset``.

    The subset must be closed under the product; raises NotClosedError
    naming the first violating pair otherwise.
    """
    elems = sorted(set(subset))
    for e in elems:
        if not 0 <= e < table.order:
            raise ValueError(f"element {e} out of range 0..{table.order - 1}")
    inside = frozenset(elems)
    for a in elems:
        for b in elems:
            p = table.rows[a][b]
            if p not in inside:
                raise NotClosedError(a, b, p)
    return check_identity_over(table, builtin("medial"), elems)


@dataclass
class TrimedialWitness:
    """A generating set of size <= 3 whose closure is not medial."""

    seed: tuple[int, ...]
    counterexample: Counterexample


def trimedial_witness(table: CayleyTable) -> TrimedialWitness | None:
    """None if every subgroupoid generated by <= 3 elements is medial,
    else the first failing seed with its medial counterexample.

    Seeds are tried in lexicographic order of their sorted element lists,
    size 1 first, then 2, then 3.
    """
    # A globally medial table is trimedial outright: every subset check is
    # a restriction of the global one.
    global_cex = check_identity(table, builtin("medial"))
    if global_cex is None:
        return None
    n = table.order
    rows = table.rows
    med = compiled_checker(builtin("medial"))
    seen: set[frozenset[int]] = set()
    for size in range(1, min(3, n) + 1):
        for seed in combinations(range(n), size):
            cl = _closure(rows, n, seed)
            if cl in seen:
                continue
            seen.add(cl)
            if len(cl) == n:
                # closure is the whole carrier, already known non-medial
                return TrimedialWitness(seed, global_cex)
            dom = tuple(sorted(cl))
            values = med(rows, dom)
            if values is not None:
                medial = builtin("medial")
                assignment = dict(zip(sorted(medial.vars), values))
                lhs = evaluate(table, medial.lhs, assignment)
                rhs = evaluate(table, medial.rhs, assignment)
                return TrimedialWitness(seed, Counterexample(assignment, lhs, rhs))
    return None


def is_trimedial(table: CayleyTable) -> bool:
    return trimedial_witness(table) is None


@dataclass(frozen=True)
class PropertyReport:
    """Isomorphism-invariant summary of a table; field order is fixed."""

    left_cancellative: bool
    right_cancellative: bool
    quasigroup: bool
    medial: bool
    i1: bool
    i2: bool
    i3: bool
    kepka: bool
    corollary: bool
    trimedial: bool


def classify(table: CayleyTable) -> PropertyReport:
    """Cancellation profile, all six registry identities, and trimediality."""
    prof = cancellation_profile(table)
    flags = {name: check_identity(table, builtin(name)) is None for name in REGISTRY_NAMES}
    return PropertyReport(
        prof.left_cancellative,
        prof.right_cancellative,
        prof.quasigroup,
        flags["medial"],
        flags["i1"],
        flags["i2"],
        flags["i3"],
        flags["kepka"],
        flags["corollary"],
        is_trimedial(table),
    )
