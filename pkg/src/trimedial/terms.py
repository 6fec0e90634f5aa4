"""Terms over a single binary operation, and identities between them.

A term is a binary tree whose leaves are single-letter variables (a-z).
The concrete syntax uses an explicit ``*`` for the operation::

    identity := term "=" term
    term     := factor ("*" factor)*
    factor   := variable | "(" term ")"

``*`` is left-associative and whitespace is ignored.  Rendering is fully
parenthesized, so textual equality of rendered terms coincides with tree
equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union


class ParseError(ValueError):
    """Raised on malformed term or identity text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InvalidPathError(ValueError):
    """Raised when a path walks off a variable or uses a bad direction."""


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if len(self.name) != 1 or not ("a" <= self.name <= "z"):
            raise ValueError(f"variable name must be a single letter a-z, got {self.name!r}")


@dataclass(frozen=True)
class Prod:
    left: "Term"
    right: "Term"


Term = Union[Var, Prod]

# A path addresses a subterm: () is the root, then "L"/"R" child hops.
Path = tuple[str, ...]

Substitution = Mapping[str, Term]


@dataclass(frozen=True)
class Identity:
    """An equation between two terms, asserted for all variable values."""

    lhs: Term
    rhs: Term

    @property
    def vars(self) -> frozenset[str]:
        return variables(self.lhs) | variables(self.rhs)


def variables(term: Term) -> frozenset[str]:
    """The set of variable names occurring in ``term``."""
    if isinstance(term, Var):
        return frozenset((term.name,))
    return variables(term.left) | variables(term.right)


def render(term: Term) -> str:
    """Canonical text: each product fully parenthesized, e.g. ``(x*(y*z))``."""
    if isinstance(term, Var):
        return term.name
    return f"({render(term.left)}*{render(term.right)})"


def render_identity(ident: Identity) -> str:
    return f"{render(ident.lhs)} = {render(ident.rhs)}"


class _Scanner:
    """Single-character token stream with positions; whitespace skipped."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def take(self) -> str:
        ch = self.peek()
        assert ch is not None
        self.pos += 1
        return ch


def _parse_factor(sc: _Scanner) -> Term:
    ch = sc.peek()
    if ch is None:
        raise ParseError("expected a variable or '('", sc.pos)
    if "a" <= ch <= "z":
        sc.take()
        return Var(ch)
    if ch == "(":
        sc.take()
        inner = _parse_product(sc)
        if sc.peek() != ")":
            raise ParseError("unbalanced parenthesis: expected ')'", sc.pos)
        sc.take()
        return inner
    if ch in "*)=":
        raise ParseError(f"expected a variable or '(', found {ch!r}", sc.pos)
    raise ParseError(f"illegal character {ch!r}", sc.pos)


def _parse_product(sc: _Scanner) -> Term:
    node = _parse_factor(sc)
    while sc.peek() == "*":
        sc.take()
        node = Prod(node, _parse_factor(sc))
    return node


def parse_term(text: str) -> Term:
    """Parse a single term; the whole string must be consumed."""
    sc = _Scanner(text)
    term = _parse_product(sc)
    if sc.peek() is not None:
        raise ParseError(f"unexpected {sc.peek()!r} after term", sc.pos)
    return term


def parse_identity(text: str) -> Identity:
    """Parse ``term = term``."""
    sc = _Scanner(text)
    lhs = _parse_product(sc)
    if sc.peek() != "=":
        raise ParseError("expected '='", sc.pos)
    sc.take()
    rhs = _parse_product(sc)
    if sc.peek() is not None:
        raise ParseError(f"unexpected {sc.peek()!r} after identity", sc.pos)
    return Identity(lhs, rhs)


def substitute(term: Term, subst: Substitution) -> Term:
    """Replace every variable leaf by its image, simultaneously.

    Unmapped variables are left unchanged; inserted terms are not
    re-substituted into.
    """
    if isinstance(term, Var):
        return subst.get(term.name, term)
    return Prod(substitute(term.left, subst), substitute(term.right, subst))


def subterm_at(term: Term, path: Iterable[str]) -> Term:
    """The subterm reached by following L/R hops from the root."""
    node = term
    for i, step in enumerate(path):
        if isinstance(node, Var):
            raise InvalidPathError(f"path walks off a variable at hop {i}")
        if step == "L":
            node = node.left
        elif step == "R":
            node = node.right
        else:
            raise InvalidPathError(f"bad path component {step!r} (want 'L' or 'R')")
    return node


def replace_at(term: Term, path: Iterable[str], new: Term) -> Term:
    """A copy of ``term`` with the subterm at ``path`` replaced by ``new``."""
    steps = tuple(path)

    def go(node: Term, i: int) -> Term:
        if i == len(steps):
            return new
        if isinstance(node, Var):
            raise InvalidPathError(f"path walks off a variable at hop {i}")
        step = steps[i]
        if step == "L":
            return Prod(go(node.left, i + 1), node.right)
        if step == "R":
            return Prod(node.left, go(node.right, i + 1))
        raise InvalidPathError(f"bad path component {step!r} (want 'L' or 'R')")

    return go(term, 0)
