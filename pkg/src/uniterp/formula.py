"""Propositional formulas of intuitionistic logic.

Formulas are hash-consed: building the same tree twice returns the same
object, so ``==`` is identity and hashing is O(1).  Negation and the
``true`` constant are available as notation (``Neg(a)`` is ``Impl(a, Bottom())``);
``Top`` is kept as its own constant of degree 0.
"""
from __future__ import annotations

import re
import threading
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Variable", "Bottom", "Top", "Conj", "Disj", "Impl", "Neg",
    "conj_all", "disj_all", "parse", "render", "impl_degree", "substitute",
    "variables", "size", "subformulas", "FormulaSyntaxError",
]

_table: dict[tuple, "Formula"] = {}
_lock = threading.Lock()


class Formula:
    """Base class of interned formula nodes."""

    __slots__ = ("_key", "_hash", "uid", "__weakref__")
    arity = 0

    def __new__(cls, *args):
        key = (cls.__name__,) + args
        node = _table.get(key)
        if node is not None:
            return node
        with _lock:
            node = _table.get(key)
            if node is None:
                node = object.__new__(cls)
                node._key = key
                node._hash = hash(key)
                node.uid = len(_table)
                _table[key] = node
        return node

    def __init__(self, *args):
        pass

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __lt__(self, other):
        return self.uid < other.uid

    def __reduce__(self):
        return (type(self), self._key[1:])

    def __repr__(self):
        return f"<{render(self)}>"

    def __str__(self):
        return render(self)

    # operator sugar, handy in tests and interactive use
    def __and__(self, other):
        return Conj(self, other)

    def __or__(self, other):
        return Disj(self, other)

    def __rshift__(self, other):
        return Impl(self, other)

    def __invert__(self):
        return Neg(self)


class Variable(Formula):
    __slots__ = ()
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        return super().__new__(cls, name)

    @property
    def name(self) -> str:
        return self._key[1]


class Bottom(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)


class Top(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)


class _Binary(Formula):
    __slots__ = ()
    __match_args__ = ("left", "right")
    arity = 2

    def __new__(cls, left: Formula, right: Formula):
        if not isinstance(left, Formula) or not isinstance(right, Formula):
            raise TypeError("operands must be formulas")
        return super().__new__(cls, left, right)

    @property
    def left(self) -> Formula:
        return self._key[1]

    @property
    def right(self) -> Formula:
        return self._key[2]


class Conj(_Binary):
    __slots__ = ()


class Disj(_Binary):
    __slots__ = ()


class Impl(_Binary):
    __slots__ = ()


def Neg(f: Formula) -> Formula:
    return Impl(f, Bottom())


def conj_all(fs: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``Top()``."""
    fs = list(fs)
    if not fs:
        return Top()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Conj(f, out)
    return out


def disj_all(fs: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``Bottom()``."""
    fs = list(fs)
    if not fs:
        return Bottom()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Disj(f, out)
    return out


# ---------------------------------------------------------------- structure

def _memo_fold(f: Formula, leaf, node, cache: dict) -> object:
    # iterative post-order fold, safe on deep formulas
    stack = [f]
    while stack:
        g = stack[-1]
        if g in cache:
            stack.pop()
            continue
        if isinstance(g, _Binary):
            l, r = g.left, g.right
            pending = [c for c in (l, r) if c not in cache]
            if pending:
                stack.extend(pending)
                continue
            cache[g] = node(g, cache[l], cache[r])
        else:
            cache[g] = leaf(g)
        stack.pop()
    return cache[f]


_degree_cache: dict[Formula, int] = {}
_vars_cache: dict[Formula, frozenset] = {}


def impl_degree(f: Formula) -> int:
    """Maximum nesting depth of implications in ``f``."""
    return _memo_fold(
        f,
        lambda g: 0,
        lambda g, a, b: max(a, b) + (1 if isinstance(g, Impl) else 0),
        _degree_cache,
    )


def variables(f: Formula) -> frozenset:
    return _memo_fold(
        f,
        lambda g: frozenset([g.name]) if isinstance(g, Variable) else frozenset(),
        lambda g, a, b: a | b,
        _vars_cache,
    )


def size(f: Formula) -> int:
    """Number of nodes of the syntax tree (shared subtrees counted each time)."""
    return _memo_fold(f, lambda g: 1, lambda g, a, b: a + b + 1, {})


def subformulas(f: Formula) -> Iterator[Formula]:
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        if isinstance(g, _Binary):
            stack.append(g.right)
            stack.append(g.left)


def substitute(f: Formula, var: str, replacement: Formula) -> Formula:
    """Replace every occurrence of ``var`` in ``f`` by ``replacement``.

    No simplification is performed.  Propositional formulas bind nothing,
    so the replacement is trivially capture-free.
    """
    target = Variable(var)
    return _memo_fold(
        f,
        lambda g: replacement if g is target else g,
        lambda g, a, b: type(g)(a, b),
        {},
    )


# ---------------------------------------------------------------- printing

_PREC = {Impl: 1, Disj: 2, Conj: 3}


def render(f: Formula, unicode: bool = False) -> str:
    """Print ``f`` in the input grammar with minimal parentheses.

    ``a -> b`` with ``b`` bottom is printed as ``~a``.
    """
    sym = {Conj: " ∧ ", Disj: " ∨ ", Impl: " → "} if unicode else {Conj: " & ", Disj: " | ", Impl: " -> "}
    neg = "¬" if unicode else "~"
    bot, top = ("⊥", "⊤") if unicode else ("false", "true")

    def go(g: Formula) -> tuple[str, int]:
        # returns text and its binding strength (4 = atomic/prefix)
        if isinstance(g, Variable):
            return g.name, 4
        if isinstance(g, Bottom):
            return bot, 4
        if isinstance(g, Top):
            return top, 4
        if isinstance(g, Impl) and isinstance(g.right, Bottom):
            s, p = go(g.left)
            return neg + (s if p == 4 else f"({s})"), 4
        op = type(g)
        prec = _PREC[op]
        ls, lp = go(g.left)
        rs, rp = go(g.right)
        if op is Impl:
            # right-associative
            ls = ls if lp > prec else f"({ls})"
            rs = rs if rp >= prec else f"({rs})"
        else:
            # & and | parse left-associatively
            ls = ls if lp >= prec else f"({ls})"
            rs = rs if rp > prec else f"({rs})"
        return ls + sym[op] + rs, prec

    import sys
    limit = sys.getrecursionlimit()
    depth = _memo_fold(f, lambda g: 1, lambda g, a, b: 1 + max(a, b), {})
    if depth * 3 + 100 > limit:
        sys.setrecursionlimit(depth * 3 + 100)
    return go(f)[0]


# ---------------------------------------------------------------- parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->|→)|(?P<and>&|∧)|(?P<or>\||∨)|(?P<not>~|¬)"
    r"|(?P<lp>\()|(?P<rp>\))|(?P<bot>⊥)|(?P<top>⊤)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if kind == "ident" and value in ("false", "true"):
            kind = "bot" if value == "false" else "top"
        out.append((kind, value, start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {kind}, found {what}", tok[2], self.text)
        self.i += 1
        return tok

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "arrow":
            self.i += 1
            return Impl(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "or":
            self.i += 1
            f = Disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek() == "and":
            self.i += 1
            f = Conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.toks[self.i]
        if kind == "not":
            self.i += 1
            return Neg(self.unary())
        if kind == "lp":
            self.i += 1
            f = self.implication()
            self.take("rp")
            return f
        if kind == "ident":
            self.i += 1
            return Variable(value)
        if kind == "bot":
            self.i += 1
            return Bottom()
        if kind == "top":
            self.i += 1
            return Top()
        what = "end of input" if kind == "eof" else repr(value)
        raise FormulaSyntaxError(f"expected a formula, found {what}", pos, self.text)


def parse(text: str) -> Formula:
    """Parse a formula.

    ``~`` binds tightest, then ``&``, ``|``, and ``->`` (right-associative)
    loosest.  ``false``/``true`` and the Unicode forms ¬ ∧ ∨ → ⊥ ⊤ are
    accepted.

    >>> render(parse("p -> q | r"))
    'p -> q | r'
    """
    p = _Parser(text)
    f = p.implication()
    p.take("eof")
    return f
