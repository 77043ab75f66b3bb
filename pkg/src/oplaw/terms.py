"""Terms in context over a finitary signature.

A term in context  t : n  is a tree whose leaves are variable indices in
1..n and whose internal nodes are signature symbols; n is part of the data,
so unused variables are allowed.  Concrete syntax is `name(arg1,...,argk)`
with variables written x1..xn and nullary symbols written bare.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

from .errors import ArityMismatch, OutOfRange, ParseError, SizeMismatch, UnknownSymbol
from .finset import FinFunction


@dataclass(frozen=True)
class Var:
    index: int  # 1-based

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(str(a) for a in self.args)})"


Term = Var | App

_VAR_RE = re.compile(r"x([1-9][0-9]*)$")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Signature:
    """Finite map from symbol names to arities."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ArityMismatch(f"duplicate symbol in {names}")
        for name, arity in self.symbols:
            if arity < 0:
                raise ArityMismatch(f"negative arity for {name}")
            if _VAR_RE.match(name):
                raise ArityMismatch(f"symbol name {name} is reserved for variables")

    @staticmethod
    def of(mapping: dict[str, int]) -> "Signature":
        return Signature(tuple(sorted(mapping.items())))

    def arity(self, symbol: str) -> int:
        for name, arity in self.symbols:
            if name == symbol:
                return arity
        raise UnknownSymbol(f"symbol {symbol!r} not in signature")

    def __contains__(self, symbol: str) -> bool:
        return any(name == symbol for name, _ in self.symbols)

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)


@dataclass(frozen=True)
class TermInContext:
    context_length: int
    body: Term

    def __post_init__(self):
        if self.context_length < 0:
            raise OutOfRange("negative context length")
        mx = max_variable(self.body)
        if mx > self.context_length:
            raise OutOfRange(
                f"variable x{mx} exceeds context length {self.context_length}")

    def __str__(self):
        return f"{self.body} : {self.context_length}"

    def validate(self, signature: Signature) -> None:
        """Check node arities against the signature."""
        def walk(t: Term):
            if isinstance(t, App):
                if t.symbol not in signature:
                    raise UnknownSymbol(f"symbol {t.symbol!r} not in signature")
                if signature.arity(t.symbol) != len(t.args):
                    raise ArityMismatch(
                        f"{t.symbol} declared with arity {signature.arity(t.symbol)},"
                        f" applied to {len(t.args)} arguments")
                for a in t.args:
                    walk(a)
        walk(self.body)


@dataclass(frozen=True)
class TermClassification:
    regular: bool
    linear: bool
    linear_regular: bool
    strongly_regular: bool


def max_variable(t: Term) -> int:
    if isinstance(t, Var):
        return t.index
    return max((max_variable(a) for a in t.args), default=0)


def node_count(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(node_count(a) for a in t.args)


def variable_occurrences(t: Term) -> list[int]:
    """Variable indices in left-to-right occurrence order."""
    if isinstance(t, Var):
        return [t.index]
    out: list[int] = []
    for a in t.args:
        out.extend(variable_occurrences(a))
    return out


def classify(t: TermInContext) -> TermClassification:
    occ = variable_occurrences(t.body)
    counts = [0] * t.context_length
    for i in occ:
        counts[i - 1] += 1
    regular = all(c >= 1 for c in counts)
    linear = all(c <= 1 for c in counts)
    lr = regular and linear
    strongly = lr and occ == list(range(1, t.context_length + 1))
    return TermClassification(regular, linear, lr, strongly)


def substitute(t: TermInContext, args: Sequence[TermInContext]) -> TermInContext:
    """Simultaneous substitution of args[i-1] for x_i."""
    if len(args) != t.context_length:
        raise ArityMismatch(
            f"term over context {t.context_length} needs {t.context_length} arguments,"
            f" got {len(args)}")
    if args:
        n = args[0].context_length
        if any(a.context_length != n for a in args):
            raise ArityMismatch("substituted terms must share one context")
    else:
        n = 0
    bodies = [a.body for a in args]

    def walk(s: Term) -> Term:
        if isinstance(s, Var):
            return bodies[s.index - 1]
        return App(s.symbol, tuple(walk(a) for a in s.args))

    return TermInContext(n, walk(t.body))


def simple_substitute(t: TermInContext, phi: FinFunction) -> TermInContext:
    """Replace every occurrence of x_i by x_phi(i); the context becomes phi's codomain."""
    if phi.domain_size != t.context_length:
        raise SizeMismatch(
            f"function domain {phi.domain_size} != context {t.context_length}")

    def walk(s: Term) -> Term:
        if isinstance(s, Var):
            return Var(phi(s.index))
        return App(s.symbol, tuple(walk(a) for a in s.args))

    return TermInContext(phi.codomain_size, walk(t.body))


def with_context(t: TermInContext, n: int) -> TermInContext:
    """Reinterpret t in a (usually larger) context of length n."""
    if max_variable(t.body) > n:
        raise OutOfRange(f"term uses variables beyond context {n}")
    return TermInContext(n, t.body)


def subterm_at(t: Term, position: tuple[int, ...]) -> Term:
    for i in position:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise OutOfRange(f"no subterm at position {position}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, position: tuple[int, ...], replacement: Term) -> Term:
    if not position:
        return replacement
    if not isinstance(t, App) or not 1 <= position[0] <= len(t.args):
        raise OutOfRange(f"no subterm at position {position}")
    i = position[0]
    new_args = list(t.args)
    new_args[i - 1] = replace_at(t.args[i - 1], position[1:], replacement)
    return App(t.symbol, tuple(new_args))


def positions(t: Term) -> Iterator[tuple[int, ...]]:
    """All positions of t in preorder; () is the root."""
    yield ()
    if isinstance(t, App):
        for i, a in enumerate(t.args, start=1):
            for p in positions(a):
                yield (i,) + p


# ---------------------------------------------------------------------------
# enumeration

def enumerate_terms(signature: Signature, context_length: int, max_nodes: int,
                    predicate: Optional[Callable[[TermInContext], bool]] = None,
                    ) -> list[TermInContext]:
    """All terms with at most max_nodes nodes, by size then syntax.

    The order is deterministic: primarily by node count, then by the string
    rendering, so downstream quotients are reproducible.
    """
    if max_nodes < 1:
        return []
    by_size: dict[int, list[Term]] = {}
    leaves: list[Term] = [Var(i) for i in range(1, context_length + 1)]
    leaves += [App(name, ()) for name, ar in signature.symbols if ar == 0]
    by_size[1] = leaves
    for size in range(2, max_nodes + 1):
        bucket: list[Term] = []
        for name, ar in signature.symbols:
            if ar == 0:
                continue
            for split in _positive_compositions(size - 1, ar):
                pools = [by_size.get(s, []) for s in split]
                for combo in itertools.product(*pools):
                    bucket.append(App(name, combo))
        by_size[size] = bucket
    out: list[TermInContext] = []
    for size in range(1, max_nodes + 1):
        chunk = [TermInContext(context_length, b) for b in by_size.get(size, [])]
        chunk.sort(key=lambda t: str(t.body))
        out.extend(chunk)
    if predicate is not None:
        out = [t for t in out if predicate(t)]
    return out


def _positive_compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _positive_compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_linear_regular(signature: Signature, context_length: int,
                             max_nodes: int) -> list[TermInContext]:
    """Linear-regular terms in context, enumerated without generate-and-filter.

    Equivalent to enumerate_terms with a linear-regular predicate, but the
    recursion distributes the variable set over subterms so it stays cheap
    on larger budgets.
    """
    sig = signature.symbols

    @lru_cache(maxsize=None)
    def gen_exact(vars_used: tuple[int, ...], size: int) -> tuple[Term, ...]:
        out: list[Term] = []
        if size == 1:
            if len(vars_used) == 1:
                out.append(Var(vars_used[0]))
            if not vars_used:
                out.extend(App(name, ()) for name, ar in sig if ar == 0)
            return tuple(out)
        for name, ar in sig:
            if ar == 0 or size - 1 < ar:
                continue
            for split in _distribute(vars_used, ar):
                for sizes in _positive_compositions(size - 1, ar):
                    pools = [gen_exact(part, s) for part, s in zip(split, sizes)]
                    for combo in itertools.product(*pools):
                        out.append(App(name, combo))
        return tuple(out)

    full = tuple(range(1, context_length + 1))
    result = []
    for size in range(1, max_nodes + 1):
        chunk = [TermInContext(context_length, b) for b in gen_exact(full, size)]
        chunk.sort(key=lambda t: str(t.body))
        result.extend(chunk)
    return result


def _distribute(items: tuple[int, ...], parts: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All ways to split an ordered tuple into `parts` ordered subsets."""
    if parts == 0:
        if not items:
            yield ()
        return
    if not items:
        yield ((),) * parts
        return
    head, rest = items[0], items[1:]
    for split in _distribute(rest, parts):
        for i in range(parts):
            yield split[:i] + ((head,) + split[i],) + split[i + 1:]


# ---------------------------------------------------------------------------
# concrete syntax

def term_to_str(t: TermInContext) -> str:
    return str(t.body)


def parse_term(text: str, signature: Optional[Signature] = None,
               context_length: Optional[int] = None) -> TermInContext:
    """Parse `name(arg1,...,argk)` syntax; context defaults to the max variable."""
    tokens = _tokenize(text)
    body, pos = _parse_node(tokens, 0, text)
    if pos != len(tokens):
        raise ParseError(f"trailing input after term in {text!r}")
    n = max_variable(body) if context_length is None else context_length
    t = TermInContext(n, body)
    if signature is not None:
        t.validate(signature)
    return t


def _tokenize(text: str) -> list[str]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "(),":
            tokens.append(c)
            i += 1
            continue
        m = _NAME_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {c!r} in {text!r}", column=i + 1)
        tokens.append(m.group(0))
        i = m.end()
    return tokens


def _parse_node(tokens: list[str], pos: int, text: str) -> tuple[Term, int]:
    if pos >= len(tokens):
        raise ParseError(f"unexpected end of term in {text!r}")
    tok = tokens[pos]
    if tok in "(),":
        raise ParseError(f"unexpected {tok!r} in {text!r}")
    m = _VAR_RE.match(tok)
    if m:
        return Var(int(m.group(1))), pos + 1
    pos += 1
    if pos < len(tokens) and tokens[pos] == "(":
        pos += 1
        args = []
        if tokens[pos] == ")":
            return App(tok, ()), pos + 1
        while True:
            arg, pos = _parse_node(tokens, pos, text)
            args.append(arg)
            if pos >= len(tokens):
                raise ParseError(f"unclosed parenthesis in {text!r}")
            if tokens[pos] == ",":
                pos += 1
                continue
            if tokens[pos] == ")":
                return App(tok, tuple(args)), pos + 1
            raise ParseError(f"expected ',' or ')' in {text!r}")
    return App(tok, ()), pos
