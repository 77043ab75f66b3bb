"""Line-oriented DSL for theory and operad presentations.

Theories::

    theory Monoid
    op m : 2
    op e : 0
    ax m(x1,m(x2,x3)) = m(m(x1,x2),x3)
    ax m(x1,e) = x1 : 1
    prover normalform:monoid | bounded:<steps>,<size>

Operads::

    operad Gadget maxarity 2
    carrier 0: a
    carrier 1: i
    carrier 2: b c
    unit i
    act 2 [2,1] b -> c
    comp b [i,i] -> b

`operad sym maxarity 4`, `operad terminal maxarity 4` and
`operad free(<theory>) maxarity 4` with no carrier lines reference builtins.
Comments start with '#'.
"""

from __future__ import annotations

import re

from .errors import ParseError, ValidationError
from .finset import Permutation
from .operads import (
    SymmetricOperad,
    free_symmetric_operad,
    make_sym,
    make_terminal,
    trivial_operad,
)
from .terms import Signature, TermInContext, parse_term
from .theories import (
    BoundedSearchStrategy,
    Equation,
    NORMALIZERS,
    NormalFormStrategy,
    TheoryPresentation,
)

_PERM_RE = re.compile(r"\[([0-9,\s]*)\]$")


def parse_input(text: str, theory_loader=None):
    """Parse a theory or operad file; the first keyword decides which."""
    for lineno, line in _lines(text):
        head = line.split()[0]
        if head == "theory":
            return parse_theory(text)
        if head == "operad":
            return parse_operad(text, theory_loader=theory_loader)
        raise ParseError(f"expected 'theory' or 'operad', found {head!r}", line=lineno)
    raise ParseError("empty input")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_theory(text: str) -> TheoryPresentation:
    name = None
    ops: dict[str, int] = {}
    raw_axioms: list[tuple[int, str, str, int | None]] = []
    prover_spec = None
    for lineno, line in _lines(text):
        words = line.split()
        if words[0] == "theory":
            if len(words) != 2:
                raise ParseError("usage: theory <Name>", line=lineno)
            name = words[1]
        elif words[0] == "op":
            m = re.match(r"op\s+(\w+)\s*:\s*(\d+)$", line)
            if not m:
                raise ParseError("usage: op <name> : <arity>", line=lineno)
            if m.group(1) in ops:
                raise ValidationError(f"duplicate op {m.group(1)!r} (line {lineno})")
            ops[m.group(1)] = int(m.group(2))
        elif words[0] == "ax":
            body = line[2:].strip()
            ctx = None
            m = re.search(r":\s*(\d+)$", body)
            if m:
                ctx = int(m.group(1))
                body = body[: m.start()].strip()
            if "=" not in body:
                raise ParseError("axiom needs '='", line=lineno)
            lhs, rhs = body.split("=", 1)
            raw_axioms.append((lineno, lhs.strip(), rhs.strip(), ctx))
        elif words[0] == "prover":
            prover_spec = (lineno, line[len("prover"):].strip())
        else:
            raise ParseError(f"unknown directive {words[0]!r}", line=lineno)
    if name is None:
        raise ParseError("missing 'theory <Name>' line")
    signature = Signature.of(ops)
    axioms = []
    for lineno, lhs_text, rhs_text, ctx in raw_axioms:
        try:
            lhs = parse_term(lhs_text, signature=signature, context_length=None)
            rhs = parse_term(rhs_text, signature=signature, context_length=None)
        except ParseError:
            raise
        except Exception as exc:
            raise ValidationError(f"bad axiom at line {lineno}: {exc}") from exc
        n = ctx if ctx is not None else max(lhs.context_length, rhs.context_length)
        lhs, rhs = TermInContext(n, lhs.body), TermInContext(n, rhs.body)
        axioms.append(Equation(lhs, rhs, name=f"ax{len(axioms)}"))
    prover = _parse_prover(prover_spec)
    return TheoryPresentation(name, signature, tuple(axioms), prover)


def _parse_prover(spec):
    if spec is None:
        return BoundedSearchStrategy()
    lineno, text = spec
    if text.startswith("normalform:"):
        normalizer = text[len("normalform:"):].strip()
        if normalizer not in NORMALIZERS:
            raise ValidationError(
                f"unknown normalizer {normalizer!r} (line {lineno});"
                f" known: {sorted(NORMALIZERS)}")
        return NormalFormStrategy(normalizer)
    if text.startswith("bounded:"):
        m = re.match(r"bounded:\s*(\d+)\s*,\s*(\d+)$", text)
        if not m:
            raise ParseError("usage: prover bounded:<steps>,<size>", line=lineno)
        return BoundedSearchStrategy(int(m.group(1)), int(m.group(2)))
    raise ParseError(f"unknown prover spec {text!r}", line=lineno)


def _parse_perm(token: str, lineno: int) -> Permutation:
    m = _PERM_RE.match(token)
    if not m:
        raise ParseError(f"expected a permutation like [2,1], got {token!r}",
                         line=lineno)
    inner = m.group(1).strip()
    values = [int(v) for v in inner.split(",")] if inner else []
    return Permutation.of(values)


def parse_operad(text: str, theory_loader=None) -> SymmetricOperad:
    name = None
    max_arity = None
    carriers: dict[int, tuple[str, ...]] = {}
    unit = None
    action: dict = {}
    composition: dict = {}
    saw_structure = False
    for lineno, line in _lines(text):
        words = line.split()
        if words[0] == "operad":
            m = re.match(r"operad\s+(\S+)\s+maxarity\s+(\d+)$", line)
            if not m:
                raise ParseError("usage: operad <Name> maxarity <N>", line=lineno)
            name, max_arity = m.group(1), int(m.group(2))
        elif words[0] == "carrier":
            m = re.match(r"carrier\s+(\d+)\s*:\s*(.*)$", line)
            if not m:
                raise ParseError("usage: carrier <n>: <id> <id> ...", line=lineno)
            carriers[int(m.group(1))] = tuple(m.group(2).split())
            saw_structure = True
        elif words[0] == "unit":
            if len(words) != 2:
                raise ParseError("usage: unit <id>", line=lineno)
            unit = words[1]
            saw_structure = True
        elif words[0] == "act":
            m = re.match(r"act\s+(\d+)\s+(\S+)\s+(\S+)\s*->\s*(\S+)$", line)
            if not m:
                raise ParseError("usage: act <n> <perm> <id> -> <id>", line=lineno)
            n = int(m.group(1))
            sigma = _parse_perm(m.group(2), lineno)
            if sigma.domain_size != n:
                raise ValidationError(f"permutation arity mismatch (line {lineno})")
            action[(n, sigma.values, m.group(3))] = m.group(4)
            saw_structure = True
        elif words[0] == "comp":
            m = re.match(r"comp\s+(\S+)\s+\[([^\]]*)\]\s*->\s*(\S+)$", line)
            if not m:
                raise ParseError("usage: comp <f> [<g1>,...,<gk>] -> <h>", line=lineno)
            gs = tuple(g.strip() for g in m.group(2).split(",") if g.strip())
            composition[(m.group(1), gs)] = m.group(3)
            saw_structure = True
        else:
            raise ParseError(f"unknown directive {words[0]!r}", line=lineno)
    if name is None or max_arity is None:
        raise ParseError("missing 'operad <Name> maxarity <N>' line")
    if not saw_structure:
        return builtin_operad(name, max_arity, theory_loader=theory_loader)
    if unit is None:
        raise ParseError("missing 'unit <id>' line")
    _fill_identity_actions(carriers, max_arity, action)
    try:
        return SymmetricOperad(name, max_arity, carriers, unit, action, composition)
    except ValidationError:
        raise
    except Exception as exc:
        raise ValidationError(str(exc)) from exc


def _fill_identity_actions(carriers, max_arity, action):
    # identity actions may be omitted in files
    for n in range(max_arity + 1):
        idv = tuple(range(1, n + 1))
        for op in carriers.get(n, ()):
            action.setdefault((n, idv, op), op)


def builtin_operad(name: str, max_arity: int, theory_loader=None) -> SymmetricOperad:
    if name == "sym":
        return make_sym(max_arity)
    if name == "terminal":
        return make_terminal(max_arity)
    if name == "trivial":
        return trivial_operad(max_arity)
    m = re.match(r"free\((\S+)\)$", name)
    if m:
        if theory_loader is None:
            raise ValidationError("free(<theory>) needs a theory loader")
        theory = theory_loader(m.group(1))
        return free_symmetric_operad(theory.signature, max_arity)
    raise ValidationError(f"unknown builtin operad {name!r}")
