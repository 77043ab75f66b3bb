"""Finitely presented equational theories and provability.

A presentation carries a prover strategy, because equational provability is
undecidable in general.  Equal verdicts always carry a trace that replays
under the single-step checker in this module; Distinct verdicts from a
normal-form strategy are definitive for the presentations the normalizer is
registered for, and "up to bound" otherwise.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Optional, Sequence

from .errors import (
    ArityMismatch,
    IncompleteProver,
    LawViolation,
    SizeMismatch,
    UnknownSymbol,
    ValidationError,
)
from .finset import FinFunction, Permutation, all_permutations
from .terms import (
    App,
    Signature,
    Term,
    TermInContext,
    Var,
    classify,
    enumerate_linear_regular,
    max_variable,
    node_count,
    parse_term,
    positions,
    replace_at,
    simple_substitute,
    substitute,
    subterm_at,
)


@dataclass(frozen=True)
class Equation:
    """An equation in context; both sides share the context length."""

    lhs: TermInContext
    rhs: TermInContext
    name: str = ""

    def __post_init__(self):
        if self.lhs.context_length != self.rhs.context_length:
            raise ArityMismatch(
                f"axiom sides have contexts {self.lhs.context_length}"
                f" != {self.rhs.context_length}")

    def __str__(self):
        return f"{self.lhs.body} = {self.rhs.body} : {self.lhs.context_length}"


@dataclass(frozen=True)
class TheoryPresentation:
    name: str
    signature: Signature
    axioms: tuple[Equation, ...]
    prover: "ProverStrategy"

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for ax in self.axioms:
            ax.lhs.validate(self.signature)
            ax.rhs.validate(self.signature)


# ---------------------------------------------------------------------------
# verdicts and replayable traces

class Verdict(Enum):
    EQUAL = "equal"
    DISTINCT_UP_TO_BOUND = "distinct-up-to-bound"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RewriteStep:
    """One equational-logic step: rewrite a subterm by an axiom instance."""

    position: tuple[int, ...]
    axiom_index: int
    forward: bool
    substitution: tuple[tuple[int, Term], ...]  # axiom variable -> term


@dataclass(frozen=True)
class OracleStep:
    """A step certified by an external complete decision procedure."""

    note: str


ProofStep = RewriteStep | OracleStep


@dataclass(frozen=True)
class ProofVerdict:
    verdict: Verdict
    trace: tuple[ProofStep, ...] = ()
    detail: str = ""

    @property
    def is_equal(self) -> bool:
        return self.verdict is Verdict.EQUAL

    @property
    def is_distinct(self) -> bool:
        return self.verdict is Verdict.DISTINCT_UP_TO_BOUND

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN


def match(pattern: Term, subject: Term,
          binding: Optional[dict[int, Term]] = None) -> Optional[dict[int, Term]]:
    """Match a pattern whose variables are placeholders against a subject."""
    if binding is None:
        binding = {}
    if isinstance(pattern, Var):
        bound = binding.get(pattern.index)
        if bound is None:
            binding[pattern.index] = subject
            return binding
        return binding if bound == subject else None
    if not isinstance(subject, App) or subject.symbol != pattern.symbol \
            or len(subject.args) != len(pattern.args):
        return None
    for p, s in zip(pattern.args, subject.args):
        if match(p, s, binding) is None:
            return None
    return binding


def instantiate(pattern: Term, binding: dict[int, Term]) -> Term:
    if isinstance(pattern, Var):
        if pattern.index not in binding:
            raise ArityMismatch(f"unbound variable x{pattern.index} in instance")
        return binding[pattern.index]
    return App(pattern.symbol, tuple(instantiate(a, binding) for a in pattern.args))


def apply_step(theory: TheoryPresentation, t: TermInContext,
               step: RewriteStep) -> TermInContext:
    """Apply one rewrite step, verifying it is a genuine axiom instance."""
    ax = theory.axioms[step.axiom_index]
    frm, to = (ax.lhs, ax.rhs) if step.forward else (ax.rhs, ax.lhs)
    binding = dict(step.substitution)
    frm_inst = instantiate(frm.body, binding)
    to_inst = instantiate(to.body, binding)
    if subterm_at(t.body, step.position) != frm_inst:
        raise LawViolation(
            f"step does not match: expected {frm_inst} at {step.position} in {t.body}",
            witness=(t, step))
    return TermInContext(t.context_length, replace_at(t.body, step.position, to_inst))


def replay_trace(theory: TheoryPresentation, lhs: TermInContext,
                 rhs: TermInContext, trace: Sequence[ProofStep]) -> bool:
    """Trusted single-step checker: does the trace carry lhs to rhs?"""
    current = lhs
    for step in trace:
        if isinstance(step, OracleStep):
            prover = theory.prover
            if not isinstance(prover, LawvereOracleStrategy):
                return False
            return prover.evaluates_equal(current, rhs)
        try:
            current = apply_step(theory, current, step)
        except (LawViolation, ArityMismatch, UnknownSymbol):
            return False
    return current == rhs


def flip_step(step: RewriteStep) -> RewriteStep:
    return RewriteStep(step.position, step.axiom_index, not step.forward,
                       step.substitution)


# ---------------------------------------------------------------------------
# prover strategies

@dataclass(frozen=True)
class ProofBudget:
    max_steps: int = 4000
    max_term_size: int = 12


class ProverStrategy:
    """Interface: decide provable equality for one presentation."""

    #: a strategy is authoritative when Distinct verdicts are definitive
    authoritative = False

    def prove(self, theory: TheoryPresentation, lhs: TermInContext,
              rhs: TermInContext, budget: Optional[ProofBudget] = None) -> ProofVerdict:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class NormalFormStrategy(ProverStrategy):
    """Compare terminating normal forms; complete for its registered theory."""

    authoritative = True

    def __init__(self, normalizer_name: str):
        if normalizer_name not in NORMALIZERS:
            raise ValidationError(f"unknown normalizer {normalizer_name!r}")
        self.normalizer_name = normalizer_name

    def describe(self) -> str:
        return f"normalform:{self.normalizer_name}"

    def normal_form(self, theory, t, log=True):
        return NORMALIZERS[self.normalizer_name](theory, t, log)

    def prove(self, theory, lhs, rhs, budget=None):
        nf_l, steps_l = self.normal_form(theory, lhs)
        nf_r, steps_r = self.normal_form(theory, rhs)
        if nf_l == nf_r:
            trace = tuple(steps_l) + tuple(flip_step(s) for s in reversed(steps_r))
            return ProofVerdict(Verdict.EQUAL, trace, "normal forms coincide")
        return ProofVerdict(
            Verdict.DISTINCT_UP_TO_BOUND, (),
            f"normal forms differ: {nf_l.body} vs {nf_r.body}")


class BoundedSearchStrategy(ProverStrategy):
    """Breadth-first search over single rewrite steps in both directions."""

    def __init__(self, max_steps: int = 4000, max_term_size: int = 12):
        self.max_steps = max_steps
        self.max_term_size = max_term_size

    def describe(self) -> str:
        return f"bounded:{self.max_steps},{self.max_term_size}"

    def _completions(self, to_body: Term, binding: dict[int, Term],
                     ambient: int, theory) -> Iterator[dict[int, Term]]:
        unbound = sorted({i for i in _pattern_vars(to_body) if i not in binding})
        if not unbound:
            yield binding
            return
        if len(unbound) > 2:
            return  # give up on wildly unconstrained axioms
        pool: list[Term] = [Var(i) for i in range(1, ambient + 1)]
        pool += [App(name, ()) for name, ar in theory.signature.symbols if ar == 0]
        for combo in itertools.product(pool, repeat=len(unbound)):
            full = dict(binding)
            full.update(dict(zip(unbound, combo)))
            yield full

    def _neighbours(self, theory, t: TermInContext):
        for ax_index, ax in enumerate(theory.axioms):
            for forward in (True, False):
                frm, to = (ax.lhs, ax.rhs) if forward else (ax.rhs, ax.lhs)
                for pos in positions(t.body):
                    binding = match(frm.body, subterm_at(t.body, pos))
                    if binding is None:
                        continue
                    for full in self._completions(to.body, binding,
                                                  t.context_length, theory):
                        step = RewriteStep(pos, ax_index, forward,
                                           tuple(sorted(full.items())))
                        new_body = replace_at(t.body, pos,
                                              instantiate(to.body, full))
                        yield TermInContext(t.context_length, new_body), step

    def prove(self, theory, lhs, rhs, budget=None):
        max_steps = budget.max_steps if budget else self.max_steps
        max_size = budget.max_term_size if budget else self.max_term_size
        start, target = lhs, rhs
        seen: dict[TermInContext, tuple[Optional[TermInContext], Optional[RewriteStep]]] = {
            start: (None, None)}
        queue = deque([start])
        expansions = 0
        truncated = False
        while queue:
            current = queue.popleft()
            if current == target:
                steps = []
                node = current
                while seen[node][0] is not None:
                    parent, step = seen[node]
                    steps.append(step)
                    node = parent
                return ProofVerdict(Verdict.EQUAL, tuple(reversed(steps)),
                                    "found by bounded search")
            expansions += 1
            if expansions > max_steps:
                return ProofVerdict(Verdict.UNKNOWN, (),
                                    f"step budget {max_steps} exhausted")
            for neighbour, step in self._neighbours(theory, current):
                if node_count(neighbour.body) > max_size:
                    truncated = True
                    continue
                if neighbour not in seen:
                    seen[neighbour] = (current, step)
                    queue.append(neighbour)
        detail = "reachable set exhausted" + \
            (" (size-capped)" if truncated else " (no cap hit)")
        return ProofVerdict(Verdict.DISTINCT_UP_TO_BOUND, (), detail)


class LawvereOracleStrategy(ProverStrategy):
    """Decide equality by evaluating terms as morphisms of a Lawvere theory.

    The attached theory object only needs projection/tupling/composition and
    a decidable morphism equality; any LawvereTheory from oplaw.lawvere works.
    """

    authoritative = True

    def __init__(self, lawvere_theory, assignment: dict[str, object]):
        self.lawvere_theory = lawvere_theory
        self.assignment = dict(assignment)

    def describe(self) -> str:
        return f"lawvere-oracle:{getattr(self.lawvere_theory, 'name', '?')}"

    def evaluate(self, t: TermInContext):
        th = self.lawvere_theory
        n = t.context_length

        def walk(body: Term):
            if isinstance(body, Var):
                return th.projection(n, body.index)
            if body.symbol not in self.assignment:
                raise UnknownSymbol(f"no morphism assigned to {body.symbol!r}")
            args = [walk(a) for a in body.args]
            tup = th.tupled(args, n)
            return th.compose(tup, self.assignment[body.symbol])

        return walk(t.body)

    def evaluates_equal(self, lhs, rhs) -> bool:
        return self.lawvere_theory.equal(self.evaluate(lhs), self.evaluate(rhs))

    def prove(self, theory, lhs, rhs, budget=None):
        if self.evaluates_equal(lhs, rhs):
            return ProofVerdict(
                Verdict.EQUAL, (OracleStep("morphisms coincide"),),
                "equal under the attached Lawvere theory")
        return ProofVerdict(Verdict.DISTINCT_UP_TO_BOUND, (),
                            "morphisms differ in the attached Lawvere theory")


def prove_equal(theory: TheoryPresentation, lhs: TermInContext,
                rhs: TermInContext, budget: Optional[ProofBudget] = None) -> ProofVerdict:
    if lhs.context_length != rhs.context_length:
        raise SizeMismatch("sides must share a context")
    if lhs == rhs:
        return ProofVerdict(Verdict.EQUAL, (), "reflexivity")
    return theory.prover.prove(theory, lhs, rhs, budget)


def normal_form_key(theory: TheoryPresentation, t: TermInContext) -> str:
    """Fast canonical key under a NormalForm prover (no step logging)."""
    prover = theory.prover
    if not isinstance(prover, NormalFormStrategy):
        raise IncompleteProver(
            f"theory {theory.name!r} has no normal-form prover")
    nf, _ = prover.normal_form(theory, t, log=False)
    return str(nf.body)


# ---------------------------------------------------------------------------
# builtin normalizers
#
# Each normalizer is registered under a name, locates the axioms it needs in
# the presentation (so axiom order in a .thy file does not matter), rewrites
# to a canonical form, and logs every rewrite as an honest axiom instance.

NormalizerFn = Callable[[TheoryPresentation, TermInContext, bool],
                        tuple[TermInContext, list[RewriteStep]]]
NORMALIZERS: dict[str, NormalizerFn] = {}


def register_normalizer(name: str):
    def deco(fn):
        NORMALIZERS[name] = fn
        return fn
    return deco


class _AxiomRef:
    """Locates `lhs = rhs` among a theory's axioms, possibly stored swapped."""

    def __init__(self, theory: TheoryPresentation, lhs_text: str, rhs_text: str):
        lhs = parse_term(lhs_text)
        rhs = parse_term(rhs_text)
        n = max(lhs.context_length, rhs.context_length)
        lhs, rhs = TermInContext(n, lhs.body), TermInContext(n, rhs.body)
        for idx, ax in enumerate(theory.axioms):
            if ax.lhs == lhs and ax.rhs == rhs:
                self.index, self.swapped = idx, False
                return
            if ax.lhs == rhs and ax.rhs == lhs:
                self.index, self.swapped = idx, True
                return
        raise ValidationError(
            f"theory {theory.name!r} lacks the axiom {lhs.body} = {rhs.body}"
            f" required by its normalizer")

    def step(self, position: tuple[int, ...], binding: dict[int, Term],
             left_to_right: bool) -> RewriteStep:
        forward = left_to_right if not self.swapped else not left_to_right
        return RewriteStep(position, self.index, forward,
                           tuple(sorted(binding.items())))


class _Session:
    def __init__(self, theory: TheoryPresentation, t: TermInContext, log: bool):
        self.theory = theory
        self.current = t
        self.log = log
        self.steps: list[RewriteStep] = []

    def apply(self, step: RewriteStep):
        self.current = apply_step(self.theory, self.current, step)
        if self.log:
            self.steps.append(step)


def _pattern_vars(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for a in t.args:
        out |= _pattern_vars(a)
    return out


def _monoid_refs(theory):
    return {
        "assoc": _AxiomRef(theory, "m(x1,m(x2,x3))", "m(m(x1,x2),x3)"),
        "unit_r": _AxiomRef(theory, "m(x1,e)", "x1"),
        "unit_l": _AxiomRef(theory, "m(e,x1)", "x1"),
    }


def _monoid_pass(session: _Session, refs) -> None:
    """Rewrite to a right comb with no unit leaves (except the bare unit)."""
    E = App("e", ())
    while True:
        body = session.current.body
        done = True
        for pos in positions(body):
            sub = subterm_at(body, pos)
            if not isinstance(sub, App) or sub.symbol != "m":
                continue
            a, b = sub.args
            if isinstance(a, App) and a.symbol == "m":
                binding = {1: a.args[0], 2: a.args[1], 3: b}
                session.apply(refs["assoc"].step(pos, binding, left_to_right=False))
                done = False
                break
            if a == E:
                session.apply(refs["unit_l"].step(pos, {1: b}, left_to_right=True))
                done = False
                break
            if b == E:
                session.apply(refs["unit_r"].step(pos, {1: a}, left_to_right=True))
                done = False
                break
        if done:
            return


def _comb_leaves(body: Term) -> list[Term]:
    out = []
    while isinstance(body, App) and body.symbol == "m":
        out.append(body.args[0])
        body = body.args[1]
    out.append(body)
    return out


@register_normalizer("monoid")
def normalize_monoid(theory, t, log=True):
    refs = _monoid_refs(theory)
    session = _Session(theory, t, log)
    _monoid_pass(session, refs)
    return session.current, session.steps


@register_normalizer("commutative-monoid")
def normalize_commutative_monoid(theory, t, log=True):
    refs = _monoid_refs(theory)
    refs["comm"] = _AxiomRef(theory, "m(x1,x2)", "m(x2,x1)")
    session = _Session(theory, t, log)
    _monoid_pass(session, refs)
    # bubble sort the comb leaves; every swap is three axiom steps, except at
    # the final pair where commutativity applies directly
    while True:
        leaves = _comb_leaves(session.current.body)
        if len(leaves) == 1:
            break
        assert all(isinstance(l, Var) for l in leaves), session.current
        swapped = False
        for i in range(len(leaves) - 1):
            if leaves[i].index > leaves[i + 1].index:
                _comm_swap(session, refs, i, len(leaves))
                swapped = True
                break
        if not swapped:
            break
    return session.current, session.steps


def _comm_swap(session: _Session, refs, i: int, depth: int) -> None:
    pos = (2,) * i
    node = subterm_at(session.current.body, pos)
    a = node.args[0]
    if i == depth - 2:
        session.apply(refs["comm"].step(pos, {1: a, 2: node.args[1]},
                                        left_to_right=True))
        return
    rest = node.args[1]
    b, r = rest.args
    session.apply(refs["assoc"].step(pos, {1: a, 2: b, 3: r}, left_to_right=True))
    session.apply(refs["comm"].step(pos + (1,), {1: a, 2: b}, left_to_right=True))
    session.apply(refs["assoc"].step(pos, {1: b, 2: a, 3: r}, left_to_right=False))


@register_normalizer("anti-involution-monoid")
def normalize_anti_involution(theory, t, log=True):
    refs = _monoid_refs(theory)
    refs["anti"] = _AxiomRef(theory, "m(s(x1),s(x2))", "s(m(x2,x1))")
    refs["inv"] = _AxiomRef(theory, "s(s(x1))", "x1")
    session = _Session(theory, t, log)
    E = App("e", ())
    while True:
        body = session.current.body
        acted = False
        for pos in positions(body):
            sub = subterm_at(body, pos)
            if not isinstance(sub, App) or sub.symbol != "s":
                continue
            inner = sub.args[0]
            if isinstance(inner, App) and inner.symbol == "s":
                session.apply(refs["inv"].step(pos, {1: inner.args[0]}, True))
                acted = True
                break
            if inner == E:
                _surgery_s_of_unit(session, refs, pos)
                acted = True
                break
            if isinstance(inner, App) and inner.symbol == "m":
                a, b = inner.args
                session.apply(refs["anti"].step(pos, {1: b, 2: a}, False))
                acted = True
                break
        if acted:
            continue
        before = session.current
        _monoid_pass(session, refs)
        if session.current == before:
            break
    return session.current, session.steps


def _surgery_s_of_unit(session: _Session, refs, pos) -> None:
    # s(e) = e is provable but not an axiom; five honest steps derive it
    E = App("e", ())
    SE = App("s", (E,))
    session.apply(refs["unit_r"].step(pos, {1: SE}, left_to_right=False))
    session.apply(refs["inv"].step(pos + (2,), {1: E}, left_to_right=False))
    session.apply(refs["anti"].step(pos, {1: E, 2: SE}, left_to_right=True))
    session.apply(refs["unit_r"].step(pos + (1,), {1: SE}, left_to_right=True))
    session.apply(refs["inv"].step(pos, {1: E}, left_to_right=True))


@register_normalizer("collapse")
def normalize_collapse(theory, t, log=True):
    # for the one-constant theory with axiom x1 = e every term collapses to e
    ref = _AxiomRef(theory, "x1", "e")
    session = _Session(theory, t, log)
    if isinstance(session.current.body, Var):
        session.apply(ref.step((), {1: session.current.body}, left_to_right=True))
    return session.current, session.steps


@register_normalizer("syntactic")
def normalize_syntactic(theory, t, log=True):
    return t, []


# ---------------------------------------------------------------------------
# interpretations

@dataclass(frozen=True)
class Interpretation:
    source: TheoryPresentation
    target: TheoryPresentation
    mapping: tuple[tuple[str, TermInContext], ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        table = dict(self.mapping)
        for name, arity in self.source.signature.symbols:
            if name not in table:
                raise UnknownSymbol(f"interpretation misses symbol {name!r}")
            image = table[name]
            if image.context_length != arity:
                raise ArityMismatch(
                    f"image of {name!r} has context {image.context_length},"
                    f" expected {arity}")
            image.validate(self.target.signature)

    def term_for(self, symbol: str) -> TermInContext:
        for name, image in self.mapping:
            if name == symbol:
                return image
        raise UnknownSymbol(f"interpretation misses symbol {symbol!r}")


def extend_interpretation(interp: Interpretation, t: TermInContext) -> TermInContext:
    """Structural extension of a symbol assignment to all terms."""
    n = t.context_length

    def walk(body: Term) -> Term:
        if isinstance(body, Var):
            return body
        image = interp.term_for(body.symbol)
        translated = [TermInContext(n, walk(a)) for a in body.args]
        return substitute(image, translated).body

    return TermInContext(n, walk(t.body))


def identity_interpretation(theory: TheoryPresentation) -> Interpretation:
    mapping = []
    for name, arity in theory.signature.symbols:
        args = tuple(Var(i) for i in range(1, arity + 1))
        mapping.append((name, TermInContext(arity, App(name, args))))
    return Interpretation(theory, theory, tuple(mapping))


def verify_interpretation(interp: Interpretation,
                          budget: Optional[ProofBudget] = None,
                          ) -> list[tuple[Equation, ProofVerdict]]:
    """Check the source axioms are preserved; Unknown marks it unverified."""
    out = []
    for ax in interp.source.axioms:
        verdict = prove_equal(interp.target,
                              extend_interpretation(interp, ax.lhs),
                              extend_interpretation(interp, ax.rhs), budget)
        out.append((ax, verdict))
    return out


# ---------------------------------------------------------------------------
# presentation classifiers and the rigidity refuter

def is_regular_presentation(theory: TheoryPresentation) -> bool:
    return all(classify(ax.lhs).regular and classify(ax.rhs).regular
               for ax in theory.axioms)


def is_linear_regular_presentation(theory: TheoryPresentation) -> bool:
    """Sufficient condition: every axiom side is linear-regular.

    Theory-level linear-regularity is a closure property of all consequences;
    only this axiom-form criterion is decided here.
    """
    return all(classify(ax.lhs).linear_regular and classify(ax.rhs).linear_regular
               for ax in theory.axioms)


def is_strongly_regular_presentation(theory: TheoryPresentation) -> bool:
    return all(classify(ax.lhs).strongly_regular and classify(ax.rhs).strongly_regular
               for ax in theory.axioms)


@dataclass(frozen=True)
class RigidityBudget:
    max_nodes: int = 7
    max_context: int = 4
    proof_budget: Optional[ProofBudget] = None


@dataclass(frozen=True)
class RigidityWitness:
    term: TermInContext
    tau: Permutation
    verdict: ProofVerdict

    def __str__(self):
        return f"t = {self.term.body} : {self.term.context_length}, tau = {list(self.tau.values)}"


def refute_rigidity(theory: TheoryPresentation,
                    budget: RigidityBudget = RigidityBudget(),
                    ) -> Optional[RigidityWitness]:
    """Search for a linear-regular t with t = tau.t provable and tau != id.

    A witness refutes rigidity.  No witness within budget is inconclusive:
    rigidity itself is undecidable, so this is a refuter, not a decider.
    """
    if not is_linear_regular_presentation(theory):
        warnings.warn(
            f"presentation {theory.name!r} is not linear-regular in axiom form;"
            " the rigidity notion presupposes a linear-regular theory")
    for n in range(2, budget.max_context + 1):
        for term in enumerate_linear_regular(theory.signature, n, budget.max_nodes):
            for tau in all_permutations(n):
                if tau.is_identity():
                    continue
                verdict = prove_equal(theory, term, simple_substitute(term, tau),
                                      budget.proof_budget)
                if verdict.is_equal:
                    return RigidityWitness(term, tau, verdict)
    return None
