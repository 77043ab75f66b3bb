import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oplaw import presets
from oplaw.errors import SizeMismatch, UnknownSymbol, ValidationError
from oplaw.finset import Permutation, all_permutations
from oplaw.terms import (
    Signature,
    TermInContext,
    enumerate_linear_regular,
    enumerate_terms,
    parse_term,
    simple_substitute,
)
from oplaw.theories import (
    BoundedSearchStrategy,
    Equation,
    Interpretation,
    NormalFormStrategy,
    ProofBudget,
    RigidityBudget,
    TheoryPresentation,
    Verdict,
    extend_interpretation,
    identity_interpretation,
    is_linear_regular_presentation,
    is_regular_presentation,
    is_strongly_regular_presentation,
    normal_form_key,
    prove_equal,
    refute_rigidity,
    replay_trace,
    verify_interpretation,
)

MONOID = presets.theory("monoid")
COMM = presets.theory("commutative-monoid")
ANTI = presets.theory("anti-involution-monoid")
SUP = presets.theory("sup-lattice")
ONE = presets.theory("one")


def t(text, n=None):
    return parse_term(text, context_length=n)


class TestProveEqual:
    def test_unit_absorption(self):
        v = prove_equal(MONOID, t("m(x1,e)", 1), t("x1", 1))
        assert v.is_equal

    def test_reflexivity(self):
        term = t("m(x1,m(x2,x1))", 2)
        assert prove_equal(MONOID, term, term).is_equal

    def test_monoid_distinguishes_orders(self):
        v = prove_equal(MONOID, t("m(x1,x2)"), t("m(x2,x1)"))
        assert v.is_distinct

    def test_commutative_monoid_identifies_orders(self):
        v = prove_equal(COMM, t("m(x1,x2)"), t("m(x2,x1)"))
        assert v.is_equal
        assert replay_trace(COMM, t("m(x1,x2)"), t("m(x2,x1)"), v.trace)

    def test_context_mismatch(self):
        with pytest.raises(SizeMismatch):
            prove_equal(MONOID, t("x1", 1), t("x1", 2))

    def test_anti_involution_normal_forms(self):
        v = prove_equal(ANTI, t("s(m(x1,x2))"), t("m(s(x2),s(x1))"))
        assert v.is_equal
        v = prove_equal(ANTI, t("s(e)", 0), t("e", 0))
        assert v.is_equal
        assert replay_trace(ANTI, t("s(e)", 0), t("e", 0), v.trace)
        v = prove_equal(ANTI, t("s(x1)", 1), t("x1", 1))
        assert v.is_distinct

    def test_terminal_theory_collapses(self):
        v = prove_equal(ONE, t("x1", 2), t("x2", 2))
        assert v.is_equal
        assert replay_trace(ONE, t("x1", 2), t("x2", 2), v.trace)


class TestTraces:
    def all_pairs(self, theory, n, budget):
        terms = enumerate_terms(theory.signature, n, budget)
        return itertools.combinations(terms, 2)

    @pytest.mark.parametrize("theory,n,budget", [
        (MONOID, 2, 4), (COMM, 2, 4), (ANTI, 1, 4), (ONE, 2, 2),
    ])
    def test_equal_traces_replay(self, theory, n, budget):
        seen_equal = 0
        for a, b in self.all_pairs(theory, n, budget):
            v = prove_equal(theory, a, b)
            if v.is_equal:
                seen_equal += 1
                assert replay_trace(theory, a, b, v.trace), (a, b)
        assert seen_equal > 0

    def test_normalizers_idempotent(self):
        for theory, n in [(MONOID, 2), (COMM, 2), (ANTI, 2)]:
            prover = theory.prover
            for term in enumerate_terms(theory.signature, n, 5):
                nf, _ = prover.normal_form(theory, term)
                nf2, steps2 = prover.normal_form(theory, nf)
                assert nf2 == nf and not steps2

    def test_congruence_spot_checks(self):
        # an equation survives being wrapped in any surrounding context
        pairs = [(t("m(x1,e)", 1), t("x1", 1)),
                 (t("m(e,m(x1,e))", 1), t("x1", 1))]
        contexts = ["m(x1,x2)", "m(x2,x1)", "m(m(x1,x1),x2)"]
        for a, b in pairs:
            for ctx in contexts:
                wrapper = t(ctx, 2)
                wa = TermInContext(1, _plug(wrapper, a))
                wb = TermInContext(1, _plug(wrapper, b))
                assert prove_equal(MONOID, wa, wb).is_equal


def _plug(wrapper, inner):
    # substitute x2 := inner.body, x1 stays the ambient variable
    from oplaw.terms import App, Var

    def walk(body):
        if isinstance(body, Var):
            return inner.body if body.index == 2 else body
        return App(body.symbol, tuple(walk(a) for a in body.args))

    return walk(wrapper.body)


class TestBoundedSearch:
    def test_agrees_with_normal_forms(self):
        bounded = BoundedSearchStrategy(max_steps=3000, max_term_size=9)
        for theory, n, budget in [(MONOID, 2, 4), (COMM, 2, 3), (ONE, 2, 2)]:
            loose = TheoryPresentation(theory.name, theory.signature,
                                       theory.axioms, bounded)
            terms = enumerate_terms(theory.signature, n, budget)
            for a, b in itertools.combinations(terms, 2):
                vn = prove_equal(theory, a, b)
                vb = prove_equal(loose, a, b)
                if vb.is_equal:
                    assert vn.is_equal, (a, b)
                    assert replay_trace(loose, a, b, vb.trace)
                if vb.is_distinct and "no cap hit" in vb.detail:
                    assert vn.is_distinct, (a, b)

    def test_unknown_on_tiny_budget(self):
        tiny = TheoryPresentation("tiny", MONOID.signature, MONOID.axioms,
                                  BoundedSearchStrategy(max_steps=1, max_term_size=4))
        v = prove_equal(tiny, t("m(m(x1,e),e)", 1), t("x1", 1))
        assert v.is_unknown

    def test_sup_lattice_idempotency(self):
        v = prove_equal(SUP, t("join(x1,x1)", 1), t("x1", 1))
        assert v.is_equal


class TestInterpretation:
    def test_identity(self):
        ident = identity_interpretation(MONOID)
        term = t("m(x1,m(x2,e))", 2)
        assert extend_interpretation(ident, term) == term

    def test_variables_fixed(self):
        ident = identity_interpretation(MONOID)
        assert extend_interpretation(ident, t("x2", 3)) == t("x2", 3)

    def test_opposite_monoid(self):
        flip = Interpretation(MONOID, MONOID, (
            ("m", t("m(x2,x1)", 2)),
            ("e", t("e", 0)),
        ))
        out = extend_interpretation(flip, t("m(x1,m(x2,x3))", 3))
        assert out == t("m(m(x3,x2),x1)", 3)
        checked = verify_interpretation(flip)
        assert all(v.is_equal for _, v in checked)

    def test_bad_axiom_preservation_detected(self):
        # mapping m to a projection breaks the unit axioms
        proj = Interpretation(MONOID, MONOID, (
            ("m", t("x1", 2)),
            ("e", t("e", 0)),
        ))
        checked = verify_interpretation(proj)
        assert any(not v.is_equal for _, v in checked)

    def test_missing_symbol(self):
        with pytest.raises(UnknownSymbol):
            Interpretation(MONOID, MONOID, (("m", t("m(x1,x2)", 2)),))


class TestClassifiers:
    def test_linear_regular(self):
        assert is_linear_regular_presentation(COMM)
        assert is_linear_regular_presentation(MONOID)
        assert not is_linear_regular_presentation(SUP)
        empty = presets.theory("empty")
        assert is_linear_regular_presentation(empty)

    def test_regular(self):
        assert is_regular_presentation(SUP)
        assert not is_regular_presentation(ONE)

    def test_strongly_regular(self):
        assert is_strongly_regular_presentation(MONOID)
        assert not is_strongly_regular_presentation(ANTI)
        assert is_strongly_regular_presentation(presets.theory("empty"))
        assert is_strongly_regular_presentation(presets.theory("magma"))


class TestRigidity:
    def test_commutative_monoid_witness(self):
        w = refute_rigidity(COMM, RigidityBudget(3, 2))
        assert w is not None
        assert w.term == t("m(x1,x2)", 2)
        assert w.tau == Permutation.of([2, 1])
        # the witness replays
        permuted = simple_substitute(w.term, w.tau)
        assert replay_trace(COMM, w.term, permuted, w.verdict.trace)

    def test_monoid_no_witness(self):
        assert refute_rigidity(MONOID, RigidityBudget(7, 4)) is None

    def test_anti_involution_no_witness(self):
        assert refute_rigidity(ANTI, RigidityBudget(7, 4)) is None

    def test_warns_on_non_linear_regular(self):
        with pytest.warns(UserWarning):
            refute_rigidity(SUP, RigidityBudget(3, 2))


class TestNormalFormOracle:
    def test_monoid_words(self):
        # two linear-regular terms are equal iff their variable orders agree
        from oplaw.terms import variable_occurrences
        for n in range(1, 5):
            terms = enumerate_linear_regular(MONOID.signature, n, 2 * n + 1)
            keys = {}
            for term in terms:
                keys.setdefault(normal_form_key(MONOID, term), set()).add(
                    tuple(variable_occurrences(term.body)))
            for key, orders in keys.items():
                assert len(orders) == 1, (key, orders)

    def test_commutative_monoid_sorted_words(self):
        key = normal_form_key(COMM, t("m(m(x2,e),m(x1,x2))", 2))
        assert key == "m(x1,m(x2,x2))"

    def test_anti_involution_words(self):
        key = normal_form_key(ANTI, t("s(m(x1,s(x2)))", 2))
        assert key == "m(x2,s(x1))"
