import itertools

import pytest
from hypothesis import given, strategies as st

from oplaw.errors import ArityMismatch, OutOfRange, ParseError, SizeMismatch
from oplaw.finset import FinFunction, Permutation, all_injections, all_permutations
from oplaw.terms import (
    App,
    Signature,
    TermInContext,
    Var,
    classify,
    enumerate_linear_regular,
    enumerate_terms,
    node_count,
    parse_term,
    simple_substitute,
    substitute,
    term_to_str,
    variable_occurrences,
    with_context,
)

MONOID = Signature.of({"m": 2, "e": 0})
ANTI = Signature.of({"m": 2, "e": 0, "s": 1})


def t(text, n=None):
    return parse_term(text, context_length=n)


class TestParsing:
    def test_round_trip(self):
        for text in ["x1", "e", "m(x1,x2)", "m(m(x1,x2),x3)", "s(m(x2,x1))"]:
            assert term_to_str(t(text)) == text

    def test_context_default_is_max_variable(self):
        assert t("m(x1,x3)").context_length == 3

    def test_validation(self):
        with pytest.raises(ArityMismatch):
            parse_term("m(x1)", signature=MONOID)
        with pytest.raises(OutOfRange):
            parse_term("m(x1,x2)", context_length=1)
        with pytest.raises(ParseError):
            parse_term("m(x1,")
        with pytest.raises(ParseError):
            parse_term("m(x1,x2)) ")

    def test_signature_rejects_variable_names(self):
        with pytest.raises(ArityMismatch):
            Signature.of({"x1": 0})


class TestSubstitute:
    def test_variable_case(self):
        # substituting into x1 returns the argument itself
        out = substitute(t("x1", 1), [t("m(x1,x2)", 2)])
        assert out == t("m(x1,x2)", 2)

    def test_ground_case(self):
        out = substitute(t("m(x1,x2)", 2), [t("e", 0), t("e", 0)])
        assert out == t("m(e,e)", 0)

    def test_depth_three_cross_check(self):
        # structural recursion agrees with a direct evaluator on a nested term
        subject = t("m(m(x1,x2),m(x3,x1))", 3)
        args = [t("s(x1)", 2), t("e", 2), t("m(x2,x2)", 2)]

        def direct(term):
            if isinstance(term, Var):
                return args[term.index - 1].body
            return App(term.symbol, tuple(direct(a) for a in term.args))

        assert substitute(subject, args).body == direct(subject.body)

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            substitute(t("m(x1,x2)", 2), [t("e", 0)])
        with pytest.raises(ArityMismatch):
            substitute(t("m(x1,x2)", 2), [t("x1", 1), t("x1", 2)])


class TestSimpleSubstitute:
    def test_identity(self):
        term = t("m(x1,x2)", 2)
        assert simple_substitute(term, FinFunction.identity(2)) == term

    def test_swap(self):
        assert simple_substitute(t("m(x1,x2)", 2), Permutation.of([2, 1])) == \
            t("m(x2,x1)", 2)

    def test_collapse(self):
        out = simple_substitute(t("m(x1,x2)", 2), FinFunction.of([1, 1], 1))
        assert out == t("m(x1,x1)", 1)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            simple_substitute(t("m(x1,x2)", 2), FinFunction.identity(3))


class TestClassify:
    def test_examples(self):
        c = classify(t("m(x1,m(x2,x3))", 3))
        assert c.linear_regular and c.strongly_regular
        c = classify(t("m(x1,x1)", 1))
        assert c.regular and not c.linear
        c = classify(t("x2", 2))
        assert c.linear and not c.regular
        c = classify(t("m(x2,x1)", 2))
        assert c.linear_regular and not c.strongly_regular

    def test_flag_consistency(self):
        for term in enumerate_terms(MONOID, 2, 5):
            c = classify(term)
            assert c.linear_regular == (c.linear and c.regular)
            if c.strongly_regular:
                assert c.linear_regular


class TestEnumeration:
    def test_nullary_only(self):
        out = enumerate_terms(MONOID, 0, 1)
        assert [term_to_str(x) for x in out] == ["e"]

    def test_linear_regular_filter(self):
        out = enumerate_terms(MONOID, 2, 3, predicate=lambda s: classify(s).linear_regular)
        assert {term_to_str(x) for x in out} == {"m(x1,x2)", "m(x2,x1)"}

    def test_context_one_budget_one(self):
        out = enumerate_terms(ANTI, 1, 1, predicate=lambda s: classify(s).linear_regular)
        assert [term_to_str(x) for x in out] == ["x1"]
        out2 = enumerate_terms(ANTI, 1, 2, predicate=lambda s: classify(s).linear_regular)
        assert [term_to_str(x) for x in out2] == ["x1", "s(x1)"]

    def test_deterministic(self):
        a = enumerate_terms(ANTI, 2, 4)
        b = enumerate_terms(ANTI, 2, 4)
        assert a == b
        sizes = [node_count(x.body) for x in a]
        assert sizes == sorted(sizes)

    def test_specialized_linear_regular_agrees_with_filter(self):
        for sig in (MONOID, ANTI):
            for n in range(0, 3):
                for budget in range(1, 6):
                    brute = enumerate_terms(
                        sig, n, budget, predicate=lambda s: classify(s).linear_regular)
                    fast = enumerate_linear_regular(sig, n, budget)
                    assert set(map(term_to_str, brute)) == set(map(term_to_str, fast))

    def test_linear_regular_counts_monoid(self):
        # products of n distinct variables: (number of binary trees) * n!
        out = enumerate_linear_regular(Signature.of({"m": 2}), 3, 5)
        assert len(out) == 12


class TestSubstitutionInvariants:
    def test_bijection_preserves_flags_except_strong(self):
        terms = enumerate_terms(ANTI, 3, 5)
        for term in terms[:400]:
            before = classify(term)
            for sigma in all_permutations(3):
                after = classify(simple_substitute(term, sigma))
                assert after.regular == before.regular
                assert after.linear == before.linear
                assert after.linear_regular == before.linear_regular

    def test_injection_preserves_linearity(self):
        terms = enumerate_terms(MONOID, 2, 5)
        for term in terms:
            before = classify(term)
            for phi in all_injections(2, 4):
                after = classify(simple_substitute(term, phi))
                assert after.linear == before.linear

    def test_constant_loses_linearity(self):
        const = FinFunction.of([1, 1], 1)
        for term in enumerate_linear_regular(MONOID, 2, 5):
            assert not classify(simple_substitute(term, const)).linear

    def test_disjoint_substitution_is_linear_regular(self):
        outer = enumerate_linear_regular(MONOID, 2, 3)
        inner1 = enumerate_linear_regular(MONOID, 1, 3)
        inner2 = enumerate_linear_regular(MONOID, 2, 3)
        shift = FinFunction.of([2, 3], 3)
        for f in outer:
            for a in inner1:
                for b in inner2:
                    args = [with_context(a, 3),
                            simple_substitute(b, shift)]
                    assert classify(substitute(f, args)).linear_regular

    @given(st.integers(0, 3), st.data())
    def test_occurrences_match_simple_substitution(self, n, data):
        pool = enumerate_terms(ANTI, n, 4)
        if not pool:
            return
        term = data.draw(st.sampled_from(pool))
        k = data.draw(st.integers(max(n, 1), 4))
        values = data.draw(st.lists(st.integers(1, k), min_size=n, max_size=n))
        phi = FinFunction.of(values, k)
        out = simple_substitute(term, phi)
        assert variable_occurrences(out.body) == \
            [phi(i) for i in variable_occurrences(term.body)]
