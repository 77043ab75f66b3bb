import itertools

import pytest

from oplaw import presets
from oplaw.errors import SizeMismatch, TruncationExceeded, ValidationError
from oplaw.finset import Permutation, all_permutations, block_sum, compose, transport_blocks
from oplaw.operads import (
    OperadMorphism,
    check_operad_laws,
    find_operad_isomorphism,
    free_symmetric_operad,
    is_free_action,
    make_sym,
    make_terminal,
    operad_from_theory,
    sym_compose,
    theory_from_operad,
    trivial_operad,
)
from oplaw.terms import Signature, parse_term
from oplaw.theories import (
    BoundedSearchStrategy,
    TheoryPresentation,
    prove_equal,
    replay_trace,
)


def perms(n):
    return list(all_permutations(n))


class TestSymCompose:
    def test_unit_cases(self):
        i2 = Permutation.identity(2)
        assert sym_compose([Permutation.identity(1)] * 2, i2) == i2
        sigma = Permutation.of([3, 1, 2])
        assert sym_compose([sigma], Permutation.identity(1)) == sigma

    def test_pinned_value(self):
        out = sym_compose([Permutation.identity(1), Permutation.identity(2)],
                          Permutation.of([2, 1]))
        assert out == Permutation.of([2, 3, 1])

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            sym_compose([Permutation.identity(1)], Permutation.identity(2))

    def test_unit_law_exhaustive(self):
        for n in range(0, 6):
            for sigma in perms(n):
                assert sym_compose([sigma], Permutation.identity(1)) == sigma
                assert sym_compose([Permutation.identity(1)] * n, sigma) == sigma

    def test_star_laws_exhaustive_small(self):
        from oplaw.operads import check_star_laws
        rep = check_star_laws(3)
        assert rep.ok, rep.violations[:3]
        assert rep.coverage["star-assoc"] > 1000

    def test_block_identities(self):
        # the two factored forms compose to the full star product
        for sizes in [(1, 2), (2, 2), (0, 3), (2, 1, 1)]:
            k = len(sizes)
            for tau in perms(k):
                for sigmas in itertools.product(*[perms(s) for s in sizes]):
                    full = sym_compose(list(sigmas), tau)
                    blocks = block_sum(list(sigmas))
                    ids = [Permutation.identity(s) for s in sizes]
                    blockperm = sym_compose(ids, tau)
                    assert full == compose(blocks, blockperm)

    def test_not_a_group_homomorphism(self):
        # search a pair where star of products differs from product of stars
        found = False
        for sizes in [(1, 2), (2, 1), (2, 2)]:
            k = len(sizes)
            pool = list(itertools.product(
                *[perms(s) for s in sizes], perms(k)))
            for a, b in itertools.product(pool, repeat=2):
                *sig_a, tau_a = a
                *sig_b, tau_b = b
                prod_star = compose(sym_compose(sig_a, tau_a),
                                    sym_compose(sig_b, tau_b))
                star_prod = sym_compose(
                    [compose(x, y) for x, y in zip(sig_a, sig_b)],
                    compose(tau_a, tau_b))
                if prod_star != star_prod:
                    found = True
                    break
            if found:
                break
        assert found


def _compositions(total, parts):
    from oplaw.finset import compositions
    out = []
    for t in range(total + 1):
        out.extend(compositions(t, parts))
    return [c for c in out]


class TestBuiltinOperads:
    def test_sym_sizes(self):
        sym = make_sym(3)
        assert [len(sym.carriers[n]) for n in range(4)] == [1, 1, 2, 6]

    def test_sym_identity_composition(self):
        sym = make_sym(4)
        ids = ["p", "p1", "p12", "p123"]
        assert sym.compose("p12", ("p1", "p1")) == "p12"
        assert sym.compose("p12", ("p12", "p12")) == "p1234"

    def test_laws_sym(self):
        rep = check_operad_laws(make_sym(4))
        assert rep.ok, rep.violations[:3]

    def test_laws_terminal(self):
        rep = check_operad_laws(make_terminal(5))
        assert rep.ok

    def test_laws_trivial(self):
        rep = check_operad_laws(trivial_operad(4))
        assert rep.ok

    def test_corrupted_sym_detected(self):
        bad = make_sym(3).with_composition_entry("p12", ("p1", "p1"), "p21")
        rep = check_operad_laws(bad)
        assert not rep.ok

    def test_truncation(self):
        sym = make_sym(3)
        with pytest.raises(TruncationExceeded):
            sym.compose("p12", ("p12", "p12"))

    def test_free_action(self):
        sym = make_sym(4)
        assert all(is_free_action(sym, n) for n in range(5))
        assert not is_free_action(make_terminal(3), 2)
        free = presets.operad("free(magma)", 3)
        assert all(is_free_action(free, n) for n in range(4))


class TestFreeOperad:
    def test_sizes(self):
        free = free_symmetric_operad(Signature.of({"m": 2}), 4)
        assert [len(free.carriers[n]) for n in range(5)] == [0, 1, 2, 12, 120]

    def test_unit_carrier_for_empty_signature(self):
        free = free_symmetric_operad(Signature.of({}), 3)
        assert [len(free.carriers[n]) for n in range(4)] == [0, 1, 0, 0]

    def test_rejects_small_arities(self):
        with pytest.raises(ValidationError):
            free_symmetric_operad(Signature.of({"u": 1}), 3)
        with pytest.raises(ValidationError):
            free_symmetric_operad(Signature.of({"c": 0}), 3)

    def test_grafting(self):
        free = free_symmetric_operad(Signature.of({"m": 2}), 4)
        out = free.compose("m(x1,x2)", ("m(x1,x2)", "x1"))
        assert out == "m(m(x1,x2),x3)"
        out = free.compose("m(x2,x1)", ("x1", "m(x1,x2)"))
        assert out == "m(m(x2,x3),x1)"

    def test_equivariance_by_construction(self):
        free = free_symmetric_operad(Signature.of({"m": 2}), 4)
        rep = check_operad_laws(free)
        assert rep.ok


class TestOperadFromTheory:
    def test_monoid_carriers_are_orderings(self):
        op = operad_from_theory(presets.theory("monoid"), 3, 5)
        assert [len(op.carriers[n]) for n in range(4)] == [1, 1, 2, 6]
        assert op.authoritative

    def test_commutative_monoid_single_class(self):
        op = operad_from_theory(presets.theory("commutative-monoid"), 3, 5)
        assert [len(op.carriers[n]) for n in range(4)] == [1, 1, 1, 1]

    def test_anti_involution_classes(self):
        op = operad_from_theory(presets.theory("anti-involution-monoid"), 2, 5)
        assert [len(op.carriers[n]) for n in range(3)] == [1, 2, 8]

    def test_monoid_operad_is_sym(self):
        op = operad_from_theory(presets.theory("monoid"), 3, 5)
        iso = find_operad_isomorphism(op, make_sym(3))
        assert iso is not None
        assert iso.is_bijective() and not iso.check()

    def test_laws_hold(self):
        op = operad_from_theory(presets.theory("anti-involution-monoid"), 2, 5)
        rep = check_operad_laws(op)
        assert rep.ok, rep.violations[:3]

    def test_free_action_matches_rigidity(self):
        comm = operad_from_theory(presets.theory("commutative-monoid"), 3, 5)
        assert not is_free_action(comm, 2)
        mono = operad_from_theory(presets.theory("monoid"), 3, 5)
        assert all(is_free_action(mono, n) for n in range(4))

    def test_bounded_prover_flagged(self):
        loose = presets.theory("monoid")
        loose = TheoryPresentation(loose.name, loose.signature, loose.axioms,
                                   BoundedSearchStrategy(2000, 9))
        op = operad_from_theory(loose, 2, 3)
        assert not op.authoritative
        assert [len(op.carriers[n]) for n in range(3)] == [1, 1, 2]


class TestTheoryFromOperad:
    def test_axioms_linear_regular(self):
        from oplaw.theories import is_linear_regular_presentation
        T, _ = theory_from_operad(make_sym(2))
        assert is_linear_regular_presentation(T)

    def test_prover_matches_span_equality(self):
        T, sym_of = theory_from_operad(make_sym(3))
        a = parse_term(f"{sym_of['p12']}(x1,x2)", context_length=2)
        b = parse_term(f"{sym_of['p21']}(x2,x1)", context_length=2)
        assert prove_equal(T, a, b).is_equal
        c = parse_term(f"{sym_of['p12']}(x2,x1)", context_length=2)
        assert prove_equal(T, a, c).is_distinct

    def test_traces_replay(self):
        T, sym_of = theory_from_operad(make_sym(3))
        a = parse_term(
            f"{sym_of['p12']}({sym_of['p1']}(x1),{sym_of['p21']}(x3,x2))",
            context_length=3)
        b = parse_term(f"{sym_of['p132']}(x1,x3,x2)", context_length=3)
        v = prove_equal(T, a, b)
        assert v.is_equal and replay_trace(T, a, b, v.trace)

    def test_round_trip_sizes(self):
        # operad -> theory -> operad recovers the carrier sizes
        base = make_sym(3)
        T, _ = theory_from_operad(base)
        # a simple term over n variables has 2n+1 nodes at most (op + vars)
        back = operad_from_theory(T, 3, 4)
        assert [len(back.carriers[n]) for n in range(4)] == \
            [len(base.carriers[n]) for n in range(4)]
        iso = find_operad_isomorphism(back, base)
        assert iso is not None and not iso.check()


class TestOperadMorphism:
    def test_unit_morphism_check(self):
        sym = make_sym(2)
        bad = OperadMorphism(sym, sym, (("p", "p"), ("p1", "p1"),
                                        ("p12", "p21"), ("p21", "p12")))
        assert bad.check()  # swapping arity-2 elements breaks composition
