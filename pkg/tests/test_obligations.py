import pytest

from proofdesk import fol
from proofdesk.article import AssumeStep, LetStep, ThusStep, ByRefs
from proofdesk.errors import UnknownReferenceError
from proofdesk.obligations import (
    ScopeConstant,
    SkeletonMismatch,
    Thesis,
    extract_obligations,
    step_thesis,
    walk_theorem,
)
from proofdesk.parser import parse_article, parse_formula

BY = ByRefs(("t1_lib",))


def F(text):
    return parse_formula(text)


class TestStepThesis:
    def test_assume_peels_implication(self):
        out = step_thesis(Thesis(F("p implies q")), AssumeStep(None, F("p")))
        assert out.current == F("q")

    def test_let_fixes_constant_with_reserved_type(self):
        out = step_thesis(
            Thesis(F("for X holds r(X)")), LetStep(("X",)), {"X": "set"}
        )
        assert out.current == F("r(c1)")
        assert out.scope == (ScopeConstant("c1", "set", 1),)

    def test_thus_must_match_first_conjunct(self):
        with pytest.raises(SkeletonMismatch):
            step_thesis(Thesis(F("p & q")), ThusStep(F("q"), BY))
        out = step_thesis(Thesis(F("p & q")), ThusStep(F("p"), BY))
        assert out.current == F("q")

    def test_thus_whole_thesis_discharges(self):
        out = step_thesis(Thesis(F("p & q")), ThusStep(F("p & q"), BY))
        assert out.discharged

    def test_partial_let_keeps_remaining_quantifier(self):
        out = step_thesis(
            Thesis(F("for X, Y holds q(X, Y)")), LetStep(("X",)), {"X": "set"}
        )
        assert out.current == F("for Y holds q(c1, Y)")

    def test_redundant_type_assumption_is_a_no_op(self):
        thesis = Thesis(F("r(c1)"), (ScopeConstant("c1", "set", 1),))
        out = step_thesis(thesis, AssumeStep(None, F("set(c1)")))
        assert out == thesis

    def test_mismatched_assume_fails(self):
        with pytest.raises(SkeletonMismatch):
            step_thesis(Thesis(F("p implies q")), AssumeStep(None, F("q")))
        with pytest.raises(SkeletonMismatch):
            step_thesis(Thesis(F("p")), AssumeStep(None, F("p")))

    def test_let_needs_universal(self):
        with pytest.raises(SkeletonMismatch):
            step_thesis(Thesis(F("p")), LetStep(("X",)))

    def test_matching_modulo_flattening_and_renaming(self):
        out = step_thesis(
            Thesis(F("(p & q) & r implies s")),
            AssumeStep(None, F("p & q & r")),
        )
        assert out.current == F("s")


class TestExtraction:
    def test_golden_sample(self, golden_article):
        obligations = extract_obligations(golden_article)
        assert len(obligations) == 1
        ob = obligations[0]
        assert ob.id == "e2_2__mtest1"
        assert ob.conjecture == F("wellorder(relincl(c1))")
        assert [(r.name, r.kind) for r in ob.explicit_refs] == [
            ("d1_mtest1", "definition")
        ]
        assert ob.scope == (ScopeConstant("c1", "set", 1),)
        assert ob.origin == ("t2", 2)

    def test_article_without_proofs(self):
        a = parse_article("article a; theorem t1: p; definition d1: q;")
        assert extract_obligations(a) == []

    def test_one_obligation_per_by(self):
        a = parse_article(
            "article a; "
            "theorem t1: p & q & r & s proof "
            "s1: p by t1_lib; s2: q by t1_lib; s3: r by s1, t2_lib; "
            "thus p & q & r & s by s1, s2, s3; end;"
        )
        obligations = extract_obligations(a)
        assert len(obligations) == 4
        assert [o.id for o in obligations] == [
            "e1_1__a", "e2_1__a", "e3_1__a", "e4_1__a",
        ]

    def test_nested_subproof_numbering(self):
        a = parse_article(
            "article a; "
            "theorem t1: p & q proof "
            "s1: p proof thus p by t1_lib; end; "
            "thus p & q by s1, t2_lib; end;"
        )
        obligations = extract_obligations(a)
        # s1 itself is e1; its inner thus is e2; outer thus is e3
        assert [o.id for o in obligations] == ["e2_1__a", "e3_1__a"]
        assert obligations[0].conjecture == F("p")
        inner_refs = [r.name for r in obligations[1].explicit_refs]
        assert inner_refs == ["e1_1__a", "t2_lib"]

    def test_local_citations_carry_substituted_formulas(self):
        a = parse_article(
            "article a; reserve X for set; "
            "theorem t1: for X holds (p(X) implies q(X)) proof "
            "let X; assume h: p(X); thus q(X) by h, t9_lib; end;"
        )
        (ob,) = extract_obligations(a)
        assert ob.conjecture == F("q(c1)")
        by_name = {r.name: r for r in ob.explicit_refs}
        assert by_name["e1_1__a"].formula == F("p(c1)")
        assert by_name["t9_lib"].formula is None

    def test_missing_library_reference_reported(self, golden_article, corpus):
        lib, _ = corpus  # has base0, not d1-less article refs
        a = parse_article(
            "article a; theorem t1: p proof thus p by t99_base0; end;"
        )
        with pytest.raises(UnknownReferenceError) as exc:
            extract_obligations(a, lib)
        assert exc.value.reference == "t99_base0"
        # without a store, the pattern alone is accepted
        assert len(extract_obligations(a)) == 1

    def test_scope_constants_unique_across_subproofs(self):
        a = parse_article(
            "article a; reserve X for set; reserve Y for set; "
            "theorem t1: for X holds (p(X) implies (q(X) & r(X))) proof "
            "let X; assume h: p(X); "
            "s1: for Y holds q(Y) proof let Y; thus q(Y) by t1_lib; end; "
            "thus q(X) by s1; thus r(X) by h, t2_lib; end;"
        )
        obligations = extract_obligations(a)
        # e1 = assume h, e2 = s1 itself, e3 = the thus inside s1's subproof
        inner = next(o for o in obligations if o.id == "e3_1__a")
        assert inner.conjecture == F("q(c2)")  # inner let is c2, outer c1
        assert [sc.name for sc in inner.scope] == ["c1", "c2"]
        outer = next(o for o in obligations if o.id == "e4_1__a")
        assert [sc.name for sc in outer.scope] == ["c1"]


class TestWalkTheorem:
    def test_golden_discharges(self, golden_article):
        walk = walk_theorem(golden_article, golden_article.items[2])
        assert walk.discharged
        assert walk.skeleton_error is None
        assert [s.kind for s in walk.steps] == ["let", "assume", "thus"]
        assert walk.steps[2].thesis_after == fol.VERUM

    def test_undischarged_thesis_reported(self):
        a = parse_article(
            "article a; theorem t1: p & q proof thus p by t1_lib; end;"
        )
        walk = walk_theorem(a, a.items[0])
        assert not walk.discharged
        assert "undischarged" in walk.skeleton_error

    def test_skeleton_error_recorded_at_step(self):
        a = parse_article(
            "article a; theorem t1: p & q proof thus q by t1_lib; end;"
        )
        walk = walk_theorem(a, a.items[0])
        assert walk.steps[0].skeleton_error is not None
        assert not walk.discharged
        # obligations are still extracted
        assert [o.id for o in walk.obligations] == ["e1_1__a"]

    def test_subproof_thesis_is_step_formula(self):
        a = parse_article(
            "article a; theorem t1: p proof "
            "s1: q & r proof thus q by t1_lib; thus r by t2_lib; end; "
            "thus p by s1, t3_lib; end;"
        )
        walk = walk_theorem(a, a.items[0])
        assert walk.discharged
        sub = walk.steps[0]
        assert [c.thesis_after for c in sub.children] == [F("r"), fol.VERUM]
