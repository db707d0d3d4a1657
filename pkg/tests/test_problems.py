from pathlib import Path

import pytest

from proofdesk import fol, names, tptp_scan
from proofdesk.clausal import clausify
from proofdesk.errors import GenerationError
from proofdesk.library import LibraryStore, export_article
from proofdesk.obligations import Obligation, ResolvedRef, ScopeConstant, extract_obligations
from proofdesk.parser import parse_article, parse_formula
from proofdesk.problems import (
    ArticleContext,
    DependencyGraph,
    generate_all,
    generate_problem,
    write_problem_files,
)
from proofdesk.saturation import saturate
from proofdesk.szs import SzsStatus


def golden_problem(golden_article, generated_at=None):
    ctx = ArticleContext.from_article(golden_article)
    (ob,) = extract_obligations(golden_article)
    return generate_problem(ob, None, ctx, generated_at=generated_at)


class TestGenerateProblem:
    def test_golden_file_bytes(self, golden_article, golden_problem_text):
        problem = golden_problem(golden_article)
        assert problem.render() == golden_problem_text

    def test_axiom_order_and_names(self, golden_article):
        problem = golden_problem(golden_article)
        assert problem.all_names() == [
            "d1_mtest1", "dt_c1_2__mtest1", "dt_k1_mtest1", "e2_2__mtest1",
        ]
        assert problem.kind_of("dt_k1_mtest1") == names.FUNCTOR_TYPE
        assert problem.kind_of("dt_c1_2__mtest1") == names.CONSTANT_TYPE

    def test_determinism_byte_identical(self, golden_article):
        a = golden_problem(golden_article, "2026-01-01T00:00:00+00:00")
        b = golden_problem(golden_article, "2026-01-01T00:00:00+00:00")
        assert a.render() == b.render()

    def test_no_refs_propositional_countersatisfiable(self):
        ob = Obligation(
            id="e1_1__a",
            article="a",
            theorem_ordinal=1,
            conjecture=parse_formula("p"),
            explicit_refs=(),
            scope=(),
            origin=("t1", 1),
        )
        ctx = ArticleContext("a", (), ())
        problem = generate_problem(ob, None, ctx)
        assert problem.all_names() == ["e1_1__a"]
        form = clausify([], problem.conjecture.formula, problem.conjecture.name)
        assert saturate(form).status is SzsStatus.COUNTER_SATISFIABLE

    def test_unresolved_library_reference(self):
        ob = Obligation(
            id="e1_1__a",
            article="a",
            theorem_ordinal=1,
            conjecture=parse_formula("p"),
            explicit_refs=(ResolvedRef("t1_missing", None, names.THEOREM),),
            scope=(),
            origin=("t1", 1),
        )
        with pytest.raises(GenerationError):
            generate_problem(ob, LibraryStore(), ArticleContext("a", (), ()))

    def test_undeclared_symbol_reported_not_dropped(self):
        ob = Obligation(
            id="e1_1__a",
            article="a",
            theorem_ordinal=1,
            conjecture=parse_formula("p(kk)"),
            explicit_refs=(),
            scope=(),
            origin=("t1", 1),
        )
        problem = generate_problem(ob, None, ArticleContext("a", (), ()))
        assert any("kk" in w for w in problem.warnings)
        assert "% warning" in problem.render()

    def test_seven_name_arithmetic(self, corpus):
        # 4 explicit references + 1 declared functor + 1 typed scope constant
        # = 4 axioms + 2 dt_* + 1 conjecture = 7 named formulas.
        lib, _ = corpus
        text = (
            "article seven; reserve X for set;\n"
            "func sf(X) -> set;\n"
            "definition d1: for X holds base(sf(X));\n"
            "theorem t1: for X holds (p1(X) implies (q1(X) & r1(X) & base(sf(X))))\n"
            "proof let X; assume h1: p1(X);\n"
            "s1: q1(X) by h1, t1_base0;\n"
            "thus q1(X) & r1(X) & base(sf(X)) by h1, s1, t2_base0, d1; end;\n"
        )
        article = parse_article(text)
        ctx = ArticleContext.from_article(article)
        obligations = extract_obligations(article, lib)
        final = obligations[-1]
        assert len(final.explicit_refs) == 4
        problem = generate_problem(final, lib, ctx)
        assert len(problem.all_names()) == 7
        assert len(problem.axioms) == 6
        dt_names = [a.name for a in problem.axioms if a.name.startswith("dt_")]
        assert dt_names == ["dt_c1_1__seven", "dt_k1_seven"]
        form = clausify(
            [(a.name, a.formula) for a in problem.axioms],
            problem.conjecture.formula,
            problem.conjecture.name,
        )
        result = saturate(form)
        assert result.status is SzsStatus.THEOREM
        assert set(result.used_axioms) <= set(problem.all_names())

    def test_closure_pulls_chained_dt_axioms(self):
        # dt of f mentions functor g, whose dt must also be pulled in.
        text = (
            "article chain; reserve X for set;\n"
            "func gg(X) -> set;\n"
            "func ff(X) -> big;\n"
            "definition d1: for X holds p(ff(gg(X)));\n"
            "theorem t1: for X holds p(ff(gg(X)))\n"
            "proof let X; thus p(ff(gg(X))) by d1; end;\n"
        )
        article = parse_article(text)
        ctx = ArticleContext.from_article(article)
        (ob,) = extract_obligations(article)
        problem = generate_problem(ob, None, ctx)
        dt_names = {a.name for a in problem.axioms if a.name.startswith("dt_k")}
        assert dt_names == {"dt_k1_chain", "dt_k2_chain"}

    def test_closure_minimality(self, golden_article):
        # every dt axiom in the closure declares a symbol that occurs in the
        # problem, so removing it breaks coverage.
        problem = golden_problem(golden_article)
        scanned = tptp_scan.scan_problem(problem.render())
        for axiom in problem.axioms:
            if not axiom.name.startswith("dt_"):
                continue
            parsed = names.parse_name(axiom.name)
            if parsed.kind == names.FUNCTOR_TYPE:
                declared = "relincl"
            else:
                declared = f"c{parsed.ordinal}"
            assert declared in scanned.functors


class TestDependencyGraph:
    def test_local_declaration_wins_over_library(self, corpus):
        lib, _ = corpus
        article = parse_article(
            "article dup; reserve X for set; func g1(X) -> set;\n"
            "theorem t1: for X holds p1(g1(X))\n"
            "proof let X; thus p1(g1(X)) by t1_base0; end;\n"
        )
        ctx = ArticleContext.from_article(article)
        graph = DependencyGraph.build(lib, ctx, (), 1)
        assert graph.typed_by["g1"].name == "dt_k1_dup"

    def test_closure_returns_sorted_and_warns(self):
        ctx = ArticleContext("a", (), ())
        graph = DependencyGraph.build(None, ctx, (), 1)
        items, warnings = graph.closure([parse_formula("p(zz)")])
        assert items == []
        assert warnings == ["no declaration for symbol 'zz'"]


class TestGenerateAll:
    def test_golden_log(self, golden_article):
        seen = []
        lines = generate_all(golden_article, None, seen.append,
                             now=lambda: "T0")
        assert [p.name for p in seen] == ["e2_2__mtest1"]
        assert lines == ["T0 generated e2_2__mtest1"]

    def test_interrupted_sink_prefix_property(self, corpus):
        lib, articles = corpus
        article = articles[0]
        total = len(extract_obligations(article))
        assert total >= 3
        k = total - 1

        class Stop(Exception):
            pass

        delivered = []

        def sink(problem):
            if len(delivered) == k:
                raise Stop()
            delivered.append(problem)

        lines = []
        with pytest.raises(Stop):
            generate_all(article, lib, sink, log=lines.append)
        assert len([l for l in lines if " generated " in l]) == k

    def test_write_problem_files_resume(self, tmp_path, golden_article):
        out1 = write_problem_files(golden_article, None, tmp_path)
        assert out1.problems == ["e2_2__mtest1"]
        problem_file = tmp_path / "mtest1" / "problems" / "e2_2__mtest1.p"
        assert problem_file.exists()
        log = (tmp_path / "mtest1" / "generation.log").read_text()
        assert log.count(" generated e2_2__mtest1") == 1
        # resume: nothing rewritten, no duplicate log lines
        out2 = write_problem_files(golden_article, None, tmp_path)
        assert out2.problems == [] and out2.skipped == ["e2_2__mtest1"]
        log2 = (tmp_path / "mtest1" / "generation.log").read_text()
        assert log2 == log


class TestExportArticle:
    def test_functor_type_axiom_shape(self, golden_article):
        items = export_article(golden_article)
        by_name = {i.name: i for i in items}
        dt = by_name["dt_k1_mtest1"]
        assert dt.formula == parse_formula(
            "for X holds set(X) implies relation(relincl(X))"
        )
        assert dt.declares == "relincl"
        assert by_name["t2_mtest1"].kind == names.THEOREM
        assert by_name["d1_mtest1"].formula == parse_formula(
            "for X holds set(X) implies wellorder(relincl(X))"
        )

    def test_article_without_functors_has_no_dt(self):
        a = parse_article("article a; theorem t1: p;")
        items = export_article(a)
        assert [i.name for i in items] == ["t1_a"]

    def test_symbols_field_exact(self, golden_article):
        for item in export_article(golden_article):
            assert item.symbols == frozenset(fol.symbols(item.formula))

    def test_store_save_load_round_trip(self, tmp_path, golden_article):
        store = LibraryStore()
        store.add_article("mtest1", export_article(golden_article))
        path = tmp_path / "library.json"
        store.save(path)
        loaded = LibraryStore.load(path)
        assert loaded.all_names() == store.all_names()
        for name in store.all_names():
            assert loaded.get(name) == store.get(name)

    def test_export_gate_and_force(self, golden_article):
        from proofdesk.library import ExportError
        from proofdesk.verifier import verify_article

        bad = parse_article(
            "article bad; theorem t1: p proof thus p by t1_nowhere; end;"
        )
        report = verify_article(bad, LibraryStore())
        assert report.items[0].status == "failed"
        with pytest.raises(ExportError):
            export_article(bad, report)
        items = export_article(bad, report, force=True)
        assert [i.name for i in items] == ["t1_bad"]
