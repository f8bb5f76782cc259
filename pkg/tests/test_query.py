"""Query kernel: planning errors, join semantics, filters, grouping, budgets."""
import time

import pytest

from rdfval.graph import GraphBuilder
from rdfval.query import (
    And,
    Arith,
    BudgetExceeded,
    Compare,
    Constant,
    FALSE,
    Filter,
    GroupCount,
    HasLanguage,
    IsIri,
    IsLiteral,
    IsValidForDatatype,
    LangMatches,
    NotExists,
    Plan,
    PlanError,
    Regex,
    SameLanguage,
    TriplePattern,
    Var,
    Variable,
    evaluate,
    plan,
    run_plan,
)
from rdfval.terms import Iri, Literal, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_INTEGER

EX = "urn:ex:"
A, B, C = Variable("a"), Variable("b"), Variable("c")


def iri(name):
    return Iri(EX + name)


def graph(*triples):
    b = GraphBuilder()
    for s, p, o in triples:
        b.add(s, p, o)
    return b.freeze()


def rows(g, pattern):
    return list(evaluate(g, pattern))


SMALL = graph(
    (iri("s1"), RDF_TYPE, iri("C")),
    (iri("s2"), RDF_TYPE, iri("C")),
    (iri("s1"), iri("p"), iri("o1")),
    (iri("s1"), iri("p"), iri("o2")),
    (iri("s2"), iri("p"), iri("o1")),
    (iri("o1"), iri("q"), Literal("5", XSD_INTEGER)),
)


def test_single_pattern_solutions():
    got = rows(SMALL, TriplePattern(A, iri("p"), B))
    assert len(got) == 3
    assert {(r[A], r[B]) for r in got} == {
        (iri("s1"), iri("o1")),
        (iri("s1"), iri("o2")),
        (iri("s2"), iri("o1")),
    }


def test_join_on_shared_variable():
    p = And([TriplePattern(A, iri("p"), B), TriplePattern(B, iri("q"), C)])
    got = rows(SMALL, p)
    assert {(r[A], r[C]) for r in got} == {
        (iri("s1"), Literal("5", XSD_INTEGER)),
        (iri("s2"), Literal("5", XSD_INTEGER)),
    }


def test_predicate_variables_match_every_edge():
    got = rows(SMALL, TriplePattern(iri("s2"), A, B))
    assert len(got) == 2
    assert {r[A] for r in got} == {RDF_TYPE, iri("p")}


def test_repeated_variable_requires_self_match():
    g = graph(
        (iri("n"), iri("p"), iri("n")),
        (iri("n"), iri("p"), iri("m")),
    )
    got = rows(g, TriplePattern(A, iri("p"), A))
    assert [r[A] for r in got] == [iri("n")]


def test_solutions_are_set_semantics():
    p = And([TriplePattern(A, RDF_TYPE, iri("C")), TriplePattern(A, iri("p"), B)])
    got = rows(SMALL, p)
    assert len(got) == len({(r[A], r[B]) for r in got}) == 3


def test_not_exists_filters_by_shared_variable():
    p = And(
        [
            TriplePattern(A, RDF_TYPE, iri("C")),
            NotExists(TriplePattern(A, iri("p"), iri("o2"))),
        ]
    )
    assert [r[A] for r in rows(SMALL, p)] == [iri("s2")]


def test_not_exists_with_compound_inner_pattern():
    inner = And(
        [
            TriplePattern(A, iri("p"), B),
            TriplePattern(B, iri("q"), C),
        ]
    )
    p = And([TriplePattern(A, RDF_TYPE, iri("C")), NotExists(inner)])
    assert rows(SMALL, p) == []


def test_filter_numeric_comparison_is_value_based():
    g = graph(
        (iri("s"), iri("p"), Literal("05", XSD_INTEGER)),
        (iri("s"), iri("p"), Literal("5.0", XSD_DECIMAL)),
        (iri("s"), iri("p"), Literal("6", XSD_INTEGER)),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(Compare("=", Var(A), Constant(Literal("5", XSD_INTEGER)))),
        ]
    )
    assert len(rows(g, p)) == 2


def test_filter_type_errors_drop_the_row():
    g = graph(
        (iri("s"), iri("p"), Literal("abc", XSD_INTEGER)),
        (iri("s"), iri("p"), Literal("7", XSD_INTEGER)),
        (iri("s"), iri("p"), iri("o")),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(Compare("<", Var(A), Constant(Literal("10", XSD_INTEGER)))),
        ]
    )
    assert [r[A] for r in rows(g, p)] == [Literal("7", XSD_INTEGER)]


def test_filter_string_comparison_is_bytewise():
    g = graph(
        (iri("s"), iri("p"), Literal("Zoo")),
        (iri("s"), iri("p"), Literal("apple")),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(Compare("<", Var(A), Constant(Literal("a")))),
        ]
    )
    assert [r[A] for r in rows(g, p)] == [Literal("Zoo")]


def test_filter_boolean_negation_idiom():
    g = graph(
        (iri("s"), iri("p"), Literal("x", language="en")),
        (iri("s"), iri("p"), Literal("y")),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(Compare("=", HasLanguage(A), Constant(FALSE))),
        ]
    )
    assert [r[A] for r in rows(g, p)] == [Literal("y")]


def test_filter_regex_flags():
    g = graph((iri("s"), iri("p"), Literal("Hello")))
    tp = TriplePattern(iri("s"), iri("p"), A)
    assert rows(g, And([tp, Filter(Regex(A, "^h"))])) == []
    assert len(rows(g, And([tp, Filter(Regex(A, "^h", "i"))]))) == 1


def test_filter_lang_matches():
    g = graph(
        (iri("s"), iri("p"), Literal("a", language="en-GB")),
        (iri("s"), iri("p"), Literal("b", language="de")),
        (iri("s"), iri("p"), Literal("c")),
    )
    tp = TriplePattern(iri("s"), iri("p"), A)
    en = rows(g, And([tp, Filter(LangMatches(A, "en"))]))
    assert [r[A].lexical for r in en] == ["a"]
    anytag = rows(g, And([tp, Filter(LangMatches(A, "*"))]))
    assert {r[A].lexical for r in anytag} == {"a", "b"}


def test_filter_same_language():
    g = graph(
        (iri("s"), iri("p"), Literal("a", language="en")),
        (iri("s"), iri("q"), Literal("b", language="en")),
        (iri("s"), iri("q"), Literal("c", language="de")),
        (iri("s"), iri("q"), Literal("d")),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            TriplePattern(iri("s"), iri("q"), B),
            Filter(SameLanguage(A, B)),
        ]
    )
    assert [r[B].lexical for r in rows(g, p)] == ["b"]


def test_filter_validity_probe():
    g = graph(
        (iri("s"), iri("p"), Literal("5", XSD_INTEGER)),
        (iri("s"), iri("p"), Literal("five", XSD_INTEGER)),
        (iri("s"), iri("p"), iri("o")),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(Compare("=", IsValidForDatatype(A), Constant(FALSE))),
        ]
    )
    assert [r[A] for r in rows(g, p)] == [Literal("five", XSD_INTEGER)]


def test_filter_arithmetic():
    g = graph(
        (iri("s"), iri("p"), Literal("3", XSD_INTEGER)),
        (iri("s"), iri("p"), Literal("4", XSD_INTEGER)),
    )
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(
                Compare(
                    ">",
                    Arith("*", Var(A), Constant(Literal("2", XSD_INTEGER))),
                    Constant(Literal("7", XSD_INTEGER)),
                )
            ),
        ]
    )
    assert [r[A].lexical for r in rows(g, p)] == ["4"]


def test_division_by_zero_drops_the_row():
    g = graph((iri("s"), iri("p"), Literal("0", XSD_INTEGER)))
    p = And(
        [
            TriplePattern(iri("s"), iri("p"), A),
            Filter(
                Compare(
                    "=",
                    Arith("/", Constant(Literal("1", XSD_INTEGER)), Var(A)),
                    Constant(Literal("1", XSD_INTEGER)),
                )
            ),
        ]
    )
    assert rows(g, p) == []


def test_iri_and_literal_probes():
    g = graph(
        (iri("s"), iri("p"), iri("o")),
        (iri("s"), iri("p"), Literal("x")),
    )
    tp = TriplePattern(iri("s"), iri("p"), A)
    assert [r[A] for r in rows(g, And([tp, Filter(IsIri(A))]))] == [iri("o")]
    assert [r[A] for r in rows(g, And([tp, Filter(IsLiteral(A))]))] == [Literal("x")]


def test_group_count_values_per_subject():
    p = And(
        [
            TriplePattern(A, iri("p"), B),
            GroupCount((A,), B, C),
        ]
    )
    got = rows(SMALL, p)
    counts = {r[A]: r[C] for r in got}
    assert counts == {
        iri("s1"): Literal("2", XSD_INTEGER),
        iri("s2"): Literal("1", XSD_INTEGER),
    }
    assert all(set(r) == {A, C} for r in got)


def test_group_count_then_filter():
    p = And(
        [
            TriplePattern(A, iri("p"), B),
            GroupCount((A,), B, C),
            Filter(Compare(">", Var(C), Constant(Literal("1", XSD_INTEGER)))),
        ]
    )
    assert [r[A] for r in rows(SMALL, p)] == [iri("s1")]


def test_group_count_of_nothing_is_no_rows():
    p = And(
        [
            TriplePattern(A, iri("absent"), B),
            GroupCount((A,), B, C),
        ]
    )
    assert rows(SMALL, p) == []


def test_plan_rejects_filters_over_unbound_variables():
    p = And(
        [
            TriplePattern(A, iri("p"), B),
            Filter(IsIri(C)),
        ]
    )
    with pytest.raises(PlanError) as err:
        plan(p)
    assert "?c" in str(err.value)


def test_plan_rejects_group_variables_never_bound():
    p = And([TriplePattern(A, iri("p"), B), GroupCount((C,), B, Variable("n"))])
    with pytest.raises(PlanError):
        plan(p)


def test_plan_rejects_variables_consumed_by_grouping():
    p = And(
        [
            TriplePattern(A, iri("p"), B),
            GroupCount((A,), B, C),
            Filter(IsLiteral(B)),
        ]
    )
    with pytest.raises(PlanError):
        plan(p)


def test_plan_rejects_bad_regex_and_operator():
    tp = TriplePattern(A, iri("p"), B)
    with pytest.raises(PlanError):
        plan(And([tp, Filter(Regex(B, "[unclosed"))]))
    with pytest.raises(PlanError):
        plan(And([tp, Filter(Compare("==", Var(B), Constant(Literal("x"))))]))


def test_plan_error_aggregates_every_problem():
    p = And(
        [
            TriplePattern(A, iri("p"), B),
            Filter(IsIri(C)),
            Filter(Regex(B, "[unclosed")),
        ]
    )
    with pytest.raises(PlanError) as err:
        plan(p)
    text = str(err.value)
    assert "?c" in text and "unclosed" in text


def test_union_of_pipelines_concatenates_solutions():
    p1 = plan(TriplePattern(A, RDF_TYPE, iri("C")))
    p2 = plan(TriplePattern(A, iri("p"), iri("o2")))
    union = Plan(p1.pipelines + p2.pipelines)
    got = [r[A] for r in run_plan(SMALL, union)]
    assert sorted(got, key=lambda t: t.text) == [iri("s1"), iri("s1"), iri("s2")]


def test_exhausted_deadline_raises_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        list(run_plan(SMALL, plan(TriplePattern(A, iri("p"), B)), deadline=0.0))


def test_generous_deadline_does_not_interfere():
    got = list(
        run_plan(
            SMALL,
            plan(TriplePattern(A, iri("p"), B)),
            deadline=time.monotonic() + 60,
        )
    )
    assert len(got) == 3
