"""Compile constraints to plans, run them, and collect outcomes.

Class membership is explicit rdf:type only; there is no subclass
inference.  Each violation is identified by its (focus, path, value)
triple, deduplicated, and reported once; violations are ordered by the
focus term's canonical form.  All failure modes are encoded in outcomes,
never raised out of check().
"""
from __future__ import annotations

import re
import time
from dataclasses import dataclass, replace

from .catalog import Catalog, Constraint, IMPLEMENTED, Severity
from .graph import Graph, GraphBuilder
from .query import (
    And,
    BudgetExceeded,
    Compare,
    Constant,
    CycleProbe,
    FALSE,
    Filter,
    GroupCount,
    IsIri,
    IsLiteral,
    IsValidForDatatype,
    LangMatches,
    NotExists,
    Pattern,
    Pipeline,
    Plan,
    PlanError,
    Regex,
    SameLanguage,
    Stage,
    TriplePattern as TP,
    Var,
    Variable,
    plan,
    run_plan,
)
from .terms import BlankNode, Iri, Literal, RDF_TYPE, Term, XSD_INTEGER

SKOS_IN_SCHEME = Iri("http://www.w3.org/2004/02/skos/core#inScheme")
QB = "http://purl.org/linked-data/cube#"

DEFAULT_LIMIT = 10_000
DEFAULT_BUDGET = 60.0
DEFAULT_CYCLE_DEPTH = 20

# Fixed reporting vocabulary for violation graphs.
REPORT_NS = "urn:rdfval:report#"
REPORT_ROOT = Iri(REPORT_NS + "root")
REPORT_PATH = Iri(REPORT_NS + "path")
REPORT_VALUE = Iri(REPORT_NS + "value")
REPORT_SEVERITY = Iri(REPORT_NS + "severity")
REPORT_MESSAGE = Iri(REPORT_NS + "message")
REPORT_CONSTRAINT = Iri(REPORT_NS + "constraint")

OK = "ok"
VIOLATED = "violated"
TRUNCATED = "truncated"
ENGINE_FAILURE = "engine-failure"
NOT_IMPLEMENTED_STATUS = "not-implemented"
SOURCE_INCOMPLETE = "source-incomplete"


class CompileError(ValueError):
    def __init__(self, constraint_id: str, reason: str):
        self.constraint_id = constraint_id
        self.reason = reason
        super().__init__(f"{constraint_id}: {reason}")


@dataclass(frozen=True)
class Violation:
    constraint_id: str
    severity: Severity
    focus: Term
    path: Iri | None
    value: Term | None
    message: str


@dataclass(frozen=True)
class CheckOutcome:
    constraint_id: str
    status: str
    violations: tuple[Violation, ...] = ()
    count: int = 0
    limit: int | None = None
    reason: str | None = None
    parts_missing: int | None = None
    wall_time: float = 0.0


# ---------------------------------------------------------------------------
# Family compilers

_X = Variable("x")
_Y = Variable("y")
_V = Variable("v")
_V2 = Variable("v2")
_W = Variable("w")
_P = Variable("p")
_N = Variable("n")

# "= false" turns a boolean test into its negation inside a Filter.
_NOT = Constant(FALSE)


def _with_meta(pattern: Pattern, focus, path=None, value=None) -> Plan:
    built = plan(pattern)
    return Plan(built.pipelines, focus, path, value)


def _union(patterns: list[Pattern], focus, path=None, value=None) -> Plan:
    pipelines: list[Pipeline] = []
    for p in patterns:
        pipelines.extend(plan(p).pipelines)
    return Plan(tuple(pipelines), focus, path, value)


def _int_lit(n: int) -> Constant:
    return Constant(Literal(str(n), XSD_INTEGER))


def _existential(params) -> Plan:
    c, p = params["class"], params["property"]
    pattern = And([TP(_X, RDF_TYPE, c), NotExists(TP(_X, p, _V))])
    return _with_meta(pattern, _X, p)


def _conditional(params) -> Plan:
    c = params["class"]
    if_p, then_p = params["if-property"], params["then-property"]
    pattern = And(
        [TP(_X, RDF_TYPE, c), TP(_X, if_p, _W), NotExists(TP(_X, then_p, _V))]
    )
    return _with_meta(pattern, _X, then_p)


def _cardinality(params, mode: str, qualified: bool) -> Plan:
    c, p, bound = params["class"], params["property"], params["bound"]
    value_tps = [TP(_X, p, _V)]
    if qualified:
        value_tps.append(TP(_V, RDF_TYPE, params["value-class"]))
    counted = And(
        [TP(_X, RDF_TYPE, c), *value_tps, GroupCount([_X], _V, _N)]
    )
    zero_case = And([TP(_X, RDF_TYPE, c), NotExists(And(value_tps))])

    patterns: list[Pattern] = []
    if mode == "max":
        patterns.append(And([counted, Filter(Compare(">", Var(_N), _int_lit(bound)))]))
    elif mode == "min":
        if bound == 0:
            return Plan((), _X, p)
        patterns.append(And([counted, Filter(Compare("<", Var(_N), _int_lit(bound)))]))
        patterns.append(zero_case)
    else:
        patterns.append(And([counted, Filter(Compare("!=", Var(_N), _int_lit(bound)))]))
        if bound > 0:
            patterns.append(zero_case)
    return _union(patterns, _X, p, _N)


def _universal(params) -> Plan:
    c, p, vc = params["class"], params["property"], params["value-class"]
    pattern = And([TP(_X, RDF_TYPE, c), TP(_X, p, _V), NotExists(TP(_V, RDF_TYPE, vc))])
    return _with_meta(pattern, _X, p, _V)


def _membership(params) -> Plan:
    p, scheme = params["property"], params["scheme"]
    pattern = And([TP(_X, p, _V), NotExists(TP(_V, SKOS_IN_SCHEME, scheme))])
    return _with_meta(pattern, _X, p, _V)


def _valid_datatype(params) -> Plan:
    dt = params.get("datatype")
    invalid = Filter(Compare("=", IsValidForDatatype(_V, dt), _NOT))
    p = params.get("property")
    if p is not None:
        return _with_meta(And([TP(_X, p, _V), invalid]), _X, p, _V)
    return _with_meta(And([TP(_X, _P, _V), invalid]), _X, _P, _V)


def _literal_range(params) -> Plan:
    p = params["property"]
    prefix: list[Pattern] = []
    if "class" in params:
        prefix.append(TP(_X, RDF_TYPE, params["class"]))
    patterns: list[Pattern] = []
    if "min-inclusive" in params:
        patterns.append(
            And([*prefix, TP(_X, p, _V), Filter(Compare("<", Var(_V), _int_lit(params["min-inclusive"])))])
        )
    if "max-inclusive" in params:
        patterns.append(
            And([*prefix, TP(_X, p, _V), Filter(Compare(">", Var(_V), _int_lit(params["max-inclusive"])))])
        )
    return _union(patterns, _X, p, _V)


def _value_comparison(params) -> Plan:
    c, p, q = params["class"], params["property"], params["other-property"]
    pattern = And(
        [
            TP(_X, RDF_TYPE, c),
            TP(_X, p, _V),
            TP(_X, q, _W),
            Filter(Compare(">", Var(_V), Var(_W))),
        ]
    )
    return _with_meta(pattern, _X, p, _V)


def _facets(params) -> Plan:
    p, dt = params["property"], params["datatype"]
    prefix: list[Pattern] = []
    if "class" in params:
        prefix.append(TP(_X, RDF_TYPE, params["class"]))
    patterns: list[Pattern] = [
        And([*prefix, TP(_X, p, _V), Filter(Compare("=", IsValidForDatatype(_V, dt), _NOT))])
    ]
    if "min-inclusive" in params:
        patterns.append(
            And([*prefix, TP(_X, p, _V), Filter(Compare("<", Var(_V), _int_lit(params["min-inclusive"])))])
        )
    if "max-inclusive" in params:
        patterns.append(
            And([*prefix, TP(_X, p, _V), Filter(Compare(">", Var(_V), _int_lit(params["max-inclusive"])))])
        )
    return _union(patterns, _X, p, _V)


def _pattern_matching(params, iri_side: bool) -> Plan:
    p, rx = params["property"], params["pattern"]
    prefix: list[Pattern] = []
    if "class" in params:
        prefix.append(TP(_X, RDF_TYPE, params["class"]))
    kind_guard = Filter(IsIri(_V)) if iri_side else Filter(IsLiteral(_V))
    pattern = And(
        [
            *prefix,
            TP(_X, p, _V),
            kind_guard,
            Filter(Compare("=", Regex(_V, rx), _NOT)),
        ]
    )
    return _with_meta(pattern, _X, p, _V)


def _inverse_functional(params) -> Plan:
    p = params["property"]
    pattern = And(
        [TP(_X, p, _V), TP(_Y, p, _V), Filter(Compare("!=", Var(_X), Var(_Y)))]
    )
    return _with_meta(pattern, _X, p, _V)


def _domain(params) -> Plan:
    p, c = params["property"], params["class"]
    pattern = And([TP(_X, p, _V), NotExists(TP(_X, RDF_TYPE, c))])
    return _with_meta(pattern, _X, p)


def _range(params) -> Plan:
    p, c = params["property"], params["class"]
    pattern = And([TP(_X, p, _V), NotExists(TP(_V, RDF_TYPE, c))])
    return _with_meta(pattern, _X, p, _V)


def _class_specific_range(params) -> Plan:
    c, p, vc = params["class"], params["property"], params["value-class"]
    pattern = And([TP(_X, RDF_TYPE, c), TP(_X, p, _V), NotExists(TP(_V, RDF_TYPE, vc))])
    return _with_meta(pattern, _X, p, _V)


def _valid_properties(params) -> Plan:
    c, allowed = params["class"], params["properties"]
    if not all(isinstance(a, Iri) for a in allowed):
        raise ValueError("every entry of 'properties' must be an IRI")
    filters = [Filter(Compare("!=", Var(_P), Constant(a))) for a in allowed]
    pattern = And([TP(_X, RDF_TYPE, c), TP(_X, _P, _V), *filters])
    return _with_meta(pattern, _X, _P, _V)


def _disjoint(params) -> Plan:
    c1, c2 = params["class"], params["other-class"]
    pattern = And([TP(_X, RDF_TYPE, c1), TP(_X, RDF_TYPE, c2)])
    return _with_meta(pattern, _X, RDF_TYPE, c2)


def _language_cardinality(params) -> Plan:
    c, p = params["class"], params["property"]
    if "max-per-language" in params:
        pattern = And(
            [
                TP(_X, RDF_TYPE, c),
                TP(_X, p, _V),
                TP(_X, p, _V2),
                Filter(Compare("!=", Var(_V), Var(_V2))),
                Filter(SameLanguage(_V, _V2)),
            ]
        )
        return _with_meta(pattern, _X, p)
    if "required-language" in params:
        rng = params["required-language"]
        pattern = And(
            [
                TP(_X, RDF_TYPE, c),
                NotExists(And([TP(_X, p, _V), Filter(LangMatches(_V, rng))])),
            ]
        )
        return _with_meta(pattern, _X, p)
    rng = params["value-language"]
    pattern = And(
        [
            TP(_X, RDF_TYPE, c),
            TP(_X, p, _V),
            Filter(IsLiteral(_V)),
            Filter(Compare("=", LangMatches(_V, rng), _NOT)),
        ]
    )
    return _with_meta(pattern, _X, p, _V)


def _acyclicity(params) -> Plan:
    p = params["property"]
    depth = params.get("max-depth", DEFAULT_CYCLE_DEPTH)
    probe = CycleProbe(_X, p, depth)
    return Plan((Pipeline((Stage((probe,)),)),), _X, p)


def _allowed_values(params) -> Plan:
    p, allowed = params["property"], params["values"]
    prefix: list[Pattern] = []
    if "class" in params:
        prefix.append(TP(_X, RDF_TYPE, params["class"]))
    iris = [a for a in allowed if isinstance(a, Iri)]
    lits = [a for a in allowed if isinstance(a, Literal)]
    patterns: list[Pattern] = [
        And(
            [
                *prefix,
                TP(_X, p, _V),
                Filter(IsIri(_V)),
                *[Filter(Compare("!=", Var(_V), Constant(a))) for a in iris],
            ]
        ),
        And(
            [
                *prefix,
                TP(_X, p, _V),
                Filter(IsLiteral(_V)),
                *[Filter(Compare("!=", Var(_V), Constant(a))) for a in lits],
            ]
        ),
        And(
            [
                *prefix,
                TP(_X, p, _V),
                Filter(Compare("=", IsIri(_V), _NOT)),
                Filter(Compare("=", IsLiteral(_V), _NOT)),
            ]
        ),
    ]
    return _union(patterns, _X, p, _V)


def _dimension_completeness(params) -> Plan:
    del params
    o, ds, s, comp, d, z = (
        Variable("o"),
        Variable("ds"),
        Variable("s"),
        Variable("c"),
        Variable("d"),
        Variable("z"),
    )
    pattern = And(
        [
            TP(o, Iri(QB + "dataSet"), ds),
            TP(ds, Iri(QB + "structure"), s),
            TP(s, Iri(QB + "component"), comp),
            TP(comp, Iri(QB + "dimension"), d),
            NotExists(TP(o, d, z)),
        ]
    )
    return _with_meta(pattern, o, d)


_COMPILERS = {
    "EXISTENTIAL-QUANTIFICATION": _existential,
    "CONDITIONAL-PROPERTY": _conditional,
    "MIN-QUALIFIED-CARDINALITY": lambda p: _cardinality(p, "min", True),
    "MAX-QUALIFIED-CARDINALITY": lambda p: _cardinality(p, "max", True),
    "EXACT-QUALIFIED-CARDINALITY": lambda p: _cardinality(p, "exact", True),
    "MIN-UNQUALIFIED-CARDINALITY": lambda p: _cardinality(p, "min", False),
    "MAX-UNQUALIFIED-CARDINALITY": lambda p: _cardinality(p, "max", False),
    "EXACT-UNQUALIFIED-CARDINALITY": lambda p: _cardinality(p, "exact", False),
    "UNIVERSAL-QUANTIFICATION": _universal,
    "MEMBERSHIP-IN-CONTROLLED-VOCABULARY": _membership,
    "VALUE-IS-VALID-FOR-DATATYPE": _valid_datatype,
    "LITERAL-RANGE": _literal_range,
    "LITERAL-VALUE-COMPARISON": _value_comparison,
    "DATA-PROPERTY-FACETS": _facets,
    "LITERAL-PATTERN-MATCHING": lambda p: _pattern_matching(p, False),
    "IRI-PATTERN-MATCHING": lambda p: _pattern_matching(p, True),
    "INVERSE-FUNCTIONAL-PROPERTY": _inverse_functional,
    "PROPERTY-DOMAIN": _domain,
    "PROPERTY-RANGE": _range,
    "CLASS-SPECIFIC-PROPERTY-RANGE": _class_specific_range,
    "CONTEXT-SPECIFIC-VALID-PROPERTIES": _valid_properties,
    "DISJOINT-CLASSES": _disjoint,
    "LANGUAGE-TAG-CARDINALITY": _language_cardinality,
    "STRUCTURE-ACYCLICITY": _acyclicity,
    "ALLOWED-VALUES": _allowed_values,
    "DIMENSION-COMPLETENESS": _dimension_completeness,
}


def compile_constraint(c: Constraint, prefixes=None) -> Plan:
    """Build the violation plan for an implemented constraint.

    The plan's bindings are exactly the violating (focus, path, value)
    tuples of the family's semantics; deterministic for a given constraint.
    """
    del prefixes  # parameters are fully resolved at catalog load time
    if c.status != IMPLEMENTED:
        raise CompileError(c.id, "constraint is not implemented")
    compiler = _COMPILERS.get(c.family.family_id)
    if compiler is None:
        raise CompileError(c.id, f"family {c.family.family_id} has no compiler")
    try:
        return compiler(c.params)
    except KeyError as exc:
        raise CompileError(c.id, f"missing parameter {exc.args[0]!r}") from None
    except PlanError as exc:
        raise CompileError(c.id, str(exc)) from None
    except ValueError as exc:
        raise CompileError(c.id, str(exc)) from None


# ---------------------------------------------------------------------------
# Execution


def _display(term: Term | None) -> str:
    if term is None:
        return ""
    if isinstance(term, Iri):
        return term.text
    if isinstance(term, Literal):
        return term.lexical
    return f"_:{term.label}"


_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")


def _render_message(c: Constraint, focus: Term, path: Iri | None, value: Term | None) -> str:
    substitutions: dict[str, str] = {
        "focus": _display(focus),
        "path": _display(path),
        "value": _display(value),
    }
    for name, pvalue in c.params.items():
        if isinstance(pvalue, Term):
            substitutions[name] = _display(pvalue)
        elif isinstance(pvalue, tuple):
            substitutions[name] = ", ".join(_display(t) for t in pvalue)
        else:
            substitutions[name] = str(pvalue)
    return _PLACEHOLDER.sub(
        lambda m: substitutions.get(m.group(1), m.group(0)), c.message
    )


def _sort_key(v: Violation):
    return (
        _display(v.focus),
        v.focus.__class__.__name__,
        _display(v.path) if v.path else "",
        _display(v.value) if v.value else "",
        v.value.__class__.__name__ if v.value else "",
    )


def _run_constraint(
    g: Graph, c: Constraint, limit: int | None, budget: float | None
) -> CheckOutcome:
    start = time.monotonic()
    deadline = None if budget is None else start + budget
    try:
        built = compile_constraint(c)
    except CompileError as exc:
        return CheckOutcome(
            c.id, ENGINE_FAILURE, reason=f"compile: {exc.reason}", wall_time=time.monotonic() - start
        )
    focus_var, path_spec, value_spec = built.focus, built.path, built.value

    found: dict[tuple, None] = {}
    truncated = False
    try:
        for row in run_plan(g, built, deadline=deadline):
            focus = row.get(focus_var)
            if focus is None or isinstance(focus, Literal):
                continue
            if isinstance(path_spec, Variable):
                path = row.get(path_spec)
                if not isinstance(path, Iri):
                    path = None
            else:
                path = path_spec
            if isinstance(value_spec, Variable):
                value = row.get(value_spec)
            else:
                value = value_spec
            key = (focus, path, value)
            if key in found:
                continue
            if limit is not None and len(found) >= limit:
                truncated = True
                break
            found[key] = None
    except BudgetExceeded:
        return CheckOutcome(
            c.id, ENGINE_FAILURE, reason="budget", wall_time=time.monotonic() - start
        )
    except Exception as exc:  # pragma: no cover - defensive isolation
        return CheckOutcome(
            c.id, ENGINE_FAILURE, reason=str(exc), wall_time=time.monotonic() - start
        )

    violations = [
        Violation(c.id, c.severity, focus, path, value, _render_message(c, focus, path, value))
        for focus, path, value in found
    ]
    violations.sort(key=_sort_key)
    elapsed = time.monotonic() - start
    if truncated:
        return CheckOutcome(
            c.id,
            TRUNCATED,
            tuple(violations),
            count=len(violations),
            limit=limit,
            wall_time=elapsed,
        )
    if violations:
        return CheckOutcome(
            c.id, VIOLATED, tuple(violations), count=len(violations), wall_time=elapsed
        )
    return CheckOutcome(c.id, OK, wall_time=elapsed)


def check(
    g: Graph,
    catalog: Catalog,
    limit: int | None = DEFAULT_LIMIT,
    budget: float | None = DEFAULT_BUDGET,
) -> list[CheckOutcome]:
    """Run every catalog constraint over the graph, in catalog order.

    Outcomes are independent: a failing constraint never aborts the rest.
    `limit` caps violations per constraint (reaching it stops that
    constraint early); `budget` is wall-clock seconds per constraint.
    """
    outcomes: list[CheckOutcome] = []
    for c in catalog.constraints:
        if c.status != IMPLEMENTED:
            outcomes.append(CheckOutcome(c.id, NOT_IMPLEMENTED_STATUS))
            continue
        outcomes.append(_run_constraint(g, c, limit, budget))
    return outcomes


def mark_source_incomplete(outcomes: list[CheckOutcome], parts_missing: int) -> list[CheckOutcome]:
    """Re-flag data-dependent outcomes after a partial harvest: counts are
    kept, detail records dropped, statuses become source-incomplete."""
    flagged: list[CheckOutcome] = []
    for o in outcomes:
        if o.status in (OK, VIOLATED, TRUNCATED):
            flagged.append(
                replace(
                    o,
                    status=SOURCE_INCOMPLETE,
                    violations=(),
                    parts_missing=parts_missing,
                )
            )
        else:
            flagged.append(o)
    return flagged


def violations_to_graph(outcomes: list[CheckOutcome]) -> Graph:
    """Encode all violations as triples in the fixed reporting namespace,
    one node per violation, one triple per populated field."""
    b = GraphBuilder()
    n = 0
    for outcome in outcomes:
        for v in outcome.violations:
            node = BlankNode(f"v{n}")
            n += 1
            b.add(node, REPORT_ROOT, v.focus)
            if v.path is not None:
                b.add(node, REPORT_PATH, v.path)
            if v.value is not None:
                b.add(node, REPORT_VALUE, v.value)
            b.add(node, REPORT_SEVERITY, Literal(v.severity.json_name))
            b.add(node, REPORT_MESSAGE, Literal(v.message))
            b.add(node, REPORT_CONSTRAINT, Literal(v.constraint_id))
    return b.freeze(name="violations")
