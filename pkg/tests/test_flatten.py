import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modelforge.flatten import (
    FlatLiteral, FunctionAxiomSchema, FVar, flatten_clause, flatten_clause_all,
    flatten_theory, function_axiom_clauses, function_schemas,
)
from modelforge.lang import App, Clause, Elem, Literal, Var, parse_clause, parse_input

from conftest import fixture_text
import oracles


def flat_strs(text):
    p = parse_input(f"list(usable). {text} end_of_list.")
    return [str(c) for c in flatten_theory(p.theory, p.symbols)]


def test_even_clauses():
    p = parse_input(fixture_text("even.in"))
    assert [str(c) for c in flatten_theory(p.theory, p.symbols)] == [
        "-a(v0) | even(v0)",
        "-s(v0,v1) | -s(v1,v2) | -even(v0) | even(v2)",
        "-a(v0) | -s(v0,v1) | -even(v1)",
    ]


def test_distributivity_two_clauses():
    out = flatten_clause_all(parse_clause("x * (y + z) = (x + y) * (x + z)"))
    assert [str(c) for c in out] == [
        "-+(v0,v1,v2) | -+(v0,v3,v4) | -*(v4,v2,v5) | -+(v3,v1,v6) | *(v0,v6,v5)",
        "-+(v0,v1,v2) | -+(v0,v3,v4) | *(v4,v2,v5) | -+(v3,v1,v6) | -*(v0,v6,v5)",
    ]
    assert [c.var_count for c in out] == [7, 7]


def test_unit_law():
    assert flat_strs("e * x = x.") == ["-e(v0) | *(v0,v1,v1)"]


def test_negative_equality_of_compounds():
    assert flat_strs("a * b != b * a.") == ["-a(v0) | -b(v1) | -*(v1,v0,v2) | -*(v0,v1,v2)"]


def test_variable_equality_is_builtin():
    assert flat_strs("x = y | P(x).") == ["v0 = v1 | P(v0)"]
    assert flat_strs("x != y | P(x).") == ["v0 != v1 | P(v0)"]


def test_domain_elements_stay():
    assert flat_strs("f(0,x) = 1.") == ["f(0,v0,1)"]


def test_shared_subterms():
    # g(x) occurs twice but gets one value variable
    assert flat_strs("P(g(x), g(x)).") == ["-g(v0,v1) | P(v1,v1)"]


def test_flatten_clause_single_rejects_split():
    with pytest.raises(ValueError):
        flatten_clause(parse_clause("f(x) = g(x)"))


def test_order_literal_is_builtin():
    p = parse_input("list(usable). x < f(x). end_of_list.")
    (c,) = flatten_theory(p.theory, p.symbols)
    assert [l.builtin for l in c.literals] == [None, "<"]


def test_nested_argument_rejected_at_construction():
    with pytest.raises(AssertionError):
        FlatLiteral(True, "P", (App("a"),))


def test_dense_variable_numbers():
    p = parse_input(fixture_text("group.in"))
    for c in flatten_theory(p.theory, p.symbols):
        used = {a.index for l in c.literals for a in l.args if isinstance(a, FVar)}
        assert used == set(range(c.var_count))


def test_schema_order_and_trace():
    p = parse_input(fixture_text("even.in"))
    assert [s.trace_line() for s in function_schemas(p.symbols)] == [
        "Function s/2 well-defined and closed.",
        "Function a/1 well-defined and closed.",
    ]


@pytest.mark.parametrize("arity,n,closed,wd", [
    (1, 3, 3, 9),     # s/2 at n=3
    (0, 2, 1, 1),     # a/1 at n=2
    (2, 6, 36, 540),  # */3 at n=6
])
def test_axiom_counts(arity, n, closed, wd):
    schema = FunctionAxiomSchema("f", arity)
    cls = function_axiom_clauses(schema, n, "closed")
    assert len(cls) == closed and all(len(c) == n for c in cls)
    wds = function_axiom_clauses(schema, n, "well_defined")
    assert len(wds) == wd and all(len(c) == 2 for c in wds)
    assert len(function_axiom_clauses(schema, n)) == closed + wd


def test_nullary_axioms_n2():
    out = function_axiom_clauses(FunctionAxiomSchema("a", 0), 2)
    assert out == [
        [(True, "a", (0,)), (True, "a", (1,))],
        [(False, "a", (0,)), (False, "a", (1,))],
    ]


# --- semantic preservation ---------------------------------------------------------
# A flat clause over function relations that are graphs of total functions
# must hold exactly when the original clause holds.


def _eval(t, funcs, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Elem):
        return t.value
    return int(funcs[t.name][tuple(_eval(a, funcs, env) for a in t.args)])


def original_holds(clause, funcs, rels, n):
    names = [v.name for v in clause.variables()]
    for vals in itertools.product(range(n), repeat=len(names)):
        env = dict(zip(names, vals))
        ok = False
        for lit in clause.literals:
            args = [_eval(a, funcs, env) for a in lit.atom.args]
            val = args[0] == args[1] if lit.atom.name == "=" else bool(rels[lit.atom.name][tuple(args)])
            ok |= val == lit.sign
        if not ok:
            return False
    return True


def flat_holds(flat, funcs, rels, n):
    def rel(name, args):
        if name in funcs:
            return int(funcs[name][tuple(args[:-1])]) == args[-1]
        return bool(rels[name][tuple(args)])

    for vals in itertools.product(range(n), repeat=flat.var_count):
        def arg(a):
            return vals[a.index] if isinstance(a, FVar) else a.value
        ok = False
        for lit in flat.literals:
            xs = [arg(a) for a in lit.args]
            if lit.builtin == "=":
                val = xs[0] == xs[1]
            else:
                val = rel(lit.name, xs)
            ok |= val == lit.sign
        if not ok:
            return False
    return True


leaves = st.sampled_from([Var("x"), Var("y"), App("c"), Elem(0), Elem(1)])
terms = st.recursive(
    leaves,
    lambda sub: st.one_of(st.builds(lambda t: App("g", (t,)), sub),
                          st.builds(lambda l, r: App("f", (l, r)), sub, sub)),
    max_leaves=4,
)
literals = st.one_of(
    st.builds(lambda s, l, r: Literal(s, App("=", (l, r))), st.booleans(), terms, terms),
    st.builds(lambda s, t: Literal(s, App("P", (t,))), st.booleans(), terms),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(literals, min_size=1, max_size=3), st.integers(0, 10 ** 6))
def test_flattening_preserves_meaning(lits, seed):
    n = 2
    rng = np.random.default_rng(seed)
    clause = Clause(tuple(lits))
    flats = flatten_clause_all(clause)
    for _ in range(4):
        funcs = {"f": rng.integers(0, n, (n, n)), "g": rng.integers(0, n, (n,)),
                 "c": rng.integers(0, n, ())}
        rels = {"P": rng.integers(0, 2, (n,)).astype(bool)}
        expect = original_holds(clause, funcs, rels, n)
        assert all(flat_holds(f, funcs, rels, n) for f in flats) == expect


def test_oracle_agrees_on_group_fixture(group6):
    # the independent oracle evaluator and the flat semantics agree on a known model
    p = parse_input(fixture_text("group.in"))
    funcs = dict(group6.functions)
    for c in p.theory:
        assert original_holds(c, funcs, {}, 6)
        for f in flatten_clause_all(c, p.symbols):
            assert flat_holds(f, funcs, {}, 6)
    x = "x"
    assert oracles.holds([[(True, "=", (("*", x, ("e",)), x))]], funcs, {}, 6)
