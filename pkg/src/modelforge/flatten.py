"""Translate first-order clauses to relational ("flat") clauses.

An n-ary function f becomes an (n+1)-ary relation whose last argument is
the value, so ``even(s(a))`` turns into ``-a(v0) | -s(v0,v1) | even(v1)``.
Function relations then need axioms saying they are well defined (at most
one value) and closed (at least one value).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .lang import App, Elem, Kind


@dataclass(frozen=True)
class FVar:
    index: int

    def __str__(self):
        return f"v{self.index}"


@dataclass(frozen=True)
class FlatLiteral:
    sign: bool
    name: str
    args: tuple
    builtin: str | None = None  # "=" identity, "<" domain order

    def __post_init__(self):
        for a in self.args:
            assert isinstance(a, (FVar, Elem)), f"nested argument {a!r} in flat literal"

    def negate(self):
        return FlatLiteral(not self.sign, self.name, self.args, self.builtin)

    def __str__(self):
        if self.builtin == "=" and self.name == "=":
            op = "=" if self.sign else "!="
            return f"{self.args[0]} {op} {self.args[1]}"
        body = self.name
        if self.args:
            body += "(" + ",".join(str(a) for a in self.args) + ")"
        return body if self.sign else "-" + body


@dataclass(frozen=True)
class FlatClause:
    literals: tuple
    var_count: int

    def __str__(self):
        return " | ".join(str(l) for l in self.literals)


@dataclass(frozen=True)
class FunctionAxiomSchema:
    name: str
    arity: int  # arity of the original function; the relation has one more

    def trace_line(self):
        return f"Function {self.name}/{self.arity + 1} well-defined and closed."


class _Split:
    """Placeholder for the two top literals of a positive equality between
    compound terms.  Each output clause asserts the value of one side and
    assumes the value of the other."""

    def __init__(self):
        self.rhs_top = None
        self.lhs_top = None

    def orientations(self):
        # (rhs literal, lhs literal): lhs asserted first, then rhs asserted
        return [(self.rhs_top, self.lhs_top.negate()),
                (self.rhs_top.negate(), self.lhs_top)]


class _Flattener:
    def __init__(self, symbols):
        self.symbols = symbols
        self.var_ids = {}
        self.count = 0
        self.cache = {}
        self.defs = []
        self.body = []

    def new_var(self):
        v = FVar(self.count)
        self.count += 1
        return v

    def leaf(self, t):
        if isinstance(t, Elem):
            return t
        if t.name not in self.var_ids:
            self.var_ids[t.name] = self.new_var()
        return self.var_ids[t.name]

    def flat_args(self, args):
        # function-headed arguments right to left, then plain arguments left to right
        out = [None] * len(args)
        for i in reversed(range(len(args))):
            if isinstance(args[i], App):
                out[i] = self.value(args[i])
        for i, a in enumerate(args):
            if out[i] is None:
                out[i] = self.leaf(a)
        return tuple(out)

    def value(self, term):
        if term in self.cache:
            return self.cache[term]
        args = self.flat_args(term.args)
        v = self.new_var()
        self.defs.append(FlatLiteral(False, term.name, args + (v,)))
        self.cache[term] = v
        return v

    def literal(self, lit):
        atom = lit.atom
        sym = self.symbols.get(atom.name) if self.symbols is not None else None
        is_eq = sym.is_equality if sym is not None else atom.name == "="
        if is_eq and len(atom.args) == 2:
            self.equality(lit.sign, atom)
            return
        builtin = "<" if sym is not None and sym.is_order else None
        self.body.append(FlatLiteral(lit.sign, atom.name, self.flat_args(atom.args), builtin))

    def equality(self, sign, atom):
        lhs, rhs = atom.args
        lhs_c, rhs_c = isinstance(lhs, App), isinstance(rhs, App)
        if not lhs_c and not rhs_c:
            self.body.append(FlatLiteral(sign, atom.name, (self.leaf(lhs), self.leaf(rhs)), "="))
            return
        if lhs_c != rhs_c:
            term, other = (lhs, rhs) if lhs_c else (rhs, lhs)
            args = self.flat_args(term.args)
            self.defs.append(FlatLiteral(sign, term.name, args + (self.leaf(other),)))
            return
        split = None if not sign else _Split()
        rhs_args = self.flat_args(rhs.args)
        v = self.new_var()
        rhs_top = FlatLiteral(False, rhs.name, rhs_args + (v,))
        if split is None:
            self.defs.append(rhs_top)
        else:
            split.rhs_top = rhs_top
            self.defs.append(("rhs", split))
        lhs_args = self.flat_args(lhs.args)
        lhs_top = FlatLiteral(False, lhs.name, lhs_args + (v,))
        if split is None:
            # s != t: the two sides never share a value
            self.defs.append(lhs_top)
        else:
            split.lhs_top = lhs_top
            self.defs.append(("lhs", split))

    def clauses(self):
        splits = [d[1] for d in self.defs if isinstance(d, tuple) and d[0] == "rhs"]
        out = []
        for choice in itertools.product(*(s.orientations() for s in splits)):
            chosen = {id(s): c for s, c in zip(splits, choice)}
            lits = []
            for d in self.defs:
                if isinstance(d, tuple):
                    side, split = d
                    rhs_lit, lhs_lit = chosen[id(split)]
                    lits.append(rhs_lit if side == "rhs" else lhs_lit)
                else:
                    lits.append(d)
            lits.extend(self.body)
            out.append(FlatClause(tuple(lits), self.count))
        return out


def flatten_clause_all(clause, symbols=None):
    """Flatten a clause into one or more relational clauses.

    A positive equality between two compound terms yields two clauses, one
    for each direction of "the values agree".  Every other clause flattens
    to exactly one relational clause.
    """
    f = _Flattener(symbols)
    for lit in clause.literals:
        f.literal(lit)
    return f.clauses()


def flatten_clause(clause, symbols=None):
    """Flatten a clause that yields a single relational clause."""
    out = flatten_clause_all(clause, symbols)
    if len(out) != 1:
        raise ValueError(f"clause flattens to {len(out)} clauses; use flatten_clause_all")
    return out[0]


def flatten_theory(clauses, symbols=None):
    out = []
    for c in clauses:
        out.extend(flatten_clause_all(c, symbols))
    return out


def function_schemas(symbols):
    """Axiom schemas for every function symbol taking part in the search."""
    funcs = [s for s in symbols if s.kind is Kind.FUNCTION and not s.is_answer]
    # higher-arity relations first, appearance order among equals
    funcs.sort(key=lambda s: (-s.arity, s.index))
    return [FunctionAxiomSchema(s.name, s.arity) for s in funcs]


def function_axiom_clauses(schema, n, kind="both"):
    """Ground closure and well-definedness clauses for one function relation.

    Literals are ``(sign, name, tuple)`` triples.  ``kind`` selects
    ``"closed"``, ``"well_defined"`` or ``"both"`` (closure first).
    """
    name, a = schema.name, schema.arity
    out = []
    tuples = list(itertools.product(range(n), repeat=a))
    if kind in ("closed", "both"):
        for t in tuples:
            out.append([(True, name, t + (v,)) for v in range(n)])
    if kind in ("well_defined", "both"):
        for t in tuples:
            for u in range(n):
                for w in range(u + 1, n):
                    out.append([(False, name, t + (u,)), (False, name, t + (w,))])
    return out
