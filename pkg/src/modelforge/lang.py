"""Reader for the Otter-style input language.

Input is a sequence of period-terminated statements::

    set(auto).
    list(usable).
      e * x = x.
      a * b != b * a.
    end_of_list.

Clause lists ``usable``, ``sos``, ``demodulators`` and ``passive`` form the
theory; ``formula_list`` entries are clausified; ``mace_constraints`` holds
assignments and properties.  Everything else is parsed and ignored.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Union

from .errors import InputError

log = logging.getLogger(__name__)

THEORY_LISTS = ("usable", "sos", "demodulators", "passive")
CONSTRAINT_LIST = "mace_constraints"
PROPERTIES = ("equality", "order", "bijection", "quasigroup")

MAX_FUNCTION_ARITY = 3
MAX_RELATION_ARITY = 4


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Elem:
    """A domain element, written as a natural number in the input."""
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class App:
    name: str
    args: tuple = ()

    def __str__(self):
        return format_term(self)


Term = Union[Var, Elem, App]


@dataclass(frozen=True)
class Literal:
    sign: bool
    atom: App

    def __str__(self):
        return format_literal(self)


@dataclass(frozen=True)
class Clause:
    literals: tuple
    source: str = "usable"

    def __str__(self):
        return format_clause(self)

    def variables(self):
        seen = {}
        for lit in self.literals:
            for v in term_variables(lit.atom):
                seen.setdefault(v, None)
        return list(seen)


# Formulas.  Atoms are App instances naming a relation.

@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Imp:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Quant:
    kind: str  # "all" or "exists"
    var: str
    body: object


class Kind(enum.Enum):
    FUNCTION = "function"
    RELATION = "relation"


@dataclass
class Symbol:
    name: str
    kind: Kind
    arity: int
    index: int
    is_equality: bool = False
    is_order: bool = False
    is_answer: bool = False
    properties: set = field(default_factory=set)

    @property
    def builtin(self):
        return self.is_equality or self.is_order

    def __str__(self):
        return f"{self.name}/{self.arity}"


class SymbolTable:
    """Symbols in order of first appearance, with kind and arity enforced."""

    def __init__(self):
        self._symbols = {}

    def __iter__(self):
        return iter(self._symbols.values())

    def __len__(self):
        return len(self._symbols)

    def __contains__(self, name):
        return name in self._symbols

    def __getitem__(self, name):
        return self._symbols[name]

    def get(self, name):
        return self._symbols.get(name)

    def declare(self, name, kind, arity, line=None, col=None):
        sym = self._symbols.get(name)
        if sym is None:
            limit = MAX_FUNCTION_ARITY if kind is Kind.FUNCTION else MAX_RELATION_ARITY
            if arity > limit:
                raise InputError(
                    f"{kind.value} symbol {name} has arity {arity}; the limit is {limit}",
                    line, col)
            sym = Symbol(name, kind, arity, len(self._symbols))
            self._symbols[name] = sym
            return sym
        if sym.arity != arity:
            raise InputError(
                f"symbol {name} used with arities {sym.arity} and {arity}", line, col)
        if sym.kind is not kind:
            raise InputError(
                f"symbol {name} used as both a function and a relation", line, col)
        return sym

    def functions(self):
        return [s for s in self if s.kind is Kind.FUNCTION]

    def relations(self):
        return [s for s in self if s.kind is Kind.RELATION]

    def constants(self):
        return [s for s in self if s.kind is Kind.FUNCTION and s.arity == 0]


@dataclass(frozen=True)
class Assign:
    cell: App
    value: Union[int, bool]


@dataclass(frozen=True)
class Property:
    symbol: str
    arity: int
    prop: str


Constraint = Union[Assign, Property]


@dataclass
class Settings:
    flags: set = field(default_factory=set)
    params: dict = field(default_factory=dict)

    @property
    def prolog_style_variables(self):
        return "prolog_style_variables" in self.flags

    @property
    def tptp_eq(self):
        return "tptp_eq" in self.flags


@dataclass
class InputProblem:
    theory: list
    constraints: list
    settings: Settings
    symbols: SymbolTable
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Classification rules


def classify_variable(name, settings=None):
    """Return ``"variable"`` or ``"constant"`` for a bare identifier in a clause."""
    if not name or name[0].isdigit():
        return "constant"
    if settings is not None and settings.prolog_style_variables:
        return "variable" if name[0].isupper() else "constant"
    return "variable" if name[0] in "uvwxyz" else "constant"


def is_variable_name(name, settings=None):
    return classify_variable(name, settings) == "variable"


_EQ_PATTERN = re.compile(r"[Ee][Qq]")


def classify_equality(name, settings=None):
    if settings is not None and settings.tptp_eq:
        return name == "equal"
    return name == "=" or _EQ_PATTERN.match(name) is not None


def is_answer_name(name):
    return name.lower().startswith("$ans")


# ---------------------------------------------------------------------------
# Printing


INFIX_OPS = {
    "<->": (800, "xfx"), "->": (800, "xfy"),
    "|": (790, "xfy"), "&": (780, "xfy"),
    "=": (700, "xfx"), "!=": (700, "xfx"), "<": (700, "xfx"), ">": (700, "xfx"),
    "<=": (700, "xfx"), ">=": (700, "xfx"),
    "+": (500, "xfy"), "-": (500, "yfx"),
    "*": (400, "xfy"), "/": (400, "yfx"),
    "^": (200, "xfy"),
}
PREFIX_OPS = {"-": (350, "fy")}
_TERM_INFIX = {"=", "!=", "<", ">", "<=", ">=", "+", "-", "*", "/", "^"}


def format_term(t, maxprec=999):
    if isinstance(t, (Var, Elem)):
        return str(t)
    if len(t.args) == 2 and t.name in _TERM_INFIX:
        prec, typ = INFIX_OPS[t.name]
        lmax = prec if typ[0] == "y" else prec - 1
        rmax = prec - 1  # parenthesize right nesting even where xfy allows it
        s = f"{format_term(t.args[0], lmax)} {t.name} {format_term(t.args[1], rmax)}"
        return f"({s})" if prec > maxprec else s
    if not t.args:
        return t.name
    return f"{t.name}({','.join(format_term(a) for a in t.args)})"


def format_literal(lit):
    atom = lit.atom
    if lit.sign:
        return format_term(atom, 1200)
    if atom.name == "=" and len(atom.args) == 2:
        return f"{format_term(atom.args[0], 699)} != {format_term(atom.args[1], 699)}"
    if len(atom.args) == 2 and atom.name in _TERM_INFIX:
        return f"-({format_term(atom, 1200)})"
    return "-" + format_term(atom)


def format_clause(clause):
    return " | ".join(format_literal(l) for l in clause.literals) + "."


# ---------------------------------------------------------------------------
# Lexer


_SYMBOLS = sorted(
    ["<->", "->", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*", "/", "|", "&", "^"],
    key=len, reverse=True)
_NAME_CHARS = re.compile(r"[A-Za-z0-9_$]+")


@dataclass
class Token:
    kind: str  # name, num, op, (, ), comma, dot, eof
    text: str
    line: int
    col: int
    applied: bool = False  # immediately followed by "("


def tokenize(text):
    tokens = []
    i, line, line_start = 0, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        col = i - line_start + 1
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif c.isspace():
            i += 1
        elif c == "%":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append(Token(c, c, line, col))
            i += 1
        elif c == ",":
            tokens.append(Token("comma", c, line, col))
            i += 1
        elif c == ".":
            tokens.append(Token("dot", c, line, col))
            i += 1
        else:
            m = _NAME_CHARS.match(text, i)
            if m:
                word = m.group()
                if word[0].isdigit():
                    if not word.isdigit():
                        raise InputError(f"bad token {word!r}", line, col)
                    kind = "num"
                else:
                    kind = "name"
                i = m.end()
            else:
                for sym in _SYMBOLS:
                    if text.startswith(sym, i):
                        word, kind = sym, "op"
                        i += len(sym)
                        break
                else:
                    raise InputError(f"unexpected character {c!r}", line, col)
            tok = Token(kind, word, line, col, applied=i < n and text[i] == "(")
            tokens.append(tok)
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Operator-precedence parser producing generic parse nodes


@dataclass
class Node:
    name: str
    args: tuple
    line: int
    col: int
    kind: str = "name"  # name, num, quant
    qvars: tuple = ()

    def is_atom(self, name=None):
        return self.kind == "name" and not self.args and (name is None or self.name == name)


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.pos = 0

    @property
    def tok(self):
        return self.toks[self.pos]

    def peek(self, k=1):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.tok
        if t.kind != kind:
            what = t.text or "end of input"
            raise InputError(f"expected {kind!r} but found {what!r}", t.line, t.col)
        return self.advance()

    def at_eof(self):
        return self.tok.kind == "eof"

    def statement(self):
        node = self.expr(1200)
        self.expect("dot")
        return node

    def expr(self, maxprec):
        left, lprec = self.primary(maxprec)
        while True:
            t = self.tok
            if t.kind != "op" or t.text not in INFIX_OPS:
                break
            prec, typ = INFIX_OPS[t.text]
            if prec > maxprec:
                break
            left_max = prec if typ[0] == "y" else prec - 1
            if lprec > left_max:
                break
            self.advance()
            right_max = prec if typ[2] == "y" else prec - 1
            right = self.expr(right_max)
            left, lprec = Node(t.text, (left, right), t.line, t.col), prec
        return left

    def primary(self, maxprec):
        t = self.tok
        if t.kind == "(":
            self.advance()
            node = self.expr(1200)
            self.expect(")")
            return node, 0
        if t.kind == "num":
            self.advance()
            return Node(t.text, (), t.line, t.col, kind="num"), 0
        if t.kind == "name":
            if t.text in ("all", "exists") and not t.applied and self.peek().kind == "name":
                return self.quantified(), 0
            self.advance()
            if t.applied:
                return Node(t.text, self.arguments(), t.line, t.col), 0
            return Node(t.text, (), t.line, t.col), 0
        if t.kind == "op":
            self.advance()
            if t.applied:
                return Node(t.text, self.arguments(), t.line, t.col), 0
            if t.text in PREFIX_OPS:
                prec, typ = PREFIX_OPS[t.text]
                if prec > maxprec:
                    prec = maxprec
                arg = self.expr(prec if typ[1] == "y" else prec - 1)
                return Node(t.text, (arg,), t.line, t.col), prec
            return Node(t.text, (), t.line, t.col), 0
        what = t.text or "end of input"
        raise InputError(f"unexpected {what!r}", t.line, t.col)

    def arguments(self):
        self.expect("(")
        args = [self.expr(999)]
        while self.tok.kind == "comma":
            self.advance()
            args.append(self.expr(999))
        self.expect(")")
        return tuple(args)

    def quantified(self):
        q = self.advance()
        names = []
        while True:
            t = self.expect("name")
            names.append(t.text)
            nxt = self.tok
            # another bare name followed by something that can start a formula
            after = self.peek()
            if (nxt.kind == "name" and not nxt.applied
                    and nxt.text not in ("all", "exists")
                    and (after.kind in ("name", "(")
                         or (after.kind == "op" and after.text in PREFIX_OPS))):
                continue
            break
        body = self.expr(PREFIX_OPS["-"][0])
        return Node(q.text, (body,), q.line, q.col, kind="quant", qvars=tuple(names))


def parse_term_text(text):
    """Parse a single period-terminated term; handy for tests and the CLI."""
    p = _Parser(tokenize(text))
    node = p.statement()
    if not p.at_eof():
        raise InputError("trailing input", p.tok.line, p.tok.col)
    return node


# ---------------------------------------------------------------------------
# Node -> clause / formula conversion


class _Converter:
    def __init__(self, settings):
        self.settings = settings

    def term(self, node, bound=None):
        if node.kind == "num":
            return Elem(int(node.name))
        if node.kind == "quant":
            raise InputError("quantifier inside a term", node.line, node.col)
        if not node.args:
            if bound is not None:
                if node.name in bound:
                    return Var(bound[node.name])
            elif is_variable_name(node.name, self.settings):
                return Var(node.name)
            return App(node.name)
        return App(node.name, tuple(self.term(a, bound) for a in node.args))

    def atom(self, node, bound=None):
        """Return (sign, App) for a literal node."""
        sign = True
        while node.kind == "name" and node.name == "-" and len(node.args) == 1:
            sign = not sign
            node = node.args[0]
        if node.kind == "num":
            raise InputError(f"domain element {node.name} used as an atom", node.line, node.col)
        if node.kind == "quant":
            raise InputError("quantifier in a clause", node.line, node.col)
        if node.name == "!=" and len(node.args) == 2:
            sign = not sign
            node = Node("=", node.args, node.line, node.col)
        if node.name in ("|", "&", "->", "<->") and len(node.args) == 2:
            raise InputError(f"connective {node.name!r} not allowed here", node.line, node.col)
        if not node.args and bound is None and is_variable_name(node.name, self.settings):
            raise InputError(f"variable {node.name} used as an atom", node.line, node.col)
        return sign, App(node.name, tuple(self.term(a, bound) for a in node.args))

    def clause(self, node, source):
        lits = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n.kind == "name" and n.name == "|" and len(n.args) == 2:
                stack.append(n.args[1])
                stack.append(n.args[0])
            else:
                sign, atom = self.atom(n)
                lits.append(Literal(sign, atom))
        return Clause(tuple(lits), source)

    def formula(self, node, bound):
        if node.kind == "quant":
            bound = dict(bound)
            inner_names = []
            for name in node.qvars:
                fresh = self.fresh(name)
                bound[name] = fresh
                inner_names.append(fresh)
            body = self.formula(node.args[0], bound)
            for q in reversed(inner_names):
                body = Quant(node.name, q, body)
            return body
        if node.kind == "name" and len(node.args) == 2:
            ops = {"&": And, "|": Or, "->": Imp, "<->": Iff}
            if node.name in ops:
                return ops[node.name](self.formula(node.args[0], bound),
                                      self.formula(node.args[1], bound))
        if node.kind == "name" and node.name == "-" and len(node.args) == 1:
            return Not(self.formula(node.args[0], bound))
        sign, atom = self.atom(node, bound)
        return atom if sign else Not(atom)

    def fresh(self, name):
        candidate = name
        k = 0
        while candidate in self.used:
            k += 1
            candidate = f"{name}{k}"
        self.used.add(candidate)
        return candidate

    def closed_formula(self, node):
        """Convert a formula-list entry.  Free variable-like names are universally closed."""
        self.used = set()
        free = []
        self._collect_names(node, set(), free)
        self.used.update(free)
        bound = {name: name for name in free}
        f = self.formula(node, bound)
        for name in reversed(free):
            f = Quant("all", name, f)
        return f

    def _collect_names(self, node, qbound, free):
        if node.kind == "quant":
            for a in node.args:
                self._collect_names(a, qbound | set(node.qvars), free)
            return
        if node.kind == "name" and not node.args:
            if (node.name not in qbound and node.name not in free
                    and is_variable_name(node.name, self.settings)):
                free.append(node.name)
            return
        for a in node.args:
            self._collect_names(a, qbound, free)


# ---------------------------------------------------------------------------
# Clausification


def _nnf(f, positive=True):
    if isinstance(f, App):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        cls = And if positive else Or
        return cls(_nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Or):
        cls = Or if positive else And
        return cls(_nnf(f.left, positive), _nnf(f.right, positive))
    if isinstance(f, Imp):
        return _nnf(Or(Not(f.left), f.right), positive)
    if isinstance(f, Iff):
        if positive:
            return And(_nnf(Or(Not(f.left), f.right)), _nnf(Or(Not(f.right), f.left)))
        return Or(_nnf(And(f.left, Not(f.right))), _nnf(And(Not(f.left), f.right)))
    if isinstance(f, Quant):
        kind = f.kind if positive else ("exists" if f.kind == "all" else "all")
        return Quant(kind, f.var, _nnf(f.body, positive))
    raise TypeError(f)


def _free_vars(f, bound=frozenset()):
    if isinstance(f, App):
        return {v.name for v in term_variables(f)} - bound
    if isinstance(f, Not):
        return _free_vars(f.arg, bound)
    if isinstance(f, Quant):
        return _free_vars(f.body, bound | {f.var})
    return _free_vars(f.left, bound) | _free_vars(f.right, bound)


def _formula_names(f):
    if isinstance(f, App):
        return {t.name for t in subterms(f) if isinstance(t, App)}
    if isinstance(f, Not):
        return _formula_names(f.arg)
    if isinstance(f, Quant):
        return _formula_names(f.body)
    return _formula_names(f.left) | _formula_names(f.right)


def substitute(t, sub):
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, App):
        return App(t.name, tuple(substitute(a, sub) for a in t.args))
    return t


class _Skolemizer:
    def __init__(self, taken):
        self.taken = taken
        self.counters = {"c": 0, "f": 0}
        self.created = []

    def new_symbol(self, arity):
        prefix = "c" if arity == 0 else "f"
        while True:
            self.counters[prefix] += 1
            name = f"${prefix}{self.counters[prefix]}"
            if name not in self.taken:
                self.taken.add(name)
                self.created.append((name, arity))
                return name

    def run(self, f, universals, sub):
        if isinstance(f, App):
            return App(f.name, tuple(substitute(a, sub) for a in f.args))
        if isinstance(f, Not):
            return Not(self.run(f.arg, universals, sub))
        if isinstance(f, (And, Or)):
            return type(f)(self.run(f.left, universals, sub), self.run(f.right, universals, sub))
        if f.kind == "all":
            return self.run(f.body, universals + [f.var], sub)
        free = set()
        for name in _free_vars(f.body) - {f.var}:
            if name in sub:
                # an enclosing existential: inherit what its witness depends on
                free |= {v.name for v in term_variables(sub[name])}
            else:
                free.add(name)
        deps = [u for u in universals if u in free]
        if len(deps) > MAX_FUNCTION_ARITY:
            raise InputError(
                f"Skolem function for {f.var} would have arity {len(deps)}; "
                f"the limit is {MAX_FUNCTION_ARITY}")
        name = self.new_symbol(len(deps))
        sub = dict(sub)
        sub[f.var] = App(name, tuple(Var(u) for u in deps))
        return self.run(f.body, universals, sub)


def _cnf(f):
    """Distribute a quantifier-free NNF formula into a list of literal lists."""
    if isinstance(f, App):
        return [[Literal(True, f)]]
    if isinstance(f, Not):
        return [[Literal(False, f.arg)]]
    if isinstance(f, And):
        return _cnf(f.left) + _cnf(f.right)
    if isinstance(f, Or):
        return [a + b for a in _cnf(f.left) for b in _cnf(f.right)]
    raise TypeError(f)


def _simplify_literals(lits):
    """Drop duplicate literals; return None for a tautology."""
    out = []
    seen = set()
    for lit in lits:
        if Literal(not lit.sign, lit.atom) in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    return out


_DEFAULT_VAR_NAMES = ("x", "y", "z", "u", "v", "w")


def canonical_variables(clause, settings=None):
    """Rename clause variables to x, y, z, u, v, w, x6, ... in first-occurrence order."""
    names = _DEFAULT_VAR_NAMES
    if settings is not None and settings.prolog_style_variables:
        names = tuple(n.upper() for n in names)
    sub = {}
    for i, v in enumerate(clause.variables()):
        new = names[i] if i < len(names) else f"{names[0]}{i}"
        sub[v.name] = Var(new)
    lits = tuple(Literal(l.sign, substitute(l.atom, sub)) for l in clause.literals)
    return Clause(lits, clause.source)


def clausify(formula, source="usable", taken=None, settings=None, skolem=None):
    """Convert a closed formula to an equisatisfiable list of clauses.

    NNF, then Skolemization (``$c1``, ``$f1``, ...), then distribution.
    ``taken`` is the set of symbol names to avoid when inventing Skolem
    symbols; pass a shared :class:`_Skolemizer` via ``skolem`` to number
    symbols across several formulas.
    """
    if skolem is None:
        skolem = _Skolemizer(set(taken or ()))
    body = skolem.run(_nnf(formula), [], {})
    clauses = []
    for lits in _cnf(body):
        lits = _simplify_literals(lits)
        if lits is None:
            continue
        clauses.append(canonical_variables(Clause(tuple(lits), source), settings))
    return clauses


def strip_answer_literals(clause):
    lits = tuple(l for l in clause.literals if not is_answer_name(l.atom.name))
    if not lits:
        raise InputError(f"clause {format_clause(clause)} has only answer literals")
    if len(lits) == len(clause.literals):
        return clause
    return Clause(lits, clause.source)


# ---------------------------------------------------------------------------
# Term helpers


def term_variables(t):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from term_variables(a)


def term_elements(t):
    if isinstance(t, Elem):
        yield t.value
    elif isinstance(t, App):
        for a in t.args:
            yield from term_elements(a)


def subterms(t):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


# ---------------------------------------------------------------------------
# Top level


_SKIPPED_LISTS = ("hot",)


class _Reader:
    def __init__(self, text):
        self.parser = _Parser(tokenize(text))
        self.settings = Settings()
        self.conv = _Converter(self.settings)
        self.theory = []
        self.formulas = []  # (formula, source, line, col)
        self.constraints = []
        self.warnings = []
        self.symbols = SymbolTable()
        self.answer_names = []

    def warn(self, msg, tok=None):
        if tok is not None:
            msg = f"line {tok.line}: {msg}"
        self.warnings.append(msg)
        log.debug(msg)

    def read(self):
        p = self.parser
        while not p.at_eof():
            start = p.tok
            node = p.statement()
            self.command(node, start)
        for formula, source, line, col in self.formulas:
            self.formula_entry(formula, source, line, col)
        self.finish()
        return InputProblem(self.theory, self.constraints, self.settings,
                            self.symbols, self.warnings)

    def command(self, node, tok):
        name, args = node.name, node.args
        if name in ("set", "clear") and len(args) == 1 and args[0].is_atom():
            flag = args[0].name
            if name == "set":
                self.settings.flags.add(flag)
            else:
                self.settings.flags.discard(flag)
            if flag not in ("prolog_style_variables", "tptp_eq"):
                self.warn(f"{name}({flag}) ignored", tok)
        elif name == "assign" and len(args) == 2:
            param = args[0].name
            self.settings.params[param] = args[1].name
            self.warn(f"assign({param}, {args[1].name}) ignored", tok)
        elif name in ("list", "formula_list") and len(args) == 1 and args[0].is_atom():
            self.read_list(args[0].name, formula=(name == "formula_list"), tok=tok)
        elif name == "weight_list" and len(args) == 1:
            self.skip_list(tok)
        elif name == "op":
            raise InputError("operator declarations are not supported", tok.line, tok.col)
        elif node.is_atom("end_of_list"):
            raise InputError("end_of_list without a matching list", tok.line, tok.col)
        else:
            self.warn(f"command {name}/{len(args)} ignored", tok)

    def skip_list(self, tok):
        p = self.parser
        while not p.at_eof():
            if p.tok.kind == "name" and p.tok.text == "end_of_list" and p.peek().kind == "dot":
                p.advance()
                p.advance()
                return
            p.advance()
        raise InputError("list is missing end_of_list", tok.line, tok.col)

    def read_list(self, list_name, formula, tok):
        known = list_name in THEORY_LISTS or list_name == CONSTRAINT_LIST
        if not known:
            if list_name not in _SKIPPED_LISTS:
                self.warn(f"list {list_name} ignored", tok)
            self.skip_list(tok)
            return
        p = self.parser
        while True:
            if p.at_eof():
                raise InputError(f"list {list_name} is missing end_of_list", tok.line, tok.col)
            start = p.tok
            node = p.statement()
            if node.is_atom("end_of_list"):
                return
            if list_name == CONSTRAINT_LIST:
                self.constraints.append(self.constraint(node, start))
            elif formula:
                self.formulas.append((self.conv.closed_formula(node), list_name,
                                      start.line, start.col))
            else:
                clause = self.conv.clause(node, list_name)
                self.add_clause(clause, start.line, start.col)

    def add_clause(self, clause, line, col):
        for lit in clause.literals:
            if is_answer_name(lit.atom.name):
                self.answer_names.append((lit.atom.name, len(lit.atom.args), line, col))
        try:
            clause = strip_answer_literals(clause)
        except InputError as e:
            raise InputError(e.message, line, col) from None
        for lit in clause.literals:
            self.register_atom(lit.atom, line, col)
        self.theory.append(clause)

    def register_atom(self, atom, line, col):
        self.symbols.declare(atom.name, Kind.RELATION, len(atom.args), line, col)
        for a in atom.args:
            self.register_term(a, line, col)

    def register_term(self, t, line, col):
        if isinstance(t, App):
            self.symbols.declare(t.name, Kind.FUNCTION, len(t.args), line, col)
            for a in t.args:
                self.register_term(a, line, col)

    def formula_entry(self, formula, source, line, col):
        if not hasattr(self, "skolem"):
            taken = {s.name for s in self.symbols}
            for f, *_ in self.formulas:
                taken |= _formula_names(f)
            self.skolem = _Skolemizer(taken)
        for clause in clausify(formula, source, settings=self.settings, skolem=self.skolem):
            self.add_clause(clause, line, col)

    def constraint(self, node, tok):
        if node.name == "assign" and len(node.args) == 2:
            cell = self.conv.term(node.args[0], bound={})
            value = node.args[1]
            if not isinstance(cell, App) or not all(isinstance(a, Elem) for a in cell.args):
                raise InputError("assign cell must be a symbol applied to domain elements",
                                 tok.line, tok.col)
            if value.kind == "num":
                self.symbols.declare(cell.name, Kind.FUNCTION, len(cell.args), tok.line, tok.col)
                return Assign(cell, int(value.name))
            if value.is_atom("T") or value.is_atom("F"):
                self.symbols.declare(cell.name, Kind.RELATION, len(cell.args), tok.line, tok.col)
                return Assign(cell, value.name == "T")
            raise InputError("assigned value must be a domain element, T, or F",
                             tok.line, tok.col)
        if node.name == "property" and len(node.args) == 2:
            pattern, prop = node.args
            if not prop.is_atom() or prop.name not in PROPERTIES:
                raise InputError(f"unknown property {prop.name!r}", tok.line, tok.col)
            if pattern.kind != "name" or not all(a.is_atom("_") for a in pattern.args):
                raise InputError("property pattern must look like f(_,_)", tok.line, tok.col)
            arity = len(pattern.args)
            need = {"equality": 2, "order": 2, "bijection": 1, "quasigroup": 2}[prop.name]
            if arity != need:
                raise InputError(f"property {prop.name} needs a symbol of arity {need}",
                                 tok.line, tok.col)
            kind = Kind.RELATION if prop.name in ("equality", "order") else Kind.FUNCTION
            self.symbols.declare(pattern.name, kind, arity, tok.line, tok.col)
            return Property(pattern.name, arity, prop.name)
        raise InputError(f"unrecognized constraint {node.name}", tok.line, tok.col)

    def finish(self):
        for name, arity, line, col in self.answer_names:
            sym = self.symbols.get(name)
            if sym is None:
                sym = self.symbols.declare(name, Kind.RELATION, arity, line, col)
            sym.is_answer = True
        for sym in self.symbols:
            if sym.kind is Kind.RELATION and sym.arity == 2:
                if classify_equality(sym.name, self.settings):
                    sym.is_equality = True
                elif sym.name == "<":
                    sym.is_order = True
        for c in self.constraints:
            if isinstance(c, Property):
                apply_property(self.symbols, c, self.warn)


def apply_property(symbols, prop, warn=None):
    sym = symbols.get(prop.symbol)
    if sym is None:
        if warn:
            warn(f"property {prop.prop} on unused symbol {prop.symbol} ignored")
        return
    want = Kind.RELATION if prop.prop in ("equality", "order") else Kind.FUNCTION
    if sym.kind is not want or sym.arity != prop.arity:
        raise InputError(
            f"property {prop.prop} does not apply to {sym.kind.value} {sym.name}/{sym.arity}")
    sym.properties.add(prop.prop)
    if prop.prop == "equality":
        sym.is_equality = True
    elif prop.prop == "order":
        sym.is_order = True


def parse_input(text):
    """Parse a whole input file into an :class:`InputProblem`."""
    return _Reader(text).read()


def parse_clause(text, settings=None):
    """Parse one clause, e.g. ``"-P(x) | Q(f(x))."``."""
    if not text.rstrip().endswith("."):
        text = text + "."
    p = _Parser(tokenize(text))
    node = p.statement()
    return _Converter(settings or Settings()).clause(node, "usable")


def parse_formula(text, settings=None):
    if not text.rstrip().endswith("."):
        text = text + "."
    p = _Parser(tokenize(text))
    node = p.statement()
    return _Converter(settings or Settings()).closed_formula(node)


def validate(problem, n):
    """Check the problem against domain size ``n``; raise InputError if unusable."""
    if n < 1:
        raise InputError(f"domain size must be positive, got {n}")
    for sym in problem.symbols:
        limit = MAX_FUNCTION_ARITY if sym.kind is Kind.FUNCTION else MAX_RELATION_ARITY
        if sym.arity > limit:
            raise InputError(f"{sym.kind.value} {sym} exceeds arity limit {limit}")
    for clause in problem.theory:
        for lit in clause.literals:
            for v in term_elements(lit.atom):
                if v >= n:
                    raise InputError(
                        f"domain element {v} in clause {format_clause(clause)} "
                        f"is out of range for domain size {n}")
    for c in problem.constraints:
        if isinstance(c, Assign):
            elems = list(term_elements(c.cell))
            if not isinstance(c.value, bool):
                elems.append(c.value)
            if any(v >= n for v in elems):
                raise InputError(
                    f"assign({format_term(c.cell)}, {c.value}) is out of range "
                    f"for domain size {n}")
    return True


def theory_symbols(problem):
    """Symbols that take part in the search: not answer symbols."""
    return [s for s in problem.symbols if not s.is_answer]

