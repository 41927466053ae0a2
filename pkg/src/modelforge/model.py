"""First-order models: extraction from propositional models, checking, printing.

Three output formats are supported.

Tabular (the default)::

    ======================= Model #1 at 0.05 seconds:
    a: 2
    even:  0 1 2
       ---------
           T F T

Parsable: one Prolog-readable fact per table entry between marker comments::

    % begin model 1 (size 3)
    % function a/0
    a(2).
    % function s/1
    s(0,0).
    ...
    % relation even/1
    even(0).
    -even(1).
    % end model 1

S-expression: ``(model (size 3) (function a (2)) (function s (0 0 1))
(relation even (T F T)))``, every table flattened in row-major order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .lang import Elem, Kind, Var

BANNER = "=" * 23


@dataclass
class FirstOrderModel:
    """Function tables hold domain elements, relation tables hold booleans.
    Tables are numpy arrays of shape ``(n,) * arity``; ``order`` is the
    print order of the symbols."""

    n: int
    functions: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    def __post_init__(self):
        for name, table in list(self.functions.items()):
            self.functions[name] = np.asarray(table, dtype=np.int64).reshape(
                (self.n,) * np.ndim(table))
        for name, table in list(self.relations.items()):
            self.relations[name] = np.asarray(table, dtype=bool)
        for name in list(self.functions) + list(self.relations):
            if name not in self.order:
                self.order.append(name)
        for name, table in self.functions.items():
            if table.size and (table.min() < 0 or table.max() >= self.n):
                raise ValueError(f"function {name} has a value outside the domain")

    def value(self, name, args=()):
        if name in self.functions:
            return int(self.functions[name][tuple(args)])
        return bool(self.relations[name][tuple(args)])

    def arity(self, name):
        table = self.functions[name] if name in self.functions else self.relations[name]
        return table.ndim

    def __eq__(self, other):
        if not isinstance(other, FirstOrderModel) or self.n != other.n:
            return False
        if set(self.functions) != set(other.functions) or set(self.relations) != set(other.relations):
            return False
        return (all(np.array_equal(t, other.functions[k]) for k, t in self.functions.items())
                and all(np.array_equal(t, other.relations[k]) for k, t in self.relations.items()))


class ExtractionError(RuntimeError):
    pass


def extract(assignment, vmap, symbols):
    """Read a first-order model off a propositional model.

    ``assignment`` is indexed by variable (index 0 unused).
    """
    n = vmap.n
    model = FirstOrderModel(n)
    for sym in symbols:
        if sym.is_answer or sym.name not in vmap:
            continue
        base = vmap.bases[sym.name]
        a = vmap.arities[sym.name]
        block = np.asarray(assignment[base:base + n ** a], dtype=bool).reshape((n,) * a)
        if sym.kind is Kind.FUNCTION:
            counts = block.sum(axis=-1)
            if (counts != 1).any():
                bad = tuple(int(x) for x in np.argwhere(counts != 1)[0])
                raise ExtractionError(f"{sym.name}{bad} does not have exactly one value")
            model.functions[sym.name] = block.argmax(axis=-1)
        else:
            model.relations[sym.name] = block
        model.order.append(sym.name)
    return model


# ---------------------------------------------------------------------------
# Evaluation


def _eval_term(t, model, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Elem):
        return t.value
    return int(model.functions[t.name][tuple(_eval_term(a, model, env) for a in t.args)])


def _eval_atom(atom, model, env, symbols):
    sym = symbols.get(atom.name) if symbols is not None else None
    args = [_eval_term(a, model, env) for a in atom.args]
    if sym is not None and sym.is_equality or sym is None and atom.name == "=":
        return args[0] == args[1]
    if sym is not None and sym.is_order:
        return args[0] < args[1]
    return bool(model.relations[atom.name][tuple(args)])


def clause_holds(clause, model, symbols=None):
    names = [v.name for v in clause.variables()]
    for values in itertools.product(range(model.n), repeat=len(names)):
        env = dict(zip(names, values))
        if not any(_eval_atom(l.atom, model, env, symbols) == l.sign for l in clause.literals):
            return False
    return True


def verify(model, theory, symbols=None):
    """True when every clause holds for every assignment of its variables.

    Equality (``=`` or any symbol the table marks as equality) is identity
    and order symbols are ``<`` on the domain.
    """
    return all(clause_holds(c, model, symbols) for c in theory)


# ---------------------------------------------------------------------------
# Tabular output


def _cell(v, width):
    if isinstance(v, (bool, np.bool_)):
        v = "T" if v else "F"
    return str(v).rjust(width)


def _row(values, width):
    return " ".join(_cell(v, width) for v in values)


def _unary_table(name, values, n, width):
    lead = max(7, len(name) + 2)
    header = f"{name}:".ljust(lead) + _row(range(n), width)
    rule = " " * (lead - 4) + "-" * (n * (width + 1) + 3)
    return [header, rule, " " * lead + _row(values, width)]


def _binary_table(name, table, n, width):
    lead = max(width + 4, len(name) + 2)
    pad = " " * (lead - width - 1)
    lines = [f"{name}:".ljust(lead) + "| " + _row(range(n), width),
             pad + "-" * (width + 1) + "+" + "-" * (n * (width + 1))]
    for i in range(n):
        lines.append(pad + _cell(i, width) + " | " + _row(table[i], width))
    # the separator keeps the row indentation
    lines.append(pad)
    return lines


def _symbol_lines(name, table, n, width):
    if table.ndim == 0:
        return [f"{name}: {_cell(table[()], width).strip()}"]
    if table.ndim == 1:
        return _unary_table(name, table, n, width)
    if table.ndim == 2:
        return _binary_table(name, table, n, width)
    # higher arity: one binary slice per leading argument tuple
    lines = []
    k = table.ndim - 2
    for lead in itertools.product(range(n), repeat=k):
        label = f"{name}(" + ",".join(map(str, lead)) + ",_,_)"
        lines.extend(_binary_table(label, table[lead], n, width))
    return lines


def print_order(model):
    """Constants first, then everything else, each in appearance order."""
    consts = [s for s in model.order if s in model.functions and model.functions[s].ndim == 0]
    return consts + [s for s in model.order if s not in consts]


def format_tabular(model, index=1, seconds=0.0):
    width = len(str(model.n - 1))
    lines = [f"{BANNER} Model #{index} at {seconds:.2f} seconds:"]
    for name in print_order(model):
        table = model.functions.get(name)
        if table is None:
            table = model.relations[name]
        lines.extend(_symbol_lines(name, table, model.n, width))
    return "\n".join(lines) + "\n"


print_tabular = format_tabular


# ---------------------------------------------------------------------------
# Parsable output


def _kind_order(model):
    names = print_order(model)
    return ([s for s in names if s in model.functions]
            + [s for s in names if s in model.relations])


def format_parsable(model, index=1):
    lines = [f"% begin model {index} (size {model.n})"]
    for name in _kind_order(model):
        if name in model.functions:
            table = model.functions[name]
            lines.append(f"% function {name}/{table.ndim}")
            for args in itertools.product(range(model.n), repeat=table.ndim):
                lines.append(_fact(name, args + (int(table[args]),)))
        else:
            table = model.relations[name]
            lines.append(f"% relation {name}/{table.ndim}")
            for args in itertools.product(range(model.n), repeat=table.ndim):
                fact = _fact(name, args)
                lines.append(fact if table[args] else "-" + fact)
    lines.append(f"% end model {index}")
    return "\n".join(lines) + "\n"


print_parsable = format_parsable


def _fact(name, args):
    if not args:
        return f"{name}."
    return f"{name}(" + ",".join(map(str, args)) + ")."


_BEGIN = re.compile(r"^% begin model (\d+) \(size (\d+)\)$")
_DECL = re.compile(r"^% (function|relation) (.+)/(\d+)$")
_FACT = re.compile(r"^(.*?)(?:\(([\d,]*)\))?\.$")


def parse_parsable(text):
    """Read back models written by :func:`format_parsable`."""
    models = []
    model = None
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _BEGIN.match(line)
        if m:
            model = FirstOrderModel(int(m.group(2)))
            continue
        if line.startswith("% end model"):
            model.__post_init__()
            models.append(model)
            model = None
            continue
        m = _DECL.match(line)
        if m:
            kind, name, arity = m.group(1), m.group(2), int(m.group(3))
            shape = (model.n,) * arity
            if kind == "function":
                model.functions[name] = np.zeros(shape, dtype=np.int64)
            else:
                model.relations[name] = np.zeros(shape, dtype=bool)
            model.order.append(name)
            current = (kind, name)
            continue
        if model is None or current is None:
            raise ValueError(f"unexpected line {raw!r}")
        kind, name = current
        m = _FACT.match(line)
        if m is None:
            raise ValueError(f"bad fact {raw!r}")
        args = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
        head = m.group(1)
        if kind == "function":
            model.functions[name][args[:-1]] = args[-1]
        else:
            positive = head == name
            if not positive and head != "-" + name:
                raise ValueError(f"fact {raw!r} is not about {name}")
            model.relations[name][args] = positive
    return models


# ---------------------------------------------------------------------------
# S-expression output


def format_ivy(model):
    parts = [f"(size {model.n})"]
    for name in _kind_order(model):
        if name in model.functions:
            vals = " ".join(str(int(v)) for v in model.functions[name].reshape(-1))
            parts.append(f"(function {name} ({vals}))")
        else:
            vals = " ".join("T" if v else "F" for v in model.relations[name].reshape(-1))
            parts.append(f"(relation {name} ({vals}))")
    return "(model " + " ".join(parts) + ")\n"


print_ivy = format_ivy
