"""Ground relational clauses over the domain {0..n-1}.

Each relation tuple gets a propositional variable (see VariableMap).  Flat
clauses are instantiated in bulk with numpy: one row per assignment of
domain elements to the clause's variables.  Clauses are kept as zero-padded
int32 blocks until the solver needs them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, MemoryBudget
from .flatten import FVar, function_axiom_clauses, function_schemas
from .lang import Assign, Elem, Kind, Property, format_term

# rows per instantiation chunk
CHUNK_ROWS = 1 << 17


class VariableMap:
    """Bijection between relation tuples and variables 1..total.

    ``encode(r, (d0..d_{a-1})) = base(r) + sum(d_i * n**(a-1-i))`` with
    blocks laid out contiguously in the order relations are given.
    """

    def __init__(self, relations, n):
        self.n = n
        self.names = []
        self.bases = {}
        self.arities = {}
        base = 1
        for name, arity in relations:
            self.names.append(name)
            self.bases[name] = base
            self.arities[name] = arity
            base += n ** arity
        self.total = base - 1
        self._starts = [self.bases[r] for r in self.names]

    @classmethod
    def for_symbols(cls, symbols, n):
        rels = []
        for s in symbols:
            if s.is_answer:
                continue
            if s.kind is Kind.FUNCTION:
                rels.append((s.name, s.arity + 1))
            elif not s.builtin:
                rels.append((s.name, s.arity))
        return cls(rels, n)

    def __contains__(self, name):
        return name in self.bases

    def encode(self, name, args):
        n = self.n
        code = 0
        for d in args:
            if not 0 <= d < n:
                raise ValueError(f"element {d} out of range for domain size {n}")
            code = code * n + d
        if len(args) != self.arities[name]:
            raise ValueError(f"{name} takes {self.arities[name]} arguments")
        return self.bases[name] + code

    def decode(self, var):
        if not 1 <= var <= self.total:
            raise ValueError(f"variable {var} out of range")
        i = _bisect_right(self._starts, var) - 1
        name = self.names[i]
        code = var - self.bases[name]
        args = []
        for _ in range(self.arities[name]):
            code, d = divmod(code, self.n)
            args.append(d)
        return name, tuple(reversed(args))

    def weights(self, name):
        a = self.arities[name]
        return [self.n ** (a - 1 - i) for i in range(a)]


def _bisect_right(xs, x):
    lo, hi = 0, len(xs)
    while lo < hi:
        mid = (lo + hi) // 2
        if x < xs[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass
class GroundProblem:
    blocks: list
    variable_map: VariableMap
    n: int
    trace: list = field(default_factory=list)

    @property
    def num_clauses(self):
        return sum(len(b) for b in self.blocks)

    @property
    def clauses(self):
        return list(iter_block_clauses(self.blocks))

    def integer_stream(self):
        """The clauses in the 0-terminated integer format, one per line."""
        return "".join(" ".join(map(str, c + [0])) + "\n" for c in iter_block_clauses(self.blocks))


def iter_block_clauses(blocks):
    for b in blocks:
        for row in b.tolist():
            yield [x for x in row if x]


def block_from_lists(clauses):
    width = max((len(c) for c in clauses), default=0)
    out = np.zeros((len(clauses), width), dtype=np.int32)
    for i, c in enumerate(clauses):
        out[i, :len(c)] = c
    return out


# ---------------------------------------------------------------------------
# Instantiation


def _arg_column(arg, grid):
    if isinstance(arg, FVar):
        return grid[:, arg.index]
    return np.full(len(grid), arg.value, dtype=grid.dtype)


def _assignment_grids(k, n):
    """Yield arrays of shape (rows, k): all assignments in lexicographic order."""
    if k == 0:
        yield np.zeros((1, 0), dtype=np.int32)
        return
    # enumerate a prefix in Python so each chunk stays below CHUNK_ROWS
    inner = k
    while inner > 0 and n ** inner > CHUNK_ROWS:
        inner -= 1
    tail = np.indices((n,) * inner, dtype=np.int32).reshape(inner, -1).T if inner else \
        np.zeros((1, 0), dtype=np.int32)
    for prefix in itertools.product(range(n), repeat=k - inner):
        head = np.broadcast_to(np.array(prefix, dtype=np.int32), (len(tail), k - inner))
        yield np.hstack([head, tail])


def _instantiate_grid(flat, vmap, grid, simplify):
    rows = len(grid)
    keep = np.ones(rows, dtype=bool)
    cols = []
    for lit in flat.literals:
        if lit.builtin is not None:
            a = _arg_column(lit.args[0], grid)
            b = _arg_column(lit.args[1], grid)
            holds = (a == b) if lit.builtin == "=" else (a < b)
            true = holds if lit.sign else ~holds
            if simplify:
                keep &= ~true
            continue
        code = np.full(rows, vmap.bases[lit.name], dtype=np.int64)
        for arg, w in zip(lit.args, vmap.weights(lit.name)):
            code += _arg_column(arg, grid).astype(np.int64) * w
        cols.append(code if lit.sign else -code)
    if not cols:
        m = np.zeros((rows, 0), dtype=np.int32)
    else:
        m = np.stack(cols, axis=1).astype(np.int32)
    if not simplify:
        return m
    width = m.shape[1]
    for i in range(width):
        for j in range(i + 1, width):
            keep &= m[:, i] != -m[:, j]
    m = m[keep]
    for j in range(1, width):
        dup = np.zeros(len(m), dtype=bool)
        for i in range(j):
            dup |= m[:, i] == m[:, j]
        m[dup, j] = 0
    if width > 1:
        order = np.argsort(m == 0, axis=1, kind="stable")
        m = np.take_along_axis(m, order, axis=1)
    return m


def instantiate_blocks(flat, vmap, n, simplify=True, budget=None, check=None):
    """Yield int32 blocks of ground clauses for one flat clause."""
    for grid in _assignment_grids(flat.var_count, n):
        if check is not None:
            check()
        block = _instantiate_grid(flat, vmap, grid, simplify)
        if budget is not None:
            budget.charge(block.nbytes + 16 * len(block))
        yield block


def instantiate(flat, vmap, n, simplify=True):
    """All ground instances of ``flat`` as lists of signed variables.

    With ``simplify`` (the default) true builtin literals delete the
    instance, false ones are dropped, duplicate literals are merged and
    tautologies removed.  Without it every one of the n**k candidates is
    returned unchanged apart from builtin literals being left out.
    """
    return list(iter_block_clauses(instantiate_blocks(flat, vmap, n, simplify)))


def count_instances(flat, vmap, n, simplify=False):
    return sum(len(b) for b in instantiate_blocks(flat, vmap, n, simplify))


# ---------------------------------------------------------------------------
# Constraints


def _lookup(symbols, name):
    sym = symbols.get(name)
    if sym is None or sym.is_answer:
        raise InputError(f"constraint mentions unknown symbol {name}")
    return sym


def encode_assign(c, vmap, symbols, n):
    """Unit clause for ``assign(cell, value)``; [] for a consistent builtin,
    [[]] (the empty clause) for an impossible one."""
    cell = c.cell
    sym = _lookup(symbols, cell.name)
    args = tuple(a.value for a in cell.args)
    if len(args) != sym.arity:
        raise InputError(f"assign cell {format_term(cell)}: {sym} takes {sym.arity} arguments")
    if any(not 0 <= d < n for d in args):
        raise InputError(f"assign cell {format_term(cell)} is out of range for size {n}")
    if sym.kind is Kind.FUNCTION:
        if isinstance(c.value, bool):
            raise InputError(f"function {sym} assigned a truth value")
        if not 0 <= c.value < n:
            raise InputError(f"assigned value {c.value} is out of range for size {n}")
        return [[vmap.encode(sym.name, args + (c.value,))]]
    if not isinstance(c.value, bool):
        raise InputError(f"relation {sym} must be assigned T or F")
    if sym.builtin:
        holds = args[0] == args[1] if sym.is_equality else args[0] < args[1]
        return [] if holds == c.value else [[]]
    v = vmap.encode(sym.name, args)
    return [[v if c.value else -v]]


def encode_property(p, vmap, symbols, n):
    sym = symbols.get(p.symbol)
    if sym is None:
        return []
    want = Kind.RELATION if p.prop in ("equality", "order") else Kind.FUNCTION
    need = 1 if p.prop == "bijection" else 2
    if sym.kind is not want or sym.arity != need:
        raise InputError(f"property {p.prop} does not apply to {sym.kind.value} {sym}")
    if p.prop in ("equality", "order"):
        # evaluated as builtins while instantiating; nothing to add
        return []
    enc = vmap.encode
    out = []
    if p.prop == "bijection":
        for v in range(n):
            for x1 in range(n):
                for x2 in range(x1 + 1, n):
                    out.append([-enc(sym.name, (x1, v)), -enc(sym.name, (x2, v))])
        return out
    for r in range(n):
        for v in range(n):
            for c1 in range(n):
                for c2 in range(c1 + 1, n):
                    out.append([-enc(sym.name, (r, c1, v)), -enc(sym.name, (r, c2, v))])
    for c in range(n):
        for v in range(n):
            for r1 in range(n):
                for r2 in range(r1 + 1, n):
                    out.append([-enc(sym.name, (r1, c, v)), -enc(sym.name, (r2, c, v))])
    return out


def encode_distinct_constants(symbols, vmap, n):
    consts = [s for s in symbols if s.kind is Kind.FUNCTION and s.arity == 0 and not s.is_answer]
    return [[vmap.encode(s.name, (k,))] for k, s in enumerate(consts[:n])]


def qg_symmetry_units(symbols, vmap, n, name="f"):
    """Isomorphism cut for quasigroup searches: ``f(x, n-1) >= x-1``.

    Every quasigroup is isomorphic to one whose last column satisfies this,
    so no isomorphism class is lost.
    """
    sym = symbols.get(name)
    if sym is None or sym.kind is not Kind.FUNCTION or sym.arity != 2:
        raise InputError("-x needs a binary function symbol f")
    last = n - 1
    return [[-vmap.encode(name, (x, last, v))] for x in range(n) for v in range(max(0, x - 1))]


# ---------------------------------------------------------------------------


def build_ground_problem(flat_theory, problem, n, distinct_constants=False,
                         qg_symmetry=False, budget=None, check=None, trace=None):
    """Ground the whole problem at domain size ``n``.

    Clause order: theory instances in input order, function axioms, the
    ``mace_constraints`` entries in input order, ``-c`` units, ``-x`` units.
    """
    symbols = problem.symbols
    vmap = VariableMap.for_symbols(symbols, n)
    budget = budget or MemoryBudget(None)
    blocks = []
    lines = []

    def emit(clauses):
        if clauses:
            b = block_from_lists(clauses)
            budget.charge(b.nbytes + 16 * len(b))
            blocks.append(b)

    for flat in flat_theory:
        for elem in _flat_elements(flat):
            if elem >= n:
                raise InputError(f"domain element {elem} is out of range for size {n}")
        blocks.extend(instantiate_blocks(flat, vmap, n, True, budget, check))
    for schema in function_schemas(symbols):
        emit([[vmap.encode(name, t) if sign else -vmap.encode(name, t)
               for sign, name, t in cl]
              for cl in function_axiom_clauses(schema, n)])
        lines.append(schema.trace_line())
        if trace is not None:
            trace(schema.trace_line())
    for c in problem.constraints:
        if isinstance(c, Assign):
            emit(encode_assign(c, vmap, symbols, n))
        elif isinstance(c, Property):
            emit(encode_property(c, vmap, symbols, n))
    if distinct_constants:
        emit(encode_distinct_constants(symbols, vmap, n))
    if qg_symmetry:
        emit(qg_symmetry_units(symbols, vmap, n))
    return GroundProblem(blocks, vmap, n, lines)


def _flat_elements(flat):
    for lit in flat.literals:
        for a in lit.args:
            if isinstance(a, Elem):
                yield a.value
