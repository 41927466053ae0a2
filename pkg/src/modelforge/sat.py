"""DPLL satisfiability with model enumeration, and the ``anldp`` command.

Input for ``anldp`` is a stream of integers: positive and negative numbers
are literals over variables 1, 2, 3, ... and 0 ends a clause.
"""

from __future__ import annotations

import argparse
import enum
import signal
import sys
import threading
import time
from dataclasses import dataclass

import numpy as np

from . import _engine as eng
from .errors import ExitCode, InputError, Interrupted, MemoryBudget, MemoryLimit

# decisions per compiled call; limits and signals are checked in between
SPLITS_PER_CALL = 4096


class CNF:
    """Clauses stored as one literal array plus clause start offsets."""

    def __init__(self, lits, starts, num_vars):
        self.lits = np.ascontiguousarray(lits, dtype=np.int32)
        self.starts = np.ascontiguousarray(starts, dtype=np.int64)
        self.num_vars = int(num_vars)
        if len(self.lits):
            if (self.lits == 0).any():
                raise ValueError("0 is not a literal")
            if np.abs(self.lits).max() > self.num_vars:
                raise ValueError("literal exceeds the variable count")

    @classmethod
    def from_clauses(cls, clauses, num_vars=None):
        flat = []
        starts = [0]
        for c in clauses:
            seen = []
            for lit in c:
                if lit not in seen:
                    seen.append(int(lit))
            flat.extend(seen)
            starts.append(len(flat))
        if num_vars is None:
            num_vars = max((abs(x) for x in flat), default=0)
        return cls(np.array(flat, dtype=np.int32), np.array(starts), num_vars)

    @classmethod
    def from_blocks(cls, blocks, num_vars):
        """From zero-padded clause blocks as produced by grounding."""
        parts, lengths = [], []
        for b in blocks:
            if b.size:
                nz = b != 0
                parts.append(b[nz])
                lengths.append(nz.sum(axis=1))
            else:
                lengths.append(np.zeros(len(b), dtype=np.int64))
        lits = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int32)
        lengths = np.concatenate(lengths) if lengths else np.zeros(0, dtype=np.int64)
        starts = np.zeros(len(lengths) + 1, dtype=np.int64)
        np.cumsum(lengths, out=starts[1:])
        return cls(lits, starts, num_vars)

    @property
    def num_clauses(self):
        return len(self.starts) - 1

    @property
    def clauses(self):
        return [self.lits[self.starts[i]:self.starts[i + 1]].tolist()
                for i in range(self.num_clauses)]

    def occurring(self):
        occ = np.zeros(self.num_vars + 1, dtype=np.bool_)
        occ[np.abs(self.lits)] = True
        return occ


def parse_integer_stream(text):
    """Parse whitespace-separated integers into a CNF."""
    clauses = []
    current = []
    for i, tok in enumerate(text.split()):
        try:
            x = int(tok)
        except ValueError:
            raise InputError(f"token {i + 1}: expected an integer, got {tok!r}") from None
        if x == 0:
            clauses.append(current)
            current = []
        else:
            current.append(x)
    if current:
        raise InputError("last clause is not terminated by 0")
    return CNF.from_clauses(clauses)


@dataclass
class SatLimits:
    max_models: int | None = 1  # None: enumerate everything
    max_seconds: float | None = None
    max_kbytes: int | None = 48000
    unit_subsumption: bool = False

    def __post_init__(self):
        if self.max_models is not None and self.max_models < 1:
            raise ValueError("max_models must be at least 1")
        for v in (self.max_seconds, self.max_kbytes):
            if v is not None and v < 0:
                raise ValueError("limits must be non-negative")


class Status(enum.Enum):
    UNSATISFIABLE = "unsatisfiable"
    MODELS_FOUND = "models found"
    TIME_LIMIT = "time limit"
    MEMORY_LIMIT = "memory limit"


@dataclass
class SatOutcome:
    status: Status
    count: int = 0
    exhausted: bool = False
    splits: int = 0


def _subsume_input_units(cnf):
    """Drop clauses containing an input unit literal (other than the unit
    clauses themselves)."""
    lengths = np.diff(cnf.starts)
    units = cnf.lits[cnf.starts[:-1][lengths == 1]]
    if not len(units) or not len(cnf.lits):
        return cnf
    hit = np.isin(cnf.lits, units).astype(np.int64)
    clause_of = np.repeat(np.arange(cnf.num_clauses), lengths)
    hits = np.bincount(clause_of, weights=hit, minlength=cnf.num_clauses)
    keep = (hits == 0) | (lengths == 1)
    if keep.all():
        return cnf
    lit_keep = np.repeat(keep, lengths)
    new_lengths = lengths[keep]
    starts = np.zeros(len(new_lengths) + 1, dtype=np.int64)
    np.cumsum(new_lengths, out=starts[1:])
    return CNF(cnf.lits[lit_keep], starts, cnf.num_vars)


class Solver:
    """Resumable search state over one CNF."""

    def __init__(self, cnf, unit_subsumption=False, budget=None):
        self.cnf = cnf
        self.occurs = cnf.occurring()
        work = _subsume_input_units(cnf)
        self.work = work
        self.subsume = bool(unit_subsumption)
        nv, m = cnf.num_vars, work.num_clauses
        lits, starts = work.lits, work.starts
        lengths = np.diff(starts).astype(np.int32)
        neg = (lits < 0).astype(np.int32)
        clause_of = np.repeat(np.arange(m), lengths)
        negcount = np.bincount(clause_of, weights=neg, minlength=m).astype(np.int32)
        if budget is not None:
            budget.charge(lits.nbytes * 2 + m * 40 + (nv + 1) * 40)
        self.occ, self.ostart = eng.build_occurrences(lits, starts, nv)
        self.value = np.zeros(nv + 1, dtype=np.int8)
        self.active = lengths.copy()
        self.negact = negcount
        self.satcnt = np.zeros(m, dtype=np.int32)
        self.pos0 = (negcount == 0) & (lengths > 0)
        self.pos0_list = np.flatnonzero(self.pos0).astype(np.int32)
        self.cand = np.zeros(max(m, 1), dtype=np.int32)
        self.trail = np.zeros(nv + 1, dtype=np.int32)
        self.istate = np.zeros(eng.ISTATE_SIZE, dtype=np.int64)
        self.dec_pos = np.zeros(nv + 1, dtype=np.int64)
        self.dec_flipped = np.zeros(nv + 1, dtype=np.bool_)
        self.dec_cand = np.zeros(nv + 1, dtype=np.int64)
        self.refuted = eng.initialize(lits, starts, self.value, self.trail, self.istate)

    @property
    def splits(self):
        return int(self.istate[eng.SPLITS])

    def step(self, max_splits=SPLITS_PER_CALL):
        """Advance the search: returns eng.MODEL, eng.EXHAUSTED or eng.PAUSED."""
        if self.refuted:
            return eng.EXHAUSTED
        return eng.run(self.work.lits, self.work.starts, self.occ, self.ostart, self.value,
                       self.active, self.negact, self.satcnt, self.pos0, self.pos0_list,
                       self.cand, self.trail, self.istate, self.dec_pos, self.dec_flipped,
                       self.dec_cand, self.occurs, self.subsume, max_splits)

    def next_split(self):
        """The literal the search would split on next (0 if none)."""
        status = self.step(0)
        if status != eng.PAUSED:
            return 0
        return int(self.istate[eng.LAST_CHOICE])

    def finished(self):
        """True after a model when no unflipped decision is left, so
        backtracking from here would exhaust the search."""
        levels = int(self.istate[eng.NLEVELS])
        return bool(self.dec_flipped[:levels].all())

    def assignment(self):
        """Current model as a bool array indexed by variable (index 0 unused);
        variables that occur in no clause are false."""
        return self.value > 0


def solve(cnf, limits=None, on_model=None, check=None, budget=None, deadline=None):
    """Run DPLL on ``cnf`` and enumerate models up to ``limits.max_models``.

    ``on_model(assignment)`` receives a bool array indexed by variable.
    ``check()`` is called between batches of splits and may raise (for
    example on an interrupt).  ``deadline`` is an absolute
    ``time.monotonic()`` value; it overrides ``limits.max_seconds``.
    """
    limits = limits or SatLimits()
    if budget is None:
        budget = MemoryBudget(limits.max_kbytes)
    if deadline is None and limits.max_seconds is not None:
        deadline = time.monotonic() + limits.max_seconds
    try:
        solver = Solver(cnf, limits.unit_subsumption, budget)
    except MemoryLimit:
        return SatOutcome(Status.MEMORY_LIMIT)
    count = 0
    while True:
        if check is not None:
            check()
        if deadline is not None and time.monotonic() > deadline:
            return SatOutcome(Status.TIME_LIMIT, count, False, solver.splits)
        status = solver.step()
        if status == eng.PAUSED:
            continue
        if status == eng.EXHAUSTED:
            if count == 0:
                return SatOutcome(Status.UNSATISFIABLE, 0, True, solver.splits)
            return SatOutcome(Status.MODELS_FOUND, count, True, solver.splits)
        count += 1
        if on_model is not None:
            on_model(solver.assignment())
        if limits.max_models is not None and count >= limits.max_models:
            return SatOutcome(Status.MODELS_FOUND, count, solver.finished(), solver.splits)


def exit_code_for(outcome, max_models):
    if outcome.status is Status.TIME_LIMIT:
        return ExitCode.MAX_SECONDS
    if outcome.status is Status.MEMORY_LIMIT:
        return ExitCode.MAX_MEM
    if outcome.status is Status.UNSATISFIABLE:
        return ExitCode.UNSATISFIABLE
    if max_models is not None and outcome.count >= max_models:
        return ExitCode.MAX_MODELS
    return ExitCode.ALL_MODELS


# ---------------------------------------------------------------------------
# anldp command


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: {message}", file=sys.stderr)
        raise SystemExit(ExitCode.INPUT_ERROR)


def _anldp_parser():
    p = _ArgParser(prog="anldp", description="DPLL on a 0-terminated integer clause stream (stdin).")
    p.add_argument("-p", action="store_true", help="print models as they are found")
    p.add_argument("-m", type=int, default=1, metavar="N", help="stop after N models (default 1)")
    p.add_argument("-t", type=int, default=None, metavar="N", help="stop after about N seconds")
    p.add_argument("-k", type=int, default=48000, metavar="N",
                   help="memory limit in kilobytes (default 48000)")
    p.add_argument("-s", action="store_true", help="unit subsumption during search")
    return p


def format_model_line(assignment):
    return " ".join(str(v) if assignment[v] else str(-v) for v in range(1, len(assignment)))


def main(argv=None, stdin=None, stdout=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    args = _anldp_parser().parse_args(argv)
    if args.m < 1 or (args.t is not None and args.t < 0) or args.k < 0:
        print("anldp: -m must be positive and limits non-negative", file=sys.stderr)
        return ExitCode.INPUT_ERROR
    try:
        cnf = parse_integer_stream(stdin.read())
    except InputError as e:
        print(f"anldp: {e}", file=sys.stderr)
        return ExitCode.INPUT_ERROR

    interrupted = []

    def on_sigint(signum, frame):
        interrupted.append(signum)

    def check():
        if interrupted:
            raise Interrupted()

    old = signal.signal(signal.SIGINT, on_sigint) if _main_thread() else None
    limits = SatLimits(args.m, args.t, args.k, args.s)

    def on_model(assignment):
        if args.p:
            print(format_model_line(assignment), file=stdout, flush=True)

    try:
        outcome = solve(cnf, limits, on_model, check)
    except Interrupted:
        return ExitCode.SIGINT
    finally:
        if old is not None:
            signal.signal(signal.SIGINT, old)
    code = exit_code_for(outcome, args.m)
    print(f"anldp: {outcome.status.value}, {outcome.count} model(s), {outcome.splits} splits",
          file=sys.stderr)
    return code


def _main_thread():
    return threading.current_thread() is threading.main_thread()
