"""The ``modelforge`` command: search for finite models of a theory.

    modelforge [-n N] [-N N] [-c] [-p] [-P] [-I] [-m N] [-t N] [-k N] [-x] [-h] < input
    modelforge filter FILE [-N N]

The process exit code reports the outcome (see :class:`ExitCode`).
"""

from __future__ import annotations

import argparse
import signal
import sys
import threading
import time
from dataclasses import dataclass, field

from . import model as fo
from .errors import ExitCode, InputError, Interrupted, MemoryBudget, MemoryLimit, TimeLimit
from .flatten import flatten_theory
from .ground import build_ground_problem
from .lang import parse_input, validate
from .sat import CNF, SatLimits, Status, solve

__all__ = ["ExitCode", "SearchConfig", "SearchResult", "parse_args", "run", "search",
           "filter_identities", "main"]

EXIT_MEANINGS = {
    ExitCode.ABEND: "abnormal end",
    ExitCode.UNSATISFIABLE: "no models within the given sizes and constraints",
    ExitCode.MAX_SECONDS: "time limit reached",
    ExitCode.MAX_MEM: "memory limit reached",
    ExitCode.MAX_MODELS: "found the requested number of models",
    ExitCode.ALL_MODELS: "search completed, all models found",
    ExitCode.SIGINT: "interrupted",
    ExitCode.SEGV: "crashed",
    ExitCode.INPUT_ERROR: "input error",
}


class UsageError(Exception):
    pass


@dataclass
class SearchConfig:
    start_n: int = 2
    end_n: int = 2
    distinct_constants: bool = False
    qg_symmetry: bool = False
    print_tabular: bool = False
    print_parsable: bool = False
    print_ivy: bool = False
    max_models: int = 1
    max_seconds: float | None = None
    max_kbytes: int | None = 48000
    show_help: bool = False

    def __post_init__(self):
        if self.start_n < 1:
            raise UsageError(f"-n must be at least 1, got {self.start_n}")
        if self.end_n < self.start_n:
            raise UsageError(f"-N {self.end_n} is smaller than the start size {self.start_n}")
        if self.max_models < 1:
            raise UsageError("-m must be at least 1")
        if self.max_seconds is not None and self.max_seconds < 0:
            raise UsageError("-t must be non-negative")
        if self.max_kbytes is not None and self.max_kbytes < 0:
            raise UsageError("-k must be non-negative")

    @property
    def sizes(self):
        return list(range(self.start_n, self.end_n + 1))


OPTION_SUMMARY = """\
usage: modelforge [options] < input-file
       modelforge filter EQUATIONS-FILE [-N n]

  -n n   starting domain size (default 2)
  -N n   ending domain size (default: the -n value)
  -c     give the constants distinct elements (the first n constants)
  -p     print models in tabular form as they are found
  -P     print models as parsable facts
  -I     print models as S-expressions
  -m n   stop after n models (default 1)
  -t n   stop after about n seconds (default unlimited)
  -k n   memory limit in kilobytes (default 48000)
  -x     quasigroup isomorphism cut for binary function f
  -h     print this summary

exit codes: 11 abend, 12 unsatisfiable, 13 time limit, 14 memory limit,
15 requested models found, 16 all models found, 17 interrupt, 18 crash,
19 input error
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _search_parser():
    p = _Parser(prog="modelforge", add_help=False)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("-N", type=int, default=None)
    p.add_argument("-c", action="store_true")
    p.add_argument("-p", action="store_true")
    p.add_argument("-P", action="store_true")
    p.add_argument("-I", action="store_true")
    p.add_argument("-m", type=int, default=1)
    p.add_argument("-t", type=int, default=None)
    p.add_argument("-k", type=int, default=48000)
    p.add_argument("-x", action="store_true")
    p.add_argument("-h", action="store_true")
    return p


def parse_args(argv):
    """Turn command-line arguments into a :class:`SearchConfig`.

    ``-N`` alone searches from 2 up to it; ``-n`` alone searches one size.
    """
    a = _search_parser().parse_args(list(argv))
    start = a.n if a.n is not None else 2
    end = a.N if a.N is not None else start
    return SearchConfig(start_n=start, end_n=end, distinct_constants=a.c, qg_symmetry=a.x,
                        print_tabular=a.p, print_parsable=a.P, print_ivy=a.I,
                        max_models=a.m, max_seconds=a.t, max_kbytes=a.k, show_help=a.h)


@dataclass
class SearchResult:
    code: ExitCode
    models: list = field(default_factory=list)  # (size, FirstOrderModel)
    sizes_done: list = field(default_factory=list)
    message: str = ""


def _no_check():
    pass


def search(problem, config, on_model=None, trace=None, check=_no_check, start_time=None):
    """Iterate domain sizes and collect models.

    ``-m`` counts models over all sizes; ``-t`` and ``-k`` bound the whole
    run.  Returns a :class:`SearchResult`; input errors raise InputError.
    """
    start_time = time.monotonic() if start_time is None else start_time
    deadline = None if config.max_seconds is None else start_time + config.max_seconds
    budget = MemoryBudget(config.max_kbytes)
    result = SearchResult(ExitCode.UNSATISFIABLE)

    def guarded():
        check()
        if deadline is not None and time.monotonic() > deadline:
            raise TimeLimit()

    flat = flatten_theory(problem.theory, problem.symbols)
    if trace is not None:
        for c in flat:
            trace(f"Processing clause: {c}.")
    for n in config.sizes:
        validate(problem, n)
        if trace is not None:
            trace(f"Domain size {n}.")
        mark = budget.used
        try:
            ground = build_ground_problem(flat, problem, n, config.distinct_constants,
                                          config.qg_symmetry, budget, guarded, trace)
            cnf = CNF.from_blocks(ground.blocks, ground.variable_map.total)
            del ground.blocks[:]
        except TimeLimit:
            result.code = ExitCode.MAX_SECONDS
            return result
        except MemoryLimit as e:
            result.code = ExitCode.MAX_MEM
            result.message = str(e)
            return result
        remaining = config.max_models - len(result.models)
        vmap = ground.variable_map

        def found(assignment, n=n, vmap=vmap):
            m = fo.extract(assignment, vmap, problem.symbols)
            result.models.append((n, m))
            if on_model is not None:
                on_model(len(result.models), n, m, time.monotonic() - start_time)

        outcome = solve(cnf, SatLimits(remaining, None, config.max_kbytes), found, check,
                        budget, deadline or float("inf"))
        budget.release(budget.used - mark)
        if outcome.status is Status.TIME_LIMIT:
            result.code = ExitCode.MAX_SECONDS
            return result
        if outcome.status is Status.MEMORY_LIMIT:
            result.code = ExitCode.MAX_MEM
            return result
        result.sizes_done.append(n)
        if len(result.models) >= config.max_models:
            result.code = ExitCode.MAX_MODELS
            return result
    result.code = ExitCode.ALL_MODELS if result.models else ExitCode.UNSATISFIABLE
    return result


def run(config, text, out=None, err=None, check=_no_check):
    """Parse ``text``, search, and print models and a final status line."""
    out = out or sys.stdout
    err = err or sys.stderr
    start = time.monotonic()
    try:
        problem = parse_input(text)
    except InputError as e:
        print(f"modelforge: input error: {e}", file=err)
        return ExitCode.INPUT_ERROR
    for w in problem.warnings:
        print(f"modelforge: warning: {w}", file=err)

    def trace(line):
        print(line, file=out)

    def on_model(index, n, m, seconds):
        if config.print_tabular:
            out.write("\n" + fo.format_tabular(m, index, seconds))
        if config.print_parsable:
            out.write(fo.format_parsable(m, index))
        if config.print_ivy:
            out.write(fo.format_ivy(m))
        if not (config.print_tabular or config.print_parsable or config.print_ivy):
            print(f"Model #{index} (size {n}) at {seconds:.2f} seconds.", file=out)
        out.flush()

    try:
        result = search(problem, config, on_model, trace, check, start)
    except InputError as e:
        print(f"modelforge: input error: {e}", file=err)
        return ExitCode.INPUT_ERROR
    if result.message:
        print(f"modelforge: {result.message}", file=err)
    print(f"Exit {int(result.code)}: {EXIT_MEANINGS[result.code]} "
          f"({len(result.models)} model(s), {time.monotonic() - start:.2f} seconds).", file=out)
    out.flush()
    return result.code


# ---------------------------------------------------------------------------
# Equation filter


def filter_identities(lines, max_n=4, max_seconds=None, max_kbytes=48000, err=None):
    """Keep the equations with no model of size 2..max_n in which
    ``f(0,1) != f(1,0)``, i.e. those forcing commutativity at small sizes."""
    err = err or sys.stderr
    survivors = []
    for lineno, line in enumerate(lines, 1):
        eq = line.strip()
        if not eq:
            continue
        if not eq.endswith("."):
            eq += "."
        text = f"list(usable). {eq} f(0,1)!=f(1,0). end_of_list.\n"
        config = SearchConfig(2, max_n, max_seconds=max_seconds, max_kbytes=max_kbytes)
        try:
            result = search(parse_input(text), config)
        except InputError as e:
            print(f"filter: line {lineno}: {e}", file=err)
            continue
        if result.code == ExitCode.UNSATISFIABLE:
            survivors.append(line.rstrip("\n"))
    return survivors


def _filter_main(argv, out):
    p = _Parser(prog="modelforge filter", add_help=False)
    p.add_argument("file")
    p.add_argument("-N", type=int, default=4)
    p.add_argument("-t", type=int, default=None)
    p.add_argument("-k", type=int, default=48000)
    a = p.parse_args(argv)
    if a.N < 2:
        raise UsageError("-N must be at least 2 for the filter")
    try:
        with open(a.file) as fh:
            lines = fh.readlines()
    except OSError as e:
        print(f"modelforge filter: {e}", file=sys.stderr)
        return ExitCode.INPUT_ERROR
    for eq in filter_identities(lines, a.N, a.t, a.k):
        print(eq, file=out)
    return 0


# ---------------------------------------------------------------------------


def main(argv=None, stdin=None, stdout=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    interrupted = []

    def on_sigint(signum, frame):
        interrupted.append(signum)

    def check():
        if interrupted:
            raise Interrupted()

    old = None
    if threading.current_thread() is threading.main_thread():
        old = signal.signal(signal.SIGINT, on_sigint)
    try:
        if argv and argv[0] == "filter":
            return _filter_main(argv[1:], stdout)
        config = parse_args(argv)
        if config.show_help:
            stdout.write(OPTION_SUMMARY)
            return 0
        return run(config, stdin.read(), stdout, check=check)
    except UsageError as e:
        print(f"modelforge: {e}", file=sys.stderr)
        print(OPTION_SUMMARY, file=sys.stderr)
        return ExitCode.INPUT_ERROR
    except (Interrupted, KeyboardInterrupt):
        stdout.flush()
        print("modelforge: interrupted", file=sys.stderr)
        return ExitCode.SIGINT
    except RecursionError:
        stdout.flush()
        print("modelforge: crashed (stack overflow)", file=sys.stderr)
        return ExitCode.SEGV
    except MemoryError:
        stdout.flush()
        print("modelforge: out of memory", file=sys.stderr)
        return ExitCode.MAX_MEM
    except Exception as e:  # noqa: BLE001 - any other failure is an abnormal end
        stdout.flush()
        print(f"modelforge: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return ExitCode.ABEND
    finally:
        if old is not None:
            signal.signal(signal.SIGINT, old)
