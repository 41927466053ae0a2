"""Compiled DPLL kernels.

State lives in numpy arrays owned by :class:`modelforge.sat.Solver`; the
kernels here are resumable so the Python side can enforce time limits,
react to signals, and hand models to callbacks between calls.

Bookkeeping is counter based: for every clause we track how many literals
are not yet false (``active``), how many negative literals are not yet false
(``negact``, zero means the clause is currently all-positive) and, with unit
subsumption on, how many literals are true (``satcnt``).
"""

import numpy as np
from numba import njit

# istate slots
TRAIL_LEN = 0
QHEAD = 1
NLEVELS = 2
CAND_LEN = 3
NEED_BACKTRACK = 4
LAST_CHOICE = 5
SPLITS = 6
INITIALIZED = 7
ISTATE_SIZE = 8

MODEL = 0
EXHAUSTED = 1
PAUSED = 2


@njit(cache=True)
def lit_index(lit):
    if lit > 0:
        return 2 * lit
    return -2 * lit + 1


@njit(cache=True)
def _assign(lit, value, trail, istate):
    v = lit if lit > 0 else -lit
    value[v] = 1 if lit > 0 else -1
    trail[istate[TRAIL_LEN]] = lit
    istate[TRAIL_LEN] += 1


@njit(cache=True)
def _lit_value(lit, value):
    if lit > 0:
        return value[lit]
    return -value[-lit]


@njit(cache=True)
def _satisfied(c, lits, cstart, value, satcnt, subsume):
    if subsume:
        return satcnt[c] > 0
    for k in range(cstart[c], cstart[c + 1]):
        if _lit_value(lits[k], value) > 0:
            return True
    return False


@njit(cache=True)
def _propagate(lits, cstart, occ, ostart, value, active, negact, satcnt, pos0,
               cand, trail, istate, subsume):
    """Unit propagation to fixpoint.  Returns True on conflict."""
    conflict = False
    while istate[QHEAD] < istate[TRAIL_LEN]:
        lit = trail[istate[QHEAD]]
        istate[QHEAD] += 1
        if subsume:
            li = lit_index(lit)
            for k in range(ostart[li], ostart[li + 1]):
                satcnt[occ[k]] += 1
        li = lit_index(-lit)
        for k in range(ostart[li], ostart[li + 1]):
            c = occ[k]
            active[c] -= 1
            if lit > 0:
                negact[c] -= 1
                if negact[c] == 0 and not pos0[c]:
                    cand[istate[CAND_LEN]] = c
                    istate[CAND_LEN] += 1
            if conflict or active[c] > 1:
                continue
            if subsume and satcnt[c] > 0:
                continue
            if active[c] == 0:
                conflict = True
                continue
            # one literal left that is not false: true already, or a new unit
            for j in range(cstart[c], cstart[c + 1]):
                other = lits[j]
                val = _lit_value(other, value)
                if val > 0:
                    break
                if val == 0:
                    _assign(other, value, trail, istate)
                    break
        if conflict:
            return True
    return False


@njit(cache=True)
def _undo_to(pos, lits, occ, ostart, value, active, negact, satcnt, trail, istate, subsume):
    i = istate[TRAIL_LEN] - 1
    while i >= pos:
        lit = trail[i]
        if i < istate[QHEAD]:
            li = lit_index(-lit)
            for k in range(ostart[li], ostart[li + 1]):
                c = occ[k]
                active[c] += 1
                if lit > 0:
                    negact[c] += 1
            if subsume:
                li = lit_index(lit)
                for k in range(ostart[li], ostart[li + 1]):
                    satcnt[occ[k]] -= 1
        value[lit if lit > 0 else -lit] = 0
        i -= 1
    istate[TRAIL_LEN] = pos
    if istate[QHEAD] > pos:
        istate[QHEAD] = pos


@njit(cache=True)
def _backtrack(lits, occ, ostart, value, active, negact, satcnt, trail, istate,
               dec_pos, dec_flipped, dec_cand, subsume):
    """Flip the deepest unflipped decision.  False when none is left."""
    while istate[NLEVELS] > 0:
        d = istate[NLEVELS] - 1
        pos = dec_pos[d]
        lit = trail[pos]
        _undo_to(pos, lits, occ, ostart, value, active, negact, satcnt, trail, istate, subsume)
        istate[CAND_LEN] = dec_cand[d]
        if not dec_flipped[d]:
            dec_flipped[d] = True
            _assign(-lit, value, trail, istate)
            return True
        istate[NLEVELS] -= 1
    return False


@njit(cache=True)
def _choose(lits, cstart, value, active, satcnt, pos0_list, cand, istate, occurs, subsume):
    """Next split literal, or 0 when every clause is satisfied and every
    occurring variable has a value.

    First choice: the first shortest clause whose remaining literals are all
    positive, split on its first open variable, true first.
    """
    best = -1
    best_len = 1 << 30
    for i in range(pos0_list.shape[0]):
        c = pos0_list[i]
        if active[c] < best_len or (active[c] == best_len and c < best):
            if not _satisfied(c, lits, cstart, value, satcnt, subsume):
                best = c
                best_len = active[c]
    for i in range(istate[CAND_LEN]):
        c = cand[i]
        if active[c] < best_len or (active[c] == best_len and c < best):
            if not _satisfied(c, lits, cstart, value, satcnt, subsume):
                best = c
                best_len = active[c]
    if best < 0:
        # no positive clause left: first shortest unsatisfied clause
        m = cstart.shape[0] - 1
        for c in range(m):
            if active[c] < best_len and not _satisfied(c, lits, cstart, value, satcnt, subsume):
                best = c
                best_len = active[c]
                if best_len <= 2:
                    break
    if best >= 0:
        for k in range(cstart[best], cstart[best + 1]):
            if _lit_value(lits[k], value) == 0:
                return lits[k]
    # all clauses satisfied: enumerate remaining occurring variables
    for v in range(1, value.shape[0]):
        if value[v] == 0 and occurs[v]:
            return v
    return 0


@njit(cache=True)
def initialize(lits, cstart, value, trail, istate):
    """Enqueue input unit clauses.  Returns True if they already conflict."""
    m = cstart.shape[0] - 1
    for c in range(m):
        if cstart[c + 1] - cstart[c] == 0:
            return True
        if cstart[c + 1] - cstart[c] == 1:
            lit = lits[cstart[c]]
            val = _lit_value(lit, value)
            if val < 0:
                return True
            if val == 0:
                _assign(lit, value, trail, istate)
    istate[INITIALIZED] = 1
    return False


@njit(cache=True)
def run(lits, cstart, occ, ostart, value, active, negact, satcnt, pos0, pos0_list,
        cand, trail, istate, dec_pos, dec_flipped, dec_cand, occurs, subsume, max_splits):
    """Search until a model is found (MODEL), the space is exhausted
    (EXHAUSTED) or ``max_splits`` decisions have been made (PAUSED)."""
    if istate[NEED_BACKTRACK]:
        istate[NEED_BACKTRACK] = 0
        if not _backtrack(lits, occ, ostart, value, active, negact, satcnt, trail, istate,
                          dec_pos, dec_flipped, dec_cand, subsume):
            return EXHAUSTED
    splits = 0
    while True:
        if _propagate(lits, cstart, occ, ostart, value, active, negact, satcnt, pos0,
                      cand, trail, istate, subsume):
            if not _backtrack(lits, occ, ostart, value, active, negact, satcnt, trail, istate,
                              dec_pos, dec_flipped, dec_cand, subsume):
                return EXHAUSTED
            continue
        lit = _choose(lits, cstart, value, active, satcnt, pos0_list, cand, istate, occurs,
                      subsume)
        istate[LAST_CHOICE] = lit
        if lit == 0:
            istate[NEED_BACKTRACK] = 1
            return MODEL
        if splits >= max_splits:
            return PAUSED
        splits += 1
        istate[SPLITS] += 1
        d = istate[NLEVELS]
        dec_pos[d] = istate[TRAIL_LEN]
        dec_flipped[d] = False
        dec_cand[d] = istate[CAND_LEN]
        istate[NLEVELS] = d + 1
        _assign(lit, value, trail, istate)


def build_occurrences(lits, cstart, nvars):
    """CSR occurrence lists indexed by ``lit_index``."""
    m = len(cstart) - 1
    lengths = np.diff(cstart)
    clause_of = np.repeat(np.arange(m, dtype=np.int32), lengths)
    idx = np.where(lits > 0, 2 * lits, -2 * lits + 1).astype(np.int64)
    order = np.argsort(idx, kind="stable")
    occ = clause_of[order].astype(np.int32)
    counts = np.bincount(idx, minlength=2 * (nvars + 1))
    ostart = np.zeros(2 * (nvars + 1) + 1, dtype=np.int64)
    np.cumsum(counts, out=ostart[1:])
    return occ, ostart
