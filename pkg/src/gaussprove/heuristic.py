"""Heuristic Gaussian-elimination search for a conic combination.

Given a preprocessed slack-space problem, repeatedly pick a term of the
objective with a negative coefficient (or on a sign-free variable), solve
that variable from an equality row, and substitute.  If the objective ends
up conic the search succeeds; otherwise the leftover system is returned in
basis form for the reducer and the exact LP fallback.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from .algebra import LinearForm, lex_key
from .elimination import Echelon, WorkSystem, preprocess_system
from .kernels import axpy


log = logging.getLogger(__name__)

VARIABLE_RULES = ("lowest", "highest", "most_negative", "permuted", "random")
ROW_RULES = ("fewest", "first", "sparse_random", "random")


@dataclass(frozen=True)
class Strategy:
    """Selection rules for the elimination loop.

    ``seed=None`` is the deterministic default: lowest-index bad variable,
    then the row with fewest variables (ties broken lexicographically).
    """

    seed: int | None = None
    variable_rule: str = "lowest"
    row_rule: str = "fewest"

    def __post_init__(self):
        if self.variable_rule not in VARIABLE_RULES:
            raise ValueError(f"unknown variable rule {self.variable_rule!r}")
        if self.row_rule not in ROW_RULES:
            raise ValueError(f"unknown row rule {self.row_rule!r}")
        if (self.variable_rule in ("random", "permuted") or "random" in self.row_rule) and self.seed is None:
            raise ValueError("random rules need a seed")

    @classmethod
    def deterministic(cls):
        return cls()

    @classmethod
    def seeded(cls, seed):
        """Random bad variable, random row among the sparsest ones holding it."""
        return cls(seed, "random", "sparse_random")


DETERMINISTIC = Strategy()


@dataclass
class SearchResult:
    """Outcome of one heuristic run.

    ``certificate`` maps slack keys to nonnegative multipliers (SUCCESSFUL
    only).  ``system`` is the leftover system in basis form (UNSUCCESSFUL
    only), ``reduced`` the minimal system when the reducer was applied.
    """

    status: str
    objective: LinearForm
    iterations: int
    certificate: dict | None = None
    system: WorkSystem | None = None
    reduced: WorkSystem | None = None
    trace: object = None

    @property
    def successful(self):
        return self.status == "SUCCESSFUL"

    @property
    def problem(self):
        ws = self.reduced if self.reduced is not None else self.system
        return ws.to_problem() if ws is not None else None


def _as_system(P):
    if isinstance(P, WorkSystem):
        return P.copy()
    return WorkSystem.from_problem(P)


def _bad_terms(ws):
    S = ws.S
    return [k for k, c in ws.obj.items() if c < 0 or k not in S]


def _pick_variable(cands, ws, strategy, rng, prio):
    rule = strategy.variable_rule
    if rule == "lowest":
        return min(cands)
    if rule == "permuted":
        # a random but fixed priority per variable, drawn on first sight
        for k in sorted(cands):
            if k not in prio:
                prio[k] = rng.random()
        return min(cands, key=prio.__getitem__)
    if rule == "highest":
        return max(cands)
    if rule == "most_negative":
        return min(cands, key=lambda k: (ws.obj[k], k))
    return rng.choice(sorted(cands))


def _pick_row(rids, ws, strategy, rng):
    rule = strategy.row_rule
    rows = ws.rows
    if rule == "random":
        return rng.choice(sorted(rids))
    if rule == "first":
        return min(rids, key=lambda r: lex_key(rows[r]))
    least = min(len(rows[r]) for r in rids)
    sparse = [r for r in rids if len(rows[r]) == least]
    if rule == "sparse_random":
        return rng.choice(sorted(sparse))
    if len(sparse) == 1:
        return sparse[0]
    return min(sparse, key=lambda r: lex_key(rows[r]))


def run_loop(ws, strategy, rng=None):
    """The elimination loop proper.  Mutates ws, returns (J2, iterations).

    J2 maps each eliminated variable to its row ``(row, debt)`` as solved at
    the time.  A row never holds a variable eliminated before it, so J2 is
    triangular; it is only needed when the search fails, and the leftover
    system re-reduces it then.
    """
    if rng is None:
        rng = random.Random(strategy.seed)
    J2 = {}
    prio = {}
    it = 0
    while True:
        cands = [k for k in _bad_terms(ws) if k in ws.occ]
        if not cands:
            break
        k = _pick_variable(cands, ws, strategy, rng, prio)
        rid = _pick_row(ws.occ[k], ws, strategy, rng)
        Y, DY = ws.eliminate(rid, k)
        J2[k] = (Y, DY)
        it += 1
    return J2, it


def basis_system(ws, extra_rows=()):
    """RREF the rows of ws (plus extra ``(row, debt)`` pairs), reduce the objective.

    Returns a new WorkSystem whose rows are in RREF with their debts.
    """
    ech = Echelon(tagged=True)
    for rid in sorted(ws.rows, key=lambda r: lex_key(ws.rows[r])):
        ech.add(ws.rows[rid], ws.debts[rid])
    for row, debt in extra_rows:
        ech.add(row, debt)
    obj = dict(ws.obj)
    debt = dict(ws.obj_debt)
    # reduce(obj) with tag accumulates -c * rowdebt, matching obj -= c * row
    ech.reduce(obj, debt)
    out = WorkSystem(ws.universe, ws.zeroed)
    for p in sorted(ech.rows):
        out.add_row(ech.rows[p], ech.tags[p])
    out.obj = obj
    out.obj_debt = debt
    out.S = set(ws.S)
    return out


def leftover_system(ws, J2):
    """F and J2 reduced by the RREF of J, plus that RREF, as one system."""
    ech = Echelon(tagged=True)
    for rid in sorted(ws.rows, key=lambda r: lex_key(ws.rows[r])):
        ech.add(ws.rows[rid], ws.debts[rid])
    obj = dict(ws.obj)
    odebt = dict(ws.obj_debt)
    ech.reduce(obj, odebt)
    out = WorkSystem(ws.universe, ws.zeroed)
    for p in sorted(ech.rows):
        out.add_row(ech.rows[p], ech.tags[p])
    # back-substitute from the last elimination to the first
    done = {}
    for k in reversed(list(J2)):
        row, debt = J2[k]
        row, debt = dict(row), dict(debt)
        for j in [j for j in row if j in done]:
            c = row.get(j)
            if c:
                axpy(row, done[j][0], -c)
                axpy(debt, done[j][1], -c)
        ech.reduce(row, debt)
        done[k] = (row, debt)
    for k in sorted(done):
        out.add_row(*done[k])
    out.obj = obj
    out.obj_debt = odebt
    out.S = set(ws.S)
    return out


def heuristic_search(P, strategy=DETERMINISTIC, reduce=True, preprocess=True):
    """One run of the elimination heuristic on a slack-space problem.

    With ``reduce=True`` an unsuccessful run hands its leftover system to
    the reducer (implied equalities and redundant inequalities removed).
    """
    ws = _as_system(P)
    if preprocess:
        preprocess_system(ws)
    return _search_prepared(ws, strategy, reduce)


def _search_prepared(ws, strategy, reduce):
    J2, it = run_loop(ws, strategy)
    obj = LinearForm.wrap(dict(ws.obj), ws.universe)
    if ws.objective_is_conic() or not ws.obj:
        cert = ws.certificate(ws.obj, ws.obj_debt)
        if cert is None:
            raise AssertionError("conic objective without certificate")
        return SearchResult("SUCCESSFUL", obj, it, certificate=cert)
    left = leftover_system(ws, J2)
    res = SearchResult("UNSUCCESSFUL", LinearForm.wrap(dict(left.obj), ws.universe), it, system=left)
    if reduce:
        from .reducer import reduce_to_minimal
        red = reduce_to_minimal(left)
        res.reduced = red.system
        res.trace = red.trace
    return res


def system_size(ws):
    v, e, s = ws.sizes()
    return (s, e, v)


@dataclass
class RetryResult:
    result: SearchResult
    attempts: int
    smallest: WorkSystem | None = None
    history: list = field(default_factory=list)

    @property
    def successful(self):
        return self.result.successful


def retry_until_success(P, max_attempts=16, base_seed=0, reduce=True, preprocess=True):
    """Deterministic attempt first, then seeded random ones (seed base_seed + k)."""
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    ws0 = _as_system(P)
    if preprocess:
        preprocess_system(ws0)
    smallest = None
    history = []
    res = None
    for k in range(1, max_attempts + 1):
        strategy = DETERMINISTIC if k == 1 else Strategy.seeded(base_seed + k)
        res = _search_prepared(ws0.copy(), strategy, reduce=False)
        history.append(res.status)
        log.info("attempt %d (%s): %s after %d eliminations", k, "deterministic" if k == 1 else f"seed {base_seed + k}", res.status, res.iterations)
        if res.successful:
            return RetryResult(res, k, None, history)
        if smallest is None or system_size(res.system) < system_size(smallest):
            smallest = res.system
    if reduce:
        from .reducer import reduce_to_minimal
        red = reduce_to_minimal(smallest)
        res.reduced = red.system
        res.trace = red.trace
    return RetryResult(res, max_attempts, smallest, history)
