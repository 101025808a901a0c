"""Reduction of a slack-space system to a minimal one.

Two passes, each a sequence of small provability tests:

* purification finds every slack that is forced to zero and removes it;
* minimization drops every inequality implied by the others.

The inner tests run the elimination heuristic a few times and fall back to
the exact LP, so each decision is exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .algebra import ONE, lex_key
from .elimination import Problem, WorkSystem, preprocess_system
from .lp import solve_system

log = logging.getLogger(__name__)


@dataclass
class ReductionStep:
    kind: str      # "implied_equality", "redundant" or "preprocess"
    key: int
    label: str
    method: str    # "heuristic", "lp", "type1" or "type2"


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    sizes: list = field(default_factory=list)
    tests: int = 0
    lp_calls: int = 0

    @property
    def implied_equalities(self):
        return [s.key for s in self.steps if s.kind == "implied_equality"]

    @property
    def redundant(self):
        return [s.key for s in self.steps if s.kind == "redundant"]

    @property
    def preprocessed(self):
        return [s.key for s in self.steps if s.kind == "preprocess"]

    def record(self, stage, ws):
        v, e, s = ws.sizes()
        log.info("%s: %d variables, %d equalities, %d sign constraints (%d tests so far)", stage, v, e, s, self.tests)
        self.sizes.append({"stage": stage, "variables": v, "equalities": e, "inequalities": s})


@dataclass
class Reduction:
    system: WorkSystem
    trace: ReductionTrace

    @property
    def problem(self):
        return self.system.to_problem()


def _preprocess(ws, trace):
    log = []
    preprocess_system(ws, log)
    for what, k in log:
        method = "type1" if what == "zero" else "type2"
        trace.steps.append(ReductionStep("preprocess", k, ws.universe.label(k), method))


def _as_system(P):
    if isinstance(P, WorkSystem):
        return P.copy()
    return WorkSystem.from_problem(P)


def inner_prove(ws, attempts=3, base_seed=0, trace=None):
    """Decide ``ws.obj >= 0``.  Returns ``(certificate or None, method)``."""
    from .heuristic import retry_until_success

    r = retry_until_success(ws, max_attempts=attempts, base_seed=base_seed, reduce=False)
    if r.successful:
        return r.result.certificate, "heuristic"
    if trace is not None:
        trace.lp_calls += 1
    out = solve_system(r.smallest)
    return (out.certificate if out.feasible else None), "lp"


def finish(ws):
    """RREF the rows, reduce the objective, drop unused sign constraints."""
    from .heuristic import basis_system

    out = basis_system(ws)
    used = set(out.obj)
    used.update(out.occ)
    out.S &= used
    return out


def purify(P, attempts=3, base_seed=0, trace=None):
    """Remove every implied equality ``a_i = 0``."""
    trace = trace if trace is not None else ReductionTrace()
    ws = _as_system(P)
    _preprocess(ws, trace)
    for k in sorted(ws.S):
        if k not in ws.S or k not in ws.occ:
            # a slack in no equality can always be made positive
            continue
        trace.tests += 1
        cert, how = inner_prove(ws.derive({k: -ONE}), attempts, base_seed, trace)
        if cert is None:
            continue
        ws.register_zero(k, cert)
        ws.zero(k)
        trace.steps.append(ReductionStep("implied_equality", k, ws.universe.label(k), how))
    out = finish(ws)
    trace.record("purified", out)
    return Reduction(out, trace)


def minimize(P, attempts=3, base_seed=0, trace=None):
    """Remove every inequality implied by the remaining constraints."""
    trace = trace if trace is not None else ReductionTrace()
    ws = _as_system(P)
    _preprocess(ws, trace)
    for k in sorted(ws.S):
        if k not in ws.S:
            continue
        rids = ws.occ.get(k)
        if not rids:
            # without an equality through it a_k is unconstrained, never redundant
            continue
        rid = min(rids, key=lambda r: (len(ws.rows[r]), lex_key(ws.rows[r])))
        inner = ws.copy()
        Y, _ = inner.eliminate(rid, k)
        inner.obj = {j: -c for j, c in Y.items() if j != k}
        inner.obj_debt = {}
        inner.S.discard(k)
        trace.tests += 1
        cert, how = inner_prove(inner, attempts, base_seed, trace)
        if cert is None:
            continue
        ws.eliminate(rid, k)
        ws.S.discard(k)
        trace.steps.append(ReductionStep("redundant", k, ws.universe.label(k), how))
    out = finish(ws)
    trace.record("minimized", out)
    return Reduction(out, trace)


def reduce_to_minimal(P, attempts=3, base_seed=0):
    """Purify, then minimize.  Returns a :class:`Reduction`."""
    trace = ReductionTrace()
    ws = _as_system(P)
    trace.record("input", ws)
    red = purify(ws, attempts, base_seed, trace)
    return minimize(red.system, attempts, base_seed, trace)


def is_minimal(P, attempts=3, base_seed=0):
    """True if neither pass changes anything (no implied equality, no redundancy)."""
    red = reduce_to_minimal(P, attempts, base_seed)
    return not red.trace.steps


__all__ = [
    "Problem",
    "Reduction",
    "ReductionStep",
    "ReductionTrace",
    "inner_prove",
    "is_minimal",
    "minimize",
    "purify",
    "reduce_to_minimal",
]
