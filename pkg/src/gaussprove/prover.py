"""End-to-end proving of information inequalities and identities.

The pipeline expands every measure into joint entropies, removes the
equality constraints by Gauss-Jordan reduction, moves to slack space,
preprocesses and runs the elimination heuristic with retries, and falls
back to reduction plus an exact LP when the heuristic gives up.  Whatever
succeeds yields multipliers over the slacks, which are mapped back to a
certificate over the original constraints and checked.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from .algebra import ONE, LinearForm, format_rational, slack_index, slack_key
from .elimination import (
    Echelon,
    Problem,
    SoundnessError,
    WorkSystem,
    dimension_reduce_tracked,
    lp_reduce,
    preprocess_system,
)
from .heuristic import retry_until_success
from .kernels import axpy
from .lp import float_guided, solve_system
from .reducer import purify, reduce_to_minimal
from .shannon import elemental_inequalities, elemental_measures, expand_statement

log = logging.getLogger(__name__)

PROVED = "PROVED"
# above this many sign-constrained slacks, seeded retries and the exact
# minimal reduction are too slow; the float-guided LP takes over
LARGE_SYSTEM = 500
LARGE_ATTEMPTS = 1
NOT_PROVABLE = "NOT_PROVABLE"


class MalformedCertificateError(ValueError):
    pass


# ---------------------------------------------------------------- expansion

@dataclass
class Expanded:
    """A problem statement in joint-entropy coordinates.

    ``inequalities`` lists the elemental forms first, then the extra
    inequality constraints in input order; ``equalities`` follows
    ``ps.equalities``.
    """

    universe: object
    objective: LinearForm
    relation: str
    inequalities: list
    inequality_labels: list
    equalities: list
    equality_labels: list
    num_elemental: int


def expand_problem(ps):
    U = ps.universe()
    F, is_eq = expand_statement(ps.objective, U)
    n = len(ps.variables)
    ineqs = elemental_inequalities(n, U) if n else []
    labels = [f"{m} >= 0" for m in elemental_measures(n, ps.variables)] if n else []
    ne = len(ineqs)
    for s in ps.inequalities:
        ineqs.append(expand_statement(s, U)[0])
        labels.append(str(s))
    eqs, eq_labels = [], []
    for s in ps.equalities:
        eqs.append(expand_statement(s, U)[0])
        eq_labels.append(str(s))
    return Expanded(U, F, "=" if is_eq else ">=", ineqs, labels, eqs, eq_labels, ne)


# ---------------------------------------------------------------- certificates

@dataclass
class Certificate:
    """``sum mu_i C_i + sum nu_j Q_j == direction * F`` with every mu_i >= 0.

    Indices refer to :class:`Expanded` lists: inequality ``i`` is the i-th
    elemental form or, past those, an extra inequality constraint.
    """

    inequality_multipliers: dict
    equality_multipliers: dict
    objective: LinearForm
    direction: int = 1

    def to_json(self):
        return {
            "direction": self.direction,
            "inequality_multipliers": [[i, format_rational(c)] for i, c in sorted(self.inequality_multipliers.items())],
            "equality_multipliers": [[j, format_rational(c)] for j, c in sorted(self.equality_multipliers.items())],
        }

    @classmethod
    def from_json(cls, data, objective):
        return cls(
            {int(i): mpq(c) for i, c in data["inequality_multipliers"]},
            {int(j): mpq(c) for j, c in data["equality_multipliers"]},
            objective,
            int(data.get("direction", 1)),
        )

    def scaled(self, c):
        c = mpq(c)
        return Certificate(
            {i: c * v for i, v in self.inequality_multipliers.items()},
            {j: c * v for j, v in self.equality_multipliers.items()},
            self.objective * c,
            self.direction,
        )


def combine(cert, ex):
    """The form ``sum mu_i C_i + sum nu_j Q_j``."""
    acc = {}
    m, q = len(ex.inequalities), len(ex.equalities)
    for i, c in cert.inequality_multipliers.items():
        if not 0 <= i < m:
            raise MalformedCertificateError(f"inequality index {i} out of range 0..{m - 1}")
        axpy(acc, ex.inequalities[i].terms, mpq(c))
    for j, c in cert.equality_multipliers.items():
        if not 0 <= j < q:
            raise MalformedCertificateError(f"equality index {j} out of range 0..{q - 1}")
        axpy(acc, ex.equalities[j].terms, mpq(c))
    return LinearForm.wrap(acc, ex.universe)


def verify_certificate(cert, ps, expanded=None):
    """Exact check of a certificate against the original problem statement."""
    ex = expanded if expanded is not None else expand_problem(ps)
    if any(c < 0 for c in cert.inequality_multipliers.values()):
        return False
    target = ex.objective if cert.direction == 1 else -ex.objective
    return combine(cert, ex) == target


def render_certificate(cert, ex):
    """Plain-text certificate: one line per constraint with its multiplier and form."""
    lines = []
    target = ex.objective if cert.direction == 1 else -ex.objective
    lines.append(f"objective: {target} >= 0")
    lines.append("inequalities (multiplier, constraint, joint-entropy form):")
    for i, c in sorted(cert.inequality_multipliers.items()):
        lines.append(f"  {format_rational(c):>8}  [{i}] {ex.inequality_labels[i]}  ::  {ex.inequalities[i]}")
    if cert.equality_multipliers:
        lines.append("equalities (multiplier, constraint, joint-entropy form):")
        for j, c in sorted(cert.equality_multipliers.items()):
            lines.append(f"  {format_rational(c):>8}  [{j}] {ex.equality_labels[j]}  ::  {ex.equalities[j]}")
    return "\n".join(lines)


# ---------------------------------------------------------------- reports

@dataclass
class ProofReport:
    verdict: str
    certificate: Certificate | None = None
    negative_certificate: Certificate | None = None
    method: str = ""
    attempts: int = 0
    lp_invocations: int = 0
    reduction_lp_calls: int = 0
    stage_sizes: list = field(default_factory=list)
    wall_time: float = 0.0
    lp_objective: LinearForm | None = None
    reduced_problem: Problem | None = None
    slack_labels: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    expanded: Expanded | None = None

    @property
    def proved(self):
        return self.verdict == PROVED

    def to_json(self, deterministic=False):
        out = {
            "verdict": self.verdict,
            "method": self.method,
            "attempts": self.attempts,
            "lp_invocations": self.lp_invocations,
            "reduction_lp_calls": self.reduction_lp_calls,
            "stage_sizes": self.stage_sizes,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }
        if self.negative_certificate is not None:
            out["negative_certificate"] = self.negative_certificate.to_json()
        if self.reduced_problem is not None:
            out["reduced_problem"] = problem_to_json(self.reduced_problem, self.slack_labels)
        if self.notes:
            out["notes"] = list(self.notes)
        if not deterministic:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def dumps(self, deterministic=False):
        return json.dumps(self.to_json(deterministic), indent=2, sort_keys=True)


def _form_json(form):
    return [[form.universe.label(k), format_rational(c)] for k, c in sorted(form.terms.items())]


def problem_to_json(P, labels=None):
    labels = labels or {}
    return {
        "objective": _form_json(P.objective),
        "equalities": [_form_json(e) for e in P.equalities],
        "nonnegative": [P.universe.label(k) for k in sorted(P.nonneg)],
        "slacks": {P.universe.label(k): labels[k] for k in sorted(P.nonneg) if k in labels},
    }


def _sizes(stage, v, e, s):
    log.info("%s: %d variables, %d equalities, %d inequalities", stage, v, e, s)
    return {"stage": stage, "variables": v, "equalities": e, "inequalities": s}


def _minimal_sizes(ws):
    v, e, s = ws.sizes()
    return [_sizes("minimal_slack", v, e, s), _sizes("minimal", v - e, 0, s)]


# ---------------------------------------------------------------- pipeline

@dataclass
class SlackSpace:
    """Everything between expansion and the slack-space search."""

    expanded: Expanded
    echelon: Echelon
    forms: list
    origins: list
    reduced_objective: LinearForm
    lp: object
    stage_sizes: list

    def problem(self):
        m = len(self.forms)
        return Problem(self.lp.objective, self.lp.J1, frozenset(slack_key(i) for i in range(1, m + 1)))

    def slack_labels(self):
        ex = self.expanded
        return {slack_key(i): ex.inequality_labels[o] for i, o in enumerate(self.origins, 1)}


def to_slack_space(ps, expanded=None, sign=1):
    """Expansion, dimension reduction and slack reduction of ``sign * objective``.

    Slack ``a_i`` belongs to the i-th distinct reduced inequality in the
    order the constraints are listed (elemental ones first).
    """
    ex = expanded if expanded is not None else expand_problem(ps)
    U = ex.universe
    ech = Echelon()
    for q in ex.equalities:
        ech.add(q.terms)
    forms, origins, _ = dimension_reduce_tracked(ex.inequalities, ex.equalities, ech)
    F = ex.objective if sign == 1 else -ex.objective
    F5 = LinearForm.wrap(ech.reduce(dict(F.terms)), U)
    sizes = [
        _sizes("input", U.x_limit, len(ex.equalities), len(ex.inequalities)),
        _sizes("dimension_reduced", U.x_limit - len(ech), 0, len(forms)),
    ]
    if forms:
        L = lp_reduce(F5, forms)
    else:
        from .elimination import LPReduction
        free = tuple(U.variable(k) for k in sorted(F5.terms))
        L = LPReduction(F5, [], {}, 0, free, [])
    sizes.append(_sizes("lp_reduced", len(forms), len(L.J1), len(forms)))
    return SlackSpace(ex, ech, forms, origins, F5, L, sizes)


def lift(space, slack_cert, direction=1):
    """Map slack multipliers to a certificate over the original constraints."""
    ex = space.expanded
    mu = {}
    for k, c in slack_cert.items():
        if not c:
            continue
        o = space.origins[slack_index(k) - 1]
        mu[o] = mu.get(o, 0) + c
    target = ex.objective if direction == 1 else -ex.objective
    residual = dict(target.terms)
    for i, c in mu.items():
        axpy(residual, ex.inequalities[i].terms, -c)
    nu = equality_multipliers(ex.equalities, residual)
    if nu is None:
        raise SoundnessError("lifted combination differs from the objective outside the equality span")
    return Certificate(mu, nu, target, direction)


def equality_multipliers(equalities, residual):
    """nu with ``sum nu_j Q_j == residual``, or None if residual is outside the span."""
    if not residual:
        return {}
    keys = set(residual)
    # only equalities connected to the residual's support can take part
    by_key = {}
    for j, q in enumerate(equalities):
        for k in q.terms:
            by_key.setdefault(k, []).append(j)
    used, frontier = set(), list(keys)
    seen = set(keys)
    while frontier:
        k = frontier.pop()
        for j in by_key.get(k, ()):
            if j not in used:
                used.add(j)
                for k2 in equalities[j].terms:
                    if k2 not in seen:
                        seen.add(k2)
                        frontier.append(k2)
    ech = Echelon(tagged=True)
    for j in sorted(used):
        ech.add(equalities[j].terms, {j: ONE})
    r = dict(residual)
    tag = {}
    ech.reduce(r, tag)
    if r:
        return None
    return {j: -c for j, c in tag.items() if c}


def _check_slack_level(space, cert_terms, direction):
    """F - sum lambda_i a_i must lie in span(J1)."""
    L = space.lp
    ech = Echelon()
    for row in L.J1:
        ech.add(row.terms)
    r = dict(L.objective.terms) if direction == 1 else {k: -c for k, c in L.objective.terms.items()}
    axpy(r, cert_terms, -ONE)
    ech.reduce(r)
    if r:
        raise SoundnessError("slack certificate does not reproduce the reduced objective")


def _search(P, max_attempts, base_seed, report, minimal):
    """Preprocess + retries + fallback on a slack-space Problem.  Returns slack multipliers or None."""
    ws = WorkSystem.from_problem(P)
    preprocess_system(ws)
    v, e, s = ws.sizes()
    report.stage_sizes.append(_sizes("preprocessed", v, e, s))
    large = s > LARGE_SYSTEM
    if large and max_attempts > LARGE_ATTEMPTS:
        report.notes.append(f"large system ({s} slacks): heuristic attempts capped at {LARGE_ATTEMPTS}")
        max_attempts = LARGE_ATTEMPTS
    if large and minimal:
        report.notes.append("large system: minimal reduction skipped")
        minimal = False
    r = retry_until_success(ws, max_attempts=max_attempts, base_seed=base_seed, reduce=False, preprocess=False)
    report.attempts = r.attempts
    if r.successful:
        report.method = "heuristic"
        if minimal:
            red = reduce_to_minimal(ws)
            report.reduction_lp_calls += red.trace.lp_calls
            report.reduced_problem = red.problem
            report.stage_sizes.extend(_minimal_sizes(red.system))
        return r.result.certificate
    v, e, s = r.smallest.sizes()
    report.stage_sizes.append(_sizes("heuristic_leftover", v, e, s))
    report.method = "lp"
    if large:
        report.lp_invocations += 1
        cert = float_guided(r.smallest)
        if cert is not None:
            return cert
        log.info("float-guided LP gave no certificate; solving exactly")
    red = reduce_to_minimal(r.smallest)
    report.reduction_lp_calls += red.trace.lp_calls
    report.stage_sizes.extend(_minimal_sizes(red.system))
    out = solve_system(red.system)
    report.lp_invocations += 1
    report.reduced_problem = red.problem
    return out.certificate if out.feasible else None


def prove_problem(P, max_attempts=16, base_seed=0, minimal=False):
    """Prove a slack-space Problem directly; the certificate maps slack keys to multipliers."""
    t0 = time.perf_counter()
    report = ProofReport(NOT_PROVABLE)
    v, e, s = P.sizes()
    report.stage_sizes.append(_sizes("input", v, e, s))
    cert = _search(P, max_attempts, base_seed, report, minimal)
    if cert is not None:
        _check_problem_certificate(P, cert)
        report.verdict = PROVED
        # slack a_i is reported under index i
        report.certificate = Certificate({slack_index(k): c for k, c in cert.items()}, {}, P.objective)
    report.wall_time = time.perf_counter() - t0
    return report


def _check_problem_certificate(P, cert):
    ech = Echelon()
    for e in P.equalities:
        ech.add(e.terms)
    r = dict(P.objective.terms)
    axpy(r, cert, -ONE)
    ech.reduce(r)
    if r or any(c < 0 or k not in P.nonneg for k, c in cert.items()):
        raise SoundnessError("slack-space certificate failed to check")


def verify_problem_certificate(P, cert):
    """``cert`` is a Certificate (indexed by slack number) or a dict over slack keys."""
    if isinstance(cert, Certificate):
        cert = {slack_key(i): c for i, c in cert.inequality_multipliers.items()}
    try:
        _check_problem_certificate(P, cert)
    except SoundnessError:
        return False
    return True


def prove_inequality(ps, max_attempts=16, base_seed=0, minimal=False, verify=False):
    """Prove ``objective >= 0`` (a ``<=`` objective is flipped when expanded)."""
    t0 = time.perf_counter()
    space = to_slack_space(ps)
    report = ProofReport(NOT_PROVABLE, stage_sizes=list(space.stage_sizes), expanded=space.expanded)
    report.lp_objective = space.lp.objective
    report.slack_labels = space.slack_labels()
    if space.expanded.relation == "=":
        report.notes.append("objective is an equality; proving the >= direction only")
    if not space.lp.provable:
        report.method = "free_variable"
        report.notes.append("free variables remain: " + ", ".join(space.expanded.universe.label(space.expanded.universe.key(v)) for v in space.lp.free))
        report.wall_time = time.perf_counter() - t0
        return report
    cert = _search(space.problem(), max_attempts, base_seed, report, minimal)
    if cert is not None:
        _check_slack_level(space, cert, 1)
        report.certificate = lift(space, cert)
        report.verdict = PROVED
        if verify and not verify_certificate(report.certificate, ps, space.expanded):
            raise SoundnessError("certificate failed verification")
    report.wall_time = time.perf_counter() - t0
    return report


def prove_identity(ps, fallback=False, max_attempts=16, base_seed=0, verify=False):
    """Prove ``lhs = rhs`` by purification: the reduced objective must vanish."""
    t0 = time.perf_counter()
    space = to_slack_space(ps)
    ex = space.expanded
    report = ProofReport(NOT_PROVABLE, stage_sizes=list(space.stage_sizes), expanded=ex)
    report.lp_objective = space.lp.objective
    report.slack_labels = space.slack_labels()
    report.method = "purify"
    if not space.lp.provable:
        report.notes.append("free variables remain")
    else:
        P = space.problem()
        red = purify(P)
        report.reduction_lp_calls += red.trace.lp_calls
        ws = red.system
        v, e, s = ws.sizes()
        report.stage_sizes.append(_sizes("purified", v, e, s))
        if not ws.obj:
            pos = ws.certificate({}, ws.obj_debt)
            neg = ws.resolve(dict(ws.obj_debt))
            if pos is None or neg is None:
                raise SoundnessError("purified identity without a certificate")
            _check_slack_level(space, pos, 1)
            _check_slack_level(space, neg, -1)
            report.certificate = lift(space, pos, 1)
            report.negative_certificate = lift(space, neg, -1)
            report.verdict = PROVED
        else:
            report.reduced_problem = ws.to_problem()
    if fallback:
        a = prove_inequality(ps, max_attempts, base_seed)
        b = prove_inequality(_negated(ps), max_attempts, base_seed)
        both = a.proved and b.proved
        if both != report.proved:
            report.notes.append(f"two-inequality check disagrees: purify={report.verdict}, inequalities={'PROVED' if both else 'NOT_PROVABLE'}")
            if both and not report.proved:
                report.verdict = PROVED
                report.method = "two_inequalities"
                report.certificate = a.certificate
                report.negative_certificate = Certificate(
                    b.certificate.inequality_multipliers, b.certificate.equality_multipliers, -ex.objective, -1
                )
    if verify and report.proved:
        for c in (report.certificate, report.negative_certificate):
            if not verify_certificate(c, ps, ex):
                raise SoundnessError("certificate failed verification")
    report.wall_time = time.perf_counter() - t0
    return report


def _negated(ps):
    from .shannon import ProblemStatement, Statement

    o = ps.objective
    return ProblemStatement(ps.variables, ps.scalars, Statement(o.rhs, ">=", o.lhs), ps.constraints)


def prove(ps, **kw):
    """Dispatch on the objective relation: ``=`` goes to :func:`prove_identity`."""
    if ps.objective.is_equality:
        return prove_identity(ps, **{k: v for k, v in kw.items() if k in ("fallback", "max_attempts", "base_seed", "verify")})
    kw.pop("fallback", None)
    return prove_inequality(ps, **kw)
