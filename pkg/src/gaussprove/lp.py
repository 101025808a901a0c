"""Exact LP fallback for systems in basis form.

For a system ``F >= 0 s.t. r_l = 0`` whose rows each own a basic variable
``b_l`` (coefficient 1, absent from every other row and from F), adding
``sum p_l r_l`` to F leaves the coefficient ``p_l`` on ``b_l`` and an affine
expression ``P_v(p)`` on every other variable.  F is implied iff some choice
of p makes every coefficient nonnegative on sign-constrained variables and
zero elsewhere.  That is a plain feasibility problem, solved here with an
exact phase-1 simplex under Bland's rule.
"""
from __future__ import annotations

import logging
from array import array
from dataclasses import dataclass, field

from gmpy2 import mpq

from .algebra import ONE, ZERO, COMB_BASE, LinearForm
from .elimination import Echelon, WorkSystem
from .kernels import axpy, float_simplex

log = logging.getLogger(__name__)


class LPError(RuntimeError):
    """The simplex misbehaved (iteration cap hit or witness failed to check)."""


@dataclass
class Constraint:
    """``sum coeffs[l] * p_l + const  (>= or =)  0``."""

    coeffs: dict
    const: object
    kind: str  # ">=" or "="
    label: str = ""

    def value(self, p):
        v = self.const
        for l, c in self.coeffs.items():
            v += c * p[l]
        return v

    def holds(self, p):
        v = self.value(p)
        return v >= 0 if self.kind == ">=" else v == 0


@dataclass
class FeasibilitySystem:
    """Unknowns ``p_0 .. p_{n-1}``, all nonnegative, plus linear constraints.

    ``fixed`` lists unknowns forced to zero (their basic variable is sign-free).
    """

    num_unknowns: int
    constraints: list
    fixed: frozenset = frozenset()
    basis: tuple = ()

    def check(self, p):
        if len(p) != self.num_unknowns:
            return False
        if any(x < 0 for x in p) or any(p[l] != 0 for l in self.fixed):
            return False
        return all(c.holds(p) for c in self.constraints)


@dataclass
class LPResult:
    feasible: bool
    witness: list | None
    iterations: int


def find_basis(rows, objective=None):
    """Pivot (smallest key) of each row; raise if the system is not in basis form."""
    basis = []
    seen = set()
    for r in rows:
        if not r:
            raise ValueError("zero row in basis-form system")
        b = min(r)
        if r[b] != 1:
            raise ValueError("basic variable must have coefficient 1")
        basis.append(b)
        seen.add(b)
    for i, r in enumerate(rows):
        for k in r:
            if k in seen and k != basis[i]:
                raise ValueError("basic variable occurs in another row")
    if objective is not None and any(k in seen for k in objective):
        raise ValueError("objective mentions a basic variable")
    return basis


def build_system(objective, rows, nonneg):
    """Feasibility system for ``objective >= 0`` s.t. ``rows = 0`` (rows in basis form).

    ``objective`` and ``rows`` are dicts or LinearForms.  Unknown ``l``
    multiplies row ``l``.
    """
    F = objective.terms if isinstance(objective, LinearForm) else objective
    R = [r.terms if isinstance(r, LinearForm) else r for r in rows]
    basis = find_basis(R, F)
    fixed = frozenset(l for l, b in enumerate(basis) if b not in nonneg)
    coeffs = {}
    for l, r in enumerate(R):
        if l in fixed:
            continue
        for v, c in r.items():
            if v != basis[l]:
                coeffs.setdefault(v, {})[l] = c
    cons = []
    for v in sorted(set(coeffs) | set(F)):
        kind = ">=" if v in nonneg else "="
        cons.append(Constraint(coeffs.get(v, {}), F.get(v, ZERO), kind, str(v)))
    return FeasibilitySystem(len(R), cons, fixed, tuple(basis))


def feasible(system, max_iterations=None):
    """Exact phase-1 simplex.  Returns an :class:`LPResult`."""
    n = system.num_unknowns
    live = [l for l in range(n) if l not in system.fixed]
    col_of = {l: j for j, l in enumerate(live)}
    nvar = len(live)
    for c in system.constraints:
        if not c.coeffs or all(l in system.fixed for l in c.coeffs):
            ok = c.const >= 0 if c.kind == ">=" else c.const == 0
            if not ok:
                return LPResult(False, None, 0)
    cons = [c for c in system.constraints if any(l not in system.fixed for l in c.coeffs)]
    nslack = sum(1 for c in cons if c.kind == ">=")
    N = nvar + nslack
    T, rhs, basis = [], [], []
    art_rows = []
    s = nvar
    for i, c in enumerate(cons):
        row = [ZERO] * N
        for l, a in c.coeffs.items():
            if l in col_of:
                row[col_of[l]] = mpq(a)
        b = -mpq(c.const)
        scol = None
        if c.kind == ">=":
            scol = s
            row[s] = -ONE
            s += 1
        if b < 0:
            row = [-x for x in row]
            b = -b
        if scol is not None and row[scol] == 1:
            basis.append(scol)
        else:
            basis.append(N + i)  # artificial
            art_rows.append(i)
        T.append(row)
        rhs.append(b)
    m = len(T)
    d = [ZERO] * N
    dval = ZERO
    for i in art_rows:
        for j in range(N):
            if T[i][j]:
                d[j] -= T[i][j]
        dval -= rhs[i]
    cap = max_iterations if max_iterations is not None else 10 * max(m, 1) * max(N, 1) + 10
    it = 0
    while True:
        j = next((j for j in range(N) if d[j] < 0), None)
        if j is None:
            break
        best = None
        for i in range(m):
            a = T[i][j]
            if a > 0:
                q = rhs[i] / a
                if best is None or q < best[0] or (q == best[0] and basis[i] < basis[best[1]]):
                    best = (q, i)
        if best is None:
            # unbounded direction cannot happen in phase 1 (objective >= 0)
            raise LPError("phase-1 objective unbounded")
        r = best[1]
        piv = T[r][j]
        if piv != 1:
            inv = ONE / piv
            T[r] = [x * inv for x in T[r]]
            rhs[r] *= inv
        Tr = T[r]
        nz = [k for k in range(N) if Tr[k]]
        for i in range(m):
            if i != r:
                f = T[i][j]
                if f:
                    Ti = T[i]
                    for k in nz:
                        Ti[k] -= f * Tr[k]
                    rhs[i] -= f * rhs[r]
        f = d[j]
        for k in nz:
            d[k] -= f * Tr[k]
        dval -= f * rhs[r]
        basis[r] = j
        it += 1
        if it > cap:
            raise LPError(f"simplex exceeded {cap} iterations")
    if dval != 0:
        return LPResult(False, None, it)
    p = [ZERO] * n
    for i, b in enumerate(basis):
        if b < nvar:
            p[live[b]] = rhs[i]
    if not system.check(p):
        raise LPError("simplex witness does not satisfy the system")
    return LPResult(True, p, it)


@dataclass
class LPOutcome:
    """``status`` is TRUE (objective implied) or FALSE."""

    status: str
    witness: list | None
    system: FeasibilitySystem
    objective: dict = field(default_factory=dict)
    combined: dict | None = None
    certificate: dict | None = None
    iterations: int = 0

    @property
    def feasible(self):
        return self.status == "TRUE"


def solve_system(ws):
    """Run the LP fallback on a WorkSystem; certificate over the original slacks if TRUE."""
    ech = Echelon(tagged=True)
    for rid in sorted(ws.rows):
        ech.add(ws.rows[rid], ws.debts[rid])
    obj = dict(ws.obj)
    odebt = dict(ws.obj_debt)
    ech.reduce(obj, odebt)
    keys = sorted(ech.rows)
    rows = [ech.rows[k] for k in keys]
    system = build_system(obj, rows, ws.S)
    res = feasible(system)
    if not res.feasible:
        return LPOutcome("FALSE", None, system, obj, iterations=res.iterations)
    F4 = dict(obj)
    Z = dict(odebt)
    for l, p in enumerate(res.witness):
        if p:
            axpy(F4, rows[l], p)
            axpy(Z, ech.tags[keys[l]], p)
    if any(c < 0 or k not in ws.S for k, c in F4.items()):
        raise LPError("combined objective is not conic")
    cert = ws.certificate(F4, Z)
    return LPOutcome("TRUE", res.witness, system, obj, F4, cert, res.iterations)


@dataclass
class SparseOutcome:
    """Result of :func:`sparse_simplex` or :func:`row_generation`.

    ``ray`` is a point of the cone with negative objective (FALSE only).
    """

    status: str
    certificate: dict | None
    ray: dict | None
    pivots: int
    rows_used: int = 0

    @property
    def feasible(self):
        return self.status == "TRUE"


def _basis_form(ws):
    """Give each row a basic variable (coefficient 1, in no other row, not in F)."""
    basic = {}
    for rid, row in ws.rows.items():
        cands = [k for k in row if len(ws.occ[k]) == 1 and k not in ws.obj]
        if not cands:
            return None
        basic[rid] = min(cands)
    for rid, b in basic.items():
        c = ws.rows[rid][b]
        if c != 1:
            inv = ONE / c
            ws.rows[rid] = {k: v * inv for k, v in ws.rows[rid].items()}
            ws.debts[rid] = {k: v * inv for k, v in ws.debts[rid].items()}
    return basic


def _to_basis(ws):
    """A copy of ws in basis form, with its row -> basic variable map."""
    ws = ws.copy()
    basic = _basis_form(ws)
    if basic is not None:
        return ws, basic
    ech = Echelon(tagged=True)
    for rid in sorted(ws.rows):
        ech.add(ws.rows[rid], ws.debts[rid])
    obj, odebt = dict(ws.obj), dict(ws.obj_debt)
    ech.reduce(obj, odebt)
    out = WorkSystem(ws.universe, ws.zeroed)
    for p in sorted(ech.rows):
        out.add_row(ech.rows[p], ech.tags[p])
    out.obj, out.obj_debt, out.S = obj, odebt, set(ws.S)
    return out, _basis_form(out)


# Perturbation keys are negative integers, so they never clash with variables.
# A smaller key is a more significant epsilon.


def _perturb(ws, basic, key):
    """Add the epsilon ``key`` to the right-hand side of every row (basic value eps)."""
    for rid in sorted(basic, key=basic.get):
        ws.rows[rid][key] = -ONE
        ws.occ.setdefault(key, set()).add(rid)
        key -= 1
    return key


def _lex(row, scale):
    """Perturbation part of a row's basic value, divided by scale, as a sorted list."""
    return sorted((k, -c / scale) for k, c in row.items() if k < 0)


def _lex_less(u, v):
    i = j = 0
    while i < len(u) or j < len(v):
        ku = u[i][0] if i < len(u) else None
        kv = v[j][0] if j < len(v) else None
        if kv is None or (ku is not None and ku < kv):
            return u[i][1] < 0
        if ku is None or kv < ku:
            return v[j][1] > 0
        if u[i][1] != v[j][1]:
            return u[i][1] < v[j][1]
        i += 1
        j += 1
    return False


def _pivot(ws, basic, max_pivots=None):
    """Simplex pivots at the origin until the reduced costs are conic or a ray shows up.

    Rows carry the perturbation terms added by :func:`_perturb`; the
    leaving row is the lexicographic minimum ratio, which keeps every
    perturbed basic value positive, makes each pivot decrease the
    perturbed objective and so rules out cycling for any entering rule.
    The most negative reduced cost enters, and any improving direction
    without a blocking row is returned as a ray at once.
    Mutates ws and basic.  Returns ``(ray or None, pivots)``.
    """
    S = ws.S
    pivots = 0
    while True:
        cands = [(k, 1 if c < 0 else -1) for k, c in ws.obj.items() if k >= 0 and k not in S]
        if not cands:
            cands = [(k, 1) for k, c in ws.obj.items() if k >= 0 and c < 0]
            if not cands:
                return None, pivots
        best = None
        for k, d in cands:
            block = [r for r in ws.occ.get(k, ()) if basic[r] in S and ws.rows[r][k] * d > 0]
            if not block:
                return _ray(ws, basic, k, d), pivots
            key = (ws.obj[k] * d, k)
            if best is None or key < best[0]:
                best = (key, k, d, block)
        _, k, d, block = best
        rid, lo = None, None
        for r in block:
            v = _lex(ws.rows[r], ws.rows[r][k] * d)
            if lo is None or _lex_less(v, lo):
                rid, lo = r, v
        Y, DY = ws.solve_row(rid, k)
        ws.remove_row(rid)
        del basic[rid]
        ws.substitute(k, Y, DY)
        basic[ws.add_row(Y, DY)] = k
        pivots += 1
        if pivots % 100 == 0:
            log.debug("sparse simplex: %d pivots, %d negative reduced costs", pivots, sum(1 for k, c in ws.obj.items() if k >= 0 and c < 0))
        if max_pivots is not None and pivots > max_pivots:
            raise LPError(f"sparse simplex exceeded {max_pivots} pivots")


def _ray(ws, basic, k, d):
    ray = {k: mpq(d)}
    for r in ws.occ.get(k, ()):
        c = ws.rows[r][k]
        ray[basic[r]] = -c * d
    return ray


def _certify(ws):
    obj = {k: c for k, c in ws.obj.items() if k >= 0}
    cert = ws.certificate(obj, ws.obj_debt)
    if cert is None:
        raise LPError("conic reduced costs without a certificate")
    return cert


def sparse_simplex(ws, max_pivots=None):
    """Primal simplex at the origin of the slack cone, on the sparse rows of ws.

    Every basis gives ``F = sum_j F_j a_j`` over the nonbasic variables
    modulo the rows, so a basis whose reduced costs are conic proves F.
    The origin is a degenerate vertex; the lexicographic rule handles
    that (see :func:`_pivot`).  A negative reduced cost with no blocking
    row is a ray of the cone on which F < 0.  ws is left untouched.
    """
    ws, basic = _to_basis(ws)
    _perturb(ws, basic, -1)
    ray, pivots = _pivot(ws, basic, max_pivots)
    if ray is not None:
        return SparseOutcome("FALSE", None, ray, pivots, len(ws.rows))
    return SparseOutcome("TRUE", _certify(ws), None, pivots, len(ws.rows))


def row_generation(ws, batch=20, max_pivots=None):
    """Sparse simplex on a growing subset of the rows of ws.

    Leaving a row out only drops the sign constraint of its basic
    variable, so a proof of the relaxed system is a proof of ws.  When the
    relaxed system has a ray, the rows whose basic variable goes negative
    on it are the violated constraints; the ``batch`` most violated ones
    are added and the simplex resumes from its current basis.  Each new
    row gets a more significant epsilon than the rows already there, so
    the perturbed basis stays feasible.  Meant for large systems whose
    certificates use few of their rows.
    """
    full, basic = _to_basis(ws)
    S = full.S
    sub = WorkSystem(full.universe, full.zeroed)
    sub.obj, sub.obj_debt, sub.S = dict(full.obj), dict(full.obj_debt), set(S)
    sub_basic = {}
    taken = set()
    pivots = 0
    eps = -1
    while True:
        ray, n = _pivot(sub, sub_basic, None if max_pivots is None else max_pivots - pivots)
        pivots += n
        if ray is None:
            return SparseOutcome("TRUE", _certify(sub), None, pivots, len(taken))
        # basic values of the rows not taken yet; they only involve nonbasic variables of full
        val = {}
        for j, v in ray.items():
            for r in full.occ.get(j, ()):
                if r in taken or basic[r] == j:
                    continue
                val[r] = val.get(r, ZERO) - full.rows[r][j] * v
        viol = sorted((v, basic[r], r) for r, v in val.items() if v < 0 and basic[r] in S)
        if not viol:
            for r, v in val.items():
                ray[basic[r]] = v
            return SparseOutcome("FALSE", None, ray, pivots, len(taken))
        log.debug("row generation: %d rows, %d violated, %d pivots", len(taken), len(viol), pivots)
        sub_row = {b: r for r, b in sub_basic.items()}
        for _, b, r in viol[:batch]:
            taken.add(r)
            row, debt = dict(full.rows[r]), dict(full.debts[r])
            for j in [j for j in row if j in sub_row]:
                c = row.get(j)
                if c:
                    axpy(row, sub.rows[sub_row[j]], -c)
                    axpy(debt, sub.debts[sub_row[j]], -c)
            # the old rows' epsilons are already in row; this one outranks them
            eps -= 1
            row[eps] = -ONE
            sub_basic[sub.add_row(row, debt)] = b


def float_guided(ws, max_iterations=200000):
    """Certificate for a large system, found in floating point and checked exactly.

    The multipliers are a nonnegative combination of the sign-constrained
    variables matching F modulo the rows.  A double-precision simplex picks the
    support (a first basic feasible point, or failing that the minimiser of
    their sum); the multipliers are then solved exactly on that support and
    turned into a certificate.  Returns None whenever the guess does not
    survive the exact check, so the caller falls back to an exact method.
    """
    ws, basic = _to_basis(ws)
    row_of = {b: r for r, b in basic.items()}
    S = ws.S
    coords = set(ws.obj)
    for r in ws.rows.values():
        coords.update(r)
    coords = sorted(coords - set(row_of))
    zi = {k: i for i, k in enumerate(coords)}
    cols = sorted(k for k in S if k in row_of or k in zi)

    def column(k):
        # a_k as a form over the nonbasic coordinates
        if k in row_of:
            return {j: -v for j, v in ws.rows[row_of[k]].items() if j != k}
        return {k: ONE}

    m, n = len(coords), len(cols)
    if not m:
        return ws.certificate({}, dict(ws.obj_debt))
    A = array("d", bytes(8 * m * n))
    for c, k in enumerate(cols):
        for j, v in column(k).items():
            A[zi[j] * n + c] = float(v)
    b = array("d", bytes(8 * m))
    for k, v in ws.obj.items():
        b[zi[k]] = float(v)
    # a nonbasic slack's column is a unit vector: start from it where F is nonnegative
    crash = array("i", [-1]) * m
    for c, k in enumerate(cols):
        if k in zi and ws.obj.get(k, ZERO) >= 0:
            crash[zi[k]] = c
    # any basic feasible point will do; minimising the sum is the second try
    for cost in (None, array("d", [1.0]) * n):
        status, x, it = float_simplex(A, b, cost, m, n, max_iterations, crash)
        log.debug("float simplex: status %d after %d pivots on %d x %d", status, it, m, n)
        if status == 1:
            return None
        if status == 0:
            lam = _exact_support([k for c, k in enumerate(cols) if x[c] > 1e-9], column, ws.obj)
            if lam is not None:
                break
    else:
        return None
    # F + sum lam_b (row of b) == lam, with the matching debt
    obj, debt = dict(ws.obj), dict(ws.obj_debt)
    for k, v in lam.items():
        if k in row_of:
            axpy(obj, ws.rows[row_of[k]], v)
            axpy(debt, ws.debts[row_of[k]], v)
    if obj != lam:
        return None
    return ws.certificate(lam, debt)


def _exact_support(support, column, obj):
    # exact multipliers on the support: sum_k lam_k a_k = F over the coordinates
    unknown = {k: u for u, k in enumerate(support)}
    rhs = len(support)
    eqs = {}
    for k in support:
        for j, v in column(k).items():
            e = eqs.setdefault(j, {})
            e[unknown[k]] = e.get(unknown[k], ZERO) + v
    for j, v in obj.items():
        eqs.setdefault(j, {})[rhs] = -v
    ech = Echelon()
    for e in eqs.values():
        e = {u: v for u, v in e.items() if v}
        if e:
            ech.add(e)
    # rows are fully reduced, so unknowns without a pivot can be set to zero
    lam = {}
    for p, row in ech.rows.items():
        if p == rhs:
            return None
        v = -row.get(rhs, ZERO) / row[p]
        if v < 0:
            return None
        if v:
            lam[support[p]] = v
    return lam


def witness_form(witness, universe):
    """The witness as a form over the coefficient variables p_1, p_2, ..."""
    return LinearForm.wrap({COMB_BASE + l + 1: mpq(v) for l, v in enumerate(witness) if v}, universe)
