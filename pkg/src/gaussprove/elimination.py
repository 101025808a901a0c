"""Gauss-Jordan machinery over sparse exact rows.

The workhorse is :class:`Echelon`, an incremental fully reduced row echelon
form keyed by pivot.  On top of it sit dimension reduction of an
inequality set by an equality set, the slack-variable reduction that turns
``F >= 0 s.t. C_i >= 0`` into a problem over slacks only, and the Type I /
Type II preprocessing pass.

Slack-space problems are manipulated through :class:`WorkSystem`.  Every row
and the objective carry a *debt*: a form over slacks that were set to zero
along the way.  A row ``r`` always satisfies ``r = (element of span E0) + debt``
where ``E0`` is the equality set the system was built from, and the
objective ``X`` satisfies ``X = F0 + (element of span E0) + debt``.  Together
with the registry of zero certificates this is enough to turn any final
conic form back into a certificate over the original slacks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    ONE,
    LinearForm,
    UniverseError,
    is_slack,
    lex_key,
    slack_key,
)
from .kernels import axpy, axpy_track, reduce_full, scaled


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Rows are dicts ``key -> mpq``.  The pivot of a row is its smallest key
    (the highest variable in the order) and has coefficient 1; no pivot key
    occurs in any other row.  With ``tagged=True`` each row carries a tag, a
    second sparse vector that undergoes the same row operations.
    """

    def __init__(self, tagged=False):
        self.rows = {}
        self.tags = {} if tagged else None
        self.occ = {}

    def __len__(self):
        return len(self.rows)

    def __contains__(self, key):
        return key in self.rows

    def copy(self):
        other = Echelon(self.tags is not None)
        other.rows = {p: dict(r) for p, r in self.rows.items()}
        if self.tags is not None:
            other.tags = {p: dict(t) for p, t in self.tags.items()}
        other.occ = {k: set(s) for k, s in self.occ.items()}
        return other

    def reduce(self, row, tag=None):
        """Eliminate every pivot key from ``row`` in place."""
        if tag is None or self.tags is None:
            return reduce_full(row, self.rows)
        piv, tags = self.rows, self.tags
        for k in [k for k in row if k in piv]:
            c = row.get(k)
            if c:
                axpy(row, piv[k], -c)
                axpy(tag, tags[k], -c)
        return row

    def add(self, row, tag=None):
        """Insert a row.  Returns ``(pivot, tag)``; pivot is None for a dependent row.

        For a dependent row the returned tag is the combination of tags that
        certifies the dependency.
        """
        r = dict(row)
        t = dict(tag) if (self.tags is not None and tag is not None) else ({} if self.tags is not None else None)
        self.reduce(r, t)
        if not r:
            return None, t
        p = min(r)
        c = r[p]
        if c != 1:
            inv = ONE / c
            r = scaled(r, inv)
            if t is not None:
                t = scaled(t, inv)
        piv, occ = self.rows, self.occ
        users = occ.pop(p, None)
        if users:
            for q in users:
                rq = piv[q]
                cq = rq[p]
                added, removed = [], []
                axpy_track(rq, r, -cq, added, removed)
                for k in added:
                    occ.setdefault(k, set()).add(q)
                for k in removed:
                    if k != p:
                        occ[k].discard(q)
                if t is not None:
                    axpy(self.tags[q], t, -cq)
        piv[p] = r
        if t is not None:
            self.tags[p] = t
        for k in r:
            if k != p:
                occ.setdefault(k, set()).add(p)
        return p, t

    def sorted_rows(self):
        return [self.rows[p] for p in sorted(self.rows)]


class Rref:
    """Reduced row echelon form of a set of forms under the universe order."""

    def __init__(self, echelon, universe):
        self.echelon = echelon
        self.universe = universe

    @property
    def rank(self):
        return len(self.echelon)

    @property
    def rows(self):
        u = self.universe
        return [LinearForm.wrap(dict(r), u) for r in self.echelon.sorted_rows()]

    @property
    def pivots(self):
        return tuple(self.universe.variable(p) for p in sorted(self.echelon.rows))

    def solution(self, var):
        """U with ``var = U`` on the solution set, for a pivot variable."""
        k = self.universe.key(var)
        row = self.echelon.rows[k]
        return LinearForm.wrap({j: -c for j, c in row.items() if j != k}, self.universe)

    @property
    def free_variables(self):
        keys = set()
        for r in self.echelon.rows.values():
            keys.update(r)
        keys.difference_update(self.echelon.rows)
        return {self.universe.variable(k) for k in keys}

    def reduce(self, form):
        if form.universe != self.universe:
            raise UniverseError("forms live in different universes")
        return LinearForm.wrap(self.echelon.reduce(dict(form.terms)), self.universe)

    def __eq__(self, other):
        return isinstance(other, Rref) and self.universe == other.universe and self.echelon.rows == other.echelon.rows

    def __repr__(self):
        return f"Rref(rank={self.rank})"


def _common_universe(forms, universe=None):
    for f in forms:
        if universe is None:
            universe = f.universe
        elif f.universe != universe:
            raise UniverseError("forms live in different universes")
    return universe


def rref(rows, universe=None):
    rows = list(rows)
    universe = _common_universe(rows, universe)
    if universe is None:
        from .algebra import Universe
        universe = Universe()
    ech = Echelon()
    for f in rows:
        ech.add(f.terms)
    return Rref(ech, universe)


def dimension_reduce_tracked(S, E, echelon=None):
    """Reduce each form of S by the RREF of E.

    Returns ``(forms, origins, echelon)``: the distinct nonzero remainders in
    first-occurrence order and, for each, the index in S it first came from.
    """
    S = list(S)
    universe = _common_universe(list(S) + list(E))
    if echelon is None:
        echelon = Echelon()
        for q in E:
            echelon.add(q.terms)
    seen = {}
    forms, origins = [], []
    for i, f in enumerate(S):
        r = echelon.reduce(dict(f.terms))
        if not r:
            continue
        h = frozenset(r.items())
        if h in seen:
            continue
        seen[h] = len(forms)
        forms.append(LinearForm.wrap(r, universe))
        origins.append(i)
    return forms, origins, echelon


def dimension_reduce(S, E):
    return dimension_reduce_tracked(S, E)[0]


@dataclass
class LPReduction:
    """Result of the slack-variable reduction.

    ``objective`` is F over slack keys ``a_1 .. a_m`` (slack ``a_i`` stands for
    ``inequalities[i-1] >= 0``), ``J1`` the fully reduced slack-only rows.
    When the objective keeps a variable of the entropy/scalar block the
    problem is not provable and ``free`` lists the offending variables.
    """

    objective: LinearForm
    J1: list
    slack_map: dict
    rank: int
    free: tuple = ()
    basis: list = field(default_factory=list)

    @property
    def provable(self):
        return not self.free


def lp_reduce(F0, S):
    """Build G_i = f_i - a_i, take the RREF under x > a, and split it.

    The x-part of the RREF is only needed through its effect on F0, so it is
    computed on the f_i alone with tags recording which a_i each row came
    from.  Inserting the f_i from last to first makes the tags of the
    dependent rows exactly the slack-only RREF rows.
    """
    S = list(S)
    universe = _common_universe(S + [F0])
    m = len(S)
    ech = Echelon(tagged=True)
    j1 = {}
    basis = []
    for i in range(m, 0, -1):
        a = slack_key(i)
        p, t = ech.add(S[i - 1].terms, {a: ONE})
        if p is None:
            j1[a] = t
        else:
            basis.append(i)
    rows = [LinearForm.wrap(j1[k], universe) for k in sorted(j1)]
    r = dict(F0.terms)
    tag = {}
    ech.reduce(r, tag)
    # F0 - sum(rows used) = r  and  tag = -(combination of a_i used)
    free = tuple(universe.variable(k) for k in sorted(r))
    obj = scaled(tag, -ONE)
    if r:
        obj.update(r)
    return LPReduction(
        objective=LinearForm.wrap(obj, universe),
        J1=rows,
        slack_map={i: i - 1 for i in range(1, m + 1)},
        rank=len(ech),
        free=free,
        basis=sorted(basis),
    )


# ---------------------------------------------------------------- Type I / II

@dataclass(frozen=True)
class TypeClass:
    kind: str  # "I", "II" or "neither"
    single: object = None

    @property
    def is_type1(self):
        return self.kind == "I"

    @property
    def is_type2(self):
        return self.kind == "II"


def classify_row(row, nonneg=None):
    """Classify a row dict.  Returns ``("I", None)``, ``("II", key)`` or ``("neither", None)``.

    Rows touching a variable outside ``nonneg`` are never Type I or II.
    """
    pos = neg = 0
    lastpos = lastneg = None
    for k, c in row.items():
        if nonneg is not None and k not in nonneg:
            return "neither", None
        if c > 0:
            pos += 1
            if lastpos is None or k < lastpos:
                lastpos = k
        else:
            neg += 1
            if lastneg is None or k < lastneg:
                lastneg = k
    if not row:
        return "neither", None
    if pos == 0 or neg == 0:
        return "I", None
    if pos == 1 and neg == 1:
        # both terms are "the odd one"; take the leading variable
        return "II", min(lastpos, lastneg)
    if pos == 1:
        return "II", lastpos
    if neg == 1:
        return "II", lastneg
    return "neither", None


def classify_type(f):
    if not f.terms:
        raise ValueError("cannot classify the zero form")
    if not all(is_slack(k) for k in f.terms):
        raise ValueError("classification is defined for slack-only forms")
    kind, single = classify_row(f.terms)
    return TypeClass(kind, f.universe.variable(single) if single is not None else None)


# ---------------------------------------------------------------- problems

@dataclass
class Problem:
    """Prove ``objective >= 0`` subject to ``equalities = 0`` and ``v >= 0`` for v in ``nonneg``.

    ``nonneg`` holds variable keys.  Variables outside it are sign-free.
    """

    objective: LinearForm
    equalities: list
    nonneg: frozenset

    @property
    def universe(self):
        return self.objective.universe

    @property
    def variables(self):
        keys = set(self.objective.terms)
        for e in self.equalities:
            keys.update(e.terms)
        return keys

    def sizes(self):
        """(variables, equalities, inequalities) with the inequality count restricted to used slacks."""
        used = self.variables & set(self.nonneg)
        return len(self.variables), len(self.equalities), len(used)

    def __str__(self):
        u = self.universe
        lines = [f"prove {self.objective} >= 0"]
        for e in self.equalities:
            lines.append(f"  {e} = 0")
        lines.append("  nonneg: " + ", ".join(u.label(k) for k in sorted(self.nonneg)))
        return "\n".join(lines)


class SoundnessError(RuntimeError):
    """An internal consistency check on a certificate failed."""


class WorkSystem:
    """Mutable slack-space system with debt tracking (see module docstring)."""

    def __init__(self, universe, registry=None):
        self.universe = universe
        self.rows = {}
        self.debts = {}
        self.occ = {}
        self.obj = {}
        self.obj_debt = {}
        self.S = set()
        self.zeroed = dict(registry) if registry else {}
        self._next = 0

    @classmethod
    def from_problem(cls, P, registry=None, debts=None):
        ws = cls(P.universe, registry)
        ws.obj = dict(P.objective.terms)
        ws.S = set(P.nonneg)
        for i, e in enumerate(P.equalities):
            ws.add_row(dict(e.terms), dict(debts[i]) if debts else {})
        return ws

    def copy(self):
        ws = WorkSystem(self.universe, self.zeroed)
        ws.rows = {r: dict(v) for r, v in self.rows.items()}
        ws.debts = {r: dict(v) for r, v in self.debts.items()}
        ws.occ = {k: set(v) for k, v in self.occ.items()}
        ws.obj = dict(self.obj)
        ws.obj_debt = dict(self.obj_debt)
        ws.S = set(self.S)
        ws._next = self._next
        return ws

    def derive(self, objective, obj_debt=None):
        """Same constraints, new objective (used for inner provability tests)."""
        ws = self.copy()
        ws.obj = dict(objective)
        ws.obj_debt = dict(obj_debt) if obj_debt else {}
        return ws

    # rows
    def add_row(self, row, debt=None):
        if not row:
            return None
        rid = self._next
        self._next += 1
        self.rows[rid] = row
        self.debts[rid] = debt if debt is not None else {}
        for k in row:
            self.occ.setdefault(k, set()).add(rid)
        return rid

    def remove_row(self, rid):
        row = self.rows.pop(rid)
        self.debts.pop(rid)
        for k in row:
            s = self.occ.get(k)
            if s is not None:
                s.discard(rid)
                if not s:
                    del self.occ[k]
        return row

    def rows_with(self, key):
        return self.occ.get(key, ())

    def _update_row(self, rid, src, c, dsrc):
        row = self.rows[rid]
        added, removed = [], []
        axpy_track(row, src, c, added, removed)
        occ = self.occ
        for k in added:
            occ.setdefault(k, set()).add(rid)
        for k in removed:
            s = occ.get(k)
            if s is not None:
                s.discard(rid)
                if not s:
                    del occ[k]
        if dsrc:
            axpy(self.debts[rid], dsrc, c)
        if not row:
            self.remove_row(rid)

    def substitute(self, key, Y, DY):
        """Eliminate ``key`` everywhere using ``Y`` (a form with Y[key] == 1 and debt DY)."""
        for rid in list(self.occ.get(key, ())):
            if rid in self.rows:
                c = self.rows[rid].get(key)
                if c:
                    self._update_row(rid, Y, -c, DY)
        c = self.obj.get(key)
        if c:
            axpy(self.obj, Y, -c)
            if DY:
                axpy(self.obj_debt, DY, -c)

    def solve_row(self, rid, key):
        """Return ``(Y, DY)``: the row rid scaled so that key has coefficient 1."""
        row = self.rows[rid]
        inv = ONE / row[key]
        return scaled(row, inv), scaled(self.debts[rid], inv)

    def eliminate(self, rid, key):
        """Solve ``key`` from row ``rid``, drop the row, substitute everywhere."""
        Y, DY = self.solve_row(rid, key)
        self.remove_row(rid)
        self.substitute(key, Y, DY)
        return Y, DY

    def zero(self, key):
        """Set the slack ``key`` to zero; debts absorb the dropped terms."""
        for rid in list(self.occ.get(key, ())):
            if rid in self.rows:
                c = self.rows[rid].get(key)
                if c:
                    self._update_row(rid, {key: ONE}, -c, None)
                    if rid in self.debts:
                        d = self.debts[rid]
                        v = d.get(key, 0) - c
                        if v:
                            d[key] = v
                        else:
                            d.pop(key, None)
        c = self.obj.pop(key, None)
        if c:
            v = self.obj_debt.get(key, 0) - c
            if v:
                self.obj_debt[key] = v
            else:
                self.obj_debt.pop(key, None)
        self.S.discard(key)

    # certificates
    def resolve(self, expr):
        """Turn ``expr`` (slack form, possibly negative on zeroed slacks) into a conic form.

        Returns None if a negative coefficient has no zero certificate.
        """
        out = {k: c for k, c in expr.items() if c > 0}
        for k, c in expr.items():
            if c < 0:
                K = self.zeroed.get(k)
                if K is None:
                    return None
                axpy(out, K, -c)
        if any(c < 0 for c in out.values()):
            return None
        return out

    def register_zero(self, key, expr):
        """Record ``-a_key == expr`` (mod the original equalities); expr may need resolving."""
        K = self.resolve(expr)
        if K is None:
            raise SoundnessError(f"cannot certify {self.universe.label(key)} = 0")
        t = K.pop(key, None)
        if t:
            K = scaled(K, ONE / (ONE + t))
        self.zeroed[key] = K
        return K

    def certificate(self, conic, debt):
        """Conic multipliers for F0 given ``F = conic`` and its debt."""
        expr = dict(conic)
        axpy(expr, debt, -ONE)
        return self.resolve(expr)

    def to_problem(self):
        u = self.universe
        eqs = [LinearForm.wrap(dict(self.rows[r]), u) for r in sorted(self.rows, key=lambda r: lex_key(self.rows[r]))]
        return Problem(LinearForm.wrap(dict(self.obj), u), eqs, frozenset(self.S))

    def row_debts_sorted(self):
        order = sorted(self.rows, key=lambda r: lex_key(self.rows[r]))
        return order

    def objective_is_conic(self):
        S = self.S
        return all(c > 0 and k in S for k, c in self.obj.items())

    def sizes(self):
        keys = set(self.obj)
        keys.update(self.occ)
        return len(keys), len(self.rows), len(keys & self.S)


def preprocess_system(ws, log=None):
    """Run the Type I / Type II rewriting to a fixed point, in place.

    Each pass walks a snapshot of the rows in lexicographic order and reads
    each row's current content.  Returns the number of rule firings; with a
    ``log`` list, ``("zero", key)`` and ``("eliminate", key)`` events are
    appended to it.
    """
    fired = 0
    changed = True
    while changed:
        changed = False
        for rid in sorted(ws.rows, key=lambda r: lex_key(ws.rows[r])):
            row = ws.rows.get(rid)
            if row is None:
                continue
            kind, single = classify_row(row, ws.S)
            if kind == "I":
                sign = ONE if next(iter(row.values())) > 0 else -ONE
                f = scaled(row, sign)
                dz = scaled(ws.debts[rid], sign)
                for z in sorted(f):
                    expr = {k: c / f[z] for k, c in f.items() if k != z}
                    axpy(expr, dz, -ONE / f[z])
                    ws.register_zero(z, expr)
                for z in sorted(f):
                    ws.zero(z)
                    if log is not None:
                        log.append(("zero", z))
                changed = True
                fired += 1
            elif kind == "II":
                ws.eliminate(rid, single)
                ws.S.discard(single)
                if log is not None:
                    log.append(("eliminate", single))
                changed = True
                fired += 1
    return fired


def preprocess(P):
    """Type I / Type II preprocessing of a slack-space Problem."""
    ws = WorkSystem.from_problem(P)
    preprocess_system(ws)
    return ws.to_problem()
