"""Brute-force ground truth for small implication questions.

``fm_oracle(F, ineqs, eqs)`` decides whether ``g >= 0`` for all g in ineqs and
``e = 0`` for all e in eqs imply ``F >= 0``.  The system is homogeneous, so F
fails to be implied iff ``F <= -1`` is consistent with the constraints; that
is settled by substituting the equalities away and running Fourier-Motzkin
elimination with Chernikov's rule to prune redundant combinations.

Nothing in the prover imports this module.  It uses ``fractions.Fraction``
rather than gmpy2 so its arithmetic is independent of the code under test.
"""
from __future__ import annotations

from fractions import Fraction


class OracleTooLargeError(ValueError):
    pass


MAX_VARIABLES = 12
MAX_CONSTRAINTS = 200_000


def _terms(f):
    d = getattr(f, "terms", f)
    return {k: Fraction(int(c.numerator), int(c.denominator)) for k, c in d.items() if c}


def _substitute(row, subs):
    for k in [k for k in row if k in subs]:
        c = row.pop(k, None)
        if not c:
            continue
        for j, v in subs[k].items():
            x = row.get(j, 0) + c * v
            if x:
                row[j] = x
            else:
                row.pop(j, None)
    return row


def _solve_equalities(eqs):
    """Solve the (homogeneous) equalities for some variables in terms of the rest."""
    subs = {}
    for e in eqs:
        e = _substitute(dict(e), subs)
        if not e:
            continue
        k = min(e)
        c = e.pop(k)
        expr = {j: -v / c for j, v in e.items()}
        for s in subs.values():
            _substitute(s, {k: expr})
        subs[k] = expr
    return subs


def _normalize(coeffs, const):
    m = max(abs(v) for v in coeffs.values())
    return tuple(sorted((k, v / m) for k, v in coeffs.items())), const / m


def _consistent(cons):
    """Is ``{sum c x + d >= 0}`` feasible?  cons: list of (coeffs, d, history)."""
    live = {}
    for coeffs, d, hist in cons:
        if not coeffs:
            if d < 0:
                return False
            continue
        key = _normalize(coeffs, d)
        if key not in live or len(hist) < len(live[key][2]):
            live[key] = (coeffs, d, hist)
    cur = list(live.values())
    step = 0
    while cur:
        vs = set()
        for coeffs, _, _ in cur:
            vs.update(coeffs)
        best = None
        for v in sorted(vs):
            pos = sum(1 for c, _, _ in cur if c.get(v, 0) > 0)
            neg = sum(1 for c, _, _ in cur if c.get(v, 0) < 0)
            score = pos * neg - pos - neg
            if best is None or score < best[0]:
                best = (score, v)
        v = best[1]
        step += 1
        P = [t for t in cur if t[0].get(v, 0) > 0]
        N = [t for t in cur if t[0].get(v, 0) < 0]
        nxt = {}
        for t in cur:
            if v not in t[0]:
                nxt[_normalize(t[0], t[1])] = t
        for cp, dp, hp in P:
            a = cp[v]
            for cn, dn, hn in N:
                hist = hp | hn
                if len(hist) > step + 1:
                    continue  # Chernikov: such a combination is implied by others
                b = -cn[v]
                coeffs = {}
                for k, x in cp.items():
                    coeffs[k] = b * x
                for k, x in cn.items():
                    y = coeffs.get(k, 0) + a * x
                    if y:
                        coeffs[k] = y
                    else:
                        coeffs.pop(k, None)
                coeffs.pop(v, None)
                d = b * dp + a * dn
                if not coeffs:
                    if d < 0:
                        return False
                    continue
                key = _normalize(coeffs, d)
                old = nxt.get(key)
                if old is None or len(hist) < len(old[2]):
                    nxt[key] = (coeffs, d, hist)
        if len(nxt) > MAX_CONSTRAINTS:
            raise OracleTooLargeError(f"Fourier-Motzkin blew up to {len(nxt)} constraints")
        cur = list(nxt.values())
    return True


def fm_oracle(F, ineqs, eqs=(), max_variables=MAX_VARIABLES):
    """True iff ``ineqs >= 0`` and ``eqs = 0`` imply ``F >= 0``.

    Arguments are LinearForms or plain dicts (key -> rational).
    """
    F = _terms(F)
    ineqs = [_terms(g) for g in ineqs]
    eqs = [_terms(e) for e in eqs]
    names = set(F)
    for r in ineqs + eqs:
        names.update(r)
    if len(names) > max_variables:
        raise OracleTooLargeError(f"{len(names)} variables exceeds the oracle limit of {max_variables}")
    subs = _solve_equalities(eqs)
    cons = []
    for i, g in enumerate(ineqs):
        cons.append((_substitute(dict(g), subs), Fraction(0), frozenset([i])))
    negF = {k: -v for k, v in F.items()}
    cons.append((_substitute(negF, subs), Fraction(-1), frozenset([len(ineqs)])))
    return not _consistent(cons)


def fm_problem(P):
    """Oracle verdict for a slack-space Problem: objective >= 0 given the equalities and signs."""
    ineqs = [{k: 1} for k in sorted(P.nonneg)]
    return fm_oracle(P.objective, ineqs, P.equalities)


__all__ = ["MAX_VARIABLES", "OracleTooLargeError", "fm_oracle", "fm_problem"]
