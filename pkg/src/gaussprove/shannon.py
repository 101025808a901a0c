"""Information measures: parsing, printing, expansion into joint entropies.

Input format, one statement per line::

    vars X Y Z T
    scalars alpha            # optional
    prove I(X;T) <= I(Y;Z)    # 'prove' is optional: first bare statement is the objective
    given I(X;Z|Y) = 0        # 'given' is optional as well
    markov X -> Y -> Z -> T   # shorthand for the conditional independences of a chain

Measures are ``H(A,B)``, ``H(A|B)``, ``I(A;B)``, ``I(A,B;C|D)`` and bare scalar
names; terms take rational coefficients (``2 H(X)``, ``1/2*I(X;Y)``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from gmpy2 import mpq

from .algebra import ONE, LinearForm, Universe, Variable, format_rational, MAX_RANDOM_VARIABLES


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class UndeclaredNameError(ParseError):
    pass


class MeasureError(ValueError):
    """An information measure that cannot be expanded (empty argument, bad chain...)."""


@dataclass(frozen=True)
class Measure:
    """``kind`` is "H", "I" or "scalar".

    For H, ``args`` holds one group; for I, two.  ``cond`` is the
    conditioning group (possibly empty).  Groups are tuples of names.
    """

    kind: str
    args: tuple
    cond: tuple = ()

    def __str__(self):
        if self.kind == "scalar":
            return self.args[0]
        body = ";".join(",".join(map(str, g)) for g in self.args)
        if self.cond:
            body += "|" + ",".join(map(str, self.cond))
        return f"{self.kind}({body})"


@dataclass(frozen=True)
class Term:
    coef: object
    measure: Measure


@dataclass(frozen=True)
class Statement:
    lhs: tuple
    rel: str
    rhs: tuple

    @property
    def is_equality(self):
        return self.rel == "="

    def __str__(self):
        return f"{format_expr(self.lhs)} {self.rel} {format_expr(self.rhs)}"


@dataclass
class ProblemStatement:
    variables: tuple
    scalars: tuple
    objective: Statement
    constraints: list

    def universe(self):
        return Universe(len(self.variables), self.scalars, self.variables)

    @property
    def equalities(self):
        return [s for s in self.constraints if s.rel == "="]

    @property
    def inequalities(self):
        return [s for s in self.constraints if s.rel != "="]

    def __eq__(self, other):
        return (
            isinstance(other, ProblemStatement)
            and self.variables == other.variables
            and self.scalars == other.scalars
            and self.objective == other.objective
            and list(self.constraints) == list(other.constraints)
        )


def format_expr(terms):
    if not terms:
        return "0"
    out = []
    for t in terms:
        c = t.coef
        neg = c < 0
        a = -c if neg else c
        body = str(t.measure) if a == 1 else f"{format_rational(a)} {t.measure}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def format_problem(ps):
    lines = ["vars " + " ".join(ps.variables)]
    if ps.scalars:
        lines.append("scalars " + " ".join(ps.scalars))
    lines.append(f"prove {ps.objective}")
    for s in ps.constraints:
        lines.append(f"given {s}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>->|>=|<=|=|\(|\)|,|;|\||\+|-|\*))"
)


def _tokenize(text, lineno):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    toks.append(("end", "", n + 1))
    return toks


class _Line:
    def __init__(self, text, lineno, rvs, scalars):
        self.toks = _tokenize(text, lineno)
        self.i = 0
        self.lineno = lineno
        self.rvs = rvs
        self.scalars = scalars

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.lineno, tok[2])

    def expect(self, value):
        t = self.next()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of line'!r}", self.lineno, t[2])
        return t

    def group(self):
        names = []
        while True:
            t = self.next()
            if t[0] != "name":
                raise ParseError(f"expected a random variable name, found {t[1] or 'end of line'!r}", self.lineno, t[2])
            if t[1] not in self.rvs:
                raise UndeclaredNameError(f"undeclared random variable {t[1]!r}", self.lineno, t[2])
            names.append(t[1])
            if self.peek()[1] != ",":
                return tuple(names)
            self.next()

    def measure(self):
        t = self.next()
        if t[0] != "name":
            raise ParseError(f"expected a measure, found {t[1] or 'end of line'!r}", self.lineno, t[2])
        if t[1] in ("H", "I") and self.peek()[1] == "(":
            self.next()
            args = [self.group()]
            if t[1] == "I":
                self.expect(";")
                args.append(self.group())
            cond = ()
            if self.peek()[1] == "|":
                self.next()
                cond = self.group()
            self.expect(")")
            return Measure(t[1], tuple(args), cond)
        if t[1] in self.scalars:
            return Measure("scalar", (t[1],))
        raise UndeclaredNameError(f"undeclared name {t[1]!r}", self.lineno, t[2])

    def expr(self):
        terms = []
        first = True
        while True:
            sign = ONE
            t = self.peek()
            if t[1] in ("+", "-"):
                self.next()
                if t[1] == "-":
                    sign = -ONE
            elif not first:
                return tuple(terms)
            coef = None
            if self.peek()[0] == "num":
                coef = mpq(self.next()[1])
                if self.peek()[1] == "*":
                    self.next()
                elif self.peek()[0] != "name":
                    if coef != 0:
                        raise self.error("constant terms are not allowed (forms are homogeneous)")
                    first = False
                    continue
            m = self.measure()
            c = sign * (coef if coef is not None else ONE)
            if c:
                terms.append(Term(c, m))
            first = False

    def statement(self):
        lhs = self.expr()
        t = self.next()
        if t[1] not in (">=", "<=", "="):
            raise ParseError(f"expected '>=', '<=' or '=', found {t[1] or 'end of line'!r}", self.lineno, t[2])
        rhs = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return Statement(lhs, t[1], rhs)

    def chain(self):
        groups = [self.group()]
        while self.peek()[1] == "->":
            self.next()
            groups.append(self.group())
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return groups


def parse(text):
    """Parse the problem format described in the module docstring."""
    rvs, scalars = [], []
    objective = None
    constraints = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        head = stripped.split(None, 1)[0]
        offset = len(line) - len(line.lstrip())
        if head in ("vars", "scalars"):
            rest = line[offset + len(head):]
            for m in re.finditer(r"\S+", rest):
                name = m.group(0).rstrip(",")
                col = offset + len(head) + m.start() + 1
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or name in ("H", "I"):
                    raise ParseError(f"invalid name {name!r}", lineno, col)
                if name in rvs or name in scalars:
                    raise ParseError(f"duplicate declaration of {name!r}", lineno, col)
                (rvs if head == "vars" else scalars).append(name)
            if len(rvs) > MAX_RANDOM_VARIABLES:
                raise ParseError(f"at most {MAX_RANDOM_VARIABLES} random variables are supported", lineno, 1)
            continue
        pad = " " * offset
        keyword = None
        body = line
        if head in ("prove", "given", "markov"):
            keyword = head
            body = pad + " " * len(head) + line[offset + len(head):]
        p = _Line(body, lineno, set(rvs), set(scalars))
        if keyword == "markov":
            for s in markov_statements(p.chain()):
                constraints.append(s)
            continue
        s = p.statement()
        if keyword == "prove" or (keyword is None and objective is None):
            if objective is not None:
                raise ParseError("more than one objective", lineno, offset + 1)
            objective = s
        else:
            constraints.append(s)
    if objective is None:
        raise ParseError("no objective statement", None, None)
    if not rvs:
        raise ParseError("no random variables declared ('vars ...')", None, None)
    return ProblemStatement(tuple(rvs), tuple(scalars), objective, constraints)


# ---------------------------------------------------------------- expansion

def _mask(group, index):
    m = 0
    for name in group:
        m |= 1 << (index[name] - 1) if isinstance(name, str) else 1 << (name - 1)
    return m


def _h(terms, universe, mask, c):
    if mask:
        k = universe.entropy_key(mask)
        v = terms.get(k, 0) + c
        if v:
            terms[k] = v
        else:
            terms.pop(k, None)


def _expand_into(terms, m, universe, c, index):
    if m.kind == "scalar":
        k = universe.key(Variable.aux(m.args[0]))
        v = terms.get(k, 0) + c
        if v:
            terms[k] = v
        else:
            terms.pop(k, None)
        return
    for g in m.args:
        if not g:
            raise MeasureError(f"empty argument in {m}")
    K = _mask(m.cond, index)
    if m.kind == "H":
        G = _mask(m.args[0], index)
        _h(terms, universe, G | K, c)
        _h(terms, universe, K, -c)
    elif m.kind == "I":
        G = _mask(m.args[0], index)
        G2 = _mask(m.args[1], index)
        _h(terms, universe, G | K, c)
        _h(terms, universe, G2 | K, c)
        _h(terms, universe, G | G2 | K, -c)
        _h(terms, universe, K, -c)
    else:
        raise MeasureError(f"unknown measure kind {m.kind!r}")


def _index(universe):
    return {name: i for i, name in enumerate(universe.names, 1)}


def expand_measure(m, universe):
    """Joint-entropy form of one measure; groups may hold names or 1-based indices."""
    terms = {}
    _expand_into(terms, m, universe, ONE, _index(universe))
    return LinearForm.wrap(terms, universe)


def expand_expr(terms_, universe, index=None):
    index = index or _index(universe)
    terms = {}
    for t in terms_:
        _expand_into(terms, t.measure, universe, mpq(t.coef), index)
    return terms


def expand_statement(s, universe):
    """Return ``(form, is_equality)`` with the statement read as ``form >= 0`` or ``form = 0``."""
    index = _index(universe)
    L = expand_expr(s.lhs, universe, index)
    R = expand_expr(s.rhs, universe, index)
    if s.rel == "<=":
        L, R = R, L
    for k, c in R.items():
        v = L.get(k, 0) - c
        if v:
            L[k] = v
        else:
            L.pop(k, None)
    return LinearForm.wrap(L, universe), s.rel == "="


# ---------------------------------------------------------------- elemental inequalities

def elemental_count(n):
    if n == 1:
        return 1
    return n + (n * (n - 1) // 2) * (1 << (n - 2))


def _elemental_specs(n):
    """Yield ``(i, j, K)``: j == 0 means H(X_i | rest), otherwise I(X_i; X_j | X_K)."""
    full = (1 << n) - 1
    for i in range(1, n + 1):
        yield i, 0, full & ~(1 << (i - 1))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            rest = [b for b in range(n) if b not in (i - 1, j - 1)]
            Ks = []
            for r in range(len(rest) + 1):
                for sub in combinations(rest, r):
                    m = 0
                    for b in sub:
                        m |= 1 << b
                    Ks.append(m)
            Ks.sort()
            for K in Ks:
                yield i, j, K


def elemental_inequalities(n, universe=None):
    """The elemental forms for n random variables in canonical order."""
    if not isinstance(n, int) or n < 1 or n > MAX_RANDOM_VARIABLES:
        raise MeasureError(f"number of random variables must be in 1..{MAX_RANDOM_VARIABLES}")
    if universe is None:
        universe = Universe(n)
    elif universe.n != n:
        raise MeasureError("universe has a different number of random variables")
    rank = universe.entropy_keys
    one, mone = mpq(1), mpq(-1)
    full = (1 << n) - 1
    out = []
    wrap = LinearForm.wrap
    if n == 1:
        return [wrap({rank[1]: one}, universe)]
    for i, j, K in _elemental_specs(n):
        if j == 0:
            out.append(wrap({rank[full]: one, rank[K]: mone}, universe))
            continue
        bi, bj = 1 << (i - 1), 1 << (j - 1)
        t = {rank[bi | K]: one, rank[bj | K]: one, rank[bi | bj | K]: mone}
        if K:
            t[rank[K]] = mone
        out.append(wrap(t, universe))
    return out


def elemental_measures(n, names=None):
    """Measures matching :func:`elemental_inequalities` entry by entry."""
    names = names or tuple(f"X{i}" for i in range(1, n + 1))

    def grp(mask):
        return tuple(names[b] for b in range(n) if mask >> b & 1)

    if n == 1:
        return [Measure("H", ((names[0],),))]
    out = []
    for i, j, K in _elemental_specs(n):
        if j == 0:
            out.append(Measure("H", ((names[i - 1],),), grp(K)))
        else:
            out.append(Measure("I", ((names[i - 1],), (names[j - 1],)), grp(K)))
    return out


# ---------------------------------------------------------------- Markov chains

def markov_statements(chain):
    """``Z1 -> Z2 -> ... -> Zk`` as the statements I(Z1..Z_{i-1}; Z_{i+1} | Z_i) = 0."""
    chain = [tuple(g) for g in chain]
    for g in chain:
        if not g:
            raise MeasureError("empty group in Markov chain")
    for a, b in zip(chain, chain[1:]):
        if set(a) & set(b):
            raise MeasureError("adjacent groups of a Markov chain overlap")
    out = []
    for i in range(1, len(chain) - 1):
        past = tuple(x for g in chain[:i] for x in g)
        m = Measure("I", (past, chain[i + 1]), chain[i])
        out.append(Statement((Term(ONE, m),), "=", ()))
    return out


def markov_to_constraints(chain, universe):
    """Equality forms for a Markov chain; groups hold names or 1-based indices."""
    return [expand_statement(s, universe)[0] for s in markov_statements(chain)]
