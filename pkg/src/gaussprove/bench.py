"""Built-in benchmark problems and worked-example fixtures."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from gmpy2 import mpq

from .algebra import LinearForm, Universe, Variable, slack_key
from .elimination import Problem
from .shannon import Measure, ProblemStatement, Statement, Term, format_problem, parse


class UnknownFixtureError(KeyError):
    pass


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1, 2, 3, 4}, stored as the images of 1..4."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != [1, 2, 3, 4]:
            raise ValueError(f"{self.images!r} is not a permutation of 1..4")

    def __call__(self, i):
        return self.images[i - 1]

    def compose(self, other):
        """``(self o other)(i) = self(other(i))``."""
        return Permutation(tuple(self(other(i)) for i in range(1, 5)))

    def inverse(self):
        inv = [0] * 4
        for i, j in enumerate(self.images, 1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    @classmethod
    def identity(cls):
        return cls((1, 2, 3, 4))

    @classmethod
    def all(cls):
        return [cls(p) for p in permutations((1, 2, 3, 4))]


def apply_permutation(pi, rv):
    """Map ``("W", i)`` to ``("W", pi(i))`` and ``("S", i, j)`` to ``("S", pi(i), pi(j))``.

    String names ``"W2"`` / ``"S31"`` are accepted too.
    """
    if isinstance(rv, str):
        return rv_name(apply_permutation(pi, rv_id(rv)))
    if rv[0] == "W":
        return ("W", pi(rv[1]))
    if rv[0] == "S":
        return ("S", pi(rv[1]), pi(rv[2]))
    raise ValueError(f"not a storage random variable: {rv!r}")


def rv_name(rv):
    return "W%d" % rv[1] if rv[0] == "W" else "S%d%d" % (rv[1], rv[2])


def rv_id(name):
    if name[0] == "W" and len(name) == 2:
        return ("W", int(name[1]))
    if name[0] == "S" and len(name) == 3:
        return ("S", int(name[1]), int(name[2]))
    raise ValueError(f"not a storage random variable: {name!r}")


@dataclass
class NamedProblem:
    """A benchmark: either an information-measure statement or a slack-space system."""

    name: str
    statement: ProblemStatement | None = None
    problem: Problem | None = None
    expected: dict = field(default_factory=dict)

    def to_text(self):
        if self.statement is None:
            raise ValueError(f"{self.name} is a slack-space system with no text form")
        return format_problem(self.statement)


def _H(*groups, cond=()):
    return Measure("H", tuple(tuple(g) for g in groups), tuple(cond))


def _eq(lhs, rhs):
    return Statement(tuple(lhs), "=", tuple(rhs))


def _t(m, c=1):
    return Term(mpq(c), m)


# ---------------------------------------------------------------- DFZ

DFZ_TEXT = """\
vars A B C D W X Y Z
prove I(W;A,B,C,D) >= I(B;D,X,Z)
given I(W;A,B,C,D) = I(X;A,B,W)
given I(W;A,B,C,D) = I(Y;B,C,X)
given I(W;A,B,C,D) = I(Z;C,D,Y)
given I(A;B,C,D,Z) = I(B;D,X,Z)
given I(B;A,D,W,Z) = I(B;D,X,Z)
given I(C;A,D,W,Z) = I(B;D,X,Z)
given I(D;A,B,C,Y) = I(B;D,X,Z)
given I(C;A,W,Y) = I(B;D,X,Z)
given I(B;A) = 0
given I(C;A,B) = 0
given I(D;A,B,C) = 0
given I(X;C,D|A,B,W) = 0
given I(Y;A,D,W|B,C,X) = 0
given I(Z;A,B,W,X|C,D,Y) = 0
"""


def dfz_problem():
    ps = parse(DFZ_TEXT)
    return NamedProblem("dfz", ps, expected={
        "variables": 255,
        "equalities": 14,
        "inequalities": 1800,
        "reduced_inequalities": 1793,
        "J1": 1559,
        "verdict": "PROVED",
        "lp_fallback": False,
    })


# ---------------------------------------------------------------- Tian (4,3,3)

# numbering of the twelve random variables, h_{2,5} is H(W2, S31) etc.
TIAN_VARIABLES = (
    ("W", 1), ("W", 2), ("W", 4),
    ("S", 2, 1), ("S", 3, 1), ("S", 4, 1),
    ("S", 1, 2), ("S", 3, 2), ("S", 4, 2),
    ("S", 1, 4), ("S", 2, 4), ("S", 3, 4),
)
TIAN_SCALARS = ("alpha", "beta", "B")


def _tian_masks():
    index = {rv: b for b, rv in enumerate(TIAN_VARIABLES)}
    maps = []
    for pi in Permutation.all():
        img = []
        for rv in TIAN_VARIABLES:
            img.append(index.get(apply_permutation(pi, rv)))
        maps.append(img)
    return maps


def tian_symmetry_pairs():
    """Ordered pairs ``(T, pi(T))`` of distinct subsets that stay inside the 12 variables."""
    maps = _tian_masks()
    seen = set()
    out = []
    for T in range(1, 1 << 12):
        bits = [b for b in range(12) if T >> b & 1]
        for img in maps:
            U = 0
            for b in bits:
                j = img[b]
                if j is None:
                    break
                U |= 1 << j
            else:
                if U != T and (U, T) not in seen:
                    seen.add((U, T))
                    out.append((U, T))
    return out


def tian_problem():
    names = tuple(rv_name(rv) for rv in TIAN_VARIABLES)

    def grp(mask):
        return tuple(names[b] for b in range(12) if mask >> b & 1)

    cons = []
    for U, T in tian_symmetry_pairs():
        cons.append(_eq([_t(_H(grp(U)))], [_t(_H(grp(T)))]))
    # functional dependence of S_ij on W_i
    for rv in TIAN_VARIABLES:
        if rv[0] == "S" and ("W", rv[1]) in TIAN_VARIABLES:
            cons.append(_eq([_t(_H([rv_name(rv)], cond=[rv_name(("W", rv[1]))]))], []))
    # W_j is recoverable from the S_ij it receives
    for w in TIAN_VARIABLES[:3]:
        j = w[1]
        src = [rv_name(("S", i, j)) for i in range(1, 5) if i != j]
        cons.append(_eq([_t(_H([rv_name(w)], cond=src))], []))
    # any set holding all three W's has entropy B
    rest = names[3:]
    for m in range(1 << 9):
        A = names[:3] + tuple(rest[b] for b in range(9) if m >> b & 1)
        cons.append(_eq([_t(_H(A))], [_t(Measure("scalar", ("B",)))]))
    for n in names[:3]:
        cons.append(Statement((_t(_H([n])),), "<=", (_t(Measure("scalar", ("alpha",))),)))
    for n in names[3:]:
        cons.append(Statement((_t(_H([n])),), "<=", (_t(Measure("scalar", ("beta",))),)))
    obj = Statement(
        (_t(Measure("scalar", ("alpha",)), 4), _t(Measure("scalar", ("beta",)), 6)),
        ">=",
        (_t(Measure("scalar", ("B",)), 3),),
    )
    ps = ProblemStatement(names, TIAN_SCALARS, obj, cons)
    return NamedProblem("tian", ps, expected={
        "variables": 4098,
        "equalities": 22945,
        "inequalities": 67608,
        "reduced_inequalities": 10189,
        "J1": 9859,
        "verdict": "PROVED",
        "minimal_variables": 101,
        "minimal_inequalities": 649,
    })


# ---------------------------------------------------------------- worked examples

def _slack_problem(F, E, m):
    U = Universe()

    def form(d):
        return LinearForm({Variable.slack(i): mpq(c) for i, c in d.items()}, U)

    return Problem(form(F), [form(e) for e in E], frozenset(slack_key(i) for i in range(1, m + 1)))


def example_III_4():
    P = _slack_problem({1: 1, 2: 2, 3: -1}, [{1: 1, 2: 1, 3: -1, 4: -1, 5: -1}, {1: 1, 4: 1}], 5)
    return NamedProblem("example_III_4", problem=P, expected={"verdict": "PROVED"})


def example_III_5():
    P = _slack_problem(
        {1: mpq(-1, 2), 2: -1, 3: 1, 4: 1, 5: 1, 6: -1, 7: 1, 9: 1},
        [
            {1: 1, 2: 1, 3: -1, 4: -1},
            {1: 1, 2: 1, 4: -1, 9: 1, 10: 1, 11: -1, 12: -1},
            {6: 1, 9: -1, 10: -1, 11: 1, 12: 1},
            {5: 1, 6: -2},
            {7: 1, 8: 1},
        ],
        12,
    )
    return NamedProblem("example_III_5", problem=P, expected={"verdict": "PROVED"})


EXAMPLE_IV_1_TEXT = """\
vars X1 X2 X3 X4
prove H(X1) >= H(X4)
given I(X1;X4) = 0
given I(X2;X4) = 0
given I(X3;X4) = 0
given H(X4|X1,X2) = 0
given H(X4|X1,X3) = 0
given H(X4|X2,X3) = 0
"""

DATA_PROCESSING_TEXT = """\
vars X Y Z T
prove I(X;T) <= I(Y;Z)
markov X -> Y -> Z -> T
"""


def example_IV_1():
    return NamedProblem("example_IV_1", parse(EXAMPLE_IV_1_TEXT), expected={
        "verdict": "PROVED", "elemental": 28, "reduced_inequalities": 18, "J1": 9,
    })


def data_processing():
    return NamedProblem("data_processing", parse(DATA_PROCESSING_TEXT), expected={"verdict": "PROVED"})


FIXTURES = {
    "example_III_4": example_III_4,
    "example_III_5": example_III_5,
    "example_IV_1": example_IV_1,
    "data_processing": data_processing,
}

BENCHMARKS = {"dfz": dfz_problem, "tian": tian_problem, **FIXTURES}


def fixture(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise UnknownFixtureError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def benchmark(name):
    try:
        return BENCHMARKS[name]()
    except KeyError:
        raise UnknownFixtureError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None
