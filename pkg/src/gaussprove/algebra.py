"""Exact sparse linear forms over an ordered variable universe.

Every variable is mapped to an integer key and a *smaller key means a
higher position in the elimination order*.  Keys are laid out as::

    auxiliary scalars        0 .. len(aux) - 1
    joint entropies h_S      len(aux) .. len(aux) + 2**n - 2   (larger sets first)
    slack variables a_i      SLACK_BASE + i
    combination coeffs p_l   COMB_BASE + l

so the slack and coefficient blocks are shared by every universe and the
pivot of a row is simply its minimum key.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .kernels import axpy, scaled

SLACK_BASE = 1 << 40
COMB_BASE = 1 << 50
_END = 1 << 62
MAX_RANDOM_VARIABLES = 20

ZERO = mpq(0)
ONE = mpq(1)


class UniverseError(ValueError):
    """A variable or form does not belong to the universe at hand."""


class MissingVariableError(KeyError):
    pass


class CyclicSubstitutionError(ValueError):
    pass


def rational(x):
    """Coerce ints, strings like ``"-3/2"``, Fractions and mpqs to mpq."""
    if isinstance(x, float):
        raise TypeError("floating point coefficients are not allowed")
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def format_rational(q):
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Variable:
    """A coordinate of the universe.

    ``kind`` is one of ``"h"`` (joint entropy, payload = nonempty bitmask with
    bit ``i-1`` standing for X_i), ``"aux"`` (named scalar), ``"a"`` (slack,
    payload >= 1) or ``"p"`` (combination coefficient, payload >= 1).
    """

    kind: str
    payload: object

    def __post_init__(self):
        if self.kind == "h":
            if not isinstance(self.payload, int) or self.payload <= 0:
                raise ValueError("joint entropy needs a nonempty subset")
        elif self.kind in ("a", "p"):
            if not isinstance(self.payload, int) or self.payload < 1:
                raise ValueError(f"{self.kind} index must be >= 1")
        elif self.kind == "aux":
            if not isinstance(self.payload, str) or not self.payload:
                raise ValueError("auxiliary scalar needs a name")
        else:
            raise ValueError(f"unknown variable kind {self.kind!r}")

    @classmethod
    def entropy(cls, subset):
        if isinstance(subset, int):
            return cls("h", subset)
        mask = 0
        for i in subset:
            mask |= 1 << (i - 1)
        return cls("h", mask)

    @classmethod
    def aux(cls, name):
        return cls("aux", name)

    @classmethod
    def slack(cls, i):
        return cls("a", i)

    @classmethod
    def coeff(cls, i):
        return cls("p", i)

    @property
    def subset(self):
        """Subscript set of a joint entropy, as a sorted tuple of 1-based indices."""
        return mask_indices(self.payload)


def mask_indices(mask):
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@lru_cache(maxsize=None)
def entropy_order(n):
    """Return ``(rank_of_mask, mask_of_rank)`` for the joint entropies of n variables.

    Higher-cardinality subsets come first; equal-size subsets compare on
    their ascending index sequences, the one with the larger index at the
    first difference being higher.
    """
    masks = sorted(range(1, 1 << n), key=lambda m: (-bin(m).count("1"), tuple(-i for i in mask_indices(m))))
    rank = [-1] * (1 << n)
    for r, m in enumerate(masks):
        rank[m] = r
    return rank, masks


class Universe:
    """Ordered coordinates: joint entropies of n random variables plus scalars."""

    def __init__(self, n=0, aux=(), names=None):
        if n < 0 or n > MAX_RANDOM_VARIABLES:
            raise UniverseError(f"number of random variables must be in 0..{MAX_RANDOM_VARIABLES}")
        self.n = n
        self.aux = tuple(aux)
        if len(set(self.aux)) != len(self.aux):
            raise UniverseError("duplicate auxiliary scalar")
        self.names = tuple(names) if names is not None else tuple(f"X{i}" for i in range(1, n + 1))
        if len(self.names) != n:
            raise UniverseError("need one name per random variable")
        self.num_entropies = (1 << n) - 1
        self._aux_index = {a: i for i, a in enumerate(self.aux)}
        if n:
            rank, self._masks = entropy_order(n)
        else:
            rank, self._masks = [-1], []
        off = len(self.aux)
        # key of each subset mask; scalars sit above every joint entropy
        self.entropy_keys = [r + off for r in rank]

    def __eq__(self, other):
        return isinstance(other, Universe) and self.n == other.n and self.aux == other.aux

    def __hash__(self):
        return hash((self.n, self.aux))

    def __repr__(self):
        return f"Universe(n={self.n}, aux={self.aux!r})"

    @property
    def x_limit(self):
        """First key past the scalar and entropy blocks."""
        return self.num_entropies + len(self.aux)

    def entropy_key(self, mask):
        if mask <= 0 or mask > self.num_entropies:
            raise UniverseError(f"subset {mask_indices(mask)} outside of N_{self.n}")
        return self.entropy_keys[mask]

    def key(self, var):
        if isinstance(var, int):
            self.variable(var)
            return var
        if var.kind == "h":
            return self.entropy_key(var.payload)
        if var.kind == "aux":
            try:
                return self._aux_index[var.payload]
            except KeyError:
                raise UniverseError(f"unknown scalar {var.payload!r}") from None
        if var.kind == "a":
            return SLACK_BASE + var.payload
        return COMB_BASE + var.payload

    def variable(self, key):
        na = len(self.aux)
        if 0 <= key < na:
            return Variable("aux", self.aux[key])
        if na <= key < self.x_limit:
            return Variable("h", self._masks[key - na])
        if SLACK_BASE < key < COMB_BASE:
            return Variable("a", key - SLACK_BASE)
        if COMB_BASE < key < _END:
            return Variable("p", key - COMB_BASE)
        raise UniverseError(f"key {key} is not a coordinate of {self!r}")

    def mask(self, key):
        return self._masks[key - len(self.aux)]

    def is_entropy(self, key):
        return len(self.aux) <= key < self.x_limit

    def label(self, key):
        na = len(self.aux)
        if 0 <= key < na:
            return self.aux[key]
        if key < self.x_limit:
            return "h_{" + ",".join(str(i) for i in mask_indices(self._masks[key - na])) + "}"
        if SLACK_BASE < key < COMB_BASE:
            return f"a_{key - SLACK_BASE}"
        if COMB_BASE < key < _END:
            return f"p_{key - COMB_BASE}"
        raise UniverseError(f"key {key} is not a coordinate of {self!r}")


def is_slack(key):
    return SLACK_BASE < key < COMB_BASE


def slack_key(i):
    return SLACK_BASE + i


def slack_index(key):
    return key - SLACK_BASE


def format_terms(terms, label):
    """Render a term dict as ``h_{1,2} - 1/2 a_3``."""
    if not terms:
        return "0"
    parts = []
    for k in sorted(terms):
        c = terms[k]
        name = label(k)
        if c == 1:
            body, neg = name, False
        elif c == -1:
            body, neg = name, True
        else:
            neg = c < 0
            body = f"{format_rational(-c if neg else c)} {name}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


class LinearForm:
    """Immutable homogeneous linear form with exact rational coefficients."""

    __slots__ = ("terms", "universe", "_hash")

    def __init__(self, terms=None, universe=None):
        self.universe = universe if universe is not None else Universe()
        clean = {}
        if terms:
            for var, c in dict(terms).items():
                c = rational(c)
                if c:
                    k = self.universe.key(var)
                    c = clean.get(k, ZERO) + c
                    if c:
                        clean[k] = c
                    else:
                        clean.pop(k, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def wrap(cls, terms, universe):
        """Adopt an already-normalized key->mpq dict without copying."""
        self = cls.__new__(cls)
        self.terms = terms
        self.universe = universe
        self._hash = None
        return self

    def _check(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        if other.universe != self.universe:
            raise UniverseError("forms live in different universes")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        axpy(out, other.terms, ONE)
        return LinearForm.wrap(out, self.universe)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        axpy(out, other.terms, -ONE)
        return LinearForm.wrap(out, self.universe)

    def __neg__(self):
        return LinearForm.wrap(scaled(self.terms, -ONE), self.universe)

    def __mul__(self, c):
        c = rational(c)
        if not c:
            return LinearForm.wrap({}, self.universe)
        return LinearForm.wrap(scaled(self.terms, c), self.universe)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (ONE / rational(c))

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.universe == other.universe and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.universe, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, var):
        return self._key(var) in self.terms

    def _key(self, var):
        return var if isinstance(var, int) else self.universe.key(var)

    def coefficient(self, var):
        return self.terms.get(self._key(var), ZERO)

    def keys(self):
        """Variable keys in order (highest first)."""
        return sorted(self.terms)

    @property
    def variables(self):
        """The variable sequence of the form."""
        return tuple(self.universe.variable(k) for k in sorted(self.terms))

    @property
    def coefficients(self):
        """The coefficient sequence; ``[0]`` for the zero form."""
        if not self.terms:
            return (ZERO,)
        return tuple(self.terms[k] for k in sorted(self.terms))

    @property
    def leading_key(self):
        return min(self.terms) if self.terms else None

    def __str__(self):
        return format_terms(self.terms, self.universe.label)

    def __repr__(self):
        return f"LinearForm({self})"


def var_form(var, universe, c=1):
    return LinearForm({var: c}, universe)


def add(f, g):
    return f + g


def solve_for(f, v):
    """Return A with f = 0 <=> v = A (v not in A)."""
    k = f._key(v)
    c = f.terms.get(k)
    if c is None:
        raise MissingVariableError(f"{f.universe.label(k)} does not occur in {f}")
    rest = dict(f.terms)
    del rest[k]
    return LinearForm.wrap(scaled(rest, -ONE / c), f.universe)


def substitute(target, v, replacement):
    """Replace every occurrence of v in ``target`` by ``replacement``."""
    if target.universe != replacement.universe:
        raise UniverseError("forms live in different universes")
    k = target._key(v)
    if k in replacement.terms:
        raise CyclicSubstitutionError(f"{target.universe.label(k)} occurs in its own replacement")
    c = target.terms.get(k)
    if c is None:
        return target
    out = dict(target.terms)
    del out[k]
    axpy(out, replacement.terms, c)
    return LinearForm.wrap(out, target.universe)


def compare_vars(u, v, universe):
    """+1 if u is higher than v in the order, -1 if lower, 0 if equal."""
    ku, kv = universe.key(u), universe.key(v)
    return (ku < kv) - (ku > kv)


def lex_key(terms):
    """Sort key putting lexicographically larger forms first."""
    return tuple((k, -terms[k]) for k in sorted(terms)) + ((_END, 0),)


def lex_sort_forms(forms):
    forms = list(forms)
    if len({f.universe for f in forms}) > 1:
        raise UniverseError("forms live in different universes")
    return sorted(forms, key=lambda f: lex_key(f.terms))
