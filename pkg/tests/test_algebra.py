import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from gaussprove.algebra import (
    CyclicSubstitutionError,
    LinearForm,
    MissingVariableError,
    Universe,
    UniverseError,
    Variable,
    add,
    compare_vars,
    format_rational,
    lex_sort_forms,
    rational,
    solve_for,
    substitute,
)

U0 = Universe()
U3 = Universe(3)


def a(i):
    return Variable.slack(i)


def x(i):
    return Variable.coeff(i)  # a stand-in for a generic ordered x-block


def h(*s):
    return Variable.entropy(s)


def A(d):
    return LinearForm({a(i): c for i, c in d.items()}, U0)


def X(d):
    return LinearForm({x(i): c for i, c in d.items()}, U0)


# ---------------------------------------------------------------- rationals


def test_rational_is_exact_and_rejects_floats():
    assert rational("-3/6") == mpq(-1, 2)
    assert format_rational(mpq(4, 2)) == "2"
    assert format_rational(mpq(-1, 3)) == "-1/3"
    with pytest.raises(TypeError):
        rational(0.5)


# ---------------------------------------------------------------- add


def test_add_coefficientwise():
    assert add(X({1: 1, 2: 1}), X({1: 1, 3: -1})) == X({1: 2, 2: 1, 3: -1})


def test_add_inverse_is_empty_form():
    f = X({1: 3, 4: mpq(-2, 7)})
    z = f + (-1) * f
    assert not z and len(z) == 0
    assert z.coefficients == (0,)


def test_add_worked_example():
    F3 = A({1: mpq(1, 2), 10: -1, 11: 1, 12: 1})
    E = A({9: 1, 10: 1, 11: -1, 12: -1})
    assert F3 + E == A({1: mpq(1, 2), 9: 1})


def test_add_rejects_mixed_universes():
    with pytest.raises(UniverseError):
        LinearForm({h(1): 1}, U3) + LinearForm({h(1): 1}, Universe(2))


# ---------------------------------------------------------------- solve / substitute


def test_solve_for_case_one_and_two():
    f = A({1: 1, 2: 1, 3: -1, 4: -1})
    assert solve_for(f, a(2)) == A({1: -1, 3: 1, 4: 1})
    assert solve_for(f, a(1)) == A({2: -1, 3: 1, 4: 1})


def test_solve_for_divides_by_coefficient():
    assert solve_for(X({1: 2, 2: -1}), x(1)) == X({2: mpq(1, 2)})


def test_solve_for_missing_variable():
    with pytest.raises(MissingVariableError):
        solve_for(X({1: 1}), x(2))


def test_substitute_worked_example():
    F1 = A({1: mpq(-1, 2), 2: -1, 3: 1, 4: 1, 6: 1, 9: 1})
    assert substitute(F1, a(2), A({1: -1, 3: 1, 4: 1})) == A({1: mpq(1, 2), 6: 1, 9: 1})


def test_substitute_zero_twice():
    F = A({1: 1, 2: 2, 3: -1})
    F = substitute(substitute(F, a(1), A({})), a(4), A({}))
    assert F == A({2: 2, 3: -1})


def test_substitute_absent_variable_is_identity():
    f = X({2: 1, 3: 1})
    assert substitute(f, x(1), X({2: 1})) == f


def test_substitute_cyclic():
    with pytest.raises(CyclicSubstitutionError):
        substitute(X({1: 1}), x(1), X({1: 1, 2: 1}))


# ---------------------------------------------------------------- order


def test_compare_vars_cardinality_first():
    assert compare_vars(h(1, 2), h(3), U3) == 1


def test_compare_vars_lexicographic_within_size():
    assert compare_vars(h(1, 3), h(1, 2), U3) == 1
    assert compare_vars(h(1, 2), h(1, 3), U3) == -1


def test_compare_vars_slacks():
    assert compare_vars(a(1), a(2), U0) == 1


def test_scalars_sit_above_entropies():
    U = Universe(2, aux=("alpha", "beta"))
    assert U.key(Variable.aux("alpha")) < U.key(Variable.aux("beta")) < U.key(h(1, 2))
    assert U.label(U.key(h(1, 2))) == "h_{1,2}"
    assert U.is_entropy(U.key(h(2))) and not U.is_entropy(U.key(Variable.aux("beta")))


def test_unknown_variable():
    with pytest.raises(UniverseError):
        U3.key(h(4))
    with pytest.raises(UniverseError):
        U3.key(Variable.aux("gamma"))


def test_lex_sort_forms():
    assert lex_sort_forms([X({2: 1, 5: 1}), X({1: 1, 2: 2})]) == [X({1: 1, 2: 2}), X({2: 1, 5: 1})]
    assert lex_sort_forms([X({3: 1, 6: 1}), X({3: 1, 5: 1})]) == [X({3: 1, 5: 1}), X({3: 1, 6: 1})]
    assert lex_sort_forms([X({1: 1})]) == [X({1: 1})]


# ---------------------------------------------------------------- properties

coef = st.fractions(min_value=-5, max_value=5, max_denominator=6).map(lambda f: mpq(f.numerator, f.denominator))
forms = st.dictionaries(st.integers(1, 8), coef, max_size=6).map(X)
entropies = st.integers(1, 7).map(Variable.entropy)


@given(forms, forms, forms)
def test_add_associative_commutative(f, g, k):
    assert f + g == g + f
    assert (f + g) + k == f + (g + k)


@given(forms, st.integers(1, 8))
def test_substitute_solution_vanishes(f, i):
    if x(i) not in f:
        return
    assert substitute(f, x(i), solve_for(f, x(i))) == X({})


@given(forms, forms, forms, st.integers(1, 8))
def test_substitute_distributes_over_add(f, g, r, i):
    if x(i) in r:
        return
    assert substitute(f + g, x(i), r) == substitute(f, x(i), r) + substitute(g, x(i), r)


@given(entropies, entropies, entropies)
def test_compare_vars_total_order(u, v, w):
    assert compare_vars(u, v, U3) == -compare_vars(v, u, U3)
    assert (compare_vars(u, v, U3) == 0) == (u == v)
    if compare_vars(u, v, U3) == 1 and compare_vars(v, w, U3) == 1:
        assert compare_vars(u, w, U3) == 1


@given(st.lists(st.tuples(st.integers(1, 6), coef), max_size=8))
def test_construction_is_order_independent(pairs):
    f = LinearForm({}, U0)
    for i, c in pairs:
        f = f + X({i: c})
    g = LinearForm({}, U0)
    for i, c in reversed(pairs):
        g = g + X({i: c})
    assert f == g and f.terms == g.terms and all(f.terms.values())
