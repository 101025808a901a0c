import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussprove.algebra import LinearForm, Universe, Variable, slack_key
from gaussprove.bench import fixture
from gaussprove.elimination import (
    Echelon,
    Problem,
    WorkSystem,
    classify_type,
    dimension_reduce,
    dimension_reduce_tracked,
    lp_reduce,
    preprocess,
    preprocess_system,
    rref,
)
from gaussprove.prover import expand_problem
from gaussprove.shannon import elemental_inequalities

from worked_examples import F_IV1, C_IV1, U4, H

U0 = Universe()


def A(d):
    return LinearForm({Variable.slack(i): mpq(c) for i, c in d.items()}, U0)


def S(*idx):
    return frozenset(slack_key(i) for i in idx)


# ---------------------------------------------------------------- RREF


def test_rref_already_reduced():
    rows = [A({3: 1, 9: 1, 10: 1, 11: -1, 12: -1}), A({6: 1, 9: -1, 10: -1, 11: 1, 12: 1})]
    R = rref(rows)
    assert R.rows == rows
    assert R.rank == 2
    assert R.pivots == (Variable.slack(3), Variable.slack(6))


def test_rref_is_unique_under_row_operations():
    rows = [A({1: 1, 2: 1, 3: -1}), A({2: 2, 4: 1}), A({1: 1, 3: 1, 4: 1})]
    mixed = [rows[0] + rows[1], mpq(3) * rows[2], rows[1] + (-1) * rows[2]]
    assert rref(rows) == rref(mixed)


def test_rref_solution_and_free_variables():
    R = rref([A({1: 1, 2: 1, 3: -1, 4: -1})])
    assert R.solution(Variable.slack(1)) == A({2: -1, 3: 1, 4: 1})
    assert R.free_variables == {Variable.slack(i) for i in (2, 3, 4)}


def test_rref_drops_dependent_rows():
    r = A({1: 1, 2: -1})
    assert rref([r, mpq(2) * r, A({})]).rank == 1


def test_echelon_tags_certify_dependencies():
    ech = Echelon(tagged=True)
    r1, r2 = A({1: 1, 2: 1}).terms, A({2: 1, 3: -1}).terms
    ech.add(r1, {slack_key(101): 1})
    ech.add(r2, {slack_key(102): 1})
    p, tag = ech.add(A({1: 1, 3: 1}).terms, {slack_key(103): 1})
    assert p is None
    # r3 - r1 + r2 == 0
    assert tag == {slack_key(103): 1, slack_key(101): -1, slack_key(102): 1}


# ---------------------------------------------------------------- dimension reduction


def test_dimension_reduce_example_IV_1():
    ex = expand_problem(fixture("example_IV_1").statement)
    forms = dimension_reduce(ex.inequalities, ex.equalities)
    assert len(ex.inequalities) == 28
    assert len(forms) == 18


def test_dimension_reduce_tracks_origins():
    ex = expand_problem(fixture("example_IV_1").statement)
    forms, origins, ech = dimension_reduce_tracked(ex.inequalities, ex.equalities)
    for f, i in zip(forms, origins):
        assert LinearForm.wrap(ech.reduce(dict(ex.inequalities[i].terms)), f.universe) == f
    dropped = set(range(28)) - set(origins)
    for i in dropped:
        r = ech.reduce(dict(ex.inequalities[i].terms))
        assert not r or any(LinearForm.wrap(r, ex.universe) == f for f in forms)


def test_dimension_reduce_without_equalities_only_dedupes():
    forms = elemental_inequalities(3)
    assert dimension_reduce(forms + forms[:2], []) == forms


# ---------------------------------------------------------------- slack reduction

def _evaluate(form, forms):
    # substitute a_i := forms[i-1]
    out = LinearForm({}, forms[0].universe)
    for k, c in form.terms.items():
        out = out + c * forms[k - slack_key(1)]
    return out


def test_lp_reduce_example_IV_1_shape():
    red = lp_reduce(F_IV1, C_IV1)
    assert len(red.J1) == 9 and red.rank == 9 and red.provable
    assert all(k >= slack_key(1) for k in red.objective.terms)


def test_lp_reduce_invariants():
    red = lp_reduce(F_IV1, C_IV1)
    # objective is F0 re-expressed through the slacks, J1 rows are identities among the C_i
    assert _evaluate(red.objective, C_IV1) == F_IV1
    for row in red.J1:
        assert not _evaluate(row, C_IV1)


def test_unit_three_term_combinations_of_the_reduced_list():
    # the only unit 3-subsets of C_1..C_18 summing to h1 - h4
    hits = [c for c in itertools.combinations(range(18), 3) if C_IV1[c[0]] + C_IV1[c[1]] + C_IV1[c[2]] == F_IV1]
    assert [tuple(i + 1 for i in c) for c in hits] == [(2, 12, 17), (4, 13, 17)]


def test_lp_reduce_flags_free_entropy_variables():
    U = Universe(2)
    f = LinearForm({Variable.entropy((1,)): 1}, U)
    g = LinearForm({Variable.entropy((1, 2)): 1}, U)
    red = lp_reduce(f, [g])
    assert not red.provable and red.free == (Variable.entropy((1,)),)


small_forms = st.dictionaries(st.sampled_from([(1,), (2,), (1, 2), (3,), (1, 3)]), st.integers(-3, 3), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(small_forms, st.lists(small_forms, min_size=1, max_size=6))
def test_lp_reduce_property(F, Cs):
    U = Universe(3)
    wrap = lambda d: LinearForm({Variable.entropy(s): c for s, c in d.items()}, U)
    F, Cs = wrap(F), [wrap(c) for c in Cs]
    red = lp_reduce(F, Cs)
    slack_part = LinearForm({k: c for k, c in red.objective.terms.items() if k >= slack_key(1)}, U)
    x_part = LinearForm({k: c for k, c in red.objective.terms.items() if k < slack_key(1)}, U)
    assert _evaluate(slack_part, Cs) + x_part == F if slack_part else x_part == F
    for row in red.J1:
        assert not _evaluate(row, Cs)


# ---------------------------------------------------------------- Type I / II


@pytest.mark.parametrize(
    "form,kind,single",
    [
        ({1: 1, 2: 1}, "I", None),
        ({4: 1, 5: -1, 6: -1}, "II", 4),
        ({7: 1, 8: 1, 9: -2}, "II", 9),
        ({1: -1, 3: -2}, "I", None),
        ({1: 1, 2: 1, 3: -1, 4: -1}, "neither", None),
    ],
)
def test_classify_type(form, kind, single):
    t = classify_type(A(form))
    assert t.kind == kind
    assert t.single == (Variable.slack(single) if single else None)


def test_classify_rejects_zero_and_entropy_forms():
    with pytest.raises(ValueError):
        classify_type(A({}))
    with pytest.raises(ValueError):
        classify_type(H({(1,): 1}))


# ---------------------------------------------------------------- preprocessing


def test_preprocess_example_III_4():
    Q = preprocess(fixture("example_III_4").problem)
    assert Q.objective == A({3: 1, 5: 2})
    assert Q.equalities == []
    assert Q.nonneg == S(3, 5)


def test_preprocess_example_III_5():
    Q = preprocess(fixture("example_III_5").problem)
    assert Q.objective == A({1: mpq(-1, 2), 2: -1, 3: 1, 4: 1, 6: 1, 9: 1})
    assert len(Q.equalities) == 3
    assert Q.nonneg == S(1, 2, 3, 4, 6, 9, 10, 11, 12)


def test_preprocess_redundant_inequality():
    # a3 - a4 - a5 = 0 with everything nonnegative: a3 >= 0 follows from the rest
    P = Problem(A({3: 1, 4: -1}), [A({3: 1, 4: -1, 5: -1})], S(3, 4, 5))
    ws = WorkSystem.from_problem(P)
    log = []
    preprocess_system(ws, log)
    assert ("eliminate", slack_key(3)) in log
    assert slack_key(3) not in ws.S


def test_preprocess_reaches_fixed_point():
    P = fixture("example_III_5").problem
    once = preprocess(P)
    assert preprocess(once).objective == once.objective
    assert preprocess(once).equalities == once.equalities


def test_type1_zero_certificates_are_sound():
    P = fixture("example_III_4").problem
    ws = WorkSystem.from_problem(P)
    preprocess_system(ws)
    # every registered -a_k is a conic combination mod the original equalities
    E = P.equalities
    for k, K in ws.zeroed.items():
        expr = LinearForm.wrap(dict(K), U0) + LinearForm.wrap({k: mpq(1)}, U0)
        assert all(c >= 0 for c in K.values())
        R = rref(E)
        assert not R.reduce(expr)
