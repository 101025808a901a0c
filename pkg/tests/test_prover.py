import json
import random

import pytest
from gmpy2 import mpq

from gaussprove import (
    NOT_PROVABLE,
    PROVED,
    Certificate,
    SoundnessError,
    parse,
    prove,
    prove_identity,
    prove_inequality,
    prove_problem,
    verify_certificate,
    verify_problem_certificate,
)
from gaussprove.bench import fixture
from gaussprove.oracle import fm_oracle, fm_problem
from gaussprove.prover import MalformedCertificateError, combine, expand_problem, render_certificate

from generators import entropy_statement, slack_problem


def P(text):
    return parse(text)


SHANNON_TRUE = [
    "vars X Y\nH(X,Y) <= H(X) + H(Y)",
    "vars X Y\nH(X|Y) <= H(X)",
    "vars X Y Z\nI(X;Y|Z) >= 0",
    "vars X Y Z\nH(X,Y,Z) >= H(X,Y)",
    "vars X Y Z\nH(X|Y) + H(Y|Z) >= H(X|Z)",
    "vars X Y Z\nI(X;Y,Z) >= I(X;Y)",
    "vars X Y Z\nprove I(X;Z) <= H(X)\ngiven H(Z|Y) = 0",
    "vars X Y\nscalars R\nprove R >= H(X|Y)\ngiven R >= H(X)",
]

SHANNON_FALSE = [
    "vars X Y\nH(X) >= H(Y)",
    "vars X Y\nI(X;Y) <= 0",
    "vars X Y Z\nI(X;Y|Z) <= I(X;Y)",
    "vars X Y\nH(X) >= 2 H(X,Y) - H(Y)",
]


@pytest.mark.parametrize("text", SHANNON_TRUE)
def test_shannon_inequalities_are_proved(text):
    ps = P(text)
    r = prove_inequality(ps, verify=True)
    assert r.verdict == PROVED
    assert verify_certificate(r.certificate, ps)


@pytest.mark.parametrize("text", SHANNON_FALSE)
def test_non_inequalities_are_not_proved(text):
    r = prove_inequality(P(text))
    assert r.verdict == NOT_PROVABLE and r.certificate is None


def test_data_processing_inequality():
    ps = fixture("data_processing").statement
    r = prove_inequality(ps, verify=True)
    assert r.proved


def test_example_IV_1_certificate_shape():
    ps = fixture("example_IV_1").statement
    r = prove_inequality(ps, verify=True)
    assert r.proved and r.lp_invocations == 0
    mu = r.certificate.inequality_multipliers
    assert len(mu) == 3 and set(mu.values()) == {1}
    assert [s["stage"] for s in r.stage_sizes][:3] == ["input", "dimension_reduced", "lp_reduced"]
    assert r.stage_sizes[1]["inequalities"] == 18


def test_free_scalar_is_not_provable():
    r = prove_inequality(P("vars X\nscalars s\ns >= H(X)"))
    assert r.verdict == NOT_PROVABLE and r.method == "free_variable"


def test_scaling_invariance():
    base = prove_inequality(P("vars X Y Z\nH(X|Y) + H(Y|Z) >= H(X|Z)"))
    big = prove_inequality(P("vars X Y Z\n3 H(X|Y) + 3 H(Y|Z) >= 3 H(X|Z)"))
    assert base.proved and big.proved
    ratio = {i: big.certificate.inequality_multipliers[i] / c for i, c in base.certificate.inequality_multipliers.items()}
    assert set(ratio.values()) == {3}


# ---------------------------------------------------------------- certificates


def proved_dp():
    ps = fixture("data_processing").statement
    return ps, prove_inequality(ps).certificate


def test_tampered_multiplier_is_rejected():
    ps, cert = proved_dp()
    i = min(cert.inequality_multipliers)
    bad = Certificate(dict(cert.inequality_multipliers), dict(cert.equality_multipliers), cert.objective)
    bad.inequality_multipliers[i] += 1
    assert not verify_certificate(bad, ps)


def test_negative_multiplier_is_rejected():
    ps = P("vars X Y\nH(X) >= H(X)")
    ex = expand_problem(ps)
    assert not verify_certificate(Certificate({0: mpq(-1)}, {}, ex.objective), ps)


def test_out_of_range_index():
    ps, cert = proved_dp()
    with pytest.raises(MalformedCertificateError):
        combine(Certificate({10**6: mpq(1)}, {}, cert.objective), expand_problem(ps))


def test_certificate_json_round_trip():
    ps, cert = proved_dp()
    data = json.loads(json.dumps(cert.to_json()))
    again = Certificate.from_json(data, cert.objective)
    assert again == cert
    assert verify_certificate(again, ps)


def test_certificate_scaling():
    ps, cert = proved_dp()
    ex = expand_problem(ps)
    assert combine(cert.scaled(mpq(5, 2)), ex) == mpq(5, 2) * ex.objective


def test_render_lists_every_multiplier():
    ps, cert = proved_dp()
    text = render_certificate(cert, expand_problem(ps))
    assert text.startswith("objective:")
    assert len([l for l in text.splitlines() if l.startswith("  ")]) == len(cert.inequality_multipliers) + len(cert.equality_multipliers)


# ---------------------------------------------------------------- identities


def test_identity_proved_with_both_directions():
    ps = P("vars X Y\nI(X;Y) = H(X) - H(X|Y)")
    r = prove_identity(ps, verify=True)
    assert r.proved
    assert verify_certificate(r.certificate, ps) and verify_certificate(r.negative_certificate, ps)


def test_identity_under_constraints():
    ps = P("vars X Y\nprove H(X,Y) = H(Y)\ngiven H(X|Y) = 0")
    assert prove_identity(ps, verify=True).proved


def test_false_identity():
    r = prove_identity(P("vars X Y\nH(X) = H(Y)"))
    assert r.verdict == NOT_PROVABLE and r.reduced_problem is not None


def test_one_sided_identity_is_not_proved():
    # H(X,Y) >= H(X) holds, the reverse does not
    assert not prove_identity(P("vars X Y\nH(X,Y) = H(X)"), fallback=True).proved


def test_dispatch():
    assert prove(P("vars X Y\nI(X;Y) = H(X) + H(Y) - H(X,Y)")).negative_certificate is not None
    assert prove(P("vars X Y\nI(X;Y) >= 0"), fallback=True).proved


# ---------------------------------------------------------------- slack-space entry point


@pytest.mark.parametrize("name", ["example_III_4", "example_III_5"])
def test_prove_problem_worked_examples(name):
    Pr = fixture(name).problem
    r = prove_problem(Pr)
    assert r.proved
    assert verify_problem_certificate(Pr, r.certificate)


def test_prove_problem_rejects_tampered_certificate():
    Pr = fixture("example_III_4").problem
    r = prove_problem(Pr)
    mu = dict(r.certificate.inequality_multipliers)
    k = next(iter(mu))
    mu[k] *= 2
    assert not verify_problem_certificate(Pr, Certificate(mu, {}, Pr.objective))


def test_prove_problem_minimal_reports_reduced_system():
    Pr = fixture("example_III_5").problem
    r = prove_problem(Pr, max_attempts=1)
    assert r.proved and r.method == "lp" and r.lp_invocations == 1
    assert r.reduced_problem is not None
    assert len(r.reduced_problem.equalities) == 1


def test_soundness_error_is_runtime_error():
    assert issubclass(SoundnessError, RuntimeError)


# ---------------------------------------------------------------- oracle agreement (small sample)


def test_slack_problems_agree_with_oracle():
    rng = random.Random(11)
    for _ in range(60):
        Pr = slack_problem(rng)
        r = prove_problem(Pr)
        assert r.proved == fm_problem(Pr), str(Pr)
        if r.proved:
            assert verify_problem_certificate(Pr, r.certificate)


def test_entropy_problems_agree_with_oracle():
    rng = random.Random(12)
    for _ in range(60):
        ps = entropy_statement(rng)
        ex = expand_problem(ps)
        r = prove_inequality(ps, verify=True)
        assert r.proved == fm_oracle(ex.objective, ex.inequalities, ex.equalities), str(ps)
