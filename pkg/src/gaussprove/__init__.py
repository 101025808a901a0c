"""Exact prover for Shannon-type information inequalities.

Measures are expanded into joint entropies, equality constraints are
removed by Gauss-Jordan elimination over the rationals, and a guided
elimination search looks for a nonnegative combination of the elemental
inequalities.  An exact simplex settles whatever the search leaves open.
Every PROVED verdict carries a certificate that can be rechecked.
"""
from .algebra import LinearForm, Universe, Variable
from .bench import benchmark, fixture
from .elimination import Problem, SoundnessError
from .kernels import IMPLEMENTATION as KERNELS
from .prover import (
    NOT_PROVABLE,
    PROVED,
    Certificate,
    ProofReport,
    expand_problem,
    prove,
    prove_identity,
    prove_inequality,
    prove_problem,
    verify_certificate,
    verify_problem_certificate,
)
from .shannon import ParseError, elemental_count, elemental_inequalities, parse

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "KERNELS",
    "LinearForm",
    "NOT_PROVABLE",
    "PROVED",
    "ParseError",
    "Problem",
    "ProofReport",
    "SoundnessError",
    "Universe",
    "Variable",
    "benchmark",
    "elemental_count",
    "elemental_inequalities",
    "expand_problem",
    "fixture",
    "parse",
    "prove",
    "prove_identity",
    "prove_inequality",
    "prove_problem",
    "verify_certificate",
    "verify_problem_certificate",
]
