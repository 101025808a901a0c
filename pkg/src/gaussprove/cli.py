"""Command-line front end.

    gaussprove [prove] (--file PATH | --bench NAME) [options]

Exit status: 0 proved, 1 not provable, 2 bad input, 3 certificate check failed.
"""
from __future__ import annotations

import argparse
import sys

from .algebra import format_rational
from .bench import BENCHMARKS, UnknownFixtureError, benchmark
from .elimination import SoundnessError
from .prover import (
    prove_identity,
    prove_inequality,
    prove_problem,
    render_certificate,
    verify_certificate,
    verify_problem_certificate,
)
from .shannon import MeasureError, ParseError, parse

EXIT_PROVED = 0
EXIT_NOT_PROVABLE = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3


class InputError(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="gaussprove", description="Prove Shannon-type information inequalities exactly.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", metavar="PATH", help="problem file ('-' reads standard input)")
    src.add_argument("--bench", metavar="NAME", choices=sorted(BENCHMARKS), help="built-in problem: %(choices)s")
    p.add_argument("--retries", type=int, default=16, metavar="N", help="heuristic attempts before the LP fallback (default 16)")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="base seed for the randomized attempts")
    p.add_argument("--minimal", action="store_true", help="also report the minimal reduced problem")
    p.add_argument("--identity", action="store_true", help="prove the objective as an identity (both directions)")
    p.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for standard output)")
    p.add_argument("--verify", action="store_true", help="check the certificate against the original constraints")
    p.add_argument("--stats", action="store_true", help="print pipeline statistics")
    p.add_argument("--deterministic", action="store_true", help="omit timing so reruns are byte-identical")
    return p


def _load(args):
    if args.bench:
        try:
            nb = benchmark(args.bench)
        except UnknownFixtureError as exc:
            raise InputError(str(exc)) from None
        return nb.statement, nb.problem
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        return parse(text), None
    except ParseError as exc:
        raise InputError(f"{args.file}: {exc}") from None


def _run(ps, P, args):
    if P is not None:
        if args.identity:
            raise InputError("--identity needs an information-measure statement, not a slack-space system")
        rep = prove_problem(P, args.retries, args.seed, args.minimal)
        if args.verify and rep.proved and not verify_problem_certificate(P, rep.certificate):
            raise SoundnessError("certificate failed verification")
        return rep
    if args.identity or ps.objective.is_equality:
        return prove_identity(ps, max_attempts=args.retries, base_seed=args.seed, verify=args.verify)
    return prove_inequality(ps, args.retries, args.seed, minimal=args.minimal, verify=args.verify)


def _print_stats(rep, args, out):
    out.write(f"method: {rep.method}\n")
    out.write(f"attempts: {rep.attempts}\n")
    out.write(f"LP fallback invoked: {'yes' if rep.lp_invocations else 'no'}\n")
    if rep.reduction_lp_calls:
        out.write(f"LP calls inside reduction: {rep.reduction_lp_calls}\n")
    out.write("stage sizes (variables, equalities, inequalities):\n")
    for s in rep.stage_sizes:
        out.write(f"  {s['stage']:<18} {s['variables']:>7} {s['equalities']:>7} {s['inequalities']:>7}\n")
    if not args.deterministic:
        out.write(f"wall time: {rep.wall_time:.3f} s\n")


def _print_slack_certificate(cert, out):
    out.write(f"objective: {cert.objective} >= 0\n")
    for i, c in sorted(cert.inequality_multipliers.items()):
        out.write(f"  {format_rational(c):>8}  a{i} >= 0\n")


def _report(rep, ps, args, out):
    out.write(f"verdict: {rep.verdict}\n")
    for note in rep.notes:
        out.write(f"note: {note}\n")
    if args.stats:
        _print_stats(rep, args, out)
    if rep.proved:
        if ps is None:
            _print_slack_certificate(rep.certificate, out)
        else:
            out.write(render_certificate(rep.certificate, rep.expanded) + "\n")
            if rep.negative_certificate is not None:
                out.write(render_certificate(rep.negative_certificate, rep.expanded) + "\n")
    if rep.reduced_problem is not None and (args.minimal or not rep.proved):
        P = rep.reduced_problem
        out.write("reduced problem:\n")
        out.write(f"  prove {P.objective} >= 0\n")
        for e in P.equalities:
            out.write(f"  given {e} = 0\n")
        if P.nonneg:
            out.write("  nonnegative: " + " ".join(P.universe.label(k) for k in sorted(P.nonneg)) + "\n")
    if args.json:
        text = rep.dumps(args.deterministic) + "\n"
        if args.json == "-":
            out.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)


def run(argv=None, out=None):
    """Parse ``argv``, run the prover, print the report; returns the exit status."""
    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "prove":
        argv = argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PROVED
    if args.retries < 1:
        sys.stderr.write("gaussprove: --retries must be at least 1\n")
        return EXIT_INPUT
    try:
        ps, P = _load(args)
        rep = _run(ps, P, args)
        if args.verify and rep.proved and ps is not None:
            for c in (rep.certificate, rep.negative_certificate):
                if c is not None and not verify_certificate(c, ps, rep.expanded):
                    raise SoundnessError("certificate failed verification")
    except (InputError, MeasureError) as exc:
        sys.stderr.write(f"gaussprove: {exc}\n")
        return EXIT_INPUT
    except SoundnessError as exc:
        sys.stderr.write(f"gaussprove: internal soundness failure: {exc}\n")
        return EXIT_VERIFY
    _report(rep, ps, args, out)
    return EXIT_PROVED if rep.proved else EXIT_NOT_PROVABLE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
