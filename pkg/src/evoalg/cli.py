"""Command-line surface and machine-readable reports.

Subcommands:

* ``check FILE...``  decide each algebra; exit 0 = evolution, 1 = not,
  2 = undetermined, 3 = usage or input error
* ``basis FILE``     print the natural basis or the refutation
* ``ann FILE``       print an annihilator basis
* ``example NAME``   emit a built-in example as an algebra file
* ``random``         emit a planted or adversarial random instance
* ``verify FILE --p MATRIXFILE``  check a candidate natural-basis transform

Wherever a file is expected, ``example://NAME`` denotes a built-in example
(deformed by ``--epsilon``).  ``--json`` switches stdout to a stable report
object; with a fixed ``--seed`` the report is byte-identical across runs
except for the ``runtime_ms`` field.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from typing import Optional

import numpy as np

from . import algebra, corpus, decision, fileformat, sdc, sds
from .decision import COMPLEX_ONLY_UNDETERMINED, EVOLUTION, NOT_EVOLUTION, UNDETERMINED
from .numkernel import DEFAULT_TOL, ToleranceContext
from .pencil import DEFAULT_TRIALS

EXIT_EVOLUTION = 0
EXIT_NOT_EVOLUTION = 1
EXIT_UNDETERMINED = 2
EXIT_USAGE = 3

_OUTCOME_EXIT = {
    EVOLUTION: EXIT_EVOLUTION,
    NOT_EVOLUTION: EXIT_NOT_EVOLUTION,
    COMPLEX_ONLY_UNDETERMINED: EXIT_UNDETERMINED,
    UNDETERMINED: EXIT_UNDETERMINED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit codes under our control
        raise UsageError(message)


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _matrix_pairs(m: np.ndarray) -> list[list[list[float]]]:
    a = np.asarray(m)
    return [[_pair(a[i, j]) for j in range(a.shape[1])] for i in range(a.shape[0])]


def _vector_pairs(v: np.ndarray) -> list[list[float]]:
    return [_pair(x) for x in np.asarray(v)]


def _refutation_json(r) -> Optional[dict]:
    if r is None:
        return None
    if isinstance(r, sds.NonDiagonalisable):
        return {"kind": "non_diagonalisable", "matrix_index": r.index, "eigenvalue": _pair(r.eigenvalue)}
    if isinstance(r, sds.NonCommuting):
        return {"kind": "non_commuting", "pair": list(r.pair), "commutator_norm": r.commutator_norm}
    if isinstance(r, sdc.KernelDimensionMismatch):
        return {"kind": "kernel_dimension_mismatch", "kernel_dim": r.kernel_dim, "expected": r.expected}
    if isinstance(r, sdc.NoFullRankPencil):
        return {"kind": "no_full_rank_pencil", "trials": r.trials, "seed": r.seed}
    raise TypeError(f"unknown refutation {r!r}")


def report_json(verdict: decision.Verdict, runtime_ms: float) -> dict:
    """Stable report object for a verdict; see the README for the schema."""
    cert = None
    if verdict.certificate is not None:
        c = verdict.certificate
        cert = {
            "p": _matrix_pairs(c.p),
            "diagonals": [_vector_pairs(d) for d in c.diagonals],
            "natural_basis": [_vector_pairs(c.p[:, i]) for i in range(c.p.shape[1])],
            "natural_basis_products": _matrix_pairs(c.natural_basis_products),
        }
    d = verdict.diagnostics
    diagnostics = {
        "r0": d.r0,
        "lambda0": None if d.lambda0 is None else _vector_pairs(d.lambda0),
        "ann_dim": d.ann_dim,
        "trials": d.trials,
        "trials_used": d.trials_used,
        "seed": d.seed,
        "tolerances": dataclasses.asdict(d.tolerances),
        "notes": list(d.notes),
        "runtime_ms": runtime_ms,
    }
    return {
        "verdict": verdict.outcome,
        "branch": d.branch,
        "certificate": cert,
        "refutation": _refutation_json(verdict.refutation),
        "diagnostics": diagnostics,
    }


def _load_spec(source: str, epsilon: Optional[float]) -> algebra.AlgebraSpec:
    if source.startswith("example://"):
        return corpus.example_algebra(source[len("example://"):], epsilon)
    with open(source, "r", encoding="utf-8") as fh:
        return fileformat.parse(fh.read())


def _tolerances(values: Optional[list[str]]) -> ToleranceContext:
    if not values:
        return DEFAULT_TOL
    fields = {f.name for f in dataclasses.fields(ToleranceContext)}
    overrides = {}
    for item in values:
        if "=" in item:
            name, _, raw = item.partition("=")
            if name not in fields:
                raise UsageError(f"unknown tolerance {name!r}; choose from {', '.join(sorted(fields))}")
            overrides[name] = float(raw)
        else:
            value = float(item)
            overrides = {name: value for name in fields}
    try:
        return dataclasses.replace(DEFAULT_TOL, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--tol", action="append", metavar="VALUE|NAME=VALUE",
                   help="override tolerances: a bare value sets all four, name=value sets one; repeatable")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="random pencil trials (default %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomized steps (default %(default)s)")
    p.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
    p.add_argument("--epsilon", type=float, default=None, help="deformation parameter for example:// sources")


def _build_parser() -> _Parser:
    parser = _Parser(prog="evoalg", description="Decide whether a commutative algebra is an evolution algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide one or more algebras")
    p_check.add_argument("files", nargs="+", metavar="FILE")
    _common_flags(p_check)

    p_basis = sub.add_parser("basis", help="print a natural basis or the refutation")
    p_basis.add_argument("file", metavar="FILE")
    _common_flags(p_basis)

    p_ann = sub.add_parser("ann", help="print an annihilator basis")
    p_ann.add_argument("file", metavar="FILE")
    _common_flags(p_ann)

    p_example = sub.add_parser("example", help="emit a built-in example as an algebra file")
    p_example.add_argument("name", choices=corpus.EXAMPLE_NAMES)
    p_example.add_argument("--epsilon", type=float, default=None)

    p_random = sub.add_parser("random", help="emit a random instance as an algebra file")
    p_random.add_argument("--dim", type=int, required=True)
    p_random.add_argument("--seed", type=int, default=0)
    p_random.add_argument("--density", type=float, default=0.7)
    p_random.add_argument("--adversarial", choices=corpus.ADVERSARIAL_KINDS, default=None)

    p_verify = sub.add_parser("verify", help="check a candidate natural-basis transform")
    p_verify.add_argument("file", metavar="FILE")
    p_verify.add_argument("--p", required=True, metavar="MATRIXFILE", dest="p_file")
    _common_flags(p_verify)

    return parser


def _decide(source: str, args) -> tuple[decision.Verdict, float]:
    spec = _load_spec(source, args.epsilon)
    tol = _tolerances(args.tol)
    t0 = time.perf_counter()
    verdict = decision.is_evolution_algebra(spec, tol, args.trials, args.seed)
    return verdict, (time.perf_counter() - t0) * 1000.0


def _cmd_check(args) -> int:
    code = EXIT_EVOLUTION
    for source in args.files:
        verdict, ms = _decide(source, args)
        if args.json:
            print(json.dumps(report_json(verdict, ms), sort_keys=True))
        else:
            if len(args.files) > 1:
                print(f"== {source}")
            print(decision.explain(verdict))
        code = max(code, _OUTCOME_EXIT[verdict.outcome])
    return code


def _cmd_basis(args) -> int:
    verdict, ms = _decide(args.file, args)
    if args.json:
        print(json.dumps(report_json(verdict, ms), sort_keys=True))
    elif verdict.certificate is not None:
        for i in range(verdict.certificate.p.shape[1]):
            print(" ".join(fileformat.format_scalar(x) for x in verdict.certificate.p[:, i]))
    else:
        print(decision.explain(verdict))
    return _OUTCOME_EXIT[verdict.outcome]


def _cmd_ann(args) -> int:
    spec = _load_spec(args.file, args.epsilon)
    tol = _tolerances(args.tol)
    basis = algebra.annihilator_basis(spec, tol)
    if args.json:
        print(json.dumps({"ann_dim": basis.shape[1],
                          "basis": [_vector_pairs(basis[:, i]) for i in range(basis.shape[1])]},
                         sort_keys=True))
    else:
        if basis.shape[1] == 0:
            print("annihilator is zero")
        for i in range(basis.shape[1]):
            print(" ".join(fileformat.format_scalar(x) for x in basis[:, i]))
    return 0


def _cmd_example(args) -> int:
    spec = corpus.example_algebra(args.name, args.epsilon)
    sys.stdout.write(fileformat.serialise(spec))
    return 0


def _cmd_random(args) -> int:
    if args.adversarial is not None:
        spec = corpus.adversarial_instance(args.adversarial, args.dim, args.seed)
    else:
        spec, _ = corpus.planted_evolution_algebra(args.dim, args.density, args.seed)
    sys.stdout.write(fileformat.serialise(spec))
    return 0


def _cmd_verify(args) -> int:
    spec = _load_spec(args.file, args.epsilon)
    tol = _tolerances(args.tol)
    with open(args.p_file, "r", encoding="utf-8") as fh:
        p = fileformat.parse_matrix(fh.read())
    t0 = time.perf_counter()
    check = decision.check_certificate(spec, p, tol)
    ms = (time.perf_counter() - t0) * 1000.0
    if args.json:
        print(json.dumps({
            "ok": check.ok,
            "offending_pair": list(check.offending_pair) if check.offending_pair else None,
            "residual": check.residual,
            "reason": check.reason,
            "runtime_ms": ms,
        }, sort_keys=True))
    elif check.ok:
        print(f"certificate accepted (worst off-diagonal product residual {check.residual:.3e})")
    elif check.reason is not None:
        print(f"certificate rejected: {check.reason}")
    else:
        i, j = check.offending_pair
        print(f"certificate rejected: product of basis vectors {i} and {j} has residual {check.residual:.3e}")
    return EXIT_EVOLUTION if check.ok else EXIT_NOT_EVOLUTION


_COMMANDS = {
    "check": _cmd_check,
    "basis": _cmd_basis,
    "ann": _cmd_ann,
    "example": _cmd_example,
    "random": _cmd_random,
    "verify": _cmd_verify,
}


def run(argv=None) -> int:
    """Dispatch a command line; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (fileformat.ParseError, algebra.MalformedSpec, corpus.OutOfRangeEpsilon, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
