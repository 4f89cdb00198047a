"""Command-line interface.

Exit codes: 0 success, 1 super-additivity violation found, 2 bad input,
3 internal construction failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bipartite import entanglement_rank, local_subgroup
from .codec import ParseError, format_stab, parse_fourway, parse_partition, read_stab_file
from .fuzz import fuzz
from .group import InvalidGroupError
from .pauli import DimensionError
from .superadditivity import CompletionError, ef_code_projector, verify_ssa

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload))
        return
    width = max(len(k) for k in payload)
    for key, value in payload.items():
        if isinstance(value, dict):
            print(f"{key}:")
            inner = max((len(k) for k in value), default=0)
            for k, v in value.items():
                print(f"  {k:<{inner}}  {v}")
        elif isinstance(value, list):
            print(f"{key}:")
            for item in value:
                print(f"  {item}")
        else:
            print(f"{key:<{width}}  {value}")


def _load(path: str):
    try:
        return read_stab_file(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except ParseError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_entanglement(args) -> int:
    S = _load(args.state)
    part = parse_partition(args.partition, S.n)
    rank = entanglement_rank(S, part)
    s_a, s_b = local_subgroup(S, part)
    payload = {
        "e_ab": rank.e_ab,
        "entropy_ebits": rank.e_ab // 2 if rank.e_ab % 2 == 0 else rank.entropy_ebits,
        "rank_s_a": s_a.rank,
        "rank_s_b": s_b.rank,
    }
    _emit(payload, args.json)
    return EXIT_OK


def cmd_ssa_verify(args) -> int:
    S = _load(args.state)
    if not S.is_maximal:
        raise InputError(
            f"{args.state}: group has rank {S.rank} < {S.n}; ssa-verify needs a pure state "
            "(use 'ef-projector' for code projectors)"
        )
    fw = parse_fourway(args.partition, S.n)
    report = verify_ssa(S, fw)
    _emit(report.to_dict(explain=args.explain), args.json)
    ok = report.holds and report.all_checks
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    if args.qubits < 4:
        raise InputError("--qubits must be at least 4 for four-way partitions")
    summary = fuzz(args.qubits, args.trials, args.seed, args.oracle_max, args.out)
    _emit(summary, args.json)
    return EXIT_OK if summary["violations"] == 0 else EXIT_VIOLATION


def cmd_ef_projector(args) -> int:
    H = _load(args.group)
    part = parse_partition(args.partition, H.n)
    try:
        p, witness = ef_code_projector(H, part)
    except CompletionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for line in exc.trace:
            print(f"  {line}", file=sys.stderr)
        return EXIT_INTERNAL
    payload = {
        "p": p,
        "witness_generators": format_stab(witness).splitlines()[1:],
        "e_ab_witness": entanglement_rank(witness, part).e_ab,
    }
    _emit(payload, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabsplit",
        description="Entanglement and strong super-additivity checks for stabilizer states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entanglement", help="entanglement rank across a bipartition")
    p.add_argument("state", help=".stab file")
    p.add_argument("partition", help="e.g. 'A=0,1;B=2,3'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_entanglement)

    p = sub.add_parser("ssa-verify", help="run the super-additivity construction on a pure state")
    p.add_argument("state", help=".stab file with n generators")
    p.add_argument("partition", help="e.g. 'A1=0;A2=1;B1=2;B2=3'")
    p.add_argument("--json", action="store_true")
    p.add_argument("--explain", action="store_true", help="list the measurement operators")
    p.set_defaults(func=cmd_ssa_verify)

    p = sub.add_parser("fuzz", help="random trials of the super-additivity construction")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-max", type=int, default=6, help="dense cross-checks up to this n")
    p.add_argument("--out", default=None, help="directory for reproducer .stab files")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("ef-projector", help="entanglement of formation of a code projector")
    p.add_argument("group", help=".stab file, any rank")
    p.add_argument("partition", help="e.g. 'A=0;B=1,2'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ef_projector)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, DimensionError, InvalidGroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
