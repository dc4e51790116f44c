"""Command-line front end.

Exit codes::

    0  feasible / success
    1  error (bad input, bad parameters)
    2  infeasible (or forced simulation that failed to decode)
    3  unsupported zero pattern or regime
    4  oracle scale exceeded
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .feasibility import SCHEMA_VERSION, FeasibilityParams, ParameterError, check_feasibility
from .netgraph import SESSIONS, GraphError, ZeroTransferError, extend, parse_network
from .oracle import DEFAULT_CAP, Oracle, OracleScaleExceeded, square_term_sweep
from .simulate import (
    InfeasibleError,
    SimParams,
    SimulationError,
    UnsupportedRegime,
    run_pbna,
)
from .transfer import P_RATIOS, Q_RATIOS

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_UNSUPPORTED = 3
EXIT_ORACLE_CAP = 4


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc.strerror}") from exc
    return extend(parse_network(data))


def oracle_report(xnet, what: str = "all") -> dict:
    """Exact identities, triple forms, square-term sweep and path listing."""
    oracle = Oracle(xnet, DEFAULT_CAP)
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "kind": "oracle",
        "tool_version": __version__,
        "what": what,
        "edges": len(xnet.base.edges),
        "variables": len(xnet.pairs),
    }
    if what in ("all", "paths"):
        doc["paths"] = {
            f"m{i}{j}": [
                [f"{xnet.pairs[v][0]}>{xnet.pairs[v][1]}" for v in mono]
                for mono in sorted(oracle.m(i, j).terms)
            ]
            for i in SESSIONS
            for j in SESSIONS
        }
    if what in ("all", "identities"):
        identities = []
        for kind in list(P_RATIOS.values()) + list(Q_RATIOS.values()):
            identities.append(
                {
                    "ratio": kind.name,
                    "quadruple": list(kind.quadruple),
                    "product_identity_holds": oracle.product_identity_holds(*kind.quadruple),
                }
            )
        doc["product_identities"] = identities
        triples = []
        for i in SESSIONS:
            try:
                triples.append({"session": i, "zero": oracle.triple_identity_zero(i)})
            except ZeroTransferError as exc:
                triples.append({"session": i, "zero": None, "note": str(exc)})
        doc["triple_identities"] = triples
        doc["eta_constant"] = oracle.eta_is_constant()
    if what in ("all", "square-term"):
        doc["square_term"] = square_term_sweep(oracle)
    return doc


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the "infeasible" exit code
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, seed_required: bool) -> None:
    p.add_argument("graph", help="graph file (JSON)")
    p.add_argument("--m", type=int, default=16, help="field is GF(2^m) (default 16)")
    p.add_argument("--trials", type=int, default=32, help="random trials T (default 32)")
    p.add_argument("--seed", type=int, required=seed_required, help="unsigned 64-bit seed")
    p.add_argument("--n", type=int, default=2, help="symbol extension n (default 2)")
    p.add_argument("--oracle", choices=["auto", "force", "off"], default="auto")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbna", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide alignment feasibility")
    _common(check, seed_required=True)

    sim = sub.add_parser("simulate", help="check, then encode/transmit/decode once")
    _common(sim, seed_required=True)
    sim.add_argument("--force", action="store_true", help="simulate even if infeasible")
    sim.add_argument("--max-resamples", type=int, default=64)

    orc = sub.add_parser("oracle", help="exact polynomial identities by path enumeration")
    orc.add_argument("graph")
    orc.add_argument("--what", choices=["all", "identities", "square-term", "paths"], default="all")
    orc.add_argument("--out")
    return parser


def cmd_check(args) -> int:
    xnet = _load(args.graph)
    params = FeasibilityParams(m=args.m, trials=args.trials, seed=args.seed, n=args.n, oracle=args.oracle)
    report = check_feasibility(xnet, params)
    _emit(report.to_dict(), args.out)
    if not report.supported:
        print(f"pbna: {report.explanation}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_simulate(args) -> int:
    xnet = _load(args.graph)
    params = SimParams(
        n=args.n,
        m=args.m,
        seed=args.seed,
        max_resamples=args.max_resamples,
        trials=args.trials,
        force=args.force,
        oracle=args.oracle,
    )
    report = check_feasibility(xnet, params.feasibility_params())
    if not report.supported:
        _emit(report.to_dict(), args.out)
        print(f"pbna: {report.explanation}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    try:
        result = run_pbna(xnet, params, report)
    except InfeasibleError as exc:
        _emit(report.to_dict(), args.out)
        print(f"pbna: {exc}; pass --force to simulate anyway", file=sys.stderr)
        return EXIT_INFEASIBLE
    except UnsupportedRegime as exc:
        _emit(report.to_dict(), args.out)
        print(f"pbna: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    doc = result.to_dict()
    doc["feasibility"] = report.to_dict()
    _emit(doc, args.out)
    if result.success:
        return EXIT_OK
    return EXIT_INFEASIBLE if not report.feasible else EXIT_ERROR


def cmd_oracle(args) -> int:
    xnet = _load(args.graph)
    _emit(oracle_report(xnet, args.what), args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"check": cmd_check, "simulate": cmd_simulate, "oracle": cmd_oracle}[args.command]
    try:
        return handler(args)
    except OracleScaleExceeded as exc:
        print(f"pbna: oracle scale exceeded: {exc}. Use randomized mode (--oracle off).", file=sys.stderr)
        return EXIT_ORACLE_CAP
    except (GraphError, ParameterError, SimulationError, ValueError) as exc:
        print(f"pbna: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
