"""Command-line front end.

Every subcommand prints a short human line to stderr-free stdout and writes
its table (CSV by default, JSON with --format json) to --output or stdout.
Runs are reproducible: the same flags and seed give byte-identical files.

Exit codes: 0 success / criterion met; 1 criterion failed; 2 invalid request
or enumeration guard; serve/connect map verdicts to 0 accepted, 3 rejected,
4 transport error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import adversary, budget, net, protocol, uc
from .asu2 import AuthKey, FamilyParams, MessageBlocks, check_asu2
from .errors import AwrAuthError, ConfigMismatch, FrameMalformed, PoolExhausted, SpaceTooLarge
from .keys import KeyPool, biased_distribution
from .rng import philox_stream


def _emit(lines_csv, rows_json, args) -> None:
    if args.format == "json":
        text = json.dumps(rows_json, indent=2, sort_keys=True, default=str) + "\n"
    else:
        text = "\n".join(lines_csv) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _family(args) -> FamilyParams:
    return FamilyParams(tag_bits=args.tag_bits, max_blocks=args.max_blocks)


def _parse_key_dist(spec: str, key_space: int):
    if spec == "uniform":
        return biased_distribution("uniform", key_space)
    kind, _, arg = spec.partition(":")
    if kind == "point_shift":
        return biased_distribution("point_shift", key_space, Fraction(arg))
    if kind == "leak_bits":
        return biased_distribution("leak_bits", key_space, int(arg))
    raise ValueError(f"unknown key distribution {spec!r}")


def cmd_check_asu2(args) -> int:
    try:
        report = check_asu2(_family(args))
    except SpaceTooLarge as exc:
        print(f"space too large: {exc}", file=sys.stderr)
        return 2
    line = (
        f"condition1_exact={report.condition1_exact} "
        f"condition2_max={report.condition2_max} epsilon={report.epsilon} "
        f"pass={report.passed}"
    )
    print(line)
    _emit(
        [
            "condition1_exact,condition2_max,epsilon,msg_space,key_space,pass",
            f"{report.condition1_exact},{report.condition2_max},{report.epsilon},"
            f"{report.msg_space},{report.key_space},{str(report.passed).lower()}",
        ],
        {
            "condition1_exact": report.condition1_exact,
            "condition2_max": str(report.condition2_max),
            "epsilon": str(report.epsilon),
            "msg_space": report.msg_space,
            "key_space": report.key_space,
            "pass": report.passed,
        },
        args,
    )
    return 0 if report.passed else 1


def cmd_attack(args) -> int:
    params = _family(args)
    try:
        if args.kind == "impersonation":
            est = adversary.estimate_impersonation(
                params, args.trials, args.seed, tag_value=args.tag_value, method=args.method
            )
        elif args.kind == "substitution":
            rule = (
                adversary.consistent_key_substitution(params)
                if args.consistent
                else adversary.XorSubstitution((args.delta_block,), args.delta_tag)
            )
            est = adversary.estimate_substitution(
                params, rule, args.trials, args.seed, method=args.method
            )
        else:
            est = adversary.estimate_response_forge(
                params, args.trials, args.seed, strategy=args.forge_strategy,
                method=args.method,
            )
    except SpaceTooLarge as exc:
        print(f"space too large: {exc}", file=sys.stderr)
        return 2
    print(
        f"{est.attack}: rate={float(est.rate)!r} bound={float(est.bound)!r} "
        f"({est.method}, {est.successes}/{est.trials}) pass={est.passed}"
    )
    _emit([adversary.RateEstimate.CSV_HEADER, est.csv_row()], est.__dict__, args)
    return 0 if est.passed else 1


def cmd_uc_check(args) -> int:
    params = _family(args)
    try:
        dist = _parse_key_dist(args.key_dist, params.key_space)
        result = uc.max_distance_search(dist, params, args.msg_space, family=args.family)
    except (SpaceTooLarge, ValueError) as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return 2
    ok = result.max_distance <= result.bound
    print(
        f"max_distance={result.max_distance} bound={result.bound} "
        f"slack={result.slack} strategies_cells={result.cells_evaluated} pass={ok}"
    )
    _emit(
        [uc.SearchResult.CSV_HEADER, result.csv_row(params, args.key_dist)],
        {
            "max_distance": str(result.max_distance),
            "bound": str(result.bound),
            "slack": str(result.slack),
            "strategy_id": result.strategy_id,
            "pass": ok,
        },
        args,
    )
    return 0 if ok else 1


def cmd_budget(args) -> int:
    try:
        params = budget.BudgetParams(
            eps1=args.eps1, eps=args.eps, tag_space=args.tag_space,
            key_space=args.key_space, rounds=args.rounds,
            eps_prime_first=args.eps_prime_first,
        )
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    schemes = ["awr", "straightforward"] if args.scheme == "both" else [args.scheme]
    lines = [budget.BUDGET_CSV_HEADER]
    rows_json = []
    for scheme in schemes:
        table = budget.awr_table(params) if scheme == "awr" else budget.straightforward_table(params)
        for row in table:
            lines.append(row.csv_row(scheme))
            rows_json.append(
                {
                    "scheme": scheme,
                    "round": row.round,
                    "key_perfectness": float(row.key_perfectness),
                    "auth_security": float(row.auth_security),
                    "round_security": float(row.round_security),
                    "vacuous": row.vacuous,
                }
            )
        print(f"{scheme}: {len(table)} rows, last round_security={float(table[-1].round_security)!r}")
    if args.target is not None:
        report = budget.crossover_report(params, args.target)
        print(
            f"rounds at target {args.target!r}: straightforward="
            f"{report.rounds_straightforward} awr={report.rounds_awr}"
        )
    _emit(lines, rows_json, args)
    return 0


def cmd_simulate(args) -> int:
    params = _family(args)
    per_round = 1 if args.scheme == "awr" else 2
    pool = KeyPool([])
    keygen = philox_stream(args.seed, 0)
    if args.tamper == "none":
        channel = adversary.Channel.identity()
    else:
        kind, _, prob = args.tamper.partition(":")
        p = float(prob) if prob else 0.5
        if kind == "flip-tag":
            channel = adversary.bernoulli_tag_flip_channel(p, args.seed, stream=1)
        elif kind == "drop-response":
            channel = adversary.bernoulli_response_corrupt_channel(p, args.seed, stream=1)
        else:
            print(f"unknown tamper spec {args.tamper!r}", file=sys.stderr)
            return 2
    transcript = MessageBlocks.from_bytes(b"round transcript", params)
    lines = [protocol.ROUND_CSV_HEADER]
    rows_json = []
    accepted = 0
    for i in range(args.rounds):
        for _ in range(per_round):
            a = int(keygen.integers(0, params.tag_space))
            b = int(keygen.integers(0, params.tag_space))
            pool.push(AuthKey(a, b))
        outcome = protocol.run_round(
            transcript, transcript, pool, channel,
            mode=args.mode, scheme=args.scheme, params=params, round_index=i,
        )
        accepted += outcome.both_accepted
        lines.append(outcome.csv_row())
        rows_json.append(outcome.__dict__.copy())
    keys_per_round = pool.consumed_count / args.rounds
    summary = f"keys_per_round={keys_per_round!r} accept_rate={accepted / args.rounds!r}"
    print(summary)
    lines.append(f"# {summary}")
    _emit(lines, {"rounds": rows_json, "keys_per_round": keys_per_round,
                  "accept_rate": accepted / args.rounds}, args)
    return 0


def _session_config(args, role: str) -> net.SessionConfig:
    return net.SessionConfig(
        role=role,
        mode=args.mode,
        scheme=args.scheme,
        family=_family(args),
        key_file=args.key_file,
        key_seed=args.key_seed,
        key_count=args.key_count,
        timeout=args.timeout,
    )


def _hostport(spec: str):
    host, _, port = spec.rpartition(":")
    return (host or "127.0.0.1", int(port))


def _verdict_exit(outcome) -> int:
    print(outcome.csv_row())
    return 0 if outcome.both_accepted else 3


def cmd_serve(args) -> int:
    config = _session_config(args, "responder")
    try:
        outcome = net.run_responder(config, _hostport(args.listen))
    except (ConfigMismatch, FrameMalformed, PoolExhausted, ConnectionError, TimeoutError, OSError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 4
    return _verdict_exit(outcome)


def cmd_connect(args) -> int:
    config = _session_config(args, "initiator")
    transcript = args.transcript.encode() if args.transcript else b""
    if args.transcript_file:
        with open(args.transcript_file, "rb") as fh:
            transcript = fh.read()
    try:
        outcome = net.run_initiator(config, _hostport(args.address), transcript)
    except (ConfigMismatch, FrameMalformed, PoolExhausted, ConnectionError, TimeoutError, OSError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 4
    return _verdict_exit(outcome)


_PROXY_RULES = {
    "identity": lambda raw, d: raw,
    "flip-tag-bit": net.flip_tag_bit_rule,
    "drop-response": net.drop_response_rule,
    "corrupt-response": net.corrupt_response_rule,
}


def cmd_proxy(args) -> int:
    proxy = net.TamperProxy(
        _hostport(args.forward), _PROXY_RULES[args.rule], _hostport(args.listen)
    )
    print(f"proxy listening on port {proxy.port}, rule={args.rule}")
    try:
        while True:
            proxy.serve_one(timeout=args.timeout)
    except KeyboardInterrupt:
        return 0
    except OSError as exc:
        print(f"proxy shutdown: {exc}", file=sys.stderr)
        return 0
    finally:
        proxy.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="awrauth", description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    def family_flags(p):
        p.add_argument("--tag-bits", type=int, required=True)
        p.add_argument("--max-blocks", type=int, default=1)

    p = sub.add_parser("check-asu2", help="exhaustively verify the two family conditions")
    family_flags(p)
    p.set_defaults(fn=cmd_check_asu2)

    p = sub.add_parser("attack", help="estimate an attack success rate")
    family_flags(p)
    p.add_argument("--kind", choices=("impersonation", "substitution", "response-forge"), required=True)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--method", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--tag-value", type=int, default=0)
    p.add_argument("--delta-block", type=int, default=1)
    p.add_argument("--delta-tag", type=int, default=0)
    p.add_argument("--consistent", action="store_true",
                   help="use the consistent-key substitution rule")
    p.add_argument("--forge-strategy", choices=("consistent", "blind"), default="consistent")
    p.set_defaults(fn=cmd_attack)

    p = sub.add_parser("uc-check", help="exact distinguisher-advantage search vs the bound")
    family_flags(p)
    p.add_argument("--msg-space", type=int, default=4)
    p.add_argument("--key-dist", default="uniform",
                   help="uniform | point_shift:FRACTION | leak_bits:N")
    p.add_argument("--family", choices=("full", "identity"), default="full")
    p.set_defaults(fn=cmd_uc_check)

    p = sub.add_parser("budget", help="multi-round security budget tables")
    p.add_argument("--eps1", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tag-space", type=int, default=2**32)
    p.add_argument("--key-space", type=int, default=2**64)
    p.add_argument("--rounds", type=int, default=32)
    p.add_argument("--eps-prime-first", type=float, default=0.0)
    p.add_argument("--scheme", choices=("awr", "straightforward", "both"), default="both")
    p.add_argument("--target", type=float, default=None,
                   help="also report the largest round count within this budget")
    p.set_defaults(fn=cmd_budget)

    p = sub.add_parser("simulate", help="run in-process rounds and report key use")
    family_flags(p)
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--scheme", choices=("awr", "straightforward"), default="awr")
    p.add_argument("--mode", choices=("plain", "hidden"), default="plain")
    p.add_argument("--tamper", default="none", help="none | flip-tag:P | drop-response:P")
    p.set_defaults(fn=cmd_simulate)

    def endpoint_flags(p):
        family_flags(p)
        p.add_argument("--mode", choices=("plain", "hidden"), default="plain")
        p.add_argument("--scheme", choices=("awr", "straightforward"), default="awr")
        p.add_argument("--key-file", default=None)
        p.add_argument("--key-seed", type=int, default=None)
        p.add_argument("--key-count", type=int, default=16)
        p.add_argument("--timeout", type=float, default=10.0)

    p = sub.add_parser("serve", help="respond to one authentication round")
    endpoint_flags(p)
    p.add_argument("--listen", default="127.0.0.1:7001")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("connect", help="initiate one authentication round")
    endpoint_flags(p)
    p.add_argument("--address", required=True)
    p.add_argument("--transcript", default="")
    p.add_argument("--transcript-file", default=None)
    p.set_defaults(fn=cmd_connect)

    p = sub.add_parser("proxy", help="in-network tamper proxy")
    p.add_argument("--listen", default="127.0.0.1:0")
    p.add_argument("--forward", required=True)
    p.add_argument("--rule", choices=sorted(_PROXY_RULES), default="identity")
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(fn=cmd_proxy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (AwrAuthError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
