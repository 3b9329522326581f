"""Command-line front end: ``qnetcode verify|run|epr FILE``.

Exit codes: 0 success, 1 negative verdict (not a solution, fidelity or
bound failure), 2 unreadable input or bad flags, 3 protocol error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import coding, netfile, protocol
from .errors import NetworkError, NonPrimeAlphabet, ParseError, QNetCodeError, SchemeNotASolution
from .network import Network

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PROTOCOL = 0, 1, 2, 3
DUMP_STAGES = {"part1:done": "after part 1", "part2:done": "after part 2", "part3:final": "after part 3"}


class UsageError(QNetCodeError):
    pass


def parse_forced(text: str | None, net: Network, aliases: dict[str, str]) -> dict:
    """Parse ``a1=1,edge:s1>n3=0,src:2=1`` into a forced-outcome map."""
    forced: dict = {}
    if not text:
        return forced
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.rpartition("=")
        if not sep or not name:
            raise UsageError(f"--force: expected name=value, got {item!r}")
        selector = aliases.get(name, name)
        try:
            symbol = int(value)
        except ValueError:
            raise UsageError(f"--force: {item!r} has a non-integer value") from None
        if selector.startswith("edge:"):
            body = selector[5:]
            if body.startswith("#"):
                try:
                    key = net.edges[int(body[1:])]
                except (ValueError, IndexError):
                    raise UsageError(f"--force: bad edge index in {selector!r}") from None
            else:
                tail, sep, head = body.partition(">")
                if not sep:
                    raise UsageError(f"--force: bad edge selector {selector!r}")
                key = net.edge(tail, head)
        elif selector.startswith("src:"):
            if not selector[4:].isdigit():
                raise UsageError(f"--force: bad source selector {selector!r}")
            key = int(selector[4:])
            if not 1 <= key <= net.k:
                raise UsageError(f"--force: source index {key} outside 1..{net.k}")
        else:
            raise UsageError(f"--force: unknown outcome name {name!r}")
        forced[key] = symbol
    return forced


def read_amplitudes(path: str, size: int) -> np.ndarray:
    """Text lines ``re im`` in base-d index order."""
    vals = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#")[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{n}: expected 're im'")
        vals.append(complex(float(parts[0]), float(parts[1])))
    if len(vals) != size:
        raise UsageError(f"{path}: expected {size} amplitudes, got {len(vals)}")
    return np.array(vals)


def input_amplitudes(arg: str, d: int, k: int, seed: int) -> np.ndarray:
    if arg == "random":
        # input draws use their own stream so they never shift measurement draws
        return protocol.random_input(d, k, np.random.default_rng((seed, 1)))
    return read_amplitudes(arg, d ** k)


def cmd_verify(args) -> int:
    net, scheme = netfile.parse_network_file(args.path)
    ok, cex = coding.verify_solution(scheme, net)
    if not ok:
        print(f"NOT A SOLUTION: {cex}")
        return EXIT_FAIL
    try:
        kind = "linear" if coding.is_linear(scheme, net) else "nonlinear"
        print(f"SOLUTION ({kind})")
    except NonPrimeAlphabet:
        print("SOLUTION")
    return EXIT_OK


def _one_run(net, scheme, amps, seed, forced, dump):
    lines = []

    def observer(label, state):
        if dump and label in DUMP_STAGES:
            lines.append(f"== state {DUMP_STAGES[label]}: {' '.join(map(str, state.registers))}")
            lines.append(state.dump())

    run = protocol.ProtocolRun(net, scheme, input_amps=amps, seed=seed, forced=forced, observer=observer)
    report = protocol.run_full(run)
    return report, lines


def cmd_run(args) -> int:
    net, scheme = netfile.parse_network_file(args.path)
    forced = parse_forced(args.force, net, netfile.load_aliases(args.path))
    seeds = [args.seed + j for j in range(args.repeat)]
    amps = {s: input_amplitudes(args.input, scheme.d, net.k, s) for s in seeds}

    def job(s):
        return _one_run(net, scheme, amps[s], s, forced, args.dump_states)

    if len(seeds) == 1:
        results = [job(seeds[0])]
    else:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(job, seeds))   # map keeps seed order

    status = EXIT_OK
    for s, (report, dumps) in zip(seeds, results):
        if len(seeds) > 1:
            print(f"# seed {s}")
        for line in dumps:
            print(line)
        print(report.to_text())
        if not report.success:
            status = EXIT_FAIL
    return status


def cmd_epr(args) -> int:
    net, scheme = netfile.parse_network_file(args.path)
    run = protocol.ProtocolRun(net, scheme, seed=args.seed)
    report = protocol.run_epr(run)
    print(f"pairs: {net.k}")
    print(report.to_text())
    bits = report.classical_bits
    direction = "all reverse" if report.forward_sends == 0 else f"{report.forward_sends} forward"
    print(f"classical: {bits} bits, {direction}")
    if report.extension:
        print(f"note: EPR sharing over d={scheme.d} generalises the qubit construction "
              "(extension beyond the d=2 statement)")
    return EXIT_OK if report.success else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnetcode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check that the coding scheme solves the instance")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="transmit a quantum state through the network")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", default="random", help='amplitude file ("re im" per line) or "random"')
    p.add_argument("--force", help="forced outcomes, e.g. a1=1,edge:s1>n3=0,src:1=1")
    p.add_argument("--dump-states", action="store_true", help="print the state after each part")
    p.add_argument("--repeat", type=int, default=1, help="run N consecutive seeds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("epr", help="share maximally entangled pairs")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_epr)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemeNotASolution as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ParseError, NetworkError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QNetCodeError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
