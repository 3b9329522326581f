"""Perfect quantum network coding over directed acyclic k-pair networks.

Simulates any classical coding scheme (linear or not) quantumly, removes
the intermediate registers with Fourier measurements and upstream phase
corrections, and audits every register and classical symbol sent.
"""

from .coding import (
    CodingScheme,
    LocalCode,
    build_scheme,
    classical_run,
    compose_with_edge_bijections,
    eval_local,
    global_encoding,
    is_linear,
    verify_solution,
)
from .netfile import fixture_path, parse_network_file
from .network import Edge, Network, build_network
from .protocol import (
    CommLedger,
    ProtocolRun,
    RunReport,
    run_epr,
    run_full,
    run_part1,
    run_part2,
    run_part3,
)
from .qstate import StateVector, init_state

__version__ = "0.1.0"
