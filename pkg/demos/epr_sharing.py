"""
Sharing EPR pairs with reverse-only classical messages
======================================================

Start every source in a uniform superposition and run only the first two
parts. Each source ends up maximally entangled with its target, and the
only classical traffic is one symbol per internal edge, sent backwards.
"""

import numpy as np

from qnetcode import instances, protocol, qstate

for d in (2, 3):
    net, scheme = instances.butterfly(d)
    run = protocol.ProtocolRun(net, scheme, seed=0)
    report = protocol.run_epr(run)
    purity = [protocol.pair_purity(run.state, i) for i in (1, 2)]
    print(f"d={d}: fidelity {report.fidelity:.9f}, pair purities {np.round(purity, 9)}, "
          f"reverse {report.reverse_sends}, forward {report.forward_sends}")

    # the reduced state of (S1, T1) is the maximally entangled pair
    rho = run.state.reduced_density([qstate.source(1), qstate.target(1)])
    print(np.round(rho.real * d, 6) + 0.0)
